//! Conformally flat charts of two-dimensional Minkowski space.
//!
//! Every chart is anchored to the global inertial null coordinates
//! `u = t - x`, `v = t + x` (the *base*): a chart is a pair of monotone
//! relabelings `u = f(u*)`, `v = g(v*)`, and its conformal factor is
//! `C*(u*, v*) = f'(u*) g'(v*) C(f(u*), g(v*))` with `C` the base factor
//! (identically 1 except for the synthetic curved test geometry).

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jets::{Jet3, Scalar};

/// Open interval `(lo, hi)`; endpoints may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const REAL: Interval = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn above(lo: f64) -> Self {
        Self::new(lo, f64::INFINITY)
    }

    pub fn below(hi: f64) -> Self {
        Self::new(f64::NEG_INFINITY, hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn is_empty(&self) -> bool {
        !(self.lo < self.hi)
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// A finite point well inside the interval.
    pub fn interior_point(&self) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => 0.5 * (self.lo + self.hi),
            (true, false) => self.lo + 1.0_f64.max(self.lo.abs()),
            (false, true) => self.hi - 1.0_f64.max(self.hi.abs()),
            (false, false) => 0.0,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// Analytic form of a chart map.
#[derive(Debug, Clone)]
pub enum MapKind {
    Identity,
    /// `scale * x + shift`
    Affine {
        scale: f64,
        shift: f64,
    },
    Exp,
    Log,
    /// `-exp(-x)`: Rindler `ū ↦ u`.
    NegExpNeg,
    /// `-ln(-x)`: inverse of [`MapKind::NegExpNeg`].
    NegLogNeg,
    /// `(a x + b) / (c x + d)`
    Mobius {
        a: f64,
        b: f64,
        c: f64,
        d: f64,
    },
    /// Coefficients in ascending order.
    Polynomial(Vec<f64>),
    /// `ln(2 - a e^{-x}) - ln a`: reflection off a mirror at `z = 1/a`, in Rindler null coordinates.
    MirrorReflection {
        accel: f64,
    },
    /// `ln a - ln(2 - a e^{x})`: inverse of [`MapKind::MirrorReflection`].
    MirrorReflectionInverse {
        accel: f64,
    },
    /// `t - sqrt(t² + a⁻²)`: retarded time along the hyperbola `z² - t² = a⁻²`.
    HyperbolaRetarded {
        accel: f64,
    },
    /// `t + sqrt(t² + a⁻²)`
    HyperbolaAdvanced {
        accel: f64,
    },
    /// `outer ∘ inner`
    Compose(Arc<ChartMap>, Arc<ChartMap>),
    /// Numerical inverse of a monotone map.
    Inverse(Arc<ChartMap>),
}

/// Strictly monotone, smooth map of an open interval onto an open interval.
#[derive(Debug, Clone)]
pub struct ChartMap {
    label: String,
    kind: MapKind,
    domain: Interval,
    range: Interval,
    increasing: bool,
}

const NEWTON_LIFT_STEPS: usize = 4;
const BISECT_WIDTH: f64 = 1e-3;
const INVERT_RTOL: f64 = 1e-12;
const INVERT_MAX_ITER: usize = 100;

impl ChartMap {
    fn raw(label: impl Into<String>, kind: MapKind, domain: Interval, range: Interval, increasing: bool) -> Self {
        Self { label: label.into(), kind, domain, range, increasing }
    }

    pub fn identity() -> Self {
        Self::raw("id", MapKind::Identity, Interval::REAL, Interval::REAL, true)
    }

    pub fn affine(scale: f64, shift: f64) -> Result<Self> {
        if scale == 0.0 || !scale.is_finite() || !shift.is_finite() {
            return Err(Error::BadParameter {
                name: "scale".into(),
                value: scale,
                reason: "affine map needs a finite nonzero slope".into(),
            });
        }
        Ok(Self::raw(format!("{scale}*x+{shift}"), MapKind::Affine { scale, shift }, Interval::REAL, Interval::REAL, scale > 0.0))
    }

    pub fn exp() -> Self {
        Self::raw("exp", MapKind::Exp, Interval::REAL, Interval::above(0.0), true)
    }

    pub fn log() -> Self {
        Self::raw("log", MapKind::Log, Interval::above(0.0), Interval::REAL, true)
    }

    /// `ū ↦ u = -e^{-ū}`.
    pub fn rindler_u() -> Self {
        Self::raw("-exp(-x)", MapKind::NegExpNeg, Interval::REAL, Interval::below(0.0), true)
    }

    /// `v̄ ↦ v = e^{v̄}`.
    pub fn rindler_v() -> Self {
        Self::exp()
    }

    /// Möbius map restricted to `domain`, which must not contain the pole.
    pub fn mobius(a: f64, b: f64, c: f64, d: f64, domain: Interval) -> Result<Self> {
        let det = a * d - b * c;
        if det == 0.0 {
            return Err(Error::BadParameter { name: "ad-bc".into(), value: det, reason: "degenerate Möbius map".into() });
        }
        if c != 0.0 && domain.contains(-d / c) {
            return Err(Error::DomainMismatch(format!("Möbius pole {} inside domain {domain}", -d / c)));
        }
        let limit = |x: f64| -> f64 {
            if x.is_infinite() {
                if c == 0.0 {
                    (a / d) * x
                } else {
                    a / c
                }
            } else if c != 0.0 && c * x + d == 0.0 {
                // Approaching the pole from inside the domain.
                let inside = if domain.lo == x { 1.0 } else { -1.0 };
                let slope_sign = det.signum();
                // f'(x) = det/(cx+d)^2 > 0 means f → +∞ when approached from the left.
                -inside * slope_sign * f64::INFINITY
            } else {
                (a * x + b) / (c * x + d)
            }
        };
        let (l, h) = (limit(domain.lo), limit(domain.hi));
        let increasing = det > 0.0;
        let range = if increasing { Interval::new(l, h) } else { Interval::new(h, l) };
        Ok(Self::raw(format!("mobius({a},{b},{c},{d})"), MapKind::Mobius { a, b, c, d }, domain, range, increasing))
    }

    /// Polynomial map; monotonicity is spot-checked on a sample grid of `domain`.
    pub fn polynomial(coeffs: Vec<f64>, domain: Interval) -> Result<Self> {
        let eval = |x: f64| coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c);
        let slope = |x: f64| coeffs.iter().enumerate().skip(1).rev().fold(0.0, |acc, (k, &c)| acc * x + k as f64 * c);
        let (lo, hi) = sample_bounds(&domain);
        let probes: Vec<f64> = (0..=200).map(|i| lo + (hi - lo) * i as f64 / 200.0).collect();
        let increasing = slope(domain.interior_point()) > 0.0;
        for &x in &probes {
            let s = slope(x);
            if s == 0.0 || (s > 0.0) != increasing {
                return Err(Error::NotMonotone { map: "polynomial".into(), x });
            }
        }
        let degree = coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0);
        let lead = coeffs.get(degree).copied().unwrap_or(0.0);
        let limit = |x: f64| {
            if x.is_infinite() {
                let sign = lead.signum() * if degree % 2 == 1 { x.signum() } else { 1.0 };
                sign * f64::INFINITY
            } else {
                eval(x)
            }
        };
        let (l, h) = (limit(domain.lo), limit(domain.hi));
        let range = if increasing { Interval::new(l, h) } else { Interval::new(h, l) };
        Ok(Self::raw("polynomial", MapKind::Polynomial(coeffs), domain, range, increasing))
    }

    /// Closed-form reflection map `p(ū) = ln(2 - a e^{-ū}) - ln a` for `ū > ln(a/2)`.
    pub fn mirror_reflection(accel: f64) -> Result<Self> {
        check_positive("a", accel)?;
        let lo = (accel / 2.0).ln();
        Ok(Self::raw(
            format!("mirror-reflection(a={accel})"),
            MapKind::MirrorReflection { accel },
            Interval::above(lo),
            Interval::below((2.0 / accel).ln()),
            true,
        ))
    }

    pub fn mirror_reflection_inverse(accel: f64) -> Result<Self> {
        Ok(Self::mirror_reflection(accel)?.inverse())
    }

    pub fn hyperbola_retarded(accel: f64) -> Result<Self> {
        check_positive("a", accel)?;
        Ok(Self::raw(
            format!("t-sqrt(t^2+1/a^2)(a={accel})"),
            MapKind::HyperbolaRetarded { accel },
            Interval::REAL,
            Interval::below(0.0),
            true,
        ))
    }

    pub fn hyperbola_advanced(accel: f64) -> Result<Self> {
        check_positive("a", accel)?;
        Ok(Self::raw(
            format!("t+sqrt(t^2+1/a^2)(a={accel})"),
            MapKind::HyperbolaAdvanced { accel },
            Interval::REAL,
            Interval::above(0.0),
            true,
        ))
    }

    /// `outer ∘ inner`, restricted to where `inner` lands inside `outer`'s domain.
    pub fn compose(outer: &ChartMap, inner: &ChartMap) -> Result<Self> {
        if let (MapKind::NegExpNeg, MapKind::MirrorReflectionInverse { accel }) = (&outer.kind, &inner.kind) {
            // -exp(-(ln a - ln(2 - a eˣ))) = eˣ - 2/a, which stays well conditioned
            // where 2 - a eˣ cancels.
            let flat = ChartMap::compose(&ChartMap::affine(1.0, -2.0 / accel)?, &ChartMap::exp())?;
            return flat.restrict(inner.domain);
        }
        let domain = inner.domain.intersect(&inner.preimage(&outer.domain)?);
        if domain.is_empty() {
            return Err(Error::DomainMismatch(format!(
                "range {} of `{}` misses domain {} of `{}`",
                inner.range, inner.label, outer.domain, outer.label
            )));
        }
        let increasing = outer.increasing == inner.increasing;
        let l = outer.extended(inner.extended(domain.lo)?)?;
        let h = outer.extended(inner.extended(domain.hi)?)?;
        let range = if increasing { Interval::new(l, h) } else { Interval::new(h, l) };
        Ok(Self::raw(
            format!("{}∘{}", outer.label, inner.label),
            MapKind::Compose(Arc::new(outer.clone()), Arc::new(inner.clone())),
            domain,
            range,
            increasing,
        ))
    }

    /// Inverse map; closed form when one is registered for this kind.
    pub fn inverse(&self) -> ChartMap {
        let kind = match &self.kind {
            MapKind::Identity => MapKind::Identity,
            MapKind::Affine { scale, shift } => MapKind::Affine { scale: 1.0 / scale, shift: -shift / scale },
            MapKind::Exp => MapKind::Log,
            MapKind::Log => MapKind::Exp,
            MapKind::NegExpNeg => MapKind::NegLogNeg,
            MapKind::NegLogNeg => MapKind::NegExpNeg,
            MapKind::Mobius { a, b, c, d } => MapKind::Mobius { a: *d, b: -b, c: -c, d: *a },
            MapKind::MirrorReflection { accel } => MapKind::MirrorReflectionInverse { accel: *accel },
            MapKind::MirrorReflectionInverse { accel } => MapKind::MirrorReflection { accel: *accel },
            MapKind::Inverse(m) => return (**m).clone(),
            MapKind::Compose(outer, inner) => MapKind::Compose(Arc::new(inner.inverse()), Arc::new(outer.inverse())),
            MapKind::Polynomial(_) | MapKind::HyperbolaRetarded { .. } | MapKind::HyperbolaAdvanced { .. } => {
                MapKind::Inverse(Arc::new(self.clone()))
            }
        };
        Self::raw(format!("inv({})", self.label), kind, self.range, self.domain, self.increasing)
    }

    /// Inverse evaluated by root finding even when a closed form exists.
    pub fn numeric_inverse(&self) -> ChartMap {
        Self::raw(
            format!("inv({})", self.label),
            MapKind::Inverse(Arc::new(self.clone())),
            self.range,
            self.domain,
            self.increasing,
        )
    }

    /// Same map on a narrower domain.
    pub fn restrict(&self, iv: Interval) -> Result<ChartMap> {
        let domain = self.domain.intersect(&iv);
        if domain.is_empty() {
            return Err(Error::DomainMismatch(format!("restriction {iv} misses domain {} of `{}`", self.domain, self.label)));
        }
        let (l, h) = (self.extended(domain.lo)?, self.extended(domain.hi)?);
        let range = if self.increasing { Interval::new(l, h) } else { Interval::new(h, l) };
        Ok(Self::raw(self.label.clone(), self.kind.clone(), domain, range, self.increasing))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn range(&self) -> Interval {
        self.range
    }

    pub fn is_increasing(&self) -> bool {
        self.increasing
    }

    pub fn monotone_sign(&self) -> f64 {
        if self.increasing {
            1.0
        } else {
            -1.0
        }
    }

    /// True when the inverse is evaluated by a registered closed form.
    pub fn has_closed_inverse(&self) -> bool {
        !matches!(self.inverse().kind, MapKind::Inverse(_))
    }

    pub fn eval<S: Scalar>(&self, x: S) -> Result<S> {
        Ok(self.eval_with_slope(x)?.0)
    }

    /// `(f(x), f'(x))`. Both carry the derivatives of `x` when `S` is a jet.
    pub fn eval_with_slope<S: Scalar>(&self, x: S) -> Result<(S, S)> {
        let x0 = x.primal();
        if !self.domain.contains(x0) {
            return Err(Error::OutOfDomain { map: self.label.clone(), x: x0, lo: self.domain.lo, hi: self.domain.hi });
        }
        let one = S::constant(1.0);
        Ok(match &self.kind {
            MapKind::Identity => (x, one),
            MapKind::Affine { scale, shift } => (x.scale(*scale).offset(*shift), S::constant(*scale)),
            MapKind::Exp => {
                let e = x.exp();
                (e, e)
            }
            MapKind::Log => (x.try_ln()?, x.try_recip()?),
            MapKind::NegExpNeg => {
                let e = (-x).exp();
                (-e, e)
            }
            MapKind::NegLogNeg => (-(-x).try_ln()?, -x.try_recip()?),
            MapKind::Mobius { a, b, c, d } => {
                let r = x.scale(*c).offset(*d).try_recip()?;
                (x.scale(*a).offset(*b) * r, (r * r).scale(a * d - b * c))
            }
            MapKind::Polynomial(coeffs) => {
                let value = coeffs.iter().rev().fold(S::constant(0.0), |acc, &c| acc * x + S::constant(c));
                let slope = coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .rev()
                    .fold(S::constant(0.0), |acc, (k, &c)| acc * x + S::constant(k as f64 * c));
                (value, slope)
            }
            MapKind::MirrorReflection { accel } => {
                let w = (-x).exp().scale(*accel);
                let g = S::constant(2.0) - w;
                (g.try_ln()?.offset(-accel.ln()), w.try_div(g)?)
            }
            MapKind::MirrorReflectionInverse { accel } => {
                let e = x.exp().scale(*accel);
                let g = S::constant(2.0) - e;
                (-g.try_ln()?.offset(-accel.ln()), e.try_div(g)?)
            }
            MapKind::HyperbolaRetarded { accel } => {
                let s = (x * x).offset(accel.powi(-2)).try_sqrt()?;
                (x - s, one - x.try_div(s)?)
            }
            MapKind::HyperbolaAdvanced { accel } => {
                let s = (x * x).offset(accel.powi(-2)).try_sqrt()?;
                (x + s, one + x.try_div(s)?)
            }
            MapKind::Compose(outer, inner) => {
                let (y, sy) = inner.eval_with_slope(x)?;
                let (z, sz) = outer.eval_with_slope(y)?;
                (z, sz * sy)
            }
            MapKind::Inverse(m) => {
                if !m.range.contains(x0) {
                    return Err(Error::NoRoot { map: m.label.clone(), target: x0, lo: m.range.lo, hi: m.range.hi });
                }
                let root = invert_map(m, x0, m.domain)?;
                // Newton on the jet doubles the number of exact derivative orders per step.
                let mut z = S::constant(root);
                for _ in 0..NEWTON_LIFT_STEPS {
                    let (fz, sz) = m.eval_with_slope(z)?;
                    z = z - (fz - x).try_div(sz)?;
                }
                let (_, sz) = m.eval_with_slope(z)?;
                (z, sz.try_recip()?)
            }
        })
    }

    /// `(f, f', f'', f''')` at `x`.
    pub fn tower(&self, x: f64) -> Result<Jet3> {
        self.eval(Jet3::seed(x))
    }

    /// Value at `x`, with one-sided limits at (or beyond) the domain endpoints.
    pub fn extended(&self, x: f64) -> Result<f64> {
        if x <= self.domain.lo {
            Ok(if self.increasing { self.range.lo } else { self.range.hi })
        } else if x >= self.domain.hi {
            Ok(if self.increasing { self.range.hi } else { self.range.lo })
        } else {
            self.eval(x)
        }
    }

    /// Preimage of an interval (clipped to the domain).
    pub fn preimage(&self, iv: &Interval) -> Result<Interval> {
        let clipped = self.range.intersect(iv);
        if clipped.is_empty() {
            return Ok(Interval::new(0.0, 0.0));
        }
        let a = self.inverse_extended(clipped.lo)?;
        let b = self.inverse_extended(clipped.hi)?;
        Ok(if self.increasing { Interval::new(a, b) } else { Interval::new(b, a) })
    }

    fn inverse_extended(&self, y: f64) -> Result<f64> {
        let (at_lo, at_hi) = if self.increasing { (self.domain.lo, self.domain.hi) } else { (self.domain.hi, self.domain.lo) };
        if y <= self.range.lo {
            Ok(at_lo)
        } else if y >= self.range.hi {
            Ok(at_hi)
        } else {
            self.invert(y)
        }
    }

    /// Solve `f(x) = target`; closed form when registered, else bracketed Newton.
    pub fn invert(&self, target: f64) -> Result<f64> {
        if !self.range.contains(target) {
            return Err(Error::NoRoot { map: self.label.clone(), target, lo: self.range.lo, hi: self.range.hi });
        }
        let inv = self.inverse();
        if !matches!(inv.kind, MapKind::Inverse(_)) {
            return inv.eval(target);
        }
        invert_map(self, target, self.domain)
    }
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::BadParameter { name: name.into(), value, reason: "must be positive".into() })
    }
}

fn sample_bounds(iv: &Interval) -> (f64, f64) {
    let c = iv.interior_point();
    let lo = if iv.lo.is_finite() { iv.lo + 1e-9 * (c - iv.lo) } else { c - 1e3 };
    let hi = if iv.hi.is_finite() { iv.hi - 1e-9 * (iv.hi - c) } else { c + 1e3 };
    (lo, hi)
}

/// Points marching from `start` towards `end` (finite or infinite), staying inside.
fn probe_towards(start: f64, end: f64, k: i32) -> f64 {
    if end.is_finite() {
        end - (end - start) * 2f64.powi(-k)
    } else {
        start + end.signum() * (2f64.powi(k) - 1.0) * 1f64.max(start.abs())
    }
}

/// Monotone inversion: bracket, bisect to width 1e-3, then safeguarded Newton.
///
/// Converges to `|m(x) - target| <= 1e-12 max(1, |target|)` or to the
/// resolution of `f64`, whichever comes first.
pub fn invert_map(m: &ChartMap, target: f64, bracket: Interval) -> Result<f64> {
    let search = bracket.intersect(&m.domain);
    if search.is_empty() {
        return Err(Error::DomainMismatch(format!("bracket {bracket} misses domain {} of `{}`", m.domain, m.label)));
    }
    let sign = m.monotone_sign();
    // g is increasing with a root at the solution.
    let g = |x: f64| -> Result<f64> { Ok(sign * (m.eval(x)? - target)) };
    let no_root = || Error::NoRoot { map: m.label.clone(), target, lo: m.range.lo, hi: m.range.hi };

    let c = search.interior_point();
    let gc = g(c)?;
    let (mut lo, mut hi) = if gc == 0.0 {
        return Ok(c);
    } else if gc < 0.0 {
        let mut prev = c;
        let mut found = None;
        for k in 1..=60 {
            let x = probe_towards(c, search.hi, k);
            if !search.contains(x) || x == prev {
                break;
            }
            let gx = g(x)?;
            if gx >= 0.0 {
                found = Some((prev, x));
                break;
            }
            prev = x;
        }
        found.ok_or_else(no_root)?
    } else {
        let mut prev = c;
        let mut found = None;
        for k in 1..=60 {
            let x = probe_towards(c, search.lo, k);
            if !search.contains(x) || x == prev {
                break;
            }
            let gx = g(x)?;
            if gx <= 0.0 {
                found = Some((x, prev));
                break;
            }
            prev = x;
        }
        found.ok_or_else(no_root)?
    };

    while hi - lo > BISECT_WIDTH {
        let mid = 0.5 * (lo + hi);
        if g(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let tol = INVERT_RTOL * target.abs().max(1.0);
    let mut x = 0.5 * (lo + hi);
    for _ in 0..INVERT_MAX_ITER {
        let (fx, sx) = m.eval_with_slope(x)?;
        let r = fx - target;
        if r.abs() <= tol {
            return Ok(x);
        }
        if sign * sx <= 0.0 {
            return Err(Error::NotMonotone { map: m.label.clone(), x });
        }
        if sign * r < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = x - r / sx;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if next == x || hi - lo <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            return Ok(x);
        }
        x = next;
    }
    Err(Error::NoConvergence { map: m.label.clone(), iterations: INVERT_MAX_ITER })
}

/// Conformal factor of the base coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaseFactor {
    /// Minkowski space, `C ≡ 1`.
    Flat,
    /// Synthetic curved geometry `C = (u + v)²` on `u + v > 0`, used only to
    /// exercise curvature-dependent code paths.
    SumSquared,
}

impl BaseFactor {
    pub fn eval<S: Scalar>(&self, u: S, v: S) -> Result<S> {
        match self {
            BaseFactor::Flat => Ok(S::constant(1.0)),
            BaseFactor::SumSquared => {
                let s = u + v;
                if s.primal() <= 0.0 {
                    return Err(Error::Coverage {
                        chart: "sum-squared".into(),
                        detail: format!("u + v = {} must be positive", s.primal()),
                    });
                }
                Ok(s * s)
            }
        }
    }

    pub fn covers(&self, u: f64, v: f64) -> bool {
        match self {
            BaseFactor::Flat => true,
            BaseFactor::SumSquared => u + v > 0.0,
        }
    }
}

/// Global class of a chart, deciding whether a chart vacuum can be built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChartClass {
    /// Coordinates range over all of ℝ² (plane-wave quantization).
    FullPlane,
    /// Half-line `x* > 0` with a Dirichlet wall at `x* = 0`.
    HalfLine,
    /// No standard Fock construction attempted.
    Unquantized,
}

/// A conformally flat chart given by relabelings of the base null rays.
#[derive(Debug, Clone)]
pub struct ConformalChart {
    name: String,
    u_map: ChartMap,
    v_map: ChartMap,
    u_inv: ChartMap,
    v_inv: ChartMap,
    base: BaseFactor,
    class: ChartClass,
}

/// Null metric components `g_uv = C/2`, `g^uv = 2/C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullMetric {
    pub conformal_factor: f64,
    pub g_uv: f64,
    pub g_inv_uv: f64,
}

impl ConformalChart {
    pub fn new(name: impl Into<String>, u_map: ChartMap, v_map: ChartMap, base: BaseFactor, class: ChartClass) -> Self {
        let u_inv = u_map.inverse();
        let v_inv = v_map.inverse();
        Self { name: name.into(), u_map, v_map, u_inv, v_inv, base, class }
    }

    pub fn minkowski() -> Self {
        Self::new("minkowski", ChartMap::identity(), ChartMap::identity(), BaseFactor::Flat, ChartClass::FullPlane)
    }

    /// Rindler null chart `u = -e^{-ū}`, `v = e^{v̄}`; covers the right wedge `z > |t|`.
    pub fn rindler() -> Self {
        Self::new("rindler", ChartMap::rindler_u(), ChartMap::rindler_v(), BaseFactor::Flat, ChartClass::FullPlane)
    }

    /// Identity relabelings of the curved test geometry `C = (u + v)²`.
    pub fn sum_squared() -> Self {
        Self::new("sum-squared", ChartMap::identity(), ChartMap::identity(), BaseFactor::SumSquared, ChartClass::Unquantized)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn class(&self) -> ChartClass {
        self.class
    }

    pub fn base(&self) -> BaseFactor {
        self.base
    }

    pub fn u_map(&self) -> &ChartMap {
        &self.u_map
    }

    pub fn v_map(&self) -> &ChartMap {
        &self.v_map
    }

    pub fn u_inverse(&self) -> &ChartMap {
        &self.u_inv
    }

    pub fn v_inverse(&self) -> &ChartMap {
        &self.v_inv
    }

    /// Relabel this chart's null coordinates: the new chart's `u*` maps through
    /// `relabel_u` into this chart's first coordinate, and so on.
    pub fn compose(
        &self,
        name: impl Into<String>,
        relabel_u: &ChartMap,
        relabel_v: &ChartMap,
        class: ChartClass,
    ) -> Result<ConformalChart> {
        for (relabel, outer, which) in [(relabel_u, &self.u_map, "u"), (relabel_v, &self.v_map, "v")] {
            if !relabel.range().is_subset_of(&outer.domain()) {
                return Err(Error::DomainMismatch(format!(
                    "{which} relabeling range {} not inside `{}` domain {}",
                    relabel.range(),
                    self.name,
                    outer.domain()
                )));
            }
        }
        let u = ChartMap::compose(&self.u_map, relabel_u)?;
        let v = ChartMap::compose(&self.v_map, relabel_v)?;
        Ok(ConformalChart::new(name, u, v, self.base, class))
    }

    pub fn to_base(&self, c1: f64, c2: f64) -> Result<(f64, f64)> {
        Ok((self.u_map.eval(c1)?, self.v_map.eval(c2)?))
    }

    pub fn covers_base(&self, u: f64, v: f64) -> bool {
        self.u_map.range().contains(u) && self.v_map.range().contains(v) && self.base.covers(u, v)
    }

    pub fn from_base(&self, u: f64, v: f64) -> Result<(f64, f64)> {
        for (x, map, which) in [(u, &self.u_map, "u"), (v, &self.v_map, "v")] {
            let r = map.range();
            if !r.contains(x) {
                let mut detail = format!("base {which} = {x} outside {r}");
                if r.lo == 0.0 || r.hi == 0.0 {
                    detail.push_str(&format!(" (horizon at {which} = 0)"));
                }
                return Err(Error::Coverage { chart: self.name.clone(), detail });
            }
        }
        Ok((self.u_inv.eval(u)?, self.v_inv.eval(v)?))
    }

    /// `C*(c1, c2) = f'(c1) g'(c2) C(f(c1), g(c2))`.
    pub fn conformal_factor<S: Scalar>(&self, c1: S, c2: S) -> Result<S> {
        let (u, su) = self.u_map.eval_with_slope(c1)?;
        let (v, sv) = self.v_map.eval_with_slope(c2)?;
        Ok(su * sv * self.base.eval(u, v)?)
    }

    /// Conformal factor with its derivatives to order 3 along each null direction.
    pub fn conformal_factor_jets(&self, c1: f64, c2: f64) -> Result<(Jet3, Jet3)> {
        let along_u = self.conformal_factor(Jet3::seed(c1), Jet3::lift(c2))?;
        let along_v = self.conformal_factor(Jet3::lift(c1), Jet3::seed(c2))?;
        Ok((along_u, along_v))
    }

    pub fn metric(&self, c1: f64, c2: f64) -> Result<NullMetric> {
        let c = self.conformal_factor(c1, c2)?;
        Ok(NullMetric { conformal_factor: c, g_uv: 0.5 * c, g_inv_uv: 2.0 / c })
    }

    /// `R = -(4/C) ∂u∂v ln C`, with the mixed partial from nested jets.
    pub fn ricci<S: Scalar>(&self, c1: S, c2: S) -> Result<S> {
        let u: Jet3<Jet3<S>> = Jet3::seed(Jet3::lift(c1));
        let v: Jet3<Jet3<S>> = Jet3::lift(Jet3::seed(c2));
        let c = self.conformal_factor(u, v)?;
        let log_c = c.try_ln()?;
        Ok((log_c.d1.d1.try_div(c.value.value)?).scale(-4.0))
    }
}

pub fn ricci_scalar(chart: &ConformalChart, c1: f64, c2: f64) -> Result<f64> {
    chart.ricci(c1, c2)
}

/// A point given by its two null coordinates in a named chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub c1: f64,
    pub c2: f64,
    pub chart: String,
}

impl Point {
    pub fn new(c1: f64, c2: f64, chart: impl Into<String>) -> Self {
        Self { c1, c2, chart: chart.into() }
    }
}

/// Convert a point between charts by way of the base coordinates.
pub fn convert_point(p: &Point, from: &ConformalChart, to: &ConformalChart) -> Result<Point> {
    if p.chart != from.name {
        return Err(Error::DomainMismatch(format!("point is in chart `{}`, not `{}`", p.chart, from.name)));
    }
    let (u, v) = from.to_base(p.c1, p.c2)?;
    let (c1, c2) = to.from_base(u, v)?;
    Ok(Point::new(c1, c2, to.name.clone()))
}

pub fn null_from_cartesian(t: f64, x: f64) -> (f64, f64) {
    (t - x, t + x)
}

pub fn cartesian_from_null(u: f64, v: f64) -> (f64, f64) {
    (0.5 * (u + v), 0.5 * (v - u))
}

/// `(t, z) ↦ (τ, ρ)` with `τ = atanh(t/z)`, `ρ = sqrt(z² - t²)`; right wedge only.
pub fn rindler_polar_from_inertial(t: f64, z: f64) -> Result<(f64, f64)> {
    if z <= t.abs() {
        return Err(Error::Coverage {
            chart: "rindler".into(),
            detail: format!("(t, z) = ({t}, {z}) is not in the right wedge z > |t|"),
        });
    }
    let (u, v) = null_from_cartesian(t, z);
    let (ub, vb) = ConformalChart::rindler().from_base(u, v)?;
    let tau = 0.5 * (ub + vb);
    let zeta = 0.5 * (vb - ub);
    Ok((tau, zeta.exp()))
}

/// `t = ρ sinh τ`, `z = ρ cosh τ`.
pub fn inertial_from_rindler_polar(tau: f64, rho: f64) -> (f64, f64) {
    (rho * tau.sinh(), rho * tau.cosh())
}

/// Rindler null coordinates `ū = τ - ζ`, `v̄ = τ + ζ` with `ρ = e^ζ`.
pub fn rindler_null_from_polar(tau: f64, rho: f64) -> Result<(f64, f64)> {
    let zeta = rho.try_ln()?;
    Ok((tau - zeta, tau + zeta))
}

/// Charts addressable by a fixed name. Mirror-adapted charts are built by
/// [`crate::scenarios`] since they depend on a trajectory.
pub fn chart_by_name(name: &str) -> Result<ConformalChart> {
    match name {
        "minkowski" => Ok(ConformalChart::minkowski()),
        "rindler" => Ok(ConformalChart::rindler()),
        "sum-squared" => Ok(ConformalChart::sum_squared()),
        other => Err(Error::UnknownChart(other.into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn minkowski_factor_is_one() {
        let m = ConformalChart::minkowski();
        let (ju, jv) = m.conformal_factor_jets(0.3, -2.0).unwrap();
        assert_eq!(ju, Jet3::new(1.0, 0.0, 0.0, 0.0));
        assert_eq!(jv, Jet3::new(1.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn rindler_factor_values() {
        let r = ConformalChart::rindler();
        assert_relative_eq!(r.conformal_factor(0.0, 0.0).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(r.conformal_factor(1.0, 0.0).unwrap(), (-1.0f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(r.conformal_factor(-0.4, 1.3).unwrap(), (1.7f64).exp(), max_relative = 1e-14);
    }

    #[test]
    fn rindler_maps() {
        let r = ConformalChart::rindler();
        assert_eq!(r.u_map().eval(0.0).unwrap(), -1.0);
        assert_eq!(r.v_map().eval(0.0).unwrap(), 1.0);
        for ub in [-3.0, -0.5, 0.0, 0.7, 4.0] {
            let u = r.u_map().eval(ub).unwrap();
            assert_relative_eq!(r.u_inverse().eval(u).unwrap(), ub, epsilon = 1e-12);
        }
    }

    #[test]
    fn ricci_vanishes_for_flat_charts() {
        for chart in [ConformalChart::minkowski(), ConformalChart::rindler()] {
            for (a, b) in [(0.0, 0.0), (1.2, -0.7), (-2.0, 3.0)] {
                assert!(ricci_scalar(&chart, a, b).unwrap().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ricci_of_sum_squared_matches_symbolic() {
        let chart = ConformalChart::sum_squared();
        for (u, v) in [(1.0, 0.5), (0.2, 0.3), (3.0, -1.0)] {
            let c = (u + v) * (u + v);
            let (cu, cv, cuv) = (2.0 * (u + v), 2.0 * (u + v), 2.0);
            let symbolic = -4.0 / (c * c * c) * (c * cuv - cu * cv);
            assert_relative_eq!(ricci_scalar(&chart, u, v).unwrap(), symbolic, max_relative = 1e-10);
        }
        assert!(matches!(ricci_scalar(&chart, -1.0, 0.5), Err(Error::Coverage { .. })));
    }

    #[test]
    fn metric_components() {
        let r = ConformalChart::rindler();
        let g = r.metric(0.3, 0.9).unwrap();
        assert_eq!(g.g_uv, g.conformal_factor / 2.0);
        assert_eq!(g.g_inv_uv, 2.0 / g.conformal_factor);
    }

    #[test]
    fn inertial_to_rindler_polar() {
        let (tau, rho) = rindler_polar_from_inertial(0.0, 1.0).unwrap();
        assert!(tau.abs() < 1e-15);
        assert_relative_eq!(rho, 1.0, max_relative = 1e-15);
        let (tau, rho) = rindler_polar_from_inertial(0.0, 0.5).unwrap();
        assert!(tau.abs() < 1e-15);
        assert_relative_eq!(rho, 0.5, max_relative = 1e-15);
        let (tau, rho) = rindler_polar_from_inertial(0.3, 0.8).unwrap();
        assert_relative_eq!(tau, (0.3f64 / 0.8).atanh(), max_relative = 1e-13);
        assert_relative_eq!(rho, (0.64f64 - 0.09).sqrt(), max_relative = 1e-13);
        let (t, z) = inertial_from_rindler_polar(tau, rho);
        assert_relative_eq!(t, 0.3, max_relative = 1e-13);
        assert_relative_eq!(z, 0.8, max_relative = 1e-13);
    }

    #[test]
    fn beyond_horizon_is_coverage_error() {
        assert!(matches!(rindler_polar_from_inertial(1.0, 1.0), Err(Error::Coverage { .. })));
        assert!(matches!(rindler_polar_from_inertial(2.0, 1.0), Err(Error::Coverage { .. })));
        let p = Point::new(0.5, 1.0, "minkowski");
        let err = convert_point(&p, &ConformalChart::minkowski(), &ConformalChart::rindler()).unwrap_err();
        match err {
            Error::Coverage { detail, .. } => assert!(detail.contains("horizon"), "{detail}"),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn convert_point_round_trip() {
        let m = ConformalChart::minkowski();
        let r = ConformalChart::rindler();
        let p = Point::new(-0.4, 2.5, "minkowski");
        let q = convert_point(&p, &m, &r).unwrap();
        let back = convert_point(&q, &r, &m).unwrap();
        assert_relative_eq!(back.c1, p.c1, max_relative = 1e-12);
        assert_relative_eq!(back.c2, p.c2, max_relative = 1e-12);
        assert!(convert_point(&q, &m, &r).is_err());
    }

    #[test]
    fn invert_closed_forms() {
        assert_relative_eq!(ChartMap::rindler_u().invert(-1.0).unwrap(), 0.0, epsilon = 1e-15);
        let p = ChartMap::mirror_reflection(1.0).unwrap();
        assert!(p.invert(0.0).unwrap().abs() < 1e-15);
        // Numerical path for the same map.
        let x = invert_map(&p, 0.0, p.domain()).unwrap();
        assert!(x.abs() < 1e-12);
    }

    #[test]
    fn invert_errors() {
        let e = ChartMap::exp();
        assert!(matches!(e.invert(-1.0), Err(Error::NoRoot { .. })));
        let cubic = ChartMap::polynomial(vec![0.0, 1.0, 0.0, 1.0], Interval::REAL).unwrap();
        assert!(matches!(invert_map(&cubic, 5.0, Interval::new(-1.0, 1.0)), Err(Error::NoRoot { .. })));
        assert!(matches!(ChartMap::polynomial(vec![0.0, -1.0, 0.0, 1.0], Interval::REAL), Err(Error::NotMonotone { .. })));
    }

    #[test]
    fn inverse_jets_are_exact() {
        // Numeric inverse of x + x³ against the derivatives of the forward map.
        let cubic = ChartMap::polynomial(vec![0.0, 1.0, 0.0, 1.0], Interval::REAL).unwrap();
        let inv = cubic.inverse();
        assert!(matches!(inv.kind(), MapKind::Inverse(_)));
        let y = 2.0; // x = 1
        let j = inv.tower(y).unwrap();
        assert_relative_eq!(j.value, 1.0, max_relative = 1e-12);
        // g' = 1/f', g'' = -f''/f'^3, g''' = (3 f''^2 - f' f''')/f'^5
        let (f1, f2, f3) = (4.0, 6.0, 6.0);
        assert_relative_eq!(j.d1, 1.0 / f1, max_relative = 1e-12);
        assert_relative_eq!(j.d2, -f2 / f1.powi(3), max_relative = 1e-12);
        assert_relative_eq!(j.d3, (3.0 * f2 * f2 - f1 * f3) / f1.powi(5), max_relative = 1e-12);
    }

    #[test]
    fn compose_with_identity_keeps_factor() {
        let r = ConformalChart::rindler();
        let same = r.compose("rindler-again", &ChartMap::identity(), &ChartMap::identity(), ChartClass::FullPlane).unwrap();
        for (a, b) in [(0.1, 0.2), (-1.5, 2.0)] {
            assert_relative_eq!(same.conformal_factor(a, b).unwrap(), r.conformal_factor(a, b).unwrap(), max_relative = 1e-15);
        }
    }

    #[test]
    fn compose_domain_mismatch() {
        let r = ConformalChart::rindler();
        let m = ConformalChart::minkowski();
        // Rindler relabeling lands in u < 0, fine for Minkowski, but exp lands in (0, ∞)
        // which is not inside the Rindler u-map's image-independent domain check.
        assert!(m.compose("x", &ChartMap::rindler_u(), &ChartMap::exp(), ChartClass::FullPlane).is_ok());
        let bad = ChartMap::log().restrict(Interval::new(1.0, 2.0)).unwrap();
        let only_neg = ConformalChart::new(
            "neg",
            ChartMap::rindler_u().inverse(),
            ChartMap::identity(),
            BaseFactor::Flat,
            ChartClass::Unquantized,
        );
        assert!(matches!(
            only_neg.compose("y", &bad, &ChartMap::identity(), ChartClass::Unquantized),
            Err(Error::DomainMismatch(_))
        ));
        let _ = r;
    }

    #[test]
    fn registry() {
        assert_eq!(chart_by_name("rindler").unwrap().name(), "rindler");
        assert!(matches!(chart_by_name("nope"), Err(Error::UnknownChart(_))));
    }

    #[test]
    fn mobius_range_and_inverse() {
        let m = ChartMap::mobius(2.0, 1.0, 1.0, 3.0, Interval::above(-3.0)).unwrap();
        assert_eq!(m.range().hi, 2.0);
        assert_eq!(m.range().lo, f64::NEG_INFINITY);
        let x = 0.7;
        let y = m.eval(x).unwrap();
        assert_relative_eq!(m.invert(y).unwrap(), x, max_relative = 1e-14);
    }
}
