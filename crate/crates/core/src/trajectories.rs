//! Mirror worldlines and the reflection maps they induce.

use crate::charts::{ChartClass, ChartMap, ConformalChart, Interval};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrajectoryKind {
    /// `z = z0` for all inertial time.
    Stationary {
        z0: f64,
    },
    /// `z² - t² = 1/a²`, `z > 0`.
    Hyperbola {
        accel: f64,
    },
    Custom,
}

/// A worldline as null coordinates `(U(λ), V(λ))` in some chart, λ being inertial time.
#[derive(Debug, Clone)]
pub struct Trajectory {
    label: String,
    chart: ConformalChart,
    u_of: ChartMap,
    v_of: ChartMap,
    domain: Interval,
    kind: TrajectoryKind,
}

impl Trajectory {
    /// Worldline from arbitrary increasing maps; the λ-domain is where both are defined.
    pub fn new(label: impl Into<String>, chart: ConformalChart, u_of: ChartMap, v_of: ChartMap) -> Result<Self> {
        let label = label.into();
        let domain = u_of.domain().intersect(&v_of.domain());
        if domain.is_empty() {
            return Err(Error::DomainMismatch(format!("`{label}`: U and V have disjoint parameter domains")));
        }
        if !u_of.is_increasing() || !v_of.is_increasing() {
            let bad = if u_of.is_increasing() { &v_of } else { &u_of };
            return Err(Error::NotMonotone { map: bad.label().to_string(), x: domain.interior_point() });
        }
        let u_of = u_of.restrict(domain)?;
        let v_of = v_of.restrict(domain)?;
        Ok(Self { label, chart, u_of, v_of, domain, kind: TrajectoryKind::Custom })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn chart(&self) -> &ConformalChart {
        &self.chart
    }

    pub fn u_of(&self) -> &ChartMap {
        &self.u_of
    }

    pub fn v_of(&self) -> &ChartMap {
        &self.v_of
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn kind(&self) -> TrajectoryKind {
        self.kind
    }

    /// `(U(λ), V(λ))` in the trajectory's chart.
    pub fn at(&self, lambda: f64) -> Result<(f64, f64)> {
        Ok((self.u_of.eval(lambda)?, self.v_of.eval(lambda)?))
    }

    /// Base null coordinates of the worldline at λ.
    pub fn base_at(&self, lambda: f64) -> Result<(f64, f64)> {
        let (c1, c2) = self.at(lambda)?;
        self.chart.to_base(c1, c2)
    }

    /// Re-express in another chart, clipping λ to where the worldline is covered.
    pub fn to_chart(&self, chart: &ConformalChart) -> Result<Trajectory> {
        let in_base = |own: &ChartMap, to_base: &ChartMap, from_base: &ChartMap| -> Result<ChartMap> {
            let b = ChartMap::compose(to_base, own)?;
            ChartMap::compose(from_base, &b)
        };
        let never = |_| Error::Coverage {
            chart: chart.name().to_string(),
            detail: format!("trajectory `{}` never enters the chart", self.label),
        };
        let u = in_base(&self.u_of, self.chart.u_map(), chart.u_inverse()).map_err(never)?;
        let v = in_base(&self.v_of, self.chart.v_map(), chart.v_inverse()).map_err(never)?;
        let domain = u.domain().intersect(&v.domain());
        if domain.is_empty() {
            return Err(never(Error::State(String::new())));
        }
        Ok(Trajectory {
            label: self.label.clone(),
            chart: chart.clone(),
            u_of: u.restrict(domain)?,
            v_of: v.restrict(domain)?,
            domain,
            kind: self.kind,
        })
    }

    /// Null asymptotes at the two ends of the λ-domain.
    ///
    /// At each end one coordinate must settle (successive probes within 1e-8)
    /// while the conjugate one grows without bound: either beyond 1e8 or with
    /// per-decade increments that do not decay, which covers logarithmic growth.
    pub fn asymptotes(&self) -> Asymptotes {
        Asymptotes { past: self.end_asymptote(End::Past), future: self.end_asymptote(End::Future) }
    }

    fn end_asymptote(&self, end: End) -> Option<NullAsymptote> {
        let e = match end {
            End::Past => self.domain.lo,
            End::Future => self.domain.hi,
        };
        let inward = match end {
            End::Past => 1.0,
            End::Future => -1.0,
        };
        let probes: Vec<f64> = (1..=10)
            .map(|k| if e.is_finite() { e + inward * 10f64.powi(-k) * 1f64.max(e.abs()) } else { -inward * 10f64.powi(k) })
            .filter(|&x| self.domain.contains(x))
            .collect();
        if probes.len() < 3 {
            return None;
        }
        let samples = |m: &ChartMap| -> Option<Vec<f64>> { probes.iter().map(|&x| m.eval(x).ok()).collect() };
        let us = samples(&self.u_of)?;
        let vs = samples(&self.v_of)?;
        let limit = |m: &ChartMap, xs: &[f64]| -> f64 {
            let exact = m.extended(e).unwrap_or(f64::NAN);
            if exact.is_finite() {
                exact
            } else {
                *xs.last().unwrap()
            }
        };
        if settles(&us) && diverges(&vs) {
            Some(NullAsymptote { direction: NullDirection::U, value: limit(&self.u_of, &us) })
        } else if settles(&vs) && diverges(&us) {
            Some(NullAsymptote { direction: NullDirection::V, value: limit(&self.v_of, &vs) })
        } else {
            None
        }
    }

    /// Reflection map `p = V ∘ U⁻¹` in this trajectory's chart (closed form when known).
    pub fn reflection_map(&self) -> Result<ReflectionMap> {
        let closed = match (self.kind, self.chart.name()) {
            (TrajectoryKind::Stationary { z0 }, "rindler") => Some(ChartMap::mirror_reflection(1.0 / z0)?),
            (TrajectoryKind::Hyperbola { accel }, "minkowski") => {
                Some(ChartMap::mobius(0.0, -1.0 / (accel * accel), 1.0, 0.0, Interval::below(0.0))?)
            }
            _ => None,
        };
        match closed {
            Some(p) => ReflectionMap::new(p, self.chart.clone()),
            None => self.numeric_reflection_map(),
        }
    }

    /// Reflection map through numerical inversion of `U`, whatever the trajectory.
    pub fn numeric_reflection_map(&self) -> Result<ReflectionMap> {
        let p = ChartMap::compose(&self.v_of, &self.u_of.numeric_inverse())?;
        ReflectionMap::new(p, self.chart.clone())
    }
}

#[derive(Clone, Copy)]
enum End {
    Past,
    Future,
}

fn settles(xs: &[f64]) -> bool {
    let n = xs.len();
    (xs[n - 1] - xs[n - 2]).abs() < 1e-8
}

fn diverges(ys: &[f64]) -> bool {
    let steps: Vec<f64> = ys.windows(2).map(|w| w[1].abs() - w[0].abs()).collect();
    if steps.iter().any(|&s| s <= 0.0) {
        return false;
    }
    ys.last().unwrap().abs() > 1e8 || steps[steps.len() - 1] >= 0.5 * steps[0]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NullDirection {
    /// A ray of constant first null coordinate.
    U,
    /// A ray of constant second null coordinate.
    V,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullAsymptote {
    pub direction: NullDirection,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Asymptotes {
    pub past: Option<NullAsymptote>,
    pub future: Option<NullAsymptote>,
}

/// `û = p(ū)`, `v̂ = q(v̄)` with `q` the identity: the relabeling that puts the mirror at `x̂ = 0`.
#[derive(Debug, Clone)]
pub struct ReflectionMap {
    p: ChartMap,
    q: ChartMap,
    chart: ConformalChart,
}

impl ReflectionMap {
    fn new(p: ChartMap, chart: ConformalChart) -> Result<Self> {
        if !p.is_increasing() {
            return Err(Error::NotMonotone { map: p.label().to_string(), x: p.domain().interior_point() });
        }
        Ok(Self { p, q: ChartMap::identity(), chart })
    }

    pub fn p(&self) -> &ChartMap {
        &self.p
    }

    pub fn q(&self) -> &ChartMap {
        &self.q
    }

    /// Range of ū over which rays have reflected off the mirror.
    pub fn validity_domain(&self) -> Interval {
        self.p.domain()
    }

    /// The chart the reflection map is expressed in.
    pub fn chart(&self) -> &ConformalChart {
        &self.chart
    }

    /// `p(U(λ)) - q(V(λ))`, zero on the mirror.
    pub fn residual_on(&self, traj: &Trajectory, lambda: f64) -> Result<f64> {
        let (u, v) = traj.at(lambda)?;
        Ok(self.p.eval(u)? - self.q.eval(v)?)
    }

    /// Mirror-adapted chart `(û, v̂)`: the base chart relabeled by `p⁻¹` and `q⁻¹`.
    pub fn hatted_chart(&self, name: impl Into<String>) -> Result<ConformalChart> {
        self.chart.compose(name, &self.p.inverse(), &self.q.inverse(), ChartClass::HalfLine)
    }
}

pub fn stationary_mirror(z0: f64) -> Result<Trajectory> {
    if !(z0 > 0.0 && z0.is_finite()) {
        return Err(Error::BadParameter { name: "z0".into(), value: z0, reason: "mirror must sit at z0 > 0".into() });
    }
    let mut t = Trajectory::new(
        format!("stationary:z0={z0}"),
        ConformalChart::minkowski(),
        ChartMap::affine(1.0, -z0)?,
        ChartMap::affine(1.0, z0)?,
    )?;
    t.kind = TrajectoryKind::Stationary { z0 };
    Ok(t)
}

pub fn uniformly_accelerated_mirror(accel: f64) -> Result<Trajectory> {
    if !(accel > 0.0 && accel.is_finite()) {
        return Err(Error::BadParameter { name: "a".into(), value: accel, reason: "acceleration must be positive".into() });
    }
    let mut t = Trajectory::new(
        format!("hyperbola:a={accel}"),
        ConformalChart::minkowski(),
        ChartMap::hyperbola_retarded(accel)?,
        ChartMap::hyperbola_advanced(accel)?,
    )?;
    t.kind = TrajectoryKind::Hyperbola { accel };
    Ok(t)
}

/// Parse `stationary:z0=<value>` or `hyperbola:a=<value>`.
pub fn trajectory_by_name(desc: &str) -> Result<Trajectory> {
    let bad = || Error::Unsupported(format!("trajectory `{desc}`"));
    let (kind, param) = desc.split_once(':').ok_or_else(bad)?;
    let (key, value) = param.split_once('=').ok_or_else(bad)?;
    let value: f64 = value.trim().parse().map_err(|_| bad())?;
    match (kind, key) {
        ("stationary", "z0") => stationary_mirror(value),
        ("hyperbola", "a") => uniformly_accelerated_mirror(value),
        _ => Err(bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn stationary_values() {
        let m = stationary_mirror(1.0).unwrap();
        assert_eq!(m.at(0.0).unwrap(), (-1.0, 1.0));
        let m = stationary_mirror(0.5).unwrap();
        assert_eq!(m.at(0.5).unwrap(), (0.0, 1.0));
        for t in [-3.0, 0.1, 7.0] {
            let (u, v) = m.at(t).unwrap();
            assert_relative_eq!(v - u, 1.0, epsilon = 1e-14);
        }
        assert!(stationary_mirror(0.0).is_err());
        assert!(stationary_mirror(-1.0).is_err());
    }

    #[test]
    fn hyperbola_values() {
        let h = uniformly_accelerated_mirror(1.0).unwrap();
        let (u, v) = h.at(0.0).unwrap();
        assert_relative_eq!(u, -1.0);
        assert_relative_eq!(v, 1.0);
        let h = uniformly_accelerated_mirror(2.5).unwrap();
        for t in [-10.0, -0.3, 0.0, 2.0, 40.0] {
            let (u, v) = h.at(t).unwrap();
            assert_relative_eq!(u * v, -1.0 / 6.25, max_relative = 1e-9);
            let (ub, vb) = h.to_chart(&ConformalChart::rindler()).unwrap().at(t).unwrap();
            // ρ = e^{(v̄-ū)/2}
            assert_relative_eq!((0.5 * (vb - ub)).exp(), 1.0 / 2.5, max_relative = 1e-12);
        }
        assert!(uniformly_accelerated_mirror(0.0).is_err());
    }

    #[test]
    fn stationary_in_rindler() {
        let a = 1.0;
        let r = stationary_mirror(1.0 / a).unwrap().to_chart(&ConformalChart::rindler()).unwrap();
        assert_eq!(r.domain(), Interval::new(-1.0, 1.0));
        let (ub, vb) = r.at(0.0).unwrap();
        assert!(ub.abs() < 1e-15 && vb.abs() < 1e-15);
        for t in [-0.9, -0.2, 0.5, 0.99] {
            let (ub, vb) = r.at(t).unwrap();
            assert_relative_eq!(ub, a.ln() - (1.0 - a * t).ln(), epsilon = 1e-14);
            assert_relative_eq!(vb, (1.0 + a * t).ln() - a.ln(), epsilon = 1e-14);
        }
    }

    #[test]
    fn asymptote_detection() {
        for a in [0.5, 1.0, 2.0] {
            let r = stationary_mirror(1.0 / a).unwrap().to_chart(&ConformalChart::rindler()).unwrap();
            let asym = r.asymptotes();
            let past = asym.past.unwrap();
            let future = asym.future.unwrap();
            assert_eq!(past.direction, NullDirection::U);
            assert_relative_eq!(past.value, (a / 2.0).ln(), epsilon = 1e-14);
            assert_eq!(future.direction, NullDirection::V);
            assert_relative_eq!(future.value, -(a / 2.0).ln(), epsilon = 1e-14);
        }
        let m = stationary_mirror(1.0).unwrap();
        assert_eq!(m.asymptotes(), Asymptotes { past: None, future: None });
        let h = uniformly_accelerated_mirror(1.0).unwrap().asymptotes();
        assert_eq!(h.past.unwrap().direction, NullDirection::V);
        assert_eq!(h.past.unwrap().value, 0.0);
        assert_eq!(h.future.unwrap().direction, NullDirection::U);
    }

    #[test]
    fn closed_reflection_map() {
        let r = stationary_mirror(1.0).unwrap().to_chart(&ConformalChart::rindler()).unwrap();
        let rm = r.reflection_map().unwrap();
        assert!(matches!(rm.p().kind(), crate::charts::MapKind::MirrorReflection { .. }));
        assert!(rm.p().eval(0.0).unwrap().abs() < 1e-15);
        assert!(rm.p().eval(0.5f64.ln() + 1e-12).unwrap() < -20.0);
        assert_relative_eq!(rm.validity_domain().lo, 0.5f64.ln());
    }

    #[test]
    fn numeric_reflection_matches_closed_form() {
        for a in [0.5, 1.0, 2.0] {
            let r = stationary_mirror(1.0 / a).unwrap().to_chart(&ConformalChart::rindler()).unwrap();
            let closed = r.reflection_map().unwrap();
            let numeric = r.numeric_reflection_map().unwrap();
            let lo = (a / 2.0).ln();
            for i in 0..1000 {
                let ub = lo + 0.01 + 12.0 * i as f64 / 999.0;
                let want = ChartMap::mirror_reflection(a).unwrap().eval(ub).unwrap();
                assert_relative_eq!(closed.p().eval(ub).unwrap(), want, epsilon = 1e-13);
                let got = numeric.p().eval(ub).unwrap();
                assert!((got - want).abs() <= 1e-10 * want.abs().max(1.0), "a={a} ū={ub}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn mirror_sits_at_hatted_origin() {
        let r = stationary_mirror(1.0).unwrap().to_chart(&ConformalChart::rindler()).unwrap();
        for rm in [r.reflection_map().unwrap(), r.numeric_reflection_map().unwrap()] {
            for t in [-0.999, -0.5, 0.0, 0.5, 0.999] {
                assert!(rm.residual_on(&r, t).unwrap().abs() < 1e-10);
            }
        }
        let h = uniformly_accelerated_mirror(1.5).unwrap();
        let rm = h.reflection_map().unwrap();
        for t in [-20.0, -1.0, 0.0, 3.0, 50.0] {
            assert!(rm.residual_on(&h, t).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn hatted_chart_factor() {
        // Ĉ = e^{û + v̂} for the stationary mirror in the Rindler chart.
        let r = stationary_mirror(1.0).unwrap().to_chart(&ConformalChart::rindler()).unwrap();
        let hat = r.reflection_map().unwrap().hatted_chart("hatted").unwrap();
        for (uh, vh) in [(-2.0, 0.0), (0.3, -1.0), (0.6, 2.0)] {
            assert_relative_eq!(hat.conformal_factor(uh, vh).unwrap(), f64::exp(uh + vh), max_relative = 1e-13);
        }
        assert_eq!(hat.class(), ChartClass::HalfLine);
    }

    #[test]
    fn registry() {
        assert!(matches!(trajectory_by_name("stationary:z0=2").unwrap().kind(), TrajectoryKind::Stationary { z0 } if z0 == 2.0));
        assert!(trajectory_by_name("hyperbola:a=1").is_ok());
        assert!(trajectory_by_name("circle:r=1").is_err());
    }
}
