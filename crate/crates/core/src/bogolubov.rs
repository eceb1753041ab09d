//! Bogolubov coefficients between wave-packet bases of right-moving modes.
//!
//! Modes are functions of `u = t - x` only and are paired on `t = 0` with the
//! Klein–Gordon product `(φ1, φ2) = i∫(φ1* ∂_t φ2 - ∂_t φ1* φ2) dx`. For
//! right-movers this equals `i∫(φ1* φ2' - φ1*' φ2) dλ` in any increasing
//! reparametrization λ of `u`, which lets each half-line be integrated in its
//! logarithmic coordinate.
//!
//! Packets are Gaussians `e^{-iσc(λ-λ0)} e^{-s²(λ-λ0)²}` of centre frequency
//! `c` and spectral width `s = c · packet_width`:
//! * plane-wave packets: λ = u on the whole line;
//! * Rindler packets: λ = ū = -ln(-u) on u < 0 only;
//! * Unruh packets: a Rindler packet on one half-line plus its analytic
//!   continuation through the lower half u-plane on the other. These are
//!   positive frequency for Minkowski time and span the same space as
//!   Minkowski plane waves.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::charts::ConformalChart;
use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::stress::Boundary;

pub const DEFAULT_FREQ_MIN: f64 = 0.1;
pub const DEFAULT_FREQ_MAX: f64 = 10.0;
pub const DEFAULT_PACKETS: usize = 32;
pub const DEFAULT_PACKET_WIDTH: f64 = 0.01;
/// Above this relative width the Gaussian tail into negative frequency
/// (≈ e^{-1/(4w²)}) is no longer negligible.
pub const MAX_PACKET_WIDTH: f64 = 0.25;
pub const QUAD_TOL: f64 = 1e-8;
/// Half-window in units of the packet's amplitude standard deviation.
pub const WINDOW_WIDTHS: f64 = 8.0;

/// Support of a packet piece, with the coordinate it is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    /// All of ℝ in `u`.
    Line,
    /// `u < 0` in `ū = -ln(-u)`.
    Negative,
    /// `u > 0` in `ln u`.
    Positive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub region: Region,
    pub amp: Complex64,
    pub freq: f64,
    /// +1 for `e^{-icλ}`, -1 for `e^{+icλ}`.
    pub sign: f64,
    pub spread: f64,
    pub center: f64,
}

impl Piece {
    fn unit(region: Region, freq: f64, sign: f64, spread: f64, center: f64) -> Self {
        Self { region, amp: Complex64::new(1.0, 0.0), freq, sign, spread, center }
    }

    fn scaled(mut self, k: f64) -> Self {
        self.amp *= k;
        self
    }

    pub fn value_and_slope(&self, l: f64) -> (Complex64, Complex64) {
        let x = l - self.center;
        let s2 = self.spread * self.spread;
        let phi = self.amp * Complex64::new(-s2 * x * x, -self.sign * self.freq * x).exp();
        (phi, phi * Complex64::new(-2.0 * s2 * x, -self.sign * self.freq))
    }

    pub fn conj(&self) -> Self {
        Self { amp: self.amp.conj(), sign: -self.sign, ..*self }
    }

    /// Closed-form KG norm of the piece on its region.
    pub fn norm(&self) -> f64 {
        self.sign * 2.0 * self.freq * (PI / 2.0).sqrt() / self.spread * self.amp.norm_sqr()
    }

    fn window(&self) -> (f64, f64) {
        let h = WINDOW_WIDTHS / (self.spread * std::f64::consts::SQRT_2);
        (self.center - h, self.center + h)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Packet {
    pub label: String,
    pub freq: f64,
    pub pieces: Vec<Piece>,
}

impl Packet {
    pub fn conj(&self) -> Packet {
        Packet { label: format!("conj({})", self.label), freq: self.freq, pieces: self.pieces.iter().map(Piece::conj).collect() }
    }

    /// Closed-form KG norm (pieces on different half-lines do not interfere).
    pub fn analytic_norm(&self) -> f64 {
        self.pieces.iter().map(Piece::norm).sum()
    }

    fn eval(&self, region: Region, l: f64) -> (Complex64, Complex64) {
        self.pieces
            .iter()
            .filter(|p| p.region == region)
            .map(|p| p.value_and_slope(l))
            .fold((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)), |a, b| (a.0 + b.0, a.1 + b.1))
    }

    fn window(&self, region: Region) -> Option<(f64, f64)> {
        self.pieces.iter().filter(|p| p.region == region).map(Piece::window).reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)))
    }

    fn on_line(&self) -> bool {
        self.pieces.iter().any(|p| p.region == Region::Line)
    }
}

/// Result of one KG pairing, with its error budget.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KgProduct {
    #[serde(serialize_with = "ser_complex")]
    pub value: Complex64,
    pub quadrature_error: f64,
    /// Estimated contribution from outside the integration window.
    pub truncation_estimate: f64,
    pub warning: Option<String>,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

/// `i∫(φ1* ∂φ2 - ∂φ1* φ2)` over the common support, region by region.
pub fn kg_inner_product(m1: &Packet, m2: &Packet, tol: f64) -> Result<KgProduct> {
    if m1.on_line() != m2.on_line() {
        return Err(Error::DomainMismatch(format!(
            "packets `{}` and `{}` live on different surfaces (whole line vs half-lines): no common coverage",
            m1.label, m2.label
        )));
    }
    let regions: &[Region] = if m1.on_line() { &[Region::Line] } else { &[Region::Negative, Region::Positive] };
    let mut value = Complex64::new(0.0, 0.0);
    let mut quadrature_error = 0.0;
    let mut truncation_estimate = 0.0;
    for &region in regions {
        let (Some(w1), Some(w2)) = (m1.window(region), m2.window(region)) else { continue };
        let (lo, hi) = (w1.0.max(w2.0), w1.1.min(w2.1));
        let integrand = |l: f64| {
            let (a, da) = m1.eval(region, l);
            let (b, db) = m2.eval(region, l);
            Complex64::i() * (a.conj() * db - da.conj() * b)
        };
        if lo >= hi {
            // Disjoint windows: both packets are below e^{-32} of their peak here.
            let mid = 0.5 * (w1.0.max(w2.0) + w1.1.min(w2.1));
            truncation_estimate += integrand(mid).norm() * (w1.1 - w1.0).max(w2.1 - w2.0);
            continue;
        }
        let r = integrate(&integrand, lo, hi, tol / regions.len() as f64);
        value += r.value;
        quadrature_error += r.error;
        // Gaussian tail beyond each edge ≈ |f(edge)| × (one amplitude width).
        let sigma = (hi - lo) / (2.0 * WINDOW_WIDTHS);
        truncation_estimate += (integrand(lo).norm() + integrand(hi).norm()) * sigma;
    }
    let warning = (truncation_estimate > tol)
        .then(|| format!("window truncation estimate {truncation_estimate:.3e} exceeds tolerance {tol:.1e}"));
    Ok(KgProduct { value, quadrature_error, truncation_estimate, warning })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BasisKind {
    /// Minkowski plane-wave packets in `u`.
    MinkowskiPlane,
    /// Rindler packets in `ū` on the right wedge.
    Rindler,
    /// Minkowski-positive Unruh packets: `U_i` (peaked on u < 0) then `Ũ_i` (peaked on u > 0).
    MinkowskiUnruh,
}

#[derive(Debug, Clone)]
pub struct ModeBasis {
    kind: BasisKind,
    chart: ConformalChart,
    boundary: Boundary,
    frequencies: Vec<f64>,
    packet_width: f64,
    time_shift: f64,
}

impl ModeBasis {
    pub fn new(kind: BasisKind, frequencies: Vec<f64>, packet_width: f64) -> Result<Self> {
        if frequencies.is_empty() {
            return Err(Error::BadParameter { name: "frequencies".into(), value: 0.0, reason: "empty grid".into() });
        }
        for w in frequencies.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::BadParameter {
                    name: "frequencies".into(),
                    value: w[1],
                    reason: "must be strictly increasing".into(),
                });
            }
        }
        if !(frequencies[0] > 0.0) || !frequencies.iter().all(|f| f.is_finite()) {
            return Err(Error::BadParameter {
                name: "frequencies".into(),
                value: frequencies[0],
                reason: "must be finite and positive".into(),
            });
        }
        if !(packet_width > 0.0 && packet_width <= MAX_PACKET_WIDTH) {
            return Err(Error::BadParameter {
                name: "packet_width".into(),
                value: packet_width,
                reason: format!("must lie in (0, {MAX_PACKET_WIDTH}] so packets stay positive frequency"),
            });
        }
        let chart = match kind {
            BasisKind::Rindler => ConformalChart::rindler(),
            BasisKind::MinkowskiPlane | BasisKind::MinkowskiUnruh => ConformalChart::minkowski(),
        };
        Ok(Self { kind, chart, boundary: Boundary::FullLine, frequencies, packet_width, time_shift: 0.0 })
    }

    /// `n` log-spaced packets over `[lo, hi]`.
    pub fn log_spaced(kind: BasisKind, lo: f64, hi: f64, n: usize, packet_width: f64) -> Result<Self> {
        let freqs = if n == 1 {
            vec![lo]
        } else {
            (0..n).map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp()).collect()
        };
        Self::new(kind, freqs, packet_width)
    }

    pub fn default_grid(kind: BasisKind) -> Self {
        Self::log_spaced(kind, DEFAULT_FREQ_MIN, DEFAULT_FREQ_MAX, DEFAULT_PACKETS, DEFAULT_PACKET_WIDTH)
            .expect("default grid is valid")
    }

    /// Translate every packet by `shift` in the chart's time. Not defined for Unruh packets,
    /// whose two halves move in opposite directions under a boost.
    pub fn with_time_shift(mut self, shift: f64) -> Result<Self> {
        if self.kind == BasisKind::MinkowskiUnruh && shift != 0.0 {
            return Err(Error::Unsupported("time shift of Unruh packets".into()));
        }
        self.time_shift = shift;
        Ok(self)
    }

    /// Standing-wave bases need left-movers as well; only the full line is supported.
    pub fn with_boundary(mut self, boundary: Boundary) -> Result<Self> {
        if boundary == Boundary::DirichletHalfLine {
            return Err(Error::Unsupported("Dirichlet half-line mode bases (right-movers only)".into()));
        }
        self.boundary = boundary;
        Ok(self)
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn chart(&self) -> &ConformalChart {
        &self.chart
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn packet_width(&self) -> f64 {
        self.packet_width
    }

    pub fn spread(&self, freq: f64) -> f64 {
        freq * self.packet_width
    }

    pub fn packets(&self) -> Vec<Packet> {
        let single = |region: Region, label: &str, f: f64| {
            let raw = Piece::unit(region, f, 1.0, self.spread(f), self.time_shift);
            let piece = raw.scaled(raw.norm().recip().sqrt());
            Packet { label: format!("{label}[{f}]"), freq: f, pieces: vec![piece] }
        };
        match self.kind {
            BasisKind::MinkowskiPlane => self.frequencies.iter().map(|&f| single(Region::Line, "plane", f)).collect(),
            BasisKind::Rindler => self.frequencies.iter().map(|&f| single(Region::Negative, "rindler", f)).collect(),
            BasisKind::MinkowskiUnruh => {
                let right: Vec<Packet> = self.frequencies.iter().map(|&f| self.unruh(f, Region::Negative, "unruh")).collect();
                let left = self.frequencies.iter().map(|&f| self.unruh(f, Region::Positive, "unruh~"));
                right.into_iter().chain(left).collect()
            }
        }
    }

    /// Rindler-type packet on `home` plus its lower-half-plane continuation on the other side.
    ///
    /// `∫G(Ω) e^{-πΩ} e^{iΩλ} dΩ` with Gaussian `G` centred at `f` is again a
    /// Gaussian, centred at `f - 2πs²` and weighted by `e^{-πf + π²s²}`.
    fn unruh(&self, f: f64, home: Region, label: &str) -> Packet {
        let s = self.spread(f);
        let away = if home == Region::Negative { Region::Positive } else { Region::Negative };
        let main = Piece::unit(home, f, 1.0, s, 0.0);
        let partner = Piece::unit(away, f - 2.0 * PI * s * s, -1.0, s, 0.0).scaled((-PI * f + PI * PI * s * s).exp());
        let k = (main.norm() + partner.norm()).recip().sqrt();
        Packet { label: format!("{label}[{f}]"), freq: f, pieces: vec![main.scaled(k), partner.scaled(k)] }
    }
}

/// Coefficients `α_ji = (B_j, A_i)` and `β_ji = -(B_j, A_i*)`.
#[derive(Debug, Clone, Serialize)]
pub struct BogolubovPair {
    pub row_kind: BasisKind,
    pub col_kind: BasisKind,
    pub row_frequencies: Vec<f64>,
    pub col_labels: Vec<String>,
    pub packet_width: f64,
    #[serde(serialize_with = "ser_matrix")]
    pub alpha: Vec<Vec<Complex64>>,
    #[serde(serialize_with = "ser_matrix")]
    pub beta: Vec<Vec<Complex64>>,
    pub alpha_error: Vec<Vec<f64>>,
    pub beta_error: Vec<Vec<f64>>,
    pub max_truncation: f64,
    pub warnings: Vec<String>,
}

fn ser_matrix<S: serde::Serializer>(m: &[Vec<Complex64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let pairs: Vec<Vec<[f64; 2]>> = m.iter().map(|row| row.iter().map(|z| [z.re, z.im]).collect()).collect();
    serde::Serialize::serialize(&pairs, s)
}

pub fn compute_coefficients(basis_a: &ModeBasis, basis_b: &ModeBasis) -> Result<BogolubovPair> {
    let cols = basis_a.packets();
    let rows = basis_b.packets();
    let cols_conj: Vec<Packet> = cols.iter().map(Packet::conj).collect();
    type Row = (Vec<Complex64>, Vec<Complex64>, Vec<f64>, Vec<f64>, f64, Vec<String>);
    let computed: Vec<Row> = rows
        .par_iter()
        .map(|b| -> Result<Row> {
            let mut row: Row = (vec![], vec![], vec![], vec![], 0.0, vec![]);
            for (a, a_conj) in cols.iter().zip(&cols_conj) {
                let al = kg_inner_product(b, a, QUAD_TOL)?;
                let be = kg_inner_product(b, a_conj, QUAD_TOL)?;
                row.0.push(al.value);
                row.1.push(-be.value);
                row.2.push(al.quadrature_error);
                row.3.push(be.quadrature_error);
                row.4 = row.4.max(al.truncation_estimate).max(be.truncation_estimate);
                row.5.extend(al.warning.map(|w| format!("({}, {}): {w}", b.label, a.label)));
                row.5.extend(be.warning.map(|w| format!("({}, {}*): {w}", b.label, a.label)));
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut pair = BogolubovPair {
        row_kind: basis_b.kind,
        col_kind: basis_a.kind,
        row_frequencies: rows.iter().map(|p| p.freq).collect(),
        col_labels: cols.iter().map(|p| p.label.clone()).collect(),
        packet_width: basis_b.packet_width,
        alpha: vec![],
        beta: vec![],
        alpha_error: vec![],
        beta_error: vec![],
        max_truncation: 0.0,
        warnings: vec![],
    };
    for (al, be, ae, bee, tr, w) in computed {
        pair.alpha.push(al);
        pair.beta.push(be);
        pair.alpha_error.push(ae);
        pair.beta_error.push(bee);
        pair.max_truncation = pair.max_truncation.max(tr);
        pair.warnings.extend(w);
    }
    Ok(pair)
}

impl BogolubovPair {
    pub fn rows(&self) -> usize {
        self.alpha.len()
    }

    fn check_row(&self, j: usize) -> Result<()> {
        if j < self.rows() {
            Ok(())
        } else {
            Err(Error::BadParameter {
                name: "packet index".into(),
                value: j as f64,
                reason: format!("only {} rows", self.rows()),
            })
        }
    }

    /// `Σ_k |β_jk|²`: occupation of row packet `j` in the column basis's vacuum.
    pub fn expected_number(&self, j: usize) -> Result<f64> {
        self.check_row(j)?;
        Ok(self.beta[j].iter().map(|z| z.norm_sqr()).sum())
    }

    pub fn alpha_mass(&self, j: usize) -> Result<f64> {
        self.check_row(j)?;
        Ok(self.alpha[j].iter().map(|z| z.norm_sqr()).sum())
    }

    /// `Σ_k (|α_jk|² - |β_jk|²)`, 1 for a complete column basis.
    pub fn row_normalization(&self, j: usize) -> Result<f64> {
        Ok(self.alpha_mass(j)? - self.expected_number(j)?)
    }

    /// `Σ|β|² / Σ|α|²` for row `j`.
    pub fn thermal_ratio(&self, j: usize) -> Result<f64> {
        Ok(self.expected_number(j)? / self.alpha_mass(j)?)
    }

    /// Error bar on `expected_number(j)`: quadrature error, mass spread onto
    /// non-partner columns, and the known Gaussian-width bias.
    pub fn discretization_error(&self, j: usize) -> Result<f64> {
        let n = self.expected_number(j)?;
        let quad: f64 = self.beta[j].iter().zip(&self.beta_error[j]).map(|(b, e)| 2.0 * b.norm() * e + e * e).sum();
        let spill = |m: &[Complex64]| {
            let total: f64 = m.iter().map(|z| z.norm_sqr()).sum();
            let peak = m.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
            total - peak
        };
        let leakage = spill(&self.beta[j]) + n * spill(&self.alpha[j]);
        Ok(quad + leakage + n * self.width_bias(j))
    }

    /// Relative bias of `Σ|β|² / Σ|α|²` from finite packet width, for Rindler
    /// rows against Unruh columns: `e^{π²s²}(1 - πs²/Ω)² - 1`.
    pub fn width_bias(&self, j: usize) -> f64 {
        if (self.row_kind, self.col_kind) != (BasisKind::Rindler, BasisKind::MinkowskiUnruh) {
            return 0.0;
        }
        let f = self.row_frequencies[j];
        let s = f * self.packet_width;
        ((PI * PI * s * s).exp() * (1.0 - PI * s * s / f).powi(2) - 1.0).abs()
    }
}

/// Planck occupation `1/(e^{2πΩ} - 1)` at unit acceleration.
pub fn planck_number(freq: f64) -> f64 {
    1.0 / (2.0 * PI * freq).exp_m1()
}

/// Closed form of the KG product of two whole-line packets
/// `e^{-iω_k u} e^{-s_k²(u-c_k)²}` (unit amplitudes, no time shift phase).
pub fn plane_packet_overlap(w1: f64, s1: f64, c1: f64, w2: f64, s2: f64, c2: f64) -> Complex64 {
    // Integrand: φ1* φ2 · [ω1 + ω2 + 2i(s1²(u-c1) - s2²(u-c2))], φ1* φ2 = exp(-A u² + B u + K).
    let a = s1 * s1 + s2 * s2;
    let b = Complex64::new(2.0 * (s1 * s1 * c1 + s2 * s2 * c2), w1 - w2);
    let k = Complex64::new(-(s1 * s1 * c1 * c1 + s2 * s2 * c2 * c2), -w1 * c1 + w2 * c2);
    let gauss = (PI / a).sqrt() * (b * b / (4.0 * a) + k).exp();
    let mean_u = b / (2.0 * a);
    let linear = Complex64::new(0.0, 2.0) * ((s1 * s1 - s2 * s2) * mean_u - (s1 * s1 * c1 - s2 * s2 * c2));
    gauss * (Complex64::new(w1 + w2, 0.0) + linear)
}
