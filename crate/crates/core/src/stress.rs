//! Renormalized stress tensor of chart vacua, tensor transformations between
//! charts, and the conservation / trace-anomaly checks.
//!
//! For the vacuum of a chart with conformal factor `C` the null components are
//! `T_uu = F_u(C)/24π`, `T_vv = F_v(C)/24π`, `T_uv = -R C/96π`, with
//! `F_x(f) = f''/f - (3/2)(f'/f)²`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::charts::{BaseFactor, ChartClass, ChartMap, ConformalChart, Point};
use crate::error::{Error, Result};
use crate::jets::{Jet3, Scalar};

pub const INV_24PI: f64 = 1.0 / (24.0 * PI);
pub const INV_48PI: f64 = 1.0 / (48.0 * PI);
pub const INV_96PI: f64 = 1.0 / (96.0 * PI);

/// Distance kept from singular rays by grid checks, in observation coordinates.
pub const SINGULAR_MARGIN: f64 = 1e-3;

/// `F(f) = f''/f - (3/2)(f'/f)²` from a jet of `f`.
pub fn f_functional<S: Scalar>(f: Jet3<S>) -> Result<S> {
    if f.value.primal() == 0.0 {
        return Err(Error::Singular { what: "F-functional (f = 0)".into(), location: f.value.primal() });
    }
    let r = f.value.try_recip()?;
    let g = f.d1 * r;
    Ok(f.d2 * r - (g * g).scale(1.5))
}

/// Schwarzian `p'''/p' - (3/2)(p''/p')²` by the direct formula.
pub fn schwarzian(p: &ChartMap, x: f64) -> Result<f64> {
    let t = p.tower(x)?;
    if t.d1 == 0.0 {
        return Err(Error::Singular { what: format!("Schwarzian of `{}`", p.label()), location: x });
    }
    Ok(t.d3 / t.d1 - 1.5 * (t.d2 / t.d1).powi(2))
}

/// `F` of the derivative `p'`; equals the Schwarzian of `p`.
pub fn f_of_derivative(p: &ChartMap, x: f64) -> Result<f64> {
    let t = p.tower(x)?;
    f_functional(Jet3::new(t.d1, t.d2, t.d3, 0.0))
        .map_err(|_| Error::Singular { what: format!("F of the derivative of `{}`", p.label()), location: x })
}

/// `F_û(Ĉ) = [F_ū(C̄) - F_ū(p')] / p'(ū)²` for the relabeling `û = p(ū)`.
pub fn f_composition(p: &ChartMap, base_f: f64, ubar: f64) -> Result<f64> {
    let slope = p.tower(ubar)?.d1;
    if slope == 0.0 {
        return Err(Error::Singular { what: format!("p' of `{}`", p.label()), location: ubar });
    }
    Ok((base_f - f_of_derivative(p, ubar)?) / (slope * slope))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    FullLine,
    /// Dirichlet wall at `x̂ = 0` of a mirror-adapted chart.
    DirichletHalfLine,
}

/// The vacuum of a chart. Points the chart does not cover fall back to
/// `fallback` (for a mirror: the state the field was in before reflection).
#[derive(Debug, Clone)]
pub struct VacuumState {
    label: String,
    chart: ConformalChart,
    boundary: Boundary,
    fallback: Option<ConformalChart>,
}

impl VacuumState {
    /// Vacuum of a chart covering the whole plane.
    pub fn chart_vacuum(chart: ConformalChart) -> Result<Self> {
        match chart.class() {
            ChartClass::FullPlane => {
                Ok(Self { label: format!("{}-vacuum", chart.name()), chart, boundary: Boundary::FullLine, fallback: None })
            }
            class => Err(Error::State(format!("chart `{}` of class {class:?} has no full-line vacuum", chart.name()))),
        }
    }

    /// Chart-vacuum stress assignment on any chart, for local tensor identities only.
    pub fn formal(chart: ConformalChart) -> Self {
        Self { label: format!("{}-formal", chart.name()), chart, boundary: Boundary::FullLine, fallback: None }
    }

    /// Half-line vacuum of a mirror-adapted chart; `fallback` serves unreflected rays.
    pub fn half_line(label: impl Into<String>, hatted: ConformalChart, fallback: ConformalChart) -> Result<Self> {
        if hatted.class() != ChartClass::HalfLine {
            return Err(Error::State(format!("chart `{}` is not a mirror-adapted half-line chart", hatted.name())));
        }
        if fallback.class() != ChartClass::FullPlane {
            return Err(Error::State(format!("fallback chart `{}` has no full-line vacuum", fallback.name())));
        }
        Ok(Self { label: label.into(), chart: hatted, boundary: Boundary::DirichletHalfLine, fallback: Some(fallback) })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn chart(&self) -> &ConformalChart {
        &self.chart
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn fallback(&self) -> Option<&ConformalChart> {
        self.fallback.as_ref()
    }

    /// Which chart serves base point `(u, v)`: 0 for the state chart, 1 for the fallback.
    pub fn sector(&self, u: f64, v: f64) -> Option<usize> {
        if self.chart.covers_base(u, v) {
            Some(0)
        } else if self.fallback.as_ref().is_some_and(|f| f.covers_base(u, v)) {
            Some(1)
        } else {
            None
        }
    }

    fn sector_chart(&self, u: f64, v: f64) -> Result<&ConformalChart> {
        match self.sector(u, v) {
            Some(0) => Ok(&self.chart),
            Some(_) => Ok(self.fallback.as_ref().expect("sector 1 implies fallback")),
            None => Err(Error::Coverage {
                chart: self.chart.name().to_string(),
                detail: format!("state `{}` undefined at base (u, v) = ({u}, {v})", self.label),
            }),
        }
    }
}

/// Null components of a stress tensor at a point, in a named chart, for a named state.
#[derive(Debug, Clone)]
pub struct StressSample {
    pub t_uu: f64,
    pub t_vv: f64,
    pub t_uv: f64,
    pub chart: ConformalChart,
    pub state: String,
    pub point: Point,
}

impl StressSample {
    pub fn components(&self) -> [f64; 3] {
        [self.t_uu, self.t_vv, self.t_uv]
    }
}

/// `[T_uu, T_vv, T_uv]` of the chart's own vacuum, in that chart's coordinates.
pub fn theta_generic<S: Scalar>(chart: &ConformalChart, s1: S, s2: S) -> Result<[S; 3]> {
    let along_u = chart.conformal_factor(Jet3::seed(s1), Jet3::lift(s2))?;
    let along_v = chart.conformal_factor(Jet3::lift(s1), Jet3::seed(s2))?;
    let t_uu = f_functional(along_u)?.scale(INV_24PI);
    let t_vv = f_functional(along_v)?.scale(INV_24PI);
    Ok([t_uu, t_vv, mixed_component(chart, s1, s2)?])
}

/// `T_uv = -R C / 96π = (C C_uv - C_u C_v) / (24π C²)`, without taking a logarithm.
fn mixed_component<S: Scalar>(chart: &ConformalChart, s1: S, s2: S) -> Result<S> {
    if chart.base() == BaseFactor::Flat {
        // Product of one-variable factors: the bracket vanishes identically.
        let c = chart.conformal_factor(s1, s2)?;
        return Ok(c.scale(0.0));
    }
    let c = chart.conformal_factor(Jet3::seed(Jet3::lift(s1)), Jet3::lift(Jet3::seed(s2)))?;
    let (c0, cu, cv, cuv) = (c.value.value, c.d1.value, c.value.d1, c.d1.d1);
    (c0 * cuv - cu * cv).scale(INV_24PI).try_div(c0 * c0).map_err(Error::from)
}

/// Stress of `state` at observation coordinates `(o1, o2)`, in the observation chart.
pub fn stress_field<S: Scalar>(state: &VacuumState, obs: &ConformalChart, o1: S, o2: S) -> Result<[S; 3]> {
    let (u, du_do1) = obs.u_map().eval_with_slope(o1)?;
    let (v, dv_do2) = obs.v_map().eval_with_slope(o2)?;
    let chart = state.sector_chart(u.primal(), v.primal())?;
    let s1 = chart.u_inverse().eval(u)?;
    let s2 = chart.v_inverse().eval(v)?;
    let (_, du_ds1) = chart.u_map().eval_with_slope(s1)?;
    let (_, dv_ds2) = chart.v_map().eval_with_slope(s2)?;
    let j1 = du_do1.try_div(du_ds1)?;
    let j2 = dv_do2.try_div(dv_ds2)?;
    let [t11, t22, t12] = theta_generic(chart, s1, s2)?;
    Ok([t11 * j1 * j1, t22 * j2 * j2, t12 * j1 * j2])
}

/// Stress of a state in its own chart, at a point given in that chart.
pub fn theta_components(state: &VacuumState, c1: f64, c2: f64) -> Result<StressSample> {
    let chart = state.chart();
    let [t_uu, t_vv, t_uv] = theta_generic(chart, c1, c2)?;
    Ok(StressSample {
        t_uu,
        t_vv,
        t_uv,
        chart: chart.clone(),
        state: state.label().to_string(),
        point: Point::new(c1, c2, chart.name()),
    })
}

pub fn expectation_stress(state: &VacuumState, obs: &ConformalChart, c1: f64, c2: f64) -> Result<StressSample> {
    let [t_uu, t_vv, t_uv] = stress_field(state, obs, c1, c2)?;
    Ok(StressSample {
        t_uu,
        t_vv,
        t_uv,
        chart: obs.clone(),
        state: state.label().to_string(),
        point: Point::new(c1, c2, obs.name()),
    })
}

/// Rank-2 tensor transformation of the null components into another chart.
pub fn transform_stress(s: &StressSample, to: &ConformalChart) -> Result<StressSample> {
    let (u, v) = s.chart.to_base(s.point.c1, s.point.c2)?;
    let (t1, t2) = to.from_base(u, v)?;
    let (_, du_dt1) = to.u_map().eval_with_slope(t1)?;
    let (_, dv_dt2) = to.v_map().eval_with_slope(t2)?;
    let (_, du_ds1) = s.chart.u_map().eval_with_slope(s.point.c1)?;
    let (_, dv_ds2) = s.chart.v_map().eval_with_slope(s.point.c2)?;
    let j1 = du_dt1 / du_ds1;
    let j2 = dv_dt2 / dv_ds2;
    Ok(StressSample {
        t_uu: s.t_uu * j1 * j1,
        t_vv: s.t_vv * j2 * j2,
        t_uv: s.t_uv * j1 * j2,
        chart: to.clone(),
        state: s.state.clone(),
        point: Point::new(t1, t2, to.name()),
    })
}

/// Mixed components in the frame of the chart's time `t* = (u*+v*)/2`.
///
/// `pressure` is `T^x_x` and `flux` is `T^{t̂x̂}`, positive for rightward flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthonormalStress {
    pub energy_density: f64,
    pub pressure: f64,
    pub flux: f64,
}

pub fn to_orthonormal_frame(s: &StressSample) -> Result<OrthonormalStress> {
    let c = s.chart.conformal_factor(s.point.c1, s.point.c2)?;
    Ok(OrthonormalStress {
        energy_density: (s.t_uu + 2.0 * s.t_uv + s.t_vv) / c,
        pressure: -(s.t_uu - 2.0 * s.t_uv + s.t_vv) / c,
        flux: (s.t_uu - s.t_vv) / c,
    })
}

/// Closed rectangle in observation coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub c1_min: f64,
    pub c1_max: f64,
    pub c2_min: f64,
    pub c2_max: f64,
}

impl Rect {
    pub fn new(c1_min: f64, c1_max: f64, c2_min: f64, c2_max: f64) -> Self {
        Self { c1_min, c1_max, c2_min, c2_max }
    }

    /// `n × n` points including the edges, row-major in `c1` then `c2`.
    pub fn grid(&self, n1: usize, n2: usize) -> Vec<(f64, f64)> {
        let xs = linspace(self.c1_min, self.c1_max, n1);
        let ys = linspace(self.c2_min, self.c2_max, n2);
        xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect()
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservationReport {
    pub max_residual: f64,
    pub worst_point: (f64, f64),
    pub points: usize,
}

/// Fails unless the point and its neighbours just under `margin` away in each
/// observation coordinate are all served by the same sector of `state`, i.e.
/// the point keeps a distance of at least `margin` from every singular ray.
pub fn check_margin(state: &VacuumState, obs: &ConformalChart, c1: f64, c2: f64, margin: f64) -> Result<()> {
    let sector_at = |a: f64, b: f64| -> Option<usize> {
        let (u, v) = obs.to_base(a, b).ok()?;
        state.sector(u, v)
    };
    let here = sector_at(c1, c2);
    let reach = margin * (1.0 - 1e-6);
    let shifted = [(c1 - reach, c2), (c1 + reach, c2), (c1, c2 - reach), (c1, c2 + reach)];
    if here.is_none() || shifted.iter().any(|&(a, b)| sector_at(a, b) != here) {
        return Err(Error::Margin {
            margin,
            detail: format!("({c1}, {c2}) in chart `{}` is within reach of a singular ray of `{}`", obs.name(), state.label()),
        });
    }
    Ok(())
}

/// Max over an `n × n` grid of the two covariant conservation residuals
/// `∂_u T_vv + ∂_v T_uv - (∂_v ln C) T_uv` and its `u ↔ v` mirror.
pub fn check_conservation(state: &VacuumState, obs: &ConformalChart, region: Rect, n: usize) -> Result<ConservationReport> {
    let pts = region.grid(n, n);
    for &(a, b) in &pts {
        check_margin(state, obs, a, b, SINGULAR_MARGIN)?;
    }
    let residuals: Vec<((f64, f64), f64)> =
        pts.par_iter().map(|&(a, b)| conservation_residual(state, obs, a, b).map(|r| ((a, b), r))).collect::<Result<_>>()?;
    let (worst_point, max_residual) =
        residuals
            .into_iter()
            .fold(((f64::NAN, f64::NAN), 0.0), |acc, (p, r)| if r > acc.1 || acc.0 .0.is_nan() { (p, r) } else { acc });
    Ok(ConservationReport { max_residual, worst_point, points: pts.len() })
}

/// Larger of the two conservation residuals at one point.
pub fn conservation_residual(state: &VacuumState, obs: &ConformalChart, c1: f64, c2: f64) -> Result<f64> {
    let [_, vv_u, uv_u] = stress_field(state, obs, Jet3::seed(c1), Jet3::lift(c2))?;
    let [uu_v, _, uv_v] = stress_field(state, obs, Jet3::lift(c1), Jet3::seed(c2))?;
    let (cu, cv) = obs.conformal_factor_jets(c1, c2)?;
    let t_uv = uv_u.value;
    let r1 = vv_u.d1 + uv_v.d1 - cv.d1 / cv.value * t_uv;
    let r2 = uu_v.d1 + uv_u.d1 - cu.d1 / cu.value * t_uv;
    Ok(r1.abs().max(r2.abs()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnomalyReport {
    /// `(4/C) T_uv`
    pub trace_term: f64,
    /// `R / 24π`
    pub curvature_term: f64,
    pub residual: f64,
}

/// `|(4/C) T_uv + R/24π|` at a point of the state's own chart.
pub fn anomaly_check(state: &VacuumState, c1: f64, c2: f64) -> Result<AnomalyReport> {
    let chart = state.chart();
    let c = chart.conformal_factor(c1, c2)?;
    let t_uv = theta_generic(chart, c1, c2)?[2];
    let trace_term = 4.0 / c * t_uv;
    let curvature_term = chart.ricci(c1, c2)? * INV_24PI;
    Ok(AnomalyReport { trace_term, curvature_term, residual: (trace_term + curvature_term).abs() })
}
