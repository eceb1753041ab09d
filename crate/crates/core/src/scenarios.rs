//! Named physical setups with closed-form reference values.

use serde::Serialize;

use crate::charts::{ConformalChart, Point};
use crate::error::{Error, Result};
use crate::stress::{expectation_stress, StressSample, VacuumState, INV_48PI};
use crate::trajectories::{stationary_mirror, uniformly_accelerated_mirror, Trajectory};

pub const RINDLER_VACUUM: &str = "rindler_vacuum";
pub const MIRROR_IN_RINDLER_VACUUM: &str = "mirror_in_rindler_vacuum";
pub const ACCELERATED_MIRROR_MINKOWSKI: &str = "accelerated_mirror_minkowski";
pub const MINKOWSKI_VACUUM_RINDLER_OBSERVER: &str = "minkowski_vacuum_rindler_observer";

pub const SCENARIO_NAMES: [&str; 4] =
    [RINDLER_VACUUM, MIRROR_IN_RINDLER_VACUUM, ACCELERATED_MIRROR_MINKOWSKI, MINKOWSKI_VACUUM_RINDLER_OBSERVER];

pub const DEFAULT_ACCEL: f64 = 1.0;

#[derive(Debug, Clone, Serialize)]
pub struct ParamInfo {
    pub name: &'static str,
    pub default: f64,
    pub constraint: &'static str,
    pub meaning: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub observation_chart: &'static str,
    pub charts: Vec<&'static str>,
    pub params: Vec<ParamInfo>,
}

fn accel_param(meaning: &'static str) -> ParamInfo {
    ParamInfo { name: "a", default: DEFAULT_ACCEL, constraint: "a > 0", meaning }
}

/// Scenario names with their parameter schema, in a fixed order.
pub fn scenario_catalog() -> Vec<ScenarioInfo> {
    vec![
        ScenarioInfo {
            name: RINDLER_VACUUM,
            description: "Rindler vacuum in the right wedge",
            observation_chart: "rindler",
            charts: vec!["rindler", "minkowski"],
            params: vec![accel_param("unused; accepted for a uniform schema")],
        },
        ScenarioInfo {
            name: MIRROR_IN_RINDLER_VACUUM,
            description: "stationary mirror at z = 1/a, field initially in the Rindler vacuum",
            observation_chart: "rindler",
            charts: vec!["rindler", "minkowski", "hatted"],
            params: vec![accel_param("mirror sits on the Rindler worldline rho = 1/a")],
        },
        ScenarioInfo {
            name: ACCELERATED_MIRROR_MINKOWSKI,
            description: "uniformly accelerated mirror z^2 - t^2 = 1/a^2, field initially in the Minkowski vacuum",
            observation_chart: "minkowski",
            charts: vec!["minkowski", "rindler", "hatted"],
            params: vec![accel_param("proper acceleration of the mirror")],
        },
        ScenarioInfo {
            name: MINKOWSKI_VACUUM_RINDLER_OBSERVER,
            description: "Minkowski vacuum described in Rindler coordinates",
            observation_chart: "rindler",
            charts: vec!["rindler", "minkowski"],
            params: vec![accel_param("unused; accepted for a uniform schema")],
        },
    ]
}

#[derive(Debug, Clone)]
pub struct Scenario {
    name: &'static str,
    state: VacuumState,
    observation_chart: ConformalChart,
    hatted: Option<ConformalChart>,
    trajectory: Option<Trajectory>,
    accel: f64,
}

pub fn build_scenario(name: &str, accel: f64) -> Result<Scenario> {
    if !(accel > 0.0 && accel.is_finite()) {
        return Err(Error::BadParameter { name: "a".into(), value: accel, reason: "must be positive".into() });
    }
    let name = SCENARIO_NAMES.iter().copied().find(|&n| n == name).ok_or_else(|| Error::UnknownScenario(name.to_string()))?;
    let rindler = ConformalChart::rindler();
    let minkowski = ConformalChart::minkowski();
    let hatted_name = format!("hatted:{name}");
    let (state, obs, hatted, trajectory) = match name {
        RINDLER_VACUUM => (VacuumState::chart_vacuum(rindler.clone())?, rindler, None, None),
        MINKOWSKI_VACUUM_RINDLER_OBSERVER => (VacuumState::chart_vacuum(minkowski)?, rindler, None, None),
        MIRROR_IN_RINDLER_VACUUM => {
            let traj = stationary_mirror(1.0 / accel)?.to_chart(&rindler)?;
            let hat = traj.reflection_map()?.hatted_chart(hatted_name)?;
            let state = VacuumState::half_line(format!("{name}-state"), hat.clone(), rindler.clone())?;
            (state, rindler, Some(hat), Some(traj))
        }
        ACCELERATED_MIRROR_MINKOWSKI => {
            let traj = uniformly_accelerated_mirror(accel)?;
            let hat = traj.reflection_map()?.hatted_chart(hatted_name)?;
            let state = VacuumState::half_line(format!("{name}-state"), hat.clone(), minkowski.clone())?;
            (state, minkowski, Some(hat), Some(traj))
        }
        _ => unreachable!("name validated above"),
    };
    Ok(Scenario { name, state, observation_chart: obs, hatted, trajectory, accel })
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn state(&self) -> &VacuumState {
        &self.state
    }

    pub fn observation_chart(&self) -> &ConformalChart {
        &self.observation_chart
    }

    pub fn trajectory(&self) -> Option<&Trajectory> {
        self.trajectory.as_ref()
    }

    pub fn hatted_chart(&self) -> Option<&ConformalChart> {
        self.hatted.as_ref()
    }

    pub fn accel(&self) -> f64 {
        self.accel
    }

    /// Resolve `minkowski`, `rindler`, `hatted` or `hatted:<scenario>`.
    pub fn chart(&self, name: &str) -> Result<ConformalChart> {
        match name {
            "minkowski" => Ok(ConformalChart::minkowski()),
            "rindler" => Ok(ConformalChart::rindler()),
            "hatted" => {
                self.hatted.clone().ok_or_else(|| Error::UnknownChart(format!("hatted (scenario `{}` has no mirror)", self.name)))
            }
            other => match (&self.hatted, other.strip_prefix("hatted:")) {
                (Some(h), Some(s)) if s == self.name => Ok(h.clone()),
                _ => Err(Error::UnknownChart(other.to_string())),
            },
        }
    }

    /// Engine value of the stress tensor at a point of `chart`.
    pub fn evaluate(&self, chart: &ConformalChart, c1: f64, c2: f64) -> Result<StressSample> {
        expectation_stress(&self.state, chart, c1, c2)
    }

    /// Analytic value, where one is known.
    pub fn closed_form_reference(&self, chart: &ConformalChart, c1: f64, c2: f64) -> Result<StressSample> {
        let unavailable = || Error::OracleUnavailable { scenario: self.name.to_string(), chart: chart.name().to_string() };
        let (u, v) = chart.to_base(c1, c2)?;
        let a = self.accel;
        let rindler_in_minkowski = |x: f64| -INV_48PI / (x * x);
        let [t_uu, t_vv, t_uv] = match (self.name, chart.name()) {
            (RINDLER_VACUUM, "rindler") => [-INV_48PI, -INV_48PI, 0.0],
            (RINDLER_VACUUM, "minkowski") if u < 0.0 && v > 0.0 => [rindler_in_minkowski(u), rindler_in_minkowski(v), 0.0],
            (MIRROR_IN_RINDLER_VACUUM, "rindler") => {
                let t_uu = if c1 > (a / 2.0).ln() {
                    let w = a * (-c1).exp();
                    -INV_48PI * w * w / ((2.0 - w) * (2.0 - w))
                } else {
                    -INV_48PI
                };
                [t_uu, -INV_48PI, 0.0]
            }
            (MIRROR_IN_RINDLER_VACUUM, "minkowski") if u < 0.0 && v > 0.0 => {
                let t_uu =
                    if u > -2.0 / a { -INV_48PI * a * a / ((2.0 + a * u) * (2.0 + a * u)) } else { rindler_in_minkowski(u) };
                [t_uu, rindler_in_minkowski(v), 0.0]
            }
            (MIRROR_IN_RINDLER_VACUUM, n) if n.starts_with("hatted") => [-INV_48PI, -INV_48PI, 0.0],
            (ACCELERATED_MIRROR_MINKOWSKI | MINKOWSKI_VACUUM_RINDLER_OBSERVER, _) => [0.0, 0.0, 0.0],
            _ => return Err(unavailable()),
        };
        Ok(StressSample {
            t_uu,
            t_vv,
            t_uv,
            chart: chart.clone(),
            state: self.state.label().to_string(),
            point: Point::new(c1, c2, chart.name()),
        })
    }
}
