//! Renormalized stress tensor of a massless scalar field in 1+1 dimensions,
//! computed from conformal factors of conformally flat charts.

// `!(a < b)` is used deliberately so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bogolubov;
pub mod charts;
pub mod error;
pub mod jets;
pub mod quadrature;
pub mod scenarios;
pub mod selfcheck;
pub mod stress;
pub mod trajectories;

pub use charts::{ChartClass, ChartMap, ConformalChart, Interval, Point};
pub use error::{Error, Result};
pub use jets::{Jet3, Scalar};
pub use scenarios::{build_scenario, Scenario};
pub use stress::{expectation_stress, StressSample, VacuumState};
