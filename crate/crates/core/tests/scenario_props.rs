//! Engine values against the closed forms on 50×50 grids kept 1e-3 away from singular rays.

use confstress::scenarios::{build_scenario, Scenario, ACCELERATED_MIRROR_MINKOWSKI, MIRROR_IN_RINDLER_VACUUM, SCENARIO_NAMES};
use confstress::stress::{linspace, INV_48PI};
use confstress::{ConformalChart, Error, Jet3};
use proptest::prelude::*;

const MARGIN: f64 = 1e-3;

/// 50 points on `[lo, hi]` skipping a `MARGIN` neighbourhood of each cut.
fn axis(lo: f64, hi: f64, cuts: &[f64]) -> Vec<f64> {
    let mut pts = linspace(lo, hi, 50);
    for p in pts.iter_mut() {
        for &c in cuts {
            if (*p - c).abs() < MARGIN {
                *p = if *p < c { c - MARGIN } else { c + MARGIN };
            }
        }
    }
    pts
}

fn grids(s: &Scenario) -> Vec<(&'static str, Vec<f64>, Vec<f64>)> {
    let a = s.accel();
    let ln = (a / 2.0).ln();
    let mut g = vec![
        ("rindler", axis(ln - 4.0, ln + 10.0, &[ln]), axis(-5.0, 5.0, &[])),
        ("minkowski", axis(-4.0 / a, -MARGIN, &[-2.0 / a]), axis(MARGIN, 4.0, &[])),
    ];
    match s.name() {
        MIRROR_IN_RINDLER_VACUUM => g.push(("hatted", axis(-6.0, (2.0 / a).ln() - MARGIN, &[]), axis(-5.0, 5.0, &[]))),
        ACCELERATED_MIRROR_MINKOWSKI => g.push(("hatted", axis(MARGIN, 10.0 / a, &[]), axis(-5.0, 5.0, &[0.0]))),
        _ => {}
    }
    g
}

/// Size of the terms that cancel to give a vanishing component: the flat-vacuum terms
/// `1/u²`, `1/v²` and the pieces of `F` applied to the chart's own conformal factor.
fn term_scale(chart: &ConformalChart, x: f64, y: f64) -> f64 {
    let (u, v) = chart.to_base(x, y).unwrap();
    let (cu, cv) = chart.conformal_factor_jets(x, y).unwrap();
    let f_terms = |j: Jet3| (j.d2 / j.value).abs().max((j.d1 / j.value).powi(2));
    INV_48PI * [1.0, 1.0 / (u * u), 1.0 / (v * v), f_terms(cu), f_terms(cv)].into_iter().fold(0.0, f64::max)
}

fn check(name: &str, a: f64) -> Result<usize, TestCaseError> {
    let s = build_scenario(name, a).unwrap();
    let mut compared = 0;
    for (chart_name, xs, ys) in grids(&s) {
        let chart = s.chart(chart_name).unwrap();
        for &x in &xs {
            for &y in &ys {
                let want = match s.closed_form_reference(&chart, x, y) {
                    Ok(w) => w,
                    Err(Error::OracleUnavailable { .. }) => continue,
                    Err(e) => panic!("{e}"),
                };
                let got = s.evaluate(&chart, x, y).unwrap();
                let scale = term_scale(&chart, x, y);
                for (g, w) in got.components().iter().zip(want.components()) {
                    let ok = (g - w).abs() <= 1e-10 * if w == 0.0 { scale } else { w.abs() };
                    prop_assert!(ok, "{name} a={a} {chart_name} ({x}, {y}): {g} vs {w}");
                }
                compared += 1;
            }
        }
    }
    Ok(compared)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn closed_forms_hold(a in 0.25f64..4.0) {
        for name in SCENARIO_NAMES {
            let n = check(name, a)?;
            prop_assert!(n >= 2500, "{name}: only {n} points compared");
        }
    }
}
