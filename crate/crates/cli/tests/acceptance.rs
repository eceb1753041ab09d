//! Acceptance suite: one PASS/FAIL line per criterion; exits non-zero if any fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::Instant;

use confstress::bogolubov::{
    compute_coefficients, BasisKind, ModeBasis, DEFAULT_FREQ_MAX, DEFAULT_FREQ_MIN, DEFAULT_PACKETS, DEFAULT_PACKET_WIDTH,
};
use confstress::charts::{rindler_null_from_polar, ChartMap, Interval};
use confstress::scenarios::{
    build_scenario, ACCELERATED_MIRROR_MINKOWSKI, MINKOWSKI_VACUUM_RINDLER_OBSERVER, MIRROR_IN_RINDLER_VACUUM, RINDLER_VACUUM,
    SCENARIO_NAMES,
};
use confstress::selfcheck::identity_chain;
use confstress::stress::{
    anomaly_check, check_conservation, expectation_stress, f_of_derivative, linspace, to_orthonormal_frame, transform_stress,
    Rect, SINGULAR_MARGIN,
};
use confstress::{ConformalChart, Result, VacuumState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const K: f64 = 1.0 / (48.0 * PI);
const ACCELS: [f64; 3] = [0.5, 1.0, 2.0];

struct Outcome {
    pass: bool,
    summary: String,
}

fn rel(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

fn verdict(worst: f64, tol: f64, what: &str) -> Outcome {
    Outcome { pass: worst < tol, summary: format!("{what} {worst:.2e} (tol {tol:.0e})") }
}

/// Random point in the right wedge as Rindler null coordinates.
fn wedge_point(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let tau = rng.gen_range(-3.0..3.0);
    let rho = 10f64.powf(rng.gen_range(-2.0..2.0));
    rindler_null_from_polar(tau, rho).unwrap()
}

fn c1_rindler_constants() -> Result<Outcome> {
    let s = build_scenario(RINDLER_VACUUM, 1.0)?;
    let r = ConformalChart::rindler();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let (ub, vb) = wedge_point(&mut rng);
        let e = s.evaluate(&r, ub, vb)?;
        worst = worst.max(rel(e.t_uu, -K)).max(rel(e.t_vv, -K));
    }
    Ok(verdict(worst, 1e-12, "10^4 wedge points, max rel err"))
}

fn c2_orthonormal_energy() -> Result<Outcome> {
    let s = build_scenario(RINDLER_VACUUM, 1.0)?;
    let r = ConformalChart::rindler();
    let mut worst: f64 = 0.0;
    for rho in [0.1, 1.0, 10.0] {
        for tau in [-1.0, 0.0, 0.7] {
            let (ub, vb) = rindler_null_from_polar(tau, rho)?;
            let o = to_orthonormal_frame(&s.evaluate(&r, ub, vb)?)?;
            worst = worst.max(rel(o.energy_density, -1.0 / (24.0 * PI * rho * rho)));
        }
    }
    Ok(verdict(worst, 1e-11, "rho in {0.1, 1, 10}, max rel err"))
}

fn mirror_rindler_uu(a: f64, ub: f64) -> f64 {
    let w = a * (-ub).exp();
    -K * w * w / ((2.0 - w) * (2.0 - w))
}

fn c3_mirror_rindler() -> Result<Outcome> {
    let r = ConformalChart::rindler();
    let mut worst: f64 = 0.0;
    for a in ACCELS {
        let s = build_scenario(MIRROR_IN_RINDLER_VACUUM, a)?;
        let lo = (a / 2.0).ln();
        for ub in linspace(lo + 0.01, lo + 10.0, 50) {
            for vb in linspace(-3.0, 3.0, 7) {
                let e = s.evaluate(&r, ub, vb)?;
                worst = worst.max(rel(e.t_uu, mirror_rindler_uu(a, ub))).max(rel(e.t_vv, -K));
            }
        }
        // T_vv on rays the mirror does not reflect
        for ub in linspace(lo - 5.0, lo - 0.01, 20) {
            worst = worst.max(rel(s.evaluate(&r, ub, 0.0)?.t_vv, -K));
        }
    }
    Ok(verdict(worst, 1e-10, "a in {0.5, 1, 2}, 50-point grids, max rel err"))
}

/// Minkowski u-grid avoiding u = -2/a and u = 0 by the margin, with reflected rays only to the right of -2/a.
fn minkowski_u_grid(a: f64) -> Vec<f64> {
    let m = SINGULAR_MARGIN;
    let mut u = linspace(-4.0 / a, -2.0 / a - m, 25);
    u.extend(linspace(-2.0 / a + m, -m, 25));
    u
}

fn c4_mirror_minkowski() -> Result<Outcome> {
    let m = ConformalChart::minkowski();
    let r = ConformalChart::rindler();
    let (mut vs_formula, mut between_routes): (f64, f64) = (0.0, 0.0);
    for a in ACCELS {
        let s = build_scenario(MIRROR_IN_RINDLER_VACUUM, a)?;
        for u in minkowski_u_grid(a) {
            for v in linspace(SINGULAR_MARGIN, 4.0, 50) {
                let want_uu = if u > -2.0 / a { -K * a * a / ((2.0 + a * u) * (2.0 + a * u)) } else { -K / (u * u) };
                let want_vv = -K / (v * v);
                // route 1: stress from the hatted chart (or the Rindler fallback), carried to Minkowski
                let direct = s.evaluate(&m, u, v)?;
                // route 2: the Rindler-chart field of criterion 3, transformed as a tensor
                let (ub, vb) = r.from_base(u, v)?;
                let moved = transform_stress(&s.evaluate(&r, ub, vb)?, &m)?;
                vs_formula = vs_formula.max(rel(direct.t_uu, want_uu)).max(rel(direct.t_vv, want_vv));
                vs_formula = vs_formula.max(rel(moved.t_uu, want_uu)).max(rel(moved.t_vv, want_vv));
                between_routes = between_routes.max(rel(direct.t_uu, moved.t_uu)).max(rel(direct.t_vv, moved.t_vv));
            }
        }
    }
    Ok(Outcome {
        pass: vs_formula < 1e-10 && between_routes < 1e-10,
        summary: format!("max rel err {vs_formula:.2e}, hatted vs transformed {between_routes:.2e} (tol 1e-10)"),
    })
}

fn c5_identity_chain() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for a in ACCELS {
        worst = worst.max(identity_chain(a, 1000)?);
    }
    Ok(verdict(worst, 1e-10, "3 x 10^3 points, max rel gap"))
}

fn c6_conservation() -> Result<Outcome> {
    let m = SINGULAR_MARGIN;
    let mut worst: f64 = 0.0;
    let mut parts = vec![];
    for name in SCENARIO_NAMES {
        let s = build_scenario(name, 1.0)?;
        let ln = (s.accel() / 2.0).ln();
        let region = match name {
            MIRROR_IN_RINDLER_VACUUM => Rect::new(ln + m, ln + 10.0, -5.0, 5.0),
            ACCELERATED_MIRROR_MINKOWSKI => Rect::new(-5.0, -m, m, 5.0),
            _ => Rect::new(-5.0, 5.0, -5.0, 5.0),
        };
        let rep = check_conservation(s.state(), s.observation_chart(), region, 50)?;
        worst = worst.max(rep.max_residual);
        parts.push(format!("{:.1e}", rep.max_residual));
    }
    // the unreflected side of the stationary mirror
    let s = build_scenario(MIRROR_IN_RINDLER_VACUUM, 1.0)?;
    let ln = 0.5f64.ln();
    let rep = check_conservation(s.state(), s.observation_chart(), Rect::new(ln - 5.0, ln - m, -5.0, 5.0), 50)?;
    worst = worst.max(rep.max_residual);
    let mut o = verdict(worst, 1e-9, "max residual");
    o.summary.push_str(&format!(" [per scenario {}]", parts.join(", ")));
    Ok(o)
}

fn c7_trace_anomaly() -> Result<Outcome> {
    let (mut residual, mut terms): (f64, f64) = (0.0, 0.0);
    for name in SCENARIO_NAMES {
        let s = build_scenario(name, 1.0)?;
        let chart = s.state().chart();
        for (ub, vb) in Rect::new(-0.6, 0.6, -2.0, 2.0).grid(10, 10) {
            let (u, v) = ConformalChart::rindler().to_base(ub, vb)?;
            let (c1, c2) = chart.from_base(u, v)?;
            let rep = anomaly_check(s.state(), c1, c2)?;
            residual = residual.max(rep.residual);
            terms = terms.max(rep.trace_term.abs()).max(rep.curvature_term.abs());
        }
    }
    let curved = VacuumState::formal(ConformalChart::sum_squared());
    let mut curved_residual: f64 = 0.0;
    for (u, v) in Rect::new(0.1, 4.0, -0.05, 3.0).grid(20, 20) {
        curved_residual = curved_residual.max(anomaly_check(&curved, u, v)?.residual);
    }
    Ok(Outcome {
        pass: residual < 1e-10 && terms < 1e-12 && curved_residual < 1e-10,
        summary: format!(
            "flat residual {residual:.2e}, flat terms {terms:.2e} (tol 1e-12), curved residual {curved_residual:.2e} (tol 1e-10)"
        ),
    })
}

fn c8_unruh_difference() -> Result<Outcome> {
    let mink = build_scenario(MINKOWSKI_VACUUM_RINDLER_OBSERVER, 1.0)?;
    let rind = build_scenario(RINDLER_VACUUM, 1.0)?;
    let r = ConformalChart::rindler();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (ub, vb) = wedge_point(&mut rng);
        let d = expectation_stress(mink.state(), &r, ub, vb)?.t_uu - expectation_stress(rind.state(), &r, ub, vb)?.t_uu;
        worst = worst.max((d - K).abs());
    }
    Ok(verdict(worst, 1e-12, "10^3 wedge points, max abs err"))
}

fn c9_schwarzian() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let mut maps = 0;
    while maps < 100 {
        let (a, b, c, d): (f64, f64, f64, f64) =
            (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(0.1..3.0), rng.gen_range(-3.0..3.0));
        if a * d - b * c < 0.05 {
            continue;
        }
        maps += 1;
        let pole = -d / c;
        let m = ChartMap::mobius(a, b, c, d, Interval::above(pole))?;
        for _ in 0..10 {
            worst = worst.max(f_of_derivative(&m, pole + rng.gen_range(0.5..20.0))?.abs());
        }
    }
    let s = build_scenario(ACCELERATED_MIRROR_MINKOWSKI, 1.0)?;
    let p = s.trajectory().expect("mirror scenario").reflection_map()?;
    let mut mirror: f64 = 0.0;
    for e in linspace(-2.0, 2.0, 200) {
        mirror = mirror.max(f_of_derivative(p.p(), -(10f64.powf(e)))?.abs());
    }
    Ok(Outcome {
        pass: worst < 1e-10 && mirror < 1e-10,
        summary: format!("100 Mobius maps {worst:.2e}, hyperbolic mirror {mirror:.2e} (tol 1e-10)"),
    })
}

fn c10_thermality() -> Result<Outcome> {
    let grid = |n: usize, w: f64| -> Result<_> {
        let unruh = ModeBasis::log_spaced(BasisKind::MinkowskiUnruh, DEFAULT_FREQ_MIN, DEFAULT_FREQ_MAX, n, w)?;
        let rindler = ModeBasis::log_spaced(BasisKind::Rindler, DEFAULT_FREQ_MIN, DEFAULT_FREQ_MAX, n, w)?;
        compute_coefficients(&unruh, &rindler)
    };
    let base = grid(DEFAULT_PACKETS, DEFAULT_PACKET_WIDTH)?;
    let fine = grid(2 * DEFAULT_PACKETS - 1, DEFAULT_PACKET_WIDTH)?;
    let wide = grid(DEFAULT_PACKETS, 2.0 * DEFAULT_PACKET_WIDTH)?;
    let (mut ratio_err, mut norm_err, mut refine, mut widen): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for j in 8..24 {
        let f = base.row_frequencies[j];
        ratio_err = ratio_err.max(rel(base.thermal_ratio(j)?, (-2.0 * PI * f).exp()));
        norm_err = norm_err.max((base.row_normalization(j)? - 1.0).abs());
        let err = base.discretization_error(j)?;
        // the refined grid repeats every base frequency at index 2j
        assert!(rel(fine.row_frequencies[2 * j], f) < 1e-12);
        refine = refine.max((fine.expected_number(2 * j)? - base.expected_number(j)?).abs() / err);
        let err_wide = wide.discretization_error(j)?.max(err);
        widen = widen.max((wide.expected_number(j)? - base.expected_number(j)?).abs() / err_wide);
    }
    let warnings = base.warnings.len() + fine.warnings.len() + wide.warnings.len();
    Ok(Outcome {
        pass: ratio_err < 0.05 && norm_err < 0.02 && refine < 1.0 && widen < 1.0 && warnings == 0,
        summary: format!(
            "rows 8..23 of {DEFAULT_PACKETS}: ratio err {:.2}% (tol 5%), normalization err {:.1e} (tol 2%), \
             refinement change/err {refine:.2e}, width-doubling change/err {widen:.2} (tol 1), warnings {warnings}",
            100.0 * ratio_err,
            norm_err
        ),
    })
}

fn c11_determinism() -> Result<Outcome> {
    let bin = Path::new(env!("CARGO_BIN_EXE_confstress"));
    let dir = std::env::temp_dir().join(format!("confstress-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| confstress::Error::Unsupported(e.to_string()))?;
    let mut identical = true;
    let mut sizes = vec![];
    for (format, frame) in [("csv", "null"), ("json", "orthonormal")] {
        let cfg = dir.join(format!("{format}.cfg"));
        let body = format!(
            "scenario=mirror_in_rindler_vacuum\na=1.5\nchart=minkowski\nc1_min=-3\nc1_max=1\nn1=64\nc2_min=-0.5\nc2_max=4\nn2=48\nframe={frame}\nformat={format}\n"
        );
        std::fs::write(&cfg, body).map_err(|e| confstress::Error::Unsupported(e.to_string()))?;
        let mut outputs = vec![];
        for k in 0..2 {
            let out = dir.join(format!("{format}-{k}.out"));
            let status = Command::new(bin)
                .args(["run", "--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap()])
                .stderr(Stdio::null())
                .status()
                .map_err(|e| confstress::Error::Unsupported(e.to_string()))?;
            identical &= status.success();
            outputs.push(std::fs::read(&out).unwrap_or_default());
        }
        identical &= !outputs[0].is_empty() && outputs[0] == outputs[1];
        sizes.push(format!("{format} {} bytes", outputs[0].len()));
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(Outcome { pass: identical, summary: format!("two runs byte-identical: {identical} ({})", sizes.join(", ")) })
}

type Criterion = fn() -> Result<Outcome>;

fn main() {
    let criteria: [(&str, Criterion); 11] = [
        ("Rindler vacuum constants", c1_rindler_constants),
        ("orthonormal Rindler energy density", c2_orthonormal_energy),
        ("mirror radiation, Rindler chart", c3_mirror_rindler),
        ("mirror radiation, Minkowski chart", c4_mirror_minkowski),
        ("identity chain", c5_identity_chain),
        ("conservation", c6_conservation),
        ("trace anomaly", c7_trace_anomaly),
        ("Unruh-bath difference", c8_unruh_difference),
        ("Schwarzian property", c9_schwarzian),
        ("Bogolubov thermality", c10_thermality),
        ("determinism", c11_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f().unwrap_or_else(|e| Outcome { pass: false, summary: format!("error: {e}") });
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("acceptance {:>2} {tag}  {name}: {} [{:.2}s]", i + 1, outcome.summary, start.elapsed().as_secs_f64());
        failed += usize::from(!outcome.pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
