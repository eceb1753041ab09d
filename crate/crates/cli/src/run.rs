//! Grid evaluation and CSV / JSON emission for the `run` command.

use std::io::Write;

use confstress::stress::{linspace, to_orthonormal_frame, SINGULAR_MARGIN};
use confstress::{ConformalChart, Interval, Scenario};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::value::RawValue;

use crate::config::{Format, Frame, RunConfig};
use crate::CliError;

/// Evaluated grid, row-major in `c1` then `c2`.
#[derive(Debug, Clone)]
pub struct GridOutput {
    pub chart: String,
    pub state: String,
    pub c1: Vec<f64>,
    pub c2: Vec<f64>,
    /// `None` marks a singular point.
    pub values: Vec<Option<[f64; 3]>>,
}

impl GridOutput {
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, Option<[f64; 3]>)> + '_ {
        let n2 = self.c2.len();
        self.values.iter().enumerate().map(move |(i, v)| (self.c1[i / n2], self.c2[i % n2], *v))
    }

    pub fn singular_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }
}

pub fn columns(frame: Frame) -> [&'static str; 6] {
    match frame {
        Frame::Null => ["c1", "c2", "T_uu", "T_vv", "T_uv", "singular"],
        Frame::Orthonormal => ["c1", "c2", "energy_density", "pressure", "flux", "singular"],
    }
}

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pull an edge lying within the margin of the chart's coordinate boundary to `boundary ± margin`.
fn clip(lo: f64, hi: f64, domain: Interval, which: &str, chart: &str) -> Result<(f64, f64), CliError> {
    let m = SINGULAR_MARGIN;
    let lo = if lo < domain.lo + m && lo >= domain.lo - m { domain.lo + m } else { lo };
    let hi = if hi > domain.hi - m && hi <= domain.hi + m { domain.hi - m } else { hi };
    if lo <= domain.lo || hi >= domain.hi || lo >= hi {
        return Err(CliError::Coverage(format!(
            "{which} range [{lo}, {hi}] leaves the coordinate domain {domain} of chart `{chart}`"
        )));
    }
    Ok((lo, hi))
}

pub fn evaluate_grid(cfg: &RunConfig, scenario: &Scenario, chart: &ConformalChart) -> Result<GridOutput, CliError> {
    let (c1_min, c1_max) = clip(cfg.c1_min, cfg.c1_max, chart.u_map().domain(), "c1", chart.name())?;
    let (c2_min, c2_max) = clip(cfg.c2_min, cfg.c2_max, chart.v_map().domain(), "c2", chart.name())?;
    let c1 = linspace(c1_min, c1_max, cfg.n1);
    let c2 = linspace(c2_min, c2_max, cfg.n2);
    let point = |x: f64, y: f64| -> Option<[f64; 3]> {
        let s = scenario.evaluate(chart, x, y).ok()?;
        let v = match cfg.frame {
            Frame::Null => s.components(),
            Frame::Orthonormal => {
                let o = to_orthonormal_frame(&s).ok()?;
                [o.energy_density, o.pressure, o.flux]
            }
        };
        v.iter().all(|x| x.is_finite()).then_some(v)
    };
    let values: Vec<Option<[f64; 3]>> =
        c1.par_iter().flat_map_iter(|&x| c2.iter().map(move |&y| point(x, y)).collect::<Vec<_>>()).collect();
    Ok(GridOutput { chart: chart.name().to_string(), state: scenario.state().label().to_string(), c1, c2, values })
}

fn header_lines(cfg: &RunConfig, out: &GridOutput) -> Vec<(String, String)> {
    vec![
        ("scenario".into(), cfg.scenario.clone()),
        ("state".into(), out.state.clone()),
        ("chart".into(), out.chart.clone()),
        ("a".into(), fmt_float(cfg.a)),
        ("frame".into(), format!("{:?}", cfg.frame).to_lowercase()),
        ("c1".into(), format!("{} .. {} ({} points)", fmt_float(out.c1[0]), fmt_float(*out.c1.last().unwrap()), out.c1.len())),
        ("c2".into(), format!("{} .. {} ({} points)", fmt_float(out.c2[0]), fmt_float(*out.c2.last().unwrap()), out.c2.len())),
    ]
}

pub fn write_csv<W: Write>(w: &mut W, cfg: &RunConfig, out: &GridOutput) -> Result<(), CliError> {
    for (k, v) in header_lines(cfg, out) {
        writeln!(w, "# {k}: {v}")?;
    }
    let mut csv = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    csv.write_record(columns(cfg.frame))?;
    for (x, y, v) in out.rows() {
        let mut rec = vec![fmt_float(x), fmt_float(y)];
        match v {
            Some(vals) => {
                rec.extend(vals.iter().map(|&z| fmt_float(z)));
                rec.push("0".into());
            }
            None => {
                rec.extend(["", "", ""].map(String::from));
                rec.push("1".into());
            }
        }
        csv.write_record(&rec)?;
    }
    csv.flush()?;
    Ok(())
}

fn raw(x: f64) -> Box<RawValue> {
    RawValue::from_string(fmt_float(x)).expect("scientific notation is valid JSON")
}

#[derive(Serialize)]
struct JsonOut<'a> {
    scenario: &'a str,
    state: &'a str,
    chart: &'a str,
    params: JsonParams,
    frame: Frame,
    columns: [&'static str; 6],
    rows: Vec<JsonRow>,
}

#[derive(Serialize)]
struct JsonParams {
    a: Box<RawValue>,
}

#[derive(Serialize)]
struct JsonRow(Box<RawValue>, Box<RawValue>, Option<Box<RawValue>>, Option<Box<RawValue>>, Option<Box<RawValue>>, u8);

pub fn write_json<W: Write>(w: &mut W, cfg: &RunConfig, out: &GridOutput) -> Result<(), CliError> {
    let rows = out
        .rows()
        .map(|(x, y, v)| match v {
            Some([a, b, c]) => JsonRow(raw(x), raw(y), Some(raw(a)), Some(raw(b)), Some(raw(c)), 0),
            None => JsonRow(raw(x), raw(y), None, None, None, 1),
        })
        .collect();
    let doc = JsonOut {
        scenario: &cfg.scenario,
        state: &out.state,
        chart: &out.chart,
        params: JsonParams { a: raw(cfg.a) },
        frame: cfg.frame,
        columns: columns(cfg.frame),
        rows,
    };
    serde_json::to_writer_pretty(&mut *w, &doc).map_err(std::io::Error::from)?;
    writeln!(w)?;
    Ok(())
}

/// Evaluate and serialize; the caller decides where the bytes go.
pub fn render(cfg: &RunConfig) -> Result<(Vec<u8>, GridOutput), CliError> {
    let scenario = cfg.scenario()?;
    let chart = scenario
        .chart(&cfg.chart)
        .map_err(|e| CliError::Config(crate::config::ConfigError::Field { field: "chart".into(), reason: e.to_string() }))?;
    let out = evaluate_grid(cfg, &scenario, &chart)?;
    let mut buf = Vec::new();
    match cfg.format {
        Format::Csv => write_csv(&mut buf, cfg, &out)?,
        Format::Json => write_json(&mut buf, cfg, &out)?,
    }
    Ok((buf, out))
}
