//! Declarative parameter sweeps over steady-state observables.
//!
//! A scenario names a base parameter point, a list of axes and the observables
//! to record. Rows are produced in lexicographic order of the axis indices, the
//! first axis varying slowest, regardless of how many workers evaluate them.
//! Unstable grid points are recorded with status `unstable` rather than
//! aborting the sweep.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{self, ParamSet};
use crate::dynamics::steady_state;
use crate::error::{Error, Result};
use crate::metrics::{
    linspace, quadrature_squeezing_db, reduced_mech_covariance, total_squeezing, Quadrature,
};
use crate::model::{Mode, SystemParams};
use crate::output::fmt_num;
use crate::stability::routh_hurwitz;

/// Default bound on the number of grid points.
pub const DEFAULT_MAX_POINTS: usize = 1_000_000;

/// Axis name that sets `g_plus = value * g_minus` after all other axes.
pub const RATIO_AXIS: &str = "g_ratio";

/// Squeezing-parameter curves used by the figure presets when none are given.
pub const DEFAULT_R_SET: [f64; 4] = [0.0, 0.5, 1.0, 1.5];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Observable {
    #[serde(rename = "S_Q")]
    SQ,
    #[serde(rename = "S_P")]
    SP,
    #[serde(rename = "lambda")]
    Lambda,
    #[serde(rename = "S_total_paper")]
    STotalPaper,
    #[serde(rename = "S_total_norm")]
    STotalNorm,
    #[serde(rename = "stable")]
    Stable,
    #[serde(rename = "spectral_abscissa")]
    SpectralAbscissa,
}

impl Observable {
    pub fn name(&self) -> &'static str {
        match self {
            Observable::SQ => "S_Q",
            Observable::SP => "S_P",
            Observable::Lambda => "lambda",
            Observable::STotalPaper => "S_total_paper",
            Observable::STotalNorm => "S_total_norm",
            Observable::Stable => "stable",
            Observable::SpectralAbscissa => "spectral_abscissa",
        }
    }

    /// Whether the observable needs a steady-state covariance.
    fn needs_state(&self) -> bool {
        !matches!(self, Observable::Stable | Observable::SpectralAbscissa)
    }
}

/// One sweep axis: explicit `values`, or `points` evenly spaced samples from
/// `start` to `stop` inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

impl AxisSpec {
    pub fn values(name: &str, values: Vec<f64>) -> Self {
        AxisSpec {
            name: name.to_string(),
            values: Some(values),
            start: None,
            stop: None,
            points: None,
        }
    }

    pub fn linspace(name: &str, start: f64, stop: f64, points: usize) -> Self {
        AxisSpec {
            name: name.to_string(),
            values: None,
            start: Some(start),
            stop: Some(stop),
            points: Some(points),
        }
    }

    /// Concrete sample values of the axis.
    pub fn resolve(&self) -> Result<Vec<f64>> {
        let values = match (&self.values, self.start, self.stop, self.points) {
            (Some(v), None, None, None) => v.clone(),
            (None, Some(a), Some(b), Some(n)) => linspace(a, b, n),
            _ => {
                return Err(Error::Config(format!(
                    "axis `{}` needs either `values` or all of `start`, `stop`, `points`",
                    self.name
                )))
            }
        };
        if values.is_empty() {
            return Err(Error::Config(format!("axis `{}` has no values", self.name)));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config(format!(
                "axis `{}` has non-finite values",
                self.name
            )));
        }
        Ok(values)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepScenario {
    #[serde(default)]
    pub mode: Mode,
    pub observables: Vec<Observable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_points: Option<usize>,
    #[serde(default)]
    pub base: ParamSet,
    pub axes: Vec<AxisSpec>,
}

impl SweepScenario {
    /// Parses a scenario from a TOML table after applying `key=value`
    /// overrides (for example `base.kappa=0.2` or `mode=full`).
    pub fn from_table(table: toml::Table, overrides: &[String]) -> Result<Self> {
        let s: SweepScenario = config::resolve(table, overrides)?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes to TOML")
    }

    pub fn max_points(&self) -> usize {
        self.max_points.unwrap_or(DEFAULT_MAX_POINTS)
    }

    /// Checks axis names, values, observables and the grid-size cap.
    pub fn validate(&self) -> Result<()> {
        if self.observables.is_empty() {
            return Err(Error::Config("scenario requests no observables".into()));
        }
        let mut seen = Vec::new();
        let mut size: usize = 1;
        for axis in &self.axes {
            let name = axis.name.as_str();
            if name != RATIO_AXIS && !ParamSet::KEYS.contains(&name) {
                return Err(Error::UnknownKey(format!("axis `{name}`")));
            }
            if seen.contains(&name) {
                return Err(Error::Config(format!("axis `{name}` appears twice")));
            }
            seen.push(name);
            size = size
                .checked_mul(axis.resolve()?.len())
                .ok_or_else(|| Error::Config("grid size overflows".into()))?;
        }
        if seen.contains(&RATIO_AXIS) && seen.contains(&"g_plus") {
            return Err(Error::Config(format!(
                "axes `{RATIO_AXIS}` and `g_plus` both set g_plus"
            )));
        }
        if size > self.max_points() {
            return Err(Error::Config(format!(
                "grid has {size} points, above the cap of {}",
                self.max_points()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PointStatus {
    Ok,
    Unstable,
    /// Evaluation failed with the given error code.
    Failed(&'static str),
}

impl fmt::Display for PointStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointStatus::Ok => f.write_str("ok"),
            PointStatus::Unstable => f.write_str("unstable"),
            PointStatus::Failed(code) => write!(f, "error:{code}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Num(f64),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            _ => None,
        }
    }

    fn to_csv(self) -> String {
        match self {
            Cell::Num(x) => fmt_num(x),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(self) -> serde_json::Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(x)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Cell::Bool(b) => serde_json::Value::Bool(b),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_values: Vec<f64>,
    pub cells: Vec<Cell>,
    pub status: PointStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis_names: Vec<String>,
    pub observables: Vec<Observable>,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Column of `observable`, `None` where it is empty.
    pub fn column(&self, observable: Observable) -> Option<Vec<Option<f64>>> {
        let k = self.observables.iter().position(|o| *o == observable)?;
        Some(self.rows.iter().map(|r| r.cells[k].as_f64()).collect())
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = self.axis_names.clone();
        h.extend(self.observables.iter().map(|o| o.name().to_string()));
        h.push("status".into());
        h
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header())?;
        for row in &self.rows {
            let mut rec: Vec<String> = row.axis_values.iter().map(|x| fmt_num(*x)).collect();
            rec.extend(row.cells.iter().map(|c| c.to_csv()));
            rec.push(row.status.to_string());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// JSON array with one flat object per row.
    pub fn to_json(&self) -> serde_json::Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = serde_json::Map::new();
                for (name, x) in self.axis_names.iter().zip(&row.axis_values) {
                    obj.insert(name.clone(), Cell::Num(*x).to_json());
                }
                for (o, c) in self.observables.iter().zip(&row.cells) {
                    obj.insert(o.name().to_string(), c.to_json());
                }
                obj.insert(
                    "status".into(),
                    serde_json::Value::String(row.status.to_string()),
                );
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::Value::Array(rows)
    }
}

/// Parameter point at one grid index.
fn point_at(
    base: &ParamSet,
    names: &[String],
    axes: &[Vec<f64>],
    index: usize,
) -> (Vec<f64>, ParamSet) {
    let mut digits = vec![0; axes.len()];
    let mut rem = index;
    for k in (0..axes.len()).rev() {
        digits[k] = rem % axes[k].len();
        rem /= axes[k].len();
    }
    let values: Vec<f64> = digits.iter().zip(axes).map(|(d, a)| a[*d]).collect();
    let mut point = *base;
    let mut ratio = None;
    for (name, v) in names.iter().zip(&values) {
        if name == RATIO_AXIS {
            ratio = Some(*v);
        } else {
            point.set(name, *v).expect("axis names validated");
        }
    }
    if let Some(ratio) = ratio {
        point.g_plus = ratio * point.g_minus;
    }
    (values, point)
}

fn evaluate(point: &ParamSet, observables: &[Observable], mode: Mode) -> (Vec<Cell>, PointStatus) {
    let empty = || vec![Cell::Empty; observables.len()];
    let (params, bath) = match (point.params(), point.bath()) {
        (Ok(p), Ok(b)) => (p, b),
        (Err(e), _) | (_, Err(e)) => return (empty(), PointStatus::Failed(e.code())),
    };
    let report = routh_hurwitz(&params);
    let stability_cell = |o: &Observable| match o {
        Observable::Stable => Cell::Bool(report.stable_rh),
        Observable::SpectralAbscissa => Cell::Num(report.spectral_abscissa),
        _ => Cell::Empty,
    };
    let gated = mode == Mode::Rwa && !report.is_solvable();
    if gated || !observables.iter().any(Observable::needs_state) {
        let status = if gated {
            PointStatus::Unstable
        } else {
            PointStatus::Ok
        };
        return (observables.iter().map(stability_cell).collect(), status);
    }
    let v = match steady_state(&params, &bath, mode) {
        Ok(v) => v,
        Err(Error::Unstable { .. }) => {
            return (
                observables.iter().map(stability_cell).collect(),
                PointStatus::Unstable,
            )
        }
        Err(e) => {
            return (
                observables.iter().map(stability_cell).collect(),
                PointStatus::Failed(e.code()),
            )
        }
    };
    let total = total_squeezing(&reduced_mech_covariance(&v));
    let mut status = PointStatus::Ok;
    let mut fail = |e: Error| {
        status = PointStatus::Failed(e.code());
        Cell::Empty
    };
    let cells = observables
        .iter()
        .map(|o| match o {
            Observable::SQ => {
                quadrature_squeezing_db(&v, Quadrature::Q).map_or_else(&mut fail, Cell::Num)
            }
            Observable::SP => {
                quadrature_squeezing_db(&v, Quadrature::P).map_or_else(&mut fail, Cell::Num)
            }
            Observable::Lambda => match &total {
                Ok(t) => Cell::Num(t.lambda_min),
                Err(e) => fail(Error::Unphysical(e.to_string())),
            },
            Observable::STotalPaper => match &total {
                Ok(t) => Cell::Num(t.s_total_paper_db),
                Err(e) => fail(Error::Unphysical(e.to_string())),
            },
            Observable::STotalNorm => match &total {
                Ok(t) => Cell::Num(t.s_total_norm_db),
                Err(e) => fail(Error::Unphysical(e.to_string())),
            },
            other => stability_cell(other),
        })
        .collect();
    (cells, status)
}

/// Evaluates every grid point on the current rayon pool.
pub fn run_sweep(scenario: &SweepScenario) -> Result<SweepResult> {
    scenario.validate()?;
    let names: Vec<String> = scenario.axes.iter().map(|a| a.name.clone()).collect();
    let axes: Vec<Vec<f64>> = scenario
        .axes
        .iter()
        .map(AxisSpec::resolve)
        .collect::<Result<_>>()?;
    let total: usize = axes.iter().map(Vec::len).product();
    let rows = (0..total)
        .into_par_iter()
        .map(|i| {
            let (axis_values, point) = point_at(&scenario.base, &names, &axes, i);
            let (cells, status) = evaluate(&point, &scenario.observables, scenario.mode);
            SweepRow {
                axis_values,
                cells,
                status,
            }
        })
        .collect();
    Ok(SweepResult {
        axis_names: names,
        observables: scenario.observables.clone(),
        rows,
    })
}

/// [`run_sweep`] on a dedicated pool of `jobs` workers.
pub fn run_sweep_with_jobs(scenario: &SweepScenario, jobs: usize) -> Result<SweepResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
    pool.install(|| run_sweep(scenario))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Position and momentum squeezing against the bath phase.
    Fig2,
    /// Position squeezing against the coupling ratio at zero phase.
    Fig3a,
    /// Total squeezing against the bath phase.
    Fig3b,
    /// Position squeezing over squeezing parameter and coupling ratio.
    Fig5,
    /// Total squeezing over cavity decay and thermal occupation.
    Fig6,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::Fig2,
        Preset::Fig3a,
        Preset::Fig3b,
        Preset::Fig5,
        Preset::Fig6,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2",
            Preset::Fig3a => "fig3a",
            Preset::Fig3b => "fig3b",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown preset `{s}`")))
    }
}

/// Figure scenario with the default squeezing-parameter curves.
pub fn preset(which: Preset) -> SweepScenario {
    preset_with_r(which, &DEFAULT_R_SET)
}

/// Figure scenario with custom squeezing-parameter curves. The `fig5` grid
/// spans `r` continuously and `fig6` pins `r = 1`; both ignore `r_set`.
pub fn preset_with_r(which: Preset, r_set: &[f64]) -> SweepScenario {
    let reference = SystemParams::reference();
    let base = ParamSet::from_parts(&reference, 0.0, 0.0);
    let theta_axis = AxisSpec::linspace("theta", 0.0, 4.0 * PI, 401);
    let ratio_axis =
        |points: usize| AxisSpec::linspace(RATIO_AXIS, 0.999 / points as f64, 0.999, points);
    let r_axis = AxisSpec::values("r", r_set.to_vec());
    let scenario =
        |base: ParamSet, axes: Vec<AxisSpec>, observables: Vec<Observable>| SweepScenario {
            mode: Mode::Rwa,
            observables,
            output: None,
            max_points: None,
            base,
            axes,
        };
    match which {
        Preset::Fig2 => scenario(
            base,
            vec![r_axis, theta_axis],
            vec![Observable::SQ, Observable::SP],
        ),
        Preset::Fig3a => scenario(base, vec![r_axis, ratio_axis(500)], vec![Observable::SQ]),
        Preset::Fig3b => scenario(
            base,
            vec![r_axis, theta_axis],
            vec![Observable::STotalPaper],
        ),
        Preset::Fig5 => scenario(
            base,
            vec![AxisSpec::linspace("r", 0.0, 1.5, 31), ratio_axis(100)],
            vec![Observable::SQ],
        ),
        Preset::Fig6 => scenario(
            ParamSet { r: 1.0, ..base },
            vec![
                AxisSpec::linspace("kappa", 0.02, 2.0, 100),
                AxisSpec::linspace("n_th", 0.0, 1000.0, 101),
            ],
            vec![Observable::STotalPaper],
        ),
    }
}
