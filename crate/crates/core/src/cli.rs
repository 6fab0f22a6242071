//! Command-line front end. The `gauss-squeeze` binary forwards to [`run`].

use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::config::{self, PointConfig};
use crate::dynamics::{
    check_physicality, default_horizon, evolve_covariance, steady_state, CovarianceMatrix,
    EvolveOptions, Trajectory,
};
use crate::error::{Error, Result};
use crate::metrics::{reduced_mech_covariance, wigner, SqueezingReport, WignerSpec};
use crate::model::Mode;
use crate::output::fmt_num;
use crate::spectrum::{output_spectrum, write_spectrum_csv, CoefficientForm, SpectrumConfig};
use crate::stability::routh_hurwitz;
use crate::sweep::{preset_with_r, run_sweep, Preset, SweepScenario, DEFAULT_R_SET};

#[derive(Debug, Parser)]
#[command(
    name = "gauss-squeeze",
    version,
    about = "Mechanical squeezing in a two-tone optomechanical cavity"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML configuration file, `-` for stdin.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a configuration key, `key=value`. Repeatable, applied in order
    /// after the file.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Worker threads for grid computations.
    #[arg(long, env = "GAUSS_SQUEEZE_JOBS", global = true)]
    jobs: Option<usize>,
    #[arg(long, value_enum, global = true)]
    mode: Option<ModeArg>,
    /// Bath squeezing phase in units of pi. Overrides `theta`.
    #[arg(
        long,
        value_name = "MULTIPLE",
        global = true,
        allow_hyphen_values = true
    )]
    theta_pi: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Rwa,
    Full,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Rwa => Mode::Rwa,
            ModeArg::Full => Mode::Full,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Steady-state squeezing report at one parameter point.
    Steady,
    /// Covariance trajectory from vacuum cavity and thermal mechanics.
    Evolve {
        /// Final time in units of 1/omega_m. Defaults to 50 / |spectral abscissa|.
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        /// Keep every n-th step. Defaults to about 1000 samples.
        #[arg(long)]
        stride: Option<usize>,
    },
    /// Parameter sweep from a scenario file, stdin or a built-in preset.
    Sweep {
        #[arg(long)]
        preset: Option<String>,
        /// Comma-separated squeezing parameters for figure presets.
        #[arg(long, value_delimiter = ',')]
        r_set: Option<Vec<f64>>,
    },
    /// Wigner function of the steady-state mechanical mode.
    Wigner {
        /// Grid points per axis.
        #[arg(long, default_value_t = 201)]
        points: usize,
        /// Half-width of the grid in standard deviations.
        #[arg(long, default_value_t = 5.0)]
        widths: f64,
    },
    /// Homodyne spectrum of the cavity output.
    Spectrum {
        /// Homodyne phase in radians.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        phi: f64,
        /// Use the uncorrected reflection numerator `2 kappa v - d`.
        #[arg(long)]
        as_printed: bool,
        /// Frequency points over [-5 kappa, 5 kappa].
        #[arg(long, default_value_t = 1001)]
        points: usize,
    },
    /// Routh-Hurwitz margins and spectral abscissa.
    Stability,
    /// Print a figure scenario as TOML.
    Preset {
        name: String,
        #[arg(long, value_delimiter = ',')]
        r_set: Option<Vec<f64>>,
    },
}

/// Runs the command line `args` (including the program name) and returns the
/// process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let text = e.to_string();
            let first = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ");
            eprintln!("error: usage: {first}");
            return 3;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            let detail = e.to_string().replace('\n', " ");
            eprintln!("error: {}: {detail}", e.code());
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let common = cli.common;
    if let Some(jobs) = common.jobs {
        if jobs == 0 {
            return Err(Error::Config("--jobs must be at least 1".into()));
        }
        // Fails only if a global pool already exists, as in repeated in-process runs.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match cli.command {
        Command::Steady => steady(&common),
        Command::Evolve { t_end, dt, stride } => evolve(&common, t_end, dt, stride),
        Command::Sweep { preset, r_set } => sweep(&common, preset, r_set),
        Command::Wigner { points, widths } => wigner_cmd(&common, points, widths),
        Command::Spectrum {
            phi,
            as_printed,
            points,
        } => spectrum(&common, phi, as_printed, points),
        Command::Stability => stability(&common),
        Command::Preset { name, r_set } => preset_cmd(&common, &name, r_set),
    }
}

fn load_table(common: &Common) -> Result<toml::Table> {
    match &common.config {
        Some(path) => config::read_table(path),
        None => Ok(toml::Table::new()),
    }
}

fn load_point(common: &Common) -> Result<PointConfig> {
    let mut c = PointConfig::resolve(load_table(common)?, &common.set)?;
    if let Some(m) = common.mode {
        c.mode = m.into();
    }
    if let Some(x) = common.theta_pi {
        c.point.theta = x * PI;
    }
    Ok(c)
}

fn sink(common: &Common) -> Result<Box<dyn Write>> {
    Ok(match &common.out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| {
            Error::Config(format!("cannot create {}: {e}", path.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize + ?Sized>(common: &Common, value: &T) -> Result<()> {
    let mut out = sink(common)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn single_row_csv(common: &Common, header: &[&str], row: &[String]) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink(common)?);
    w.write_record(header)?;
    w.write_record(row)?;
    w.flush()?;
    Ok(())
}

fn opt_num(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

fn steady(common: &Common) -> Result<()> {
    let c = load_point(common)?;
    let params = c.point.params()?;
    let bath = c.point.bath()?;
    let v = steady_state(&params, &bath, c.mode)?;
    let phys = check_physicality(&v);
    if !phys.physical {
        return Err(Error::Unphysical(format!(
            "steady state violates the uncertainty principle (min eigenvalue {:.3e})",
            phys.min_eigenvalue
        )));
    }
    let report = SqueezingReport::from_covariance(&v, &params)?;
    match common.format.unwrap_or(Format::Json) {
        Format::Json => write_json(common, &report),
        Format::Csv => {
            let row: Vec<String> = report.values().iter().map(|x| opt_num(*x)).collect();
            single_row_csv(common, &SqueezingReport::FIELDS, &row)
        }
    }
}

fn evolve(
    common: &Common,
    t_end: Option<f64>,
    dt: Option<f64>,
    stride: Option<usize>,
) -> Result<()> {
    let c = load_point(common)?;
    let params = c.point.params()?;
    let bath = c.point.bath()?;
    let t_end = match t_end {
        Some(t) => t,
        None => default_horizon(&params)?,
    };
    let dt = dt.unwrap_or(match c.mode {
        Mode::Rwa => (t_end / 1e4).clamp(1e-3, 0.5),
        Mode::Full => EvolveOptions::max_full_dt() / 4.0,
    });
    let steps = (t_end / dt).ceil().max(1.0) as usize;
    let stride = stride.unwrap_or((steps / 1000).max(1));
    let opts = EvolveOptions::new(t_end, dt, c.mode).sample_every(stride);
    let traj = evolve_covariance(
        &CovarianceMatrix::thermal(params.n_th),
        &params,
        &bath,
        &opts,
    )?;
    match common.format.unwrap_or(Format::Csv) {
        Format::Csv => traj.write_csv(sink(common)?),
        Format::Json => write_json(common, &trajectory_json(&traj)),
    }
}

fn trajectory_json(traj: &Trajectory) -> serde_json::Value {
    let rows = traj
        .samples()
        .iter()
        .map(|(t, v)| {
            let mut obj = serde_json::Map::new();
            obj.insert("t".into(), (*t).into());
            for (name, x) in Trajectory::CSV_HEADER[1..].iter().zip(v.upper_triangle()) {
                obj.insert((*name).into(), x.into());
            }
            serde_json::Value::Object(obj)
        })
        .collect();
    serde_json::Value::Array(rows)
}

fn sweep(common: &Common, preset: Option<String>, r_set: Option<Vec<f64>>) -> Result<()> {
    let mut scenario = match preset {
        Some(name) => {
            let p: Preset = name.parse()?;
            let base = preset_with_r(p, r_set.as_deref().unwrap_or(&DEFAULT_R_SET));
            let mut table = toml::Table::try_from(&base)
                .map_err(|e| Error::Config(format!("cannot encode preset: {e}")))?;
            if common.config.is_some() {
                return Err(Error::Config("use either --preset or --config".into()));
            }
            table = config::apply_overrides(table, &common.set)?;
            SweepScenario::from_table(table, &[])?
        }
        None => {
            if r_set.is_some() {
                return Err(Error::Config("--r-set applies to presets only".into()));
            }
            let path = common.config.clone().unwrap_or_else(|| PathBuf::from("-"));
            SweepScenario::from_table(config::read_table(&path)?, &common.set)?
        }
    };
    if let Some(m) = common.mode {
        scenario.mode = m.into();
    }
    if let Some(x) = common.theta_pi {
        scenario.base.theta = x * PI;
    }
    scenario.validate()?;
    let result = run_sweep(&scenario)?;
    let out_path = common
        .out
        .clone()
        .or_else(|| scenario.output.as_ref().map(PathBuf::from));
    let common = Common {
        out: out_path,
        config: None,
        set: Vec::new(),
        ..*common
    };
    match common.format.unwrap_or(Format::Csv) {
        Format::Csv => result.write_csv(sink(&common)?),
        Format::Json => write_json(&common, &result.to_json()),
    }
}

fn wigner_cmd(common: &Common, points: usize, widths: f64) -> Result<()> {
    if !(widths > 0.0 && widths.is_finite()) {
        return Err(Error::Config(format!(
            "--widths must be positive, got {widths}"
        )));
    }
    let c = load_point(common)?;
    let params = c.point.params()?;
    let bath = c.point.bath()?;
    let v = steady_state(&params, &bath, c.mode)?;
    let sigma = reduced_mech_covariance(&v);
    let grid = wigner(&sigma, &WignerSpec::spanning(&sigma, widths, points))?;
    match common.format.unwrap_or(Format::Csv) {
        Format::Csv => grid.write_csv(sink(common)?),
        Format::Json => {
            #[derive(Serialize)]
            struct Grid<'a> {
                q: &'a [f64],
                p: &'a [f64],
                #[serde(rename = "W")]
                w: &'a [Vec<f64>],
            }
            write_json(
                common,
                &Grid {
                    q: &grid.q,
                    p: &grid.p,
                    w: &grid.values,
                },
            )
        }
    }
}

fn spectrum(common: &Common, phi: f64, as_printed: bool, points: usize) -> Result<()> {
    let c = load_point(common)?;
    if c.mode == Mode::Full {
        return Err(Error::Config(
            "the output spectrum is defined in rwa mode only".into(),
        ));
    }
    if points == 0 {
        return Err(Error::Config("--points must be at least 1".into()));
    }
    let params = c.point.params()?;
    let bath = c.point.bath()?;
    let mut cfg = SpectrumConfig::default_grid(&params, phi);
    cfg.omegas = crate::metrics::linspace(-5.0 * params.kappa, 5.0 * params.kappa, points);
    if as_printed {
        cfg = cfg.with_form(CoefficientForm::AsPrinted);
    }
    let samples = output_spectrum(&params, &bath, &cfg)?;
    match common.format.unwrap_or(Format::Csv) {
        Format::Csv => write_spectrum_csv(&samples, sink(common)?),
        Format::Json => write_json(common, &samples),
    }
}

fn stability(common: &Common) -> Result<()> {
    let c = load_point(common)?;
    let report = routh_hurwitz(&c.point.params()?);
    match common.format.unwrap_or(Format::Json) {
        Format::Json => write_json(common, &report),
        Format::Csv => single_row_csv(
            common,
            &[
                "rh1",
                "rh2",
                "rh3",
                "spectral_abscissa",
                "stable_rh",
                "stable_eig",
            ],
            &[
                fmt_num(report.rh1),
                fmt_num(report.rh2),
                fmt_num(report.rh3),
                fmt_num(report.spectral_abscissa),
                report.stable_rh.to_string(),
                report.stable_eig.to_string(),
            ],
        ),
    }
}

fn preset_cmd(common: &Common, name: &str, r_set: Option<Vec<f64>>) -> Result<()> {
    let p: Preset = name.parse()?;
    let scenario = preset_with_r(p, r_set.as_deref().unwrap_or(&DEFAULT_R_SET));
    let table = toml::Table::try_from(&scenario)
        .map_err(|e| Error::Config(format!("cannot encode preset: {e}")))?;
    let scenario = SweepScenario::from_table(table, &common.set)?;
    let mut out = sink(common)?;
    out.write_all(scenario.to_toml().as_bytes())?;
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_global_flags_after_subcommand() {
        let cli = Cli::try_parse_from([
            "gauss-squeeze",
            "steady",
            "--set",
            "theta=0",
            "--set",
            "r=1",
            "--mode",
            "full",
            "--theta-pi",
            "-0.5",
        ])
        .unwrap();
        assert_eq!(cli.common.set, ["theta=0", "r=1"]);
        assert!(matches!(cli.common.mode, Some(ModeArg::Full)));
        assert_eq!(cli.common.theta_pi, Some(-0.5));
    }

    #[test]
    fn r_set_is_comma_separated() {
        let cli =
            Cli::try_parse_from(["gauss-squeeze", "preset", "fig2", "--r-set", "0,1.5"]).unwrap();
        match cli.command {
            Command::Preset { r_set, .. } => assert_eq!(r_set, Some(vec![0.0, 1.5])),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn usage_errors_exit_3() {
        assert_eq!(run(["gauss-squeeze", "frobnicate"]), 3);
        assert_eq!(run(["gauss-squeeze", "steady", "--format", "xml"]), 3);
    }
}
