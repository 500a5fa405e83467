//! Command-line surface: point evaluation, sweeps, figure presets,
//! threshold bisection and the selftest suites.
//!
//! Exit codes: 0 success, 1 validation/configuration error, 2 numerical
//! guard failure, 64 usage error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::config::{self, parse_grid, CliConfig};
use crate::error::Error;
use crate::measures::{measure_report, GridSpec};
use crate::selftest::{run_selftest, SelfTestOptions};
use crate::sweep::{
    self, figure_preset_with, find_threshold_with, run_sweep, Measure, MovingVar, SweepSpec,
    ThresholdQuery,
};
use crate::thermal::gibbs_state_analytic;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "SPINDIMER_CONFIG";

#[derive(Parser, Debug)]
#[command(
    name = "spindimer",
    about = "Thermal quantum correlations of the mixed spin-(1/2,1) Heisenberg dimer",
    version
)]
struct Cli {
    /// Config file path (falls back to $SPINDIMER_CONFIG).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate all measures at one parameter point and print JSON.
    Point(PointArgs),
    /// Run the configured parameter sweep and write CSV.
    Sweep(SweepArgs),
    /// Regenerate the dataset behind a named figure (fig1..fig6).
    Figure(FigureArgs),
    /// Bisect for the point where a measure crosses the zero cutoff.
    Threshold(ThresholdArgs),
    /// Run the internal cross-validation suites.
    Selftest(SelftestArgs),
}

#[derive(Args, Clone, Debug, Default)]
struct ModelFlags {
    /// Unit system: dimensionless or physical.
    #[arg(long)]
    units: Option<String>,
    /// Exchange coupling J (dimensionless mode).
    #[arg(long, allow_negative_numbers = true)]
    j: Option<f64>,
    /// Exchange coupling J/kB in kelvin (physical mode).
    #[arg(long)]
    j_over_kb_kelvin: Option<f64>,
    /// XXZ exchange anisotropy.
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    /// Single-ion anisotropy as D/J (dimensionless mode).
    #[arg(long, allow_negative_numbers = true)]
    d_over_j: Option<f64>,
    /// Single-ion anisotropy D/kB in kelvin (physical mode).
    #[arg(long, allow_negative_numbers = true)]
    d_over_kb_kelvin: Option<f64>,
    /// Lande factor of the spin-1/2 ion.
    #[arg(long)]
    g1: Option<f64>,
    /// Lande factor of the spin-1 ion.
    #[arg(long)]
    g2: Option<f64>,
    /// Field: muB*B (dimensionless) or tesla (physical). B = 0 is legal.
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
}

#[derive(Args, Clone, Debug)]
struct PointArgs {
    #[command(flatten)]
    model: ModelFlags,
    /// Temperature (kB*T in dimensionless mode, kelvin in physical mode).
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    /// Measurement-search grid for the degenerate branch, as PHIxTHETA.
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Args, Clone, Debug)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelFlags,
    /// Fixed temperature (used unless T is a sweep axis).
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a JSON mirror next to the CSV.
    #[arg(long)]
    json: bool,
    /// Worker threads for grid evaluation.
    #[arg(long)]
    parallel: Option<usize>,
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Args, Clone, Debug)]
struct FigureArgs {
    /// Preset name: fig1, fig2, fig3, fig4, fig5 or fig6.
    name: String,
    /// Output CSV path; multi-sweep presets get the sweep label appended.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    parallel: Option<usize>,
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Args, Clone, Debug)]
struct ThresholdArgs {
    #[command(flatten)]
    model: ModelFlags,
    /// Fixed temperature (required when moving B).
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    /// Moving variable: b or t.
    #[arg(long)]
    moving: String,
    /// Measure to bisect: hs_min, f_min or negativity.
    #[arg(long)]
    measure: String,
    /// Lower bracket end.
    #[arg(long, allow_negative_numbers = true)]
    lo: f64,
    /// Upper bracket end.
    #[arg(long, allow_negative_numbers = true)]
    hi: f64,
    /// Absolute tolerance on the moving variable.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Args, Clone, Debug)]
struct SelftestArgs {
    #[arg(long, default_value_t = 20260809)]
    seed: u64,
    /// Run reduced suite sizes.
    #[arg(long)]
    quick: bool,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::PartitionOverflow { .. }
            | Error::EigenConvergence(_)
            | Error::NonHermitianInput { .. } => EXIT_NUMERICAL,
            _ => EXIT_VALIDATION,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(EXIT_VALIDATION, e.to_string())
    }
}

/// Run the CLI against an argument list, printing to stdout/stderr.
pub fn run(args: &[String]) -> i32 {
    let mut stdout = std::io::stdout();
    let code = run_to(args, &mut stdout);
    let _ = stdout.flush();
    code
}

/// Same as `run` but with an injected output stream (used by tests).
pub fn run_to(args: &[String], out: &mut dyn Write) -> i32 {
    let argv = std::iter::once("spindimer".to_string()).chain(args.iter().cloned());
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    eprint!("{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn load_config(flag: &Option<PathBuf>) -> Result<CliConfig, Failure> {
    let path = flag
        .clone()
        .or_else(|| std::env::var(CONFIG_ENV).ok().map(PathBuf::from));
    match path {
        Some(p) => {
            config::parse_config(&p).map_err(|e| Failure::new(EXIT_VALIDATION, e.to_string()))
        }
        None => Ok(CliConfig::default()),
    }
}

fn apply_model_flags(
    section: &mut config::ModelSection,
    flags: &ModelFlags,
) -> Result<(), Failure> {
    if let Some(u) = &flags.units {
        section.units = Some(match u.to_ascii_lowercase().as_str() {
            "dimensionless" => crate::model::UnitSystem::Dimensionless,
            "physical" => crate::model::UnitSystem::Physical,
            other => {
                return Err(Failure::new(
                    EXIT_VALIDATION,
                    format!("--units must be dimensionless or physical, got '{other}'"),
                ))
            }
        });
    }
    macro_rules! take {
        ($field:ident) => {
            if flags.$field.is_some() {
                section.$field = flags.$field;
            }
        };
    }
    take!(j);
    take!(j_over_kb_kelvin);
    take!(delta);
    take!(d_over_j);
    take!(d_over_kb_kelvin);
    take!(g1);
    take!(g2);
    take!(b);
    Ok(())
}

fn resolve_grid(flag: &Option<String>, cfg: &CliConfig) -> Result<GridSpec, Failure> {
    if let Some(raw) = flag {
        let (n_phi, n_theta) = parse_grid(raw)?;
        return Ok(GridSpec::with_resolution(n_phi, n_theta));
    }
    if let Some((n_phi, n_theta)) = cfg.run.grid {
        return Ok(GridSpec::with_resolution(n_phi, n_theta));
    }
    Ok(GridSpec::default())
}

fn resolve_temperature(flag: Option<f64>, cfg: &CliConfig) -> Result<f64, Failure> {
    flag.or(cfg.sweep.t).ok_or_else(|| {
        Failure::new(
            EXIT_VALIDATION,
            "temperature required: pass --t or set t in the [sweep] section",
        )
    })
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    match threads {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure::new(EXIT_VALIDATION, e.to_string()))
            .map(|pool| pool.install(f)),
        _ => Ok(f()),
    }
}

fn labeled_path(base: &Path, label: &str, multi: bool) -> PathBuf {
    if !multi {
        return base.to_path_buf();
    }
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "figure".into());
    let ext = base
        .extension()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".into());
    base.with_file_name(format!("{stem}_{label}.{ext}"))
}

fn json_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<(), Failure> {
    match &cli.command {
        Command::Point(args) => {
            let mut cfg = load_config(&cli.config)?;
            apply_model_flags(&mut cfg.model, &args.model)?;
            let params = config::resolve_params(&cfg.model)?;
            let t = resolve_temperature(args.t, &cfg)?;
            let grid = resolve_grid(&args.grid, &cfg)?;
            let state = gibbs_state_analytic(&params, t)?;
            let report = measure_report(&state.rho, &grid)?;
            let json = serde_json::to_string_pretty(&report).expect("measure report serializes");
            writeln!(out, "{json}")?;
            Ok(())
        }
        Command::Sweep(args) => {
            let mut cfg = load_config(&cli.config)?;
            apply_model_flags(&mut cfg.model, &args.model)?;
            let base = config::resolve_params(&cfg.model)?;
            let axes = config::resolve_axes(&cfg.sweep)?;
            // T as an axis makes a fixed temperature optional.
            let has_t_axis = axes.iter().any(|a| a.var == sweep::AxisVar::T);
            let temperature = if has_t_axis {
                args.t.or(cfg.sweep.t).unwrap_or(1.0)
            } else {
                resolve_temperature(args.t, &cfg)?
            };
            let spec = SweepSpec {
                base,
                temperature,
                axes,
                measures: cfg.sweep.measures.clone().unwrap_or(Measure::ALL.to_vec()),
                output: None,
                grid: resolve_grid(&args.grid, &cfg)?,
            };
            spec.validate()?;
            let out_path = args
                .out
                .clone()
                .or_else(|| cfg.sweep.output.clone().map(PathBuf::from))
                .or_else(|| cfg.run.out.clone().map(PathBuf::from))
                .ok_or_else(|| Failure::new(EXIT_VALIDATION, "output path required: pass --out"))?;
            let threads = args.parallel.or(cfg.run.parallel);
            let table = with_pool(threads, || run_sweep(&spec))??;
            sweep::write_csv_file(&table, &out_path)?;
            if args.json || cfg.run.json.unwrap_or(false) {
                sweep::write_json_file(&table, &json_path(&out_path))?;
            }
            writeln!(
                out,
                "wrote {} rows to {}",
                table.rows.len(),
                out_path.display()
            )?;
            Ok(())
        }
        Command::Figure(args) => {
            let cfg = load_config(&cli.config)?;
            let opts = config::figure_options(&cfg.sweep);
            let sweeps = figure_preset_with(&args.name, &opts)?;
            let grid = resolve_grid(&args.grid, &cfg)?;
            let base_path = args
                .out
                .clone()
                .or_else(|| cfg.run.out.clone().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from(format!("{}.csv", args.name)));
            let multi = sweeps.len() > 1;
            let threads = args.parallel.or(cfg.run.parallel);
            for ls in &sweeps {
                let mut spec = ls.spec.clone();
                spec.grid = grid;
                let table = with_pool(threads, || run_sweep(&spec))??;
                let path = labeled_path(&base_path, &ls.label, multi);
                sweep::write_csv_file(&table, &path)?;
                if args.json || cfg.run.json.unwrap_or(false) {
                    sweep::write_json_file(&table, &json_path(&path))?;
                }
                writeln!(out, "wrote {} rows to {}", table.rows.len(), path.display())?;
            }
            Ok(())
        }
        Command::Threshold(args) => {
            let mut cfg = load_config(&cli.config)?;
            apply_model_flags(&mut cfg.model, &args.model)?;
            let base = config::resolve_params(&cfg.model)?;
            let moving = match args.moving.to_ascii_lowercase().as_str() {
                "b" => MovingVar::B,
                "t" => MovingVar::T,
                other => {
                    return Err(Failure::new(
                        EXIT_VALIDATION,
                        format!("--moving must be b or t, got '{other}'"),
                    ))
                }
            };
            let measure: Measure = args
                .measure
                .parse()
                .map_err(|e: Error| Failure::new(EXIT_VALIDATION, e.to_string()))?;
            let temperature = match moving {
                MovingVar::B => resolve_temperature(args.t, &cfg)?,
                MovingVar::T => args.t.or(cfg.sweep.t).unwrap_or(1.0),
            };
            let query = ThresholdQuery {
                base,
                temperature,
                moving,
                measure,
                bracket: (args.lo, args.hi),
                tol: args.tol,
            };
            let grid = resolve_grid(&args.grid, &cfg)?;
            let crossing = find_threshold_with(&query, &grid)?;
            writeln!(out, "{}", sweep::fmt12(crossing))?;
            Ok(())
        }
        Command::Selftest(args) => {
            let mut opts = SelfTestOptions {
                seed: args.seed,
                ..SelfTestOptions::default()
            };
            if args.quick {
                opts = opts.quick();
            }
            let report = run_selftest(&opts);
            for line in report.lines() {
                writeln!(out, "{line}")?;
            }
            if report.all_ok() {
                writeln!(out, "selftest: all suites passed")?;
                Ok(())
            } else {
                Err(Failure::new(EXIT_NUMERICAL, "selftest failed"))
            }
        }
    }
}
