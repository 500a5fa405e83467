//! Parameter sweeps, threshold bisection and the figure presets.
//!
//! A sweep evaluates the correlation measures over a 1D or 2D grid and
//! emits one row per grid point in row-major axis order. Failed points are
//! kept as flagged rows so grids stay rectangular. Output is deterministic:
//! two runs of the same spec produce byte-identical CSV.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{self, GridSpec};
use crate::model::DimerParams;
use crate::thermal::gibbs_state_analytic;

/// Exact CSV header for sweep tables.
pub const CSV_HEADER: &str = "axis1,axis2,Z,purity,x_norm,hs_min,f_min,negativity,status";

/// Measure value below which a threshold crossing is declared.
pub const THRESHOLD_CUTOFF: f64 = 1e-6;

/// A sweepable model variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisVar {
    B,
    T,
    DOverJ,
    G1,
    G2,
    Delta,
}

impl FromStr for AxisVar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "b" => Ok(AxisVar::B),
            "t" => Ok(AxisVar::T),
            "d_over_j" | "d-over-j" => Ok(AxisVar::DOverJ),
            "g1" => Ok(AxisVar::G1),
            "g2" => Ok(AxisVar::G2),
            "delta" => Ok(AxisVar::Delta),
            other => Err(Error::InvalidSweep(format!(
                "unknown axis variable '{other}' (expected B, T, d_over_j, g1, g2 or delta)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Axis {
    pub var: AxisVar,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(var: AxisVar, min: f64, max: f64, points: usize) -> Self {
        Self {
            var,
            min,
            max,
            points,
        }
    }

    fn value(&self, i: usize) -> f64 {
        if self.points == 1 {
            return self.min;
        }
        self.min + (self.max - self.min) * i as f64 / (self.points - 1) as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    HsMin,
    FMin,
    Negativity,
}

impl Measure {
    pub const ALL: [Measure; 3] = [Measure::HsMin, Measure::FMin, Measure::Negativity];
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hs_min" | "hs-min" | "hs" => Ok(Measure::HsMin),
            "f_min" | "f-min" | "fmin" => Ok(Measure::FMin),
            "negativity" | "neg" => Ok(Measure::Negativity),
            other => Err(Error::InvalidSweep(format!(
                "unknown measure '{other}' (expected hs_min, f_min or negativity)"
            ))),
        }
    }
}

/// Full description of one sweep: base parameters, fixed temperature, one
/// or two axes, requested measures and an optional output path.
#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub base: DimerParams,
    /// Fixed temperature, used unless T is an axis.
    pub temperature: f64,
    pub axes: Vec<Axis>,
    pub measures: Vec<Measure>,
    pub output: Option<PathBuf>,
    /// Measurement-search resolution for the degenerate-marginal branch.
    pub grid: GridSpec,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::InvalidSweep(format!(
                "a sweep needs 1 or 2 axes, got {}",
                self.axes.len()
            )));
        }
        for axis in &self.axes {
            if axis.points < 2 {
                return Err(Error::InvalidSweep(format!(
                    "axis {:?} needs at least 2 points, got {}",
                    axis.var, axis.points
                )));
            }
            if axis.min.is_nan() || axis.max.is_nan() || axis.min >= axis.max {
                return Err(Error::InvalidSweep(format!(
                    "axis {:?} needs min < max, got [{}, {}]",
                    axis.var, axis.min, axis.max
                )));
            }
        }
        if self.axes.len() == 2 && self.axes[0].var == self.axes[1].var {
            return Err(Error::InvalidSweep(
                "both axes sweep the same variable".into(),
            ));
        }
        if self.measures.is_empty() {
            return Err(Error::InvalidSweep("no measures requested".into()));
        }
        Ok(())
    }

    pub fn row_count(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }
}

/// One grid point of a sweep. Numeric fields are None for flagged rows (and
/// measures stay None when not requested).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis1: f64,
    pub axis2: Option<f64>,
    pub z: Option<f64>,
    pub purity: Option<f64>,
    pub x_norm: Option<f64>,
    pub hs_min: Option<f64>,
    pub f_min: Option<f64>,
    pub negativity: Option<f64>,
    pub status: String,
}

#[derive(Clone, Debug)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

fn status_tag(e: &Error) -> String {
    match e {
        Error::NonPositiveTemperature(_) => "non_positive_temperature".into(),
        Error::NotAState(_) => "not_a_state".into(),
        Error::InvalidParams(_) => "invalid_params".into(),
        Error::PartitionOverflow { .. } => "partition_overflow".into(),
        Error::EigenConvergence(_) => "eigen_convergence".into(),
        _ => "error".into(),
    }
}

fn apply_axis(p: &mut DimerParams, t: &mut f64, var: AxisVar, value: f64) {
    match var {
        AxisVar::B => p.b = value,
        AxisVar::T => *t = value,
        AxisVar::DOverJ => p.d = value * p.j,
        AxisVar::G1 => p.g1 = value,
        AxisVar::G2 => p.g2 = value,
        AxisVar::Delta => p.delta = value,
    }
}

/// Evaluate one parameter point: thermal state plus the requested measures.
pub fn evaluate_point(
    params: &DimerParams,
    temperature: f64,
    measures: &[Measure],
    grid: &GridSpec,
) -> std::result::Result<PointValues, Error> {
    let state = gibbs_state_analytic(params, temperature)?;
    let bloch = measures::bloch_decomposition(&state.rho)?;
    let mut out = PointValues {
        z: state.ln_z.exp(),
        purity: state.purity(),
        x_norm: bloch.x_norm(),
        hs_min: None,
        f_min: None,
        negativity: None,
    };
    for m in measures {
        match m {
            Measure::HsMin => out.hs_min = Some(measures::hs_min(&state.rho)?),
            Measure::FMin => out.f_min = Some(measures::f_min_with(&state.rho, grid)?),
            Measure::Negativity => out.negativity = Some(measures::negativity(&state.rho)?),
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
pub struct PointValues {
    pub z: f64,
    pub purity: f64,
    pub x_norm: f64,
    pub hs_min: Option<f64>,
    pub f_min: Option<f64>,
    pub negativity: Option<f64>,
}

/// Run a sweep. Grid points are evaluated in parallel; rows come back in
/// row-major axis order regardless of scheduling.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    spec.validate()?;
    let (n1, n2) = match spec.axes.len() {
        1 => (spec.axes[0].points, 1),
        _ => (spec.axes[0].points, spec.axes[1].points),
    };

    let rows: Vec<SweepRow> = (0..n1 * n2)
        .into_par_iter()
        .map(|idx| {
            let (i, k) = (idx / n2, idx % n2);
            let mut p = spec.base;
            let mut t = spec.temperature;
            let v1 = spec.axes[0].value(i);
            apply_axis(&mut p, &mut t, spec.axes[0].var, v1);
            let v2 = spec.axes.get(1).map(|axis| {
                let v = axis.value(k);
                apply_axis(&mut p, &mut t, axis.var, v);
                v
            });
            match evaluate_point(&p, t, &spec.measures, &spec.grid) {
                Ok(vals) => SweepRow {
                    axis1: v1,
                    axis2: v2,
                    z: Some(vals.z),
                    purity: Some(vals.purity),
                    x_norm: Some(vals.x_norm),
                    hs_min: vals.hs_min,
                    f_min: vals.f_min,
                    negativity: vals.negativity,
                    status: "ok".into(),
                },
                Err(e) => SweepRow {
                    axis1: v1,
                    axis2: v2,
                    z: None,
                    purity: None,
                    x_norm: None,
                    hs_min: None,
                    f_min: None,
                    negativity: None,
                    status: status_tag(&e),
                },
            }
        })
        .collect();

    Ok(SweepTable { rows })
}

/// 12 significant digits, scientific notation; non-finite values pass
/// through as inf/-inf/nan.
pub fn fmt12(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.11e}")
    } else {
        format!("{v}")
    }
}

fn opt12(v: Option<f64>) -> String {
    v.map(fmt12).unwrap_or_default()
}

pub fn write_csv(table: &SweepTable, w: &mut impl Write) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in &table.rows {
        let mut line = String::new();
        let _ = write!(
            line,
            "{},{},{},{},{},{},{},{},{}",
            fmt12(r.axis1),
            r.axis2.map(fmt12).unwrap_or_default(),
            opt12(r.z),
            opt12(r.purity),
            opt12(r.x_norm),
            opt12(r.hs_min),
            opt12(r.f_min),
            opt12(r.negativity),
            r.status
        );
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// A standalone measure report as one CSV row under `CSV_HEADER` (axis and
/// Z cells empty).
pub fn report_csv_row(report: &crate::measures::MeasureReport) -> String {
    format!(
        ",,,{},{},{},{},{},ok",
        fmt12(report.purity),
        fmt12(report.marginal_bloch_norm),
        fmt12(report.hs_min),
        fmt12(report.f_min),
        fmt12(report.negativity)
    )
}

pub fn csv_string(table: &SweepTable) -> String {
    let mut buf = Vec::new();
    write_csv(table, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV output is UTF-8")
}

pub fn write_csv_file(table: &SweepTable, path: &Path) -> std::io::Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_csv(table, &mut f)
}

/// JSON mirror of the CSV table: an array of row objects.
pub fn write_json_file(table: &SweepTable, path: &Path) -> std::io::Result<()> {
    let f = std::io::BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer_pretty(f, &table.rows).map_err(std::io::Error::other)
}

/// What a threshold search moves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MovingVar {
    B,
    T,
}

/// Bisection query: where does `measure` cross the cutoff along `moving`?
#[derive(Clone, Debug)]
pub struct ThresholdQuery {
    pub base: DimerParams,
    /// Fixed temperature; ignored when the moving variable is T.
    pub temperature: f64,
    pub moving: MovingVar,
    pub measure: Measure,
    pub bracket: (f64, f64),
    /// Absolute tolerance on the moving variable.
    pub tol: f64,
}

/// Measure value at a single point, for threshold evaluation.
pub fn measure_value(
    params: &DimerParams,
    temperature: f64,
    measure: Measure,
    grid: &GridSpec,
) -> Result<f64> {
    let vals = evaluate_point(params, temperature, &[measure], grid)?;
    Ok(match measure {
        Measure::HsMin => vals.hs_min.unwrap(),
        Measure::FMin => vals.f_min.unwrap(),
        Measure::Negativity => vals.negativity.unwrap(),
    })
}

pub(crate) fn bisect(
    f: &dyn Fn(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<f64> {
    let flo = f(lo)?;
    let fhi = f(hi)?;
    if (flo > 0.0) == (fhi > 0.0) {
        return Err(Error::BracketInvalid(format!(
            "measure - cutoff has the same sign at both ends ({flo:.3e} and {fhi:.3e})"
        )));
    }
    let sign_lo = flo > 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if (fm > 0.0) == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn find_threshold(q: &ThresholdQuery) -> Result<f64> {
    find_threshold_with(q, &GridSpec::default())
}

pub fn find_threshold_with(q: &ThresholdQuery, grid: &GridSpec) -> Result<f64> {
    q.base.validate()?;
    let (lo, hi) = q.bracket;
    if lo.is_nan() || hi.is_nan() || lo >= hi || !q.tol.is_finite() || q.tol <= 0.0 {
        return Err(Error::BracketInvalid(format!(
            "need lo < hi and tol > 0, got [{lo}, {hi}] tol {}",
            q.tol
        )));
    }
    let eval = |v: f64| -> Result<f64> {
        let mut p = q.base;
        let mut t = q.temperature;
        match q.moving {
            MovingVar::B => p.b = v,
            MovingVar::T => t = v,
        }
        Ok(measure_value(&p, t, q.measure, grid)? - THRESHOLD_CUTOFF)
    };
    bisect(&eval, lo, hi, q.tol)
}

/// One named sweep of a figure preset.
#[derive(Clone, Debug)]
pub struct LabeledSweep {
    pub label: String,
    pub spec: SweepSpec,
}

/// Caption values that the figures leave open: curve temperatures for the
/// dimensionless and CuNi field sweeps and curve fields for the CuNi
/// temperature sweeps. Overridable from the config file.
#[derive(Clone, Debug)]
pub struct FigureOptions {
    /// kB T / J values for the dimensionless B-sweeps (figs 1 and 3).
    pub temps_dimensionless: Vec<f64>,
    /// Temperatures in kelvin for the CuNi B-sweeps (fig 5).
    pub temps_kelvin: Vec<f64>,
    /// Fields in tesla for the CuNi T-sweeps (fig 4).
    pub fields_tesla: Vec<f64>,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self {
            temps_dimensionless: vec![0.1, 0.5, 1.0, 2.0],
            temps_kelvin: vec![1.0, 50.0, 150.0, 300.0],
            fields_tesla: vec![1.0, 10.0, 50.0, 100.0, 150.0],
        }
    }
}

fn dimensionless_base(g1: f64, g2: f64, d_over_j: f64) -> DimerParams {
    DimerParams::dimensionless(1.0, 1.0, d_over_j, g1, g2, 0.0)
}

fn sweep(base: DimerParams, temperature: f64, axes: Vec<Axis>) -> SweepSpec {
    SweepSpec {
        base,
        temperature,
        axes,
        measures: Measure::ALL.to_vec(),
        output: None,
        grid: GridSpec::default(),
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v}")
}

pub fn figure_preset(name: &str) -> Result<Vec<LabeledSweep>> {
    figure_preset_with(name, &FigureOptions::default())
}

/// The named sweeps behind each figure.
///
/// Captions fix the model parameters; axis ranges, grid counts and the
/// "different temperatures / fields" lists are artifact choices (see
/// `FigureOptions`). fig3 ships both readings of its parameters: the caption
/// one (g1 = g2 = 2.2) and the text one (|g1 - g2| = 0.2, both orders).
pub fn figure_preset_with(name: &str, opts: &FigureOptions) -> Result<Vec<LabeledSweep>> {
    let b_axis_dimless = Axis::new(AxisVar::B, 0.0, 2.5, 201);
    let b_axis_cuni = Axis::new(AxisVar::B, 0.0, 200.0, 201);
    let mut out = Vec::new();
    match name {
        // MIN and F-MIN vs field at several temperatures, g1 = g2 = 2,
        // Delta = 1, D/J in {-0.5, 1.5}.
        "fig1" => {
            for d_over_j in [-0.5, 1.5] {
                for &t in &opts.temps_dimensionless {
                    out.push(LabeledSweep {
                        label: format!("d{}_t{}", fmt_num(d_over_j), fmt_num(t)),
                        spec: sweep(
                            dimensionless_base(2.0, 2.0, d_over_j),
                            t,
                            vec![b_axis_dimless],
                        ),
                    });
                }
            }
        }
        // Density maps vs (B, T) for D/J in {-1.5, 0, 1.5}, g1 = g2 = 2.
        "fig2" => {
            for d_over_j in [-1.5, 0.0, 1.5] {
                out.push(LabeledSweep {
                    label: format!("d{}", fmt_num(d_over_j)),
                    spec: sweep(
                        dimensionless_base(2.0, 2.0, d_over_j),
                        0.1,
                        vec![
                            Axis::new(AxisVar::B, 0.0, 2.5, 101),
                            Axis::new(AxisVar::T, 0.05, 2.0, 81),
                        ],
                    ),
                });
            }
        }
        // g-factor comparison; caption says g1 = g2 = 2.2, the discussion
        // says |g1 - g2| = 0.2. All three readings are emitted, labeled.
        "fig3" => {
            let readings = [
                ("caption_g2.2_g2.2", 2.2, 2.2),
                ("text_g2.2_g2.0", 2.2, 2.0),
                ("text_g2.0_g2.2", 2.0, 2.2),
            ];
            for (tag, g1, g2) in readings {
                for d_over_j in [-0.5, 1.5] {
                    for &t in &opts.temps_dimensionless {
                        out.push(LabeledSweep {
                            label: format!("{tag}_d{}_t{}", fmt_num(d_over_j), fmt_num(t)),
                            spec: sweep(
                                dimensionless_base(g1, g2, d_over_j),
                                t,
                                vec![b_axis_dimless],
                            ),
                        });
                    }
                }
            }
        }
        // CuNi: measures vs temperature at several fields.
        "fig4" => {
            for &b in &opts.fields_tesla {
                out.push(LabeledSweep {
                    label: format!("b{}T", fmt_num(b)),
                    spec: sweep(
                        DimerParams::cuni(b),
                        300.0,
                        vec![Axis::new(AxisVar::T, 0.1, 300.0, 300)],
                    ),
                });
            }
        }
        // CuNi: measures vs field at several temperatures.
        "fig5" => {
            for &t in &opts.temps_kelvin {
                out.push(LabeledSweep {
                    label: format!("t{}K", fmt_num(t)),
                    spec: sweep(DimerParams::cuni(0.0), t, vec![b_axis_cuni]),
                });
            }
        }
        // CuNi: density map vs (B, T).
        "fig6" => {
            out.push(LabeledSweep {
                label: "density".into(),
                spec: sweep(
                    DimerParams::cuni(0.0),
                    1.0,
                    vec![
                        Axis::new(AxisVar::B, 0.0, 200.0, 101),
                        Axis::new(AxisVar::T, 0.1, 300.0, 101),
                    ],
                ),
            });
        }
        other => return Err(Error::UnknownPreset(other.to_string())),
    }
    Ok(out)
}

pub const FIGURE_NAMES: [&str; 6] = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::UnitSystem;

    fn small_spec() -> SweepSpec {
        SweepSpec {
            base: DimerParams::dimensionless(1.0, 1.0, 0.5, 2.0, 2.0, 0.0),
            temperature: 0.3,
            axes: vec![Axis::new(AxisVar::B, 0.1, 0.5, 3)],
            measures: Measure::ALL.to_vec(),
            output: None,
            grid: GridSpec::default(),
        }
    }

    #[test]
    fn row_count_is_product_of_axis_points() {
        let mut spec = small_spec();
        spec.axes = vec![
            Axis::new(AxisVar::B, 0.0, 1.0, 4),
            Axis::new(AxisVar::T, 0.2, 0.8, 5),
        ];
        let table = run_sweep(&spec).unwrap();
        assert_eq!(table.rows.len(), 20);
        assert_eq!(spec.row_count(), 20);
    }

    #[test]
    fn sweep_rows_equal_direct_point_evaluation() {
        let spec = small_spec();
        let table = run_sweep(&spec).unwrap();
        for row in &table.rows {
            let mut p = spec.base;
            p.b = row.axis1;
            let vals = evaluate_point(&p, spec.temperature, &spec.measures, &spec.grid).unwrap();
            assert_eq!(row.hs_min, vals.hs_min);
            assert_eq!(row.f_min, vals.f_min);
            assert_eq!(row.negativity, vals.negativity);
            assert_eq!(row.z, Some(vals.z));
        }
    }

    #[test]
    fn sweep_is_deterministic() {
        let mut spec = small_spec();
        spec.axes = vec![
            Axis::new(AxisVar::B, 0.0, 1.5, 7),
            Axis::new(AxisVar::T, 0.1, 1.0, 5),
        ];
        let a = csv_string(&run_sweep(&spec).unwrap());
        let b = csv_string(&run_sweep(&spec).unwrap());
        assert_eq!(a, b);
        assert!(a.starts_with(CSV_HEADER));
    }

    #[test]
    fn flagged_rows_keep_the_grid_rectangular() {
        let mut spec = small_spec();
        // T axis starting at 0: the first column of points must be flagged,
        // not dropped.
        spec.axes = vec![Axis::new(AxisVar::T, 0.0, 1.0, 5)];
        let table = run_sweep(&spec).unwrap();
        assert_eq!(table.rows.len(), 5);
        assert_eq!(table.rows[0].status, "non_positive_temperature");
        assert!(table.rows[0].z.is_none());
        for row in &table.rows[1..] {
            assert_eq!(row.status, "ok");
        }
    }

    #[test]
    fn validation_rejects_bad_specs() {
        let mut spec = small_spec();
        spec.axes = vec![Axis::new(AxisVar::B, 0.5, 0.1, 3)];
        assert!(matches!(spec.validate(), Err(Error::InvalidSweep(_))));
        spec.axes = vec![Axis::new(AxisVar::B, 0.1, 0.5, 1)];
        assert!(spec.validate().is_err());
        spec.axes = vec![];
        assert!(spec.validate().is_err());
        spec.axes = vec![
            Axis::new(AxisVar::B, 0.0, 1.0, 3),
            Axis::new(AxisVar::B, 0.0, 1.0, 3),
        ];
        assert!(spec.validate().is_err());
    }

    #[test]
    fn bisection_recovers_known_crossing() {
        // Synthetic monotone function crossing zero at 0.5 exactly.
        let f = |x: f64| -> Result<f64> { Ok(0.5 - x) };
        let root = bisect(&f, 0.0, 1.0, 1e-9).unwrap();
        assert!((root - 0.5).abs() < 1e-8);

        let bad = bisect(&|_| Ok(1.0), 0.0, 1.0, 1e-9);
        assert!(matches!(bad, Err(Error::BracketInvalid(_))));
    }

    #[test]
    fn csv_formatting_is_twelve_digits() {
        assert_eq!(fmt12(0.25), "2.50000000000e-1");
        assert_eq!(fmt12(f64::INFINITY), "inf");
        let table = run_sweep(&small_spec()).unwrap();
        let csv = csv_string(&table);
        let line = csv.lines().nth(1).unwrap();
        assert_eq!(line.split(',').count(), 9);
        // 1D sweep: axis2 column empty.
        assert_eq!(line.split(',').nth(1).unwrap(), "");

        // A standalone report row carries the same tail columns.
        let spec = small_spec();
        let state = gibbs_state_analytic(&spec.base, spec.temperature).unwrap();
        let report = crate::measures::measure_report(&state.rho, &spec.grid).unwrap();
        let row = report_csv_row(&report);
        assert_eq!(row.split(',').count(), CSV_HEADER.split(',').count());
        assert!(row.ends_with(",ok"));
    }

    #[test]
    fn presets_are_valid_and_labeled() {
        for name in FIGURE_NAMES {
            let sweeps = figure_preset(name).unwrap();
            assert!(!sweeps.is_empty(), "{name} produced no sweeps");
            for ls in &sweeps {
                ls.spec
                    .validate()
                    .unwrap_or_else(|e| panic!("{name}/{}: {e}", ls.label));
            }
        }
        assert!(matches!(
            figure_preset("fig7"),
            Err(Error::UnknownPreset(_))
        ));

        // fig1: B-sweeps at the default four temperatures for both D values.
        let fig1 = figure_preset("fig1").unwrap();
        assert_eq!(fig1.len(), 8);
        assert!(fig1.iter().all(|ls| ls.spec.axes.len() == 1
            && ls.spec.axes[0].var == AxisVar::B
            && ls.spec.base.g1 == 2.0
            && ls.spec.base.delta == 1.0));

        // fig3 carries the caption reading and both text readings.
        let fig3 = figure_preset("fig3").unwrap();
        assert!(fig3.iter().any(|ls| ls.label.starts_with("caption_")));
        assert!(fig3
            .iter()
            .any(|ls| ls.spec.base.g1 == 2.2 && ls.spec.base.g2 == 2.0));
        assert!(fig3
            .iter()
            .any(|ls| ls.spec.base.g1 == 2.0 && ls.spec.base.g2 == 2.2));

        // fig4 is the CuNi parameterization.
        let fig4 = figure_preset("fig4").unwrap();
        for ls in &fig4 {
            assert_eq!(ls.spec.base.units, UnitSystem::Physical);
            assert_eq!(ls.spec.base.j, 141.0);
            assert_eq!(ls.spec.base.g1, 2.20);
            assert_eq!(ls.spec.base.g2, 2.29);
            assert_eq!(ls.spec.base.d, 0.0);
        }
    }

    #[test]
    fn threshold_on_negativity_in_field() {
        // At T = 0.1 the isotropic dimer loses entanglement at a critical
        // field; the crossing must sit strictly inside the bracket.
        let q = ThresholdQuery {
            base: DimerParams::dimensionless(1.0, 1.0, 0.0, 2.0, 2.0, 0.0),
            temperature: 0.1,
            moving: MovingVar::B,
            measure: Measure::Negativity,
            bracket: (0.01, 3.0),
            tol: 1e-4,
        };
        let b_star = find_threshold(&q).unwrap();
        assert!(b_star > 0.05 && b_star < 2.9, "crossing at {b_star}");
    }
}
