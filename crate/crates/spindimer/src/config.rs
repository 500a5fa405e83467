//! Flat INI-style configuration: `[model]`, `[sweep]` and `[run]` sections
//! of key = value lines. Unknown sections and keys are rejected with the
//! offending line number. Command-line flags override file values, which
//! override built-in defaults.

use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{DimerParams, UnitSystem};
use crate::sweep::{Axis, AxisVar, FigureOptions, Measure};

/// Configuration parse/validation failure with a file position.
#[derive(Debug)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(n) => write!(f, "config line {n}: {}", self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn at(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line: Some(line),
        message: message.into(),
    }
}

fn plain(message: impl Into<String>) -> ConfigError {
    ConfigError {
        line: None,
        message: message.into(),
    }
}

#[derive(Clone, Debug, Default)]
pub struct ModelSection {
    pub units: Option<UnitSystem>,
    pub j: Option<f64>,
    pub delta: Option<f64>,
    pub d_over_j: Option<f64>,
    pub j_over_kb_kelvin: Option<f64>,
    pub d_over_kb_kelvin: Option<f64>,
    pub g1: Option<f64>,
    pub g2: Option<f64>,
    pub b: Option<f64>,
}

#[derive(Clone, Debug, Default)]
pub struct SweepSection {
    pub t: Option<f64>,
    pub axis1: Option<AxisVar>,
    pub axis1_min: Option<f64>,
    pub axis1_max: Option<f64>,
    pub axis1_points: Option<usize>,
    pub axis2: Option<AxisVar>,
    pub axis2_min: Option<f64>,
    pub axis2_max: Option<f64>,
    pub axis2_points: Option<usize>,
    pub measures: Option<Vec<Measure>>,
    pub output: Option<String>,
    pub figure_temps: Option<Vec<f64>>,
    pub figure_temps_kelvin: Option<Vec<f64>>,
    pub figure_fields_tesla: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default)]
pub struct RunSection {
    pub command: Option<String>,
    pub out: Option<String>,
    pub parallel: Option<usize>,
    /// Measurement-search grid as (n_phi, n_theta).
    pub grid: Option<(usize, usize)>,
    pub json: Option<bool>,
}

#[derive(Clone, Debug, Default)]
pub struct CliConfig {
    pub model: ModelSection,
    pub sweep: SweepSection,
    pub run: RunSection,
}

fn parse_value<T: std::str::FromStr>(
    line: usize,
    key: &str,
    raw: &str,
) -> std::result::Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    raw.parse::<T>()
        .map_err(|e| at(line, format!("bad value for '{key}': {e}")))
}

fn parse_list_f64(line: usize, key: &str, raw: &str) -> std::result::Result<Vec<f64>, ConfigError> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| at(line, format!("bad number in '{key}': {e}")))
        })
        .collect()
}

/// Parse a "NxM" grid resolution into (n_phi, n_theta).
pub fn parse_grid(raw: &str) -> Result<(usize, usize)> {
    let err = || {
        Error::InvalidParams(format!(
            "grid must look like 360x180 (phi x theta), got '{raw}'"
        ))
    };
    let (a, b) = raw.split_once(['x', 'X']).ok_or_else(err)?;
    let n_phi = a.trim().parse::<usize>().map_err(|_| err())?;
    let n_theta = b.trim().parse::<usize>().map_err(|_| err())?;
    if n_phi < 4 || n_theta < 2 {
        return Err(err());
    }
    Ok((n_phi, n_theta))
}

pub fn parse_config_str(text: &str) -> std::result::Result<CliConfig, ConfigError> {
    let mut cfg = CliConfig::default();
    let mut section: Option<String> = None;

    for (i, raw_line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = match raw_line.find(['#', ';']) {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| at(lineno, "unterminated section header"))?
                .trim()
                .to_ascii_lowercase();
            if !["model", "sweep", "run"].contains(&name.as_str()) {
                return Err(at(lineno, format!("unknown section '[{name}]'")));
            }
            section = Some(name);
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| at(lineno, format!("expected 'key = value', got '{line}'")))?;
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();
        if value.is_empty() {
            return Err(at(lineno, format!("empty value for '{key}'")));
        }
        let section = section
            .as_deref()
            .ok_or_else(|| at(lineno, "key outside any [section]"))?;

        match section {
            "model" => {
                let m = &mut cfg.model;
                match key.as_str() {
                    "units" => {
                        m.units = Some(match value.to_ascii_lowercase().as_str() {
                            "dimensionless" => UnitSystem::Dimensionless,
                            "physical" => UnitSystem::Physical,
                            other => {
                                return Err(at(
                                    lineno,
                                    format!(
                                        "units must be dimensionless or physical, got '{other}'"
                                    ),
                                ))
                            }
                        })
                    }
                    "j" => m.j = Some(parse_value(lineno, &key, value)?),
                    "delta" => m.delta = Some(parse_value(lineno, &key, value)?),
                    "d_over_j" => m.d_over_j = Some(parse_value(lineno, &key, value)?),
                    "j_over_kb_kelvin" => {
                        m.j_over_kb_kelvin = Some(parse_value(lineno, &key, value)?)
                    }
                    "d_over_kb_kelvin" => {
                        m.d_over_kb_kelvin = Some(parse_value(lineno, &key, value)?)
                    }
                    "g1" => m.g1 = Some(parse_value(lineno, &key, value)?),
                    "g2" => m.g2 = Some(parse_value(lineno, &key, value)?),
                    "b" => m.b = Some(parse_value(lineno, &key, value)?),
                    other => return Err(at(lineno, format!("unknown [model] key '{other}'"))),
                }
            }
            "sweep" => {
                let s = &mut cfg.sweep;
                match key.as_str() {
                    "t" => s.t = Some(parse_value(lineno, &key, value)?),
                    "axis1" => {
                        s.axis1 =
                            Some(AxisVar::from_str(value).map_err(|e| at(lineno, e.to_string()))?)
                    }
                    "axis1_min" => s.axis1_min = Some(parse_value(lineno, &key, value)?),
                    "axis1_max" => s.axis1_max = Some(parse_value(lineno, &key, value)?),
                    "axis1_points" => s.axis1_points = Some(parse_value(lineno, &key, value)?),
                    "axis2" => {
                        s.axis2 =
                            Some(AxisVar::from_str(value).map_err(|e| at(lineno, e.to_string()))?)
                    }
                    "axis2_min" => s.axis2_min = Some(parse_value(lineno, &key, value)?),
                    "axis2_max" => s.axis2_max = Some(parse_value(lineno, &key, value)?),
                    "axis2_points" => s.axis2_points = Some(parse_value(lineno, &key, value)?),
                    "measures" => {
                        let parsed: std::result::Result<Vec<Measure>, ConfigError> = value
                            .split(',')
                            .map(|v| {
                                Measure::from_str(v.trim()).map_err(|e| at(lineno, e.to_string()))
                            })
                            .collect();
                        s.measures = Some(parsed?);
                    }
                    "output" => s.output = Some(value.to_string()),
                    "figure_temps" => s.figure_temps = Some(parse_list_f64(lineno, &key, value)?),
                    "figure_temps_kelvin" => {
                        s.figure_temps_kelvin = Some(parse_list_f64(lineno, &key, value)?)
                    }
                    "figure_fields_tesla" => {
                        s.figure_fields_tesla = Some(parse_list_f64(lineno, &key, value)?)
                    }
                    other => return Err(at(lineno, format!("unknown [sweep] key '{other}'"))),
                }
            }
            "run" => {
                let r = &mut cfg.run;
                match key.as_str() {
                    "command" => {
                        let cmd = value.to_ascii_lowercase();
                        if !["point", "sweep", "figure", "threshold", "selftest"]
                            .contains(&cmd.as_str())
                        {
                            return Err(at(lineno, format!("unknown command '{cmd}'")));
                        }
                        r.command = Some(cmd);
                    }
                    "out" => r.out = Some(value.to_string()),
                    "parallel" => r.parallel = Some(parse_value(lineno, &key, value)?),
                    "grid" => {
                        r.grid = Some(parse_grid(value).map_err(|e| at(lineno, e.to_string()))?)
                    }
                    "json" => r.json = Some(parse_value(lineno, &key, value)?),
                    other => return Err(at(lineno, format!("unknown [run] key '{other}'"))),
                }
            }
            _ => unreachable!("section names are validated above"),
        }
    }

    validate_unit_keys(&cfg.model)?;
    Ok(cfg)
}

/// Exactly one family of unit keys may be present.
fn validate_unit_keys(m: &ModelSection) -> std::result::Result<(), ConfigError> {
    let has_dimensionless = m.j.is_some() || m.d_over_j.is_some();
    let has_physical = m.j_over_kb_kelvin.is_some() || m.d_over_kb_kelvin.is_some();
    if has_dimensionless && has_physical {
        return Err(plain(
            "both dimensionless (j, d_over_j) and physical (j_over_kb_kelvin, d_over_kb_kelvin) keys present; pick one unit system",
        ));
    }
    match m.units {
        Some(UnitSystem::Dimensionless) if has_physical => Err(plain(
            "units = dimensionless but physical-unit keys present",
        )),
        Some(UnitSystem::Physical) if has_dimensionless => Err(plain(
            "units = physical but dimensionless-unit keys present",
        )),
        _ => Ok(()),
    }
}

pub fn parse_config(path: &Path) -> std::result::Result<CliConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| plain(format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&text)
}

/// Resolve the model section (after any flag overrides) into parameters.
/// Defaults: dimensionless units, J = 1, Delta = 1, D = 0, g1 = g2 = 2,
/// B = 0. Physical mode requires an explicit exchange coupling.
pub fn resolve_params(m: &ModelSection) -> Result<DimerParams> {
    validate_unit_keys(m).map_err(|e| Error::InvalidParams(e.to_string()))?;
    let units = m.units.unwrap_or({
        if m.j_over_kb_kelvin.is_some() || m.d_over_kb_kelvin.is_some() {
            UnitSystem::Physical
        } else {
            UnitSystem::Dimensionless
        }
    });
    let params = match units {
        UnitSystem::Dimensionless => DimerParams::dimensionless(
            m.j.unwrap_or(1.0),
            m.delta.unwrap_or(1.0),
            m.d_over_j.unwrap_or(0.0),
            m.g1.unwrap_or(2.0),
            m.g2.unwrap_or(2.0),
            m.b.unwrap_or(0.0),
        ),
        UnitSystem::Physical => {
            let j = m.j_over_kb_kelvin.ok_or_else(|| {
                Error::InvalidParams(
                    "physical units need j_over_kb_kelvin (no default exchange coupling)".into(),
                )
            })?;
            DimerParams::physical(
                j,
                m.delta.unwrap_or(1.0),
                m.d_over_kb_kelvin.unwrap_or(0.0),
                m.g1.unwrap_or(2.0),
                m.g2.unwrap_or(2.0),
                m.b.unwrap_or(0.0),
            )
        }
    };
    if params.b < 0.0 {
        return Err(Error::InvalidParams(format!(
            "the field must be nonnegative, got {}",
            params.b
        )));
    }
    params.validate()?;
    Ok(params)
}

/// Resolve the sweep section into axes (at least axis1 must be configured).
pub fn resolve_axes(s: &SweepSection) -> Result<Vec<Axis>> {
    let mut axes = Vec::new();
    if let Some(var) = s.axis1 {
        let (min, max, points) = match (s.axis1_min, s.axis1_max, s.axis1_points) {
            (Some(a), Some(b), Some(n)) => (a, b, n),
            _ => {
                return Err(Error::InvalidSweep(
                    "axis1 needs axis1_min, axis1_max and axis1_points".into(),
                ))
            }
        };
        axes.push(Axis::new(var, min, max, points));
    }
    if let Some(var) = s.axis2 {
        if axes.is_empty() {
            return Err(Error::InvalidSweep("axis2 configured without axis1".into()));
        }
        let (min, max, points) = match (s.axis2_min, s.axis2_max, s.axis2_points) {
            (Some(a), Some(b), Some(n)) => (a, b, n),
            _ => {
                return Err(Error::InvalidSweep(
                    "axis2 needs axis2_min, axis2_max and axis2_points".into(),
                ))
            }
        };
        axes.push(Axis::new(var, min, max, points));
    }
    if axes.is_empty() {
        return Err(Error::InvalidSweep(
            "a sweep needs axis1 (axis1, axis1_min, axis1_max, axis1_points)".into(),
        ));
    }
    Ok(axes)
}

pub fn figure_options(s: &SweepSection) -> FigureOptions {
    let mut opts = FigureOptions::default();
    if let Some(t) = &s.figure_temps {
        opts.temps_dimensionless = t.clone();
    }
    if let Some(t) = &s.figure_temps_kelvin {
        opts.temps_kelvin = t.clone();
    }
    if let Some(f) = &s.figure_fields_tesla {
        opts.fields_tesla = f.clone();
    }
    opts
}
