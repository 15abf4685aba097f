//! Scenario configuration and the flat `key = value` file format.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::params::{DriveTarget, SystemParams, NUMERIC_KEYS};
use crate::spectra::{ExtremaOptions, Observable, PeakSearch};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioKind {
    Fig1,
    Fig2,
    Fig3,
    Fig5,
    Fig6,
    Custom,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 6] = [
        ScenarioKind::Fig1,
        ScenarioKind::Fig2,
        ScenarioKind::Fig3,
        ScenarioKind::Fig5,
        ScenarioKind::Fig6,
        ScenarioKind::Custom,
    ];
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioKind::Fig1 => "fig1",
            ScenarioKind::Fig2 => "fig2",
            ScenarioKind::Fig3 => "fig3",
            ScenarioKind::Fig5 => "fig5",
            ScenarioKind::Fig6 => "fig6",
            ScenarioKind::Custom => "custom",
        })
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.to_string() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::Config(format!("unknown scenario `{s}`")))
    }
}

/// Where the pump sits relative to the polaritons.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PumpLock {
    /// `nu_l` is used as given.
    None,
    /// `nu_l` is set to the lower transmission peak ω₋ evaluated at J = J₁.
    LowerPolariton,
    /// As above with J → 0.
    LowerPolaritonJ0,
}

impl fmt::Display for PumpLock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PumpLock::None => "none",
            PumpLock::LowerPolariton => "lower_polariton",
            PumpLock::LowerPolaritonJ0 => "lower_polariton_j0",
        })
    }
}

impl FromStr for PumpLock {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "none" => Ok(PumpLock::None),
            "lower_polariton" => Ok(PumpLock::LowerPolariton),
            "lower_polariton_j0" => Ok(PumpLock::LowerPolaritonJ0),
            other => Err(Error::Config(format!(
                "pump_lock must be none, lower_polariton or lower_polariton_j0, got `{other}`"
            ))),
        }
    }
}

/// Observable selector as written in config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservableKind {
    Intensity,
    ExcitedPopulation,
    PeakNearCavity,
}

impl fmt::Display for ObservableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObservableKind::Intensity => "intensity",
            ObservableKind::ExcitedPopulation => "excited_population",
            ObservableKind::PeakNearCavity => "peak_near_cavity",
        })
    }
}

impl FromStr for ObservableKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "intensity" => Ok(ObservableKind::Intensity),
            "excited_population" => Ok(ObservableKind::ExcitedPopulation),
            "peak_near_cavity" => Ok(ObservableKind::PeakNearCavity),
            other => Err(Error::Config(format!(
                "observable must be intensity, excited_population or peak_near_cavity, got `{other}`"
            ))),
        }
    }
}

/// Name of the sweep pseudo-variable "probe frequency minus cavity
/// frequency" (GHz).
pub const PROBE_OFFSET: &str = "probe_offset";

/// Evenly spaced grid over one variable.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepSpec {
    pub fn grid(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|k| {
                if k + 1 == n {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * k as f64 / (n - 1) as f64
                }
            })
            .collect()
    }

    pub fn step(&self) -> f64 {
        (self.stop - self.start) / (self.count - 1) as f64
    }

    pub fn is_probe(&self) -> bool {
        self.variable == "delta" || self.variable == PROBE_OFFSET
    }
}

/// A list of values for one variable; each value produces its own curve.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSpec {
    pub variable: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub params: SystemParams,
    pub pump_lock: PumpLock,
    pub sweep: SweepSpec,
    /// Outer loop of curves (e.g. cavity frequency in fig6).
    pub outer: Option<SeriesSpec>,
    /// Inner loop of curves (e.g. J₁ in fig1).
    pub series: Option<SeriesSpec>,
    pub observable: ObservableKind,
    pub peak_search: PeakSearch,
    pub extrema: ExtremaOptions,
    pub output: Option<PathBuf>,
}

fn range(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step).round() as usize;
    (0..=n).map(|k| start + step * k as f64).collect()
}

impl ScenarioConfig {
    /// Parameter sets, grids and analyses of the named figure.
    pub fn preset(kind: ScenarioKind) -> Self {
        let fig1_params = SystemParams {
            g: 30.0,
            kappa: 3.0,
            gamma: 1.0,
            gamma_d: 1.0,
            gamma_r: 0.0,
            j2: 0.01,
            drive_target: DriveTarget::Cavity,
            ..Default::default()
        };
        let fig5_params = SystemParams {
            nu_c: -136.0,
            nu_d: 0.0,
            nu_l: 0.0,
            g: 0.0,
            kappa: 17.0,
            gamma: 1.0,
            gamma_d: 3.0,
            gamma_r: 0.1,
            j1: 1.75,
            j2: 0.35,
            drive_target: DriveTarget::Qd,
            ..Default::default()
        };
        let base = ScenarioConfig {
            scenario: kind,
            params: fig1_params,
            pump_lock: PumpLock::LowerPolariton,
            sweep: SweepSpec {
                variable: PROBE_OFFSET.into(),
                start: -48.0,
                stop: 48.0,
                count: 2001,
            },
            outer: None,
            series: None,
            observable: ObservableKind::Intensity,
            peak_search: PeakSearch::default(),
            extrema: ExtremaOptions::default(),
            output: None,
        };
        match kind {
            ScenarioKind::Fig1 => ScenarioConfig {
                series: Some(SeriesSpec {
                    variable: "j1".into(),
                    values: vec![0.1, 0.5, 1.0, 2.0, 3.0],
                }),
                ..base
            },
            ScenarioKind::Fig2 => ScenarioConfig {
                sweep: SweepSpec {
                    variable: PROBE_OFFSET.into(),
                    start: 22.0,
                    stop: 38.0,
                    count: 801,
                },
                series: Some(SeriesSpec {
                    variable: "j1".into(),
                    values: range(0.5, 3.0, 0.25),
                }),
                ..base
            },
            ScenarioKind::Fig3 => ScenarioConfig {
                sweep: SweepSpec {
                    variable: PROBE_OFFSET.into(),
                    start: -20.0,
                    stop: -4.0,
                    count: 321,
                },
                series: Some(SeriesSpec {
                    variable: "j1".into(),
                    values: range(1.0, 10.0, 0.25),
                }),
                ..base
            },
            ScenarioKind::Fig5 => ScenarioConfig {
                params: fig5_params,
                pump_lock: PumpLock::None,
                sweep: SweepSpec {
                    variable: "delta".into(),
                    start: -12.0,
                    stop: 12.0,
                    count: 241,
                },
                series: Some(SeriesSpec {
                    variable: "j1".into(),
                    values: vec![0.25, 0.75, 1.25, 1.75, 2.5],
                }),
                observable: ObservableKind::PeakNearCavity,
                ..base
            },
            ScenarioKind::Fig6 => ScenarioConfig {
                params: fig5_params,
                pump_lock: PumpLock::None,
                sweep: SweepSpec {
                    variable: "delta".into(),
                    start: -10.0,
                    stop: 10.0,
                    count: 101,
                },
                outer: Some(SeriesSpec {
                    variable: "nu_c".into(),
                    values: vec![-68.0, -136.0, -204.0],
                }),
                series: Some(SeriesSpec {
                    variable: "g".into(),
                    values: vec![1.0, 2.0, 3.0, 4.0, 5.0],
                }),
                observable: ObservableKind::PeakNearCavity,
                ..base
            },
            ScenarioKind::Custom => ScenarioConfig {
                params: SystemParams {
                    j1: 0.5,
                    ..fig1_params
                },
                pump_lock: PumpLock::None,
                sweep: SweepSpec {
                    variable: "delta".into(),
                    start: -40.0,
                    stop: 40.0,
                    count: 401,
                },
                ..base
            },
        }
    }

    pub fn observable(&self) -> Observable {
        match self.observable {
            ObservableKind::Intensity => Observable::Intensity,
            ObservableKind::ExcitedPopulation => Observable::ExcitedPopulation,
            ObservableKind::PeakNearCavity => Observable::SpectrumPeakNearCavity(self.peak_search),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.peak_search.validate()?;
        if self.sweep.count < 2 {
            return Err(Error::InvalidParameter {
                field: "sweep_count",
                reason: format!("need at least 2 points, got {}", self.sweep.count),
            });
        }
        if !(self.sweep.start.is_finite() && self.sweep.stop.is_finite() && self.sweep.start < self.sweep.stop) {
            return Err(Error::InvalidParameter {
                field: "sweep_start",
                reason: format!(
                    "need finite sweep_start < sweep_stop, got {} and {}",
                    self.sweep.start, self.sweep.stop
                ),
            });
        }
        check_variable(&self.sweep.variable, true)?;
        for s in [&self.outer, &self.series].into_iter().flatten() {
            check_variable(&s.variable, false)?;
            if s.values.is_empty() {
                return Err(Error::Config(format!("series over `{}` has no values", s.variable)));
            }
            if s.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config(format!("series over `{}` has non-finite values", s.variable)));
            }
            if s.variable == self.sweep.variable {
                return Err(Error::Config(format!("`{}` is both swept and a series", s.variable)));
            }
        }
        if let (Some(a), Some(b)) = (&self.outer, &self.series) {
            if a.variable == b.variable {
                return Err(Error::Config(format!("`{}` used by both series", a.variable)));
            }
        }
        let p = self.extrema.min_relative_prominence;
        if !(p >= 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter {
                field: "extrema_prominence",
                reason: format!("must be in [0, 1), got {p}"),
            });
        }
        Ok(())
    }

    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let num = || -> Result<f64> {
            value
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("`{key}` expects a number, got `{value}`")))
        };
        let int = || -> Result<usize> {
            value
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("`{key}` expects a non-negative integer, got `{value}`")))
        };
        match key {
            "scenario" => self.scenario = value.parse()?,
            "drive_target" => self.params.drive_target = value.parse()?,
            "z_epsilon" if value == "auto" => self.params.cf.z_epsilon = None,
            k if NUMERIC_KEYS.contains(&k) => self.params.set(k, num()?)?,
            "pump_lock" => self.pump_lock = value.parse()?,
            "sweep_variable" => self.sweep.variable = value.to_string(),
            "sweep_start" => self.sweep.start = num()?,
            "sweep_stop" => self.sweep.stop = num()?,
            "sweep_count" => self.sweep.count = int()?,
            "series_variable" | "outer_variable" => {
                let slot = if key == "series_variable" { &mut self.series } else { &mut self.outer };
                *slot = match value {
                    "" | "none" => None,
                    v => Some(SeriesSpec {
                        variable: v.to_string(),
                        values: slot.take().map(|s| s.values).unwrap_or_default(),
                    }),
                };
            }
            "series_values" | "outer_values" => {
                let values = parse_list(key, value)?;
                let slot = if key == "series_values" { &mut self.series } else { &mut self.outer };
                match slot {
                    Some(s) => s.values = values,
                    None if values.is_empty() => {}
                    None => {
                        return Err(Error::Config(format!(
                            "`{key}` given without a matching variable key"
                        )))
                    }
                }
            }
            "observable" => self.observable = value.parse()?,
            "peak_window" => self.peak_search.window_kappas = num()?,
            "peak_points" => self.peak_search.coarse_points = int()?,
            "peak_xtol" => self.peak_search.xtol = num()?,
            "extrema_prominence" => self.extrema.min_relative_prominence = num()?,
            "output" => self.output = if value.is_empty() { None } else { Some(PathBuf::from(value)) },
            other => return Err(Error::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Every key with its resolved value, in file order.
    pub fn entries(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = vec![("scenario".into(), self.scenario.to_string())];
        for key in NUMERIC_KEYS {
            let v = if *key == "z_epsilon" {
                match self.params.cf.z_epsilon {
                    Some(e) => e.to_string(),
                    None => "auto".into(),
                }
            } else {
                self.params.get(key).expect("known key").to_string()
            };
            out.push((key.to_string(), v));
        }
        out.push(("drive_target".into(), self.params.drive_target.to_string()));
        out.push(("pump_lock".into(), self.pump_lock.to_string()));
        out.push(("sweep_variable".into(), self.sweep.variable.clone()));
        out.push(("sweep_start".into(), self.sweep.start.to_string()));
        out.push(("sweep_stop".into(), self.sweep.stop.to_string()));
        out.push(("sweep_count".into(), self.sweep.count.to_string()));
        for (name, s) in [("outer", &self.outer), ("series", &self.series)] {
            let (var, vals) = match s {
                Some(s) => (s.variable.clone(), join(&s.values)),
                None => ("none".into(), String::new()),
            };
            out.push((format!("{name}_variable"), var));
            out.push((format!("{name}_values"), vals));
        }
        out.push(("observable".into(), self.observable.to_string()));
        out.push(("peak_window".into(), self.peak_search.window_kappas.to_string()));
        out.push(("peak_points".into(), self.peak_search.coarse_points.to_string()));
        out.push(("peak_xtol".into(), self.peak_search.xtol.to_string()));
        out.push((
            "extrema_prominence".into(),
            self.extrema.min_relative_prominence.to_string(),
        ));
        out.push((
            "output".into(),
            self.output.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
        ));
        out
    }

    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.entries() {
            s.push_str(&k);
            s.push_str(" = ");
            s.push_str(&v);
            s.push('\n');
        }
        s
    }

    /// Parses a config text. The `scenario` key selects the preset that the
    /// remaining keys override; it defaults to `custom`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs: Vec<(usize, String, String)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let k = k.trim().to_string();
            if pairs.iter().any(|(_, seen, _)| *seen == k) {
                return Err(Error::Config(format!("line {}: duplicate key `{k}`", lineno + 1)));
            }
            pairs.push((lineno + 1, k, v.trim().to_string()));
        }
        let kind = match pairs.iter().find(|(_, k, _)| k == "scenario") {
            Some((_, _, v)) => v.parse()?,
            None => ScenarioKind::Custom,
        };
        let mut cfg = ScenarioConfig::preset(kind);
        // variables before their value lists
        pairs.sort_by_key(|(_, k, _)| !k.ends_with("_variable"));
        for (lineno, k, v) in pairs {
            if k == "scenario" {
                continue;
            }
            cfg.set(&k, &v).map_err(|e| match e {
                Error::Config(msg) => Error::Config(format!("line {lineno}: {msg}")),
                other => other,
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn check_variable(name: &str, allow_probe_offset: bool) -> Result<()> {
    if NUMERIC_KEYS.contains(&name) || (allow_probe_offset && name == PROBE_OFFSET) {
        Ok(())
    } else {
        Err(Error::Config(format!("`{name}` is not a sweepable parameter")))
    }
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{}` as a number", t.trim())))
        })
        .collect()
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

pub fn read_config(path: &Path) -> Result<ScenarioConfig> {
    ScenarioConfig::parse(&fs::read_to_string(path)?)
}

pub fn write_config(cfg: &ScenarioConfig, path: &Path) -> Result<()> {
    fs::write(path, cfg.to_config_string())?;
    Ok(())
}
