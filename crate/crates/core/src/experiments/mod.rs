//! Figure scenarios: parameter presets, sweeps, analyses and CSV output.

mod config;
mod knee;
mod table;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::oracles::{fit_asymmetry, fit_peak_ratio, polariton_peaks, AnalyticParams, AsymmetryFit, PeakRatioFit};
use crate::params::{to_linear, SystemParams};
use crate::spectra::{evaluate_observable, find_extrema, probe_sweep, Extremum, ExtremumKind};

pub use config::{
    read_config, write_config, ObservableKind, PumpLock, ScenarioConfig, ScenarioKind, SeriesSpec, SweepSpec,
    PROBE_OFFSET,
};
pub use knee::{detect_knee, Knee, KneeOutcome};
pub use table::{write_csv, ResultTable};

/// One swept curve at fixed outer/series values.
#[derive(Debug, Clone)]
pub struct Curve {
    pub outer: Option<f64>,
    pub series: Option<f64>,
    /// Parameters after series assignment and pump placement.
    pub params: SystemParams,
    /// Sweep variable values.
    pub x: Vec<f64>,
    pub values: Vec<f64>,
    /// Probe-free value at each point.
    pub background: Vec<f64>,
    /// Spectral peak position relative to the bare cavity, GHz.
    pub peak_offsets: Option<Vec<f64>>,
    /// Extrema of `values − background` against `x`.
    pub extrema: Vec<Extremum>,
}

impl Curve {
    pub fn deviation(&self) -> Vec<f64> {
        self.values.iter().zip(&self.background).map(|(v, b)| v - b).collect()
    }

    pub fn peaks(&self) -> Vec<Extremum> {
        self.extrema.iter().copied().filter(|e| e.kind == ExtremumKind::Peak).collect()
    }

    pub fn dips(&self) -> Vec<Extremum> {
        self.extrema.iter().copied().filter(|e| e.kind == ExtremumKind::Dip).collect()
    }

    fn label(&self, cfg: &ScenarioConfig) -> String {
        let mut parts = Vec::new();
        if let (Some(s), Some(v)) = (&cfg.outer, self.outer) {
            parts.push(format!("{} = {v}", s.variable));
        }
        if let (Some(s), Some(v)) = (&cfg.series, self.series) {
            parts.push(format!("{} = {v}", s.variable));
        }
        if parts.is_empty() {
            "curve".into()
        } else {
            parts.join(", ")
        }
    }
}

/// Peak count and splitting of one curve (fig2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Splitting {
    pub j1: f64,
    pub peaks: usize,
    /// Distance between the two most prominent peaks, if there are two.
    pub separation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KneeAnalysis {
    /// (J₁, position of the strongest peak relative to the cavity)
    pub points: Vec<(f64, f64)>,
    pub outcome: Result<KneeOutcome, String>,
}

/// Heights of the strongest deviation peak on each side of δ = 0 (fig6).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymmetryPoint {
    pub g: f64,
    /// ν_d − ν_c, GHz.
    pub detuning: f64,
    pub left: Extremum,
    pub right: Extremum,
    /// larger − smaller
    pub difference: f64,
    /// larger / smaller
    pub ratio: f64,
}

impl AsymmetryPoint {
    /// `g²/Δ`
    pub fn x(&self) -> f64 {
        self.g * self.g / self.detuning
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymmetryAnalysis {
    pub points: Vec<AsymmetryPoint>,
    pub fit: Result<AsymmetryFit, String>,
    /// Fit of `ratio − 1` against `g²/Δ`.
    pub ratio_fit: Result<PeakRatioFit, String>,
}

#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub config: ScenarioConfig,
    pub table: ResultTable,
    pub curves: Vec<Curve>,
    pub splitting: Option<Vec<Splitting>>,
    pub knee: Option<KneeAnalysis>,
    pub asymmetry: Option<AsymmetryAnalysis>,
}

/// Moves the pump onto the lower transmission peak when requested.
pub fn place_pump(params: &mut SystemParams, lock: PumpLock) -> Result<()> {
    let j_zero = match lock {
        PumpLock::None => return Ok(()),
        PumpLock::LowerPolariton => false,
        PumpLock::LowerPolaritonJ0 => true,
    };
    let mut a = AnalyticParams::from_system(params);
    a.omega_c = 0.0;
    if j_zero {
        a.j1 = 0.0;
    }
    let (_, minus) = polariton_peaks(&a)?;
    params.nu_l = params.nu_c + to_linear(minus);
    Ok(())
}

fn assign(params: &mut SystemParams, spec: &Option<SeriesSpec>, value: Option<f64>) -> Result<()> {
    if let (Some(s), Some(v)) = (spec, value) {
        params.set(&s.variable, v)?;
    }
    Ok(())
}

fn values_of(spec: &Option<SeriesSpec>) -> Vec<Option<f64>> {
    match spec {
        Some(s) => s.values.iter().copied().map(Some).collect(),
        None => vec![None],
    }
}

fn run_curve(cfg: &ScenarioConfig, outer: Option<f64>, series: Option<f64>) -> Result<Curve> {
    let mut params = cfg.params;
    assign(&mut params, &cfg.outer, outer)?;
    assign(&mut params, &cfg.series, series)?;
    let observable = cfg.observable();
    let x = cfg.sweep.grid();
    // peak offsets are measured from the bare cavity
    let (values, background, peak_offsets) = if cfg.sweep.is_probe() {
        place_pump(&mut params, cfg.pump_lock)?;
        params.validate()?;
        let shift = if cfg.sweep.variable == PROBE_OFFSET {
            params.nu_l - params.nu_c
        } else {
            0.0
        };
        let deltas: Vec<f64> = x.iter().map(|v| v - shift).collect();
        let sweep = probe_sweep(&params, &deltas, &observable, &cfg.extrema)?;
        let n = sweep.y_values.len();
        let cavity = params.nu_c - params.nu_l;
        let offsets = sweep
            .peak_positions
            .map(|v| v.into_iter().map(|w| w - cavity).collect());
        (sweep.y_values, vec![sweep.background; n], offsets)
    } else {
        let points = x
            .par_iter()
            .map(|&v| {
                let point = || -> Result<(f64, f64, Option<f64>)> {
                    let mut p = params;
                    p.set(&cfg.sweep.variable, v)?;
                    place_pump(&mut p, cfg.pump_lock)?;
                    let (y, pos) = evaluate_observable(&p, &observable)?;
                    let (b, _) = evaluate_observable(&p.with_j2(0.0), &observable)?;
                    Ok((y, b, pos.map(|w| w - (p.nu_c - p.nu_l))))
                };
                point().map_err(|e| e.at_point(&cfg.sweep.variable, v))
            })
            .collect::<Result<Vec<_>>>()?;
        let offsets = points[0]
            .2
            .map(|_| points.iter().map(|p| p.2.unwrap_or(f64::NAN)).collect());
        (
            points.iter().map(|p| p.0).collect(),
            points.iter().map(|p| p.1).collect(),
            offsets,
        )
    };
    let deviation: Vec<f64> = values.iter().zip(&background).map(|(v, b)| v - b).collect();
    let extrema = if x.len() >= 3 {
        find_extrema(&x, &deviation, &cfg.extrema)
    } else {
        Vec::new()
    };
    Ok(Curve {
        outer,
        series,
        params,
        x,
        values,
        background,
        peak_offsets,
        extrema,
    })
}

fn wrap(err: Error, spec: &Option<SeriesSpec>, value: Option<f64>) -> Error {
    match (spec, value) {
        (Some(s), Some(v)) => err.at_point(&s.variable, v),
        _ => err,
    }
}

/// Runs every curve of the scenario, the scenario's analysis, and assembles
/// the output table.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    cfg.validate()?;
    let mut curves = Vec::new();
    for o in values_of(&cfg.outer) {
        for s in values_of(&cfg.series) {
            let curve = run_curve(cfg, o, s)
                .map_err(|e| wrap(e, &cfg.series, s))
                .map_err(|e| wrap(e, &cfg.outer, o))?;
            curves.push(curve);
        }
    }

    let splitting = (cfg.scenario == ScenarioKind::Fig2).then(|| splitting_analysis(&curves));
    let knee = (cfg.scenario == ScenarioKind::Fig3).then(|| knee_analysis(&curves));
    let asymmetry = (cfg.scenario == ScenarioKind::Fig6).then(|| asymmetry_analysis(&curves));

    let mut table = build_table(cfg, &curves)?;
    for c in &curves {
        let label = c.label(cfg);
        if c.extrema.is_empty() {
            table.annotations.push(format!("extrema [{label}]: none"));
        }
        for e in &c.extrema {
            table.annotations.push(format!(
                "extrema [{label}]: {} at {} = {} deviation = {:e} prominence = {:e}",
                e.kind, cfg.sweep.variable, e.location, e.value, e.prominence
            ));
        }
    }
    if let Some(sp) = &splitting {
        for s in sp {
            table.annotations.push(match s.separation {
                Some(d) => format!("splitting [j1 = {}]: {} peaks, separation = {d}", s.j1, s.peaks),
                None => format!("splitting [j1 = {}]: {} peaks", s.j1, s.peaks),
            });
        }
    }
    if let Some(k) = &knee {
        for (j, pos) in &k.points {
            table.annotations.push(format!("knee point: j1 = {j} peak_offset = {pos}"));
        }
        table.annotations.push(match &k.outcome {
            Ok(KneeOutcome::Knee(kn)) => format!(
                "knee: j1 = {} (slopes {} -> {}, sse {:e} vs line {:e}, F = {})",
                kn.location, kn.slope_before, kn.slope_after, kn.sse, kn.sse_line, kn.f_statistic
            ),
            Ok(KneeOutcome::NoKnee { slope }) => format!("knee: none (single slope {slope})"),
            Err(e) => format!("knee: failed ({e})"),
        });
    }
    if let Some(a) = &asymmetry {
        for p in &a.points {
            table.annotations.push(format!(
                "asymmetry point: g = {} detuning = {} difference = {:e} ratio = {}",
                p.g, p.detuning, p.difference, p.ratio
            ));
        }
        table.annotations.push(match &a.fit {
            Ok(f) => format!(
                "asymmetry fit: difference = c g^2/(alpha + detuning), c = {:e}, alpha = {}, rms = {:e}, max = {:e}",
                f.c, f.alpha, f.residual, f.max_residual
            ),
            Err(e) => format!("asymmetry fit: failed ({e})"),
        });
        table.annotations.push(match &a.ratio_fit {
            Ok(f) => format!(
                "ratio fit: ratio - 1 = 2 alpha x/(1 + beta - alpha x), alpha = {}, beta = {}, rms = {:e}, max = {:e}",
                f.alpha, f.beta, f.residual, f.max_residual
            ),
            Err(e) => format!("ratio fit: failed ({e})"),
        });
    }
    Ok(ScenarioResult {
        config: cfg.clone(),
        table,
        curves,
        splitting,
        knee,
        asymmetry,
    })
}

fn build_table(cfg: &ScenarioConfig, curves: &[Curve]) -> Result<ResultTable> {
    let mut columns = Vec::new();
    if let Some(s) = &cfg.outer {
        columns.push(s.variable.clone());
    }
    if let Some(s) = &cfg.series {
        columns.push(s.variable.clone());
    }
    columns.push("nu_l".into());
    columns.push(cfg.sweep.variable.clone());
    let probe_offset = cfg.sweep.variable == PROBE_OFFSET;
    if probe_offset {
        columns.push("delta".into());
    }
    for c in ["value", "background", "deviation"] {
        columns.push(c.into());
    }
    let spectral = cfg.observable == ObservableKind::PeakNearCavity;
    if spectral {
        columns.push("peak_offset".into());
    }
    let mut table = ResultTable::new(columns);
    table.provenance.push(format!("bichromatic {}", env!("CARGO_PKG_VERSION")));
    // the destination path is left out so that identical runs give identical bytes
    for (k, v) in cfg.entries().into_iter().filter(|(k, _)| k != "output") {
        table.provenance.push(format!("config: {k} = {v}"));
    }
    table.provenance.push(format!(
        "grid: {} points over {} in [{}, {}], step {}",
        cfg.sweep.count,
        cfg.sweep.variable,
        cfg.sweep.start,
        cfg.sweep.stop,
        cfg.sweep.step()
    ));
    table.provenance.push(format!(
        "solver: hilbert dim {}, ladder depth {}, z_epsilon {:e} rad/ns",
        cfg.params.hilbert.dim(),
        cfg.params.cf.n_max,
        cfg.params.z_epsilon_angular()
    ));
    table.provenance.push(format!("observable: {}", cfg.observable().tag()));
    for c in curves {
        let dev = c.deviation();
        for k in 0..c.x.len() {
            let mut row = Vec::with_capacity(table.columns.len());
            if let Some(v) = c.outer {
                row.push(v);
            }
            if let Some(v) = c.series {
                row.push(v);
            }
            let nu_l = if cfg.sweep.is_probe() {
                c.params.nu_l
            } else {
                let mut p = c.params;
                p.set(&cfg.sweep.variable, c.x[k])?;
                place_pump(&mut p, cfg.pump_lock)?;
                p.nu_l
            };
            row.push(nu_l);
            row.push(c.x[k]);
            if probe_offset {
                row.push(c.x[k] - (c.params.nu_l - c.params.nu_c));
            }
            row.push(c.values[k]);
            row.push(c.background[k]);
            row.push(dev[k]);
            if spectral {
                row.push(c.peak_offsets.as_ref().map_or(f64::NAN, |p| p[k]));
            }
            table.push_row(row)?;
        }
    }
    Ok(table)
}

fn splitting_analysis(curves: &[Curve]) -> Vec<Splitting> {
    curves
        .iter()
        .map(|c| {
            let mut peaks = c.peaks();
            peaks.sort_by(|a, b| b.prominence.total_cmp(&a.prominence));
            let separation = (peaks.len() >= 2).then(|| (peaks[0].location - peaks[1].location).abs());
            Splitting {
                j1: c.params.j1,
                peaks: peaks.len(),
                separation,
            }
        })
        .collect()
}

fn knee_analysis(curves: &[Curve]) -> KneeAnalysis {
    let points: Vec<(f64, f64)> = curves
        .iter()
        .filter_map(|c| {
            c.peaks()
                .into_iter()
                .max_by(|a, b| a.value.total_cmp(&b.value))
                .map(|p| (c.params.j1, p.location))
        })
        .collect();
    let outcome = detect_knee(&points).map_err(|e| e.to_string());
    KneeAnalysis { points, outcome }
}

fn asymmetry_analysis(curves: &[Curve]) -> AsymmetryAnalysis {
    let mut points = Vec::new();
    for c in curves {
        let peaks = c.peaks();
        let best = |left: bool| {
            peaks
                .iter()
                .copied()
                .filter(|p| (p.location < 0.0) == left)
                .max_by(|a, b| a.value.total_cmp(&b.value))
        };
        if let (Some(l), Some(r)) = (best(true), best(false)) {
            let (hi, lo) = if l.value >= r.value { (l.value, r.value) } else { (r.value, l.value) };
            points.push(AsymmetryPoint {
                g: c.params.g,
                detuning: c.params.nu_d - c.params.nu_c,
                left: l,
                right: r,
                difference: hi - lo,
                ratio: hi / lo,
            });
        }
    }
    let fit = fit_asymmetry(&points.iter().map(|p| (p.g, p.detuning, p.difference)).collect::<Vec<_>>())
        .map_err(|e| e.to_string());
    let ratio_fit = fit_peak_ratio(&points.iter().map(|p| (p.x(), p.ratio - 1.0)).collect::<Vec<_>>())
        .map_err(|e| e.to_string());
    AsymmetryAnalysis {
        points,
        fit,
        ratio_fit,
    }
}

/// Runs the scenario and writes its CSV to `cfg.output` when set.
pub fn run_and_write(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    let result = run_scenario(cfg)?;
    if let Some(path) = &cfg.output {
        write_csv(&result.table, path)?;
    }
    Ok(result)
}
