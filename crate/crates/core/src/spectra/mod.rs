//! Cavity emission spectra, steady-state observables and probe sweeps.
//!
//! Frequencies handed to and returned by this module are angular (rad/ns)
//! when they belong to a [`Spectrum`] and linear GHz when they are probe
//! detunings of a sweep, matching what the caller varies.

mod extrema;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::floquet::{cf_ladders, rho0_laplace, steady_state_with, SteadyState};
use crate::linalg::C64;
use crate::liouvillian::{build_liouvillians, vectorize, DensityVector, Liouvillians};
use crate::ops::Operator;
use crate::optimize::brent_max;
use crate::params::SystemParams;

pub use extrema::{find_extrema, ExtremaOptions, Extremum, ExtremumKind};

/// Negative spectral values larger than this (relative to the maximum) are
/// flagged as numerical trouble.
const NEGATIVE_TOLERANCE: f64 = 1e-10;

/// Cavity emission spectrum on a grid of angular frequencies measured from
/// the pump.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub omega: Vec<f64>,
    pub values: Vec<f64>,
    pub params: SystemParams,
    /// Angular regularization used in `z = z_epsilon + iω`.
    pub z_epsilon: f64,
    /// Set when some value is more negative than the noise tolerance.
    pub negative: bool,
    pub extrema: Vec<Extremum>,
}

/// Evaluates `S(ω) = Re tr{a† M₀(z_ε + iω)}` with `M(0) = aρ_ss` for one
/// parameter set, reusing the Liouvillians and steady state.
pub struct SpectrumEvaluator {
    liouvillians: Liouvillians,
    steady: SteadyState,
    initial: DensityVector,
    a_dag: Operator,
    delta: f64,
    n_max: usize,
    z_epsilon: f64,
}

impl SpectrumEvaluator {
    pub fn new(params: &SystemParams) -> Result<Self> {
        let liouvillians = build_liouvillians(params)?;
        let steady = steady_state_with(&liouvillians, params)?;
        let rho = steady.rho()?;
        let a = liouvillians.ops.a.clone();
        let initial = vectorize(&(&a * &rho));
        Ok(SpectrumEvaluator {
            a_dag: a.adjoint(),
            initial,
            steady,
            delta: params.angular().delta,
            n_max: params.cf.n_max,
            z_epsilon: params.z_epsilon_angular(),
            liouvillians,
        })
    }

    pub fn steady_state(&self) -> &SteadyState {
        &self.steady
    }

    pub fn z_epsilon(&self) -> f64 {
        self.z_epsilon
    }

    /// S(ω) at angular frequency `omega` relative to the pump.
    pub fn eval(&self, omega: f64) -> Result<f64> {
        let l = &self.liouvillians;
        let z = C64::new(self.z_epsilon, omega);
        let ladders = cf_ladders(&l.l0, &l.lplus, &l.lminus, z, self.delta, self.n_max)?;
        let m0 = rho0_laplace(z, &self.initial, &ladders, &l.l0)?;
        Ok(m0.expectation(&self.a_dag).re)
    }
}

/// Emission spectrum on `omega_grid` (angular, strictly increasing).
pub fn emission_spectrum(params: &SystemParams, omega_grid: &[f64]) -> Result<Spectrum> {
    check_grid(omega_grid, "omega_grid")?;
    let eval = SpectrumEvaluator::new(params)?;
    let values = omega_grid
        .par_iter()
        .map(|&w| eval.eval(w).map_err(|e| e.at_point("omega", w)))
        .collect::<Result<Vec<f64>>>()?;
    let top = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let negative = values.iter().any(|&v| v < -NEGATIVE_TOLERANCE * top.max(f64::MIN_POSITIVE));
    let extrema = find_extrema(omega_grid, &values, &Default::default());
    Ok(Spectrum {
        omega: omega_grid.to_vec(),
        values,
        params: *params,
        z_epsilon: eval.z_epsilon,
        negative,
        extrema,
    })
}

fn check_grid(grid: &[f64], field: &'static str) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter {
            field,
            reason: "grid is empty".into(),
        });
    }
    if grid.iter().any(|v| !v.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter {
            field,
            reason: "grid must be finite and strictly increasing".into(),
        });
    }
    Ok(())
}

/// Time-averaged ⟨a†a⟩.
pub fn cavity_intensity(params: &SystemParams) -> Result<f64> {
    let l = build_liouvillians(params)?;
    let ss = steady_state_with(&l, params)?;
    Ok(ss.expectation(&l.ops.photon_number()))
}

/// Time-averaged ⟨σ†σ⟩.
pub fn excited_population(params: &SystemParams) -> Result<f64> {
    let l = build_liouvillians(params)?;
    let ss = steady_state_with(&l, params)?;
    Ok(ss.expectation(&l.ops.excited_projector()))
}

/// How the emission maximum next to the bare cavity frequency is located.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakSearch {
    /// Half-width of the window around Δ_c, in units of κ.
    pub window_kappas: f64,
    /// Samples in the coarse scan of the window.
    pub coarse_points: usize,
    /// Final bracket width of the refinement, linear GHz.
    pub xtol: f64,
}

impl Default for PeakSearch {
    fn default() -> Self {
        PeakSearch {
            window_kappas: 3.0,
            coarse_points: 601,
            xtol: 1e-6,
        }
    }
}

impl PeakSearch {
    pub fn validate(&self) -> Result<()> {
        if !(self.window_kappas > 0.0 && self.window_kappas.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "peak_window",
                reason: format!("must be positive, got {}", self.window_kappas),
            });
        }
        if self.coarse_points < 3 {
            return Err(Error::InvalidParameter {
                field: "peak_points",
                reason: format!("need at least 3 points, got {}", self.coarse_points),
            });
        }
        if !(self.xtol > 0.0 && self.xtol.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "peak_xtol",
                reason: format!("must be positive, got {}", self.xtol),
            });
        }
        Ok(())
    }
}

/// Location (angular, relative to the pump) and height of a spectral peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPeak {
    pub omega: f64,
    pub value: f64,
}

/// The local maximum of the emission spectrum nearest Δ_c within
/// `Δ_c ± window_kappas·κ`, refined with Brent's method.
pub fn spectrum_peak_near_cavity(params: &SystemParams, search: &PeakSearch) -> Result<SpectralPeak> {
    let eval = SpectrumEvaluator::new(params)?;
    peak_near_cavity(&eval, params, search, None)
}

/// With `hint = Some((ω, half_width))` only `[ω − half_width, ω + half_width]`
/// is searched first; the full window is scanned if the maximum lands on the
/// edge of that bracket.
fn peak_near_cavity(
    eval: &SpectrumEvaluator,
    params: &SystemParams,
    search: &PeakSearch,
    hint: Option<(f64, f64)>,
) -> Result<SpectralPeak> {
    search.validate()?;
    let w = params.angular();
    let xtol = crate::params::to_angular(search.xtol);
    if let Some((center, half)) = hint {
        let m = brent_max(|x| eval.eval(x), center - half, center + half, xtol, 200)?;
        let edge = (m.x - (center - half)).min(center + half - m.x);
        if edge > 2.0 * xtol {
            return Ok(SpectralPeak {
                omega: m.x,
                value: m.value,
            });
        }
    }
    let half = search.window_kappas * w.kappa.max(w.gamma);
    let n = search.coarse_points;
    let grid: Vec<f64> = (0..n)
        .map(|k| w.delta_c - half + 2.0 * half * k as f64 / (n - 1) as f64)
        .collect();
    let values = grid.iter().map(|&x| eval.eval(x)).collect::<Result<Vec<f64>>>()?;
    let step = grid[1] - grid[0];
    let peaks: Vec<usize> = (1..n - 1)
        .filter(|&k| values[k] >= values[k - 1] && values[k] > values[k + 1])
        .collect();
    let best = peaks
        .iter()
        .copied()
        .min_by(|&a, &b| (grid[a] - w.delta_c).abs().total_cmp(&(grid[b] - w.delta_c).abs()));
    let k = match best {
        Some(k) => k,
        // no interior maximum: take the largest sample
        None => {
            let k = (0..n).max_by(|&a, &b| values[a].total_cmp(&values[b])).expect("n >= 3");
            return Ok(SpectralPeak {
                omega: grid[k],
                value: values[k],
            });
        }
    };
    let m = brent_max(|x| eval.eval(x), grid[k] - step, grid[k] + step, xtol, 200)?;
    Ok(SpectralPeak {
        omega: m.x,
        value: m.value,
    })
}

/// Quantity recorded at each probe detuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observable {
    /// ⟨a†a⟩
    Intensity,
    /// ⟨σ†σ⟩
    ExcitedPopulation,
    /// Height of the emission peak next to the bare cavity frequency.
    SpectrumPeakNearCavity(PeakSearch),
}

impl Observable {
    pub fn tag(&self) -> &'static str {
        match self {
            Observable::Intensity => "intensity",
            Observable::ExcitedPopulation => "excited-population",
            Observable::SpectrumPeakNearCavity(_) => "peak-height",
        }
    }
}

/// Observable versus probe detuning.
#[derive(Debug, Clone)]
pub struct SweepResult {
    /// Probe detunings δ, linear GHz.
    pub x_grid: Vec<f64>,
    pub y_values: Vec<f64>,
    /// Value without the probe (J₂ = 0).
    pub background: f64,
    pub observable_tag: &'static str,
    /// Peak positions (linear GHz from the pump) for spectral observables.
    pub peak_positions: Option<Vec<f64>>,
    pub background_peak_position: Option<f64>,
    /// Extrema of the deviation `y − background`.
    pub extrema: Vec<Extremum>,
}

impl SweepResult {
    pub fn deviation(&self) -> Vec<f64> {
        self.y_values.iter().map(|y| y - self.background).collect()
    }

    pub fn peaks(&self) -> impl Iterator<Item = &Extremum> {
        self.extrema.iter().filter(|e| e.kind == ExtremumKind::Peak)
    }

    pub fn dips(&self) -> impl Iterator<Item = &Extremum> {
        self.extrema.iter().filter(|e| e.kind == ExtremumKind::Dip)
    }
}

/// Value of `observable` at one parameter set, plus the spectral peak
/// position where applicable (linear GHz).
pub fn evaluate_observable(params: &SystemParams, observable: &Observable) -> Result<(f64, Option<f64>)> {
    evaluate_with_hint(params, observable, None)
}

fn evaluate_with_hint(
    params: &SystemParams,
    observable: &Observable,
    hint: Option<(f64, f64)>,
) -> Result<(f64, Option<f64>)> {
    match observable {
        Observable::Intensity => Ok((cavity_intensity(params)?, None)),
        Observable::ExcitedPopulation => Ok((excited_population(params)?, None)),
        Observable::SpectrumPeakNearCavity(search) => {
            let eval = SpectrumEvaluator::new(params)?;
            let peak = peak_near_cavity(&eval, params, search, hint)?;
            Ok((peak.value, Some(crate::params::to_linear(peak.omega))))
        }
    }
}

/// Evaluates `observable` at each probe detuning in `deltas` (linear GHz).
/// Points run in parallel on the current rayon pool; the result is
/// independent of the pool size.
pub fn probe_sweep(
    params: &SystemParams,
    deltas: &[f64],
    observable: &Observable,
    extrema: &ExtremaOptions,
) -> Result<SweepResult> {
    check_grid(deltas, "probe grid")?;
    params.validate()?;
    let unprobed = params.with_j2(0.0);
    let (background, background_peak) = evaluate_observable(&unprobed, observable)?;
    // every point starts its peak search from the unprobed peak, so the
    // outcome does not depend on evaluation order
    let hint = match (observable, background_peak) {
        (Observable::SpectrumPeakNearCavity(search), Some(pos)) => {
            let w = params.angular();
            let step = 2.0 * search.window_kappas * w.kappa.max(w.gamma) / (search.coarse_points - 1) as f64;
            Some((crate::params::to_angular(pos), 2.0 * step))
        }
        _ => None,
    };
    let points = deltas
        .par_iter()
        .map(|&d| {
            evaluate_with_hint(&params.with_delta(d), observable, hint).map_err(|e| e.at_point("delta", d))
        })
        .collect::<Result<Vec<_>>>()?;
    let y_values: Vec<f64> = points.iter().map(|p| p.0).collect();
    let peak_positions = background_peak.map(|_| points.iter().map(|p| p.1.unwrap_or(f64::NAN)).collect());
    let deviation: Vec<f64> = y_values.iter().map(|y| y - background).collect();
    let extrema = if deltas.len() >= 3 {
        find_extrema(deltas, &deviation, extrema)
    } else {
        Vec::new()
    };
    Ok(SweepResult {
        x_grid: deltas.to_vec(),
        y_values,
        background,
        observable_tag: observable.tag(),
        peak_positions,
        background_peak_position: background_peak,
        extrema,
    })
}
