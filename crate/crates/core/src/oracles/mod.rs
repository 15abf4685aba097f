//! Closed-form results for the coupled and bare emitter, used to validate
//! the solver and to place the pump.

mod fit;

use crate::error::{Error, Result};
use crate::params::{to_angular, SystemParams};

pub use fit::{fit_asymmetry, fit_peak_ratio, AsymmetryFit, PeakRatioFit};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;

/// Inputs of the closed-form expressions, angular units (rad/ns).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticParams {
    pub g: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub gamma_d: f64,
    pub j1: f64,
    pub j2: f64,
    /// ω_d − ω_c
    pub delta_qd_cavity: f64,
    /// Cavity frequency in whatever frame the caller wants peaks reported.
    pub omega_c: f64,
    /// Kelvin.
    pub temperature: f64,
}

impl Default for AnalyticParams {
    fn default() -> Self {
        AnalyticParams::from_system(&SystemParams::default())
    }
}

impl AnalyticParams {
    /// Takes rates and drives from `p`; ω_c is measured from the pump.
    pub fn from_system(p: &SystemParams) -> Self {
        let w = p.angular();
        AnalyticParams {
            g: w.g,
            kappa: w.kappa,
            gamma: w.gamma,
            gamma_d: w.gamma_d,
            j1: w.j1,
            j2: w.j2,
            delta_qd_cavity: to_angular(p.nu_d - p.nu_c),
            omega_c: w.delta_c,
            temperature: 10.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("g", self.g),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("gamma_d", self.gamma_d),
            ("j1", self.j1),
            ("j2", self.j2),
            ("delta_qd_cavity", self.delta_qd_cavity),
            ("omega_c", self.omega_c),
            ("temperature", self.temperature),
        ];
        for (field, v) in fields {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    field,
                    reason: format!("must be finite, got {v}"),
                });
            }
        }
        for (field, v) in [
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("gamma_d", self.gamma_d),
            ("j2", self.j2),
        ] {
            if v < 0.0 {
                return Err(Error::InvalidParameter {
                    field,
                    reason: format!("must be non-negative, got {v}"),
                });
            }
        }
        Ok(())
    }
}

/// Upper and lower Jaynes–Cummings eigenvalues of the `n`-excitation
/// manifold, `nω_c + ½(Δ ± √(4g²n + Δ²))`.
pub fn jc_eigenvalues(n: u32, p: &AnalyticParams) -> Result<(f64, f64)> {
    if n < 1 {
        return Err(Error::InvalidParameter {
            field: "n",
            reason: "manifold index must be at least 1".into(),
        });
    }
    let d = p.delta_qd_cavity;
    let root = (4.0 * p.g * p.g * n as f64 + d * d).sqrt();
    let base = n as f64 * p.omega_c;
    Ok((base + 0.5 * (d + root), base + 0.5 * (d - root)))
}

/// Weak-drive cavity transmission (unnormalized) at `omega`, the drive
/// frequency measured from the cavity, with drive strength `J = j1`.
pub fn transmission_analytic(omega: f64, p: &AnalyticParams) -> f64 {
    let (g, j, k, gm, d) = (p.g, p.j1, p.kappa, p.gamma, p.delta_qd_cavity);
    let dw = d - omega;
    let lorentz = gm * gm + dw * dw;
    let num = j * j * lorentz;
    let den = g.powi(4) + 2.0 * g * g * (0.5 * j * j + gm * k + dw * omega) + lorentz * (j * j + k * k + omega * omega);
    num / den
}

/// Transmission maxima `ω± = ω_c ± √(√(g²(g² + J²) + 2g²γ(γ + κ)) − γ²)`
/// for a resonant dot, evaluated at `J = j1`. Returns `(ω₊, ω₋)`.
pub fn polariton_peaks(p: &AnalyticParams) -> Result<(f64, f64)> {
    let (g, j, k, gm) = (p.g, p.j1, p.kappa, p.gamma);
    let radicand = (g * g * (g * g + j * j) + 2.0 * g * g * gm * (gm + k)).sqrt() - gm * gm;
    if !(radicand >= 0.0) {
        return Err(Error::NoSplitting { radicand });
    }
    let s = radicand.sqrt();
    Ok((p.omega_c + s, p.omega_c - s))
}

/// Excited-state population of a bare dot under pump `J₁` and probe `J₂`
/// detuned by `delta`, to second order in `J₂`.
pub fn rho_ee_second_order(delta: f64, p: &AnalyticParams) -> f64 {
    let (j1, j2, gm, gd) = (p.j1, p.j2, p.gamma, p.gamma_d);
    let gt = gm + gd;
    let a = 2.0 * j1 * j1 + gm * gt;
    let d2 = delta * delta;
    let j1sq = j1 * j1;
    let num = 8.0 * j1sq * j1sq * gt * (-2.0 * gt * gt - 3.0 * d2)
        + gt.powi(3) * (4.0 * gm * gm + d2) * (gt * gt + d2)
        + 4.0 * j1sq * d2 * (-3.0 * gm * gt * gt + gd * d2);
    let den = a * a * (gt * gt + d2) * (4.0 * a * a + (-8.0 * j1sq + 5.0 * gm * gm + 2.0 * gm * gd + gd * gd) * d2 + d2 * d2);
    unprobed_rho_ee(p) + gm * j2 * j2 * num / den
}

/// `J₁² / (2J₁² + γ(γ + γ_d))`
pub fn unprobed_rho_ee(p: &AnalyticParams) -> f64 {
    let j1sq = p.j1 * p.j1;
    j1sq / (2.0 * j1sq + p.gamma * (p.gamma + p.gamma_d))
}

/// Bose–Einstein occupation of phonons at angular frequency `detuning`
/// (rad/ns) and temperature `temperature` (K).
pub fn phonon_occupation(detuning: f64, temperature: f64) -> Result<f64> {
    if detuning == 0.0 {
        return Err(Error::ZeroDetuning);
    }
    if !(temperature > 0.0) || !detuning.is_finite() || !temperature.is_finite() {
        return Err(Error::InvalidParameter {
            field: "temperature",
            reason: format!("need a positive temperature and finite detuning, got T = {temperature}"),
        });
    }
    // rad/ns -> rad/s
    let x = HBAR * detuning.abs() * 1e9 / (K_B * temperature);
    Ok(1.0 / x.exp_m1())
}
