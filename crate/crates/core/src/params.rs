//! Physical parameters of one simulation.
//!
//! Every frequency and rate stored here is a *linear* frequency in GHz, i.e.
//! the value of `X/2π`. [`SystemParams::angular`] converts to angular units
//! (rad/ns) once, and all internal computation works with those.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::floquet::CfConfig;

/// Converts a linear frequency in GHz to an angular frequency in rad/ns.
#[inline]
pub fn to_angular(ghz: f64) -> f64 {
    TAU * ghz
}

/// Converts an angular frequency in rad/ns to a linear frequency in GHz.
#[inline]
pub fn to_linear(rad_per_ns: f64) -> f64 {
    rad_per_ns / TAU
}

/// Which subsystem the pump and probe lasers couple to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DriveTarget {
    Cavity,
    Qd,
}

impl fmt::Display for DriveTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DriveTarget::Cavity => f.write_str("cavity"),
            DriveTarget::Qd => f.write_str("qd"),
        }
    }
}

impl FromStr for DriveTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cavity" => Ok(DriveTarget::Cavity),
            "qd" | "dot" => Ok(DriveTarget::Qd),
            other => Err(Error::InvalidParameter {
                field: "drive_target",
                reason: format!("expected `cavity` or `qd`, got `{other}`"),
            }),
        }
    }
}

/// Truncated Hilbert space: a two-level emitter tensored with `fock_levels`
/// photon number states `|0>, ..., |fock_levels - 1>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HilbertConfig {
    pub fock_levels: usize,
}

impl HilbertConfig {
    pub const QD_LEVELS: usize = 2;

    pub fn new(fock_levels: usize) -> Result<Self> {
        let cfg = HilbertConfig { fock_levels };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.fock_levels < 2 {
            return Err(Error::InvalidDimension(format!(
                "fock_levels must be at least 2, got {}",
                self.fock_levels
            )));
        }
        Ok(())
    }

    /// Dimension of the full QD ⊗ field space.
    pub fn dim(&self) -> usize {
        Self::QD_LEVELS * self.fock_levels
    }
}

impl Default for HilbertConfig {
    fn default() -> Self {
        HilbertConfig { fock_levels: 3 }
    }
}

/// All inputs of one simulation, in linear GHz.
///
/// `nu_c`, `nu_d` and `nu_l` are the cavity, dot and pump frequencies; only
/// their differences matter. `delta` is the probe detuning from the pump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub nu_c: f64,
    pub nu_d: f64,
    pub nu_l: f64,
    pub g: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub gamma_d: f64,
    pub gamma_r: f64,
    pub j1: f64,
    pub j2: f64,
    pub delta: f64,
    pub drive_target: DriveTarget,
    pub hilbert: HilbertConfig,
    pub cf: CfConfig,
}

impl Default for SystemParams {
    /// Resonant dot and cavity with the rates of the strongly coupled
    /// photonic-crystal device (g = 30, κ = 3, γ = γ_d = 1 GHz), undriven.
    fn default() -> Self {
        SystemParams {
            nu_c: 0.0,
            nu_d: 0.0,
            nu_l: 0.0,
            g: 30.0,
            kappa: 3.0,
            gamma: 1.0,
            gamma_d: 1.0,
            gamma_r: 0.0,
            j1: 0.0,
            j2: 0.0,
            delta: 0.0,
            drive_target: DriveTarget::Cavity,
            hilbert: HilbertConfig::default(),
            cf: CfConfig::default(),
        }
    }
}

/// Angular-unit (rad/ns) view of [`SystemParams`], in the frame rotating at
/// the pump frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularParams {
    /// ω_c − ω_l
    pub delta_c: f64,
    /// ω_d − ω_l
    pub delta_d: f64,
    pub g: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub gamma_d: f64,
    pub gamma_r: f64,
    pub j1: f64,
    pub j2: f64,
    /// probe − pump
    pub delta: f64,
}

/// Names of the numeric fields reachable through [`SystemParams::get`] and
/// [`SystemParams::set`], in documentation order.
pub const NUMERIC_KEYS: &[&str] = &[
    "nu_c",
    "nu_d",
    "nu_l",
    "g",
    "kappa",
    "gamma",
    "gamma_d",
    "gamma_r",
    "j1",
    "j2",
    "delta",
    "fock_levels",
    "n_max",
    "conv_tol",
    "z_epsilon",
];

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let all = [
            ("nu_c", self.nu_c),
            ("nu_d", self.nu_d),
            ("nu_l", self.nu_l),
            ("g", self.g),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("gamma_d", self.gamma_d),
            ("gamma_r", self.gamma_r),
            ("j1", self.j1),
            ("j2", self.j2),
            ("delta", self.delta),
        ];
        for (field, v) in all {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    field,
                    reason: format!("must be finite, got {v}"),
                });
            }
        }
        let rates = [
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("gamma_d", self.gamma_d),
            ("gamma_r", self.gamma_r),
            ("j2", self.j2),
        ];
        for (field, v) in rates {
            if v < 0.0 {
                return Err(Error::InvalidParameter {
                    field,
                    reason: format!("must be non-negative, got {v}"),
                });
            }
        }
        if self.kappa <= 0.0 && self.gamma <= 0.0 {
            return Err(Error::InvalidParameter {
                field: "kappa",
                reason: "at least one of kappa and gamma must be positive".into(),
            });
        }
        self.hilbert.validate()?;
        self.cf.validate()?;
        Ok(())
    }

    pub fn angular(&self) -> AngularParams {
        AngularParams {
            delta_c: to_angular(self.nu_c - self.nu_l),
            delta_d: to_angular(self.nu_d - self.nu_l),
            g: to_angular(self.g),
            kappa: to_angular(self.kappa),
            gamma: to_angular(self.gamma),
            gamma_d: to_angular(self.gamma_d),
            gamma_r: to_angular(self.gamma_r),
            j1: to_angular(self.j1),
            j2: to_angular(self.j2),
            delta: to_angular(self.delta),
        }
    }

    /// Regularization added to Re z in spectral resolvents, rad/ns.
    pub fn z_epsilon_angular(&self) -> f64 {
        match self.cf.z_epsilon {
            Some(eps) => to_angular(eps),
            None => {
                let scale = if self.kappa > 0.0 { self.kappa } else { self.gamma };
                1e-6 * to_angular(scale)
            }
        }
    }

    /// Probe frequency relative to the cavity, in GHz.
    pub fn probe_offset(&self) -> f64 {
        self.nu_l + self.delta - self.nu_c
    }

    pub fn with_j2(mut self, j2: f64) -> Self {
        self.j2 = j2;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    /// Reads a numeric field by name.
    pub fn get(&self, key: &str) -> Option<f64> {
        Some(match key {
            "nu_c" => self.nu_c,
            "nu_d" => self.nu_d,
            "nu_l" => self.nu_l,
            "g" => self.g,
            "kappa" => self.kappa,
            "gamma" => self.gamma,
            "gamma_d" => self.gamma_d,
            "gamma_r" => self.gamma_r,
            "j1" => self.j1,
            "j2" => self.j2,
            "delta" => self.delta,
            "fock_levels" => self.hilbert.fock_levels as f64,
            "n_max" => self.cf.n_max as f64,
            "conv_tol" => self.cf.conv_tol,
            "z_epsilon" => self.cf.z_epsilon.unwrap_or(f64::NAN),
            _ => return None,
        })
    }

    /// Writes a numeric field by name. Integer fields must receive integral
    /// values.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let integral = |field: &'static str| -> Result<usize> {
            if value.fract() != 0.0 || value < 0.0 || !value.is_finite() {
                return Err(Error::InvalidParameter {
                    field,
                    reason: format!("must be a non-negative integer, got {value}"),
                });
            }
            Ok(value as usize)
        };
        match key {
            "nu_c" => self.nu_c = value,
            "nu_d" => self.nu_d = value,
            "nu_l" => self.nu_l = value,
            "g" => self.g = value,
            "kappa" => self.kappa = value,
            "gamma" => self.gamma = value,
            "gamma_d" => self.gamma_d = value,
            "gamma_r" => self.gamma_r = value,
            "j1" => self.j1 = value,
            "j2" => self.j2 = value,
            "delta" => self.delta = value,
            "fock_levels" => self.hilbert.fock_levels = integral("fock_levels")?,
            "n_max" => self.cf.n_max = integral("n_max")?,
            "conv_tol" => self.cf.conv_tol = value,
            "z_epsilon" => self.cf.z_epsilon = Some(value),
            other => return Err(Error::UnknownKey(other.to_string())),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angular_conversion_is_two_pi() {
        let p = SystemParams {
            g: 30.0,
            nu_c: 1.0,
            nu_l: -0.5,
            ..Default::default()
        };
        let a = p.angular();
        assert!((a.g - TAU * 30.0).abs() < 1e-12);
        assert!((a.delta_c - TAU * 1.5).abs() < 1e-12);
        assert!((to_linear(a.g) - 30.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_negative_rates_and_no_dissipation() {
        let mut p = SystemParams::default();
        p.gamma_d = -1.0;
        assert!(matches!(
            p.validate(),
            Err(Error::InvalidParameter { field: "gamma_d", .. })
        ));
        let p = SystemParams {
            kappa: 0.0,
            gamma: 0.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = SystemParams {
            hilbert: HilbertConfig { fock_levels: 1 },
            ..Default::default()
        };
        assert!(matches!(p.validate(), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn get_set_cover_every_key() {
        let mut p = SystemParams::default();
        for (i, key) in NUMERIC_KEYS.iter().enumerate() {
            let v = (i + 2) as f64;
            p.set(key, v).unwrap();
            assert_eq!(p.get(key), Some(v), "{key}");
        }
        assert!(matches!(p.set("bogus", 1.0), Err(Error::UnknownKey(_))));
        assert!(p.set("fock_levels", 2.5).is_err());
    }

    #[test]
    fn drive_target_parses() {
        assert_eq!("QD".parse::<DriveTarget>().unwrap(), DriveTarget::Qd);
        assert_eq!("cavity".parse::<DriveTarget>().unwrap(), DriveTarget::Cavity);
        assert!("laser".parse::<DriveTarget>().is_err());
    }
}
