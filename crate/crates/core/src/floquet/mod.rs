//! Continued-fraction solution of the probe-modulated master equation.
//!
//! With `ρ(t) = Σₙ ρₙ(t) e^{inδt}` the Laplace-transformed harmonics obey
//!
//! (z + inδ) ρₙ(z) − ρ(0) δₙ₀ = L₀ρₙ + L₊ρₙ₋₁ + L₋ρₙ₊₁.
//!
//! Eliminating `ρₙ = Sₙρₙ₋₁` for `n > 0` and `ρₙ = Tₙρₙ₊₁` for `n < 0` gives
//!
//! Sₙ = −[L₀ − (z + inδ) + L₋Sₙ₊₁]⁻¹ L₊,
//! Tₙ = −[L₀ − (z + inδ) + L₊Tₙ₋₁]⁻¹ L₋,
//!
//! started from `S_{n_max+1} = T_{−n_max−1} = 0`, and finally
//!
//! ρ₀(z) = −[L₀ − z + L₋S₁ + L₊T₋₁]⁻¹ ρ(0).

pub mod time_domain;

use faer::{Col, Mat};

use crate::error::{Error, Result};
use crate::linalg::{self, Lu, C64, ZERO};
use crate::liouvillian::{build_liouvillians, unvectorize, DensityVector, Liouvillians, Superoperator};
use crate::ops::Operator;
use crate::params::SystemParams;

pub use time_domain::{time_domain_integrate, time_averaged, TimeAverage, TimeDomainOptions, Trajectory};

/// Continued-fraction truncation and regularization settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfConfig {
    /// Deepest harmonic kept; `S_{n_max+1}` and `T_{−n_max−1}` are zero.
    pub n_max: usize,
    /// Tolerance for ladder self-convergence checks.
    pub conv_tol: f64,
    /// Real part added to spectral Laplace variables, linear GHz. `None`
    /// means 1e-6 κ (or 1e-6 γ for a lossless cavity).
    pub z_epsilon: Option<f64>,
}

impl Default for CfConfig {
    fn default() -> Self {
        CfConfig {
            n_max: 3,
            conv_tol: 1e-10,
            z_epsilon: None,
        }
    }
}

impl CfConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_max < 1 {
            return Err(Error::InvalidParameter {
                field: "n_max",
                reason: "must be at least 1".into(),
            });
        }
        if !(self.conv_tol > 0.0 && self.conv_tol.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "conv_tol",
                reason: format!("must be positive, got {}", self.conv_tol),
            });
        }
        if let Some(eps) = self.z_epsilon {
            if !(eps >= 0.0 && eps.is_finite()) {
                return Err(Error::InvalidParameter {
                    field: "z_epsilon",
                    reason: format!("must be non-negative, got {eps}"),
                });
            }
        }
        Ok(())
    }
}

/// The continued-fraction ladders at one Laplace variable.
#[derive(Clone, Debug)]
pub struct Ladders {
    /// `S₁, S₂, ..., S_{n_max}`
    pub s: Vec<Superoperator>,
    /// `T₋₁, T₋₂, ..., T_{−n_max}`
    pub t: Vec<Superoperator>,
    /// `L₋S₁ + L₊T₋₁`, the effective correction to L₀.
    pub correction: Superoperator,
}

impl Ladders {
    pub fn s1(&self) -> &Superoperator {
        &self.s[0]
    }

    pub fn t_minus1(&self) -> &Superoperator {
        &self.t[0]
    }

    pub fn n_max(&self) -> usize {
        self.s.len()
    }
}

/// Builds the `S` and `T` ladders at Laplace variable `z` for probe detuning
/// `delta` (both angular). Each rung is an LU solve.
pub fn cf_ladders(
    l0: &Superoperator,
    lplus: &Superoperator,
    lminus: &Superoperator,
    z: C64,
    delta: f64,
    n_max: usize,
) -> Result<Ladders> {
    if n_max < 1 {
        return Err(Error::InvalidParameter {
            field: "n_max",
            reason: "must be at least 1".into(),
        });
    }
    let size = l0.size();
    if lplus.max_abs() == 0.0 && lminus.max_abs() == 0.0 {
        let zero = Superoperator::zeros(size);
        return Ok(Ladders {
            s: vec![zero.clone(); n_max],
            t: vec![zero.clone(); n_max],
            correction: zero,
        });
    }

    let mut s = vec![Superoperator::zeros(size); n_max];
    let mut t = vec![Superoperator::zeros(size); n_max];
    // `tail` carries L₋S_{n+1} (or L₊T_{n−1}) between rungs
    let mut tail: Option<Mat<C64>> = None;
    for n in (1..=n_max).rev() {
        let shift = z + C64::new(0.0, n as f64 * delta);
        let sn = rung(l0, tail.as_ref(), shift, lplus, n as i32)?;
        tail = Some(&lminus.as_mat() * &sn);
        s[n - 1] = Superoperator::from_matrix(sn)?;
    }
    let ls1 = tail.take().expect("n_max >= 1");
    for n in (1..=n_max).rev() {
        let shift = z - C64::new(0.0, n as f64 * delta);
        let tn = rung(l0, tail.as_ref(), shift, lminus, -(n as i32))?;
        tail = Some(&lplus.as_mat() * &tn);
        t[n - 1] = Superoperator::from_matrix(tn)?;
    }
    let lt1 = tail.expect("n_max >= 1");
    Ok(Ladders {
        s,
        t,
        correction: Superoperator::from_matrix(&ls1 + &lt1)?,
    })
}

/// `−[L₀ − shift + tail]⁻¹ rhs`
fn rung(
    l0: &Superoperator,
    tail: Option<&Mat<C64>>,
    shift: C64,
    rhs: &Superoperator,
    n: i32,
) -> Result<Mat<C64>> {
    let mut m = l0.as_mat().to_owned();
    if let Some(tail) = tail {
        m += tail;
    }
    linalg::shift_diagonal(&mut m, shift);
    let lu = Lu::new(m.as_ref()).ok_or(Error::SingularResolvent { rung: n })?;
    let mut x = lu.solve_mat(rhs.as_mat());
    x *= faer::Scale(-C64::new(1.0, 0.0));
    Ok(x)
}

/// Laplace transform of the zeroth harmonic for initial condition `initial`:
/// ρ₀(z) = −[L₀ − z + L₋S₁ + L₊T₋₁]⁻¹ ρ(0).
pub fn rho0_laplace(
    z: C64,
    initial: &DensityVector,
    ladders: &Ladders,
    l0: &Superoperator,
) -> Result<DensityVector> {
    if initial.len() != l0.size() {
        return Err(Error::DimensionMismatch {
            expected: l0.size(),
            actual: initial.len(),
        });
    }
    let mut m = (l0 + &ladders.correction).as_mat().to_owned();
    linalg::shift_diagonal(&mut m, z);
    let lu = Lu::new(m.as_ref()).ok_or(Error::SingularSystem { re: z.re, im: z.im })?;
    let x = lu.solve_col(&initial.entries);
    Ok(DensityVector {
        entries: Col::from_fn(x.nrows(), |k| -x[k]),
        dim: initial.dim,
    })
}

/// Fourier harmonics `ρₙ`, `n ∈ [−n_max, n_max]`, of the periodic steady state.
#[derive(Clone, Debug)]
pub struct FloquetHarmonics {
    n_max: usize,
    /// index `n + n_max`
    harmonics: Vec<DensityVector>,
}

impl FloquetHarmonics {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn get(&self, n: i32) -> Option<&DensityVector> {
        let idx = n + self.n_max as i32;
        if idx < 0 {
            return None;
        }
        self.harmonics.get(idx as usize)
    }

    pub fn rho0(&self) -> &DensityVector {
        &self.harmonics[self.n_max]
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, &DensityVector)> {
        let n_max = self.n_max as i32;
        self.harmonics
            .iter()
            .enumerate()
            .map(move |(k, v)| (k as i32 - n_max, v))
    }
}

/// Periodic steady state of the probed system.
#[derive(Clone, Debug)]
pub struct SteadyState {
    pub harmonics: FloquetHarmonics,
    /// ρ₀ − tr(ρ₁)ρ₋₁ − tr(ρ₋₁)ρ₁
    pub time_averaged: DensityVector,
    /// Laplace variable used for the ladders (0 unless δ ≈ 0).
    pub z: C64,
    /// Smallest and second-smallest singular values of the reduced generator.
    pub singular_values: (f64, f64),
}

impl SteadyState {
    pub fn rho(&self) -> Result<Operator> {
        unvectorize(&self.time_averaged)
    }

    pub fn expectation(&self, op: &Operator) -> f64 {
        self.time_averaged.expectation(op).re
    }
}

/// Relative separation below which the two smallest singular values are
/// treated as a degenerate nullspace.
const DEGENERACY_RATIO: f64 = 1e-8;

pub fn steady_state(params: &SystemParams) -> Result<SteadyState> {
    let l = build_liouvillians(params)?;
    steady_state_with(&l, params)
}

/// Same as [`steady_state`] for already assembled Liouvillians.
pub fn steady_state_with(l: &Liouvillians, params: &SystemParams) -> Result<SteadyState> {
    let delta = params.angular().delta;
    let n_max = params.cf.n_max;
    let eps = params.z_epsilon_angular();
    // At δ → 0 every rung touches the zero mode of L₀; approach along Re z.
    let z = if delta.abs() <= eps.max(f64::MIN_POSITIVE) {
        C64::new(eps.max(1e-12), 0.0)
    } else {
        ZERO
    };
    let ladders = cf_ladders(&l.l0, &l.lplus, &l.lminus, z, delta, n_max)?;
    let generator = &l.l0 + &ladders.correction;
    let nv = linalg::null_vector(generator.as_mat()).ok_or(Error::Numerical("steady-state SVD"))?;
    if nv.second - nv.smallest <= DEGENERACY_RATIO * nv.largest {
        return Err(Error::DegenerateNullspace {
            smallest: nv.smallest,
            second: nv.second,
        });
    }
    let d = l.dim();
    let raw = DensityVector {
        entries: nv.vector,
        dim: d,
    };
    let tr = raw.trace();
    if tr.norm() < 1e-300 {
        return Err(Error::Numerical("steady state has zero trace"));
    }
    let rho0 = raw.scale(tr.inv());

    let mut upper = Vec::with_capacity(n_max);
    let mut prev = rho0.clone();
    for sn in &ladders.s {
        prev = sn.apply(&prev);
        upper.push(prev.clone());
    }
    let mut lower = Vec::with_capacity(n_max);
    prev = rho0.clone();
    for tn in &ladders.t {
        prev = tn.apply(&prev);
        lower.push(prev.clone());
    }
    let rho_p1 = &upper[0];
    let rho_m1 = &lower[0];
    let time_averaged = &(&rho0 - &rho_m1.scale(rho_p1.trace())) - &rho_p1.scale(rho_m1.trace());

    let mut harmonics = Vec::with_capacity(2 * n_max + 1);
    harmonics.extend(lower.into_iter().rev());
    harmonics.push(rho0);
    harmonics.extend(upper);
    Ok(SteadyState {
        harmonics: FloquetHarmonics { n_max, harmonics },
        time_averaged,
        z,
        singular_values: (nv.smallest, nv.second),
    })
}

/// Largest entrywise change of `S₁` and `T₋₁` between ladder depths `n_lo`
/// and `n_hi`.
pub fn ladder_convergence(l: &Liouvillians, z: C64, delta: f64, n_lo: usize, n_hi: usize) -> Result<f64> {
    let lo = cf_ladders(&l.l0, &l.lplus, &l.lminus, z, delta, n_lo)?;
    let hi = cf_ladders(&l.l0, &l.lplus, &l.lminus, z, delta, n_hi)?;
    Ok(lo
        .s1()
        .max_abs_diff(hi.s1())
        .max(lo.t_minus1().max_abs_diff(hi.t_minus1())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouvillian::vectorize;
    use crate::params::{to_angular, DriveTarget};

    fn probed() -> SystemParams {
        SystemParams {
            nu_l: -30.0,
            j1: 0.7,
            j2: 0.01,
            delta: 3.0,
            ..Default::default()
        }
    }

    #[test]
    fn zero_probe_gives_zero_ladders() {
        let p = SystemParams {
            j1: 1.0,
            delta: 2.0,
            ..Default::default()
        };
        let l = build_liouvillians(&p).unwrap();
        let lad = cf_ladders(&l.l0, &l.lplus, &l.lminus, ZERO, to_angular(2.0), 3).unwrap();
        assert_eq!(lad.s1().max_abs(), 0.0);
        assert_eq!(lad.t_minus1().max_abs(), 0.0);
    }

    #[test]
    fn ladder_depth_converges() {
        let p = SystemParams {
            j2: 0.01,
            delta: 1.0,
            ..Default::default()
        };
        let l = build_liouvillians(&p).unwrap();
        let d = p.angular().delta;
        let deep = ladder_convergence(&l, ZERO, d, 3, 5).unwrap();
        assert!(deep < p.cf.conv_tol, "{deep:e}");
        // truncating at n = 1 drops an O(J₂³) piece of S₁
        let shallow = |j2: f64| {
            let l = build_liouvillians(&p.with_j2(j2)).unwrap();
            ladder_convergence(&l, ZERO, d, 1, 3).unwrap()
        };
        let slope = (shallow(0.02) / shallow(0.01)).log2();
        assert!((slope - 3.0).abs() < 0.05, "{slope}");
    }

    #[test]
    fn s1_is_linear_in_probe() {
        let p = probed();
        let d = p.angular().delta;
        let s1 = |j2: f64| {
            let l = build_liouvillians(&p.with_j2(j2)).unwrap();
            cf_ladders(&l.l0, &l.lplus, &l.lminus, ZERO, d, 3).unwrap().s[0].clone()
        };
        let a = s1(0.01);
        let b = s1(0.02);
        let dev = b.max_abs_diff(&a.scale(2.0));
        assert!(dev < 1e-3 * a.max_abs(), "{dev:e} vs {:e}", a.max_abs());
    }

    #[test]
    fn unprobed_ground_state() {
        let ss = steady_state(&SystemParams::default()).unwrap();
        let rho = ss.rho().unwrap();
        let ops = crate::ops::SystemOperators::new(Default::default()).unwrap();
        assert!(rho.max_abs_diff(&ops.ground_state()) < 1e-12);
    }

    #[test]
    fn driven_bare_dot_population() {
        let p = SystemParams {
            g: 0.0,
            gamma: 1.0,
            gamma_d: 0.0,
            j1: 1.0,
            drive_target: DriveTarget::Qd,
            ..Default::default()
        };
        let ss = steady_state(&p).unwrap();
        let ops = crate::ops::SystemOperators::new(p.hilbert).unwrap();
        let ree = ss.expectation(&ops.excited_projector());
        assert!((ree - 1.0 / 3.0).abs() < 1e-12, "{ree}");
    }

    #[test]
    fn harmonics_are_hermitian_conjugates() {
        let ss = steady_state(&probed()).unwrap();
        let h = &ss.harmonics;
        for n in 1..=h.n_max() as i32 {
            let plus = unvectorize(h.get(n).unwrap()).unwrap();
            let minus = unvectorize(h.get(-n).unwrap()).unwrap();
            assert!(minus.max_abs_diff(&plus.adjoint()) < 1e-10);
        }
        assert!((h.rho0().trace() - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn laplace_without_probe_is_resolvent() {
        let p = SystemParams {
            j1: 0.5,
            ..Default::default()
        };
        let l = build_liouvillians(&p).unwrap();
        let z = C64::new(3.0, 40.0);
        let lad = cf_ladders(&l.l0, &l.lplus, &l.lminus, z, 0.0, 2).unwrap();
        let init = vectorize(&l.ops.ground_state());
        let r = rho0_laplace(z, &init, &lad, &l.l0).unwrap();
        // (z − L₀) r = ρ(0)
        let back = &r.scale(z) - &l.l0.apply(&r);
        assert!((&back - &init).norm_max() < 1e-12);
    }

    #[test]
    fn laplace_large_z_asymptotics() {
        let p = probed();
        let l = build_liouvillians(&p).unwrap();
        let z = C64::new(1e9, 0.0);
        let lad = cf_ladders(&l.l0, &l.lplus, &l.lminus, z, p.angular().delta, 3).unwrap();
        let init = vectorize(&l.ops.ground_state());
        let r = rho0_laplace(z, &init, &lad, &l.l0).unwrap();
        assert!((r.norm_max() * 1e9 - 1.0).abs() < 1e-5);
    }

    #[test]
    fn rejects_zero_depth() {
        let l = build_liouvillians(&probed()).unwrap();
        assert!(cf_ladders(&l.l0, &l.lplus, &l.lminus, ZERO, 1.0, 0).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(CfConfig { n_max: 0, ..Default::default() }.validate().is_err());
        assert!(CfConfig { conv_tol: 0.0, ..Default::default() }.validate().is_err());
        assert!(CfConfig { z_epsilon: Some(-1.0), ..Default::default() }.validate().is_err());
        assert!(CfConfig::default().validate().is_ok());
    }
}
