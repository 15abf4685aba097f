//! Truncated Hilbert space, ladder operators and the rotating-frame
//! Hamiltonian.
//!
//! Tensor ordering is QD ⊗ field everywhere: the basis index of `|q, n>` is
//! `q * fock_levels + n` with `q = 0` the ground state `|g>` and `q = 1` the
//! excited state `|e>`. Full-space operators are only produced through
//! [`SystemOperators`].

use std::ops::{Add, Mul, Sub};

use faer::{Mat, MatRef};

use crate::error::{Error, Result};
use crate::linalg::{self, C64, ONE, ZERO};
use crate::params::{DriveTarget, HilbertConfig, SystemParams};

/// Square complex matrix acting on a (possibly partial) Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator(Mat<C64>);

impl Operator {
    pub fn from_matrix(m: Mat<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidDimension(format!(
                "operator must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Operator(m))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Operator(Mat::from_fn(dim, dim, f))
    }

    pub fn zeros(dim: usize) -> Self {
        Operator(Mat::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Operator(Mat::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_mat(&self) -> MatRef<'_, C64> {
        self.0.as_ref()
    }

    pub fn into_mat(self) -> Mat<C64> {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn adjoint(&self) -> Operator {
        Operator(self.0.adjoint().to_owned())
    }

    pub fn scale(&self, s: impl Into<C64>) -> Operator {
        Operator(linalg::scaled(self.0.as_ref(), s.into()))
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|k| self.0[(k, k)]).sum()
    }

    /// `tr(self · rho)`
    pub fn expectation(&self, rho: &Operator) -> C64 {
        let d = self.dim();
        let mut acc = ZERO;
        for i in 0..d {
            for j in 0..d {
                acc += self.0[(i, j)] * rho.0[(j, i)];
            }
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        linalg::max_abs_diff(self.0.as_ref(), other.0.as_ref())
    }

    /// max |A − A†|
    pub fn hermiticity_error(&self) -> f64 {
        linalg::max_abs_diff(self.0.as_ref(), self.0.adjoint().to_owned().as_ref())
    }

    pub fn is_finite(&self) -> bool {
        (0..self.dim()).all(|j| (0..self.dim()).all(|i| self.0[(i, j)].is_finite()))
    }
}

impl<'a> Mul<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn mul(self, rhs: &'a Operator) -> Operator {
        Operator(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn add(self, rhs: &'a Operator) -> Operator {
        Operator(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn sub(self, rhs: &'a Operator) -> Operator {
        Operator(&self.0 - &rhs.0)
    }
}

/// Cavity annihilation operator on `fock_levels` number states,
/// `<n-1|a|n> = √n`.
pub fn annihilation(fock_levels: usize) -> Result<Operator> {
    HilbertConfig::new(fock_levels)?;
    Ok(Operator::from_fn(fock_levels, |i, j| {
        if j == i + 1 {
            C64::new((j as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    }))
}

/// QD lowering operator `|g><e|` in the basis `(|g>, |e>)`.
pub fn lowering() -> Operator {
    Operator::from_fn(2, |i, j| if i == 0 && j == 1 { ONE } else { ZERO })
}

/// Kronecker product `a ⊗ b`; for system operators `a` acts on the QD and
/// `b` on the field.
pub fn tensor(a: &Operator, b: &Operator) -> Operator {
    Operator(a.0.kron(&b.0))
}

/// The elementary operators lifted to the full QD ⊗ field space.
#[derive(Clone, Debug)]
pub struct SystemOperators {
    pub hilbert: HilbertConfig,
    /// I ⊗ a
    pub a: Operator,
    /// σ ⊗ I
    pub sigma: Operator,
}

impl SystemOperators {
    pub fn new(hilbert: HilbertConfig) -> Result<Self> {
        hilbert.validate()?;
        let n = hilbert.fock_levels;
        let a = tensor(&Operator::identity(2), &annihilation(n)?);
        let sigma = tensor(&lowering(), &Operator::identity(n));
        Ok(SystemOperators { hilbert, a, sigma })
    }

    pub fn dim(&self) -> usize {
        self.hilbert.dim()
    }

    pub fn a_dag(&self) -> Operator {
        self.a.adjoint()
    }

    pub fn sigma_dag(&self) -> Operator {
        self.sigma.adjoint()
    }

    /// a†a
    pub fn photon_number(&self) -> Operator {
        &self.a_dag() * &self.a
    }

    /// σ†σ
    pub fn excited_projector(&self) -> Operator {
        &self.sigma_dag() * &self.sigma
    }

    /// The operator Σ the lasers couple through: `a` or `σ`.
    pub fn drive_operator(&self, target: DriveTarget) -> &Operator {
        match target {
            DriveTarget::Cavity => &self.a,
            DriveTarget::Qd => &self.sigma,
        }
    }

    /// `|g, 0><g, 0|`
    pub fn ground_state(&self) -> Operator {
        let d = self.dim();
        Operator::from_fn(d, |i, j| if i == 0 && j == 0 { ONE } else { ZERO })
    }

    /// `|q, n><q, n|` with `q = 0` ground, `q = 1` excited.
    pub fn basis_projector(&self, q: usize, n: usize) -> Operator {
        let idx = q * self.hilbert.fock_levels + n;
        let d = self.dim();
        Operator::from_fn(d, |i, j| if i == idx && j == idx { ONE } else { ZERO })
    }
}

/// Static rotating-frame Hamiltonian (angular units)
///
/// H₀ = Δ_c a†a + Δ_d σ†σ + g(σ†a + σa†) + J₁(Σ + Σ†)
///
/// with Δ_i = ω_i − ω_l and Σ the driven operator.
pub fn build_h0(params: &SystemParams) -> Result<Operator> {
    params.validate()?;
    let ops = SystemOperators::new(params.hilbert)?;
    Ok(h0_from(&ops, params))
}

pub(crate) fn h0_from(ops: &SystemOperators, params: &SystemParams) -> Operator {
    let w = params.angular();
    let a = &ops.a;
    let a_dag = ops.a_dag();
    let s = &ops.sigma;
    let s_dag = ops.sigma_dag();
    let drive = ops.drive_operator(params.drive_target);

    let cavity = ops.photon_number().scale(w.delta_c);
    let dot = ops.excited_projector().scale(w.delta_d);
    let coupling = (&(&s_dag * a) + &(s * &a_dag)).scale(w.g);
    let pump = (drive + &drive.adjoint()).scale(w.j1);
    &(&(&cavity + &dot) + &coupling) + &pump
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::to_angular;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn annihilation_entries() {
        let a2 = annihilation(2).unwrap();
        assert_eq!(a2.get(0, 1), ONE);
        assert_eq!(a2.get(0, 0), ZERO);
        assert_eq!(a2.get(1, 0), ZERO);
        assert_eq!(a2.get(1, 1), ZERO);

        let a3 = annihilation(3).unwrap();
        assert_eq!(a3.get(0, 1), ONE);
        assert!((a3.get(1, 2) - c(2f64.sqrt())).norm() < 1e-15);
        let nonzero = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .filter(|&(i, j)| a3.get(i, j) != ZERO)
            .count();
        assert_eq!(nonzero, 2);
    }

    #[test]
    fn number_operator_on_two_photons() {
        let a = annihilation(3).unwrap();
        let n = &a.adjoint() * &a;
        assert!((n.get(2, 2) - c(2.0)).norm() < 1e-14);
    }

    #[test]
    fn annihilation_rejects_small_space() {
        assert!(matches!(annihilation(1), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn canonical_commutator_except_truncation_edge() {
        let n = 5;
        let a = annihilation(n).unwrap();
        let comm = &(&a * &a.adjoint()) - &(&a.adjoint() * &a);
        for k in 0..n - 1 {
            assert!((comm.get(k, k) - ONE).norm() < 1e-14);
        }
        // [a, a†] = 1 − N|N−1><N−1| at the top of the ladder
        assert!((comm.get(n - 1, n - 1) - c(1.0 - n as f64)).norm() < 1e-14);
    }

    #[test]
    fn lowering_action() {
        let s = lowering();
        // σ|e> = |g>
        assert_eq!(s.get(0, 1), ONE);
        // σ|g> = 0
        assert_eq!(s.get(0, 0), ZERO);
        assert_eq!(s.get(1, 0), ZERO);
        let proj = &s.adjoint() * &s;
        assert_eq!(proj.get(1, 1), ONE);
        assert_eq!(proj.get(0, 0), ZERO);
    }

    #[test]
    fn tensor_identities() {
        let i6 = tensor(&Operator::identity(2), &Operator::identity(3));
        assert_eq!(i6, Operator::identity(6));

        let s = lowering();
        let a = annihilation(3).unwrap();
        let lhs = &tensor(&s, &Operator::identity(3)) * &tensor(&Operator::identity(2), &a);
        assert!(lhs.max_abs_diff(&tensor(&s, &a)) < 1e-15);
        assert_eq!(tensor(&s, &a).dim(), 6);
    }

    #[test]
    fn resonant_undriven_frame_has_zero_hamiltonian() {
        let p = SystemParams {
            g: 0.0,
            j1: 0.0,
            ..Default::default()
        };
        let h = build_h0(&p).unwrap();
        assert!(h.max_abs_diff(&Operator::zeros(6)) == 0.0);
    }

    #[test]
    fn first_manifold_splits_by_two_g() {
        let p = SystemParams {
            g: 30.0,
            j1: 0.0,
            ..Default::default()
        };
        let h = build_h0(&p).unwrap();
        // |g,1> has index 1, |e,0> has index 3
        let block = Operator::from_fn(2, |i, j| h.get([1, 3][i], [1, 3][j]));
        let mut ev: Vec<f64> = linalg::eigenvalues(block.as_mat())
            .unwrap()
            .iter()
            .map(|z| z.re)
            .collect();
        ev.sort_by(f64::total_cmp);
        let g = to_angular(30.0);
        assert!((ev[0] + g).abs() < 1e-10);
        assert!((ev[1] - g).abs() < 1e-10);
    }

    #[test]
    fn hamiltonian_is_hermitian_for_both_targets() {
        for target in [DriveTarget::Cavity, DriveTarget::Qd] {
            let p = SystemParams {
                nu_c: 0.3,
                nu_d: -1.2,
                nu_l: 0.7,
                g: 4.0,
                j1: 2.5,
                drive_target: target,
                ..Default::default()
            };
            assert!(build_h0(&p).unwrap().hermiticity_error() < 1e-14);
        }
    }

    #[test]
    fn drive_term_selects_operator() {
        let base = SystemParams {
            g: 0.0,
            j1: 1.0,
            ..Default::default()
        };
        let ops = SystemOperators::new(base.hilbert).unwrap();
        let j = to_angular(1.0);
        let hq = build_h0(&SystemParams {
            drive_target: DriveTarget::Qd,
            ..base
        })
        .unwrap();
        let expect_q = (&ops.sigma + &ops.sigma_dag()).scale(j);
        assert!(hq.max_abs_diff(&expect_q) < 1e-14);
        let hc = build_h0(&SystemParams {
            drive_target: DriveTarget::Cavity,
            ..base
        })
        .unwrap();
        let expect_c = (&ops.a + &ops.a_dag()).scale(j);
        assert!(hc.max_abs_diff(&expect_c) < 1e-14);
    }
}
