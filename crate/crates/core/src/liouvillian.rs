//! Column-stacked vectorization and the Liouvillian superoperators.
//!
//! `vec(ρ)` stacks the columns of ρ, so `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`.
//! Element `(i, j)` of a `d × d` matrix sits at position `i + j·d`.

use std::ops::{Add, Mul, Sub};

use faer::{Col, Mat, MatRef};

use crate::error::{Error, Result};
use crate::linalg::{self, C64, I, ZERO};
use crate::ops::{h0_from, Operator, SystemOperators};
use crate::params::SystemParams;

/// Square matrix acting on vectorized `d × d` density matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator(Mat<C64>);

impl Superoperator {
    pub fn from_matrix(m: Mat<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidDimension(format!(
                "superoperator must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Superoperator(m))
    }

    pub fn zeros(size: usize) -> Self {
        Superoperator(Mat::zeros(size, size))
    }

    pub fn identity(size: usize) -> Self {
        Superoperator(Mat::identity(size, size))
    }

    /// Side length of the matrix, d².
    pub fn size(&self) -> usize {
        self.0.nrows()
    }

    /// Hilbert-space dimension d.
    pub fn hilbert_dim(&self) -> usize {
        (self.size() as f64).sqrt().round() as usize
    }

    pub fn as_mat(&self) -> MatRef<'_, C64> {
        self.0.as_ref()
    }

    pub fn scale(&self, s: impl Into<C64>) -> Superoperator {
        Superoperator(linalg::scaled(self.0.as_ref(), s.into()))
    }

    pub fn apply(&self, v: &DensityVector) -> DensityVector {
        DensityVector {
            entries: &self.0 * &v.entries,
            dim: v.dim,
        }
    }

    pub fn max_abs(&self) -> f64 {
        linalg::max_abs(self.0.as_ref())
    }

    pub fn max_abs_diff(&self, other: &Superoperator) -> f64 {
        linalg::max_abs_diff(self.0.as_ref(), other.0.as_ref())
    }

    pub fn eigenvalues(&self) -> Result<Vec<C64>> {
        linalg::eigenvalues(self.0.as_ref()).ok_or(Error::Numerical("superoperator eigenvalues"))
    }
}

impl<'a> Mul<&'a Superoperator> for &'a Superoperator {
    type Output = Superoperator;
    fn mul(self, rhs: &'a Superoperator) -> Superoperator {
        Superoperator(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a Superoperator> for &'a Superoperator {
    type Output = Superoperator;
    fn add(self, rhs: &'a Superoperator) -> Superoperator {
        Superoperator(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a Superoperator> for &'a Superoperator {
    type Output = Superoperator;
    fn sub(self, rhs: &'a Superoperator) -> Superoperator {
        Superoperator(&self.0 - &rhs.0)
    }
}

/// Column-stacked `d × d` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityVector {
    pub entries: Col<C64>,
    pub dim: usize,
}

impl DensityVector {
    pub fn from_entries(entries: Col<C64>) -> Result<Self> {
        let dim = (entries.nrows() as f64).sqrt().round() as usize;
        if dim * dim != entries.nrows() || dim == 0 {
            return Err(Error::InvalidDimension(format!(
                "length {} is not a perfect square",
                entries.nrows()
            )));
        }
        Ok(DensityVector { entries, dim })
    }

    pub fn zeros(dim: usize) -> Self {
        DensityVector {
            entries: Col::zeros(dim * dim),
            dim,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row + col * self.dim]
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|k| self.get(k, k)).sum()
    }

    /// `tr(op · ρ)`
    pub fn expectation(&self, op: &Operator) -> C64 {
        let d = self.dim;
        let mut acc = ZERO;
        for j in 0..d {
            for i in 0..d {
                acc += op.get(j, i) * self.get(i, j);
            }
        }
        acc
    }

    pub fn scale(&self, s: impl Into<C64>) -> DensityVector {
        let s = s.into();
        DensityVector {
            entries: Col::from_fn(self.len(), |k| self.entries[k] * s),
            dim: self.dim,
        }
    }

    pub fn norm_max(&self) -> f64 {
        (0..self.len()).map(|k| self.entries[k].norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        (0..self.len()).all(|k| self.entries[k].is_finite())
    }
}

impl<'a> Add<&'a DensityVector> for &'a DensityVector {
    type Output = DensityVector;
    fn add(self, rhs: &'a DensityVector) -> DensityVector {
        DensityVector {
            entries: &self.entries + &rhs.entries,
            dim: self.dim,
        }
    }
}

impl<'a> Sub<&'a DensityVector> for &'a DensityVector {
    type Output = DensityVector;
    fn sub(self, rhs: &'a DensityVector) -> DensityVector {
        DensityVector {
            entries: &self.entries - &rhs.entries,
            dim: self.dim,
        }
    }
}

pub fn vectorize(rho: &Operator) -> DensityVector {
    let d = rho.dim();
    DensityVector {
        entries: Col::from_fn(d * d, |k| rho.get(k % d, k / d)),
        dim: d,
    }
}

pub fn unvectorize(v: &DensityVector) -> Result<Operator> {
    let d = v.dim;
    if d * d != v.len() {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            actual: v.len(),
        });
    }
    Ok(Operator::from_fn(d, |i, j| v.get(i, j)))
}

/// `ρ ↦ Aρ`, i.e. `I ⊗ A`.
pub fn spre(a: &Operator) -> Superoperator {
    let id = Mat::<C64>::identity(a.dim(), a.dim());
    Superoperator(id.kron(a.as_mat()))
}

/// `ρ ↦ ρB`, i.e. `Bᵀ ⊗ I`.
pub fn spost(b: &Operator) -> Superoperator {
    let id = Mat::<C64>::identity(b.dim(), b.dim());
    Superoperator(b.as_mat().transpose().kron(&id))
}

/// `ρ ↦ AρB`, i.e. `Bᵀ ⊗ A`.
pub fn sprepost(a: &Operator, b: &Operator) -> Superoperator {
    Superoperator(b.as_mat().transpose().kron(a.as_mat()))
}

/// `ρ ↦ −i[A, ρ]`
pub fn commutator(a: &Operator) -> Superoperator {
    (&spre(a) - &spost(a)).scale(-I)
}

/// Lindblad dissipator `𝒟(C)ρ = CρC† − ½(C†Cρ + ρC†C)`.
pub fn dissipator(c: &Operator) -> Superoperator {
    let c_dag = c.adjoint();
    let cdc = &c_dag * c;
    let jump = sprepost(c, &c_dag);
    let anti = (&spre(&cdc) + &spost(&cdc)).scale(0.5);
    &jump - &anti
}

/// The static Liouvillian and the probe harmonics of
/// `L(t) = L₀ + L₊e^{iδt} + L₋e^{−iδt}`.
#[derive(Clone, Debug)]
pub struct Liouvillians {
    pub l0: Superoperator,
    pub lplus: Superoperator,
    pub lminus: Superoperator,
    pub ops: SystemOperators,
}

impl Liouvillians {
    pub fn dim(&self) -> usize {
        self.ops.dim()
    }
}

/// Assembles
///
/// L₀ρ = −i[H₀, ρ] + 𝒟(√2γ σ)ρ + 𝒟(√2κ a)ρ + 𝒟(√2γ_d σ†σ)ρ + 𝒟(√2γ_r a†σ)ρ
///
/// and L₊ρ = −iJ₂[Σ, ρ], L₋ρ = −iJ₂[Σ†, ρ].
pub fn build_liouvillians(params: &SystemParams) -> Result<Liouvillians> {
    params.validate()?;
    let ops = SystemOperators::new(params.hilbert)?;
    let w = params.angular();
    let h0 = h0_from(&ops, params);

    let channels = [
        (w.gamma, ops.sigma.clone()),
        (w.kappa, ops.a.clone()),
        (w.gamma_d, ops.excited_projector()),
        (w.gamma_r, &ops.a_dag() * &ops.sigma),
    ];
    let mut l0 = commutator(&h0);
    for (rate, op) in channels {
        if rate > 0.0 {
            l0 = &l0 + &dissipator(&op.scale((2.0 * rate).sqrt()));
        }
    }

    let drive = ops.drive_operator(params.drive_target);
    let lplus = commutator(drive).scale(w.j2);
    let lminus = commutator(&drive.adjoint()).scale(w.j2);
    Ok(Liouvillians {
        l0,
        lplus,
        lminus,
        ops,
    })
}

/// Row vector `t` with `t · vec(ρ) = tr ρ`.
pub fn trace_functional(dim: usize) -> Col<C64> {
    Col::from_fn(dim * dim, |k| {
        if k % dim == k / dim {
            C64::new(1.0, 0.0)
        } else {
            ZERO
        }
    })
}

/// max over columns of |tr(L e_k)|: zero iff L annihilates the trace.
pub fn trace_leak(l: &Superoperator) -> f64 {
    let n = l.size();
    let d = l.hilbert_dim();
    let m = l.as_mat();
    let mut worst = 0.0f64;
    for col in 0..n {
        let mut acc = ZERO;
        for k in 0..d {
            acc += m[(k + k * d, col)];
        }
        worst = worst.max(acc.norm());
    }
    worst
}
