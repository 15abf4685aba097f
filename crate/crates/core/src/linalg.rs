//! Thin helpers over faer for the small dense complex matrices used here.

use faer::prelude::*;
use faer::{Col, Mat, MatRef};
use num_complex::Complex64;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Pivot ratio below which an LU factorization is treated as singular.
const SINGULAR_PIVOT_RATIO: f64 = 1e-14;

pub fn scaled(m: MatRef<'_, C64>, s: C64) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * s)
}

pub fn max_abs(m: MatRef<'_, C64>) -> f64 {
    let mut out = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            out = out.max(m[(i, j)].norm());
        }
    }
    out
}

pub fn max_abs_diff(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> f64 {
    assert_eq!(a.nrows(), b.nrows());
    assert_eq!(a.ncols(), b.ncols());
    let mut out = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            out = out.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    out
}

/// `a - s·I` without touching off-diagonal entries.
pub fn shift_diagonal(a: &mut Mat<C64>, s: C64) {
    for k in 0..a.nrows().min(a.ncols()) {
        a[(k, k)] -= s;
    }
}

/// LU factorization with partial pivoting that refuses numerically singular
/// matrices.
pub struct Lu {
    inner: faer::linalg::solvers::PartialPivLu<C64>,
}

impl Lu {
    pub fn new(a: MatRef<'_, C64>) -> Option<Lu> {
        let inner = a.partial_piv_lu();
        let u = inner.U();
        let mut max_pivot = 0.0f64;
        let mut min_pivot = f64::INFINITY;
        for k in 0..u.nrows() {
            let p = u[(k, k)].norm();
            if !p.is_finite() {
                return None;
            }
            max_pivot = max_pivot.max(p);
            min_pivot = min_pivot.min(p);
        }
        if max_pivot == 0.0 || min_pivot <= SINGULAR_PIVOT_RATIO * max_pivot {
            return None;
        }
        Some(Lu { inner })
    }

    pub fn solve_mat(&self, rhs: MatRef<'_, C64>) -> Mat<C64> {
        self.inner.solve(rhs)
    }

    pub fn solve_col(&self, rhs: &Col<C64>) -> Col<C64> {
        let mut out = rhs.clone();
        self.inner.solve_in_place(out.as_mat_mut());
        out
    }
}

/// Right singular vector of the smallest singular value, together with the
/// two smallest singular values and the largest one.
pub struct NullVector {
    pub vector: Col<C64>,
    pub smallest: f64,
    pub second: f64,
    pub largest: f64,
}

pub fn null_vector(a: MatRef<'_, C64>) -> Option<NullVector> {
    let n = a.ncols();
    assert!(n >= 2 && a.nrows() == n);
    let svd = a.svd().ok()?;
    let s = svd.S().column_vector();
    let v = svd.V();
    let vector = Col::from_fn(n, |i| v[(i, n - 1)]);
    Some(NullVector {
        vector,
        smallest: s[n - 1].re,
        second: s[n - 2].re,
        largest: s[0].re,
    })
}

pub fn eigenvalues(a: MatRef<'_, C64>) -> Option<Vec<C64>> {
    a.eigenvalues().ok()
}

pub fn matvec(a: MatRef<'_, C64>, x: &Col<C64>) -> Col<C64> {
    a * x
}
