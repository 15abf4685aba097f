//! Two-parameter rational fits for the coupling-induced asymmetry.

use levenberg_marquardt::{LeastSquaresProblem, LevenbergMarquardt};
use nalgebra::storage::Owned;
use nalgebra::{DVector, Dyn, OMatrix, Vector2, U2};

use crate::error::{Error, Result};

/// Result of [`fit_asymmetry`]: `diff ≈ c·g²/(α + Δ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymmetryFit {
    pub c: f64,
    pub alpha: f64,
    /// Root-mean-square residual.
    pub residual: f64,
    pub max_residual: f64,
}

/// Result of [`fit_peak_ratio`]: `y ≈ 2αx/(1 + β − αx)`.
///
/// The model depends on α and β only through `α/(1 + β)`, so the fit
/// reports the representative with `β = 0`; `alpha_eff` is that ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakRatioFit {
    pub alpha: f64,
    pub beta: f64,
    pub alpha_eff: f64,
    /// Root-mean-square residual.
    pub residual: f64,
    pub max_residual: f64,
}

trait Model {
    fn value(&self, p: &Vector2<f64>, x: (f64, f64)) -> f64;
    fn gradient(&self, p: &Vector2<f64>, x: (f64, f64)) -> [f64; 2];
}

struct Asymmetry;

impl Model for Asymmetry {
    // x = (g, Δ), p = (c, α)
    fn value(&self, p: &Vector2<f64>, (g, d): (f64, f64)) -> f64 {
        p[0] * g * g / (p[1] + d)
    }
    fn gradient(&self, p: &Vector2<f64>, (g, d): (f64, f64)) -> [f64; 2] {
        let den = p[1] + d;
        [g * g / den, -p[0] * g * g / (den * den)]
    }
}

struct Ratio;

impl Model for Ratio {
    // x = (x, _), p = (a, unused): y = 2ax/(1 − ax)
    fn value(&self, p: &Vector2<f64>, (x, _): (f64, f64)) -> f64 {
        2.0 * p[0] * x / (1.0 - p[0] * x)
    }
    fn gradient(&self, p: &Vector2<f64>, (x, _): (f64, f64)) -> [f64; 2] {
        let den = 1.0 - p[0] * x;
        [2.0 * x / (den * den), 0.0]
    }
}

struct Problem<'a, M: Model> {
    model: M,
    xs: &'a [(f64, f64)],
    ys: &'a [f64],
    p: Vector2<f64>,
}

impl<M: Model> LeastSquaresProblem<f64, Dyn, U2> for Problem<'_, M> {
    type ResidualStorage = Owned<f64, Dyn>;
    type JacobianStorage = Owned<f64, Dyn, U2>;
    type ParameterStorage = Owned<f64, U2>;

    fn set_params(&mut self, p: &Vector2<f64>) {
        self.p = *p;
    }

    fn params(&self) -> Vector2<f64> {
        self.p
    }

    fn residuals(&self) -> Option<DVector<f64>> {
        let r = DVector::from_iterator(
            self.xs.len(),
            self.xs.iter().zip(self.ys).map(|(&x, &y)| self.model.value(&self.p, x) - y),
        );
        r.iter().all(|v| v.is_finite()).then_some(r)
    }

    fn jacobian(&self) -> Option<OMatrix<f64, Dyn, U2>> {
        let mut j = OMatrix::<f64, Dyn, U2>::zeros(self.xs.len());
        for (row, &x) in self.xs.iter().enumerate() {
            let g = self.model.gradient(&self.p, x);
            j[(row, 0)] = g[0];
            j[(row, 1)] = g[1];
        }
        j.iter().all(|v| v.is_finite()).then_some(j)
    }
}

fn solve<M: Model>(model: M, xs: &[(f64, f64)], ys: &[f64], start: Vector2<f64>) -> Result<(Vector2<f64>, f64, f64)> {
    let problem = Problem { model, xs, ys, p: start };
    let (problem, report) = LevenbergMarquardt::new()
        .with_ftol(1e-15)
        .with_xtol(1e-15)
        .with_gtol(1e-15)
        .with_patience(400)
        .minimize(problem);
    let residuals = problem
        .residuals()
        .ok_or_else(|| Error::Fit("model is not finite at the solution".into()))?;
    if !report.termination.was_successful() && residuals.norm() > 0.0 {
        return Err(Error::Fit(format!("{:?}", report.termination)));
    }
    let n = residuals.len() as f64;
    let rms = (residuals.norm_squared() / n).sqrt();
    let max = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    Ok((problem.p, rms, max))
}

/// Least-squares fit of `diff = c·g²/(α + Δ)` to points `(g, Δ, diff)`.
/// Needs at least three points for every distinct Δ and two distinct Δ.
pub fn fit_asymmetry(points: &[(f64, f64, f64)]) -> Result<AsymmetryFit> {
    if points.iter().any(|p| !(p.0.is_finite() && p.1.is_finite() && p.2.is_finite())) {
        return Err(Error::Fit("non-finite input".into()));
    }
    let mut deltas: Vec<f64> = points.iter().map(|p| p.1).collect();
    deltas.sort_by(f64::total_cmp);
    deltas.dedup();
    for d in &deltas {
        let count = points.iter().filter(|p| p.1 == *d).count();
        if count < 3 {
            return Err(Error::Fit(format!("series at Δ = {d} has {count} points, need 3")));
        }
    }
    if deltas.len() < 2 {
        return Err(Error::Fit("α is not identifiable from a single Δ series".into()));
    }
    let min_g2 = points
        .iter()
        .map(|p| p.0 * p.0)
        .filter(|&g2| g2 > 0.0)
        .fold(f64::INFINITY, f64::min);
    if !min_g2.is_finite() {
        return Err(Error::Fit("all g are zero; design matrix is degenerate".into()));
    }
    let max_diff = points.iter().map(|p| p.2).fold(f64::NEG_INFINITY, f64::max);
    let alpha0 = median(&points.iter().map(|p| p.1).collect::<Vec<_>>());
    if points.iter().all(|p| p.2 == 0.0) {
        return Ok(AsymmetryFit {
            c: 0.0,
            alpha: alpha0,
            residual: 0.0,
            max_residual: 0.0,
        });
    }
    let c0 = max_diff * (alpha0 + deltas[0]) / min_g2;
    let xs: Vec<(f64, f64)> = points.iter().map(|p| (p.0, p.1)).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.2).collect();
    let (p, residual, max_residual) = solve(Asymmetry, &xs, &ys, Vector2::new(c0, alpha0))?;
    if let Some(d) = deltas.iter().find(|&&d| (p[1] + d).abs() < 1e-12 * d.abs().max(1.0)) {
        return Err(Error::PoleInRange { pole: *d });
    }
    Ok(AsymmetryFit {
        c: p[0],
        alpha: p[1],
        residual,
        max_residual,
    })
}

/// Least-squares fit of `y = 2αx/(1 + β − αx)` to points `(x, y)`. The pole
/// `x = (1 + β)/α` must lie outside the data range. Since only `α/(1 + β)`
/// is determined by data, the returned fit has `β = 0`.
pub fn fit_peak_ratio(points: &[(f64, f64)]) -> Result<PeakRatioFit> {
    if points.len() < 2 {
        return Err(Error::Fit(format!("need at least 2 points, got {}", points.len())));
    }
    if points.iter().any(|p| !(p.0.is_finite() && p.1.is_finite())) {
        return Err(Error::Fit("non-finite input".into()));
    }
    // y(1 − ax) = 2ax is linear in a: y = a(2x + xy)
    let (mut saa, mut sya) = (0.0, 0.0);
    for &(x, y) in points {
        let basis = 2.0 * x + x * y;
        saa += basis * basis;
        sya += y * basis;
    }
    if !(saa > 0.0) {
        return Err(Error::Fit("all x are zero; design matrix is degenerate".into()));
    }
    let xs: Vec<(f64, f64)> = points.iter().map(|p| (p.0, 0.0)).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let (lo, hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), x| (l.min(x.0), h.max(x.0)));
    let (p, residual, max_residual) = solve(Ratio, &xs, &ys, Vector2::new(sya / saa, 0.0))?;
    let a = p[0];
    let pole = 1.0 / a;
    if pole.is_finite() && pole >= lo && pole <= hi {
        return Err(Error::PoleInRange { pole });
    }
    Ok(PeakRatioFit {
        alpha: a,
        beta: 0.0,
        alpha_eff: a,
        residual,
        max_residual,
    })
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}
