//! Breakpoint of a two-segment linear fit.

use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Knee {
    pub location: f64,
    pub slope_before: f64,
    pub slope_after: f64,
    /// Sum of squared residuals of the two-segment fit.
    pub sse: f64,
    /// Sum of squared residuals of a single straight line.
    pub sse_line: f64,
    /// F statistic of the two-segment model against the single line.
    pub f_statistic: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KneeOutcome {
    Knee(Knee),
    /// The data are explained by one straight line.
    NoKnee { slope: f64 },
}

impl KneeOutcome {
    pub fn location(&self) -> Option<f64> {
        match self {
            KneeOutcome::Knee(k) => Some(k.location),
            KneeOutcome::NoKnee { .. } => None,
        }
    }
}

/// Significance level of the F test for the second segment.
const SIGNIFICANCE: f64 = 1e-3;

struct Line {
    slope: f64,
    intercept: f64,
    sse: f64,
}

fn fit_line(pts: &[(f64, f64)]) -> Line {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let sse = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Line { slope, intercept, sse }
}

/// Fits independent lines to `points[..k]` and `points[k..]` for every split
/// with at least three points per side, keeps the split with the smallest
/// total squared residual and reports where the two lines intersect
/// (clamped to the gap between the segments). `points` must be sorted by x.
///
/// The split counts as a knee only if the two extra parameters reduce the
/// residual significantly against the single line (F test at level 1e-3),
/// i.e. the slope change stands out from the scatter about the fit.
pub fn detect_knee(points: &[(f64, f64)]) -> Result<KneeOutcome> {
    if points.len() < 6 {
        return Err(Error::InvalidParameter {
            field: "points",
            reason: format!("knee detection needs at least 6 points, got {}", points.len()),
        });
    }
    if points.iter().any(|p| !(p.0.is_finite() && p.1.is_finite())) || points.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::InvalidParameter {
            field: "points",
            reason: "x must be finite and strictly increasing".into(),
        });
    }
    let line = fit_line(points);
    let scale = points.iter().map(|p| p.1.abs()).fold(0.0f64, f64::max).max(f64::MIN_POSITIVE);
    let mut best: Option<(usize, Line, Line)> = None;
    for k in 3..=points.len() - 3 {
        let a = fit_line(&points[..k]);
        let b = fit_line(&points[k..]);
        if best.as_ref().map_or(true, |(_, ba, bb)| a.sse + b.sse < ba.sse + bb.sse) {
            best = Some((k, a, b));
        }
    }
    let (k, a, b) = best.expect("at least one split");
    let sse = a.sse + b.sse;
    let n = points.len() as f64;
    let exact_line = line.sse <= 1e-24 * scale * scale * n;
    let dof = n - 4.0;
    let f_statistic = if sse > 0.0 {
        ((line.sse - sse) / 2.0) / (sse / dof)
    } else {
        f64::INFINITY
    };
    let critical = FisherSnedecor::new(2.0, dof)
        .map_err(|_| Error::Numerical("F distribution"))?
        .inverse_cdf(1.0 - SIGNIFICANCE);
    if exact_line || !(f_statistic > critical) || a.slope == b.slope {
        return Ok(KneeOutcome::NoKnee { slope: line.slope });
    }
    let cross = (b.intercept - a.intercept) / (a.slope - b.slope);
    let location = cross.clamp(points[k - 1].0, points[k].0);
    Ok(KneeOutcome::Knee(Knee {
        location,
        slope_before: a.slope,
        slope_after: b.slope,
        sse,
        sse_line: line.sse,
        f_statistic,
    }))
}
