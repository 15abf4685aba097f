//! Local extrema of sampled curves.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtremumKind {
    Peak,
    Dip,
}

impl fmt::Display for ExtremumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtremumKind::Peak => f.write_str("peak"),
            ExtremumKind::Dip => f.write_str("dip"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub location: f64,
    pub value: f64,
    pub kind: ExtremumKind,
    /// Height above the higher of the two surrounding bases (depth for dips).
    pub prominence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremaOptions {
    /// Plateaus are resolved toward this abscissa; the centre of the plateau
    /// otherwise.
    pub reference: Option<f64>,
    /// Minimum prominence as a fraction of the curve's range.
    pub min_relative_prominence: f64,
}

impl Default for ExtremaOptions {
    fn default() -> Self {
        ExtremaOptions {
            reference: None,
            min_relative_prominence: 1e-4,
        }
    }
}

/// Interior local maxima and minima of `y(x)`, with locations refined by a
/// three-point parabola. `x` must be strictly increasing.
pub fn find_extrema(x: &[f64], y: &[f64], opts: &ExtremaOptions) -> Vec<Extremum> {
    assert_eq!(x.len(), y.len(), "abscissa and ordinate lengths differ");
    let n = y.len();
    if n < 3 {
        return Vec::new();
    }
    let (lo, hi) = y
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let range = hi - lo;
    if !(range > 0.0) {
        return Vec::new();
    }
    let threshold = opts.min_relative_prominence * range;

    let mut out = Vec::new();
    let mut i = 1;
    while i < n - 1 {
        // extend over a plateau of equal values
        let mut j = i;
        while j + 1 < n && y[j + 1] == y[i] {
            j += 1;
        }
        if j == n - 1 {
            break;
        }
        let left = y[i - 1];
        let right = y[j + 1];
        let kind = if y[i] > left && y[i] > right {
            Some(ExtremumKind::Peak)
        } else if y[i] < left && y[i] < right {
            Some(ExtremumKind::Dip)
        } else {
            None
        };
        if let Some(kind) = kind {
            let sign = if kind == ExtremumKind::Peak { 1.0 } else { -1.0 };
            let prominence = prominence(y, i, j, sign);
            if prominence >= threshold {
                let (location, value) = if i == j {
                    refine(x[i - 1], x[i], x[i + 1], y[i - 1], y[i], y[i + 1])
                } else {
                    (plateau_point(&x[i..=j], opts.reference), y[i])
                };
                out.push(Extremum {
                    location,
                    value,
                    kind,
                    prominence,
                });
            }
        }
        i = j + 1;
    }
    out
}

/// Prominence of the extremum occupying `y[i..=j]`, measured on `sign · y`.
fn prominence(y: &[f64], i: usize, j: usize, sign: f64) -> f64 {
    let top = sign * y[i];
    let mut left_base = top;
    for k in (0..i).rev() {
        let v = sign * y[k];
        if v > top {
            break;
        }
        left_base = left_base.min(v);
    }
    let mut right_base = top;
    for &yk in &y[j + 1..] {
        let v = sign * yk;
        if v > top {
            break;
        }
        right_base = right_base.min(v);
    }
    top - left_base.max(right_base)
}

/// Vertex of the parabola through three points, clamped to the bracket.
fn refine(x0: f64, x1: f64, x2: f64, y0: f64, y1: f64, y2: f64) -> (f64, f64) {
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let curvature = (d12 - d01) / (x2 - x0);
    if curvature == 0.0 || !curvature.is_finite() {
        return (x1, y1);
    }
    // y ≈ y1 + b (x − x1) + c (x − x1)², c = curvature
    let b = d01 + curvature * (x1 - x0);
    let dx = (-b / (2.0 * curvature)).clamp(x0 - x1, x2 - x1);
    (x1 + dx, y1 + b * dx + curvature * dx * dx)
}

fn plateau_point(xs: &[f64], reference: Option<f64>) -> f64 {
    match reference {
        Some(r) => xs
            .iter()
            .copied()
            .min_by(|a, b| (a - r).abs().total_cmp(&(b - r).abs()))
            .expect("plateau is nonempty"),
        None => 0.5 * (xs[0] + xs[xs.len() - 1]),
    }
}
