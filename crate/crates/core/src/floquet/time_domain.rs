//! Brute-force integration of dρ/dt = (L₀ + L₊e^{iδt} + L₋e^{−iδt})ρ with
//! classical fourth-order Runge–Kutta. Used to cross-check the continued
//! fractions.

use faer::{Col, MatRef};

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::liouvillian::{build_liouvillians, vectorize, DensityVector, Liouvillians};
use crate::ops::Operator;
use crate::params::SystemParams;

/// Trace drift that aborts an integration.
const MAX_TRACE_DRIFT: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityVector>,
}

struct Rhs<'a> {
    l0: MatRef<'a, C64>,
    lp: MatRef<'a, C64>,
    lm: MatRef<'a, C64>,
    delta: f64,
    probed: bool,
}

impl Rhs<'_> {
    fn eval(&self, t: f64, x: &Col<C64>) -> Col<C64> {
        let mut out = self.l0 * x;
        if self.probed {
            let phase = C64::from_polar(1.0, self.delta * t);
            let p = self.lp * x;
            let m = self.lm * x;
            for k in 0..out.nrows() {
                out[k] += phase * p[k] + phase.conj() * m[k];
            }
        }
        out
    }
}

fn rk4_step(f: &Rhs<'_>, t: f64, x: &Col<C64>, h: f64) -> Col<C64> {
    let axpy = |a: &Col<C64>, s: f64, b: &Col<C64>| Col::from_fn(a.nrows(), |k| a[k] + b[k] * s);
    let k1 = f.eval(t, x);
    let k2 = f.eval(t + 0.5 * h, &axpy(x, 0.5 * h, &k1));
    let k3 = f.eval(t + 0.5 * h, &axpy(x, 0.5 * h, &k2));
    let k4 = f.eval(t + h, &axpy(x, h, &k3));
    Col::from_fn(x.nrows(), |k| {
        x[k] + (k1[k] + (k2[k] + k3[k]) * 2.0 + k4[k]) * (h / 6.0)
    })
}

fn trace(x: &Col<C64>, d: usize) -> C64 {
    (0..d).map(|k| x[k + k * d]).sum()
}

fn rhs<'a>(l: &'a Liouvillians, params: &SystemParams) -> Rhs<'a> {
    Rhs {
        l0: l.l0.as_mat(),
        lp: l.lplus.as_mat(),
        lm: l.lminus.as_mat(),
        delta: params.angular().delta,
        probed: l.lplus.max_abs() > 0.0 || l.lminus.max_abs() > 0.0,
    }
}

/// Largest angular scale in the generator: rates, detunings, couplings and δ.
pub fn fastest_rate(params: &SystemParams) -> f64 {
    let w = params.angular();
    [
        w.delta_c, w.delta_d, w.g, w.kappa, w.gamma, w.gamma_d, w.gamma_r, w.j1, w.j2, w.delta,
    ]
    .iter()
    .fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Integrates from `initial` (the ground state if `None`) up to `t_end`,
/// recording every `record_every`-th step.
pub fn time_domain_integrate(
    params: &SystemParams,
    initial: Option<&Operator>,
    t_end: f64,
    dt: f64,
    record_every: usize,
) -> Result<Trajectory> {
    if !(dt > 0.0 && t_end >= 0.0 && dt.is_finite() && t_end.is_finite()) {
        return Err(Error::InvalidParameter {
            field: "dt",
            reason: format!("need dt > 0 and t_end >= 0, got dt = {dt}, t_end = {t_end}"),
        });
    }
    let l = build_liouvillians(params)?;
    let d = l.dim();
    let x0 = match initial {
        Some(rho) => {
            if rho.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: rho.dim(),
                });
            }
            vectorize(rho)
        }
        None => vectorize(&l.ops.ground_state()),
    };
    let f = rhs(&l, params);
    let steps = (t_end / dt).ceil() as usize;
    let h = if steps == 0 { 0.0 } else { t_end / steps as f64 };
    let every = record_every.max(1);
    let tr0 = trace(&x0.entries, d);

    let mut times = vec![0.0];
    let mut states = vec![x0.clone()];
    let mut x = x0.entries;
    for k in 0..steps {
        let t = k as f64 * h;
        x = rk4_step(&f, t, &x, h);
        let t_next = (k + 1) as f64 * h;
        check_drift(&x, d, tr0, t_next)?;
        if (k + 1) % every == 0 || k + 1 == steps {
            times.push(t_next);
            states.push(DensityVector {
                entries: x.clone(),
                dim: d,
            });
        }
    }
    Ok(Trajectory { times, states })
}

fn check_drift(x: &Col<C64>, d: usize, tr0: C64, time: f64) -> Result<()> {
    let drift = (trace(x, d) - tr0).norm();
    if !(drift <= MAX_TRACE_DRIFT) {
        return Err(Error::TraceDrift { drift, time });
    }
    Ok(())
}

/// Settings for [`time_averaged`].
#[derive(Clone, Copy, Debug)]
pub struct TimeDomainOptions {
    /// Step size in ns; `None` picks `0.05 / fastest_rate`.
    pub dt: Option<f64>,
    /// Transient duration in ns; `None` picks 12 / (spectral gap of L₀),
    /// rounded up to whole beat periods.
    pub settle: Option<f64>,
}

impl Default for TimeDomainOptions {
    fn default() -> Self {
        TimeDomainOptions {
            dt: None,
            settle: None,
        }
    }
}

/// Density matrix averaged over one beat period `2π/δ` after transients.
#[derive(Clone, Debug)]
pub struct TimeAverage {
    pub rho: DensityVector,
    pub settle: f64,
    pub period: f64,
    pub dt: f64,
    pub steps: usize,
}

impl TimeAverage {
    pub fn expectation(&self, op: &Operator) -> f64 {
        self.rho.expectation(op).re
    }
}

/// Smallest |Re λ| over the non-zero eigenvalues of L₀.
pub fn spectral_gap(l: &Liouvillians) -> Result<f64> {
    let ev = l.l0.eigenvalues()?;
    let scale = ev.iter().map(|z| z.norm()).fold(0.0f64, f64::max).max(1.0);
    ev.iter()
        .map(|z| z.re.abs())
        .filter(|&r| r > 1e-9 * scale)
        .min_by(f64::total_cmp)
        .ok_or(Error::Numerical("Liouvillian has no decaying modes"))
}

pub fn time_averaged(params: &SystemParams, opts: TimeDomainOptions) -> Result<TimeAverage> {
    let l = build_liouvillians(params)?;
    let d = l.dim();
    let w = params.angular();
    let dt_max = opts.dt.unwrap_or(0.05 / fastest_rate(params));
    let period = if w.delta.abs() > 0.0 {
        std::f64::consts::TAU / w.delta.abs()
    } else {
        // no beat: any window works once settled
        1.0 / spectral_gap(&l)?
    };
    let settle_target = match opts.settle {
        Some(s) => s,
        None => 12.0 / spectral_gap(&l)?,
    };
    let periods = (settle_target / period).ceil().max(1.0);
    let settle = periods * period;
    let per_period = (period / dt_max).ceil() as usize;
    let h = period / per_period as f64;
    let settle_steps = periods as usize * per_period;

    let f = rhs(&l, params);
    let mut x = vectorize(&l.ops.ground_state()).entries;
    let tr0 = trace(&x, d);
    let mut t = 0.0;
    for k in 0..settle_steps {
        x = rk4_step(&f, t, &x, h);
        t = (k + 1) as f64 * h;
        if k % 256 == 0 {
            check_drift(&x, d, tr0, t)?;
        }
    }
    // periodic trapezoid over one beat period
    let mut acc = Col::<C64>::zeros(d * d);
    for k in 0..per_period {
        acc += &x;
        x = rk4_step(&f, t, &x, h);
        t = (settle_steps + k + 1) as f64 * h;
    }
    check_drift(&x, d, tr0, t)?;
    let n = per_period as f64;
    Ok(TimeAverage {
        rho: DensityVector {
            entries: Col::from_fn(d * d, |k| acc[k] / n),
            dim: d,
        },
        settle,
        period,
        dt: h,
        steps: settle_steps + per_period,
    })
}
