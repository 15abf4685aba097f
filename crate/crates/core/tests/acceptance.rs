//! Acceptance criteria 1 to 10. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::time::Instant;

use bichromatic_core::experiments::{run_scenario, KneeOutcome, ScenarioConfig, ScenarioKind};
use bichromatic_core::floquet::{steady_state, time_averaged, TimeDomainOptions};
use bichromatic_core::liouvillian::{build_liouvillians, trace_leak};
use bichromatic_core::oracles::{rho_ee_second_order, transmission_analytic, unprobed_rho_ee, AnalyticParams};
use bichromatic_core::params::{to_angular, DriveTarget, HilbertConfig, SystemParams};
use bichromatic_core::spectra::{evaluate_observable, excited_population, cavity_intensity, ExtremumKind, Observable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), String>;

fn preset(kind: ScenarioKind, sets: &[(&str, &str)]) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::preset(kind);
    for (k, v) in sets {
        cfg.set(k, v).unwrap();
    }
    cfg
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Features of the fig1 curve at J₁ = 0.1, locations relative to ω_c.
fn fig1_features() -> Result<(Vec<(ExtremumKind, f64)>, f64, f64), String> {
    let cfg = preset(ScenarioKind::Fig1, &[("series_values", "0.1")]);
    let t = Instant::now();
    let res = run_scenario(&cfg).map_err(err)?;
    let secs = t.elapsed().as_secs_f64();
    let feats = res.curves[0].extrema.iter().map(|e| (e.kind, e.location)).collect();
    Ok((feats, cfg.sweep.step(), secs))
}

fn criterion1() -> Outcome {
    let (feats, step, secs) = fig1_features()?;
    let peaks: Vec<f64> = feats.iter().filter(|f| f.0 == ExtremumKind::Peak).map(|f| f.1).collect();
    let near = |target: f64| peaks.iter().copied().min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()));
    let (up, lo) = (near(30.05), near(-30.05));
    let ok_pos = matches!((up, lo), (Some(u), Some(l)) if (u - 30.05).abs() <= step && (l + 30.05).abs() <= step);
    Ok((
        ok_pos && secs < 30.0,
        format!("peaks at {lo:?} and {up:?} GHz (target -30.05/+30.05, tol {step}); runtime {secs:.1} s"),
    ))
}

fn criterion2() -> Outcome {
    let (feats, _, _) = fig1_features()?;
    let target = -(2f64.sqrt() - 1.0) * 30.0;
    let best = feats
        .iter()
        .filter(|f| f.0 == ExtremumKind::Peak)
        .map(|f| f.1)
        .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()));
    let ok = best.is_some_and(|x| (x - target).abs() <= 0.2);
    Ok((ok, format!("nearest peak to {target:.3} GHz: {best:?}; all features {feats:?}")))
}

fn spearman(v: &[f64]) -> f64 {
    let n = v.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut rank = vec![0.0; n];
    for (r, &i) in idx.iter().enumerate() {
        rank[i] = r as f64;
    }
    let m = (n as f64 - 1.0) / 2.0;
    let cov: f64 = (0..n).map(|i| (i as f64 - m) * (rank[i] - m)).sum();
    let var: f64 = (0..n).map(|i| (i as f64 - m).powi(2)).sum();
    cov / var
}

fn criterion3() -> Outcome {
    let res = run_scenario(&ScenarioConfig::preset(ScenarioKind::Fig2)).map_err(err)?;
    let sp = res.splitting.ok_or("no splitting analysis")?;
    let counts: Vec<usize> = sp.iter().map(|s| s.peaks).collect();
    let onset = sp.iter().position(|s| s.peaks == 2);
    let transition = counts.first() == Some(&1)
        && onset.is_some_and(|k| counts[..k].iter().all(|&c| c == 1) && counts[k..].iter().all(|&c| c == 2));
    let seps: Vec<f64> = onset.map_or(Vec::new(), |k| sp[k..].iter().filter_map(|s| s.separation).collect());
    let rho = if seps.len() >= 2 { spearman(&seps) } else { f64::NAN };
    Ok((
        transition && rho == 1.0,
        format!(
            "peak counts {counts:?} over j1 {:?}; onset j1 = {:?}; separations {seps:?}; spearman {rho}",
            sp.iter().map(|s| s.j1).collect::<Vec<_>>(),
            onset.map(|k| sp[k].j1)
        ),
    ))
}

fn criterion4() -> Outcome {
    let res = run_scenario(&ScenarioConfig::preset(ScenarioKind::Fig3)).map_err(err)?;
    let knee = res.knee.ok_or("no knee analysis")?;
    match knee.outcome {
        Ok(KneeOutcome::Knee(k)) => Ok((
            (4.0..=6.0).contains(&k.location),
            format!(
                "knee at j1 = {:.3} (slopes {:.3} -> {:.3}, F = {:.1})",
                k.location, k.slope_before, k.slope_after, k.f_statistic
            ),
        )),
        Ok(KneeOutcome::NoKnee { slope }) => Ok((false, format!("no knee, single slope {slope}"))),
        Err(e) => Ok((false, format!("knee detection failed: {e}"))),
    }
}

fn criterion5() -> Outcome {
    let base = SystemParams {
        g: 30.0,
        kappa: 3.0,
        gamma: 1.0,
        gamma_d: 0.0,
        gamma_r: 0.0,
        j1: 0.05,
        j2: 0.0,
        drive_target: DriveTarget::Cavity,
        ..Default::default()
    };
    let n = 641;
    let mut numeric = Vec::with_capacity(n);
    let mut analytic = Vec::with_capacity(n);
    for k in 0..n {
        let w = -1.6 * base.g + 3.2 * base.g * k as f64 / (n - 1) as f64;
        let p = SystemParams { nu_l: base.nu_c + w, ..base };
        numeric.push(cavity_intensity(&p).map_err(err)?);
        analytic.push(transmission_analytic(to_angular(w), &AnalyticParams::from_system(&p)));
    }
    let scale = numeric.iter().zip(&analytic).map(|(a, b)| a * b).sum::<f64>()
        / analytic.iter().map(|b| b * b).sum::<f64>();
    let worst = numeric
        .iter()
        .zip(&analytic)
        .map(|(a, b)| ((scale * b - a) / a).abs())
        .fold(0.0f64, f64::max);
    Ok((worst < 0.02, format!("max relative deviation {worst:.3e} over {n} points in [-1.6g, 1.6g]")))
}

fn fig5_bare(j1: f64) -> SystemParams {
    let mut p = ScenarioConfig::preset(ScenarioKind::Fig5).params;
    p.g = 0.0;
    p.gamma_r = 0.0;
    p.j1 = j1;
    p.j2 = 0.01 * p.gamma;
    p
}

fn criterion6() -> Outcome {
    let p = fig5_bare(1.75);
    let deltas: Vec<f64> = (0..=240).map(|k| -12.0 + 0.1 * k as f64).collect();
    let mut numeric = Vec::new();
    let mut formula = Vec::new();
    for &d in &deltas {
        let q = p.with_delta(d);
        numeric.push(excited_population(&q).map_err(err)?);
        formula.push(rho_ee_second_order(to_angular(d), &AnalyticParams::from_system(&q)));
    }
    let a = AnalyticParams::from_system(&p);
    let base = unprobed_rho_ee(&a);
    let amplitude = formula.iter().map(|f| (f - base).abs()).fold(0.0f64, f64::max);
    let worst = numeric.iter().zip(&formula).map(|(n, f)| (n - f).abs()).fold(0.0f64, f64::max) / amplitude;
    let unprobed_numeric = excited_population(&p.with_j2(0.0)).map_err(err)?;
    let unprobed_err = (unprobed_numeric - base).abs();
    Ok((
        worst < 0.05 && unprobed_err < 1e-10,
        format!("max deviation {:.3}% of probe amplitude {amplitude:.3e}; unprobed error {unprobed_err:.1e}", 100.0 * worst),
    ))
}

/// Local minima of the second-order ρ_ee formula over δ ∈ [−12, 12] GHz.
fn formula_minima(p: &SystemParams) -> Vec<f64> {
    let a = AnalyticParams::from_system(p);
    let xs: Vec<f64> = (0..=48000).map(|k| -12.0 + 0.0005 * k as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&d| rho_ee_second_order(to_angular(d), &a)).collect();
    (1..xs.len() - 1)
        .filter(|&k| ys[k] < ys[k - 1] && ys[k] <= ys[k + 1])
        .map(|k| xs[k])
        .collect()
}

fn criterion7() -> Outcome {
    let res = run_scenario(&preset(ScenarioKind::Fig5, &[("series_values", "0.25,1.75")])).map_err(err)?;
    let dips = |k: usize| -> Vec<f64> { res.curves[k].dips().iter().map(|e| e.location).collect() };
    let (weak, strong) = (dips(0), dips(1));
    let expected = formula_minima(&res.curves[1].params);
    let symmetric = strong.len() == 2 && (strong[0] + strong[1]).abs() < 0.05;
    let matched = strong.len() == expected.len()
        && strong
            .iter()
            .zip(&expected)
            .all(|(d, e)| (d - e).abs() <= 0.05 * e.abs().max(f64::EPSILON) || (d - e).abs() < 1e-6);
    let ok = symmetric && matched && weak.is_empty();
    Ok((
        ok,
        format!("j1 = 1.75: dips at {strong:?} (analytic minima {expected:?}); j1 = 0.25: {} dips", weak.len()),
    ))
}

fn criterion8() -> Outcome {
    let res = run_scenario(&ScenarioConfig::preset(ScenarioKind::Fig6)).map_err(err)?;
    let a = res.asymmetry.ok_or("no asymmetry analysis")?;
    let max_diff = a.points.iter().map(|p| p.difference).fold(0.0f64, f64::max);
    let max_excess = a.points.iter().map(|p| p.ratio - 1.0).fold(0.0f64, f64::max);
    let fit = a.fit.map_err(|e| format!("asymmetry fit failed: {e}"))?;
    let ratio = a.ratio_fit.map_err(|e| format!("ratio fit failed: {e}"))?;
    let r1 = fit.residual / max_diff;
    let r2 = ratio.residual / max_excess;
    Ok((
        a.points.len() == 15 && r1 < 0.02 && r2 < 0.02,
        format!(
            "{} points; difference fit rms {:.2}% of max (c = {:.3e}, alpha = {:.2}); ratio fit rms {:.2}% of max(ratio - 1) (alpha = {:.4})",
            a.points.len(),
            100.0 * r1,
            fit.c,
            fit.alpha,
            100.0 * r2,
            ratio.alpha
        ),
    ))
}

fn time_domain_pair(p: &SystemParams) -> Result<(f64, f64), String> {
    let ss = steady_state(p).map_err(err)?;
    let avg = time_averaged(p, TimeDomainOptions::default()).map_err(err)?;
    let l = build_liouvillians(p).map_err(err)?;
    let n_op = l.ops.photon_number();
    let e_op = l.ops.excited_projector();
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    Ok((
        rel(avg.expectation(&n_op), ss.expectation(&n_op)),
        rel(avg.expectation(&e_op), ss.expectation(&e_op)),
    ))
}

fn criterion9() -> Outcome {
    let mut fig1 = ScenarioConfig::preset(ScenarioKind::Fig1).params;
    fig1.j1 = 1.0;
    bichromatic_core::experiments::place_pump(&mut fig1, bichromatic_core::experiments::PumpLock::LowerPolariton)
        .map_err(err)?;
    fig1.delta = 30.0 - (fig1.nu_l - fig1.nu_c);
    let mut fig5 = ScenarioConfig::preset(ScenarioKind::Fig5).params;
    fig5.delta = 5.84;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_2024);
    let mut rate = || rng.gen_range(0.5..20.0);
    let gamma = rate();
    let random = SystemParams {
        nu_c: rate(),
        nu_d: rate(),
        nu_l: 0.0,
        g: rate(),
        kappa: rate(),
        gamma,
        gamma_d: rate(),
        gamma_r: rate(),
        j1: rate(),
        j2: 0.01 * gamma,
        delta: rate(),
        drive_target: DriveTarget::Cavity,
        ..Default::default()
    };
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, p) in [("fig1 j1=1", fig1), ("fig5 j1=1.75", fig5), ("random", random)] {
        let (dn, de) = time_domain_pair(&p)?;
        ok &= dn < 1e-3 && de < 1e-3;
        detail.push(format!("{name}: <a+a> {dn:.1e}, rho_ee {de:.1e}"));
    }
    Ok((ok, detail.join("; ")))
}

fn criterion10() -> Outcome {
    let mut fig1 = ScenarioConfig::preset(ScenarioKind::Fig1).params;
    fig1.j1 = 0.1;
    bichromatic_core::experiments::place_pump(&mut fig1, bichromatic_core::experiments::PumpLock::LowerPolariton)
        .map_err(err)?;
    let fig5 = ScenarioConfig::preset(ScenarioKind::Fig5).params;

    // trace annihilation
    let mut leak = 0.0f64;
    for p in [fig1, fig5] {
        let l = build_liouvillians(&p).map_err(err)?;
        leak = leak.max(trace_leak(&l.l0)).max(trace_leak(&l.lplus)).max(trace_leak(&l.lminus));
    }

    // ρ₋₁ = ρ₁†
    let mut herm = 0.0f64;
    for p in [fig1.with_delta(60.0), fig5.with_delta(5.84)] {
        let ss = steady_state(&p).map_err(err)?;
        let (r1, rm1) = (ss.harmonics.get(1).unwrap(), ss.harmonics.get(-1).unwrap());
        let d = r1.dim;
        for i in 0..d {
            for j in 0..d {
                herm = herm.max((rm1.get(i, j) - r1.get(j, i).conj()).norm());
            }
        }
    }

    // convergence of the criterion-1 and criterion-7 observables
    let mut points: Vec<(SystemParams, Observable)> = Vec::new();
    for x in [-30.05, 30.05] {
        points.push((fig1.with_delta(x - (fig1.nu_l - fig1.nu_c)), Observable::Intensity));
    }
    let cfg5 = ScenarioConfig::preset(ScenarioKind::Fig5);
    for d in [-5.84, 0.0, 5.84] {
        points.push((fig5.with_delta(d), cfg5.observable()));
    }
    let mut worst_n = 0.0f64;
    let mut worst_f = 0.0f64;
    for (p, obs) in &points {
        let (base, _) = evaluate_observable(p, obs).map_err(err)?;
        let mut deep = *p;
        deep.cf.n_max = 5;
        let (v, _) = evaluate_observable(&deep, obs).map_err(err)?;
        worst_n = worst_n.max(((v - base) / base).abs());
        let mut big = *p;
        big.hilbert = HilbertConfig::new(4).map_err(err)?;
        let (v, _) = evaluate_observable(&big, obs).map_err(err)?;
        worst_f = worst_f.max(((v - base) / base).abs());
    }

    // determinism across runs and thread counts
    let cfg = preset(ScenarioKind::Fig5, &[("series_values", "1.75"), ("sweep_count", "61")]);
    let run = |threads: usize| -> Result<String, String> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(err)?;
        pool.install(|| run_scenario(&cfg)).map(|r| r.table.to_csv_string()).map_err(err)
    };
    let a = run(1)?;
    let b = run(1)?;
    let c = run(4)?;
    let deterministic = a == b && a == c;

    let ok = leak < 1e-12 && herm < 1e-10 && worst_n < 1e-8 && worst_f < 1e-8 && deterministic;
    Ok((
        ok,
        format!(
            "trace leak {leak:.1e}; hermiticity {herm:.1e}; n_max 3->5 {worst_n:.1e}; fock 3->4 {worst_f:.1e}; identical csv {deterministic}"
        ),
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("vacuum Rabi doublet", criterion1),
        ("higher-order dressed state", criterion2),
        ("supersplitting onset", criterion3),
        ("AC Stark knee", criterion4),
        ("analytic transmission", criterion5),
        ("rho_ee oracle", criterion6),
        ("dressed-state dips", criterion7),
        ("asymmetry law", criterion8),
        ("time-domain equivalence", criterion9),
        ("invariants", criterion10),
    ];
    let mut failed = Vec::new();
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = match f() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        println!(
            "criterion {:>2} {}: {name}: {detail} [{:.1} s]",
            k + 1,
            if ok { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
        if !ok {
            failed.push(k + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria pass");
    } else {
        println!("acceptance: {} of 10 pass; failing {failed:?}", 10 - failed.len());
        std::process::exit(1);
    }
}
