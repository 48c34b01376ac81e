//! The verification suite behind `cohere-opt verify`: every checker run over
//! its standard instance set.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ftrl::{QUpdate, ScheduleKind};
use crate::harness::{
    adaptive_s_bound, power_q_bound, power_s_bound, run_one_traced, Checks, ExperimentConfig, Stride,
};
use crate::oracles::{self, CheckReport, TraceWindow};
use crate::problems::ProblemKind;
use crate::regularizer::{
    grad_phi_star, lambert_w0, psi, psi_prime, psi_star, psi_star_prime, RegularizerParams,
};
use crate::vector::norm;

pub const CHECKS: [&str; 15] = [
    "conjugacy",
    "inverse_maps",
    "branch_continuity",
    "lambert",
    "argmin_oracle",
    "key_inequality",
    "regret_identity",
    "partial_regret",
    "diff_regularizers",
    "iterate_bound",
    "trace_bounds",
    "sum_k",
    "last_average",
    "bregman",
    "hessian",
];

/// Checks that need recorded optimizer runs.
const TRACE_CHECKS: [&str; 6] =
    ["key_inequality", "regret_identity", "partial_regret", "diff_regularizers", "iterate_bound", "trace_bounds"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    /// Recorded runs for the trace checks.
    pub runs: usize,
    /// Steps per recorded run.
    pub steps: u64,
    pub q_update: QUpdate,
    /// Seed for the randomly drawn instances.
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { runs: 100, steps: 1000, q_update: QUpdate::Squared, seed: 1 }
    }
}

/// Configuration of recorded run `i`: cycles through problems, schedules
/// and `alpha in {0.6, 0.75}`.
pub fn trace_config(i: usize, steps: u64, q_update: QUpdate) -> ExperimentConfig {
    let problem = ProblemKind::ALL[i % 3];
    let schedule = if (i / 3).is_multiple_of(2) { ScheduleKind::Power } else { ScheduleKind::Adaptive };
    let alpha = if (i / 6).is_multiple_of(2) { 0.6 } else { 0.75 };
    let mut c = ExperimentConfig::new(problem, 1 + i % 4, 1.0 + 2.0 * (i % 5) as f64, alpha, 0.5, steps);
    c.experiment_id = "verify".into();
    c.schedule = schedule;
    c.seeds = vec![i as u64 + 1];
    c.stride = Stride::Geometric;
    // the trace checkers judge the run; inline aborts would hide doctored traces
    c.checks = Checks { key_inequality: false, trace_bounds: false };
    c.q_update = q_update;
    c
}

/// Records `opts.runs` traces in parallel.
pub fn record_traces(opts: &SuiteOptions) -> Result<Vec<(ExperimentConfig, TraceWindow)>> {
    (0..opts.runs)
        .into_par_iter()
        .map(|i| {
            let c = trace_config(i, opts.steps, opts.q_update);
            let out = run_one_traced(&c, c.seeds[0])?;
            Ok((c, out.trace.expect("traced run keeps its trace")))
        })
        .collect()
}

/// Signed log grid `±10^k`, `k` evenly spaced in `[-3, 3]`.
pub fn signed_log_grid(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        let v = 10f64.powf(-3.0 + 6.0 * i as f64 / (n - 1) as f64);
        out.push(v);
        out.push(-v);
    }
    out
}

/// `S in {1, 2, 2.5, sqrt 7}` crossed with `Q in {0, 0.5, 2 ln S}`.
pub fn param_grid() -> Vec<RegularizerParams> {
    let mut out = Vec::new();
    for s in [1.0, 2.0, 2.5, 7f64.sqrt()] {
        for q in [0.0, 0.5, 2.0 * f64::ln(s)] {
            out.push(RegularizerParams::new(s, q).expect("grid params are valid"));
        }
    }
    out
}

fn conjugacy() -> CheckReport {
    let mut rep = CheckReport::new("conjugacy", 1e-6);
    for p in param_grid() {
        for x in signed_log_grid(61) {
            let d = psi(x, &p) - oracles::conjugate_by_maximization(x, &p);
            rep.record(d.abs(), || format!("x={x:e} S2={} Q={}", p.s2(), p.q()));
        }
    }
    rep
}

fn inverse_maps() -> CheckReport {
    let mut rep = CheckReport::new("inverse_maps", 1e-8);
    for p in param_grid() {
        for x in signed_log_grid(61) {
            let back = psi_star_prime(psi_prime(x, &p), &p);
            rep.record((back - x).abs() / x.abs(), || format!("x={x:e} S2={} Q={}", p.s2(), p.q()));
        }
    }
    rep
}

/// Values and slopes on both sides of the branch points.
fn branch_continuity() -> CheckReport {
    let mut cont = CheckReport::new("branch_continuity", 1e-10);
    for p in param_grid() {
        let xb = p.branch_x();
        let (a, b) = (xb, xb.next_up());
        for (name, f) in [("psi", psi as fn(f64, &RegularizerParams) -> f64), ("psi_prime", psi_prime)] {
            let (fa, fb) = (f(a, &p), f(b, &p));
            cont.record((fa - fb).abs() / fa.abs().max(1.0), || format!("{name} at x0={xb:e}"));
        }
        let (ta, tb) = (p.s2(), p.s2().next_up());
        for (name, f) in [("psi_star", psi_star as fn(f64, &RegularizerParams) -> f64), ("psi_star_prime", psi_star_prime)] {
            let (fa, fb) = (f(ta, &p), f(tb, &p));
            cont.record((fa - fb).abs() / fa.abs().max(1.0), || format!("{name} at S2={ta:e}"));
        }
    }
    cont
}

fn lambert() -> Result<CheckReport> {
    let mut rep = CheckReport::new("lambert", 1e-12);
    let n = 10_000;
    for i in 0..n {
        let x = 10f64.powf(-6.0 + 12.0 * i as f64 / (n - 1) as f64);
        let w = lambert_w0(x)?;
        let resid = (w * w.exp() - x).abs() / x;
        let lo = 0.5 * x.ln_1p();
        let hi = x.ln_1p();
        let sandwich = (lo - w).max(w - hi).max(0.0);
        rep.record(resid.max(sandwich), || format!("x={x:e} w={w:e}"));
    }
    Ok(rep)
}

fn argmin_oracle(rng: &mut ChaCha8Rng) -> CheckReport {
    let mut rep = CheckReport::new("argmin_oracle", 1e-6);
    for _ in 0..1000 {
        let s2 = rng.random_range(1.0..7.0);
        let q = rng.random_range(0.0..f64::ln(s2).max(0.0) + 0.5);
        let p = RegularizerParams::from_s2(s2, q).expect("valid");
        let th = 10f64.powf(rng.random_range(-3.0..2.0));
        let r = oracles::argmin_radial(th, &p);
        let m = norm(&grad_phi_star(&[th], &p));
        rep.record((r - m).abs() / m, || format!("theta={th:e} S2={s2} Q={q}"));
    }
    rep
}

fn trace_check(name: &str, traces: &[(ExperimentConfig, TraceWindow)], rng: &mut ChaCha8Rng) -> Result<CheckReport> {
    let tol = match name {
        "regret_identity" => oracles::IDENTITY_TOL,
        "trace_bounds" => crate::harness::TRACE_BOUND_TOL,
        _ => oracles::INEQUALITY_TOL,
    };
    let mut rep = CheckReport::new(name, tol);
    for (c, w) in traces {
        let n = w.len();
        let tag = |r: &mut CheckReport| {
            if let Some(worst) = r.worst.as_mut() {
                *worst = format!("{} seed={} {worst}", c.key(), c.seeds[0]);
            }
        };
        let mut sub = match name {
            "key_inequality" => oracles::check_key_inequality(w)?,
            "regret_identity" => {
                let mut r = oracles::check_regret_identity(w, w.x_star.as_ref().expect("x_star"))?;
                r.merge(oracles::check_regret_identity(w, &vec![0.0; w.dim()])?);
                r
            }
            "partial_regret" | "diff_regularizers" => {
                let f = if name == "partial_regret" {
                    oracles::check_partial_regret
                } else {
                    oracles::check_diff_regularizers
                };
                let mut r = CheckReport::new(name, tol);
                for a in [1, n / 2, n, rng.random_range(1..=n)] {
                    r.merge(f(w, a.max(1))?);
                }
                r
            }
            "iterate_bound" => oracles::check_iterate_bound(w)?,
            "trace_bounds" => trace_bounds(c, w)?,
            other => return Err(Error::Config(format!("`{other}` is not a trace check"))),
        };
        tag(&mut sub);
        rep.merge(sub);
    }
    Ok(rep)
}

/// Stored `S_t`, `Q_t` against the schedule's bounds and `Q <= 2 ln S`.
pub fn trace_bounds(c: &ExperimentConfig, w: &TraceWindow) -> Result<CheckReport> {
    let mut rep = CheckReport::new("trace_bounds", crate::harness::TRACE_BOUND_TOL);
    let (sb, qb) = match c.schedule {
        ScheduleKind::Power => (power_s_bound(c.alpha)?, Some(power_q_bound(c.alpha)?)),
        ScheduleKind::Adaptive => (adaptive_s_bound(c.alpha)?, None),
    };
    for r in &w.records {
        let s = r.s2.sqrt();
        let mut v = (s - sb).max(r.q - 2.0 * s.ln());
        if let Some(qb) = qb {
            v = v.max(r.q - qb);
        }
        rep.record(v, || format!("t={} S={s} Q={}", r.t, r.q));
    }
    Ok(rep)
}

fn sum_k() -> Result<CheckReport> {
    let mut rep = CheckReport::new("sum_k", 0.0);
    for a in [0.55, 0.6, 0.75, 0.9] {
        for t in 2..=2000 {
            rep.merge(oracles::check_sum_k(t, a)?);
        }
    }
    Ok(rep)
}

fn last_average(rng: &mut ChaCha8Rng) -> Result<CheckReport> {
    let mut rep = CheckReport::new("last_average", 1e-10);
    for _ in 0..10_000 {
        let n = rng.random_range(1..=200);
        let mut etas: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        etas.sort_by(|a, b| b.total_cmp(a));
        let qs: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        rep.merge(oracles::check_last_average(&etas, &qs)?);
    }
    Ok(rep)
}

fn random_params(rng: &mut ChaCha8Rng) -> RegularizerParams {
    let s = rng.random_range(2.0..2.7);
    let q = rng.random_range(0.0..2.0 * f64::ln(s));
    RegularizerParams::new(s, q).expect("valid")
}

fn random_point(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    let scale = 10f64.powf(rng.random_range(-2.0..1.5));
    (0..d).map(|_| scale * rng.random_range(-1.0..1.0)).collect()
}

fn bregman(rng: &mut ChaCha8Rng) -> Result<CheckReport> {
    let mut rep = CheckReport::new("bregman", oracles::INEQUALITY_TOL);
    for _ in 0..10_000 {
        let p = random_params(rng);
        let (a, b) = (random_point(rng, 3), random_point(rng, 3));
        rep.merge(oracles::check_bregman_bounds(&a, &b, &p)?);
    }
    Ok(rep)
}

fn hessian(rng: &mut ChaCha8Rng) -> Result<CheckReport> {
    let mut rep = CheckReport::new("hessian", oracles::FD_TOL);
    let mut n = 0;
    while n < 1000 {
        let p = random_params(rng);
        let z = random_point(rng, 3);
        match oracles::check_hessian_sandwich(&z, &p) {
            Ok(r) => {
                rep.merge(r);
                n += 1;
            }
            Err(Error::Domain(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(rep)
}

/// Runs the named checks in order; an empty list means all of them.
pub fn run_suite(names: &[&str], opts: &SuiteOptions) -> Result<Vec<CheckReport>> {
    let names: Vec<&str> = if names.is_empty() { CHECKS.to_vec() } else { names.to_vec() };
    for n in &names {
        if !CHECKS.contains(n) {
            return Err(Error::Config(format!("unknown check `{n}` (known: {})", CHECKS.join(", "))));
        }
    }
    let traces = if names.iter().any(|n| TRACE_CHECKS.contains(n)) { record_traces(opts)? } else { Vec::new() };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    names
        .iter()
        .map(|&n| match n {
            "conjugacy" => Ok(conjugacy()),
            "inverse_maps" => Ok(inverse_maps()),
            "branch_continuity" => Ok(branch_continuity()),
            "lambert" => lambert(),
            "argmin_oracle" => Ok(argmin_oracle(&mut rng)),
            "sum_k" => sum_k(),
            "last_average" => last_average(&mut rng),
            "bregman" => bregman(&mut rng),
            "hessian" => hessian(&mut rng),
            t => trace_check(t, &traces, &mut rng),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_check_is_config_error() {
        assert!(matches!(run_suite(&["nope"], &SuiteOptions::default()), Err(Error::Config(_))));
    }

    #[test]
    fn small_trace_suite_passes_and_printed_rule_fails() {
        let opts = SuiteOptions { runs: 12, steps: 200, ..Default::default() };
        for r in run_suite(&TRACE_CHECKS, &opts).unwrap() {
            assert!(r.passed(), "{r}");
        }
        let bad = SuiteOptions { q_update: QUpdate::Printed, ..opts };
        let r = run_suite(&["key_inequality"], &bad).unwrap();
        assert!(!r[0].passed());
    }

    #[test]
    fn trace_configs_cover_the_grid() {
        let cs: Vec<_> = (0..12).map(|i| trace_config(i, 10, QUpdate::Squared)).collect();
        for p in ProblemKind::ALL {
            for s in [ScheduleKind::Power, ScheduleKind::Adaptive] {
                for a in [0.6, 0.75] {
                    assert!(cs.iter().any(|c| c.problem == p && c.schedule == s && c.alpha == a));
                }
            }
        }
    }
}
