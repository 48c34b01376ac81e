use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::bounds::{adaptive_s_bound, power_q_bound, power_s_bound, theorem2_bound, theorem3_bound};
use super::config::ExperimentConfig;
use super::stats::Stats;
use crate::error::{Error, Result};
use crate::ftrl::{OptimizerState, QUpdate, ScheduleKind, INITIAL_S2};
use crate::oracles::TraceWindow;
use crate::regularizer::{phi, RegularizerParams};
use crate::vector::{dist, dot, norm, norm_sq, scale, sub};

/// Slack on the trace-level bounds for `S_T` and `Q_T`.
pub const TRACE_BOUND_TOL: f64 = 1e-12;
/// Largest key-inequality term tolerated before a run aborts.
pub const KEY_TOL: f64 = 1e-9;

/// One row of the per-step CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsvRow {
    pub experiment_id: String,
    pub seed: u64,
    pub t: u64,
    pub eta: f64,
    pub f_gap_last: f64,
    pub f_gap_avg: f64,
    pub dist_to_opt: f64,
    #[serde(rename = "S2")]
    pub s2: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    pub theta_norm: f64,
    pub check_violations: u64,
}

/// End-of-run figures for one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub config_key: String,
    pub seed: u64,
    /// `F(avg x_T) - F*`
    pub gap_avg: f64,
    /// `F(x_T) - F*`
    pub gap_last: f64,
    /// `||x_T - x*||`
    pub dist_last: f64,
    pub s_final: f64,
    pub q_final: f64,
    /// Largest per-step key-inequality term (`-inf` when the check is off).
    pub max_key_term: f64,
    pub key_violations: u64,
    pub trace_bound_violations: u64,
    pub theorem2_bound: f64,
    pub theorem3_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub rows: Vec<CsvRow>,
    pub summary: RunSummary,
    /// Full step records; only kept by [`run_one_traced`].
    pub trace: Option<TraceWindow>,
}

/// Generator for `(experiment_id, seed)`; step `t` reads from stream `t`.
fn base_rng(experiment_id: &str, seed: u64) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(experiment_id.as_bytes());
    h.update([0u8]);
    h.update(seed.to_le_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}

fn step_rng(base: &ChaCha8Rng, t: u64) -> ChaCha8Rng {
    let mut r = base.clone();
    r.set_stream(t);
    r.set_word_pos(0);
    r
}

/// Runs one seed of the experiment.
pub fn run_one(cfg: &ExperimentConfig, seed: u64) -> Result<RunOutput> {
    run_impl(cfg, seed, false)
}

/// As [`run_one`], also returning every step as a [`TraceWindow`].
pub fn run_one_traced(cfg: &ExperimentConfig, seed: u64) -> Result<RunOutput> {
    run_impl(cfg, seed, true)
}

struct TraceBounds {
    s: f64,
    q: Option<f64>,
}

impl TraceBounds {
    fn for_config(cfg: &ExperimentConfig) -> Result<Self> {
        Ok(match cfg.schedule {
            ScheduleKind::Power => Self { s: power_s_bound(cfg.alpha)?, q: Some(power_q_bound(cfg.alpha)?) },
            ScheduleKind::Adaptive => Self { s: adaptive_s_bound(cfg.alpha)?, q: None },
        })
    }

    fn violated(&self, s2: f64, q: f64) -> bool {
        let s = s2.sqrt();
        s > self.s + TRACE_BOUND_TOL
            || self.q.is_some_and(|qb| q > qb + TRACE_BOUND_TOL)
            || q > 2.0 * s.ln() + TRACE_BOUND_TOL
    }
}

fn run_impl(cfg: &ExperimentConfig, seed: u64, keep_trace: bool) -> Result<RunOutput> {
    cfg.validate()?;
    let problem = cfg.problem()?;
    let schedule = cfg.schedule()?;
    let bounds = TraceBounds::for_config(cfg)?;
    let x0 = cfg.x0();
    let x_star = problem.minimizer().to_vec();
    let base = base_rng(&cfg.experiment_id, seed);

    let mut state = OptimizerState::new(x0.clone()).with_q_update(cfg.q_update);
    let mut trace = keep_trace.then(|| {
        let mut w = TraceWindow::new(x0.clone(), cfg.q_update).with_x_star(x_star.clone());
        w.g_bound = Some(schedule.g());
        w.alpha = Some(cfg.alpha);
        w
    });
    let mut rows = Vec::new();
    let mut avg = x0.clone();
    let mut past_sq = 0.0;
    // regularizers of the analysis, tracked separately from the state so a
    // doctored Q update cannot hide its own violations
    let (mut can_s2, mut can_q) = (INITIAL_S2, 0.0);
    let mut x = state.next_iterate();
    let mut h_prev = -1.0; // H_1(x_1) = phi_1(0)
    let mut max_key = f64::NEG_INFINITY;
    let mut trace_viol = 0u64;

    for t in 1..=cfg.horizon {
        let inv = 1.0 / t as f64;
        for (a, xi) in avg.iter_mut().zip(&x) {
            *a += (xi - *a) * inv;
        }
        let mut rng = step_rng(&base, t);
        let g = problem.sample_gradient(&x, &mut rng);
        let eta = schedule.lr_with_sum(t, past_sq);
        let next = state.step(&g, eta)?;
        past_sq += norm_sq(&g);
        let x_next = next.next_iterate();

        if cfg.checks.key_inequality {
            let ell = scale(&g, eta);
            let l2 = norm_sq(&ell);
            can_s2 += l2;
            can_q += QUpdate::Squared.increment(l2, can_s2);
            let p = RegularizerParams::from_s2(can_s2, can_q)?;
            let xc = sub(&x_next, &x0);
            let h_next = phi(&xc, &p) - dot(next.theta(), &xc);
            let k = h_prev - h_next + dot(&ell, &sub(&x, &x0));
            max_key = max_key.max(k);
            if k > KEY_TOL {
                return Err(Error::CheckAbort(format!(
                    "key inequality violated: experiment={} seed={seed} t={t} term={k:.6e} eta={eta:.6e} \
                     S2={} Q={} rule={}",
                    cfg.experiment_id,
                    next.s2(),
                    next.q(),
                    cfg.q_update.as_str()
                )));
            }
            h_prev = h_next;
        }
        if cfg.checks.trace_bounds && bounds.violated(next.s2(), next.q()) {
            trace_viol += 1;
        }
        if cfg.stride.records(t, cfg.horizon) {
            rows.push(CsvRow {
                experiment_id: cfg.experiment_id.clone(),
                seed,
                t,
                eta,
                f_gap_last: problem.gap(&x),
                f_gap_avg: problem.gap(&avg),
                dist_to_opt: dist(&x, &x_star),
                s2: next.s2(),
                q: next.q(),
                theta_norm: norm(next.theta()),
                check_violations: trace_viol,
            });
        }
        if let Some(w) = trace.as_mut() {
            w.push_state(x.clone(), g, eta, &next);
        }
        if t == cfg.horizon {
            let g_bound = schedule.g();
            let summary = RunSummary {
                config_key: cfg.key(),
                seed,
                gap_avg: problem.gap(&avg),
                gap_last: problem.gap(&x),
                dist_last: dist(&x, &x_star),
                s_final: next.s2().sqrt(),
                q_final: next.q(),
                max_key_term: max_key,
                key_violations: 0,
                trace_bound_violations: trace_viol,
                theorem2_bound: theorem2_bound(cfg.horizon, cfg.alpha, g_bound, cfg.r)?,
                theorem3_bound: theorem3_bound(cfg.horizon, cfg.alpha, g_bound, cfg.r)?,
            };
            return Ok(RunOutput { rows, summary, trace });
        }
        state = next;
        x = x_next;
    }
    unreachable!("horizon >= 1 is validated")
}

/// Pooled statistics over the seeds of one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateSummary {
    pub config_key: String,
    pub seeds: usize,
    pub gap_avg: Stats,
    pub gap_last: Stats,
    pub dist_last: Stats,
    pub max_s: f64,
    pub max_q: f64,
    pub max_key_term: f64,
    pub key_violations: u64,
    pub trace_bound_violations: u64,
    pub theorem2_bound: f64,
    pub theorem3_bound: f64,
}

pub fn aggregate(summaries: &[RunSummary]) -> Result<AggregateSummary> {
    let first = summaries.first().ok_or_else(|| Error::Contract("aggregate of no runs".into()))?;
    if summaries.iter().any(|s| s.config_key != first.config_key) {
        return Err(Error::Contract("aggregate over heterogeneous configurations".into()));
    }
    let col = |f: fn(&RunSummary) -> f64| summaries.iter().map(f).collect::<Vec<f64>>();
    let fmax = |f: fn(&RunSummary) -> f64| summaries.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    Ok(AggregateSummary {
        config_key: first.config_key.clone(),
        seeds: summaries.len(),
        gap_avg: Stats::of(&col(|s| s.gap_avg))?,
        gap_last: Stats::of(&col(|s| s.gap_last))?,
        dist_last: Stats::of(&col(|s| s.dist_last))?,
        max_s: fmax(|s| s.s_final),
        max_q: fmax(|s| s.q_final),
        max_key_term: fmax(|s| s.max_key_term),
        key_violations: summaries.iter().map(|s| s.key_violations).sum(),
        trace_bound_violations: summaries.iter().map(|s| s.trace_bound_violations).sum(),
        theorem2_bound: first.theorem2_bound,
        theorem3_bound: first.theorem3_bound,
    })
}

/// All seeds of one configuration, in seed-list order.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub config: ExperimentConfig,
    pub runs: Vec<RunOutput>,
    pub aggregate: AggregateSummary,
}

/// Runs every seed in parallel on `jobs` threads (all cores when `None`).
pub fn run_experiment(cfg: &ExperimentConfig, jobs: Option<usize>) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
    let runs: Vec<RunOutput> = pool.install(|| cfg.seeds.par_iter().map(|&s| run_one(cfg, s)).collect::<Result<Vec<_>>>())?;
    let summaries: Vec<RunSummary> = runs.iter().map(|r| r.summary.clone()).collect();
    let aggregate = aggregate(&summaries)?;
    Ok(ExperimentOutput { config: cfg.clone(), runs, aggregate })
}
