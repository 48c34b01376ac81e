//! Record a run, then replay it through the lemma checkers. The same run
//! with Q grown by |l|^2 / S instead of |l|^2 / S^2 breaks the per-step
//! inequality.

use cohere_opt::ftrl::QUpdate;
use cohere_opt::harness::{run_one_traced, Checks, ExperimentConfig};
use cohere_opt::oracles::{
    check_diff_regularizers, check_iterate_bound, check_key_inequality, check_partial_regret, check_regret_identity,
};
use cohere_opt::problems::ProblemKind;

fn main() -> cohere_opt::Result<()> {
    let mut cfg = ExperimentConfig::new(ProblemKind::SmoothedLinear, 3, 6.0, 0.6, 0.5, 2000);
    cfg.checks = Checks { key_inequality: false, trace_bounds: false };

    for rule in [QUpdate::Squared, QUpdate::Printed] {
        cfg.q_update = rule;
        let w = run_one_traced(&cfg, 7)?.trace.expect("traced");
        let x_star = w.x_star.clone().expect("x_star");
        println!("Q update: {}", rule.as_str());
        let reports = [
            check_key_inequality(&w)?,
            check_regret_identity(&w, &x_star)?,
            check_partial_regret(&w, w.len() / 2)?,
            check_diff_regularizers(&w, w.len() / 2)?,
            check_iterate_bound(&w)?,
        ];
        for r in &reports {
            println!("  {r}");
        }
    }
    Ok(())
}
