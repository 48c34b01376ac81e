// SGD with a tuned-for-r=1 step size vs the parameter-free optimizer, as the
// true distance to the minimizer grows.

use cohere_opt::baselines::{sgd_step, SgdState};
use cohere_opt::ftrl::{OptimizerState, Schedule};
use cohere_opt::problems::{Problem, ProblemKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const T: u64 = 20_000;

fn main() -> cohere_opt::Result<()> {
    println!("{:>6} {:>14} {:>14}", "r", "SGD gap", "FTRL gap");
    for r in [1.0, 10.0, 100.0, 1000.0] {
        let problem = Problem::new(ProblemKind::PseudoHuber, 1, vec![r], 0.2)?;
        let schedule = Schedule::power(problem.g_bound(), 0.75)?;

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut sgd = SgdState::new(vec![0.0]);
        for t in 1..=T {
            let g = problem.sample_gradient(sgd.x(), &mut rng);
            sgd = sgd_step(&sgd, &g, 1.0 / (t as f64).sqrt());
        }

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut ftrl = OptimizerState::new(vec![0.0]);
        let mut x = ftrl.next_iterate();
        for t in 1..=T {
            let g = problem.sample_gradient(&x, &mut rng);
            ftrl = ftrl.step(&g, schedule.lr_with_sum(t, 0.0))?;
            x = ftrl.next_iterate();
        }
        println!("{r:>6} {:>14.4e} {:>14.4e}", problem.gap(sgd.x()), problem.gap(&x));
    }
    Ok(())
}
