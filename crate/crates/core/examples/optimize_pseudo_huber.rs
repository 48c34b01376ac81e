//! Hand-rolled optimization loop: noisy gradients of a pseudo-Huber
//! objective, power learning rate, and the closed-form FTRL state.

use cohere_opt::ftrl::{OptimizerState, Schedule};
use cohere_opt::problems::make_problem;
use cohere_opt::vector::dist;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> cohere_opt::Result<()> {
    let dim = 5;
    let x_star = vec![2.0, -1.0, 0.5, 3.0, -2.5];
    let problem = make_problem("pseudo_huber", dim, x_star.clone(), 0.5)?;
    let schedule = Schedule::power(problem.g_bound(), 0.75)?;
    let mut rng = ChaCha8Rng::seed_from_u64(42);

    let mut state = OptimizerState::new(vec![0.0; dim]);
    let mut avg = vec![0.0; dim];
    println!("{:>7} {:>12} {:>12} {:>10} {:>8} {:>8}", "t", "gap(x_t)", "gap(avg)", "|x_t-x*|", "S", "Q");
    for t in 1..=20_000u64 {
        let x = state.next_iterate();
        for (a, v) in avg.iter_mut().zip(&x) {
            *a += (v - *a) / t as f64;
        }
        let g = problem.sample_gradient(&x, &mut rng);
        state = state.step(&g, schedule.lr(t, &[]).unwrap_or(0.0))?;
        if t.is_power_of_two() || t == 20_000 {
            println!(
                "{t:>7} {:>12.4e} {:>12.4e} {:>10.4} {:>8.4} {:>8.4}",
                problem.gap(&x),
                problem.gap(&avg),
                dist(&x, &x_star),
                state.s2().sqrt(),
                state.q()
            );
        }
    }
    Ok(())
}
