//! Guarantee values across horizons and distances.

use cohere_opt::harness::{phi_inf_worst, power_q_bound, power_s_bound, theorem2_bound, theorem3_bound, theorem_f_bound};

fn main() -> cohere_opt::Result<()> {
    for alpha in [0.6, 0.75, 0.9] {
        println!("alpha = {alpha}: S_T <= {:.4}, Q_T <= {:.4}", power_s_bound(alpha)?, power_q_bound(alpha)?);
        println!("  {:>9} {:>6} {:>14} {:>14} {:>14}", "T", "r", "avg (thm 2)", "last (thm 3)", "E gap^(1-a)");
        for t in [100u64, 10_000, 1_000_000] {
            for r in [1.0, 10.0] {
                let f = theorem_f_bound(t, alpha, 1.0, 0.5, 1.0, phi_inf_worst(r, alpha)?)?;
                println!(
                    "  {t:>9} {r:>6} {:>14.4e} {:>14.4e} {:>14.4e}",
                    theorem2_bound(t, alpha, 1.0, r)?,
                    theorem3_bound(t, alpha, 1.0, r)?,
                    f
                );
            }
        }
    }
    Ok(())
}
