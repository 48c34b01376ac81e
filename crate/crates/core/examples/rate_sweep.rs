//! Multi-seed experiment: mean gaps, empirical rate, bounds, and the CSV /
//! SVG artifacts the CLI writes. Output goes to target/rate_sweep/.

use std::path::Path;

use cohere_opt::harness::{mean_curves, rate_slope, run_experiment, write_outputs, ExperimentConfig, Stride};
use cohere_opt::problems::ProblemKind;

fn main() -> cohere_opt::Result<()> {
    let mut experiments = Vec::new();
    for alpha in [0.6, 0.75, 0.9] {
        let mut cfg = ExperimentConfig::new(ProblemKind::PseudoHuber, 5, 5.0, alpha, 0.5, 100_000);
        cfg.experiment_id = format!("alpha_{alpha}");
        cfg.seeds = (1..=16).collect();
        cfg.stride = Stride::Every(100);
        let out = run_experiment(&cfg, None)?;

        let curves = mean_curves(&out);
        let pick = |t: u64| curves.iter().find(|c| c.0 == t).map(|c| (t as f64, c.1)).expect("recorded");
        let pts = [pick(100), pick(1_000), pick(10_000), pick(100_000)];
        let a = &out.aggregate;
        println!(
            "alpha {alpha}: mean gap(avg) {:.3e} +- {:.1e}, slope {:.3} (guaranteed {:.2}), bound {:.3e}",
            a.gap_avg.mean,
            a.gap_avg.stderr,
            rate_slope(&pts)?,
            -(1.0 - alpha),
            a.theorem2_bound
        );
        experiments.push(out);
    }
    let dir = Path::new("target/rate_sweep");
    write_outputs(dir, &experiments, true)?;
    println!("wrote {}/trace.csv, summary.csv, plot.svg", dir.display());
    println!("\nconfig of the last experiment, as accepted by `cohere-opt run --config`:");
    print!("{}", experiments.last().expect("ran").config.to_kv());
    Ok(())
}
