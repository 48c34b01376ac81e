use cohere_opt::ftrl::ScheduleKind;
use cohere_opt::harness::{
    phi_inf_worst, rate_slope, run_experiment, run_one, theorem_f_bound, write_trace_csv, ExperimentConfig, Stride,
};
use cohere_opt::problems::ProblemKind;

fn desk(alpha: f64) -> ExperimentConfig {
    ExperimentConfig::new(ProblemKind::PseudoHuber, 5, 5.0, alpha, 0.5, 10_000)
}

#[test]
fn same_seed_gives_byte_identical_csv() {
    let c = desk(0.75);
    let csv = || {
        let mut c = c.clone();
        c.stride = Stride::Every(1);
        let out = run_experiment(&c, Some(1)).unwrap();
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &[out]).unwrap();
        buf
    };
    assert_eq!(csv(), csv());
}

#[test]
fn sigma_zero_single_step_starts_at_x0() {
    let c = ExperimentConfig::new(ProblemKind::LogCoherent, 2, 10.0, 0.6, 0.0, 1);
    let out = run_one(&c, 1).unwrap();
    assert_eq!(out.rows[0].dist_to_opt, 10.0);
    assert_eq!(out.summary.gap_last, out.summary.gap_avg);
}

#[test]
fn stderr_matches_sample_std_over_sqrt_n() {
    let mut c = desk(0.75);
    c.horizon = 300;
    c.seeds = (1..=100).collect();
    let out = run_experiment(&c, None).unwrap();
    let v: Vec<f64> = out.runs.iter().map(|r| r.summary.gap_avg).collect();
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let sd = (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!((out.aggregate.gap_avg.stderr - sd / 10.0).abs() < 1e-12 * sd);
}

#[test]
fn running_average_rate_at_alpha_075() {
    let mut c = desk(0.75);
    c.horizon = 10_000;
    c.seeds = (1..=10).collect();
    c.stride = Stride::Every(10);
    let out = run_experiment(&c, None).unwrap();
    let pts: Vec<(f64, f64)> = [100u64, 1000, 10_000]
        .iter()
        .map(|&t| {
            let s: f64 = out.runs.iter().map(|r| r.rows.iter().find(|x| x.t == t).unwrap().f_gap_avg).sum();
            (t as f64, s / out.runs.len() as f64)
        })
        .collect();
    assert!(rate_slope(&pts).unwrap() <= -0.15);
}

#[test]
fn adaptive_rate_bound_holds_in_mean() {
    for alpha in [0.6, 0.75] {
        let mut c = desk(alpha);
        c.schedule = ScheduleKind::Adaptive;
        c.horizon = 5000;
        c.seeds = (1..=100).collect();
        let out = run_experiment(&c, None).unwrap();
        let g = c.g_bound().unwrap();
        let bound = theorem_f_bound(c.horizon, alpha, g, c.sigma, 1.0, phi_inf_worst(c.r, alpha).unwrap()).unwrap();
        let mean = out.runs.iter().map(|r| r.summary.gap_avg.max(0.0).powf(1.0 - alpha)).sum::<f64>() / 100.0;
        assert!(mean <= bound, "alpha={alpha}: {mean} > {bound}");
        assert_eq!(out.aggregate.trace_bound_violations, 0);
    }
}
