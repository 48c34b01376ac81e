use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cohere-opt")).args(args).output().expect("spawn")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const HEADER: &str = "experiment_id,seed,t,eta,f_gap_last,f_gap_avg,dist_to_opt,S2,Q,theta_norm,check_violations";

fn run_small(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "run", "--problem", "pseudo_huber", "--dim", "5", "--r", "5", "--alpha", "0.75", "--sigma", "0.5", "--T",
        "2000", "--seeds", "1..3", "--out",
    ];
    let o = out.to_str().unwrap();
    args.push(o);
    args.extend_from_slice(extra);
    cli(&args)
}

#[test]
fn run_writes_trace_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_small(dir.path(), &["--plot"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(trace.lines().next().unwrap(), HEADER);
    // powers of two up to 1024 plus T, three seeds
    assert_eq!(trace.lines().count(), 1 + 3 * 12);
    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(summary.lines().next().unwrap().contains("theorem2_bound,theorem3_bound"));
    assert!(fs::read_to_string(dir.path().join("plot.svg")).unwrap().contains("<svg"));
}

fn eta_column(dir: &Path) -> Vec<String> {
    let trace = fs::read_to_string(dir.join("trace.csv")).unwrap();
    trace.lines().skip(1).map(|l| l.split(',').nth(3).unwrap().to_string()).collect()
}

#[test]
fn adaptive_schedule_changes_eta() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(code(&run_small(a.path(), &[])), 0);
    assert_eq!(code(&run_small(b.path(), &["--schedule", "adaptive"])), 0);
    let (pa, pb) = (eta_column(a.path()), eta_column(b.path()));
    assert_eq!(pa.len(), pb.len());
    assert_ne!(pa, pb);
    // power schedule at t = 1: 1/G with G = 1.5
    assert_eq!(pa[0].parse::<f64>().unwrap(), 1.0 / 1.5);
}

#[test]
fn missing_horizon_is_a_config_error() {
    let o = cli(&["run", "--problem", "pseudo_huber", "--dim", "5", "--r", "5", "--alpha", "0.75"]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("T") && err.contains("Usage"), "{err}");
}

#[test]
fn config_file_round_trip_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&[
        "run", "--problem", "log_coherent", "--dim", "3", "--r", "2.5", "--alpha", "0.6", "--sigma", "0.1", "--T",
        "500", "--seeds", "1..4,9", "--schedule", "adaptive", "--stride", "10", "--dump-config",
    ]);
    assert_eq!(code(&o), 0);
    let dumped = stdout(&o);
    let path = dir.path().join("cfg.txt");
    fs::write(&path, &dumped).unwrap();
    let again = cli(&["run", "--config", path.to_str().unwrap(), "--dump-config"]);
    assert_eq!(stdout(&again), dumped);
    let over = cli(&["run", "--config", path.to_str().unwrap(), "--T", "77", "--dump-config"]);
    let text = stdout(&over);
    assert!(text.contains("T=77\n") && text.contains("problem=log_coherent\n"));

    fs::write(&path, format!("{dumped}colour=blue\n")).unwrap();
    assert_eq!(code(&cli(&["run", "--config", path.to_str().unwrap()])), 2);
}

#[test]
fn bad_values_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run_small(dir.path(), &["--alpha", "1.0"])), 2);
    assert_eq!(code(&run_small(dir.path(), &["--problem", "rosenbrock"])), 2);
    assert_eq!(code(&run_small(dir.path(), &["--seeds", "3..1"])), 2);
    assert_eq!(code(&cli(&["run", "--bogus-flag"])), 2);
}

#[test]
fn doctored_update_aborts_run_with_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_small(dir.path(), &["--q-update", "printed"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("key inequality"));
}

#[test]
fn verify_exit_codes() {
    let o = cli(&["verify", "--only", "key_inequality", "--runs", "12", "--steps", "300"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS   key_inequality"));
    let o = cli(&["verify", "--only", "key_inequality", "--runs", "12", "--steps", "300", "--q-update", "printed"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("worst:"));
    let o = cli(&["verify", "--only", "sum_k", "--only", "lambert"]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&cli(&["verify", "--only", "nonsense"])), 2);
}

#[test]
fn bounds_command() {
    let o = cli(&["bounds", "--T", "1", "--alpha", "0.75", "--G", "1", "--r", "0"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("theorem2_bound = 1\n"));
    let o = cli(&["bounds", "--T", "10000", "--alpha", "0.75", "--G", "1", "--r", "5"]);
    let t2: f64 = stdout(&o).lines().next().unwrap().split(" = ").nth(1).unwrap().parse().unwrap();
    assert!((t2 - 37.944_234_561_801_87).abs() < 1e-10 * t2);
    let o = cli(&["bounds", "--T", "100", "--alpha", "0.75", "--smooth", "1", "--sigma", "0.5"]);
    assert!(stdout(&o).contains("theoremF_bound"));
    assert_eq!(code(&cli(&["bounds", "--T", "100", "--alpha", "0.5"])), 2);
}

#[test]
fn help_lists_every_run_flag() {
    let o = cli(&["run", "--help"]);
    assert_eq!(code(&o), 0);
    let h = stdout(&o);
    for flag in [
        "--config", "--dump-config", "--problem", "--dim", "--r", "--schedule", "--G", "--alpha", "--sigma", "--T",
        "--seeds", "--stride", "--checks", "--q-update", "--out", "--plot", "--jobs",
    ] {
        assert!(h.contains(flag), "missing {flag}");
    }
}

#[test]
fn jobs_env_and_flag_give_identical_output() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(code(&run_small(a.path(), &["--jobs", "1"])), 0);
    let o = Command::new(env!("CARGO_BIN_EXE_cohere-opt"))
        .env("COHERE_OPT_JOBS", "3")
        .args(["run", "--problem", "pseudo_huber", "--dim", "5", "--r", "5", "--alpha", "0.75", "--sigma", "0.5"])
        .args(["--T", "2000", "--seeds", "1..3", "--out", b.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read(a.path().join("trace.csv")).unwrap(), fs::read(b.path().join("trace.csv")).unwrap());
    assert_eq!(fs::read(a.path().join("summary.csv")).unwrap(), fs::read(b.path().join("summary.csv")).unwrap());
}
