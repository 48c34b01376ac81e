//! Command-line front end. [`main_with_args`] returns the process exit code:
//! 0 success, 1 verification failure, 2 configuration error, 3 run aborted
//! by an inline check.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, CommandFactory, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::ftrl::QUpdate;
use crate::harness::{
    parse_kv, phi_inf_worst, run_experiment, theorem2_bound, theorem3_bound, theorem_f_bound, write_outputs,
    ExperimentConfig,
};
use crate::problems::ProblemKind;
use crate::suite::{run_suite, SuiteOptions, CHECKS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_ABORT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "cohere-opt", version, about = "Parameter-free FTRL with rescaled gradients: experiments, checks, bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Run a multi-seed experiment and write trace.csv / summary.csv.
    Run(RunArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
    /// Print theorem bound values.
    Bounds(BoundsArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// key=value config file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Print the merged config in file format and exit
    #[arg(long)]
    pub dump_config: bool,
    #[arg(long)]
    pub experiment_id: Option<String>,
    /// pseudo_huber | log_coherent | smoothed_linear
    #[arg(long)]
    pub problem: Option<String>,
    #[arg(long)]
    pub dim: Option<String>,
    /// Distance from the start point to the minimizer
    #[arg(long)]
    pub r: Option<String>,
    /// power | adaptive
    #[arg(long)]
    pub schedule: Option<String>,
    /// Gradient bound used by the schedule, or `auto`
    #[arg(long = "G")]
    pub g: Option<String>,
    #[arg(long)]
    pub alpha: Option<String>,
    /// Radius of the uniform-ball gradient noise
    #[arg(long)]
    pub sigma: Option<String>,
    /// Horizon
    #[arg(long = "T")]
    pub horizon: Option<String>,
    /// Seeds, e.g. 1..100 (inclusive) or 1,4,9
    #[arg(long)]
    pub seeds: Option<String>,
    /// `geometric` or a step count
    #[arg(long)]
    pub stride: Option<String>,
    /// Inline checks: key_inequality,trace_bounds or none
    #[arg(long)]
    pub checks: Option<String>,
    /// squared | printed
    #[arg(long)]
    pub q_update: Option<String>,
    /// Output directory
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Also write plot.svg
    #[arg(long)]
    pub plot: bool,
    /// Worker threads (default: all cores)
    #[arg(long, env = "COHERE_OPT_JOBS")]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Run every check
    #[arg(long, conflicts_with = "only")]
    pub all: bool,
    /// Run only these checks (repeatable)
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(CHECKS))]
    pub only: Vec<String>,
    /// Recorded runs for trace checks
    #[arg(long, default_value_t = 100)]
    pub runs: usize,
    /// Steps per recorded run
    #[arg(long, default_value_t = 1000)]
    pub steps: u64,
    /// Q update used by the recorded runs: squared | printed
    #[arg(long, default_value = "squared")]
    pub q_update: String,
    /// Seed for randomly drawn instances
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, env = "COHERE_OPT_JOBS")]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long = "T")]
    pub horizon: u64,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long = "G", default_value_t = 1.0)]
    pub g: f64,
    #[arg(long, default_value_t = 0.0)]
    pub r: f64,
    /// Smoothness constant; enables the adaptive-rate bound
    #[arg(long, requires = "sigma")]
    pub smooth: Option<f64>,
    /// Noise level for the adaptive-rate bound
    #[arg(long, requires = "smooth")]
    pub sigma: Option<f64>,
}

const REQUIRED: [&str; 5] = ["problem", "dim", "r", "alpha", "T"];

/// Merges the config file (if any) with explicit flags, flags winning.
pub fn merged_config(args: &RunArgs) -> Result<ExperimentConfig> {
    let mut kv: BTreeMap<String, String> = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            parse_kv(&text)?
        }
        None => BTreeMap::new(),
    };
    let flags = [
        ("experiment_id", &args.experiment_id),
        ("problem", &args.problem),
        ("dim", &args.dim),
        ("r", &args.r),
        ("schedule", &args.schedule),
        ("G", &args.g),
        ("alpha", &args.alpha),
        ("sigma", &args.sigma),
        ("T", &args.horizon),
        ("seeds", &args.seeds),
        ("stride", &args.stride),
        ("checks", &args.checks),
        ("q_update", &args.q_update),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            kv.insert(k.to_string(), v.clone());
        }
    }
    let missing: Vec<&str> = REQUIRED.iter().copied().filter(|k| !kv.contains_key(*k)).collect();
    if !missing.is_empty() {
        return Err(Error::Config(format!("missing required settings: {}", missing.join(", "))));
    }
    let mut cfg = ExperimentConfig::new(ProblemKind::PseudoHuber, 1, 0.0, 0.75, 0.0, 1);
    cfg.apply_kv(&kv)?;
    cfg.validate()?;
    Ok(cfg)
}

fn usage(sub: &str) -> String {
    let mut cmd = Cli::command();
    cmd.find_subcommand_mut(sub).map(|c| c.render_usage().to_string()).unwrap_or_default()
}

fn exit_for(e: &Error) -> i32 {
    match e {
        Error::CheckAbort(_) => EXIT_ABORT,
        Error::Io(_) | Error::Csv(_) => EXIT_CONFIG,
        _ => EXIT_CONFIG,
    }
}

fn cmd_run(args: &RunArgs) -> i32 {
    let cfg = match merged_config(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}\n\n{}", usage("run"));
            return EXIT_CONFIG;
        }
    };
    if args.dump_config {
        print!("{}", cfg.to_kv());
        return EXIT_OK;
    }
    let out = match run_experiment(&cfg, args.jobs) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_for(&e);
        }
    };
    if let Err(e) = write_outputs(&args.out, std::slice::from_ref(&out), args.plot) {
        eprintln!("error: {e}");
        return exit_for(&e);
    }
    let a = &out.aggregate;
    println!("experiment {} ({} seeds, T={})", cfg.experiment_id, a.seeds, cfg.horizon);
    println!("  mean F(avg x_T) - F* = {:.6e} (stderr {:.2e})", a.gap_avg.mean, a.gap_avg.stderr);
    println!("  mean F(x_T) - F*     = {:.6e} (stderr {:.2e})", a.gap_last.mean, a.gap_last.stderr);
    println!("  mean ||x_T - x*||    = {:.6e}", a.dist_last.mean);
    println!("  max S_T = {:.6}  max Q_T = {:.6}  trace-bound violations = {}", a.max_s, a.max_q, a.trace_bound_violations);
    println!("  theorem2_bound = {:.6e}  theorem3_bound = {:.6e}", a.theorem2_bound, a.theorem3_bound);
    println!("  wrote {}", args.out.display());
    EXIT_OK
}

fn cmd_verify(args: &VerifyArgs) -> i32 {
    let q_update: QUpdate = match args.q_update.parse() {
        Ok(q) => q,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let opts = SuiteOptions { runs: args.runs, steps: args.steps, q_update, seed: args.seed };
    let names: Vec<&str> = if args.all { Vec::new() } else { args.only.iter().map(String::as_str).collect() };
    let run = || run_suite(&names, &opts);
    let result = match args.jobs {
        Some(j) => match rayon::ThreadPoolBuilder::new().num_threads(j).build() {
            Ok(pool) => pool.install(run),
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_CONFIG;
            }
        },
        None => run(),
    };
    let reports = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_for(&e);
        }
    };
    println!("{:<6} {:<18} {:>10} {:>14} {:>10}", "status", "check", "instances", "max_violation", "tolerance");
    let mut ok = true;
    for r in &reports {
        println!(
            "{:<6} {:<18} {:>10} {:>14.3e} {:>10.1e}",
            if r.passed() { "PASS" } else { "FAIL" },
            r.name,
            r.instances,
            r.max_violation,
            r.tolerance
        );
        if !r.passed() {
            ok = false;
            println!("       worst: {}", r.worst.as_deref().unwrap_or("-"));
        }
    }
    if ok {
        EXIT_OK
    } else {
        EXIT_VERIFY
    }
}

fn cmd_bounds(args: &BoundsArgs) -> i32 {
    let res = (|| -> Result<()> {
        let t2 = theorem2_bound(args.horizon, args.alpha, args.g, args.r)?;
        let t3 = theorem3_bound(args.horizon, args.alpha, args.g, args.r)?;
        println!("theorem2_bound = {t2}");
        println!("theorem3_bound = {t3}");
        if let (Some(l), Some(s)) = (args.smooth, args.sigma) {
            let phi = phi_inf_worst(args.r, args.alpha)?;
            let tf = theorem_f_bound(args.horizon, args.alpha, args.g, s, l, phi)?;
            println!("theoremF_bound = {tf}");
        }
        Ok(())
    })();
    match res {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bounds(a) => cmd_bounds(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn bounds_exit_codes() {
        assert_eq!(main_with_args(["cohere-opt", "bounds", "--T", "1", "--alpha", "0.75", "--G", "1", "--r", "0"]), 0);
        assert_eq!(main_with_args(["cohere-opt", "bounds", "--T", "10", "--alpha", "0.5"]), 2);
        assert_eq!(main_with_args(["cohere-opt", "bounds", "--alpha", "0.75"]), 2);
    }

    #[test]
    fn run_needs_horizon() {
        assert_eq!(
            main_with_args(["cohere-opt", "run", "--problem", "pseudo_huber", "--dim", "2", "--r", "1", "--alpha", "0.75"]),
            2
        );
    }
}
