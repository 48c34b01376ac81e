//! Multi-seed experiment runner, theorem bounds, statistics and output.

pub mod bounds;
mod config;
mod output;
mod run;
mod stats;

pub use bounds::{
    adaptive_s_bound, phi_inf_worst, power_q_bound, power_s_bound, theorem2_bound, theorem3_bound,
    theorem_f_bound,
};
pub use config::{format_seeds, parse_kv, parse_seeds, Checks, ExperimentConfig, Stride};
pub use output::{mean_curves, render_svg, write_outputs, write_summary_csv, write_trace_csv, TRACE_HEADER};
pub use run::{
    aggregate, run_experiment, run_one, run_one_traced, AggregateSummary, CsvRow, ExperimentOutput,
    RunOutput, RunSummary, KEY_TOL, TRACE_BOUND_TOL,
};
pub use stats::{rate_slope, Stats};
