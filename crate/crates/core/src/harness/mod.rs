//! Experiment runner: configs, logs, runs and comparisons.

mod config;
mod log;
pub mod repro;
mod run;

pub use config::{
    build_config, default_wdbc_path, parse_config, parse_entries, parse_override, Entry,
    ProblemSpec, RunConfig,
};
pub use log::{format_float, LogSchema, LogWriter};
pub use run::{
    build_problem, compare, compare_table, run, run_on, summary_text, CompareRow, DATA_STREAM,
    INIT_STREAM,
};
