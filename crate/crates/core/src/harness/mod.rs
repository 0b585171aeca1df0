//! Convergence studies, the damping demonstration, timing, and report files.

mod bench;
mod config;
mod damping;
mod metrics;
mod report;
mod run;
mod stability;
mod study;

pub use bench::{bench, BenchEntry, BenchReport};
pub use config::{parse_config_text, parse_list, read_config_file, RunConfig, Scheme};
pub use damping::{run_damping_demo, run_damping_demo_until, DampingReport, OscillationMetrics, SchemeDamping};
pub use metrics::{linf_error, observed_order};
pub use report::{
    read_report_csv, sidecar_path, write_grid_csv, write_json, write_report, write_snapshots, write_solve, CsvRow,
    RunMetadata, CSV_HEADER,
};
pub use run::{build_stepper, solve, solve_problem, Snapshot, SolveOutcome, EXACT_REF_MAX_UNKNOWNS};
pub use stability::{stability_check, StabilityReport};
pub use study::{run_convergence, run_self_convergence, ConvergenceReport, ConvergenceRow, StudyKind};
