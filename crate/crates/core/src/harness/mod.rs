//! Configuration files, trace output, reference oracles, the property audit
//! and the `run` entry point used by the command-line tool.

pub mod audit;
pub mod config;
pub mod emit;
pub mod oracle;
pub mod run;

pub use audit::{run_audit, AuditLine, AuditOptions};
pub use config::{parse_config, Kind, ProblemConfig, TraceFormat};
pub use emit::{emit_trace, trace_to_csv, trace_to_json};
pub use oracle::{oracle_linear, oracle_vi, oracle_zero, project_intersection, OracleMethod, OracleSolution};
pub use run::{
    run, run_file, Overrides, RunOutcome, EXIT_AUDIT, EXIT_CONFIG, EXIT_DIVERGED, EXIT_IO, EXIT_MAX_ITER, EXIT_OK, EXIT_ORACLE,
};
