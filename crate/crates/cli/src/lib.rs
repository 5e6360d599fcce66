//! Front end for the two-photon benches: configuration parsing, table
//! output and the no-signaling audit.

pub mod audit;
pub mod cli;
pub mod config;
pub mod run;
pub mod table;

pub use audit::{run_no_signal_audit, AuditGrid, AuditTarget, NoSignalReport, Verdict};
pub use config::{parse_config, serialize, BenchKind, ConfigError, Format, RunConfig};
pub use run::{execute, Execution};
pub use table::{emit_table, render_table, Cell, EmitError, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] nosig_core::Error),
    #[error(transparent)]
    Emit(#[from] EmitError),
    #[error("cannot read `{path}`: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}
