//! Reproducible runs on top of [`segangle_core`]: a rayon chunk executor, run reports,
//! CSV/JSON output and the drivers behind the `segangle` command line.
pub mod csv;
pub mod error;
pub mod exec;
pub mod report;
pub mod runs;
pub mod suite;

pub use error::CliError;
pub use exec::Parallel;
pub use report::RunReport;
