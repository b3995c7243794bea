//! Batch front end for `coulomb-core`: job specifications, JSON input and
//! output, result caching and series comparison.

pub mod diff;
pub mod error;
pub mod expr;
pub mod job;
pub mod json;
pub mod schema;

pub use diff::{diff_series, DiffReport, DiffStatus};
pub use error::{CliError, Result, EXIT_DIFFERENT, EXIT_DOMAIN, EXIT_IO, EXIT_OK};
pub use job::{envelope_path, execute, run, Artifacts, Command, JobSpec, SliceInput, THREADS_ENV};
