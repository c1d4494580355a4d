//! File formats, reports, and the `relfix` command-line tool built on
//! `relfix-core`.

pub mod cli;
pub mod digest;
pub mod ingest;
pub mod report;
pub mod run;

pub use run::{run, Command, Format, Outcome, RunConfig};
