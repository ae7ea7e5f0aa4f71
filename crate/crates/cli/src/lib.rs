//! Toolkit plumbing around `pqn-core`: configuration, file formats,
//! reports, parallel streaming extraction, and pipeline orchestration.
//! The `pqn` binary is a thin command layer over these modules.

pub mod config;
pub mod formats;
pub mod pipeline;
pub mod report;
pub mod stream;
pub mod units;
