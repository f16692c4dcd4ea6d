//! Experiment harness for the `apwb-core` solver: configuration, drivers,
//! metrics and CSV output.

pub mod config;
pub mod error;
pub mod experiments;
pub mod metrics;
pub mod output;
