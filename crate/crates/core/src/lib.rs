//! Chronology-respecting software effort estimation.
//!
//! Models for projects completed in a given year are built only from
//! projects completed in earlier years. Two schemes are provided: sequential
//! accumulation (a growing portfolio of completed projects) and a moving
//! window (the same procedure rerun after repeatedly dropping the oldest
//! year). Leave-one-year-out, mean and median baselines are available for
//! comparison.
//!
//! The crate is organised bottom-up:
//!
//! - [`ingest`] loads, validates, partitions and cleans project datasets;
//! - [`statkit`] holds least squares, stepwise selection, Cook's distance
//!   filtering and the Shapiro-Wilk, Mann-Whitney and Wilcoxon tests;
//! - [`metrics`] computes RE, MSE and TAE on the raw effort scale;
//! - [`chrono`] builds train/test folds and runs the per-fold procedure;
//! - [`report`] reads and writes result files and compares two approaches;
//! - [`cli`] wires everything together for the command-line driver.

pub mod chrono;
pub mod cli;
pub mod error;
pub mod ingest;
pub mod metrics;
pub mod report;
pub mod statkit;

pub use error::{Error, Result};
