//! Experiment harness around [`evtlab_core`]: configuration, orbit-to-fit
//! pipelines, and file reporting.
//!
//! The core crate computes; this crate orchestrates. A single
//! [`config::ExperimentConfig`] names a map, an observable, and the block
//! layout `k = n m`; [`pipeline`] turns it into fitted records (single runs,
//! sweeps over the block count `n`, scans over the reference point `zeta`),
//! and [`report`] persists CSV tables, plot data, histograms, and JSON
//! documents. All outputs are deterministic for a fixed configuration and
//! seed regardless of worker count.

pub mod config;
pub mod pipeline;
pub mod report;
