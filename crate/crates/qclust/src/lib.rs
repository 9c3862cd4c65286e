//! Quantum clustering for unsupervised outlier detection.
//!
//! The crate builds a potential surface over a dataset, descends each data
//! point to its local minimum, merges the settled points into clusters, and
//! flags members of small clusters as outliers. The examples directory
//! demonstrates each capability end to end:
//!
//! ```text
//! cargo run -p qclust --example detect_outliers
//! cargo run -p qclust --example potential_surface
//! cargo run -p qclust --example descend_point
//! cargo run -p qclust --example sigma_estimation
//! cargo run -p qclust --example sigma_sweep
//! cargo run -p qclust --example inverse_mode
//! cargo run -p qclust --example pca_pipeline
//! cargo run -p qclust --example generate_scenarios
//! cargo run -p qclust --example air_quality
//! ```
//!
//! A thin `qc` binary exposes the same pipeline for scripting; see the
//! repository README for its subcommands.

pub mod cli;
pub mod clustering;
pub mod datagen;
pub mod error;
pub mod io;
pub mod optimizer;
pub mod potential;
pub mod preprocess;

pub use error::{QcError, Result};
