//! File formats, experiment configuration and the sweep harness around
//! `specreg-core`. The `specreg` binary is a thin command line over this
//! crate.

pub mod config;
pub mod error;
pub mod experiment;
pub mod io;

pub use config::{load_config, parse_config, Dataset, ExperimentConfig, ExperimentKind, KPolicy};
pub use error::{Error, Result};
pub use experiment::{
    run_alpha_sweep, run_bipartite_comparison, run_experiment, run_noise_sweep, run_toy, Table,
};
