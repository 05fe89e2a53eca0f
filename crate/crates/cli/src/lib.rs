//! Command-line pipelines over the core library: scenario experiments,
//! wind-direction clustering, 2-D scaling and the two-process distance
//! table. The binary in `main.rs` is a thin clap wrapper over these
//! functions; integration and acceptance tests call them directly.

pub mod commands;
pub mod config;
pub mod experiment;
pub mod wind;

pub use commands::{cmd_cluster, cmd_mds, cmd_motivating, cmd_simulate};
pub use config::RunConfig;
