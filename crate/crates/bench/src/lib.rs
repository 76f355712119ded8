//! Batch experiments over the chanshort receivers: GMI sweeps, SNR
//! asymptotics, coefficient traces, permutation studies, tap design and
//! link-level block error rates. Results are CSV tables with a JSON sidecar.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

pub use config::{ChannelSpec, ExperimentConfig, ExperimentKind, LinkSettings, PermSettings};
pub use error::{BenchError, BenchResult};
pub use output::Table;
