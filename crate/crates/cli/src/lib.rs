//! Config-driven experiment runner for permutation-based zero-noise
//! extrapolation.

pub mod config;
pub mod pipeline;
pub mod svg;

pub use config::ExperimentConfig;
pub use pipeline::{cmd_scaling, cmd_sweep, cmd_vqe, cmd_zne, DepthUnreachable};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// Runtime failure while computing or writing results.
    pub const FAILURE: i32 = 1;
    /// Unreadable or invalid configuration.
    pub const CONFIG: i32 = 2;
    /// Auto-depth search did not reach the accuracy target.
    pub const DEPTH_UNREACHABLE: i32 = 3;
}
