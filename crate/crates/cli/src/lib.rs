// SPDX-License-Identifier: Apache-2.0
//! Command-line front end, configuration and the verification suite for
//! `superwave-core`.

// `!(a < b)` guards also reject NaN, which is the point.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod commands;
pub mod config;
pub mod error;
pub mod lists;
pub mod output;
pub mod verify;

pub use app::run;
pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};
pub use verify::{verify_suite, CheckRecord, VerificationReport};

/// Caps the global worker pool from `SUPERWAVE_THREADS`, if set.
pub fn init_thread_pool() -> Result<(), String> {
    match std::env::var("SUPERWAVE_THREADS") {
        Ok(v) => {
            let n: usize = v.trim().parse().map_err(|_| format!("SUPERWAVE_THREADS must be a positive integer, got `{v}`"))?;
            if n == 0 {
                return Err("SUPERWAVE_THREADS must be at least 1".into());
            }
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
        }
        Err(_) => Ok(()),
    }
}
