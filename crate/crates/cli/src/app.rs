// SPDX-License-Identifier: Apache-2.0
//! Argument parsing and dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use crate::commands;
use crate::config::{parse_scalar, ExperimentConfig};
use crate::error::{CliError, CliResult};
use crate::lists::{parse_f64_list, parse_usize_list};

#[derive(Debug, Parser)]
#[command(name = "superwave", version, about = "Exponentially small above-barrier reflection: Stokes data, superadiabatic frames, birth profile and reflected wave packets")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Config file: JSON object or flat `section.key = value` lines.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Override any config key, e.g. `--set regions.c1=2` (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Potential family: eckart, gaussian, rational.
    #[arg(long, global = true)]
    pub family: Option<String>,
    #[arg(long, global = true)]
    pub v0: Option<f64>,
    #[arg(long, global = true)]
    pub a: Option<f64>,
    /// Energy for single-energy commands.
    #[arg(long, global = true)]
    pub energy: Option<f64>,
    /// ε ladder, e.g. `0.2,0.1,0.05`.
    #[arg(long, global = true, value_name = "LIST")]
    pub eps: Option<String>,
    /// Coefficient source for superadiabatic frames: numeric or pole.
    #[arg(long, global = true)]
    pub source: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Critical point and Stokes data at one energy (JSON).
    Stokes,
    /// a_j^(n) tables and x_n, y_n, z_n samples (CSV).
    Coeffs {
        /// Largest even n of the a-table.
        #[arg(long, default_value_t = 40)]
        n_max: usize,
        /// γ of the a-table; defaults to the Stokes value.
        #[arg(long)]
        gamma: Option<f64>,
        /// Orders sampled, e.g. `1..=8`.
        #[arg(long, default_value = "1..=8")]
        orders: String,
        /// ξ sample points, e.g. `-3:3:61`.
        #[arg(long, default_value = "-3:3:61", allow_hyphen_values = true)]
        xi: String,
    },
    /// ρ_n, |k_n| and the Gaussian coupling on a ξ-grid (CSV).
    Frame {
        /// Projection order; defaults to the optimal n_ε − 1.
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, default_value = "-4:4:401", allow_hyphen_values = true)]
        xi: String,
    },
    /// Stationary solution and superadiabatic amplitudes (CSV).
    Stationary {
        /// x sample points; defaults to x_r ± 6.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
    },
    /// The birth profile of c₂ against the error-function law (CSV).
    Profile {
        /// x sample points; defaults to x_r ± 3.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
    },
    /// Time-dependent reflected wave at a list of times (CSV + JSON).
    Evolve {
        /// Times; alternatively give trajectory positions with --q-list.
        #[arg(long, value_name = "LIST", conflicts_with = "q_list", allow_hyphen_values = true)]
        t_list: Option<String>,
        /// Trajectory positions q_t; each is converted to its time.
        #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
        q_list: Option<String>,
        /// quadrature, eff, leading, expl, near, mod, far or gauss.
        #[arg(long, default_value = "quadrature")]
        field: String,
        #[arg(long)]
        density_e0: Option<f64>,
        #[arg(long)]
        density_s: Option<f64>,
        #[arg(long)]
        density_amplitude: Option<f64>,
        /// Energy window `E1,E2`.
        #[arg(long, value_name = "LIST")]
        density_window: Option<String>,
        /// Region constants `delta,beta,c0,c1`.
        #[arg(long, value_name = "LIST")]
        regions: Option<String>,
        /// x-range `lo,hi`; defaults to ±8 packet widths around the trajectory.
        #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
        x_range: Option<String>,
        /// Also write a gnuplot script for the emitted CSV files.
        #[arg(long)]
        plot_script: bool,
    },
    /// Runs the acceptance checks and writes a report (exit 1 on failure).
    Verify {
        /// Smaller grids and fewer sample times.
        #[arg(long)]
        quick: bool,
        /// Subset of check ids, e.g. `1,2,8..=11`.
        #[arg(long)]
        only: Option<String>,
        /// Multiplies every tolerance-type threshold.
        #[arg(long)]
        tolerance_scale: Option<f64>,
    },
}

fn list_err(flag: &str) -> impl FnOnce(crate::lists::ListError) -> CliError + '_ {
    move |e| CliError::config(format!("--{flag}: {e}"))
}

/// Collects dotted overrides from `--set` and the dedicated flags.
pub fn overrides(cli: &Cli) -> CliResult<Vec<(String, Value)>> {
    let g = &cli.global;
    let mut out = Vec::new();
    for kv in &g.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| CliError::config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        out.push((k.trim().to_string(), parse_scalar(v)));
    }
    let mut put = |k: &str, v: Value| out.push((k.to_string(), v));
    if let Some(f) = &g.family {
        put("potential.family", Value::from(f.as_str()));
    }
    if let Some(v) = g.v0 {
        put("potential.v0", Value::from(v));
    }
    if let Some(v) = g.a {
        put("potential.a", Value::from(v));
    }
    if let Some(v) = g.energy {
        put("energy.e", Value::from(v));
    }
    if let Some(s) = &g.eps {
        put("eps", Value::from(parse_f64_list(s).map_err(list_err("eps"))?));
    }
    if let Some(s) = &g.source {
        put("coeff_source", Value::from(s.as_str()));
    }
    if let Some(s) = g.seed {
        put("seed", Value::from(s));
    }
    if let Some(p) = &g.out {
        put("output", Value::from(p.to_string_lossy().into_owned()));
    }
    match &cli.command {
        Command::Evolve { density_e0, density_s, density_amplitude, density_window, regions, .. } => {
            if let Some(v) = density_e0 {
                put("density.e0", Value::from(*v));
            }
            if let Some(v) = density_s {
                put("density.s", Value::from(*v));
            }
            if let Some(v) = density_amplitude {
                put("density.amplitude", Value::from(*v));
            }
            if let Some(w) = density_window {
                let w = parse_f64_list(w).map_err(list_err("density-window"))?;
                if w.len() != 2 {
                    return Err(CliError::config("--density-window expects two numbers"));
                }
                put("energy.window", Value::from(w));
            }
            if let Some(r) = regions {
                let r = parse_f64_list(r).map_err(list_err("regions"))?;
                if r.len() != 4 {
                    return Err(CliError::config("--regions expects delta,beta,c0,c1"));
                }
                for (k, v) in ["delta", "beta", "c0", "c1"].iter().zip(r) {
                    put(&format!("regions.{k}"), Value::from(v));
                }
            }
        }
        Command::Verify { quick, tolerance_scale, .. } => {
            if *quick {
                put("verify.quick", Value::Bool(true));
            }
            if let Some(v) = tolerance_scale {
                put("verify.tolerance_scale", Value::from(*v));
            }
        }
        _ => {}
    }
    Ok(out)
}

pub fn load_config(cli: &Cli) -> CliResult<ExperimentConfig> {
    let text = match &cli.global.config {
        Some(p) => Some(std::fs::read_to_string(p).map_err(|e| CliError::config(format!("cannot read {}: {e}", p.display())))?),
        None => None,
    };
    ExperimentConfig::load(text.as_deref(), &overrides(cli)?)
}

/// Dispatches a parsed command line. Returns the exit status.
pub fn execute(cli: &Cli) -> CliResult<i32> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Stokes => commands::stokes(&cfg),
        Command::Coeffs { n_max, gamma, orders, xi } => {
            let orders = parse_usize_list(orders).map_err(list_err("orders"))?;
            let xi = parse_f64_list(xi).map_err(list_err("xi"))?;
            commands::coeffs(&cfg, *n_max, *gamma, &orders, &xi)
        }
        Command::Frame { order, xi } => {
            let xi = parse_f64_list(xi).map_err(list_err("xi"))?;
            commands::frame(&cfg, *order, &xi)
        }
        Command::Stationary { x } => {
            let x = x.as_deref().map(parse_f64_list).transpose().map_err(list_err("x"))?;
            commands::stationary(&cfg, x, false)
        }
        Command::Profile { x } => {
            let x = x.as_deref().map(parse_f64_list).transpose().map_err(list_err("x"))?;
            commands::stationary(&cfg, x, true)
        }
        Command::Evolve { t_list, q_list, field, x_range, plot_script, .. } => {
            let times = match (t_list, q_list) {
                (Some(t), _) => commands::Times::T(parse_f64_list(t).map_err(list_err("t-list"))?),
                (None, Some(q)) => commands::Times::Q(parse_f64_list(q).map_err(list_err("q-list"))?),
                (None, None) => commands::Times::Q(vec![0.9, 2.0, 5.0]),
            };
            let range = x_range.as_deref().map(parse_f64_list).transpose().map_err(list_err("x-range"))?;
            let range = match range.as_deref() {
                None => None,
                Some([lo, hi]) if lo < hi => Some((*lo, *hi)),
                Some(_) => return Err(CliError::config("--x-range expects lo,hi with lo < hi")),
            };
            commands::evolve(&cfg, &times, field, range, *plot_script)
        }
        Command::Verify { only, .. } => {
            let only: Vec<u32> = match only {
                Some(s) => parse_usize_list(s).map_err(list_err("only"))?.into_iter().map(|v| v as u32).collect(),
                None => Vec::new(),
            };
            if let Some(bad) = only.iter().find(|id| !(1..=11).contains(*id)) {
                return Err(CliError::config(format!("--only: no check with id {bad}")));
            }
            commands::verify(&cfg, &only)
        }
    }
}

/// Full entry point: parse `argv`, run, and map every outcome to an exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("superwave: {e}");
            e.exit_code()
        }
    }
}
