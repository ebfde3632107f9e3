//! Command-line front end of `cylwave-core`: profile and config formats,
//! experiment orchestration and CSV output.
//!
//! Commands:
//!
//! * `impedance-trace`: `det2(z(r)) / (n^3 + 1)` along the span for the
//!   Möbius march, the naive Riccati integrator and, where available, the
//!   closed form.
//! * `convergence`: error of `det2(z(r1))` against a reference per scheme
//!   and step count.
//! * `scatter`: total cross section and backscatter amplitude over `ka`.
//! * `field`: total pressure on a square grid around the cylinder.

// negated comparisons reject NaN on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod profile;
pub mod run;

pub use config::{parse_args, parse_config, Args, Command, FileConfig, RunConfig};
pub use error::{CliError, CliResult};
pub use run::{render, run, Output};
