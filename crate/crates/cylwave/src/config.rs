//! Command-line flags, optional JSON config file and their resolution into
//! a validated [`RunConfig`]. Flags override file values.

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use cylwave_core::matricant::Scheme;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{CliError, CliResult};
use crate::profile::{from_json, ProfileSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    ImpedanceTrace,
    Convergence,
    Scatter,
    Field,
}

/// Impedance imposed at the inner radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Inner {
    /// Solid core of the innermost material.
    Solid,
    /// Traction-free inner wall.
    Free,
}

#[derive(Debug, Parser)]
#[command(name = "cylwave", version, about = "Wave impedance and acoustic scattering of layered elastic cylinders")]
pub struct Args {
    /// impedance-trace, convergence, scatter or field
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// Same as the positional command
    #[arg(long = "command", value_enum, value_name = "NAME")]
    pub command_flag: Option<Command>,
    /// JSON file with defaults for any of the options below
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Radial profile JSON
    #[arg(long, value_name = "PATH")]
    pub profile: Option<PathBuf>,
    /// Nondimensional frequency
    #[arg(long, conflicts_with = "sweep")]
    pub ka: Option<f64>,
    /// Frequency sweep: min, max and sample count
    #[arg(long, num_args = 3, value_names = ["MIN", "MAX", "N"], allow_negative_numbers = true)]
    pub sweep: Option<Vec<f64>>,
    /// Circumferential order
    #[arg(long)]
    pub n: Option<u32>,
    /// Axial wavenumber
    #[arg(long, allow_negative_numbers = true)]
    pub kz: Option<f64>,
    /// Scheme name, or `all` for convergence
    #[arg(long)]
    pub scheme: Option<String>,
    /// Number of equal steps
    #[arg(long)]
    pub steps: Option<usize>,
    /// Step counts of a convergence study
    #[arg(long, value_delimiter = ',')]
    pub step_counts: Option<Vec<usize>>,
    /// Inner radius of the integration span
    #[arg(long)]
    pub r0: Option<f64>,
    /// Outer radius of the integration span
    #[arg(long)]
    pub r1: Option<f64>,
    /// Inner boundary condition
    #[arg(long, value_enum)]
    pub inner: Option<Inner>,
    /// Output CSV (stdout when absent)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Extra CSV with partial-wave coefficients (scatter)
    #[arg(long, value_name = "PATH")]
    pub coeffs: Option<PathBuf>,
    /// Half-width of the square field grid
    #[arg(long)]
    pub extent: Option<f64>,
    /// Grid points per side
    #[arg(long)]
    pub points: Option<usize>,
    /// Worker threads
    #[arg(long, env = "CYLWAVE_THREADS")]
    pub threads: Option<usize>,
}

/// Values accepted from a JSON config file; same names as the flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub struct FileConfig {
    pub command: Option<Command>,
    pub profile: Option<PathBuf>,
    pub ka: Option<f64>,
    pub sweep: Option<Sweep>,
    pub n: Option<u32>,
    pub kz: Option<f64>,
    pub scheme: Option<String>,
    pub steps: Option<usize>,
    pub step_counts: Option<Vec<usize>>,
    pub r0: Option<f64>,
    pub r1: Option<f64>,
    pub inner: Option<Inner>,
    pub out: Option<PathBuf>,
    pub coeffs: Option<PathBuf>,
    pub extent: Option<f64>,
    pub points: Option<usize>,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub min: f64,
    pub max: f64,
    pub samples: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        if self.samples == 1 {
            return vec![self.min];
        }
        let d = (self.max - self.min) / (self.samples - 1) as f64;
        (0..self.samples).map(|i| if i + 1 == self.samples { self.max } else { self.min + d * i as f64 }).collect()
    }
}

fn scheme_names<S: Serializer>(schemes: &[Scheme], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(schemes.iter().map(|x| x.name()))
}

/// Fully resolved run. Serialized into the header of every CSV.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub profile_path: PathBuf,
    pub profile: ProfileSpec,
    /// Single frequency, or the sweep samples.
    pub ka: Vec<f64>,
    pub sweep: Option<Sweep>,
    pub n: u32,
    pub kz: f64,
    #[serde(serialize_with = "scheme_names")]
    pub schemes: Vec<Scheme>,
    pub steps: usize,
    pub step_counts: Vec<usize>,
    pub r0: f64,
    pub r1: f64,
    pub inner: Inner,
    pub out: Option<PathBuf>,
    pub coeffs: Option<PathBuf>,
    pub extent: f64,
    pub points: usize,
    /// Does not affect results, so it is left out of the header.
    #[serde(skip)]
    pub threads: usize,
}

pub const DEFAULT_KA: f64 = 5.0;
pub const DEFAULT_STEPS: usize = 500;
pub const DEFAULT_STEP_COUNTS: [usize; 5] = [250, 500, 1000, 2000, 4000];
pub const DEFAULT_EXTENT: f64 = 3.0;
pub const DEFAULT_POINTS: usize = 121;

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Parses flags (including the program name) into a validated config.
pub fn parse_args<I, T>(args: I) -> CliResult<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = Args::try_parse_from(args).map_err(|e| CliError::usage(e.to_string().trim_start_matches("error: ").trim_end().to_string()))?;
    let file = load_file_config(&args)?;
    parse_config(args, file)
}

/// Reads the `--config` file, if any.
pub fn load_file_config(args: &Args) -> CliResult<Option<FileConfig>> {
    match &args.config {
        Some(p) => Ok(Some(from_json::<FileConfig>(&read(p)?)?)),
        None => Ok(None),
    }
}

fn parse_scheme(name: &str, allow_all: bool) -> CliResult<Vec<Scheme>> {
    if name == "all" {
        return if allow_all {
            Ok(Scheme::ALL.to_vec())
        } else {
            Err(CliError::usage("--scheme all is only valid for convergence"))
        };
    }
    name.parse::<Scheme>()
        .map(|s| vec![s])
        .map_err(|_| CliError::usage(format!("--scheme: unknown scheme '{name}'")))
}

/// Merges flags over file values and validates the result.
pub fn parse_config(args: Args, file: Option<FileConfig>) -> CliResult<RunConfig> {
    let file = file.unwrap_or_default();
    if let (Some(a), Some(b)) = (args.command, args.command_flag) {
        if a != b {
            return Err(CliError::usage("--command disagrees with the positional command"));
        }
    }
    let command = args
        .command
        .or(args.command_flag)
        .or(file.command)
        .ok_or_else(|| CliError::usage("missing command (impedance-trace, convergence, scatter or field)"))?;
    let profile_path = args.profile.or(file.profile).ok_or_else(|| CliError::usage("missing --profile"))?;
    let profile_spec = ProfileSpec::parse(&read(&profile_path)?)?;
    let profile = profile_spec.build()?;
    let (lo, hi) = profile.support();

    let flag_freq = args.ka.is_some() || args.sweep.is_some();
    let (ka, sweep) = if flag_freq { (args.ka, args.sweep.as_deref().map(sweep_from_flag).transpose()?) } else { (file.ka, file.sweep) };
    if ka.is_some() && sweep.is_some() {
        return Err(CliError::usage("--ka conflicts with --sweep"));
    }
    let ka = match (ka, sweep) {
        (_, Some(s)) => {
            if !(s.min > 0.0 && s.max >= s.min && s.max.is_finite() && s.samples >= 1) {
                return Err(CliError::usage("--sweep needs 0 < MIN <= MAX and N >= 1"));
            }
            s.values()
        }
        (Some(k), None) => vec![k],
        (None, None) => vec![DEFAULT_KA],
    };
    if ka.iter().any(|k| !(*k > 0.0 && k.is_finite())) {
        return Err(CliError::usage("--ka must be positive"));
    }
    if sweep.is_some() && !matches!(command, Command::Scatter) {
        return Err(CliError::usage("--sweep is only valid for scatter"));
    }

    let n = args.n.or(file.n).unwrap_or(0);
    let kz = args.kz.or(file.kz).unwrap_or(0.0);
    if !kz.is_finite() {
        return Err(CliError::usage("--kz must be finite"));
    }
    if matches!(command, Command::Scatter | Command::Field) && kz != 0.0 {
        return Err(CliError::usage("--kz: scattering is solved for normal incidence only"));
    }
    let scheme_name = args.scheme.or(file.scheme).unwrap_or_else(|| {
        if command == Command::Convergence { "all".to_string() } else { "lp4".to_string() }
    });
    let schemes = parse_scheme(&scheme_name, command == Command::Convergence)?;
    let steps = args.steps.or(file.steps).unwrap_or(DEFAULT_STEPS);
    if steps == 0 {
        return Err(CliError::usage("--steps must be at least 1"));
    }
    let step_counts = args.step_counts.or(file.step_counts).unwrap_or_else(|| DEFAULT_STEP_COUNTS.to_vec());
    if step_counts.is_empty() || step_counts.contains(&0) {
        return Err(CliError::usage("--step-counts must be positive"));
    }
    let r0 = args.r0.or(file.r0).unwrap_or(lo);
    let r1 = args.r1.or(file.r1).unwrap_or(hi);
    if !(r0 >= lo && r1 <= hi && r0 < r1) {
        return Err(CliError::usage(format!("--r0/--r1 must satisfy {lo} <= r0 < r1 <= {hi}")));
    }
    if matches!(command, Command::Scatter | Command::Field) && ((hi - 1.0).abs() > 1e-12 || r0 != lo || r1 != hi) {
        return Err(CliError::usage("scattering needs a profile normalized to outer radius 1 and the full span"));
    }
    if r0 == 0.0 && !matches!(command, Command::Scatter | Command::Field) {
        return Err(CliError::usage("--r0 must be positive for integration"));
    }
    let extent = args.extent.or(file.extent).unwrap_or(DEFAULT_EXTENT);
    let points = args.points.or(file.points).unwrap_or(DEFAULT_POINTS);
    if !(extent > 0.0 && extent.is_finite()) || points < 2 {
        return Err(CliError::usage("--extent must be positive and --points at least 2"));
    }
    let threads = match args.threads.or(file.threads) {
        Some(0) => return Err(CliError::usage("--threads must be at least 1")),
        Some(t) => t,
        None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    };
    Ok(RunConfig {
        command,
        profile_path,
        profile: profile_spec,
        ka,
        sweep,
        n,
        kz,
        schemes,
        steps,
        step_counts,
        r0,
        r1,
        inner: args.inner.or(file.inner).unwrap_or(Inner::Solid),
        out: args.out.or(file.out),
        coeffs: args.coeffs.or(file.coeffs),
        extent,
        points,
        threads,
    })
}

fn sweep_from_flag(v: &[f64]) -> CliResult<Sweep> {
    let samples = v[2];
    if !(samples >= 1.0 && samples.fract() == 0.0) {
        return Err(CliError::usage("--sweep: N must be a positive integer"));
    }
    Ok(Sweep { min: v[0], max: v[1], samples: samples as usize })
}
