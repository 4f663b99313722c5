//! The `bcnf` command-line tool: single-point proofs, parameter sweeps,
//! simulation-based classification and phase-portrait export.
//!
//! Exit codes: 0 success or CHAOS, 1 STOP, 2 usage error, 3 I/O error.

pub mod config;
pub mod grid;
pub mod report;
pub mod sweep;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use bcnf_core::sim::{attractor_points, classify_point, SimOptions};
use bcnf_core::{prove_chaos, Params, ProverOptions, Verdict};
use clap::{Args, Parser, Subcommand};

use crate::grid::{GridSpec, Range};
use crate::report::{xy, PhaseDoc, ProveDoc, SimulateDoc};
use crate::sweep::SweepOptions;

pub const EXIT_OK: i32 = 0;
pub const EXIT_STOP: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "bcnf",
    version,
    about = "Chaos certification for the border-collision normal form"
)]
pub struct Cli {
    /// File of `key = value` lines mirroring the long flags; flags on the
    /// command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the decision procedure at one parameter point and print JSON.
    #[command(args_override_self = true)]
    Prove {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        prover: ProverArgs,
    },
    /// Classify a tau_L by tau_R grid and write CSV.
    #[command(args_override_self = true)]
    Sweep(SweepArgs),
    /// Classify the attractor of the origin's orbit by simulation.
    #[command(args_override_self = true)]
    Simulate {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Export the trapping region, its image and attractor points as JSON.
    #[command(args_override_self = true)]
    Phase(PhaseArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub tau_l: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub delta_l: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub tau_r: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub delta_r: f64,
}

impl ParamArgs {
    pub fn params(&self) -> Result<Params, bcnf_core::ParamError> {
        Params::new(self.tau_l, self.delta_l, self.tau_r, self.delta_r)
    }
}

#[derive(Debug, Clone, Args)]
pub struct ProverArgs {
    /// Largest p tried for p_max.
    #[arg(long, default_value_t = 15, value_parser = clap::value_parser!(u32).range(2..))]
    pub p_cap: u32,
    /// Largest number of right-branch steps followed before giving up.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u32).range(1..))]
    pub chi_r_cap: u32,
    /// Accept matrices whose norm exceeds 1 in every direction at step 5.
    #[arg(long)]
    pub accept_all_above: bool,
}

impl ProverArgs {
    pub fn options(&self) -> ProverOptions {
        ProverOptions {
            p_cap: self.p_cap as usize,
            chi_r_cap: self.chi_r_cap as usize,
            accept_all_above: self.accept_all_above,
        }
    }
}

fn positive_real(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(_) => Err("must be a positive finite number".into()),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimArgs {
    /// Iterates discarded before measuring.
    #[arg(long, default_value_t = 10_000)]
    pub transient: usize,
    /// Iterates averaged for the Lyapunov estimate.
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    /// Longest period searched for.
    #[arg(long, default_value_t = 30, value_parser = clap::value_parser!(u64).range(1..))]
    pub period_cap: u64,
    /// Distance below which an iterate counts as a return.
    #[arg(long, default_value_t = 1e-10, value_parser = positive_real)]
    pub tol: f64,
    /// Orbits leaving this disc are reported as diverged.
    #[arg(long, default_value_t = 1e8, value_parser = positive_real)]
    pub divergence_radius: f64,
    /// Selects the initial tangent vector.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl SimArgs {
    pub fn options(&self) -> SimOptions {
        SimOptions {
            transient: self.transient,
            samples: self.samples as usize,
            divergence_radius: self.divergence_radius,
            period_cap: self.period_cap as usize,
            period_tol: self.tol,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// tau_L axis as lo:hi:steps.
    #[arg(long, default_value = "0.05:3:300", allow_hyphen_values = true)]
    pub tl_range: Range,
    /// tau_R axis as lo:hi:steps.
    #[arg(long, default_value = "-3:3:300", allow_hyphen_values = true)]
    pub tr_range: Range,
    #[arg(long, default_value_t = 0.2, allow_hyphen_values = true)]
    pub delta_l: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub delta_r: f64,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Add simulation columns.
    #[arg(long)]
    pub with_sim: bool,
    #[command(flatten)]
    pub prover: ProverArgs,
    #[command(flatten)]
    pub sim: SimArgs,
}

impl SweepArgs {
    pub fn grid(&self) -> GridSpec {
        GridSpec {
            tau_l: self.tl_range,
            tau_r: self.tr_range,
            delta_l: self.delta_l,
            delta_r: self.delta_r,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct PhaseArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Number of attractor points exported.
    #[arg(long, default_value_t = 10_000)]
    pub attractor_samples: usize,
    /// Output JSON; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub prover: ProverArgs,
    #[command(flatten)]
    pub sim: SimArgs,
}

/// Splices the entries of any `--config` file in right after the subcommand
/// name, so that later command-line flags override them.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, config::ConfigError> {
    let mut path = None;
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy();
        if a == "--" {
            break;
        }
        if a == "--config" {
            path = args.get(i + 1).cloned();
            i += 1;
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.into());
        }
        i += 1;
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let extra = config::to_args(&config::load(path.as_ref())?)?;
    let names = ["prove", "sweep", "simulate", "phase"];
    let Some(pos) = args.iter().skip(1).position(|a| names.iter().any(|n| a == n)) else {
        return Ok(args);
    };
    let at = pos + 2;
    let mut out = args[..at].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[at..]);
    Ok(out)
}

fn io_fail(err: &mut dyn Write, what: &str, e: impl std::fmt::Display) -> i32 {
    let _ = writeln!(err, "error: {what}: {e}");
    EXIT_IO
}

fn usage_fail(err: &mut dyn Write, e: impl std::fmt::Display) -> i32 {
    let _ = writeln!(err, "error: {e}");
    EXIT_USAGE
}

fn write_json<T: serde::Serialize>(doc: &T, path: Option<&PathBuf>, stdout: &mut dyn Write) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(doc).map_err(io::Error::other)?;
    text.push('\n');
    match path {
        Some(p) => std::fs::write(p, text),
        None => stdout.write_all(text.as_bytes()),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run(args: Vec<OsString>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(config::ConfigError::Io { path, source }) => return io_fail(stderr, &format!("reading {path}"), source),
        Err(e) => return usage_fail(stderr, e),
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };

    match cli.command {
        Command::Prove { params, prover } => {
            let params = match params.params() {
                Ok(p) => p,
                Err(e) => return usage_fail(stderr, e),
            };
            let outcome = prove_chaos(&params, &prover.options());
            if let Err(e) = write_json(&ProveDoc::from(&outcome), None, stdout) {
                return io_fail(stderr, "writing output", e);
            }
            match outcome.verdict {
                Verdict::Chaos => EXIT_OK,
                Verdict::Stop => EXIT_STOP,
            }
        }
        Command::Sweep(args) => {
            let grid = args.grid();
            if let Err(e) = grid.validate() {
                return usage_fail(stderr, e);
            }
            let opts = SweepOptions {
                prover: args.prover.options(),
                sim: args.with_sim.then(|| args.sim.options()),
                threads: args.threads,
            };
            let rows = match sweep::run(&grid, &opts) {
                Ok(r) => r,
                Err(e) => return usage_fail(stderr, e),
            };
            let written = match &args.out {
                Some(path) => File::create(path)
                    .map_err(csv::Error::from)
                    .and_then(|f| sweep::write_csv(&rows, BufWriter::new(f))),
                None => sweep::write_csv(&rows, &mut *stdout),
            };
            match written {
                Ok(()) => EXIT_OK,
                Err(e) => io_fail(stderr, "writing CSV", e),
            }
        }
        Command::Simulate { params, sim } => {
            let params = match params.params() {
                Ok(p) => p,
                Err(e) => return usage_fail(stderr, e),
            };
            let class = classify_point(&params, &sim.options());
            match write_json(&SimulateDoc::new(&params, &class), None, stdout) {
                Ok(()) => EXIT_OK,
                Err(e) => io_fail(stderr, "writing output", e),
            }
        }
        Command::Phase(args) => {
            let params = match args.params.params() {
                Ok(p) => p,
                Err(e) => return usage_fail(stderr, e),
            };
            let (doc, code) = phase_document(&params, &args);
            let written = match &doc {
                PhaseOutput::Full(d) => write_json(d, args.out.as_ref(), stdout),
                PhaseOutput::OutcomeOnly(d) => write_json(d, args.out.as_ref(), stdout),
            };
            if let Err(e) = written {
                return io_fail(stderr, "writing output", e);
            }
            if let PhaseOutput::OutcomeOnly(d) = &doc {
                let reason = d.outcome.stop_reason.as_deref().unwrap_or("stopped");
                let _ = writeln!(stderr, "trapping region not constructible: {reason}");
            }
            code
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct OutcomeOnly {
    pub outcome: ProveDoc,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PhaseOutput {
    Full(Box<PhaseDoc>),
    OutcomeOnly(Box<OutcomeOnly>),
}

/// Phase data and the exit code: 1 when `Omega` cannot be built.
pub fn phase_document(params: &Params, args: &PhaseArgs) -> (PhaseOutput, i32) {
    let options = args.prover.options();
    let outcome = prove_chaos(params, &options);
    let Some(region) = outcome.region else {
        return (
            PhaseOutput::OutcomeOnly(Box::new(OutcomeOnly {
                outcome: ProveDoc::from(&outcome),
            })),
            EXIT_STOP,
        );
    };
    let fan = bcnf_core::partition::PreimageFan::new(params, options.p_cap.max(2));
    let diag = region.diagnostic_polygons(params);
    let attractor = attractor_points(params, &args.sim.options(), args.attractor_samples);
    let doc = PhaseDoc {
        outcome: ProveDoc::from(&outcome),
        omega_polygon: xy(&region.omega_polygon()),
        f_omega_polygon: xy(&region.image_polygon(params)),
        psi_l: xy(&diag.psi_l),
        psi_r: xy(&diag.psi_r),
        delta: xy(&diag.delta),
        preimage_lines: fan.lines().iter().map(Into::into).collect(),
        attractor_diverged: attractor.is_err(),
        attractor: attractor.map(|a| xy(&a)).unwrap_or_default(),
    };
    (PhaseOutput::Full(Box::new(doc)), EXIT_OK)
}
