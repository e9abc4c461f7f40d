//! Command-line front end for toric-bloch.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 oracle
//! mismatch, 1 I/O failure.

pub mod grid;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

use toric_bloch::bloch::{toric_angles, BlochAngles};
use toric_bloch::classify::classify;
use toric_bloch::grover::{
    apply_kernel, fractional_power, inverse_prepare, optimal_iterations, rotate_by_steps,
    GroverParams, TwoLevelState,
};
use toric_bloch::lattice::{block_sigma, RegionCombinatorics, SubsetSpec};
use toric_bloch::precision::PrecisionPolicy;
use toric_bloch::purity::sweep;
use toric_bloch::topo::{extract_sgamma, find_entropy_max, FitMode};
use toric_bloch::verify::verify_point;

use grid::{parse_angle, GridSpec};
pub use output::{csv_number, write_output};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "toric-bloch", version, about = "Entanglement diagnostics on the toric-code Bloch sphere")]
pub struct Cli {
    /// Binary precision of the high-precision stage
    #[arg(long, env = "TORIC_BLOCH_PRECISION", default_value_t = 256, global = true)]
    pub precision: usize,

    /// Write to this file (atomically) instead of stdout
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fit {
    TwoTerm,
    ThreeTerm,
}

impl From<Fit> for FitMode {
    fn from(f: Fit) -> Self {
        match f {
            Fit::TwoTerm => FitMode::TwoTerm,
            Fit::ThreeTerm => FitMode::ThreeTerm,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// S2 over a (theta, phi) grid for an L x L block
    Sweep {
        #[arg(long)]
        k: usize,
        #[arg(long = "L")]
        l: usize,
        #[arg(long, default_value = "0:pi:64")]
        theta: GridSpec,
        #[arg(long, default_value = "0:2pi:64")]
        phi: GridSpec,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// S2 along theta at fixed phi
    Curve {
        #[arg(long)]
        k: usize,
        #[arg(long = "L")]
        l: usize,
        #[arg(long, default_value = "0:pi:256")]
        theta: GridSpec,
        #[arg(long, default_value = "0", value_parser = parse_angle, allow_hyphen_values = true)]
        phi: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Area-law fit S2(L) = alpha L + S_gamma
    Gamma {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "0", value_parser = parse_angle, allow_hyphen_values = true)]
        phi: f64,
        /// `toric` or an angle
        #[arg(long = "theta-at", default_value = "toric")]
        theta_at: String,
        #[arg(long = "L", value_delimiter = ',', required = true)]
        l: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Fit::TwoTerm)]
        fit: Fit,
    },
    /// Grover kernel in the two-level subspace
    #[command(group(
        ArgGroup::new("mode")
            .required(true)
            .args(["iterations", "optimal", "inverse", "fractional"])
    ))]
    Grover {
        #[arg(long = "log2-g")]
        log2_g: u64,
        /// Apply K^m to the toric state (negative m applies the inverse)
        #[arg(long, allow_hyphen_values = true)]
        iterations: Option<i64>,
        /// Search from the toric state with the optimal step count
        #[arg(long)]
        optimal: bool,
        /// Prepare the toric state from the product state with K^-1
        #[arg(long)]
        inverse: bool,
        /// Apply the real power K^t to the toric state
        #[arg(long, allow_hyphen_values = true)]
        fractional: Option<f64>,
    },
    /// Compare closed forms with the brute-force oracle at one point
    Verify {
        #[arg(long)]
        k: usize,
        /// block:L, star:x,y or links:h:0,0;v:1,0;...
        #[arg(long)]
        subset: String,
        #[arg(long, value_parser = parse_angle)]
        theta: f64,
        #[arg(long, default_value = "0", value_parser = parse_angle, allow_hyphen_values = true)]
        phi: f64,
    },
    /// Scan the sphere surface for separable states
    Classify {
        #[arg(long)]
        k: usize,
        #[arg(long = "L")]
        l: usize,
        #[arg(long, default_value = "0:pi:64")]
        theta: GridSpec,
        #[arg(long, default_value = "0:2pi:16")]
        phi: GridSpec,
    },
    /// Position of the entropy maximum in theta for several L
    Maxdrift {
        #[arg(long)]
        k: usize,
        #[arg(long = "L", value_delimiter = ',', required = true)]
        l: Vec<usize>,
        #[arg(long, default_value = "0", value_parser = parse_angle, allow_hyphen_values = true)]
        phi: f64,
    },
}

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Numerical(String),
    Mismatch(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Mismatch(_) => EXIT_MISMATCH,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "{m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Mismatch(m) => write!(f, "oracle mismatch: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<toric_bloch::Error> for CliError {
    fn from(e: toric_bloch::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Invalid(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("toric-bloch: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let policy = PrecisionPolicy::new(cli.precision)?;
    let out = cli.output.as_deref();
    match &cli.command {
        Command::Sweep { k, l, theta, phi, format } => {
            let rows = sweep(*k, *l, &theta.points(), &phi.points(), &policy)?;
            let body = match format {
                Format::Csv => output::csv(
                    "theta,phi,S2",
                    rows.iter().map(|r| vec![r.theta, r.phi, r.s2]),
                ),
                Format::Json => output::json(&rows)?,
            };
            write_output(out, &body)?;
        }
        Command::Curve { k, l, theta, phi, format } => {
            let rows = sweep(*k, *l, &theta.points(), &[*phi], &policy)?;
            let body = match format {
                Format::Csv => output::csv("theta,S2", rows.iter().map(|r| vec![r.theta, r.s2])),
                Format::Json => {
                    let v: Vec<Value> = rows
                        .iter()
                        .map(|r| json!({"theta": r.theta, "S2": r.s2}))
                        .collect();
                    output::json(&v)?
                }
            };
            write_output(out, &body)?;
        }
        Command::Gamma { k, phi, theta_at, l, fit } => {
            let angles = if theta_at.trim().eq_ignore_ascii_case("toric") {
                let log2_g = block_log2_g(*k, l)?;
                toric_angles(log2_g).with_phi(*phi)?
            } else {
                BlochAngles::new(parse_angle(theta_at).map_err(CliError::Invalid)?, *phi)?
            };
            let result = extract_sgamma(*k, &angles, l, (*fit).into(), &policy)?;
            let body = json!({
                "k": k,
                "theta": angles.theta(),
                "phi": angles.phi(),
                "theta_at": theta_at,
                "L_values": l,
                "alpha": result.alpha,
                "s_gamma": result.s_gamma,
                "inverse_L": result.inverse_l,
                "residual": result.residual,
                "fit_mode": result.fit_mode,
            });
            write_output(out, &output::json(&body)?)?;
        }
        Command::Grover { log2_g, iterations, optimal, inverse, fractional } => {
            let params = GroverParams::new(*log2_g, &policy)?;
            let psi = TwoLevelState::toric_ground(&params);
            let mut body = json!({
                "log2_G": log2_g,
                "theta_tilde": params.theta_tilde(),
            });
            let fields = if let Some(m) = iterations {
                let s = apply_kernel(&psi, &params, *m);
                json!({"m": m, "amp0": amp(s.amp0), "amp1": amp(s.amp1),
                       "success_prob": s.amp0.norm_sqr()})
            } else if *optimal {
                let opt = optimal_iterations(&params);
                let s = rotate_by_steps(&psi, &params, &opt.m_star);
                json!({"m": big(&opt.m_star), "amp0": amp(s.amp0), "amp1": amp(s.amp1),
                       "success_prob": opt.success_prob, "log2_failure": finite(opt.log2_failure)})
            } else if *inverse {
                let inv = inverse_prepare(&params);
                let s = rotate_by_steps(&TwoLevelState::product_zero(), &params, &-&inv.m);
                json!({"m": big(&inv.m), "amp0": amp(s.amp0), "amp1": amp(s.amp1),
                       "infidelity": inv.infidelity, "log2_infidelity": finite(inv.log2_infidelity)})
            } else if let Some(t) = fractional {
                let s = fractional_power(&params, *t, &psi)?;
                json!({"exponent": t, "amp0": amp(s.amp0), "amp1": amp(s.amp1),
                       "success_prob": s.amp0.norm_sqr()})
            } else {
                return Err(CliError::Invalid("choose a grover mode".into()));
            };
            if let (Value::Object(b), Value::Object(f)) = (&mut body, fields) {
                b.extend(f);
            }
            write_output(out, &output::json(&body)?)?;
        }
        Command::Verify { k, subset, theta, phi } => {
            let spec: SubsetSpec = subset.parse()?;
            let report = verify_point(*k, &spec, &BlochAngles::new(*theta, *phi)?, &policy)?;
            write_output(out, &output::json(&report)?)?;
            if !report.passed() {
                let failed: Vec<&str> = report
                    .checks
                    .iter()
                    .filter(|c| !c.pass)
                    .map(|c| c.check_name.as_str())
                    .collect();
                return Err(CliError::Mismatch(failed.join(", ")));
            }
        }
        Command::Classify { k, l, theta, phi } => {
            let report = classify(*k, *l, &theta.points(), &phi.points(), &policy)?;
            eprintln!("note: {}", report.disclaimer);
            if report.class4_consistent {
                eprintln!("surface consistent with Class 4: the north pole is the only separable grid point");
            } else {
                eprintln!("surface NOT shown consistent with Class 4 on this grid");
            }
            write_output(out, &output::json(&report)?)?;
        }
        Command::Maxdrift { k, l, phi } => {
            let mut maxima = Vec::new();
            for &li in l {
                let m = find_entropy_max(*k, li, *phi, &policy)?;
                maxima.push(DriftRow { l: li, theta_max: m.theta_max, s2_max: m.s2_max });
            }
            let mut sorted = maxima.clone();
            sorted.sort_by_key(|r| r.l);
            let shifts_right = sorted.windows(2).all(|w| w[1].theta_max > w[0].theta_max);
            let body = json!({"k": k, "phi": phi, "maxima": maxima, "shifts_right": shifts_right});
            write_output(out, &output::json(&body)?)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct DriftRow {
    #[serde(rename = "L")]
    l: usize,
    theta_max: f64,
    #[serde(rename = "S2_max")]
    s2_max: f64,
}

/// log2|G| shared by every block in `ls`; the toric angle depends only on k.
fn block_log2_g(k: usize, ls: &[usize]) -> Result<u64, CliError> {
    let first = ls
        .first()
        .ok_or_else(|| CliError::Invalid("at least one L is required".into()))?;
    let comb = RegionCombinatorics::from_sigma(&block_sigma(k, *first)?)?;
    Ok(comb.log2_g)
}

fn amp(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// Step counts go out as JSON numbers when they fit, as strings otherwise.
fn big(n: &BigInt) -> Value {
    match n.to_u64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

fn finite(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(null)
    }
}
