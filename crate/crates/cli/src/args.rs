use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sesim_core::evolution::{LeakageProtocol, DEFAULT_THETA_MAX};
use sesim_core::GroverMode;

use crate::error::EXIT_CODES_HELP;

/// Simulate, compile and benchmark single-excitation-subspace quantum computations.
///
/// Frequencies given on the command line are in MHz and converted with
/// omega = 2 pi f; times are in microseconds. Results go to the directory in
/// SESIM_OUT_DIR (default: current directory), each run with a manifest.
#[derive(Debug, Parser)]
#[command(name = "sesim", version, after_help = EXIT_CODES_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Compile a target Hamiltonian onto device parameters.
    Compile(CompileArgs),
    /// Propagate a state under a Hamiltonian file.
    Evolve(EvolveArgs),
    /// Prepare the uniform superposition with a star network.
    PrepUnif(PrepArgs),
    /// Run Grover search for one marked state.
    Grover(GroverArgs),
    /// Compile, run and measure a Schrodinger-equation problem.
    Solve(SolveArgs),
    /// Full-space leakage out of the single-excitation subspace.
    Leakage(LeakageArgs),
    /// Time ODE integration against diagonalization and locate t*.
    Bench(BenchArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Compile(_) => "compile",
            Command::Evolve(_) => "evolve",
            Command::PrepUnif(_) => "prep-unif",
            Command::Grover(_) => "grover",
            Command::Solve(_) => "solve",
            Command::Leakage(_) => "leakage",
            Command::Bench(_) => "bench",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Command::Grover(a) => Some(a.seed),
            Command::Solve(a) => Some(a.seed),
            Command::Leakage(a) => Some(a.seed),
            _ => None,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct HardwareArgs {
    /// Coupling bound g_max / 2pi, MHz.
    #[arg(long, default_value_t = 100.0)]
    pub g_max: f64,
    /// Allowed qubit frequencies lo,hi (epsilon / 2pi), MHz.
    #[arg(long, value_parser = parse_pair, default_value = "5000,6000")]
    pub eps_range: (f64, f64),
    /// Measurement time, us.
    #[arg(long, default_value_t = 0.1)]
    pub t_meas: f64,
    /// Enlarge lambda when a diagonal detuning does not fit the frequency range.
    #[arg(long)]
    pub auto_relax: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct CompileArgs {
    pub matrix: PathBuf,
    /// Simulated time, us.
    #[arg(long, default_value_t = 1.0)]
    pub t_sim: f64,
    #[command(flatten)]
    pub hardware: HardwareArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Eigen,
    Ode,
}

#[derive(Debug, Args, Serialize)]
pub struct EvolveArgs {
    pub matrix: PathBuf,
    /// `basis:<i>` (1-based), `uniform`, or a state JSON file.
    #[arg(long)]
    pub state: String,
    /// Evolution time, us.
    #[arg(long)]
    pub t: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Eigen)]
    pub method: MethodArg,
    /// Largest phase advance per RK4 step, rad.
    #[arg(long, default_value_t = DEFAULT_THETA_MAX)]
    pub theta_max: f64,
    /// Also run the other method and report the fidelity between the two.
    #[arg(long)]
    pub compare: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct PrepArgs {
    #[arg(long)]
    pub n: usize,
    /// Star coupling g / 2pi, MHz.
    #[arg(long, default_value_t = 100.0)]
    pub g: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Device,
    Math,
}

impl From<ModeArg> for GroverMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Device => GroverMode::Device,
            ModeArg::Math => GroverMode::Math,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct GroverArgs {
    #[arg(long)]
    pub n: usize,
    /// Marked state, 1-based.
    #[arg(long)]
    pub marked: usize,
    /// Coupling of the inversion generator g / 2pi, MHz.
    #[arg(long, default_value_t = 100.0)]
    pub g: f64,
    /// Grover iterations [default: round(pi sqrt(n) / 4)].
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Device)]
    pub mode: ModeArg,
}

#[derive(Debug, Args, Serialize)]
pub struct SolveArgs {
    pub matrix: PathBuf,
    /// `basis:<i>` (1-based), `uniform`, or a state JSON file.
    #[arg(long)]
    pub state: String,
    /// Simulated time, us.
    #[arg(long)]
    pub t_sim: f64,
    #[command(flatten)]
    pub hardware: HardwareArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum ProtocolArg {
    #[value(name = "prep_uniform")]
    PrepUniform,
    #[value(name = "grover_step")]
    GroverStep,
    #[value(name = "random_H")]
    RandomH,
}

impl From<ProtocolArg> for LeakageProtocol {
    fn from(p: ProtocolArg) -> Self {
        match p {
            ProtocolArg::PrepUniform => LeakageProtocol::PrepUniform,
            ProtocolArg::GroverStep => LeakageProtocol::GroverStep,
            ProtocolArg::RandomH => LeakageProtocol::RandomH,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct LeakageArgs {
    #[arg(long)]
    pub n: usize,
    /// Coupling ratios g / epsilon, comma separated.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub ratio_list: Vec<f64>,
    #[arg(long, value_enum, default_value_t = ProtocolArg::PrepUniform)]
    pub protocol: ProtocolArg,
    /// Qubit frequency epsilon / 2pi, MHz.
    #[arg(long, default_value_t = 5500.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct BenchArgs {
    /// Sweep description (JSON).
    #[arg(long)]
    pub config: PathBuf,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected lo,hi, got `{s}`"))?;
    let lo: f64 = a.trim().parse().map_err(|_| format!("bad number `{a}`"))?;
    let hi: f64 = b.trim().parse().map_err(|_| format!("bad number `{b}`"))?;
    Ok((lo, hi))
}
