use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::config::BenchConfig;
use crate::crossover::{find_crossover_with, CrossoverRow, RawTiming, RowStatus};
use crate::timing::backend_for;
use crate::BenchError;

/// Published reference values for the n = 1000 case, reported next to the
/// measured ones and never asserted.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PaperReference {
    pub n: usize,
    /// Single-core diagonalization time, seconds.
    pub diag_time: f64,
    /// Crossover run time, us.
    pub t_star: f64,
    /// Perfectly parallel classical time, us.
    pub classical_bound: f64,
    /// Quantum run time and readout budget, us.
    pub t_qc: f64,
    pub t_meas: f64,
}

pub const PAPER_REFERENCE: PaperReference = PaperReference {
    n: 1000,
    diag_time: 1.0,
    t_star: 1.0e-3,
    classical_bound: 1.0,
    t_qc: 0.2,
    t_meas: 0.1,
};

/// Where the timings were taken.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineDescriptor {
    pub os: String,
    pub arch: String,
    pub cpu_model: Option<String>,
    pub logical_cpus: usize,
    /// Threads available to a timed cell.
    pub timing_threads: usize,
    pub tool_version: String,
    pub synthetic_timings: bool,
}

impl MachineDescriptor {
    pub fn detect(timing_threads: usize, synthetic_timings: bool) -> Self {
        let cpu_model = std::fs::read_to_string("/proc/cpuinfo").ok().and_then(|s| {
            s.lines()
                .find(|l| l.starts_with("model name"))
                .and_then(|l| l.split_once(':'))
                .map(|(_, v)| v.trim().to_string())
        });
        MachineDescriptor {
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
            cpu_model,
            logical_cpus: std::thread::available_parallelism().map_or(1, |n| n.get()),
            timing_threads,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            synthetic_timings,
        }
    }
}

/// One line of the quantum-versus-classical comparison.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeedupEntry {
    pub n: usize,
    /// us.
    pub t_qc: f64,
    pub t_meas: f64,
    pub t_qu: f64,
    /// Single-core diagonalization, seconds.
    pub diag_time: f64,
    /// `diag_time / cores`, us.
    pub classical_bound: f64,
    /// `t_qu < classical_bound`.
    pub condition: bool,
}

/// Compares `t_qu = t_qc + t_meas` with the diagonalization time divided
/// over `cores` perfectly parallel cores.
pub fn speedup_entry(n: usize, diag_time: f64, cores: f64, t_qc: f64, t_meas: f64) -> SpeedupEntry {
    let t_qu = t_qc + t_meas;
    let classical_bound = diag_time / cores * 1.0e6;
    SpeedupEntry {
        n,
        t_qc,
        t_meas,
        t_qu,
        diag_time,
        classical_bound,
        condition: t_qu < classical_bound,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossoverReport {
    pub config: BenchConfig,
    pub rows: Vec<CrossoverRow>,
    pub environment: MachineDescriptor,
    pub parallel_cores: f64,
    pub t_meas: f64,
    /// One entry per row and configured `t_qc`.
    pub quantum_budget: Vec<SpeedupEntry>,
    pub paper: PaperReference,
    /// The paper's own inputs run through [`speedup_entry`].
    pub paper_budget: SpeedupEntry,
    pub warnings: Vec<String>,
}

impl CrossoverReport {
    pub fn row(&self, n: usize) -> Option<&CrossoverRow> {
        self.rows.iter().find(|r| r.n == n)
    }

    /// Measured-next-to-published summary lines.
    pub fn comparison_lines(&self) -> Vec<String> {
        let p = &self.paper;
        let mut out = vec![format!(
            "paper (n = {}): diag {} s, t* {} us, classical bound {} us vs t_qu {} us",
            p.n,
            p.diag_time,
            p.t_star,
            p.classical_bound,
            p.t_qc + p.t_meas
        )];
        for r in &self.rows {
            let t = r
                .t_star
                .map_or("none".to_string(), |t| format!("{t:.3e} us"));
            out.push(format!(
                "measured n = {}: diag {:.3e} s, t* {}, R^2 {:.4}, {:?}",
                r.n, r.diag_time, t, r.fit_r2, r.status
            ));
        }
        out
    }
}

/// Report plus the raw samples behind it.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchOutput {
    pub report: CrossoverReport,
    pub raw: Vec<RawTiming>,
}

/// Sweeps every `n` in the config and builds the report.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchOutput, BenchError> {
    cfg.validate()?;
    let mut backend = backend_for(cfg)?;
    let mut raw = Vec::new();
    let mut rows = Vec::with_capacity(cfg.n_list.len());
    for &n in &cfg.n_list {
        rows.push(find_crossover_with(backend.as_mut(), n, cfg, &mut raw)?);
    }
    let environment = MachineDescriptor::detect(backend.threads(), backend.is_synthetic());
    Ok(BenchOutput {
        report: assemble(cfg, rows, environment),
        raw,
    })
}

/// Report for a single `n`.
pub fn speedup_report(n: usize, cfg: &BenchConfig) -> Result<CrossoverReport, BenchError> {
    let mut single = cfg.clone();
    single.n_list = vec![n];
    Ok(run_bench(&single)?.report)
}

fn assemble(
    cfg: &BenchConfig,
    rows: Vec<CrossoverRow>,
    environment: MachineDescriptor,
) -> CrossoverReport {
    let mut quantum_budget = Vec::new();
    let mut warnings = Vec::new();
    for r in &rows {
        for &t in &cfg.t_qc_list {
            quantum_budget.push(speedup_entry(
                r.n,
                r.diag_time,
                cfg.parallel_cores,
                t,
                cfg.t_meas,
            ));
        }
        if r.status == RowStatus::Invalid {
            warnings.push(format!("row n = {} invalid: {}", r.n, r.notes.join("; ")));
        }
    }
    let p = PAPER_REFERENCE;
    CrossoverReport {
        config: cfg.clone(),
        rows,
        environment,
        parallel_cores: cfg.parallel_cores,
        t_meas: cfg.t_meas,
        quantum_budget,
        paper: p,
        paper_budget: speedup_entry(p.n, p.diag_time, 1.0e6, p.t_qc, p.t_meas),
        warnings,
    }
}

/// Flat CSV of raw samples with a header row.
pub fn write_raw_csv<W: Write>(raw: &[RawTiming], out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    for r in raw {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
