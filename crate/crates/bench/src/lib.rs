//! Classical timing harness for SES evolution.
//!
//! Measures fixed-step ODE propagation (cost linear in the run time `t_qc`)
//! against eigendecomposition (cost independent of `t_qc`), fits the
//! crossover run time `t*`, and compares the diagonalization time spread over
//! a perfectly parallel machine with the quantum budget `t_qc + t_meas`.

pub mod config;
pub mod crossover;
pub mod report;
pub mod timing;

pub use config::{BenchConfig, SyntheticTimings, DEFAULT_PARALLEL_CORES, DEFAULT_T_MEAS};
pub use crossover::{
    crossover_time, find_crossover, find_crossover_with, fit_line, CrossoverRow, LinearFit,
    RawTiming, RowStatus, TimingKind, MAX_DIAG_CV, MIN_R2,
};
pub use report::{
    run_bench, speedup_entry, speedup_report, write_raw_csv, BenchOutput, CrossoverReport,
    MachineDescriptor, PaperReference, SpeedupEntry, PAPER_REFERENCE,
};
pub use sesim_core::random::random_hamiltonian;
pub use timing::{
    backend_for, time_diag, time_ode, Cell, CellTiming, Synthetic, TimingBackend, WallClock,
    Workload,
};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("invalid bench config: {0}")]
    Schema(String),
    #[error(transparent)]
    Core(#[from] sesim_core::SesError),
    #[error("thread pool: {0}")]
    Pool(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
