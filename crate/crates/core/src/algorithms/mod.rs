//! The three SES applications: one-step W-state preparation, Grover search,
//! and Schrodinger propagation of an arbitrary real Hamiltonian, plus
//! single-shot measurement sampling.

mod grover;
mod measure;
mod prep;
mod solver;

pub use grover::{
    default_iterations, grover_search, grover_success_probability, inversion_generator,
    inversion_operator, inversion_time, inversion_via_evolution, oracle, GroverMode, GroverRun,
    InversionEvolution, Oracle, TRAJECTORY_DEFAULT_MAX_N,
};
pub use measure::{measure, sample_outcomes, MeasurementRecord, SAMPLE_CHUNK};
pub use prep::{prep_uniform, prep_uniform_time, star_hamiltonian, PreparedState};
pub use solver::{schrodinger_solve, SolveOutcome};
