//! Simulation and compilation for quantum computation in the
//! single-excitation subspace (SES) of a fully connected qubit array.
//!
//! An n-qubit array restricted to states with exactly one excitation behaves
//! like an n-level system whose real symmetric Hamiltonian is set directly by
//! the qubit frequencies (diagonal) and pairwise couplings (off-diagonal).
//! This crate compiles target Hamiltonians onto such a device, propagates SES
//! states exactly or by RK4, checks the subspace approximation against the
//! full 2^n model, and implements W-state preparation, Grover search and a
//! Schrodinger-equation solver on top.

pub mod algorithms;
pub mod compiler;
pub mod error;
pub mod evolution;
pub mod random;
pub mod types;

pub use algorithms::{
    grover_search, measure, prep_uniform, schrodinger_solve, star_hamiltonian, GroverMode,
    GroverRun, MeasurementRecord,
};
pub use compiler::{
    compile, decompile_evolution, ses_matrix_elements, ses_matrix_elements_general,
    CompileOptions, CompiledProgram, TargetHamiltonian, UnitTag,
};
pub use error::{CouplingCondition, Result, SesError};
pub use evolution::{evolve_exact, evolve_full, evolve_ode, FullModel, Method, Propagator};
pub use types::{
    embed_ses_in_full, fidelity, project_full_to_ses, ses_basis_state, uniform_state,
    CouplingTensor, DeviceParams, FullState, HardwareBounds, SesHamiltonian, SesState, C64,
};
