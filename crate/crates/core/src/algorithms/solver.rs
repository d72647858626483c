use serde::{Deserialize, Serialize};

use crate::algorithms::{measure, MeasurementRecord};
use crate::compiler::{compile, decompile_evolution, CompileOptions, CompiledProgram, TargetHamiltonian};
use crate::error::Result;
use crate::evolution::evolve_exact;
use crate::types::{check_dims, HardwareBounds, SesState};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub program: CompiledProgram,
    /// `exp(-i H t_sim) psi0`, global phase restored.
    pub state: SesState,
    pub measurement: MeasurementRecord,
}

/// Compiles `h`, runs the scaled evolution for `t_qc`, restores the global
/// phase and draws one measurement shot.
pub fn schrodinger_solve(
    h: &TargetHamiltonian,
    psi0: &SesState,
    t_sim: f64,
    bounds: &HardwareBounds,
    t_meas: f64,
    options: CompileOptions,
    seed: u64,
) -> Result<SolveOutcome> {
    check_dims(h.dim(), psi0.dim())?;
    let program = compile(h, bounds, t_sim, t_meas, options)?;
    let evolved = evolve_exact(&program.hamiltonian_qc, psi0, program.t_qc)?;
    let state = decompile_evolution(&program).restore(&evolved);
    let measurement = measure(&state, seed);
    Ok(SolveOutcome {
        program,
        state,
        measurement,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{prep_uniform, star_hamiltonian};
    use crate::compiler::UnitTag;
    use crate::types::{fidelity, ses_basis_state, units};
    use nalgebra::DMatrix;

    #[test]
    fn diagonal_hamiltonian_freezes_populations() {
        let h = TargetHamiltonian::new(
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -2.0, 0.5])),
            UnitTag::RadPerUs,
        )
        .unwrap();
        let psi = crate::random::random_state(3, 1);
        let out = schrodinger_solve(&h, &psi, 2.0, &HardwareBounds::default(), 0.1, CompileOptions::default(), 7)
            .unwrap();
        for (p, q) in out.measurement.probabilities.iter().zip(psi.probabilities()) {
            assert!((p - q).abs() < 1e-14);
        }
    }

    #[test]
    fn star_problem_reproduces_preparation() {
        let n = 9;
        let g = units::mhz(40.0);
        let target = TargetHamiltonian::from_ses(star_hamiltonian(n, g).unwrap(), UnitTag::RadPerUs);
        let prep = prep_uniform(n, g).unwrap();
        let out = schrodinger_solve(
            &target,
            &ses_basis_state(n, 1).unwrap(),
            prep.t_qu,
            &HardwareBounds::default(),
            0.1,
            CompileOptions::default(),
            0,
        )
        .unwrap();
        assert!(fidelity(&out.state, &prep.state).unwrap() > 1.0 - 1e-10);
        // both the diagonal (2g - g = g after shift) and couplings bind at g
        assert!((out.program.lambda - g / units::mhz(100.0)).abs() < 1e-12);
    }
}
