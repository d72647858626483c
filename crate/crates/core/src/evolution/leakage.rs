//! Leakage out of the single-excitation subspace versus the coupling ratio
//! `g / eps`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algorithms::{inversion_generator, inversion_time, prep_uniform_time, star_hamiltonian};
use crate::compiler::ses_matrix_elements_general;
use crate::error::{Result, SesError};
use crate::evolution::{evolve_exact, evolve_full, FullModel};
use crate::random::random_hamiltonian;
use crate::types::{
    embed_ses_in_full, fidelity, project_full_to_ses, ses_basis_state, uniform_state,
    CouplingTensor, DeviceParams, FullState, HardwareBounds, SesHamiltonian, SesState, C64,
};

/// SES protocol run in the full space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeakageProtocol {
    /// `|1)` under the star network for `pi / (2 sqrt(n) g)`.
    PrepUniform,
    /// Oracle on qubit 1 (instantaneous `Z` phase) then one evolved inversion,
    /// starting from the uniform state.
    GroverStep,
    /// `|1)` under a seeded random Hamiltonian with entries in `[-g, g]`
    /// for `pi / g`.
    RandomH,
}

impl std::str::FromStr for LeakageProtocol {
    type Err = SesError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prep_uniform" => Ok(LeakageProtocol::PrepUniform),
            "grover_step" => Ok(LeakageProtocol::GroverStep),
            "random_H" | "random_h" => Ok(LeakageProtocol::RandomH),
            other => Err(SesError::InvalidArgument(format!(
                "unknown protocol {other:?} (expected prep_uniform, grover_step or random_H)"
            ))),
        }
    }
}

/// Fixed parts of a scan: array size, coupling type and the qubit energy the
/// ratio is taken against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeakageSetup {
    pub n: usize,
    pub coupling: CouplingTensor,
    /// Common qubit energy `eps`, rad/us.
    pub epsilon: f64,
    /// Seed for [`LeakageProtocol::RandomH`].
    pub seed: u64,
}

impl LeakageSetup {
    pub fn new(n: usize) -> Self {
        LeakageSetup {
            n,
            coupling: CouplingTensor::xx(),
            epsilon: HardwareBounds::default().epsilon_center(),
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeakageRow {
    pub ratio: f64,
    /// Probability outside the SES at the end of the protocol.
    pub leakage: f64,
    /// Fidelity of the projected state with the ideal SES result.
    pub ses_fidelity: f64,
}

/// Device realizing `eps I + pattern` exactly, with bounds fitted to it.
fn device_for(ses: &SesHamiltonian) -> Result<DeviceParams> {
    let m = ses.matrix();
    let n = m.nrows();
    let eps: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    let mut g = m.clone();
    g.fill_diagonal(0.0);
    let lo = eps.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = eps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let g_max = g.amax();
    let g_max = if g_max > 0.0 { g_max } else { 1.0 };
    DeviceParams::new(eps, g, HardwareBounds::new(g_max, (lo, hi))?)
}

fn run_protocol(setup: &LeakageSetup, protocol: LeakageProtocol, ratio: f64) -> Result<LeakageRow> {
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(SesError::InvalidArgument(format!(
            "coupling ratio must be positive, got {ratio}"
        )));
    }
    let n = setup.n;
    let g = ratio * setup.epsilon;
    let offset = DMatrix::identity(n, n) * setup.epsilon;
    let (pattern, start, t, oracle_qubit) = match protocol {
        LeakageProtocol::PrepUniform => (
            star_hamiltonian(n, g)?,
            ses_basis_state(n, 1)?,
            prep_uniform_time(n, g),
            None,
        ),
        LeakageProtocol::GroverStep => (
            inversion_generator(n, g)?,
            uniform_state(n)?,
            inversion_time(n, g),
            Some(1usize),
        ),
        LeakageProtocol::RandomH => (
            random_hamiltonian(n, g, setup.seed),
            ses_basis_state(n, 1)?,
            PI / g,
            None,
        ),
    };
    let ses_device = SesHamiltonian::from_upper(pattern.matrix() + offset);
    let model = FullModel::new(device_for(&ses_device)?, setup.coupling)?;
    // exact SES block of the full model
    let ses_exact = ses_matrix_elements_general(model.device(), model.coupling())?;

    let mut ses_start = start;
    let mut full_start = embed_ses_in_full(&ses_start)?;
    if let Some(q) = oracle_qubit {
        ses_start = crate::algorithms::oracle(n, q)?.apply(&ses_start)?;
        let amps = full_start
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(b, a)| if b >> (q - 1) & 1 == 1 { -a } else { *a })
            .collect::<Vec<C64>>();
        full_start = FullState::new(n, amps)?;
    }

    let ideal: SesState = evolve_exact(&ses_exact, &ses_start, t)?;
    let full = evolve_full(&model, &full_start, t)?;
    let projected = project_full_to_ses(&full.state)?;
    Ok(LeakageRow {
        ratio,
        leakage: projected.leakage,
        ses_fidelity: fidelity(&projected.state, &ideal)?,
    })
}

/// Runs `protocol` in the full space for each ratio; rows follow input order.
pub fn leakage_scan(
    setup: &LeakageSetup,
    protocol: LeakageProtocol,
    ratios: &[f64],
) -> Result<Vec<LeakageRow>> {
    if setup.n < 2 {
        return Err(SesError::DimensionTooSmall { n: setup.n, min: 2 });
    }
    crate::types::check_full_size(setup.n)?;
    ratios
        .iter()
        .map(|&r| run_protocol(setup, protocol, r))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_follow_input_order() {
        let setup = LeakageSetup::new(3);
        let ratios = [0.01, 0.04, 0.02];
        let rows = leakage_scan(&setup, LeakageProtocol::PrepUniform, &ratios).unwrap();
        let got: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
        assert_eq!(got, ratios);
        for r in &rows {
            assert!((0.0..=1.0).contains(&r.leakage));
            assert!(r.ses_fidelity > 0.9);
        }
    }

    #[test]
    fn protocols_parse() {
        assert_eq!("prep_uniform".parse::<LeakageProtocol>().unwrap(), LeakageProtocol::PrepUniform);
        assert_eq!("grover_step".parse::<LeakageProtocol>().unwrap(), LeakageProtocol::GroverStep);
        assert_eq!("random_H".parse::<LeakageProtocol>().unwrap(), LeakageProtocol::RandomH);
        assert!("bogus".parse::<LeakageProtocol>().is_err());
    }

    #[test]
    fn rejects_bad_ratio_and_size() {
        let setup = LeakageSetup::new(3);
        assert!(leakage_scan(&setup, LeakageProtocol::PrepUniform, &[0.0]).is_err());
        assert!(matches!(
            leakage_scan(&LeakageSetup::new(15), LeakageProtocol::PrepUniform, &[0.01]),
            Err(SesError::SystemTooLarge { .. })
        ));
    }

    #[test]
    fn random_protocol_is_reproducible() {
        let mut setup = LeakageSetup::new(4);
        setup.seed = 17;
        let a = leakage_scan(&setup, LeakageProtocol::RandomH, &[0.02]).unwrap();
        let b = leakage_scan(&setup, LeakageProtocol::RandomH, &[0.02]).unwrap();
        assert_eq!(a, b);
    }
}
