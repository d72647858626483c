use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SesError};
use crate::evolution::evolve_exact;
use crate::types::{ses_basis_state, SesHamiltonian, SesState};

/// Qubit 1 coupled with strength `g` to every other qubit, which are mutually
/// uncoupled; `H_11 = 2g`.
///
/// Only two eigenstates overlap `|1)`, with energies `g (1 +- sqrt(n))`; the
/// remaining `n - 2` are degenerate at zero.
pub fn star_hamiltonian(n: usize, g: f64) -> Result<SesHamiltonian> {
    if n < 2 {
        return Err(SesError::DimensionTooSmall { n, min: 2 });
    }
    if g == 0.0 || !g.is_finite() {
        return Err(SesError::InvalidArgument(format!(
            "star coupling must be finite and nonzero, got {g}"
        )));
    }
    let mut m = DMatrix::zeros(n, n);
    m[(0, 0)] = 2.0 * g;
    for j in 1..n {
        m[(0, j)] = g;
        m[(j, 0)] = g;
    }
    Ok(SesHamiltonian::from_upper(m))
}

/// Half a period of the `2 sqrt(n) g` splitting: `pi / (2 sqrt(n) g)`.
pub fn prep_uniform_time(n: usize, g: f64) -> f64 {
    PI / (2.0 * (n as f64).sqrt() * g)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreparedState {
    pub state: SesState,
    /// Evolution time, us.
    pub t_qu: f64,
}

/// Prepares the uniform superposition (up to a global phase) by evolving
/// `|1)` under the star Hamiltonian.
pub fn prep_uniform(n: usize, g: f64) -> Result<PreparedState> {
    if !(g > 0.0) {
        return Err(SesError::InvalidArgument(format!(
            "coupling must be positive, got {g}"
        )));
    }
    let h = star_hamiltonian(n, g)?;
    let t_qu = prep_uniform_time(n, g);
    let state = evolve_exact(&h, &ses_basis_state(n, 1)?, t_qu)?;
    Ok(PreparedState { state, t_qu })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::EigenPropagator;
    use crate::types::{fidelity, uniform_state};

    #[test]
    fn star_structure() {
        let h = star_hamiltonian(6, 1.5).unwrap();
        let nonzero = h.matrix().iter().filter(|x| **x != 0.0).count();
        assert_eq!(nonzero, 2 * 5 + 1);
        assert!(star_hamiltonian(1, 1.0).is_err());
        assert!(star_hamiltonian(3, 0.0).is_err());
    }

    #[test]
    fn star_spectrum_small() {
        for (n, g) in [(2usize, 1.0), (3, 2.0)] {
            let e = EigenPropagator::new(&star_hamiltonian(n, g).unwrap()).unwrap();
            let mut w: Vec<f64> = e.eigenvalues().iter().copied().collect();
            w.sort_by(f64::total_cmp);
            let s = (n as f64).sqrt();
            let mut expected = vec![g * (1.0 - s), g * (1.0 + s)];
            expected.extend(std::iter::repeat(0.0).take(n - 2));
            expected.sort_by(f64::total_cmp);
            for (a, b) in w.iter().zip(&expected) {
                assert!((a - b).abs() < 1e-12 * g);
            }
        }
    }

    #[test]
    fn prepares_uniform_state() {
        let p = prep_uniform(4, 1.0).unwrap();
        assert!(fidelity(&p.state, &uniform_state(4).unwrap()).unwrap() >= 1.0 - 1e-10);
        assert_eq!(p.t_qu, PI / 4.0);
    }

    #[test]
    fn half_time_is_wrong() {
        let g = 2.0;
        let h = star_hamiltonian(4, g).unwrap();
        let s = evolve_exact(&h, &ses_basis_state(4, 1).unwrap(), prep_uniform_time(4, g) / 2.0)
            .unwrap();
        assert!(fidelity(&s, &uniform_state(4).unwrap()).unwrap() < 0.99);
    }

    #[test]
    fn sub_nanosecond_at_n1000() {
        let g = crate::types::units::mhz(100.0);
        let t = prep_uniform_time(1000, g);
        assert!((t - PI / (2.0 * 1000f64.sqrt() * g)).abs() < 1e-18);
        assert!((t - 7.905694150420948e-5).abs() < 1e-15, "t = {t} us");
    }

    #[test]
    fn invariant_under_leaf_permutation() {
        // permuting qubits 2..n leaves the star Hamiltonian and the target unchanged
        let n = 7;
        let g = 1.3;
        let h = star_hamiltonian(n, g).unwrap();
        let perm = [0usize, 3, 6, 1, 5, 2, 4];
        let permuted = SesHamiltonian::from_upper(DMatrix::from_fn(n, n, |i, j| {
            h.matrix()[(perm[i], perm[j])]
        }));
        assert_eq!(permuted, h);
        let s = evolve_exact(&permuted, &ses_basis_state(n, 1).unwrap(), prep_uniform_time(n, g))
            .unwrap();
        let f = fidelity(&s, &uniform_state(n).unwrap()).unwrap();
        let f0 = fidelity(&prep_uniform(n, g).unwrap().state, &uniform_state(n).unwrap()).unwrap();
        assert!((f - f0).abs() < 1e-14);
    }
}
