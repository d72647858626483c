//! Seeded random instances. All generators use ChaCha8 seeded from a `u64`
//! so workloads are reproducible across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::types::{SesHamiltonian, SesState, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// I.i.d. uniform entries in `[-g_max, g_max]` drawn row by row over the
/// upper triangle (diagonal included) and mirrored below.
pub fn random_hamiltonian(n: usize, g_max: f64, seed: u64) -> SesHamiltonian {
    let mut rng = rng(seed);
    let mut m = nalgebra::DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            m[(i, j)] = rng.random_range(-g_max..=g_max);
        }
    }
    SesHamiltonian::from_upper(m)
}

/// A normalized state with i.i.d. uniform real and imaginary parts.
pub fn random_state(n: usize, seed: u64) -> SesState {
    let mut rng = rng(seed);
    let amps: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    SesState::normalized(amps).expect("random amplitudes are almost surely nonzero")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_bounded_and_reproducible() {
        let h = random_hamiltonian(40, 2.5, 7);
        let m = h.matrix();
        for i in 0..40 {
            for j in 0..40 {
                assert_eq!(m[(i, j)], m[(j, i)]);
                assert!(m[(i, j)].abs() <= 2.5);
            }
        }
        assert_eq!(h, random_hamiltonian(40, 2.5, 7));
        assert_ne!(h, random_hamiltonian(40, 2.5, 8));
    }
}
