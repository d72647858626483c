use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Result, SesError};
use crate::types::{check_dims, SesHamiltonian, SesState, C64};

/// Cached `H = V diag(w) V^T` for exact propagation.
#[derive(Clone, Debug)]
pub struct EigenPropagator {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl EigenPropagator {
    pub fn new(h: &SesHamiltonian) -> Result<Self> {
        if h.matrix().iter().any(|x| !x.is_finite()) {
            return Err(SesError::NonFinite("hamiltonian"));
        }
        let eig = SymmetricEigen::try_new(h.matrix().clone(), f64::EPSILON, 0)
            .ok_or(SesError::NonFinite("eigendecomposition"))?;
        Ok(EigenPropagator {
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// `max |V diag(w) V^T - H|`.
    pub fn reconstruction_error(&self, h: &SesHamiltonian) -> f64 {
        let v = &self.eigenvectors;
        let rebuilt = v * DMatrix::from_diagonal(&self.eigenvalues) * v.transpose();
        (rebuilt - h.matrix()).amax()
    }

    /// `max |V^T V - I|`.
    pub fn orthogonality_error(&self) -> f64 {
        let n = self.dim();
        (self.eigenvectors.transpose() * &self.eigenvectors - DMatrix::identity(n, n)).amax()
    }

    /// `V exp(-i diag(w) t) V^T psi`, computed on raw amplitudes.
    pub fn evolve_amplitudes(&self, psi: &[C64], t: f64) -> Vec<C64> {
        if t == 0.0 {
            return psi.to_vec();
        }
        let v = &self.eigenvectors;
        let re = DVector::from_iterator(psi.len(), psi.iter().map(|a| a.re));
        let im = DVector::from_iterator(psi.len(), psi.iter().map(|a| a.im));
        let cr = v.tr_mul(&re);
        let ci = v.tr_mul(&im);
        let mut rot_re = DVector::zeros(psi.len());
        let mut rot_im = DVector::zeros(psi.len());
        for k in 0..psi.len() {
            let phase = C64::from_polar(1.0, -self.eigenvalues[k] * t);
            let c = C64::new(cr[k], ci[k]) * phase;
            rot_re[k] = c.re;
            rot_im[k] = c.im;
        }
        let out_re = v * rot_re;
        let out_im = v * rot_im;
        out_re
            .iter()
            .zip(out_im.iter())
            .map(|(&r, &i)| C64::new(r, i))
            .collect()
    }

    pub fn evolve(&self, psi: &SesState, t: f64) -> Result<SesState> {
        check_dims(self.dim(), psi.dim())?;
        if !t.is_finite() {
            return Err(SesError::NonFinite("evolution time"));
        }
        Ok(SesState::from_raw(self.evolve_amplitudes(psi.amplitudes(), t)))
    }

    /// The full unitary `exp(-i H t)`.
    pub fn unitary(&self, t: f64) -> DMatrix<C64> {
        let v = self.eigenvectors.map(|x| C64::new(x, 0.0));
        let phases = DVector::from_iterator(
            self.dim(),
            self.eigenvalues.iter().map(|&w| C64::from_polar(1.0, -w * t)),
        );
        &v * DMatrix::from_diagonal(&phases) * v.transpose()
    }
}

/// Exact propagation `exp(-i H t) psi`; negative `t` runs backwards.
pub fn evolve_exact(h: &SesHamiltonian, psi: &SesState, t: f64) -> Result<SesState> {
    check_dims(h.dim(), psi.dim())?;
    EigenPropagator::new(h)?.evolve(psi, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_hamiltonian;
    use crate::types::{fidelity, norm_sq, ses_basis_state, uniform_state};
    use std::f64::consts::PI;

    #[test]
    fn zero_hamiltonian_is_identity() {
        let psi = SesState::normalized(vec![C64::new(0.3, 0.4), C64::new(-0.1, 0.2)]).unwrap();
        let out = evolve_exact(&SesHamiltonian::zeros(2), &psi, 3.5).unwrap();
        for (a, b) in out.amplitudes().iter().zip(psi.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn rabi_swap() {
        // exp(-i g t sigma_x) at g t = pi/2 is -i sigma_x
        let g = 3.0;
        let h = SesHamiltonian::new(DMatrix::from_row_slice(2, 2, &[0.0, g, g, 0.0])).unwrap();
        let out = evolve_exact(&h, &ses_basis_state(2, 1).unwrap(), PI / (2.0 * g)).unwrap();
        assert!(out.amplitudes()[0].norm() < 1e-14);
        assert!((out.amplitudes()[1] - C64::new(0.0, -1.0)).norm() < 1e-14);
    }

    #[test]
    fn decomposition_invariants() {
        for (n, seed) in [(5, 1), (40, 2), (120, 3)] {
            let h = random_hamiltonian(n, 7.0, seed);
            let e = EigenPropagator::new(&h).unwrap();
            assert!(e.reconstruction_error(&h) <= 1e-10 * h.max_abs());
            assert!(e.orthogonality_error() <= 1e-12);
        }
    }

    #[test]
    fn unitarity_composition_and_reversal() {
        let h = random_hamiltonian(30, 1.0, 11);
        let e = EigenPropagator::new(&h).unwrap();
        let psi = uniform_state(30).unwrap();
        let a = e.evolve(&psi, 0.8).unwrap();
        assert!((norm_sq(a.amplitudes()).sqrt() - 1.0).abs() <= 1e-12);
        let ab = e.evolve(&a, 1.3).unwrap();
        let direct = e.evolve(&psi, 2.1).unwrap();
        assert!(fidelity(&ab, &direct).unwrap() >= 1.0 - 1e-10);
        let back = e.evolve(&a, -0.8).unwrap();
        assert!(fidelity(&back, &psi).unwrap() >= 1.0 - 1e-10);
    }

    #[test]
    fn energy_conserved() {
        let h = random_hamiltonian(25, 1.0, 4);
        let psi = ses_basis_state(25, 3).unwrap();
        let e0 = h.expectation(psi.amplitudes());
        for t in [0.5, 5.0, 50.0] {
            let out = evolve_exact(&h, &psi, t).unwrap();
            let e = h.expectation(out.amplitudes());
            assert!((e - e0).abs() <= 1e-9 * e0.abs().max(h.max_abs()));
        }
    }

    #[test]
    fn unitary_matches_state_evolution() {
        let h = random_hamiltonian(6, 1.0, 8);
        let e = EigenPropagator::new(&h).unwrap();
        let u = e.unitary(0.9);
        let psi = ses_basis_state(6, 4).unwrap();
        let out = e.evolve(&psi, 0.9).unwrap();
        for i in 0..6 {
            assert!((u[(i, 3)] - out.amplitudes()[i]).norm() < 1e-13);
        }
    }

    #[test]
    fn rejects_non_finite() {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 0)] = f64::NAN;
        assert!(SesHamiltonian::new(m).is_err());
        let h = SesHamiltonian::zeros(2);
        assert!(evolve_exact(&h, &uniform_state(2).unwrap(), f64::INFINITY).is_err());
        assert!(evolve_exact(&h, &uniform_state(3).unwrap(), 1.0).is_err());
    }
}
