//! The lab-frame model of the whole qubit array, no rotating-wave
//! approximation:
//!
//! `H = sum_i eps_i n_i + 1/2 sum_{i != i'} g_ii' sum_{mu,nu} J_mu,nu sigma^mu_i sigma^nu_i'`
//!
//! with `n_i = |1><1|` and `sigma^z = diag(1, -1)` in the `(|0>, |1>)` basis.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Result, SesError};
use crate::evolution::{rk4_integrate, EigenPropagator, Generator, DEFAULT_THETA_MAX};
use crate::types::{
    check_dims, check_full_size, Axis, CouplingTensor, DeviceParams, FullState, SesHamiltonian,
    C64,
};

/// Largest qubit count propagated through a dense eigendecomposition; larger
/// systems (up to the full-space limit) use RK4.
pub const FULL_EIGEN_MAX_QUBITS: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct FullModel {
    device: DeviceParams,
    coupling: CouplingTensor,
}

impl FullModel {
    pub fn new(device: DeviceParams, coupling: CouplingTensor) -> Result<Self> {
        check_full_size(device.n())?;
        Ok(FullModel { device, coupling })
    }

    /// The `sigma^x (x) sigma^x` model.
    pub fn xx(device: DeviceParams) -> Result<Self> {
        Self::new(device, CouplingTensor::xx())
    }

    pub fn n(&self) -> usize {
        self.device.n()
    }

    pub fn device(&self) -> &DeviceParams {
        &self.device
    }

    pub fn coupling(&self) -> &CouplingTensor {
        &self.coupling
    }

    pub fn hamiltonian(&self) -> FullHamiltonian {
        FullHamiltonian::build(&self.device, &self.coupling)
    }
}

/// A term `H[b ^ mask, b] = coeff[bit_i(b) + 2 bit_j(b)]`.
#[derive(Clone, Debug, PartialEq)]
struct FlipTerm {
    mask: usize,
    bit_i: usize,
    bit_j: usize,
    coeff: [C64; 4],
}

impl FlipTerm {
    fn coeff_at(&self, b: usize) -> C64 {
        self.coeff[((b >> self.bit_i) & 1) | (((b >> self.bit_j) & 1) << 1)]
    }
}

/// Matrix-free full-space Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct FullHamiltonian {
    n: usize,
    diagonal: Vec<f64>,
    terms: Vec<FlipTerm>,
}

/// Pauli action on one qubit: `sigma |b> = factor(b) |b ^ flip>`.
fn pauli_factor(axis: Axis, bit: usize) -> C64 {
    match (axis, bit) {
        (Axis::X, _) => C64::new(1.0, 0.0),
        (Axis::Y, 0) => C64::new(0.0, 1.0),
        (Axis::Y, _) => C64::new(0.0, -1.0),
        (Axis::Z, 0) => C64::new(1.0, 0.0),
        (Axis::Z, _) => C64::new(-1.0, 0.0),
    }
}

fn flips(axis: Axis) -> bool {
    axis != Axis::Z
}

impl FullHamiltonian {
    fn build(device: &DeviceParams, coupling: &CouplingTensor) -> Self {
        let n = device.n();
        let dim = 1usize << n;
        let eps = device.epsilon();
        let g = device.g();

        let mut diagonal: Vec<f64> = (0..dim)
            .map(|b| (0..n).filter(|k| b >> k & 1 == 1).map(|k| eps[k]).sum())
            .collect();
        let mut terms = Vec::new();

        // 1/2 sum_{i != j} g J_mn s^m_i s^n_j = sum_{i<j} g S_mn s^m_i s^n_j, S = (J + J^T)/2
        let sym = |m: Axis, v: Axis| 0.5 * (coupling.get(m, v) + coupling.get(v, m));

        for i in 0..n {
            for j in (i + 1)..n {
                let gij = g[(i, j)];
                if gij == 0.0 {
                    continue;
                }
                // group Pauli products by which bits they flip
                let mut by_mask: [[C64; 4]; 4] = [[C64::new(0.0, 0.0); 4]; 4];
                for mu in Axis::ALL {
                    for nu in Axis::ALL {
                        let s = sym(mu, nu);
                        if s == 0.0 {
                            continue;
                        }
                        let slot = usize::from(flips(mu)) | (usize::from(flips(nu)) << 1);
                        for (idx, c) in by_mask[slot].iter_mut().enumerate() {
                            let (bi, bj) = (idx & 1, idx >> 1);
                            *c += pauli_factor(mu, bi) * pauli_factor(nu, bj) * (gij * s);
                        }
                    }
                }
                // slot 0 flips nothing: sigma^z sigma^z, diagonal
                let zz = by_mask[0];
                for (b, d) in diagonal.iter_mut().enumerate() {
                    let idx = ((b >> i) & 1) | (((b >> j) & 1) << 1);
                    *d += zz[idx].re;
                }
                for (slot, coeff) in by_mask.iter().enumerate().skip(1) {
                    if coeff.iter().all(|c| c.norm() == 0.0) {
                        continue;
                    }
                    let mask = (if slot & 1 == 1 { 1 << i } else { 0 })
                        | (if slot & 2 == 2 { 1 << j } else { 0 });
                    terms.push(FlipTerm {
                        mask,
                        bit_i: i,
                        bit_j: j,
                        coeff: *coeff,
                    });
                }
            }
        }
        FullHamiltonian { n, diagonal, terms }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.coeff.iter().all(|c| c.im == 0.0))
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let dim = 1usize << self.n;
        let mut m = DMatrix::from_diagonal(&DVector::from_iterator(
            dim,
            self.diagonal.iter().map(|&d| C64::new(d, 0.0)),
        ));
        for t in &self.terms {
            for b in 0..dim {
                m[(b ^ t.mask, b)] += t.coeff_at(b);
            }
        }
        m
    }
}

impl Generator for FullHamiltonian {
    fn dim(&self) -> usize {
        1 << self.n
    }

    fn apply(&self, x: &[C64], out: &mut [C64]) {
        for ((o, &d), xv) in out.iter_mut().zip(&self.diagonal).zip(x) {
            *o = xv * d;
        }
        for t in &self.terms {
            for (b, xv) in x.iter().enumerate() {
                out[b ^ t.mask] += t.coeff_at(b) * xv;
            }
        }
    }

    fn spectral_bound(&self) -> f64 {
        (0..self.dim())
            .map(|b| {
                self.diagonal[b].abs()
                    + self.terms.iter().map(|t| t.coeff_at(b).norm()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FullEvolution {
    pub state: FullState,
    /// `|psi_out| - 1` before renormalization.
    pub norm_drift: f64,
    /// RK4 steps; zero on the exact routes.
    pub steps: usize,
}

/// Propagates a full-space state under the model for time `t` (us).
pub fn evolve_full(model: &FullModel, f: &FullState, t: f64) -> Result<FullEvolution> {
    let n = model.n();
    check_full_size(n)?;
    check_dims(n, f.n())?;
    if !t.is_finite() {
        return Err(SesError::NonFinite("evolution time"));
    }
    let h = model.hamiltonian();
    let psi = f.amplitudes();
    let (amps, steps) = if h.is_diagonal() {
        let out = psi
            .iter()
            .zip(&h.diagonal)
            .map(|(a, &e)| a * C64::from_polar(1.0, -e * t))
            .collect();
        (out, 0)
    } else if n <= FULL_EIGEN_MAX_QUBITS {
        let dense = h.to_dense();
        let out = if h.is_real() {
            let real = SesHamiltonian::from_upper(dense.map(|c| c.re));
            EigenPropagator::new(&real)?.evolve_amplitudes(psi, t)
        } else {
            hermitian_evolve(dense, psi, t)?
        };
        (out, 0)
    } else {
        let raw = rk4_integrate(&h, psi, t, DEFAULT_THETA_MAX)?;
        (raw.amplitudes, raw.steps)
    };
    let norm = crate::types::norm_sq(&amps).sqrt();
    let amps = if steps > 0 {
        amps.into_iter().map(|a| a / norm).collect()
    } else {
        amps
    };
    Ok(FullEvolution {
        state: FullState::from_raw(n, amps),
        norm_drift: norm - 1.0,
        steps,
    })
}

fn hermitian_evolve(m: DMatrix<C64>, psi: &[C64], t: f64) -> Result<Vec<C64>> {
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, 0)
        .ok_or(SesError::NonFinite("eigendecomposition"))?;
    let v = &eig.eigenvectors;
    let x = DVector::from_column_slice(psi);
    let mut c = v.ad_mul(&x);
    for (ck, &w) in c.iter_mut().zip(eig.eigenvalues.iter()) {
        *ck *= C64::from_polar(1.0, -w * t);
    }
    Ok((v * c).iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::evolve_exact;
    use crate::types::{
        embed_ses_in_full, fidelity, project_full_to_ses, ses_basis_state, HardwareBounds,
    };

    fn device(eps: Vec<f64>, g: DMatrix<f64>) -> DeviceParams {
        let lo = eps.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = eps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let gmax = g.amax().max(1.0);
        DeviceParams::new(eps, g, HardwareBounds::new(gmax, (lo, hi)).unwrap()).unwrap()
    }

    #[test]
    fn hermitian_for_general_coupling() {
        let j = CouplingTensor::new([[0.7, 0.2, -0.3], [0.5, 1.1, 0.4], [0.1, -0.6, 0.9]]).unwrap();
        let mut g = DMatrix::zeros(3, 3);
        for (a, b, v) in [(0, 1, 0.3), (0, 2, -0.5), (1, 2, 0.8)] {
            g[(a, b)] = v;
            g[(b, a)] = v;
        }
        let model = FullModel::new(device(vec![5.0, 5.5, 6.0], g), j).unwrap();
        let h = model.hamiltonian();
        let m = h.to_dense();
        assert!((m.adjoint() - &m).camax() < 1e-15);
        assert!(!h.is_real());
        // matrix-free apply equals dense product
        let x: Vec<C64> = (0..8).map(|k| C64::new(k as f64, 1.0 - k as f64)).collect();
        let mut out = vec![C64::new(0.0, 0.0); 8];
        h.apply(&x, &mut out);
        let dense = &m * DVector::from_column_slice(&x);
        for (a, b) in out.iter().zip(dense.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn decoupled_qubits_only_acquire_phase() {
        let eps = vec![30.0, 31.0, 32.5];
        let model = FullModel::xx(device(eps.clone(), DMatrix::zeros(3, 3))).unwrap();
        let t = 0.37;
        for i in 1..=3 {
            let f = embed_ses_in_full(&ses_basis_state(3, i).unwrap()).unwrap();
            let out = evolve_full(&model, &f, t).unwrap();
            let p = project_full_to_ses(&out.state).unwrap();
            assert_eq!(p.leakage, 0.0);
            let a = out.state.amplitudes()[1 << (i - 1)];
            assert!((a - C64::from_polar(1.0, -eps[i - 1] * t)).norm() < 1e-14);
        }
    }

    #[test]
    fn two_qubits_keep_exact_ses_dynamics() {
        // sigma^x sigma^x maps |10> <-> |01> and never leaves the pair sector.
        let eps = 100.0;
        let gv = 4.0;
        let g = DMatrix::from_row_slice(2, 2, &[0.0, gv, gv, 0.0]);
        let model = FullModel::xx(device(vec![eps, eps], g)).unwrap();
        let ses = SesHamiltonian::new(DMatrix::from_row_slice(2, 2, &[eps, gv, gv, eps])).unwrap();
        let psi = ses_basis_state(2, 1).unwrap();
        for t in [0.1, 0.3, 1.0] {
            let full = evolve_full(&model, &embed_ses_in_full(&psi).unwrap(), t).unwrap();
            let p = project_full_to_ses(&full.state).unwrap();
            assert!(p.leakage < 1e-14);
            let ideal = evolve_exact(&ses, &psi, t).unwrap();
            assert!(fidelity(&p.state, &ideal).unwrap() > 1.0 - 1e-12);
        }
    }

    #[test]
    fn rk4_route_matches_eigen_route() {
        let n = 4;
        let mut g = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                g[(i, j)] = 0.5 + 0.1 * (i + j) as f64;
                g[(j, i)] = g[(i, j)];
            }
        }
        let model = FullModel::xx(device(vec![20.0, 21.0, 22.0, 23.0], g)).unwrap();
        let h = model.hamiltonian();
        let f = embed_ses_in_full(&ses_basis_state(n, 2).unwrap()).unwrap();
        let exact = evolve_full(&model, &f, 0.8).unwrap();
        let raw = rk4_integrate(&h, f.amplitudes(), 0.8, 0.01).unwrap();
        for (a, b) in exact.state.amplitudes().iter().zip(&raw.amplitudes) {
            assert!((a - b).norm() < 1e-9);
        }
        assert!(exact.norm_drift.abs() < 1e-10);
    }

    #[test]
    fn size_guard() {
        let n = 15;
        let b = HardwareBounds::new(1.0, (1.0, 1.0)).unwrap();
        let d = DeviceParams::new(vec![1.0; n], DMatrix::zeros(n, n), b).unwrap();
        assert!(matches!(
            FullModel::xx(d),
            Err(SesError::SystemTooLarge { n: 15, .. })
        ));
    }
}
