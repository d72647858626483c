//! State propagation.
//!
//! Three routes are available: exact propagation through a cached
//! eigendecomposition of a real symmetric SES Hamiltonian, fixed-step RK4
//! integration of the Schrodinger equation, and propagation of the full
//! 2^n-dimensional lab-frame model used to measure leakage out of the
//! single-excitation subspace.

mod exact;
mod full;
mod leakage;
mod ode;

pub use exact::{evolve_exact, EigenPropagator};
pub use full::{evolve_full, FullEvolution, FullHamiltonian, FullModel, FULL_EIGEN_MAX_QUBITS};
pub use leakage::{leakage_scan, LeakageProtocol, LeakageRow, LeakageSetup};
pub use ode::{evolve_ode, rk4_integrate, OdeEvolution, RawEvolution, DEFAULT_THETA_MAX};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::types::{SesHamiltonian, SesState, C64};

/// Below this dimension a dense matvec always runs on the calling thread.
const PARALLEL_MATVEC_MIN_DIM: usize = 256;

/// A linear generator `H` of the evolution `d/dt psi = -i H psi`.
pub trait Generator: Sync {
    fn dim(&self) -> usize;

    /// `out = H x`.
    fn apply(&self, x: &[C64], out: &mut [C64]);

    /// Upper bound on the spectral radius of `H`.
    fn spectral_bound(&self) -> f64;
}

impl Generator for SesHamiltonian {
    fn dim(&self) -> usize {
        SesHamiltonian::dim(self)
    }

    fn apply(&self, x: &[C64], out: &mut [C64]) {
        dense_matvec(self.matrix(), x, out);
    }

    fn spectral_bound(&self) -> f64 {
        self.row_sum_norm()
    }
}

/// `out = M x` for a real symmetric `M`; uses columns as rows.
pub(crate) fn dense_matvec(m: &DMatrix<f64>, x: &[C64], out: &mut [C64]) {
    let n = m.nrows();
    let data = m.as_slice();
    let row = |i: usize| -> C64 {
        let col = &data[i * n..(i + 1) * n];
        // independent lanes so the reduction vectorizes
        let mut re = [0.0f64; 4];
        let mut im = [0.0f64; 4];
        let (hc, hr) = col.split_at(n - n % 4);
        let (xc, xr) = x.split_at(n - n % 4);
        for (h, v) in hc.chunks_exact(4).zip(xc.chunks_exact(4)) {
            for k in 0..4 {
                re[k] += h[k] * v[k].re;
                im[k] += h[k] * v[k].im;
            }
        }
        for (h, v) in hr.iter().zip(xr) {
            re[0] += h * v.re;
            im[0] += h * v.im;
        }
        C64::new((re[0] + re[1]) + (re[2] + re[3]), (im[0] + im[1]) + (im[2] + im[3]))
    };
    if n >= PARALLEL_MATVEC_MIN_DIM && rayon::current_num_threads() > 1 {
        out.par_iter_mut().enumerate().for_each(|(i, o)| *o = row(i));
    } else {
        out.iter_mut().enumerate().for_each(|(i, o)| *o = row(i));
    }
}

/// How a [`Propagator`] advances states.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "method")]
pub enum Method {
    EigenExact,
    OdeRk4 { theta_max: f64 },
}

/// Result of a propagation with its diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct Evolved {
    pub state: SesState,
    /// `|psi_out| - 1` before any renormalization.
    pub norm_drift: f64,
    /// Integration steps taken (zero for the exact route).
    pub steps: usize,
}

/// A reusable SES propagator for one Hamiltonian.
#[derive(Clone, Debug)]
pub struct Propagator {
    hamiltonian: SesHamiltonian,
    kind: Kind,
}

#[derive(Clone, Debug)]
enum Kind {
    Eigen(EigenPropagator),
    Ode { theta_max: f64 },
}

impl Propagator {
    pub fn new(hamiltonian: SesHamiltonian, method: Method) -> Result<Self> {
        let kind = match method {
            Method::EigenExact => Kind::Eigen(EigenPropagator::new(&hamiltonian)?),
            Method::OdeRk4 { theta_max } => {
                ode::check_theta(theta_max)?;
                Kind::Ode { theta_max }
            }
        };
        Ok(Propagator { hamiltonian, kind })
    }

    pub fn method(&self) -> Method {
        match self.kind {
            Kind::Eigen(_) => Method::EigenExact,
            Kind::Ode { theta_max } => Method::OdeRk4 { theta_max },
        }
    }

    pub fn hamiltonian(&self) -> &SesHamiltonian {
        &self.hamiltonian
    }

    pub fn eigen(&self) -> Option<&EigenPropagator> {
        match &self.kind {
            Kind::Eigen(e) => Some(e),
            Kind::Ode { .. } => None,
        }
    }

    pub fn evolve(&self, psi: &SesState, t: f64) -> Result<Evolved> {
        match &self.kind {
            Kind::Eigen(e) => {
                let state = e.evolve(psi, t)?;
                let norm_drift = crate::types::norm_sq(state.amplitudes()).sqrt() - 1.0;
                Ok(Evolved {
                    state,
                    norm_drift,
                    steps: 0,
                })
            }
            Kind::Ode { theta_max } => {
                let out = evolve_ode(&self.hamiltonian, psi, t, *theta_max)?;
                Ok(Evolved {
                    state: out.state,
                    norm_drift: out.norm_drift,
                    steps: out.steps,
                })
            }
        }
    }
}
