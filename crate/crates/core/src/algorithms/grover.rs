use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::algorithms::prep_uniform;
use crate::error::{Result, SesError};
use crate::evolution::{Method, Propagator};
use crate::types::{check_dims, uniform_state, SesHamiltonian, SesState, C64};

/// Trajectories are recorded by default for databases smaller than this.
pub const TRAJECTORY_DEFAULT_MAX_N: usize = 4096;

/// Tolerance on `|U - e^{i phi} W|` for the evolved inversion operator.
const INVERSION_TOLERANCE: f64 = 1e-9;

/// `W = 2 |unif)(unif| - I`: diagonal `(2 - n)/n`, off-diagonal `2/n`.
pub fn inversion_operator(n: usize) -> Result<DMatrix<f64>> {
    if n == 0 {
        return Err(SesError::DimensionTooSmall { n, min: 1 });
    }
    let nf = n as f64;
    Ok(DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            (2.0 - nf) / nf
        } else {
            2.0 / nf
        }
    }))
}

/// The completely symmetric, fully coupled generator `g (J - I)` with `J`
/// the all-ones matrix.
pub fn inversion_generator(n: usize, g: f64) -> Result<SesHamiltonian> {
    if n < 2 {
        return Err(SesError::DimensionTooSmall { n, min: 2 });
    }
    let mut m = DMatrix::from_element(n, n, g);
    m.fill_diagonal(0.0);
    Ok(SesHamiltonian::from_upper(m))
}

/// `pi / (n g)`.
pub fn inversion_time(n: usize, g: f64) -> f64 {
    PI / (n as f64 * g)
}

/// `exp(-i g (J - I) pi/(n g))` together with its fit to `e^{i phi} W`.
#[derive(Clone, Debug)]
pub struct InversionEvolution {
    pub unitary: DMatrix<C64>,
    /// Best-fit global phase `phi`.
    pub phase: f64,
    /// `max |U - e^{i phi} W|`.
    pub deviation: f64,
}

/// Builds the inversion operator by Hamiltonian evolution and checks that it
/// equals `W` up to one global phase.
pub fn inversion_via_evolution(n: usize, g: f64) -> Result<InversionEvolution> {
    if !(g > 0.0) {
        return Err(SesError::InvalidArgument(format!(
            "coupling must be positive, got {g}"
        )));
    }
    let h = inversion_generator(n, g)?;
    let prop = Propagator::new(h, Method::EigenExact)?;
    let unitary = prop
        .eigen()
        .expect("eigen propagator")
        .unitary(inversion_time(n, g));
    let w = inversion_operator(n)?;
    let overlap: C64 = unitary
        .iter()
        .zip(w.iter())
        .map(|(u, &wv)| u * wv)
        .sum();
    let phase = overlap.arg();
    let rot = C64::from_polar(1.0, phase);
    let deviation = unitary
        .iter()
        .zip(w.iter())
        .map(|(u, &wv)| (u - rot * wv).norm())
        .fold(0.0, f64::max);
    if deviation > INVERSION_TOLERANCE {
        return Err(SesError::PhaseMismatch { deviation });
    }
    Ok(InversionEvolution {
        unitary,
        phase,
        deviation,
    })
}

/// Diagonal `+-1` oracle flipping the sign of the marked state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Oracle {
    n: usize,
    marked: usize,
}

pub fn oracle(n: usize, marked: usize) -> Result<Oracle> {
    if marked == 0 || marked > n {
        return Err(SesError::IndexOutOfRange { index: marked, n });
    }
    Ok(Oracle { n, marked })
}

impl Oracle {
    pub fn marked(&self) -> usize {
        self.marked
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (1..=self.n)
            .map(|i| if i == self.marked { -1.0 } else { 1.0 })
            .collect()
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_vec(self.diagonal()))
    }

    pub fn apply(&self, s: &SesState) -> Result<SesState> {
        check_dims(self.n, s.dim())?;
        let mut amps = s.amplitudes().to_vec();
        amps[self.marked - 1] = -amps[self.marked - 1];
        Ok(SesState::from_raw(amps))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroverMode {
    /// W realized by evolving under the fully coupled generator; the start
    /// state comes from star-network preparation.
    #[default]
    Device,
    /// W applied as a matrix to the exact uniform state.
    Math,
}

/// `round(pi sqrt(n) / 4)`.
pub fn default_iterations(n: usize) -> usize {
    (PI * (n as f64).sqrt() / 4.0).round() as usize
}

/// Amplitude-amplification prediction `sin^2((2k + 1) asin(1/sqrt(n)))`.
pub fn grover_success_probability(n: usize, k: usize) -> f64 {
    let theta = (1.0 / (n as f64).sqrt()).asin();
    ((2 * k + 1) as f64 * theta).sin().powi(2)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroverRun {
    pub n: usize,
    pub marked: usize,
    pub iterations: usize,
    /// Coupling of the W generator, rad/us.
    pub g: f64,
    pub mode: GroverMode,
    /// Marked-state probability after `k = 0..=iterations` steps.
    pub trajectory: Option<Vec<f64>>,
    pub final_state: SesState,
    /// Total device time `t_prep + K t_W` (us); zero in math mode.
    pub t_qu: f64,
    /// Global phase multiplied into the device-mode state so it matches the
    /// math-mode amplitudes; one in math mode.
    pub frame_phase: C64,
}

impl GroverRun {
    pub fn probabilities(&self) -> Vec<f64> {
        self.final_state.probabilities()
    }

    pub fn marked_probability(&self) -> f64 {
        self.final_state.amplitudes()[self.marked - 1].norm_sqr()
    }
}

/// Runs `(W O_marked)^K` from the uniform superposition.
///
/// `iterations` defaults to [`default_iterations`]; `record_trajectory`
/// defaults to `n < TRAJECTORY_DEFAULT_MAX_N`.
pub fn grover_search(
    n: usize,
    marked: usize,
    g: f64,
    iterations: Option<usize>,
    mode: GroverMode,
    record_trajectory: Option<bool>,
) -> Result<GroverRun> {
    if n < 2 {
        return Err(SesError::DimensionTooSmall { n, min: 2 });
    }
    let o = oracle(n, marked)?;
    let k = iterations.unwrap_or_else(|| default_iterations(n));
    let record = record_trajectory.unwrap_or(n < TRAJECTORY_DEFAULT_MAX_N);
    let mut frame_phase = C64::new(1.0, 0.0);

    let (mut state, step, mut t_qu): (SesState, Box<dyn Fn(&SesState) -> Result<SesState>>, f64) =
        match mode {
            GroverMode::Device => {
                let prep = prep_uniform(n, g)?;
                let prop = Propagator::new(inversion_generator(n, g)?, Method::EigenExact)?;
                let t = inversion_time(n, g);
                let overlap = prep.state.inner(&uniform_state(n)?)?;
                frame_phase = overlap / overlap.norm();
                (
                    prep.state,
                    Box::new(move |s: &SesState| Ok(prop.evolve(s, t)?.state)),
                    prep.t_qu,
                )
            }
            GroverMode::Math => {
                let w = inversion_operator(n)?.map(|x| C64::new(x, 0.0));
                (
                    uniform_state(n)?,
                    Box::new(move |s: &SesState| {
                        let v = &w * DVector::from_column_slice(s.amplitudes());
                        Ok(SesState::from_raw(v.iter().copied().collect()))
                    }),
                    0.0,
                )
            }
        };

    let marked_p = |s: &SesState| s.amplitudes()[marked - 1].norm_sqr();
    let mut trajectory = record.then(|| vec![marked_p(&state)]);
    for _ in 0..k {
        state = step(&o.apply(&state)?)?;
        if let Some(tr) = trajectory.as_mut() {
            tr.push(marked_p(&state));
        }
    }
    if mode == GroverMode::Device {
        t_qu += k as f64 * inversion_time(n, g);
        // each evolved step is -e^{i pi/n} W
        let step_phase = -C64::from_polar(1.0, -PI / n as f64);
        frame_phase *= step_phase.powu(k as u32);
        state = state.with_global_phase(frame_phase);
    }
    Ok(GroverRun {
        n,
        marked,
        iterations: k,
        g,
        mode,
        trajectory,
        final_state: state,
        t_qu,
        frame_phase,
    })
}
