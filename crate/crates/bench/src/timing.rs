use std::hint::black_box;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sesim_core::evolution::{evolve_ode, EigenPropagator};
use sesim_core::random::{random_hamiltonian, random_state};
use sesim_core::types::{SesHamiltonian, SesState};
use sha2::{Digest, Sha256};

use crate::config::{BenchConfig, SyntheticTimings};
use crate::crossover::TimingKind;
use crate::BenchError;

/// Random instance timed for one `n`.
///
/// The Hamiltonian uses seed `cfg.seed + n` and the initial state seed
/// `cfg.seed + n + 2^32`, so rows never share a stream.
#[derive(Clone, Debug, PartialEq)]
pub struct Workload {
    pub n: usize,
    pub hamiltonian: SesHamiltonian,
    pub psi: SesState,
    pub theta_max: f64,
    g_max: f64,
    seed: u64,
}

impl Workload {
    pub fn new(n: usize, cfg: &BenchConfig) -> Self {
        let seed = cfg.seed.wrapping_add(n as u64);
        Workload {
            n,
            hamiltonian: random_hamiltonian(n, cfg.g_max, seed),
            psi: random_state(n, seed.wrapping_add(1 << 32)),
            theta_max: cfg.theta_max,
            g_max: cfg.g_max,
            seed,
        }
    }

    /// RK4 steps for a run of length `t_qc`.
    pub fn ode_steps(&self, t_qc: f64) -> usize {
        (t_qc.abs() * self.hamiltonian.row_sum_norm() / self.theta_max).ceil() as usize
    }

    /// SHA-256 over the instance and the step counts for `t_qc_list`.
    pub fn hash(&self, t_qc_list: &[f64]) -> String {
        let mut h = Sha256::new();
        h.update(b"sesim-workload-v1");
        h.update((self.n as u64).to_le_bytes());
        h.update(self.seed.to_le_bytes());
        h.update(self.g_max.to_le_bytes());
        h.update(self.theta_max.to_le_bytes());
        for x in self.hamiltonian.matrix().iter() {
            h.update(x.to_le_bytes());
        }
        for a in self.psi.amplitudes() {
            h.update(a.re.to_le_bytes());
            h.update(a.im.to_le_bytes());
        }
        for &t in t_qc_list {
            h.update(t.to_le_bytes());
            h.update((self.ode_steps(t) as u64).to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

/// Per-run wall-clock seconds over the repetitions of one cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellTiming {
    pub median: f64,
    pub min: f64,
    pub max: f64,
    /// Runs per timed sample; above 1 when the cell was auto-batched.
    pub batch: usize,
    pub samples: Vec<f64>,
}

impl CellTiming {
    fn from_samples(samples: Vec<f64>, batch: usize) -> Self {
        let mut sorted = samples.clone();
        sorted.sort_by(f64::total_cmp);
        let k = sorted.len();
        let median = if k % 2 == 1 {
            sorted[k / 2]
        } else {
            0.5 * (sorted[k / 2 - 1] + sorted[k / 2])
        };
        CellTiming {
            median,
            min: sorted[0],
            max: sorted[k - 1],
            batch,
            samples,
        }
    }
}

/// One timed quantity: an ODE run or a diagonalization for `t_qc`.
#[derive(Clone, Copy, Debug)]
pub struct Cell<'a> {
    pub workload: &'a Workload,
    pub kind: TimingKind,
    pub t_qc: f64,
}

/// Source of cell timings. [`WallClock`] measures; [`Synthetic`] evaluates a
/// fixed polynomial model and is used to check the crossover algebra.
pub trait TimingBackend {
    fn time_ode(&mut self, w: &Workload, t_qc: f64) -> Result<CellTiming, BenchError>;
    fn time_diag(&mut self, w: &Workload, t_qc: f64) -> Result<CellTiming, BenchError>;
    /// Times several cells as one batch.
    fn time_cells(&mut self, cells: &[Cell<'_>]) -> Result<Vec<CellTiming>, BenchError> {
        cells
            .iter()
            .map(|c| match c.kind {
                TimingKind::Ode => self.time_ode(c.workload, c.t_qc),
                TimingKind::Diag => self.time_diag(c.workload, c.t_qc),
            })
            .collect()
    }
    /// Threads a timed cell may use.
    fn threads(&self) -> usize;
    fn is_synthetic(&self) -> bool {
        false
    }
}

pub struct WallClock {
    repetitions: usize,
    min_cell_seconds: f64,
    pool: Option<rayon::ThreadPool>,
}

impl WallClock {
    pub fn new(cfg: &BenchConfig) -> Result<Self, BenchError> {
        let pool = if cfg.exclusive_mode {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(1)
                    .build()
                    .map_err(|e| BenchError::Pool(e.to_string()))?,
            )
        } else {
            None
        };
        Ok(WallClock {
            repetitions: cfg.repetitions,
            min_cell_seconds: cfg.min_cell_seconds,
            pool,
        })
    }

    /// Times every job with one sample per job per round, so slow spells of
    /// the machine are spread over all cells instead of landing in one.
    fn run(&self, jobs: &mut [Box<dyn FnMut() + Send + '_>]) -> Vec<CellTiming> {
        let reps = self.repetitions;
        let min_cell = self.min_cell_seconds;
        let mut body = move || {
            // warmup, discarded; also sizes the batch
            let batches: Vec<usize> = jobs
                .iter_mut()
                .map(|f| {
                    let t0 = Instant::now();
                    f();
                    let est = t0.elapsed().as_secs_f64();
                    if est < min_cell {
                        (min_cell / est.max(1e-9)).ceil() as usize
                    } else {
                        1
                    }
                })
                .collect();
            let mut samples = vec![Vec::with_capacity(reps); jobs.len()];
            for _ in 0..reps {
                for ((f, &batch), out) in jobs.iter_mut().zip(&batches).zip(&mut samples) {
                    let t0 = Instant::now();
                    for _ in 0..batch {
                        f();
                    }
                    out.push(t0.elapsed().as_secs_f64() / batch as f64);
                }
            }
            samples
                .into_iter()
                .zip(batches)
                .map(|(s, b)| CellTiming::from_samples(s, b))
                .collect()
        };
        match &self.pool {
            Some(pool) => pool.install(body),
            None => body(),
        }
    }

    fn ode_job<'a>(w: &'a Workload, t_qc: f64) -> Box<dyn FnMut() + Send + 'a> {
        Box::new(move || {
            black_box(evolve_ode(&w.hamiltonian, &w.psi, black_box(t_qc), w.theta_max).ok());
        })
    }

    fn diag_job<'a>(w: &'a Workload, t_qc: f64) -> Box<dyn FnMut() + Send + 'a> {
        Box::new(move || {
            let prop = EigenPropagator::new(&w.hamiltonian).ok();
            black_box(prop.map(|p| p.evolve_amplitudes(w.psi.amplitudes(), black_box(t_qc))));
        })
    }
}

impl TimingBackend for WallClock {
    fn time_ode(&mut self, w: &Workload, t_qc: f64) -> Result<CellTiming, BenchError> {
        // surface errors once, outside the timed region
        evolve_ode(&w.hamiltonian, &w.psi, t_qc, w.theta_max)?;
        Ok(self.run(&mut [Self::ode_job(w, t_qc)]).remove(0))
    }

    fn time_diag(&mut self, w: &Workload, t_qc: f64) -> Result<CellTiming, BenchError> {
        EigenPropagator::new(&w.hamiltonian)?;
        Ok(self.run(&mut [Self::diag_job(w, t_qc)]).remove(0))
    }

    fn time_cells(&mut self, cells: &[Cell<'_>]) -> Result<Vec<CellTiming>, BenchError> {
        for c in cells {
            match c.kind {
                TimingKind::Ode => {
                    evolve_ode(
                        &c.workload.hamiltonian,
                        &c.workload.psi,
                        c.t_qc,
                        c.workload.theta_max,
                    )?;
                }
                TimingKind::Diag => {
                    EigenPropagator::new(&c.workload.hamiltonian)?;
                }
            }
        }
        let mut jobs: Vec<_> = cells
            .iter()
            .map(|c| match c.kind {
                TimingKind::Ode => Self::ode_job(c.workload, c.t_qc),
                TimingKind::Diag => Self::diag_job(c.workload, c.t_qc),
            })
            .collect();
        Ok(self.run(&mut jobs))
    }

    fn threads(&self) -> usize {
        match &self.pool {
            Some(p) => p.current_num_threads(),
            None => rayon::current_num_threads(),
        }
    }
}

pub struct Synthetic {
    model: SyntheticTimings,
    repetitions: usize,
}

impl Synthetic {
    pub fn new(model: SyntheticTimings, repetitions: usize) -> Self {
        Synthetic { model, repetitions }
    }

    fn constant(&self, seconds: f64) -> CellTiming {
        CellTiming::from_samples(vec![seconds; self.repetitions.max(1)], 1)
    }
}

impl TimingBackend for Synthetic {
    fn time_ode(&mut self, _w: &Workload, t_qc: f64) -> Result<CellTiming, BenchError> {
        let m = &self.model;
        Ok(self.constant(m.ode_intercept + m.ode_slope * t_qc + m.ode_curvature * t_qc * t_qc))
    }

    fn time_diag(&mut self, _w: &Workload, _t_qc: f64) -> Result<CellTiming, BenchError> {
        Ok(self.constant(self.model.diag_time))
    }

    fn threads(&self) -> usize {
        1
    }

    fn is_synthetic(&self) -> bool {
        true
    }
}

/// The backend `cfg` asks for.
pub fn backend_for(cfg: &BenchConfig) -> Result<Box<dyn TimingBackend>, BenchError> {
    Ok(match cfg.synthetic_timings {
        Some(model) => Box::new(Synthetic::new(model, cfg.repetitions)),
        None => Box::new(WallClock::new(cfg)?),
    })
}

/// Median wall-clock seconds of one ODE propagation over `t_qc`.
pub fn time_ode(n: usize, t_qc: f64, cfg: &BenchConfig) -> Result<CellTiming, BenchError> {
    cfg.validate()?;
    backend_for(cfg)?.time_ode(&Workload::new(n, cfg), t_qc)
}

/// Median wall-clock seconds of eigendecomposition plus one application.
pub fn time_diag(n: usize, cfg: &BenchConfig) -> Result<CellTiming, BenchError> {
    cfg.validate()?;
    backend_for(cfg)?.time_diag(&Workload::new(n, cfg), cfg.t_qc_list[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(CellTiming::from_samples(vec![3.0, 1.0, 2.0], 1).median, 2.0);
        let c = CellTiming::from_samples(vec![4.0, 1.0, 2.0, 3.0], 1);
        assert_eq!((c.median, c.min, c.max), (2.5, 1.0, 4.0));
    }

    #[test]
    fn workloads_are_deterministic() {
        let cfg = BenchConfig::new(vec![16], vec![1e-3, 1e-2]);
        let a = Workload::new(16, &cfg);
        let b = Workload::new(16, &cfg);
        assert_eq!(a, b);
        assert_eq!(a.hash(&cfg.t_qc_list), b.hash(&cfg.t_qc_list));
        let mut other = cfg.clone();
        other.seed = 1;
        assert_ne!(
            a.hash(&cfg.t_qc_list),
            Workload::new(16, &other).hash(&cfg.t_qc_list)
        );
        assert_ne!(
            a.hash(&cfg.t_qc_list),
            Workload::new(17, &cfg).hash(&cfg.t_qc_list)
        );
    }

    #[test]
    fn steps_match_integrator() {
        let cfg = BenchConfig::new(vec![12], vec![1e-3, 1e-2]);
        let w = Workload::new(12, &cfg);
        for t in [1e-4, 1e-3, 3e-2] {
            let out = evolve_ode(&w.hamiltonian, &w.psi, t, w.theta_max).unwrap();
            assert_eq!(out.steps, w.ode_steps(t));
        }
    }

    #[test]
    fn synthetic_backend_is_exact() {
        let cfg = BenchConfig::new(vec![4], vec![1.0, 10.0]);
        let w = Workload::new(4, &cfg);
        let mut s = Synthetic::new(
            SyntheticTimings {
                ode_intercept: 0.5,
                ode_slope: 2.0,
                diag_time: 3.0,
                ..Default::default()
            },
            3,
        );
        assert_eq!(s.time_ode(&w, 1.5).unwrap().median, 3.5);
        assert_eq!(s.time_diag(&w, 1e3).unwrap().median, 3.0);
    }
}
