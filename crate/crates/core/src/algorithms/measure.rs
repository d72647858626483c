use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::types::SesState;

/// Samples per generator stream in [`sample_outcomes`].
pub const SAMPLE_CHUNK: usize = 4096;

/// One weak-simulation shot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    /// Sampled basis label, `1..=n`.
    pub outcome: usize,
    /// `|a_i|^2`.
    pub probabilities: Vec<f64>,
    pub seed: u64,
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn distribution(probabilities: &[f64]) -> WeightedIndex<f64> {
    WeightedIndex::new(probabilities).expect("normalized state has positive total weight")
}

/// Draws one outcome with probability `|a_i|^2`.
///
/// Equal to the first sample of `sample_outcomes(s, seed, _)`.
pub fn measure(s: &SesState, seed: u64) -> MeasurementRecord {
    let probabilities = s.probabilities();
    let outcome = distribution(&probabilities).sample(&mut stream(seed, 0)) + 1;
    MeasurementRecord {
        outcome,
        probabilities,
        seed,
    }
}

/// Draws `count` outcomes (labels `1..=n`).
///
/// Sample `k` comes from ChaCha8 stream `k / SAMPLE_CHUNK` of `seed`, so the
/// result does not depend on how chunks are spread across threads.
pub fn sample_outcomes(s: &SesState, seed: u64, count: usize) -> Vec<usize> {
    let dist = distribution(&s.probabilities());
    let mut out = vec![0usize; count];
    out.par_chunks_mut(SAMPLE_CHUNK)
        .enumerate()
        .for_each(|(chunk, slots)| {
            let mut rng = stream(seed, chunk as u64);
            for slot in slots {
                *slot = dist.sample(&mut rng) + 1;
            }
        });
    out
}
