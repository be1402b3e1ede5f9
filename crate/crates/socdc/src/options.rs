use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::spectral::DEFAULT_TOL;

/// Tolerance and search settings shared by every pipeline stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Options {
    pub tol: f64,
    pub seed: u64,
    /// Iteration budget for randomized searches (interior point, Condition 6).
    pub budget: usize,
    /// Sample count for falsification and certification.
    pub samples: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            tol: DEFAULT_TOL,
            seed: 0,
            budget: 2000,
            samples: 2000,
        }
    }
}

/// Stream identifiers keep the random sequences of different stages apart.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Stream {
    Interior = 1,
    Cond5 = 2,
    Cond6 = 3,
    Certify = 4,
    Sample = 5,
}

pub(crate) fn rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream as u64);
    r
}
