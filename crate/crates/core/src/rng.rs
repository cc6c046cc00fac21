//! Deterministic Gaussian substreams.
//!
//! A trajectory stream is keyed by `(base_seed, trajectory)`; substream `i`
//! of that key is ChaCha8 stream number `i`. Draws therefore depend only on
//! the triple `(base_seed, trajectory, substream)`, never on scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// A family of independent standard normal sequences indexed by substream.
pub trait GaussianStream: Sync {
    /// Fills `out` with the first `out.len()` draws of substream `index`.
    fn fill_substream(&self, index: usize, out: &mut [f64]);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeededStream {
    key: [u8; 32],
}

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeededStream {
    pub fn for_trajectory(base_seed: u64, trajectory: usize) -> Self {
        let mut state = base_seed ^ (trajectory as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        Self { key }
    }

    pub fn substream(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(index as u64);
        rng
    }
}

impl GaussianStream for SeededStream {
    fn fill_substream(&self, index: usize, out: &mut [f64]) {
        let mut rng = self.substream(index);
        for x in out {
            *x = rng.sample(StandardNormal);
        }
    }
}

/// Every draw is zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroStream;

impl GaussianStream for ZeroStream {
    fn fill_substream(&self, _index: usize, out: &mut [f64]) {
        out.fill(0.0);
    }
}
