//! splitmix64 with modulo-rejection sampling.
//!
//! The stream is fixed bit for bit so that the CLI, the service and any
//! other implementation agree on every exercise drawn from a seed.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    state: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("empty range: {lo} > {hi}")]
pub struct EmptyRange {
    pub lo: u64,
    pub hi: u64,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator { state: seed }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform integer in `lo..=hi`. Draws are rejected while they fall in
    /// the incomplete final block of `2^64`, so there is no modulo bias.
    pub fn uniform_ticks(&mut self, lo: u64, hi: u64) -> Result<u64, EmptyRange> {
        if lo > hi {
            return Err(EmptyRange { lo, hi });
        }
        let n = u128::from(hi - lo) + 1;
        let limit = ((1u128 << 64) / n) * n;
        loop {
            let z = u128::from(self.next_u64());
            if z < limit {
                return Ok(lo + (z % n) as u64);
            }
        }
    }
}
