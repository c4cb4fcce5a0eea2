//! Seedable, splittable randomness streams.
//!
//! Every stream is a ChaCha20 generator. A master seed `s: u64` is expanded
//! to a 256-bit key with `SeedableRng::seed_from_u64`. Stream `0` of that key
//! is the master stream; batch item `i` draws from stream `i + 1` of the same
//! key ([`RngStream::substream`]). Streams of one key never overlap, so batch
//! output depends only on `(seed, i)` and not on how work is scheduled.
//! [`RngStream::split`] derives a fresh key from the parent stream's output
//! for ad hoc fan-out.

use rand::{RngCore, SeedableRng};
use rayon::prelude::*;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

/// Human-readable description of the generator and splitting rule, recorded
/// in every run report.
pub const GENERATOR_DESCRIPTION: &str =
    "ChaCha20 (rand_chacha 0.9); key = seed_from_u64(seed); master = stream 0; batch item i = stream i+1";

#[derive(Clone, Debug)]
pub struct RngStream {
    inner: ChaCha20Rng,
}

/// Serializable position of a stream; restoring it resumes the exact sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamState {
    pub key: [u8; 32],
    pub stream: u64,
    pub word_pos: u128,
}

impl RngStream {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            inner: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    /// Stream for batch item `index` under master `seed`.
    pub fn substream(seed: u64, index: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(seed);
        inner.set_stream(index.wrapping_add(1));
        Self { inner }
    }

    /// A child stream keyed from 32 bytes of this stream's output.
    pub fn split(&mut self) -> Self {
        let mut key = [0u8; 32];
        self.inner.fill_bytes(&mut key);
        Self {
            inner: ChaCha20Rng::from_seed(key),
        }
    }

    /// Uniform draw on the open interval (0, 1).
    ///
    /// Uses the top 53 bits of a 64-bit word, offset by half an ulp, so the
    /// result is never 0 or 1.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        ((self.inner.next_u64() >> 11) as f64 + 0.5) * SCALE
    }

    /// Bernoulli(p) draw; `p >= 1` is always true and `p <= 0` always false.
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Geometric(p) on {1, 2, ...} by inversion.
    pub fn geometric(&mut self, p: f64) -> u64 {
        if p >= 1.0 {
            return 1;
        }
        let u = self.uniform();
        let t = 1.0 + (u.ln() / (-p).ln_1p()).floor();
        if t >= u64::MAX as f64 {
            u64::MAX
        } else {
            t as u64
        }
    }

    /// Uniform draw on {1, ..., m}.
    pub fn uniform_index1(&mut self, m: usize) -> usize {
        debug_assert!(m >= 1);
        let v = (self.uniform() * m as f64) as usize + 1;
        v.min(m)
    }

    pub fn state(&self) -> StreamState {
        StreamState {
            key: self.inner.get_seed(),
            stream: self.inner.get_stream(),
            word_pos: self.inner.get_word_pos(),
        }
    }

    pub fn restore(state: &StreamState) -> Self {
        let mut inner = ChaCha20Rng::from_seed(state.key);
        inner.set_stream(state.stream);
        inner.set_word_pos(state.word_pos);
        Self { inner }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Run `draw` for items `0..n` in parallel, item `i` on
/// [`RngStream::substream`]`(seed, i)`, collecting results in item order.
pub fn par_batch<T, F>(n: usize, seed: u64, draw: F) -> crate::Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut RngStream) -> crate::Result<T> + Sync,
{
    (0..n as u64)
        .into_par_iter()
        .map(|i| draw(&mut RngStream::substream(seed, i)))
        .collect()
}

/// Inversion draw from a probability vector given its cumulative sums.
///
/// Returns the first index whose cumulative mass exceeds `u`, skipping
/// trailing zero-mass entries that rounding might otherwise select.
pub fn sample_cumulative(cdf: &[f64], u: f64) -> usize {
    let total = *cdf.last().expect("nonempty distribution");
    let target = u * total;
    let idx = cdf.partition_point(|&c| c <= target);
    if idx < cdf.len() {
        return idx;
    }
    // u * total landed on the final cumulative value; pick the last
    // index carrying positive mass.
    let mut j = cdf.len() - 1;
    while j > 0 && cdf[j] == cdf[j - 1] {
        j -= 1;
    }
    j
}

pub fn cumulative(weights: &[f64]) -> Vec<f64> {
    weights
        .iter()
        .scan(0.0, |acc, &w| {
            *acc += w;
            Some(*acc)
        })
        .collect()
}
