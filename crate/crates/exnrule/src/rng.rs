//! Deterministic, splittable random streams.
//!
//! Every piece of randomness in this crate is drawn from an [`RngStream`],
//! which is addressed by a `(seed, stream_id)` pair. Streams with distinct
//! ids derived from one master seed are independent by construction, so
//! per-learner and per-repetition work can run in parallel while staying
//! bit-identical to a serial run.
//!
//! The construction is fixed and documented so sequences are reproducible
//! across platforms and releases:
//!
//! * key expansion: the 256-bit ChaCha8 key is the first four outputs of
//!   SplitMix64 seeded with `seed`, in little-endian byte order;
//! * stream selection: the ChaCha8 64-bit stream counter is set to
//!   `stream_id` (a different nonce per stream, hence independence);
//! * `next_f64` maps the top 53 bits of `next_u64` onto `[0, 1)`;
//! * `index(n)` uses rejection sampling on `next_u64` (values at or above
//!   the largest multiple of `n` are discarded, then reduced mod `n`);
//! * `shuffle` is a Fisher–Yates pass from the last element down;
//! * `sample_without_replacement(n, m)` partially shuffles the identity
//!   array `0..n` for `m` steps and returns the first `m` entries sorted
//!   ascending;
//! * `normal` is the Marsaglia polar transform with the usual spare-value
//!   cache. The uniform stream behind it is bit-exact everywhere; the
//!   transform itself additionally depends on the platform's `ln`, which
//!   agrees across mainstream libm implementations.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 step: advances `state` and returns the mixed output.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN_GAMMA);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A named random stream addressed by `(seed, stream_id)`.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
    spare_normal: Option<f64>,
}

impl RngStream {
    /// Opens the stream `(seed, stream_id)` at its start.
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut state = seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
            spare_normal: None,
        }
    }

    /// The master seed this stream was opened with.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The stream id this stream was opened with.
    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Next raw 64-bit value.
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform draw from `[0, 1)` using the top 53 bits of `next_u64`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Unbiased uniform draw from `0..n`.
    ///
    /// # Panics
    /// Panics if `n == 0`.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "index() requires a non-empty range");
        let n = n as u64;
        let zone = (u64::MAX / n) * n;
        loop {
            let x = self.next_u64();
            if x < zone {
                return (x % n) as usize;
            }
        }
    }

    /// In-place Fisher–Yates shuffle.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.index(i + 1);
            xs.swap(i, j);
        }
    }

    /// Draws `m` distinct values from `0..n`, returned sorted ascending.
    ///
    /// # Panics
    /// Panics if `m > n`.
    pub fn sample_without_replacement(&mut self, n: usize, m: usize) -> Vec<usize> {
        assert!(m <= n, "cannot draw {m} distinct values from 0..{n}");
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..m {
            let j = i + self.index(n - i);
            pool.swap(i, j);
        }
        pool.truncate(m);
        pool.sort_unstable();
        pool
    }

    /// Normal draw via the Marsaglia polar method.
    pub fn normal(&mut self, mean: f64, sd: f64) -> f64 {
        let z = match self.spare_normal.take() {
            Some(z) => z,
            None => loop {
                let u = 2.0 * self.next_f64() - 1.0;
                let v = 2.0 * self.next_f64() - 1.0;
                let s = u * u + v * v;
                if s > 0.0 && s < 1.0 {
                    let factor = (-2.0 * s.ln() / s).sqrt();
                    self.spare_normal = Some(v * factor);
                    break u * factor;
                }
            },
        };
        mean + sd * z
    }
}
