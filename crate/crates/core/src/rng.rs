//! Seedable, splittable random streams.
//!
//! Every stream is a ChaCha8 keystream. The 256-bit key is the little-endian
//! bytes of `seed` followed by 24 zero bytes, and the ChaCha stream selector
//! is `stream_id`, so choosing a stream is O(1) and distinct ids never share
//! state. Draws are consumed as 64-bit words in keystream order:
//!
//! * `uniform01`       = `(w >> 11) * 2^-53`, in `[0, 1)`
//! * `uniform_open01`  = `((w >> 11) + 0.5) * 2^-53`, in `(0, 1)`
//! * `normal01`        = Wichura's AS241 inverse normal CDF of one `uniform_open01`
//! * `bernoulli_half`  = top bit of `w`
//!
//! Child streams (`fork`, `split`) take one word `b` from the parent and key
//! the children as `(seed = b, stream_id = 0, 1, ...)`.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::special::normal_quantile;

const TWO_POW_M53: f64 = 1.0 / (1u64 << 53) as f64;

/// Identifies one reproducible stream of draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamKey {
    pub seed: u64,
    pub stream_id: u64,
}

impl StreamKey {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        StreamKey { seed, stream_id }
    }
}

/// An exclusively owned, strictly sequential source of draws.
#[derive(Debug, Clone)]
pub struct RandomStream {
    key: StreamKey,
    counter: u64,
    core: ChaCha8Rng,
}

/// Opens a stream positioned at draw 0.
pub fn new_stream(key: StreamKey) -> RandomStream {
    RandomStream::new(key)
}

impl RandomStream {
    pub fn new(key: StreamKey) -> Self {
        let mut bytes = [0u8; 32];
        bytes[..8].copy_from_slice(&key.seed.to_le_bytes());
        let mut core = ChaCha8Rng::from_seed(bytes);
        core.set_stream(key.stream_id);
        RandomStream {
            key,
            counter: 0,
            core,
        }
    }

    pub fn key(&self) -> StreamKey {
        self.key
    }

    /// Number of 64-bit words consumed so far.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter += 1;
        self.core.next_u64()
    }

    pub fn uniform01(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * TWO_POW_M53
    }

    pub fn uniform_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * TWO_POW_M53
    }

    pub fn normal01(&mut self) -> f64 {
        normal_quantile(self.uniform_open01())
    }

    pub fn bernoulli_half(&mut self) -> u8 {
        (self.next_u64() >> 63) as u8
    }

    /// Uniform index in `0..k`, by inversion of one `uniform01`.
    pub fn index(&mut self, k: usize) -> usize {
        debug_assert!(k > 0);
        ((self.uniform01() * k as f64) as usize).min(k - 1)
    }

    /// Derives one child stream, consuming one word of this stream.
    pub fn fork(&mut self) -> RandomStream {
        let base = self.next_u64();
        RandomStream::new(StreamKey::new(base, 0))
    }

    /// Derives `k` mutually independent child streams, consuming one word of this stream.
    pub fn split(&mut self, k: usize) -> Vec<RandomStream> {
        let base = self.next_u64();
        (0..k as u64)
            .map(|id| RandomStream::new(StreamKey::new(base, id)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_keys_replay() {
        let mut a = new_stream(StreamKey::new(42, 0));
        let mut b = new_stream(StreamKey::new(42, 0));
        for _ in 0..100 {
            assert_eq!(a.uniform01().to_bits(), b.uniform01().to_bits());
        }
        assert_eq!(a.counter(), 100);
    }

    #[test]
    fn distinct_streams_differ() {
        let mut a = new_stream(StreamKey::new(42, 0));
        let mut b = new_stream(StreamKey::new(42, 1));
        assert_ne!(a.uniform01(), b.uniform01());
    }

    #[test]
    fn uniform_mean() {
        let mut s = new_stream(StreamKey::new(42, 0));
        let n = 100_000;
        let mean = (0..n).map(|_| s.uniform01()).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.005, "mean {mean}");
    }

    #[test]
    fn uniform_half_open() {
        let mut s = new_stream(StreamKey::new(9, 3));
        for _ in 0..1_000_000 {
            let u = s.uniform01();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn bernoulli_frequency() {
        let mut s = new_stream(StreamKey::new(5, 0));
        let n = 100_000;
        let ones = (0..n).map(|_| s.bernoulli_half() as u64).sum::<u64>();
        let freq = ones as f64 / n as f64;
        assert!((freq - 0.5).abs() < 0.0047, "freq {freq}");
    }

    #[test]
    fn normal_moments() {
        let mut s = new_stream(StreamKey::new(17, 0));
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| s.normal01()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 0.0095, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn forks_are_deterministic_and_distinct() {
        let mut p1 = new_stream(StreamKey::new(1, 0));
        let mut p2 = new_stream(StreamKey::new(1, 0));
        let mut c1 = p1.split(2);
        let mut c2 = p2.split(2);
        assert_eq!(c1[0].next_u64(), c2[0].next_u64());
        assert_ne!(c1[1].next_u64(), c1[0].next_u64());
        // a second fork from the same parent must not repeat the first
        let mut d = p1.fork();
        assert_ne!(d.key(), c1[0].key());
        assert_ne!(d.next_u64(), c2[1].next_u64());
    }
}
