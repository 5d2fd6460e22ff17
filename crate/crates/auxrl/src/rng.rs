//! Deterministic random streams.
//!
//! Every stochastic component draws from an [`RngStream`]. A stream is a
//! ChaCha8 generator keyed by a 64-bit value; identical key + identical call
//! sequence gives an identical draw sequence on every platform. Streams fork
//! by label: the child key is a pure function of (parent key, label), so a
//! run can hand independent streams to the environment, the agent and the
//! evaluator without any cross-talk, and reruns reproduce all of them.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// SplitMix64 finalizer; scrambles fork keys so related seeds decorrelate.
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// A forkable deterministic random stream.
#[derive(Clone, Debug)]
pub struct RngStream {
    key: u64,
    gen: ChaCha8Rng,
}

impl RngStream {
    /// Root stream for a run. Equal seeds give equal streams.
    pub fn from_seed(seed: u64) -> Self {
        Self::from_key(splitmix(seed))
    }

    fn from_key(key: u64) -> Self {
        let mut seed_bytes = [0u8; 32];
        let mut z = key;
        for chunk in seed_bytes.chunks_exact_mut(8) {
            z = splitmix(z);
            chunk.copy_from_slice(&z.to_le_bytes());
        }
        RngStream { key, gen: ChaCha8Rng::from_seed(seed_bytes) }
    }

    /// Child stream determined by (this stream's key, `label`). Forking does
    /// not consume or disturb the parent's draw sequence.
    pub fn fork(&self, label: &str) -> RngStream {
        Self::from_key(splitmix(self.key ^ fnv1a(label.as_bytes())))
    }

    /// Like [`fork`](Self::fork) with an index baked into the label; handy for
    /// per-seed or per-particle streams.
    pub fn fork_indexed(&self, label: &str, index: u64) -> RngStream {
        Self::from_key(splitmix(self.key ^ fnv1a(label.as_bytes()) ^ splitmix(index)))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.gen.next_u64()
    }

    /// Uniform draw in [0, 1) with 53 bits of precision.
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// True with probability `p` (clamped to [0, 1]).
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.unit_f64() < p
    }

    /// Uniform integer in [0, n). `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0)");
        let n = n as u64;
        // Rejection sampling over the largest multiple of n that fits in u64,
        // so every residue is exactly equally likely.
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return (v % n) as usize;
            }
        }
    }

    /// Uniform draw in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit_f64()
    }

    /// Index drawn from an unnormalized non-negative weight table.
    /// The table must have positive total mass.
    pub fn weighted(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().sum();
        assert!(total > 0.0, "weighted() needs positive total mass");
        let mut u = self.unit_f64() * total;
        for (i, &w) in weights.iter().enumerate() {
            u -= w;
            if u < 0.0 {
                return i;
            }
        }
        weights.len() - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_sequence() {
        let mut a = RngStream::from_seed(7);
        let mut b = RngStream::from_seed(7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn fork_is_deterministic_and_label_sensitive() {
        let root = RngStream::from_seed(3);
        let mut c1 = root.fork("env");
        let mut c2 = root.fork("env");
        let mut c3 = root.fork("agent");
        let x1: Vec<u64> = (0..8).map(|_| c1.next_u64()).collect();
        let x2: Vec<u64> = (0..8).map(|_| c2.next_u64()).collect();
        let x3: Vec<u64> = (0..8).map(|_| c3.next_u64()).collect();
        assert_eq!(x1, x2);
        assert_ne!(x1, x3);
    }

    #[test]
    fn fork_does_not_disturb_parent() {
        let mut a = RngStream::from_seed(11);
        let mut b = RngStream::from_seed(11);
        let _ = a.fork("child");
        let _ = a.fork("other");
        for _ in 0..16 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn children_independent_of_parent_draw_position() {
        let mut a = RngStream::from_seed(5);
        let b = RngStream::from_seed(5);
        for _ in 0..10 {
            a.next_u64();
        }
        let mut ca = a.fork("x");
        let mut cb = b.fork("x");
        for _ in 0..16 {
            assert_eq!(ca.next_u64(), cb.next_u64());
        }
    }

    /// Pin the raw stream so an accidental backend change cannot slip by:
    /// these values must never change across platforms or releases.
    #[test]
    fn stream_values_pinned() {
        let mut r = RngStream::from_seed(0);
        let first: Vec<u64> = (0..2).map(|_| r.next_u64()).collect();
        assert_eq!(first, PINNED_SEED0_HEAD, "stream backend or key schedule changed");
    }

    const PINNED_SEED0_HEAD: [u64; 2] = [12927895955287680437, 1749132463759663566];

    #[test]
    fn below_is_unbiased_enough() {
        let mut r = RngStream::from_seed(42);
        let mut counts = [0usize; 5];
        let n = 100_000;
        for _ in 0..n {
            counts[r.below(5)] += 1;
        }
        for c in counts {
            let p = c as f64 / n as f64;
            assert!((p - 0.2).abs() < 0.01, "bucket probability {p}");
        }
    }

    #[test]
    fn bernoulli_matches_probability() {
        let mut r = RngStream::from_seed(9);
        let n = 200_000;
        let hits = (0..n).filter(|_| r.bernoulli(0.6)).count();
        let p = hits as f64 / n as f64;
        assert!((p - 0.6).abs() < 0.005, "estimate {p}");
    }

    #[test]
    fn weighted_matches_masses() {
        let mut r = RngStream::from_seed(13);
        let w = [1.0, 3.0, 6.0];
        let mut counts = [0usize; 3];
        let n = 100_000;
        for _ in 0..n {
            counts[r.weighted(&w)] += 1;
        }
        assert!((counts[0] as f64 / n as f64 - 0.1).abs() < 0.01);
        assert!((counts[1] as f64 / n as f64 - 0.3).abs() < 0.01);
        assert!((counts[2] as f64 / n as f64 - 0.6).abs() < 0.01);
    }
}
