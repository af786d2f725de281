//! Seeded randomness.
//!
//! Every random choice in the toolkit comes from [`SeededRng`]: ChaCha8 keyed
//! by a 64-bit seed (expanded with `rand_core`'s PCG-based
//! `seed_from_u64`) and a 64-bit stream id, so independent phases of one run
//! never share a stream. Integer draws use Lemire's widening-multiply
//! rejection method on raw `u64` output, so no library distribution code sits
//! between the seed and the result.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Stream ids used by the sampling phases.
pub mod streams {
    pub const EVAL_BASE: u64 = 0x1000;
    pub const TRAIN_UNIFORM: u64 = 0x2000;
    pub const TRAIN_WEIGHTED: u64 = 0x2001;
    pub const SPELLING_PROMPTS_BASE: u64 = 0x3000;
    pub const VALIDATION_BASE: u64 = 0x4000;
}

#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        SeededRng { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `0..bound`. `bound` must be positive.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "below() needs a positive bound");
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let wide = (self.next_u64() as u128) * (bound as u128);
            if (wide as u64) >= threshold {
                return (wide >> 64) as u64;
            }
        }
    }

    /// Uniform float in `[0, 1)` with 53 random bits.
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// `k` distinct indices from `0..n`, uniformly, in draw order
    /// (partial Fisher-Yates). Panics if `k > n`.
    pub fn sample_indices(&mut self, n: usize, k: usize) -> Vec<usize> {
        assert!(k <= n, "cannot draw {k} of {n}");
        let mut idx: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.below((n - i) as u64) as usize;
            idx.swap(i, j);
        }
        idx.truncate(k);
        idx
    }

    /// `k` distinct indices drawn without replacement with probability
    /// proportional to `weights` at each draw. Zero-weight items are never
    /// drawn; returns `None` when fewer than `k` items have positive weight.
    pub fn weighted_sample_indices(&mut self, weights: &[u64], k: usize) -> Option<Vec<usize>> {
        if weights.iter().filter(|&&w| w > 0).count() < k {
            return None;
        }
        let mut tree = Fenwick::new(weights);
        let mut out = Vec::with_capacity(k);
        for _ in 0..k {
            let target = self.below(tree.total());
            let i = tree.find(target);
            tree.clear(i, weights[i]);
            out.push(i);
        }
        Some(out)
    }
}

/// Binary indexed tree over integer weights.
struct Fenwick {
    tree: Vec<u128>,
    total: u128,
}

impl Fenwick {
    fn new(weights: &[u64]) -> Self {
        let n = weights.len();
        let mut tree = alloc::vec![0u128; n + 1];
        for (i, &w) in weights.iter().enumerate() {
            tree[i + 1] += w as u128;
            let parent = (i + 1) + ((i + 1) & (i + 1).wrapping_neg());
            if parent <= n {
                let v = tree[i + 1];
                tree[parent] += v;
            }
        }
        Fenwick {
            tree,
            total: weights.iter().map(|&w| w as u128).sum(),
        }
    }

    fn total(&self) -> u64 {
        u64::try_from(self.total).expect("total weight exceeds u64")
    }

    /// Index whose cumulative range contains `target`.
    fn find(&self, mut target: u64) -> usize {
        let n = self.tree.len() - 1;
        let mut pos = 0usize;
        let mut step = if n == 0 { 0 } else { 1usize << (usize::BITS - 1 - n.leading_zeros()) };
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= target as u128 {
                target -= self.tree[next] as u64;
                pos = next;
            }
            step >>= 1;
        }
        pos
    }

    fn clear(&mut self, index: usize, weight: u64) {
        let mut i = index + 1;
        while i < self.tree.len() {
            self.tree[i] -= weight as u128;
            i += i & i.wrapping_neg();
        }
        self.total -= weight as u128;
    }
}
