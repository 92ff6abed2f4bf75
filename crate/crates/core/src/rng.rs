//! Deterministic, splittable randomness.
//!
//! Every generated artifact is reproducible from a single `u64` seed. Child
//! streams are derived by hashing the parent seed with a label, so adding a
//! new consumer never perturbs the draws of existing ones.

use num_bigint::{BigInt, RandBigInt};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha20Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent child stream named by `label`, derived from the seed only.
    pub fn split(&self, label: &str) -> SeededRng {
        Self::new(derive_seed(self.seed, label))
    }

    /// Child stream for the `index`-th trial of a batch.
    pub fn split_indexed(&self, label: &str, index: u64) -> SeededRng {
        Self::new(derive_seed(self.seed, &format!("{label}#{index}")))
    }

    /// Uniform integer in `[lo, hi]`.
    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        self.inner.gen_range(lo..=hi)
    }

    pub fn range_usize(&mut self, lo: usize, hi: usize) -> usize {
        self.inner.gen_range(lo..=hi)
    }

    /// Uniform big integer in `[lo, hi]`.
    pub fn range_bigint(&mut self, lo: &BigInt, hi: &BigInt) -> BigInt {
        let upper = hi + 1;
        self.inner.gen_bigint_range(lo, &upper)
    }

    pub fn coin(&mut self) -> bool {
        self.inner.gen_bool(0.5)
    }

    pub fn sign(&mut self) -> i64 {
        if self.coin() {
            1
        } else {
            -1
        }
    }

    pub fn unit_f64(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }

    /// Uniformly random permutation of `0..n` (Fisher-Yates).
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = self.range_usize(0, i);
            perm.swap(i, j);
        }
        perm
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }
}

fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(label.as_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = SeededRng::new(7);
        let mut b = SeededRng::new(7);
        for _ in 0..16 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn split_is_label_dependent_and_stateless() {
        let mut parent = SeededRng::new(1);
        let before = parent.split("keygen").next_u64();
        parent.next_u64();
        let after = parent.split("keygen").next_u64();
        assert_eq!(before, after);
        assert_ne!(before, parent.split("encrypt").next_u64());
    }

    #[test]
    fn permutation_is_a_permutation() {
        let mut rng = SeededRng::new(3);
        let mut p = rng.permutation(9);
        p.sort_unstable();
        assert_eq!(p, (0..9).collect::<Vec<_>>());
    }
}
