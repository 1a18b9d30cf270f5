//! Deterministic rational sample points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::symexpr::{rat, Rational};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SAMPLES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampler {
    pub seed: u64,
    pub count: usize,
}

impl Default for Sampler {
    fn default() -> Self {
        Sampler {
            seed: DEFAULT_SEED,
            count: DEFAULT_SAMPLES,
        }
    }
}

impl Sampler {
    pub fn new(seed: u64, count: usize) -> Self {
        Sampler { seed, count }
    }

    /// Generator for an independent stream; the same `(seed, stream)` always
    /// yields the same sequence.
    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(stream);
        r
    }

    /// `count` points of `[-1, 1]^dim` with small denominators.
    pub fn points(&self, dim: usize) -> Vec<Vec<Rational>> {
        let mut rng = self.rng(dim as u64);
        (0..self.count)
            .map(|_| (0..dim).map(|_| random_unit_rational(&mut rng)).collect())
            .collect()
    }
}

/// A rational `p/q` in `[-1, 1]` with `1 ≤ q ≤ 12`.
pub fn random_unit_rational(rng: &mut impl Rng) -> Rational {
    let q: i64 = rng.gen_range(1..=12);
    let p: i64 = rng.gen_range(-q..=q);
    rat(p, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_and_bounded() {
        let s = Sampler::default();
        let a = s.points(3);
        assert_eq!(a, s.points(3));
        assert_eq!(a.len(), 20);
        assert!(a.iter().flatten().all(|r| r <= &rat(1, 1) && r >= &rat(-1, 1)));
        assert_ne!(a, Sampler::new(7, 20).points(3));
    }
}
