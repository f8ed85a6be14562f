//! Deterministic task scheduling.
//!
//! Every Monte Carlo task `i` draws from its own ChaCha stream derived from
//! `(seed, i)`, and per-task results are collected in index order before any
//! reduction. With the `parallel` feature the map runs on the rayon pool;
//! without it the same closure runs sequentially and yields identical output.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

/// Root seed of a reproducible computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// Independent stream for task `task`.
    pub fn stream(self, task: u64) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.0);
        rng.set_stream(task);
        rng
    }

    /// Child seed for a sub-computation tagged by `domain` and `index`.
    ///
    /// Used when a task itself spawns tasks (spectrum index, twirl sample index).
    pub fn derive(self, domain: u64, index: u64) -> RngSeed {
        let mut x = splitmix64(self.0 ^ splitmix64(domain.wrapping_add(0x5851_f42d_4c95_7f2d)));
        x = splitmix64(x ^ index);
        RngSeed(x)
    }
}

impl From<u64> for RngSeed {
    fn from(value: u64) -> Self {
        RngSeed(value)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Map `f` over `0..n`, returning results in index order.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

/// Map `f` over `0..n`, returning results in index order.
#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Sequential reference for [`map_indexed`], always single threaded.
pub fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Pairwise (cascade) summation in a fixed order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if xs.len() <= BLOCK {
        return xs.iter().fold(0.0, |acc, &x| acc + x);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Number of worker threads the pool will use.
pub fn worker_count() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let seed = RngSeed(7);
        let a: Vec<u64> = (0..4).map(|_| seed.stream(3).random()).collect();
        let b: Vec<u64> = (0..4).map(|_| seed.stream(3).random()).collect();
        assert_eq!(a, b);
        let x: u64 = seed.stream(3).random();
        let y: u64 = seed.stream(4).random();
        assert_ne!(x, y);
        assert_ne!(seed.derive(1, 2), seed.derive(2, 1));
    }

    #[test]
    fn parallel_map_matches_sequential() {
        let seed = RngSeed(11);
        let f = |i: usize| -> f64 { seed.stream(i as u64).random::<f64>() };
        assert_eq!(map_indexed(257, f), map_indexed_seq(257, f));
    }

    #[test]
    fn pairwise_sum_is_exact_on_integers() {
        let xs: Vec<f64> = (1..=1000).map(|x| x as f64).collect();
        assert_eq!(pairwise_sum(&xs), 500_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }
}
