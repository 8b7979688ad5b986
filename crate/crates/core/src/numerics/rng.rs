//! Seeded, splittable random streams.
//!
//! Every stream is a ChaCha8 keystream keyed by the run seed; substreams pick
//! a distinct 64-bit ChaCha stream id derived from a `(major, minor)` pair,
//! e.g. `(trial, step)`. Identical seeds give bit-identical draws regardless
//! of how work is scheduled across threads.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct SimRng {
    inner: ChaCha8Rng,
}

impl SimRng {
    /// Root stream for `seed`.
    pub fn new(seed: u64) -> Self {
        Self::substream(seed, u64::MAX, u64::MAX)
    }

    /// Independent stream `(major, minor)` under `seed`.
    pub fn substream(seed: u64, major: u64, minor: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(splitmix64(major ^ splitmix64(minor)));
        Self { inner }
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }
}

impl RngCore for SimRng {
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

/// Gaussian draw with the given mean and variance; zero variance returns `mean` exactly.
pub fn sample_gaussian(rng: &mut SimRng, mean: f64, variance: f64) -> f64 {
    debug_assert!(variance >= 0.0);
    if variance <= 0.0 {
        return mean;
    }
    mean + variance.sqrt() * rng.standard_normal()
}

/// Noncentral chi-square draw with `dof` degrees of freedom and noncentrality
/// `lambda`: one shifted squared normal plus a central chi-square with `dof - 1`
/// degrees of freedom.
pub fn sample_chi2(rng: &mut SimRng, dof: u32, lambda: f64) -> f64 {
    debug_assert!(dof >= 1 && lambda >= 0.0);
    let z = rng.standard_normal();
    let rest = sample_central_chi2(rng, dof - 1);
    let shifted = z + lambda.max(0.0).sqrt();
    shifted * shifted + rest
}

/// Central chi-square draw; `dof = 0` gives 0.
pub fn sample_central_chi2(rng: &mut SimRng, dof: u32) -> f64 {
    if dof == 0 {
        return 0.0;
    }
    ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_variance_returns_mean() {
        let mut rng = SimRng::new(1);
        assert_eq!(sample_gaussian(&mut rng, 3.25, 0.0), 3.25);
    }

    #[test]
    fn identical_seeds_identical_streams() {
        let mut a = SimRng::substream(42, 3, 7);
        let mut b = SimRng::substream(42, 3, 7);
        for _ in 0..1000 {
            assert_eq!(
                sample_chi2(&mut a, 5, 2.0).to_bits(),
                sample_chi2(&mut b, 5, 2.0).to_bits()
            );
        }
        let mut c = SimRng::substream(42, 3, 8);
        let mut d = SimRng::substream(42, 4, 7);
        let x = SimRng::substream(42, 3, 7).next_u64();
        assert_ne!(x, c.next_u64());
        assert_ne!(x, d.next_u64());
    }

    fn mean_and_var(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
        (m, v)
    }

    #[test]
    fn gaussian_moments() {
        let mut rng = SimRng::new(9);
        let xs: Vec<f64> = (0..200_000)
            .map(|_| sample_gaussian(&mut rng, -2.0, 4.0))
            .collect();
        let (m, v) = mean_and_var(&xs);
        let se = (4.0 / xs.len() as f64).sqrt();
        assert!((m + 2.0).abs() < 3.0 * se);
        assert!((v - 4.0).abs() < 0.05);
    }

    #[test]
    fn chi2_moments() {
        let n = 1_000_000;
        let mut rng = SimRng::new(11);
        let central: Vec<f64> = (0..n).map(|_| sample_chi2(&mut rng, 10, 0.0)).collect();
        let (m, _) = mean_and_var(&central);
        // var of chi2(10) is 20
        assert!((m - 10.0).abs() < 3.0 * (20.0 / n as f64).sqrt());

        let nc: Vec<f64> = (0..n).map(|_| sample_chi2(&mut rng, 10, 7.0)).collect();
        let (m, _) = mean_and_var(&nc);
        // var = 2(k + 2 lambda) = 48
        assert!((m - 17.0).abs() < 3.0 * (48.0 / n as f64).sqrt());
    }
}
