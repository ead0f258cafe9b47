//! Seeded, order-independent Monte Carlo helpers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::simcore::{c64, C64};

/// Independent stream for one trial: the seed picks the key, the trial index the stream.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Runs `f` on every trial in parallel; results come back in trial order.
pub fn run_trials<T: Send>(seed: u64, trials: u64, f: impl Fn(&mut ChaCha20Rng) -> T + Sync) -> Vec<T> {
    (0..trials).into_par_iter().map(|t| f(&mut trial_rng(seed, t))).collect()
}

/// Haar-random unit vector in `C^d`.
pub fn haar_state(d: usize, rng: &mut impl Rng) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..d)
            .map(|_| c64(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)))
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std: f64,
    pub se: f64,
    pub n: usize,
}

/// Mean, sample standard deviation and standard error, summed in order.
pub fn estimate(samples: &[f64]) -> Estimate {
    let n = samples.len();
    if n == 0 {
        return Estimate { mean: f64::NAN, std: f64::NAN, se: f64::NAN, n };
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = if n > 1 { samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
    let std = var.sqrt();
    Estimate { mean, std, se: std / (n as f64).sqrt(), n }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: u64 = trial_rng(7, 3).random();
        let b: u64 = trial_rng(7, 3).random();
        let c: u64 = trial_rng(7, 4).random();
        let d: u64 = trial_rng(8, 3).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn parallel_matches_sequential() {
        let par = run_trials(11, 64, |r| r.random::<u32>());
        let seq: Vec<u32> = (0..64).map(|t| trial_rng(11, t).random()).collect();
        assert_eq!(par, seq);
    }

    #[test]
    fn haar_is_normalized() {
        let mut r = trial_rng(1, 0);
        for d in [1, 2, 17, 64] {
            let v = haar_state(d, &mut r);
            let n: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn estimate_values() {
        let e = estimate(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.mean, 2.5);
        assert!((e.std - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((e.se - e.std / 2.0).abs() < 1e-15);
    }
}
