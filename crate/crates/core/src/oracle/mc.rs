//! Seeded Monte Carlo estimators.
//!
//! Draw `i` comes from a ChaCha8 stream selected by the block index of `i`,
//! so a sample is a pure function of `(seed, i)` and results do not depend
//! on how blocks are spread over threads.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::{Distribution, QuantileSide};

const BLOCK: usize = 1 << 16;
/// Two-sided 99% standard normal quantile.
pub const Z99: f64 = 2.575_829_303_548_901;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub halfwidth: f64,
    pub lower: f64,
    pub upper: f64,
    pub samples: usize,
}

/// Generator for block `block` of the stream with the given seed.
pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// A uniform draw in the open interval (0, 1).
pub fn open_unit(rng: &mut impl RngCore) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// `g(U₁), …, g(Uₙ)` for i.i.d. uniforms.
pub fn sample_transformed<G>(n: usize, seed: u64, g: G) -> Vec<f64>
where
    G: Fn(f64) -> f64 + Sync,
{
    let mut out = vec![0.0; n];
    out.par_chunks_mut(BLOCK)
        .enumerate()
        .for_each(|(b, chunk)| {
            let mut rng = block_rng(seed, b as u64);
            for y in chunk.iter_mut() {
                *y = g(open_unit(&mut rng));
            }
        });
    out
}

/// Draws from `dist` by inversion.
pub fn sample(dist: &Distribution, n: usize, seed: u64) -> Vec<f64> {
    sample_transformed(n, seed, |u| dist.sample_at(u))
}

fn select(ys: &mut [f64], k: usize) -> f64 {
    *ys.select_nth_unstable_by(k, f64::total_cmp).1
}

/// Order-statistic quantile with a distribution-free binomial interval.
///
/// The left quantile uses the `⌈np⌉`-th order statistic and the right one
/// the `(⌊np⌋+1)`-th; the interval endpoints are the order statistics at
/// `np ∓ z√(np(1−p))`, widened outward by one.
pub fn order_statistic_quantile(ys: &mut [f64], p: f64, side: QuantileSide) -> McEstimate {
    let n = ys.len();
    let np = n as f64 * p;
    let k = match side {
        QuantileSide::Right => np.floor() as usize + 1,
        _ => np.ceil() as usize,
    }
    .clamp(1, n);
    let spread = Z99 * (np * (1.0 - p)).sqrt();
    let lo = ((np - spread).floor() as isize).clamp(1, n as isize) as usize;
    let hi = ((np + spread).ceil() as usize + 1).clamp(1, n);
    let lo = lo.min(k);
    let hi = hi.max(k);
    let (_, &mut lower, rest) = ys.select_nth_unstable_by(lo - 1, f64::total_cmp);
    let (estimate, upper) = if k == lo {
        (
            lower,
            if hi == k {
                lower
            } else {
                select(rest, hi - k - 1)
            },
        )
    } else {
        let (_, &mut est, rest) = rest.select_nth_unstable_by(k - lo - 1, f64::total_cmp);
        (
            est,
            if hi == k {
                est
            } else {
                select(rest, hi - k - 1)
            },
        )
    };
    McEstimate {
        estimate,
        halfwidth: (estimate - lower).max(upper - estimate),
        lower,
        upper,
        samples: n,
    }
}

/// Mean of the largest `⌈n(1−p)⌉` draws with a normal-theory 99% half-width.
pub fn tail_mean(ys: &mut [f64], p: f64) -> McEstimate {
    let n = ys.len();
    let m = ((n as f64 * (1.0 - p)).ceil() as usize).clamp(1, n);
    let cut = n - m;
    if cut > 0 {
        ys.select_nth_unstable_by(cut, f64::total_cmp);
    }
    let tail = &ys[cut..];
    let mean = tail.iter().sum::<f64>() / m as f64;
    let var = tail.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (m.max(2) - 1) as f64;
    let halfwidth = Z99 * (var / m as f64).sqrt();
    McEstimate {
        estimate: mean,
        halfwidth,
        lower: mean - halfwidth,
        upper: mean + halfwidth,
        samples: n,
    }
}

/// Monte Carlo quantile of `dist` itself.
pub fn mc_quantile(
    dist: &Distribution,
    p: f64,
    side: QuantileSide,
    n: usize,
    seed: u64,
) -> McEstimate {
    let mut ys = sample(dist, n, seed);
    order_statistic_quantile(&mut ys, p, side)
}

/// Monte Carlo TVaR of `dist`.
pub fn mc_tvar(dist: &Distribution, p: f64, n: usize, seed: u64) -> McEstimate {
    let mut ys = sample(dist, n, seed);
    tail_mean(&mut ys, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_uniform() {
        let a = sample(&Distribution::uniform01(), 200_000, 3);
        let b = sample(&Distribution::uniform01(), 200_000, 3);
        assert_eq!(a, b);
        assert!(a.iter().all(|&u| u > 0.0 && u < 1.0));
        let mean = a.iter().sum::<f64>() / a.len() as f64;
        assert!((mean - 0.5).abs() < 0.005);
        assert_ne!(a, sample(&Distribution::uniform01(), 200_000, 4));
    }

    #[test]
    fn order_statistics_of_a_permutation() {
        let mut ys: Vec<f64> = (1..=100).rev().map(f64::from).collect();
        let e = order_statistic_quantile(&mut ys, 0.5, QuantileSide::Left);
        assert_eq!(e.estimate, 50.0);
        let e = order_statistic_quantile(&mut ys, 0.5, QuantileSide::Right);
        assert_eq!(e.estimate, 51.0);
        assert!(e.lower <= 51.0 && e.upper >= 51.0);
    }

    #[test]
    fn normal_quantile_and_tvar() {
        let d = Distribution::normal(0.0, 1.0).unwrap();
        let q = mc_quantile(&d, 0.95, QuantileSide::Left, 1_000_000, 11);
        assert!((q.estimate - 1.644_853_626_951_472).abs() <= q.halfwidth);
        let t = mc_tvar(&d, 0.95, 1_000_000, 11);
        assert!((t.estimate - 2.062_712_807_475_9).abs() <= t.halfwidth * 1.5);
    }
}
