//! Shared fixtures for the benchmarks.

use montail::oracle::corpus::{
    gen_comonotone_pair, gen_discrete, gen_piecewise, RandomCorpusConfig,
};
use montail::{Discrete, Distribution, PiecewiseFunction};

pub fn config(count: usize) -> RandomCorpusConfig {
    RandomCorpusConfig {
        seed: 17,
        count,
        ..RandomCorpusConfig::default()
    }
}

/// Functions paired with discrete laws on their domain.
pub fn instances(count: usize) -> Vec<(PiecewiseFunction, Distribution)> {
    let cfg = config(count);
    gen_piecewise(&cfg)
        .into_iter()
        .zip(gen_discrete(&cfg))
        .collect()
}

pub fn pairs(count: usize) -> Vec<(Discrete, Discrete)> {
    gen_comonotone_pair(&config(count))
        .into_iter()
        .map(|(a, b)| {
            (
                a.as_discrete().unwrap().clone(),
                b.as_discrete().unwrap().clone(),
            )
        })
        .collect()
}
