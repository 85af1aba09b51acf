//! Brute-force references for the rule-based computations: exact
//! pushforward laws, seeded Monte Carlo, simple numerics and reproducible
//! random instances.

pub mod corpus;
pub mod mc;
pub mod numeric;

pub use crate::quantile_transform::{
    mc_pushforward_quantile, oracle_quantile, pushforward, pushforward_discrete,
};
pub use corpus::{
    counterexample, gen_comonotone_pair, gen_discrete, gen_piecewise, pinned_functions,
    RandomCorpusConfig,
};
pub use mc::McEstimate;
pub use numeric::{golden_section_max, midpoint_mean};
