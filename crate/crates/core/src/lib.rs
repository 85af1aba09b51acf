//! Quantiles of transformed random variables, monotone tail functions,
//! quadrant dependence and capital reducer verdicts.

pub mod distributions;
pub mod error;
pub mod ext;
pub mod oracle;
pub mod parametric_levy;
pub mod payoffs;
pub mod quadrant_dependence;
pub mod quantile_transform;
pub mod reducers;
pub mod schema;
pub mod tail_functions;

pub use distributions::{Discrete, Distribution, QuantileSide, StandardNormal, Standardizer};
pub use error::{Error, Result};
pub use ext::{ExtReal, Prob};
pub use parametric_levy::{
    case_price_bound, classify_levy_case, z_upper_bound, LevyCase, LevyCaseAnalysis,
};
pub use payoffs::{build_payoff, payoff_quantile, PayoffSpec};
pub use quantile_transform::{transform_quantile, Rule, TransformQuantileResult, Validity};
pub use reducers::{
    comonotonic_difference, tvar_reducer_verdict, var_reducer_verdict, ReducerQuery,
    ReducerVerdict, RiskMeasure,
};
pub use tail_functions::{
    classify_tail, Direction, Form, PiecewiseFunction, TailClassification, TailKind,
};
