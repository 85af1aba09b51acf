//! Option strategy and endowment assurance payoffs as piecewise functions
//! on the non-negative half-line.

use serde::{Deserialize, Serialize};

use crate::distributions::{Distribution, QuantileSide};
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::quantile_transform::{transform_quantile_with, TransformQuantileResult};
use crate::tail_functions::{
    classify_tail, Form, KnotRule, PiecewiseFunction, Reflection, TailClassification,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PayoffSpec {
    /// Long call and long put at strike `K`.
    Straddle {
        #[serde(rename = "K")]
        k: f64,
    },
    /// Long put at `K_put` and long call at `K_call > K_put`.
    Strangle {
        #[serde(rename = "K_put")]
        k_put: f64,
        #[serde(rename = "K_call")]
        k_call: f64,
    },
    /// One short call at `K1` and two long calls at `K2 > K1`.
    BackSpreadCalls {
        #[serde(rename = "K1")]
        k1: f64,
        #[serde(rename = "K2")]
        k2: f64,
    },
    /// Two long puts at `K1` and one short put at `K2 > K1`.
    BackSpreadPuts {
        #[serde(rename = "K1")]
        k1: f64,
        #[serde(rename = "K2")]
        k2: f64,
    },
    ShortStraddle {
        #[serde(rename = "K")]
        k: f64,
    },
    ShortStrangle {
        #[serde(rename = "K_put")]
        k_put: f64,
        #[serde(rename = "K_call")]
        k_call: f64,
    },
    /// Present value of `S1` paid at death before `n`, or `S2` at `n`,
    /// discounted at `v` per year.
    Endowment {
        #[serde(rename = "S1")]
        s1: f64,
        #[serde(rename = "S2")]
        s2: f64,
        n: f64,
        v: f64,
    },
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!(
            "{name} must be positive and finite, got {x}"
        )))
    }
}

fn ordered(lo_name: &str, lo: f64, hi_name: &str, hi: f64) -> Result<()> {
    positive(lo_name, lo)?;
    positive(hi_name, hi)?;
    if lo < hi {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!(
            "need {lo_name} < {hi_name}, got {lo} and {hi}"
        )))
    }
}

fn half_line() -> ExtReal {
    ExtReal::Finite(0.0)
}

fn straddle(k: f64) -> Result<PiecewiseFunction> {
    positive("K", k)?;
    PiecewiseFunction::builder(half_line(), true)
        .piece(Form::affine(-1.0, k), ExtReal::Finite(k))
        .piece(Form::affine(1.0, -k), ExtReal::PosInf)
        .build(false)
}

fn strangle(k_put: f64, k_call: f64) -> Result<PiecewiseFunction> {
    ordered("K_put", k_put, "K_call", k_call)?;
    PiecewiseFunction::builder(half_line(), true)
        .piece(Form::affine(-1.0, k_put), ExtReal::Finite(k_put))
        .piece(Form::constant(0.0), ExtReal::Finite(k_call))
        .piece(Form::affine(1.0, -k_call), ExtReal::PosInf)
        .build(false)
}

fn back_spread_calls(k1: f64, k2: f64) -> Result<PiecewiseFunction> {
    ordered("K1", k1, "K2", k2)?;
    PiecewiseFunction::builder(half_line(), true)
        .piece(Form::constant(0.0), ExtReal::Finite(k1))
        .piece(Form::affine(-1.0, k1), ExtReal::Finite(k2))
        .piece(Form::affine(1.0, k1 - 2.0 * k2), ExtReal::PosInf)
        .build(false)
}

fn back_spread_puts(k1: f64, k2: f64) -> Result<PiecewiseFunction> {
    ordered("K1", k1, "K2", k2)?;
    PiecewiseFunction::builder(half_line(), true)
        .piece(Form::affine(-1.0, 2.0 * k1 - k2), ExtReal::Finite(k1))
        .piece(Form::affine(1.0, -k2), ExtReal::Finite(k2))
        .piece(Form::constant(0.0), ExtReal::PosInf)
        .build(false)
}

fn endowment(s1: f64, s2: f64, n: f64, v: f64) -> Result<PiecewiseFunction> {
    positive("S1", s1)?;
    positive("S2", s2)?;
    positive("n", n)?;
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::InvalidSpec(format!("v must lie in (0, 1), got {v}")));
    }
    PiecewiseFunction::builder(half_line(), true)
        .piece(Form::exp_affine(s1, v.ln(), 0.0), ExtReal::Finite(n))
        .at_knot(KnotRule::FromRight)
        .piece(Form::constant(s2 * v.powf(n)), ExtReal::PosInf)
        .build(false)
}

impl PayoffSpec {
    pub fn validate(&self) -> Result<()> {
        self.function().map(|_| ())
    }

    /// The payoff as a function of the underlying (stock price or lifetime).
    pub fn function(&self) -> Result<PiecewiseFunction> {
        match *self {
            PayoffSpec::Straddle { k } => straddle(k),
            PayoffSpec::Strangle { k_put, k_call } => strangle(k_put, k_call),
            PayoffSpec::BackSpreadCalls { k1, k2 } => back_spread_calls(k1, k2),
            PayoffSpec::BackSpreadPuts { k1, k2 } => back_spread_puts(k1, k2),
            PayoffSpec::ShortStraddle { k } => Ok(straddle(k)?.reflect(Reflection::NegateValue)),
            PayoffSpec::ShortStrangle { k_put, k_call } => {
                Ok(strangle(k_put, k_call)?.reflect(Reflection::NegateValue))
            }
            PayoffSpec::Endowment { s1, s2, n, v } => endowment(s1, s2, n, v),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PayoffSpec::Straddle { .. } => "straddle",
            PayoffSpec::Strangle { .. } => "strangle",
            PayoffSpec::BackSpreadCalls { .. } => "back_spread_calls",
            PayoffSpec::BackSpreadPuts { .. } => "back_spread_puts",
            PayoffSpec::ShortStraddle { .. } => "short_straddle",
            PayoffSpec::ShortStrangle { .. } => "short_strangle",
            PayoffSpec::Endowment { .. } => "endowment",
        }
    }
}

/// The payoff function together with its tail classification.
pub fn build_payoff(spec: &PayoffSpec) -> Result<(PiecewiseFunction, TailClassification)> {
    let f = spec.function()?;
    let cls = classify_tail(&f);
    Ok((f, cls))
}

/// Quantile of the payoff of `spec` at `p` for the underlying law `dist`.
pub fn payoff_quantile(
    spec: &PayoffSpec,
    dist: &Distribution,
    p: f64,
    side: QuantileSide,
    fallback: bool,
) -> Result<TransformQuantileResult> {
    let (f, cls) = build_payoff(spec)?;
    transform_quantile_with(&f, &cls, dist, p, side, fallback)
}

/// Threshold of the endowment payoff when the survival benefit, discounted
/// to time zero, is below the death benefit: the age at which the
/// discounted death benefit falls to `S2·vⁿ`.
pub fn endowment_crossing(s1: f64, s2: f64, n: f64, v: f64) -> f64 {
    ((s2 * v.powf(n)).ln() - s1.ln()) / v.ln()
}
