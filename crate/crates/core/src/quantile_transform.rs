//! Quantiles of `f(X)` obtained by transforming quantiles of `X`, within
//! the validity ranges of the monotone and monotone-tail rules, plus the
//! brute-force oracles they are checked against.

use std::cmp::Ordering;

use serde::Serialize;

use crate::distributions::{check_open_level, Discrete, Distribution, QuantileSide};
use crate::error::{Error, Result};
use crate::ext::{ExtReal, Prob};
use crate::oracle::mc::{self, McEstimate};
use crate::tail_functions::form::first_true;
use crate::tail_functions::{
    boundary_probability, check_support, classify_tail, preimage_prob, Direction,
    PiecewiseFunction, TailClass, TailClassification, TailKind, ValueRelation,
};

/// Identity used to produce a transformed quantile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    /// non-decreasing, left-continuous: `f(F⁻¹(p))`
    MonotoneLeft,
    /// non-decreasing, right-continuous: `f(F⁻¹⁺(p))`
    MonotoneRight,
    /// non-increasing, right-continuous: `f(F⁻¹⁺(1−p))` for the left quantile
    MonotoneDecLeft,
    /// non-increasing, left-continuous: `f(F⁻¹(1−p))` for the right quantile
    MonotoneDecRight,
    TailUpperInc,
    TailUpperDec,
    TailLowerInc,
    TailLowerDec,
    OracleFallback,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::MonotoneLeft => "monotone_left",
            Rule::MonotoneRight => "monotone_right",
            Rule::MonotoneDecLeft => "monotone_dec_left",
            Rule::MonotoneDecRight => "monotone_dec_right",
            Rule::TailUpperInc => "tail_upper_inc",
            Rule::TailUpperDec => "tail_upper_dec",
            Rule::TailLowerInc => "tail_lower_inc",
            Rule::TailLowerDec => "tail_lower_dec",
            Rule::OracleFallback => "oracle",
        }
    }

    fn for_tail(kind: TailKind) -> Rule {
        match kind {
            TailKind::NonDecreasingUpper => Rule::TailUpperInc,
            TailKind::NonIncreasingUpper => Rule::TailUpperDec,
            TailKind::NonDecreasingLower => Rule::TailLowerInc,
            _ => Rule::TailLowerDec,
        }
    }
}

impl Serialize for Rule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// Position of the level relative to the validity interval of the rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Validity {
    InRange,
    BoundaryInclusive,
    OutOfRange,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformQuantileResult {
    pub value: ExtReal,
    #[serde(rename = "rule")]
    pub rule_used: Rule,
    pub validity: Validity,
    /// Tail class whose rule was applied, if any.
    pub class: Option<TailKind>,
    /// `π` or `λ` of that class.
    pub boundary_probability: Option<Prob>,
}

/// Argument of `f` in a tail or monotone rule.
#[derive(Clone, Copy)]
enum Arg {
    /// `F⁻¹(p)`
    Left,
    /// `F⁻¹⁺(p)`
    Right,
    /// `F⁻¹(1 − p)`
    LeftComplement,
    /// `F⁻¹⁺(1 − p)`
    RightComplement,
}

/// Validity condition on `p` against a boundary probability.
#[derive(Clone, Copy)]
enum Bound {
    /// `p > π`
    AbovePi,
    /// `p ≥ π`
    AtLeastPi,
    /// `p < 1 − λ`
    BelowCoLambda,
    /// `p ≤ 1 − λ`
    AtMostCoLambda,
}

impl Bound {
    fn check(self, p: f64, prob: &Prob) -> Validity {
        let (ord, inclusive, want) = match self {
            Bound::AbovePi => (prob.cmp_level(p), false, Ordering::Greater),
            Bound::AtLeastPi => (prob.cmp_level(p), true, Ordering::Greater),
            Bound::BelowCoLambda => (prob.complement().cmp_level(p), false, Ordering::Less),
            Bound::AtMostCoLambda => (prob.complement().cmp_level(p), true, Ordering::Less),
        };
        if ord == want {
            Validity::InRange
        } else if ord == Ordering::Equal && inclusive {
            Validity::BoundaryInclusive
        } else {
            Validity::OutOfRange
        }
    }

    fn describe(self, prob: &Prob) -> String {
        match self {
            Bound::AbovePi => format!("({}, 1)", prob.value()),
            Bound::AtLeastPi => format!("[{}, 1)", prob.value()),
            Bound::BelowCoLambda => format!("(0, {})", prob.complement().value()),
            Bound::AtMostCoLambda => format!("(0, {}]", prob.complement().value()),
        }
    }
}

/// Which identity applies to a tail class for the requested side, given
/// the continuity of the function. `None` means the sidedness does not match.
fn tail_rule(kind: TailKind, side: QuantileSide, lc: bool, rc: bool) -> Option<(Arg, Bound)> {
    use QuantileSide::{Left, Right};
    match (kind, side) {
        (TailKind::NonDecreasingUpper, Left) if lc => Some((Arg::Left, Bound::AbovePi)),
        (TailKind::NonDecreasingUpper, Right) if rc => Some((Arg::Right, Bound::AtLeastPi)),
        (TailKind::NonIncreasingUpper, Right) if lc => {
            Some((Arg::LeftComplement, Bound::BelowCoLambda))
        }
        (TailKind::NonIncreasingUpper, Left) if rc => {
            Some((Arg::RightComplement, Bound::AtMostCoLambda))
        }
        (TailKind::NonDecreasingLower, Left) if lc => Some((Arg::Left, Bound::AtMostCoLambda)),
        (TailKind::NonDecreasingLower, Right) if rc => Some((Arg::Right, Bound::BelowCoLambda)),
        (TailKind::NonIncreasingLower, Right) if lc => {
            Some((Arg::LeftComplement, Bound::AtLeastPi))
        }
        (TailKind::NonIncreasingLower, Left) if rc => Some((Arg::RightComplement, Bound::AbovePi)),
        _ => None,
    }
}

fn apply(f: &PiecewiseFunction, dist: &Distribution, p: f64, arg: Arg) -> Result<ExtReal> {
    let x = match arg {
        Arg::Left => dist.quantile(p, QuantileSide::Left)?,
        Arg::Right => dist.quantile(p, QuantileSide::Right)?,
        Arg::LeftComplement | Arg::RightComplement => {
            let side = if matches!(arg, Arg::LeftComplement) {
                QuantileSide::Left
            } else {
                QuantileSide::Right
            };
            match dist.as_discrete() {
                Some(d) => d.quantile_complement(p, side),
                None => dist.quantile(1.0 - p, side)?,
            }
        }
    };
    Ok(ExtReal::Finite(f.eval_ext(x)?))
}

fn plain_side(side: QuantileSide) -> Result<QuantileSide> {
    match side.normalized() {
        QuantileSide::Alpha(a) => Err(Error::Domain(format!(
            "transformed quantiles need the left or right side, got alpha {a}"
        ))),
        s => Ok(s),
    }
}

/// Quantile of `f(X)` at `p ∈ (0, 1)` via a transformed quantile of `X`.
///
/// Monotone functions use the four classical identities at every level.
/// Functions with a monotone tail use the identity of each class they
/// belong to, inside that class's validity interval. Outside every interval
/// the result comes from the brute-force oracle when `fallback` is set and
/// is an [`Error::OutOfValidRange`] otherwise.
pub fn transform_quantile(
    f: &PiecewiseFunction,
    dist: &Distribution,
    p: f64,
    side: QuantileSide,
    fallback: bool,
) -> Result<TransformQuantileResult> {
    let cls = classify_tail(f);
    transform_quantile_with(f, &cls, dist, p, side, fallback)
}

/// As [`transform_quantile`] with a precomputed classification of `f`.
pub fn transform_quantile_with(
    f: &PiecewiseFunction,
    cls: &TailClassification,
    dist: &Distribution,
    p: f64,
    side: QuantileSide,
    fallback: bool,
) -> Result<TransformQuantileResult> {
    check_open_level(p)?;
    let side = plain_side(side)?;
    check_support(f, dist)?;
    let lc = f.is_left_continuous();
    let rc = f.is_right_continuous();

    if let TailKind::Monotone(d) = cls.kind {
        let nd = d == Direction::NonDecreasing || cls.both_directions;
        let (rule, arg) = match (nd, side) {
            (true, QuantileSide::Left) if lc => (Rule::MonotoneLeft, Arg::Left),
            (true, QuantileSide::Right) if rc => (Rule::MonotoneRight, Arg::Right),
            (false, QuantileSide::Left) if rc => (Rule::MonotoneDecLeft, Arg::RightComplement),
            (false, QuantileSide::Right) if lc => (Rule::MonotoneDecRight, Arg::LeftComplement),
            _ => {
                return Err(Error::ContinuityMismatch(format!(
                    "{} function needs {} continuity for the {:?} quantile",
                    if nd {
                        "non-decreasing"
                    } else {
                        "non-increasing"
                    },
                    if (side == QuantileSide::Left) == nd {
                        "left"
                    } else {
                        "right"
                    },
                    side
                )))
            }
        };
        return Ok(TransformQuantileResult {
            value: apply(f, dist, p, arg)?,
            rule_used: rule,
            validity: Validity::InRange,
            class: Some(cls.kind),
            boundary_probability: None,
        });
    }

    let mut matched: Option<(TailClass, Bound, Prob)> = None;
    for class in &cls.alternatives {
        let Some((arg, bound)) = tail_rule(class.kind, side, lc, rc) else {
            continue;
        };
        let prob = boundary_probability(f, class, dist)?;
        let validity = bound.check(p, &prob);
        if validity != Validity::OutOfRange {
            return Ok(TransformQuantileResult {
                value: apply(f, dist, p, arg)?,
                rule_used: Rule::for_tail(class.kind),
                validity,
                class: Some(class.kind),
                boundary_probability: Some(prob),
            });
        }
        if matched.is_none() {
            matched = Some((class.clone(), bound, prob));
        }
    }

    if cls.kind != TailKind::NoMonotoneTail && matched.is_none() {
        return Err(Error::ContinuityMismatch(format!(
            "no {} rule matches the continuity of the function (left-continuous: {lc}, right-continuous: {rc})",
            cls.kind.as_str()
        )));
    }
    if fallback {
        return Ok(TransformQuantileResult {
            value: oracle_quantile(f, dist, p, side)?,
            rule_used: Rule::OracleFallback,
            validity: Validity::OutOfRange,
            class: matched.as_ref().map(|m| m.0.kind),
            boundary_probability: matched.map(|m| m.2),
        });
    }
    match matched {
        Some((_, bound, prob)) => Err(Error::OutOfValidRange {
            p,
            interval: bound.describe(&prob),
        }),
        None => Err(Error::UnsupportedKind(
            "the function has no monotone tail; enable the oracle fallback".into(),
        )),
    }
}

/// The identity of one tail class at `p`, whatever its validity. `None` when
/// the continuity of `f` does not fit the class and side.
pub fn apply_tail_rule(
    f: &PiecewiseFunction,
    class: &TailClass,
    dist: &Distribution,
    p: f64,
    side: QuantileSide,
) -> Result<Option<TransformQuantileResult>> {
    check_open_level(p)?;
    let side = plain_side(side)?;
    check_support(f, dist)?;
    let Some((arg, bound)) = tail_rule(
        class.kind,
        side,
        f.is_left_continuous(),
        f.is_right_continuous(),
    ) else {
        return Ok(None);
    };
    let prob = boundary_probability(f, class, dist)?;
    Ok(Some(TransformQuantileResult {
        value: apply(f, dist, p, arg)?,
        rule_used: Rule::for_tail(class.kind),
        validity: bound.check(p, &prob),
        class: Some(class.kind),
        boundary_probability: Some(prob),
    }))
}

/// Exact law of `f(X)` for a discrete `X`: evaluate at every atom, merge
/// equal values, sort.
pub fn pushforward(f: &PiecewiseFunction, dist: &Distribution) -> Result<Distribution> {
    let d = dist
        .as_discrete()
        .ok_or_else(|| Error::InvalidDistribution("pushforward needs a discrete law".into()))?;
    pushforward_discrete(f, d).map(Distribution::Discrete)
}

pub fn pushforward_discrete(f: &PiecewiseFunction, d: &Discrete) -> Result<Discrete> {
    let atoms = d
        .values()
        .iter()
        .zip(d.exact_probs())
        .map(|(&x, p)| Ok((f.eval_checked(x)?, p.clone())))
        .collect::<Result<Vec<_>>>()?;
    Discrete::from_exact(atoms)
}

/// Brute-force quantile of `f(X)`: exact pushforward for discrete laws,
/// inversion of `y ↦ P[f(X) ≤ y]` for continuous ones.
pub fn oracle_quantile(
    f: &PiecewiseFunction,
    dist: &Distribution,
    p: f64,
    side: QuantileSide,
) -> Result<ExtReal> {
    if dist.is_discrete() {
        return pushforward(f, dist)?.quantile(p, side);
    }
    let side = plain_side(side)?;
    check_support(f, dist)?;
    let below = |y: f64, rel| preimage_prob(f, dist, ExtReal::Finite(y), rel).map(|q| q.value());
    // atoms of f(X) come from constant pieces
    for (i, piece) in f.pieces().iter().enumerate() {
        if piece.direction != Direction::Constant {
            continue;
        }
        let v = piece.form.limit(f.knots()[i]).to_f64();
        let lt = below(v, ValueRelation::Lt)?;
        let le = below(v, ValueRelation::Le)?;
        let hit = match side {
            QuantileSide::Left => lt < p && p <= le,
            _ => lt <= p && p < le,
        };
        if hit {
            return Ok(ExtReal::Finite(v));
        }
    }
    let err = std::cell::Cell::new(None);
    let pred = |y: f64| match below(y, ValueRelation::Le) {
        Ok(g) => match side {
            QuantileSide::Left => g >= p,
            _ => g > p,
        },
        Err(e) => {
            err.set(Some(e));
            true
        }
    };
    let y = first_true(ExtReal::NegInf, ExtReal::PosInf, pred);
    if let Some(e) = err.take() {
        return Err(e);
    }
    Ok(ExtReal::new(y))
}

/// Monte Carlo estimate of the `side` quantile of `f(X)` from `n` draws,
/// with a distribution-free 99% half-width from binomial order statistics.
/// Deterministic in `seed` and independent of the number of threads.
pub fn mc_pushforward_quantile(
    f: &PiecewiseFunction,
    dist: &Distribution,
    p: f64,
    side: QuantileSide,
    n: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_open_level(p)?;
    let side = plain_side(side)?;
    if n < 10_000 {
        return Err(Error::Domain(format!(
            "need at least 10^4 samples, got {n}"
        )));
    }
    check_support(f, dist)?;
    let mut ys = mc::sample_transformed(n, seed, |u| f.eval(dist.sample_at(u)).unwrap_or(f64::NAN));
    if ys.iter().any(|y| y.is_nan()) {
        return Err(Error::Domain(
            "a sampled point fell outside the domain".into(),
        ));
    }
    Ok(mc::order_statistic_quantile(&mut ys, p, side))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tail_functions::{Form, KnotRule};

    fn counterexample() -> PiecewiseFunction {
        PiecewiseFunction::builder(ExtReal::Finite(0.0), true)
            .piece(Form::identity(), ExtReal::Finite(1.0))
            .piece(Form::affine(-1.0, 2.0), ExtReal::Finite(2.0))
            .piece(Form::affine(2.0, -4.0), ExtReal::Finite(3.0))
            .build(true)
            .unwrap()
    }

    fn straddle(k: f64) -> PiecewiseFunction {
        PiecewiseFunction::builder(ExtReal::Finite(0.0), true)
            .piece(Form::affine(-1.0, k), ExtReal::Finite(k))
            .piece(Form::affine(1.0, -k), ExtReal::PosInf)
            .build(false)
            .unwrap()
    }

    fn four() -> Distribution {
        Distribution::uniform_atoms(&[0.0, 1.0, 2.0, 3.0]).unwrap()
    }

    #[test]
    fn counterexample_boundary() {
        let f = counterexample();
        let x = four();
        let r = transform_quantile(&f, &x, 0.75, QuantileSide::Left, true).unwrap();
        assert_eq!(r.rule_used, Rule::OracleFallback);
        assert_eq!(r.value, ExtReal::Finite(1.0));
        assert_eq!(f.eval(2.0), Some(0.0));
        let e = transform_quantile(&f, &x, 0.75, QuantileSide::Left, false);
        assert!(matches!(e, Err(Error::OutOfValidRange { .. })));
        let r = transform_quantile(&f, &x, 0.8, QuantileSide::Left, false).unwrap();
        assert_eq!(
            (r.value, r.rule_used, r.validity),
            (ExtReal::Finite(2.0), Rule::TailUpperInc, Validity::InRange)
        );
    }

    #[test]
    fn right_rule_includes_boundary() {
        // right-continuous variant: x on [0,1), 2 − x on [1,2), 2(x − 2) on [2,3]
        let f = PiecewiseFunction::builder(ExtReal::Finite(0.0), true)
            .piece(Form::identity(), ExtReal::Finite(1.0))
            .at_knot(KnotRule::FromRight)
            .piece(Form::affine(-1.0, 2.0), ExtReal::Finite(2.0))
            .at_knot(KnotRule::FromRight)
            .piece(Form::affine(2.0, -4.0), ExtReal::Finite(3.0))
            .build(true)
            .unwrap();
        let x = four();
        let r = transform_quantile(&f, &x, 0.75, QuantileSide::Right, false).unwrap();
        assert_eq!(r.validity, Validity::BoundaryInclusive);
        assert_eq!(
            r.value,
            oracle_quantile(&f, &x, 0.75, QuantileSide::Right).unwrap()
        );
    }

    #[test]
    fn pushforward_of_counterexample() {
        let d = pushforward(&counterexample(), &four()).unwrap();
        let d = d.as_discrete().unwrap();
        assert_eq!(d.values(), &[0.0, 1.0, 2.0]);
        assert_eq!(d.probs(), &[0.5, 0.25, 0.25]);
    }

    #[test]
    fn straddle_on_continuous_uniform() {
        let x = Distribution::uniform(0.0, 40.0).unwrap();
        let r = transform_quantile(&straddle(10.0), &x, 0.9, QuantileSide::Left, false).unwrap();
        assert_eq!(r.value, ExtReal::Finite(26.0));
        assert_eq!(r.validity, Validity::InRange);
        let o = oracle_quantile(&straddle(10.0), &x, 0.9, QuantileSide::Left).unwrap();
        assert!((o.to_f64() - 26.0).abs() < 1e-12);
        // below π the oracle takes over: |X − 10| on [0,40] has cdf y/20 for y ≤ 10
        let r = transform_quantile(&straddle(10.0), &x, 0.3, QuantileSide::Left, true).unwrap();
        assert_eq!(r.rule_used, Rule::OracleFallback);
        assert!((r.value.to_f64() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn monotone_rules() {
        let x = four();
        let f = PiecewiseFunction::identity(ExtReal::Finite(-1.0), ExtReal::Finite(5.0)).unwrap();
        let g = f.reflect(crate::tail_functions::Reflection::NegateValue);
        for &p in &[0.1, 0.25, 0.5, 0.6, 0.99] {
            for side in [QuantileSide::Left, QuantileSide::Right] {
                let r = transform_quantile(&f, &x, p, side, false).unwrap();
                assert_eq!(r.value, oracle_quantile(&f, &x, p, side).unwrap());
                let r = transform_quantile(&g, &x, p, side, false).unwrap();
                assert_eq!(r.value, oracle_quantile(&g, &x, p, side).unwrap());
            }
        }
    }

    #[test]
    fn continuity_mismatch_is_an_error() {
        let f = PiecewiseFunction::builder(ExtReal::Finite(0.0), true)
            .piece(Form::identity(), ExtReal::Finite(1.0))
            .at_knot(KnotRule::Value(1.5))
            .piece(Form::affine(1.0, 1.0), ExtReal::Finite(3.0))
            .build(true)
            .unwrap();
        let r = transform_quantile(&f, &four(), 0.5, QuantileSide::Left, true);
        assert!(matches!(r, Err(Error::ContinuityMismatch(_))));
    }

    #[test]
    fn monte_carlo_identity() {
        let f = PiecewiseFunction::identity(ExtReal::Finite(0.0), ExtReal::Finite(1.0)).unwrap();
        let est = mc_pushforward_quantile(
            &f,
            &Distribution::uniform01(),
            0.5,
            QuantileSide::Left,
            200_000,
            7,
        )
        .unwrap();
        assert!((est.estimate - 0.5).abs() <= est.halfwidth);
        assert!(est.halfwidth < 0.005);
        let again = mc_pushforward_quantile(
            &f,
            &Distribution::uniform01(),
            0.5,
            QuantileSide::Left,
            200_000,
            7,
        )
        .unwrap();
        assert_eq!(est, again);
    }
}
