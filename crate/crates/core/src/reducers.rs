//! Hedging a liability `R₁` with a comonotonic cash flow `R₂`: the residual
//! `Z = R₁ − R₂`, reducer verdicts and sufficient price bounds.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::distributions::{Discrete, Distribution, QuantileSide};
use crate::error::{Error, Result};
use crate::ext::{rational, ExtReal};
use crate::parametric_levy::{classify_levy_case, LevyCaseAnalysis};
use crate::quadrant_dependence::QuantileDifferenceSupport;
use crate::quantile_transform::{oracle_quantile, transform_quantile_with, Rule};
use crate::tail_functions::form::{first_true, last_true};
use crate::tail_functions::{
    boundary_probability, classify_tail, Direction, Form, PiecewiseFunction, TailClassification,
    TailKind,
};

/// Points of the level grid used to check the VaR-to-TVaR implication.
pub const IMPLICATION_GRID: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RiskMeasure {
    #[serde(rename = "var")]
    VaR,
    #[serde(rename = "tvar")]
    TVaR,
}

impl RiskMeasure {
    pub fn as_str(self) -> &'static str {
        match self {
            RiskMeasure::VaR => "var",
            RiskMeasure::TVaR => "tvar",
        }
    }
}

/// Which sufficient price condition applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    /// `ϱ[R₂] ≤ VaR_p[R₂]`
    Cond1,
    /// `ϱ[R₂] ≤ VaR_p[R₁] − VaR_{1−p}[R₁] + VaR_{1−p}[R₂]`
    Cond2,
}

/// An interval of levels in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl LevelInterval {
    pub fn new(lo: f64, lo_closed: bool, hi: f64, hi_closed: bool) -> Self {
        LevelInterval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        }
    }

    pub fn contains(&self, p: f64) -> bool {
        let above = if self.lo_closed {
            p >= self.lo
        } else {
            p > self.lo
        };
        let below = if self.hi_closed {
            p <= self.hi
        } else {
            p < self.hi
        };
        above && below
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }
}

impl fmt::Display for LevelInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducerQuery {
    /// `R₁`
    pub liability: Distribution,
    /// `R₂`
    pub hedger: Distribution,
    /// `ϱ[R₂]`
    pub price: f64,
    pub p: f64,
}

impl ReducerQuery {
    pub fn new(liability: Distribution, hedger: Distribution, price: f64, p: f64) -> Result<Self> {
        let q = ReducerQuery {
            liability,
            hedger,
            price,
            p,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::Domain(format!("level {} is not in (0, 1)", self.p)));
        }
        if !self.price.is_finite() {
            return Err(Error::Domain(format!("price {} is not finite", self.price)));
        }
        Ok(())
    }

    fn at_level(&self, p: f64) -> ReducerQuery {
        ReducerQuery { p, ..self.clone() }
    }
}

/// `h(u) = F₁⁻¹(u) − F₂⁻¹(u)` with `Z = h(U)` in law.
#[derive(Debug, Clone)]
pub struct ComonotonicDifference {
    pub function: PiecewiseFunction,
    pub classification: TailClassification,
    /// Case analysis for two exponential location-scale laws.
    pub levy: Option<LevyCaseAnalysis>,
    /// Exact law of `Z` for two discrete laws.
    pub law: Option<Discrete>,
}

/// The quantile difference of two laws as a piecewise function on `(0, 1)`.
pub fn comonotonic_difference(
    d1: &Distribution,
    d2: &Distribution,
) -> Result<ComonotonicDifference> {
    let (function, levy, law) = match (d1, d2) {
        (Distribution::Discrete(a), Distribution::Discrete(b)) => {
            let s = QuantileDifferenceSupport::new(a, b, 0.0)?;
            let law = s.difference_law()?;
            (s.h, None, Some(law))
        }
        (
            Distribution::ExpLocationScale { mu: m1, sigma: s1, w: w1 },
            Distribution::ExpLocationScale { mu: m2, sigma: s2, w: w2 },
        ) if w1.name() == w2.name() => {
            if m1 == m2 && s1 == s2 {
                let zero = PiecewiseFunction::builder(ExtReal::ZERO, false)
                    .piece(Form::constant(0.0), ExtReal::Finite(1.0))
                    .build(false)?;
                (zero, None, None)
            } else {
                let a = classify_levy_case(*m1, *s1, *m2, *s2, w1.clone())?;
                (a.quantile_difference_function()?, Some(a), None)
            }
        }
        _ => {
            return Err(Error::MixedKinds(format!(
                "no quantile difference for {} and {}; need two discrete laws or two exponential location-scale laws with one standardizer",
                kind_name(d1),
                kind_name(d2)
            )))
        }
    };
    let classification = classify_tail(&function);
    Ok(ComonotonicDifference {
        function,
        classification,
        levy,
        law,
    })
}

fn kind_name(d: &Distribution) -> String {
    match d {
        Distribution::Discrete(_) => "discrete".into(),
        Distribution::Uniform { .. } => "uniform".into(),
        Distribution::LocationScale { w, .. } => format!("location-scale ({})", w.name()),
        Distribution::ExpLocationScale { w, .. } => {
            format!("exponential location-scale ({})", w.name())
        }
    }
}

/// A sufficient price condition with the levels where it applies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApplicableBound {
    pub kind: BoundKind,
    pub interval: LevelInterval,
    /// The class of `h` the condition comes from.
    pub class: TailKind,
}

/// Price conditions offered by the shape of `h`, in the order of the
/// classification. Non-increasing shapes need continuous marginals. For
/// TVaR a condition is kept only where it holds at every level above `p`.
pub fn applicable_bounds(
    diff: &ComonotonicDifference,
    q: &ReducerQuery,
    measure: RiskMeasure,
) -> Result<Vec<ApplicableBound>> {
    let continuous = q.liability.is_continuous() && q.hedger.is_continuous();
    let cls = &diff.classification;
    let all = LevelInterval::new(0.0, false, 1.0, false);
    let mut out = Vec::new();
    if let TailKind::Monotone(d) = cls.kind {
        if d == Direction::NonDecreasing || cls.both_directions {
            out.push(ApplicableBound {
                kind: BoundKind::Cond1,
                interval: all,
                class: cls.kind,
            });
        }
        if (d == Direction::NonIncreasing || cls.both_directions) && continuous {
            out.push(ApplicableBound {
                kind: BoundKind::Cond2,
                interval: all,
                class: cls.kind,
            });
        }
        return Ok(out);
    }
    let u = Distribution::uniform01();
    for class in &cls.alternatives {
        let prob = boundary_probability(&diff.function, class, &u)?.value();
        let (kind, interval) = match class.kind {
            TailKind::NonDecreasingUpper => (
                BoundKind::Cond1,
                LevelInterval::new(prob, false, 1.0, false),
            ),
            TailKind::NonDecreasingLower => (
                BoundKind::Cond1,
                LevelInterval::new(0.0, false, 1.0 - prob, true),
            ),
            TailKind::NonIncreasingUpper => (
                BoundKind::Cond2,
                LevelInterval::new(0.0, false, 1.0 - prob, false),
            ),
            TailKind::NonIncreasingLower => {
                (BoundKind::Cond2, LevelInterval::new(prob, true, 1.0, false))
            }
            _ => continue,
        };
        if kind == BoundKind::Cond2 && !continuous {
            continue;
        }
        let interval = match measure {
            RiskMeasure::VaR => interval,
            // every level up to 1 must be covered
            RiskMeasure::TVaR if interval.hi >= 1.0 => LevelInterval {
                hi_closed: false,
                ..interval
            },
            RiskMeasure::TVaR => continue,
        };
        if !interval.is_empty() {
            out.push(ApplicableBound {
                kind,
                interval,
                class: class.kind,
            });
        }
    }
    Ok(out)
}

/// Result of checking `VaR`-reducers on a level grid above `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TvarImplication {
    pub grid_points: usize,
    /// Whether the VaR verdict passes at every grid level `q ≥ p`.
    pub var_reducer_on_grid: bool,
    /// `var_reducer_on_grid ⟹ is_reducer`.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducerVerdict {
    pub measure: RiskMeasure,
    pub p: f64,
    pub price: f64,
    pub is_reducer: bool,
    /// `φ[R₁]`
    pub capital_unhedged: f64,
    /// `φ[Z] + ϱ[R₂]`
    pub capital_hedged: f64,
    /// `φ[Z]`
    pub risk_of_difference: f64,
    /// How `VaR_p[Z]` was obtained.
    #[serde(serialize_with = "rule_name")]
    pub difference_rule: Option<Rule>,
    pub sufficient_bound: Option<f64>,
    pub bound_kind: Option<BoundKind>,
    pub valid_p_interval: Option<LevelInterval>,
    /// Whether `price ≤ bound` and `is_reducer` are consistent; set when a
    /// bound applies.
    pub bound_implies_reducer: Option<bool>,
    pub tail_kind: TailKind,
    pub threshold: ExtReal,
    pub implication: Option<TvarImplication>,
    pub note: Option<String>,
}

fn rule_name<S: serde::Serializer>(r: &Option<Rule>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(r.as_str()),
        None => s.serialize_none(),
    }
}

/// `price + risk ≤ capital`, compared exactly.
fn reduces(price: f64, risk: f64, capital: f64) -> bool {
    rational(price) + rational(risk) <= rational(capital)
}

fn bound_value(q: &ReducerQuery, kind: BoundKind, measure: RiskMeasure) -> Result<f64> {
    let (r1, r2, p) = (&q.liability, &q.hedger, q.p);
    Ok(match (kind, measure) {
        (BoundKind::Cond1, RiskMeasure::VaR) => r2.var(p)?,
        (BoundKind::Cond1, RiskMeasure::TVaR) => r2.tvar(p)?,
        (BoundKind::Cond2, RiskMeasure::VaR) => r1.var(p)? - r1.var(1.0 - p)? + r2.var(1.0 - p)?,
        (BoundKind::Cond2, RiskMeasure::TVaR) => {
            r1.tvar(p)? - r1.ltvar(1.0 - p)? + r2.ltvar(1.0 - p)?
        }
    })
}

/// `VaR_p[Z]` through the transform rules with `U` uniform on `(0, 1)`,
/// falling back to the oracle outside every validity interval.
pub fn difference_var(diff: &ComonotonicDifference, p: f64) -> Result<(f64, Rule)> {
    let u = Distribution::uniform01();
    let (value, rule) = match transform_quantile_with(
        &diff.function,
        &diff.classification,
        &u,
        p,
        QuantileSide::Left,
        true,
    ) {
        Ok(r) => (r.value, r.rule_used),
        // no identity matches the continuity of h
        Err(Error::ContinuityMismatch(_)) => (
            oracle_quantile(&diff.function, &u, p, QuantileSide::Left)?,
            Rule::OracleFallback,
        ),
        Err(e) => return Err(e),
    };
    let v = value
        .finite()
        .ok_or_else(|| Error::Domain(format!("VaR of the difference at level {p} is infinite")))?;
    Ok((v, rule))
}

/// `TVaR_p[Z] = v + E[(Z − v)⁺]/(1 − p)` with `v = VaR_p[Z]`. The excess is
/// integrated over the levels where `h > v`, as differences of quantile
/// integrals of the marginals.
pub fn difference_tvar(diff: &ComonotonicDifference, q: &ReducerQuery) -> Result<f64> {
    let p = q.p;
    if let Some(law) = &diff.law {
        return Distribution::Discrete(law.clone()).tvar(p);
    }
    let (v, _) = difference_var(diff, p)?;
    let mut excess = 0.0;
    for (a, b) in superlevel_intervals(&diff.function, v) {
        let i1 = q.liability.quantile_integral(a, b)?.value;
        let i2 = q.hedger.quantile_integral(a, b)?.value;
        excess += i1 - i2 - v * (b - a);
    }
    Ok(v + excess.max(0.0) / (1.0 - p))
}

/// Intervals of `(0, 1)` where `h > v`, one per piece at most.
fn superlevel_intervals(h: &PiecewiseFunction, v: f64) -> Vec<(f64, f64)> {
    let knots = h.knots();
    let mut out = Vec::new();
    for (i, piece) in h.pieces().iter().enumerate() {
        let (lo, hi) = (knots[i], knots[i + 1]);
        let (a, b) = (piece.form.limit(lo), piece.form.limit(hi));
        let (lo_f, hi_f) = (lo.to_f64(), hi.to_f64());
        let vv = ExtReal::Finite(v);
        let above = |x: f64| piece.form.eval(x) > v;
        match piece.direction {
            Direction::Constant if a > vv => out.push((lo_f, hi_f)),
            Direction::Constant => {}
            Direction::NonDecreasing if b <= vv => {}
            Direction::NonDecreasing if a > vv => out.push((lo_f, hi_f)),
            Direction::NonDecreasing => out.push((first_true(lo, hi, above), hi_f)),
            Direction::NonIncreasing if a <= vv => {}
            Direction::NonIncreasing if b > vv => out.push((lo_f, hi_f)),
            Direction::NonIncreasing => out.push((lo_f, last_true(lo, hi, above))),
        }
    }
    out
}

fn verdict(
    diff: &ComonotonicDifference,
    q: &ReducerQuery,
    measure: RiskMeasure,
    capital: f64,
    risk: f64,
    rule: Option<Rule>,
) -> Result<ReducerVerdict> {
    let is_reducer = reduces(q.price, risk, capital);
    let offered = applicable_bounds(diff, q, measure)?;
    let chosen = offered.iter().find(|b| b.interval.contains(q.p));
    let (sufficient_bound, bound_kind, interval) = match chosen {
        Some(b) => (
            Some(bound_value(q, b.kind, measure)?),
            Some(b.kind),
            Some(b.interval),
        ),
        None => (None, None, offered.first().map(|b| b.interval)),
    };
    let cls = &diff.classification;
    Ok(ReducerVerdict {
        measure,
        p: q.p,
        price: q.price,
        is_reducer,
        capital_unhedged: capital,
        capital_hedged: risk + q.price,
        risk_of_difference: risk,
        difference_rule: rule,
        sufficient_bound,
        bound_kind,
        valid_p_interval: interval,
        bound_implies_reducer: sufficient_bound.map(|b| !(q.price <= b) || is_reducer),
        tail_kind: chosen.map(|b| b.class).unwrap_or(cls.kind),
        threshold: cls.threshold,
        implication: None,
        note: None,
    })
}

/// `VaR` verdict for a precomputed difference.
pub fn var_reducer_verdict_with(
    diff: &ComonotonicDifference,
    q: &ReducerQuery,
) -> Result<ReducerVerdict> {
    q.validate()?;
    let capital = q.liability.var(q.p)?;
    let (risk, rule) = difference_var(diff, q.p)?;
    verdict(diff, q, RiskMeasure::VaR, capital, risk, Some(rule))
}

/// Whether `R₂` at price `ϱ[R₂]` is a VaR-reducer at level `p` for `R₁`:
/// `ϱ[R₂] ≤ VaR_p[R₁] − VaR_p[Z]`.
pub fn var_reducer_verdict(q: &ReducerQuery) -> Result<ReducerVerdict> {
    let diff = comonotonic_difference(&q.liability, &q.hedger)?;
    var_reducer_verdict_with(&diff, q)
}

/// `TVaR` verdict for a precomputed difference.
pub fn tvar_reducer_verdict_with(
    diff: &ComonotonicDifference,
    q: &ReducerQuery,
) -> Result<ReducerVerdict> {
    q.validate()?;
    let capital = q.liability.tvar(q.p)?;
    let risk = difference_tvar(diff, q)?;
    let mut v = verdict(diff, q, RiskMeasure::TVaR, capital, risk, None)?;
    let mut on_grid = true;
    for j in 0..IMPLICATION_GRID {
        let level = q.p + (1.0 - q.p) * j as f64 / IMPLICATION_GRID as f64;
        if !var_reducer_verdict_with(diff, &q.at_level(level))?.is_reducer {
            on_grid = false;
            break;
        }
    }
    v.implication = Some(TvarImplication {
        grid_points: IMPLICATION_GRID,
        var_reducer_on_grid: on_grid,
        holds: !on_grid || v.is_reducer,
    });
    if diff.law.is_some() {
        v.note = Some("discrete marginals: TVaR is the average of left quantiles above p".into());
    }
    Ok(v)
}

/// Whether `R₂` is a TVaR-reducer at level `p`:
/// `ϱ[R₂] ≤ TVaR_p[R₁] − TVaR_p[Z]`.
pub fn tvar_reducer_verdict(q: &ReducerQuery) -> Result<ReducerVerdict> {
    let diff = comonotonic_difference(&q.liability, &q.hedger)?;
    tvar_reducer_verdict_with(&diff, q)
}

pub fn reducer_verdict(q: &ReducerQuery, measure: RiskMeasure) -> Result<ReducerVerdict> {
    match measure {
        RiskMeasure::VaR => var_reducer_verdict(q),
        RiskMeasure::TVaR => tvar_reducer_verdict(q),
    }
}

/// Whether every step of the difference is zero.
pub fn is_perfect_hedge(diff: &ComonotonicDifference) -> bool {
    match &diff.law {
        Some(l) => l.values().iter().all(|v| v.is_zero()),
        None => diff.levy.is_none(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{StandardNormal, Standardizer};

    fn atoms(v: &[f64]) -> Distribution {
        Distribution::uniform_atoms(v).unwrap()
    }

    #[test]
    fn discrete_difference_steps() {
        let d =
            comonotonic_difference(&atoms(&[1.0, 2.0, 5.0, 9.0]), &atoms(&[1.0, 2.0, 3.0, 4.0]))
                .unwrap();
        let steps: Vec<f64> = d
            .function
            .pieces()
            .iter()
            .map(|p| p.form.eval(0.5))
            .collect();
        assert_eq!(steps, vec![0.0, 0.0, 2.0, 5.0]);
        let same = comonotonic_difference(&atoms(&[1.0, 3.0]), &atoms(&[1.0, 3.0])).unwrap();
        assert!(is_perfect_hedge(&same));
    }

    #[test]
    fn lognormal_difference_shape() {
        let r1 = Distribution::lognormal(0.0, 0.3).unwrap();
        let r2 = Distribution::lognormal(0.0, 0.2).unwrap();
        let d = comonotonic_difference(&r1, &r2).unwrap();
        assert_eq!(d.classification.kind, TailKind::NonDecreasingUpper);
        assert!((d.classification.threshold.to_f64() - 0.5).abs() < 1e-10);
        assert!(matches!(
            comonotonic_difference(&r1, &atoms(&[1.0])),
            Err(Error::MixedKinds(_))
        ));
    }

    #[test]
    fn var_verdicts_for_lognormals() {
        let r1 = Distribution::lognormal(0.0, 0.3).unwrap();
        let r2 = Distribution::lognormal(0.0, 0.2).unwrap();
        let v = var_reducer_verdict(&ReducerQuery::new(r1.clone(), r2.clone(), 1.0, 0.95).unwrap())
            .unwrap();
        let expect = (0.2 * StandardNormal.quantile(0.95)).exp();
        assert!(v.is_reducer);
        assert_eq!(v.bound_kind, Some(BoundKind::Cond1));
        assert!((v.sufficient_bound.unwrap() - expect).abs() < 1e-12);
        assert!((v.sufficient_bound.unwrap() - 1.389_537).abs() < 1e-6);
        assert_eq!(v.difference_rule, Some(Rule::TailUpperInc));
        let v = var_reducer_verdict(&ReducerQuery::new(r1, r2, 1.5, 0.95).unwrap()).unwrap();
        assert!(!v.is_reducer);
        assert_eq!(v.bound_implies_reducer, Some(true));
    }

    #[test]
    fn perfect_hedge_at_zero_price() {
        for p in [0.1, 0.5, 0.9] {
            let r = atoms(&[1.0, 4.0, 7.0]);
            let v = var_reducer_verdict(&ReducerQuery::new(r.clone(), r.clone(), 0.0, p).unwrap())
                .unwrap();
            assert!(v.is_reducer && v.risk_of_difference == 0.0);
            let l = Distribution::lognormal(0.1, 0.4).unwrap();
            let v = var_reducer_verdict(&ReducerQuery::new(l.clone(), l, 0.0, p).unwrap()).unwrap();
            assert!(v.is_reducer && v.risk_of_difference == 0.0);
        }
    }

    #[test]
    fn discrete_tvar_verdict() {
        let q = ReducerQuery::new(
            atoms(&[1.0, 2.0, 5.0, 9.0]),
            atoms(&[1.0, 2.0, 3.0, 4.0]),
            3.0,
            0.5,
        )
        .unwrap();
        let v = tvar_reducer_verdict(&q).unwrap();
        assert_eq!(v.capital_unhedged, 7.0);
        assert_eq!(v.risk_of_difference, 3.5);
        assert!(v.is_reducer);
        assert!(v.implication.unwrap().holds);
        assert!(v.note.is_some());
        let q = ReducerQuery { price: 3.6, ..q };
        assert!(!tvar_reducer_verdict(&q).unwrap().is_reducer);
    }

    #[test]
    fn lognormal_tvar_matches_decomposition() {
        let r1 = Distribution::lognormal(0.0, 0.3).unwrap();
        let r2 = Distribution::lognormal(0.0, 0.2).unwrap();
        let q = ReducerQuery::new(r1.clone(), r2.clone(), 1.0, 0.95).unwrap();
        let v = tvar_reducer_verdict(&q).unwrap();
        let expect = r1.tvar(0.95).unwrap() - r2.tvar(0.95).unwrap();
        assert!((v.risk_of_difference - expect).abs() < 1e-9);
        assert!(v.is_reducer);
        assert_eq!(v.bound_kind, Some(BoundKind::Cond1));
        assert!(v.implication.unwrap().var_reducer_on_grid);
    }

    #[test]
    fn tvar_excess_against_midpoint_average() {
        // increasing then decreasing difference: the top levels of Z sit in the middle of (0, 1)
        let r1 = Distribution::lognormal(0.0, 0.2).unwrap();
        let r2 = Distribution::lognormal(0.0, 0.3).unwrap();
        let q = ReducerQuery::new(r1, r2, 0.0, 0.3).unwrap();
        let d = comonotonic_difference(&q.liability, &q.hedger).unwrap();
        let got = difference_tvar(&d, &q).unwrap();
        let n = 400_000;
        let mut ys: Vec<f64> = (0..n)
            .map(|i| d.function.eval((i as f64 + 0.5) / n as f64).unwrap())
            .collect();
        ys.sort_by(f64::total_cmp);
        let k = (0.3 * n as f64) as usize;
        let expect = ys[k..].iter().sum::<f64>() / (n - k) as f64;
        assert!((got - expect).abs() < 1e-5, "{got} vs {expect}");
    }

    #[test]
    fn cond2_needs_continuity() {
        // h = [3, 1, 0]: non-increasing
        let q =
            ReducerQuery::new(atoms(&[4.0, 5.0, 6.0]), atoms(&[1.0, 4.0, 6.0]), 0.0, 0.5).unwrap();
        let v = var_reducer_verdict(&q).unwrap();
        assert_eq!(v.tail_kind, TailKind::Monotone(Direction::NonIncreasing));
        assert_eq!(v.sufficient_bound, None);
        assert_eq!(v.difference_rule, Some(Rule::OracleFallback));
        assert_eq!(v.risk_of_difference, 1.0);
        let r1 = Distribution::lognormal(0.0, 0.2).unwrap();
        let r2 = Distribution::lognormal(0.0, 0.3).unwrap();
        let v = var_reducer_verdict(&ReducerQuery::new(r1, r2, 0.0, 0.3).unwrap()).unwrap();
        assert_eq!(v.bound_kind, Some(BoundKind::Cond2));
        assert!((v.valid_p_interval.unwrap().hi - 0.5).abs() < 1e-10);
    }
}
