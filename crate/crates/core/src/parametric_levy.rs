//! Shape of the quantile difference `h(u) = exp(μ₁ + σ₁W⁻¹(u)) − exp(μ₂ + σ₂W⁻¹(u))`
//! of two exponential location-scale laws driven by the same standardizer.

use std::sync::Arc;

use serde::Serialize;

use crate::distributions::{Distribution, Standardizer};
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::reducers::{BoundKind, RiskMeasure};
use crate::tail_functions::{Direction, Form, PiecewiseFunction, QuantileDifference, TailKind};

const SIGN_GRID: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LevyCase {
    /// `σ₁ = σ₂`, `μ₁ > μ₂`: `h` is non-decreasing.
    EqualSigmaMu1Gt,
    /// `σ₁ = σ₂`, `μ₂ > μ₁`: `h` is non-increasing.
    EqualSigmaMu2Gt,
    /// `σ₁ > σ₂`: decreasing then increasing.
    Sigma1Gt,
    /// `σ₁ < σ₂`: increasing then decreasing.
    Sigma2Gt,
}

impl LevyCase {
    pub fn as_str(self) -> &'static str {
        match self {
            LevyCase::EqualSigmaMu1Gt => "equal_sigma_mu1_gt",
            LevyCase::EqualSigmaMu2Gt => "equal_sigma_mu2_gt",
            LevyCase::Sigma1Gt => "sigma1_gt",
            LevyCase::Sigma2Gt => "sigma2_gt",
        }
    }

    /// Whether the hedger bound is `VaR_p[R₂]` (otherwise it involves both laws).
    pub fn is_first_case(self) -> bool {
        matches!(self, LevyCase::EqualSigmaMu1Gt | LevyCase::Sigma1Gt)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LevyCaseAnalysis {
    pub mu1: f64,
    pub sigma1: f64,
    pub mu2: f64,
    pub sigma2: f64,
    #[serde(serialize_with = "standardizer_name")]
    pub w: Arc<dyn Standardizer>,
    pub case: LevyCase,
    /// Level where `h` changes sign; zero when the scales are equal.
    pub c_star: f64,
    pub u_star: Option<f64>,
    pub y_star: Option<f64>,
    pub y_min: ExtReal,
    pub y_max: ExtReal,
    pub tail_kind: TailKind,
    /// Whether the derivative sign pattern matched on the check grid.
    pub sign_pattern_ok: bool,
}

fn standardizer_name<S: serde::Serializer>(
    w: &Arc<dyn Standardizer>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(w.name())
}

fn check_scale(name: &str, mu: f64, sigma: f64) -> Result<()> {
    if !mu.is_finite() || !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Domain(format!(
            "{name}: need finite mu and positive finite sigma, got ({mu}, {sigma})"
        )));
    }
    Ok(())
}

impl LevyCaseAnalysis {
    pub fn difference(&self) -> QuantileDifference {
        QuantileDifference::new(self.mu1, self.sigma1, self.mu2, self.sigma2, self.w.clone())
    }

    pub fn h(&self, u: f64) -> f64 {
        self.difference().eval(u)
    }

    pub fn liability(&self) -> Distribution {
        Distribution::ExpLocationScale {
            mu: self.mu1,
            sigma: self.sigma1,
            w: self.w.clone(),
        }
    }

    pub fn hedger(&self) -> Distribution {
        Distribution::ExpLocationScale {
            mu: self.mu2,
            sigma: self.sigma2,
            w: self.w.clone(),
        }
    }

    /// Levels `p` for which the price condition of the case applies, as a
    /// closed interval `[lo, hi]`.
    pub fn valid_interval(&self, measure: RiskMeasure) -> (f64, f64) {
        match (self.case.is_first_case(), measure) {
            (true, _) => (self.c_star, 1.0),
            (false, RiskMeasure::VaR) => (0.0, 1.0 - self.c_star),
            // the averaged condition needs every level above p to qualify
            (false, RiskMeasure::TVaR) if self.c_star == 0.0 => (0.0, 1.0),
            (false, RiskMeasure::TVaR) => (1.0, 0.0),
        }
    }

    /// `h` as a piecewise function on `(0, 1)`, split at `u★` when `h` is
    /// not monotone.
    pub fn quantile_difference_function(&self) -> Result<PiecewiseFunction> {
        let form = Form::QuantileDifference(self.difference());
        let (first, second) = match self.case {
            LevyCase::EqualSigmaMu1Gt => (Direction::NonDecreasing, None),
            LevyCase::EqualSigmaMu2Gt => (Direction::NonIncreasing, None),
            LevyCase::Sigma1Gt => (Direction::NonIncreasing, Some(Direction::NonDecreasing)),
            LevyCase::Sigma2Gt => (Direction::NonDecreasing, Some(Direction::NonIncreasing)),
        };
        let b = PiecewiseFunction::builder(ExtReal::ZERO, false);
        let b = match (second, self.u_star) {
            (Some(d), Some(u)) if u > 1e-290 && u < 1.0 => b
                .piece_with(form.clone(), first, ExtReal::Finite(u))
                .piece_with(form, d, ExtReal::Finite(1.0)),
            // u★ outside the representable range: only the tail shape remains
            (Some(d), _) => b.piece_with(form, d, ExtReal::Finite(1.0)),
            (None, _) => b.piece_with(form, first, ExtReal::Finite(1.0)),
        };
        b.build(false)
    }
}

/// Case analysis of the quantile difference.
pub fn classify_levy_case(
    mu1: f64,
    sigma1: f64,
    mu2: f64,
    sigma2: f64,
    w: Arc<dyn Standardizer>,
) -> Result<LevyCaseAnalysis> {
    check_scale("liability", mu1, sigma1)?;
    check_scale("hedger", mu2, sigma2)?;
    if sigma1 == sigma2 && mu1 == mu2 {
        return Err(Error::TrivialCase);
    }
    let mut a = LevyCaseAnalysis {
        mu1,
        sigma1,
        mu2,
        sigma2,
        w: w.clone(),
        case: LevyCase::Sigma1Gt,
        c_star: 0.0,
        u_star: None,
        y_star: None,
        y_min: ExtReal::ZERO,
        y_max: ExtReal::PosInf,
        tail_kind: TailKind::Monotone(Direction::NonDecreasing),
        sign_pattern_ok: false,
    };
    if sigma1 == sigma2 {
        if mu1 > mu2 {
            a.case = LevyCase::EqualSigmaMu1Gt;
        } else {
            a.case = LevyCase::EqualSigmaMu2Gt;
            a.y_min = ExtReal::NegInf;
            a.y_max = ExtReal::ZERO;
            a.tail_kind = TailKind::Monotone(Direction::NonIncreasing);
        }
    } else {
        let z_c = (mu2 - mu1) / (sigma1 - sigma2);
        let z_u = ((sigma1 / sigma2).ln() + mu1 - mu2) / (sigma2 - sigma1);
        a.c_star = w.cdf(z_c);
        a.u_star = Some(w.cdf(z_u));
        let y = a.difference().at_z(z_u);
        a.y_star = Some(y);
        if sigma1 > sigma2 {
            a.case = LevyCase::Sigma1Gt;
            a.y_min = ExtReal::Finite(y);
            a.tail_kind = TailKind::NonDecreasingUpper;
        } else {
            a.case = LevyCase::Sigma2Gt;
            a.y_min = ExtReal::NegInf;
            a.y_max = ExtReal::Finite(y);
            a.tail_kind = TailKind::NonIncreasingUpper;
        }
    }
    a.sign_pattern_ok = sign_pattern_matches(&a);
    Ok(a)
}

/// Sign of `log(σ₁/σ₂) + μ₁ − μ₂ − (σ₂ − σ₁)W⁻¹(u)`, the sign of `h'(u)`,
/// checked against the case on an interior grid.
fn sign_pattern_matches(a: &LevyCaseAnalysis) -> bool {
    let k = (a.sigma1 / a.sigma2).ln() + a.mu1 - a.mu2;
    (1..=SIGN_GRID).all(|i| {
        let u = i as f64 / (SIGN_GRID + 1) as f64;
        let s = k - (a.sigma2 - a.sigma1) * a.w.quantile(u);
        match (a.case, a.u_star) {
            (LevyCase::EqualSigmaMu1Gt, _) => s > 0.0,
            (LevyCase::EqualSigmaMu2Gt, _) => s < 0.0,
            (LevyCase::Sigma1Gt, Some(us)) => {
                (u < us && s <= 0.0) || (u > us && s >= 0.0) || u == us
            }
            (LevyCase::Sigma2Gt, Some(us)) => {
                (u < us && s >= 0.0) || (u > us && s <= 0.0) || u == us
            }
            _ => false,
        }
    })
}

/// Maximum of `Z` when `σ₂ > σ₁`.
pub fn z_upper_bound(mu1: f64, sigma1: f64, mu2: f64, sigma2: f64) -> Result<f64> {
    if !(sigma2 > sigma1) {
        return Err(Error::Domain(format!(
            "the bound needs sigma2 > sigma1, got {sigma1} and {sigma2}"
        )));
    }
    let d = sigma2 - sigma1;
    let lr = (sigma1 / sigma2).ln();
    let base = (mu1 * sigma2 - mu2 * sigma1) / d;
    let e1 = base + sigma1 / d * lr;
    let e2 = base + sigma2 / d * lr;
    Ok(e1.exp() - e2.exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevyPriceBound {
    pub bound: f64,
    pub valid: bool,
    pub kind: BoundKind,
    pub measure: RiskMeasure,
}

/// Sufficient price bound of the case at level `p`, with whether `p` lies
/// in the range where it applies.
pub fn case_price_bound(
    a: &LevyCaseAnalysis,
    p: f64,
    measure: RiskMeasure,
) -> Result<LevyPriceBound> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("level {p} is not in (0, 1)")));
    }
    let (r1, r2) = (a.liability(), a.hedger());
    let (lo, hi) = a.valid_interval(measure);
    let valid = lo <= p && p <= hi;
    let (bound, kind) = match (a.case.is_first_case(), measure) {
        (true, RiskMeasure::VaR) => (r2.var(p)?, BoundKind::Cond1),
        (true, RiskMeasure::TVaR) => (r2.tvar(p)?, BoundKind::Cond1),
        (false, RiskMeasure::VaR) => (
            r2.var(1.0 - p)? + r1.var(p)? - r1.var(1.0 - p)?,
            BoundKind::Cond2,
        ),
        (false, RiskMeasure::TVaR) => (
            r2.ltvar(1.0 - p)? + r1.tvar(p)? - r1.ltvar(1.0 - p)?,
            BoundKind::Cond2,
        ),
    };
    Ok(LevyPriceBound {
        bound,
        valid,
        kind,
        measure,
    })
}

/// `VaR_{c★}[R₂]`, a price bound valid at every level `p ≥ c★`; only for
/// the first case.
pub fn uniform_price_bound(a: &LevyCaseAnalysis) -> Option<f64> {
    match a.case {
        LevyCase::Sigma1Gt => {
            Some(((a.sigma1 * a.mu2 - a.sigma2 * a.mu1) / (a.sigma1 - a.sigma2)).exp())
        }
        LevyCase::EqualSigmaMu1Gt => Some(0.0),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::StandardNormal;
    use crate::oracle::golden_section_max;
    use crate::tail_functions::classify_tail;

    fn normal() -> Arc<dyn Standardizer> {
        Arc::new(StandardNormal)
    }

    #[test]
    fn case_three() {
        let a = classify_levy_case(0.0, 0.3, 0.0, 0.2, normal()).unwrap();
        assert_eq!(a.case, LevyCase::Sigma1Gt);
        assert_eq!(a.c_star, 0.5);
        assert!(a.h(a.c_star).abs() < 1e-10);
        assert!(a.sign_pattern_ok);
        assert!(a.y_star.unwrap() < 0.0);
        assert_eq!(a.y_max, ExtReal::PosInf);
        let b = case_price_bound(&a, 0.95, RiskMeasure::VaR).unwrap();
        let z95 = StandardNormal.quantile(0.95);
        assert!((b.bound - (0.2 * z95).exp()).abs() < 1e-12);
        assert!(b.valid && b.kind == BoundKind::Cond1);
        assert_eq!(uniform_price_bound(&a), Some(1.0));
    }

    #[test]
    fn case_four() {
        let a = classify_levy_case(0.0, 0.2, 0.0, 0.3, normal()).unwrap();
        assert_eq!(a.case, LevyCase::Sigma2Gt);
        assert_eq!(a.c_star, 0.5);
        let y = a.y_star.unwrap();
        assert!((y - 4.0 / 27.0).abs() < 1e-10);
        let u = a.u_star.unwrap();
        assert!((u - StandardNormal.cdf((2.0f64 / 3.0).ln() / 0.1)).abs() < 1e-18);
        assert!((z_upper_bound(0.0, 0.2, 0.0, 0.3).unwrap() - y).abs() < 1e-10);
        let b = case_price_bound(&a, 0.95, RiskMeasure::VaR).unwrap();
        assert!(!b.valid && b.bound.is_finite());
        assert!(case_price_bound(&a, 0.3, RiskMeasure::VaR).unwrap().valid);
    }

    #[test]
    fn maximizer_of_case_four() {
        let a = classify_levy_case(0.0, 0.2, 0.0, 0.3, normal()).unwrap();
        // search in z to resolve a maximizer near the lower end of (0, 1)
        let (z, y) = golden_section_max(|z| a.difference().at_z(z), -20.0, 20.0, 1e-12);
        assert!((StandardNormal.cdf(z) - a.u_star.unwrap()).abs() < 1e-8);
        assert!((y - a.y_star.unwrap()).abs() < 1e-8);
    }

    #[test]
    fn equal_scales() {
        let a = classify_levy_case(1.0, 0.2, 0.0, 0.2, normal()).unwrap();
        assert_eq!(a.case, LevyCase::EqualSigmaMu1Gt);
        assert_eq!((a.y_min, a.y_max), (ExtReal::ZERO, ExtReal::PosInf));
        assert_eq!(a.tail_kind, TailKind::Monotone(Direction::NonDecreasing));
        let a = classify_levy_case(0.0, 0.2, 1.0, 0.2, normal()).unwrap();
        assert_eq!(a.case, LevyCase::EqualSigmaMu2Gt);
        assert_eq!(a.valid_interval(RiskMeasure::VaR), (0.0, 1.0));
        assert!(matches!(
            classify_levy_case(0.0, 0.2, 0.0, 0.2, normal()),
            Err(Error::TrivialCase)
        ));
    }

    #[test]
    fn upper_bound_figures() {
        assert!((z_upper_bound(0.0, 0.1, 0.0, 0.2).unwrap() - 0.25).abs() < 1e-12);
        let base = z_upper_bound(0.0, 0.2, 0.0, 0.3).unwrap();
        let shifted = z_upper_bound(0.7, 0.2, 0.7, 0.3).unwrap();
        assert!((shifted / base - 0.7f64.exp()).abs() < 1e-12);
        assert!(matches!(
            z_upper_bound(0.0, 0.3, 0.0, 0.2),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn piecewise_shape_matches_case() {
        for (m1, s1, m2, s2) in [
            (0.0, 0.3, 0.0, 0.2),
            (0.2, 0.5, -0.4, 0.9),
            (-0.3, 0.8, 0.1, 0.25),
        ] {
            let a = classify_levy_case(m1, s1, m2, s2, normal()).unwrap();
            let c = classify_tail(&a.quantile_difference_function().unwrap());
            assert_eq!(c.kind, a.tail_kind);
            assert!(
                (c.threshold.to_f64() - a.c_star).abs() < 1e-10,
                "{c:?} vs {}",
                a.c_star
            );
        }
    }
}
