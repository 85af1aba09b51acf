//! Univariate laws, their cdfs and generalized inverses, and the quantile
//! based risk measures VaR, TVaR and LTVaR.

pub mod integrate;
pub mod standardizer;

use std::ops::Add;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ext::{rational, rational_to_f64, ExtReal, Prob};
pub use integrate::Integral;
pub use standardizer::{standardizer_by_name, StandardNormal, Standardizer};

/// Probabilities closer than this to 0 or 1 are handled by tail extrapolation.
pub const TAIL_CUT: f64 = 1e-12;
/// Absolute tolerance of the quantile quadrature.
pub const QUAD_TOL: f64 = 1e-9;

/// Which generalized inverse of a cdf to take.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuantileSide {
    /// `F⁻¹(p) = inf{x : F(x) ≥ p}`
    Left,
    /// `F⁻¹⁺(p) = sup{x : F(x) ≤ p}`
    Right,
    /// `(1 − α)·F⁻¹(p) + α·F⁻¹⁺(p)`
    Alpha(f64),
}

impl QuantileSide {
    pub fn alpha(a: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::Domain(format!("alpha {a} is not in [0, 1]")));
        }
        Ok(QuantileSide::Alpha(a))
    }

    /// Collapses `Alpha(0)` and `Alpha(1)` onto `Left` and `Right`.
    pub fn normalized(self) -> Self {
        match self {
            QuantileSide::Alpha(0.0) => QuantileSide::Left,
            QuantileSide::Alpha(1.0) => QuantileSide::Right,
            s => s,
        }
    }
}

pub(crate) fn check_level(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("level {p} is not in [0, 1]")));
    }
    Ok(())
}

pub(crate) fn check_open_level(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("level {p} is not in (0, 1)")));
    }
    Ok(())
}

/// A finite discrete law with exactly known masses.
///
/// Masses are held as rationals normalized to sum to exactly one, so the
/// cumulative probabilities used for quantile look-ups and validity
/// boundaries are free of rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct Discrete {
    values: Vec<f64>,
    probs: Vec<f64>,
    exact: Vec<BigRational>,
    cum: Vec<BigRational>,
}

impl Discrete {
    /// Atoms as `(value, probability)`. Duplicate values are merged and the
    /// probabilities must sum to one within `1e-12`.
    pub fn new(atoms: &[(f64, f64)]) -> Result<Self> {
        let mut exact = Vec::with_capacity(atoms.len());
        let mut total = 0.0;
        for &(v, p) in atoms {
            if !v.is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "atom value {v} is not finite"
                )));
            }
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::InvalidDistribution(format!(
                    "atom probability {p} is not in (0, 1]"
                )));
            }
            total += p;
            exact.push((v, rational(p)));
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Self::from_exact(exact)
    }

    /// Atoms with exact rational masses; the masses are rescaled to sum to one.
    pub fn from_exact(mut atoms: Vec<(f64, BigRational)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("no atoms".into()));
        }
        if atoms
            .iter()
            .any(|(v, p)| !v.is_finite() || !p.is_positive())
        {
            return Err(Error::InvalidDistribution(
                "atoms need finite values and positive masses".into(),
            ));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, BigRational)> = Vec::with_capacity(atoms.len());
        for (v, p) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += p,
                _ => merged.push((if v == 0.0 { 0.0 } else { v }, p)),
            }
        }
        let sum: BigRational = merged.iter().map(|(_, p)| p.clone()).sum();
        let mut values = Vec::with_capacity(merged.len());
        let mut exact = Vec::with_capacity(merged.len());
        for (v, p) in merged {
            values.push(v);
            exact.push(if sum.is_one() { p } else { p / &sum });
        }
        let mut cum = Vec::with_capacity(exact.len());
        let mut acc = BigRational::zero();
        for p in &exact {
            acc += p;
            cum.push(acc.clone());
        }
        let probs = exact.iter().map(rational_to_f64).collect();
        Ok(Discrete {
            values,
            probs,
            exact,
            cum,
        })
    }

    /// Equal weights on the sample values.
    pub fn empirical(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidDistribution("empty sample".into()));
        }
        let w = crate::ext::ratio(1, values.len() as i64);
        Self::from_exact(values.iter().map(|&v| (v, w.clone())).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn exact_probs(&self) -> &[BigRational] {
        &self.exact
    }

    /// Exact `F(x_k)` for each atom `x_k`.
    pub fn cumulative(&self) -> &[BigRational] {
        &self.cum
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().copied().zip(self.probs.iter().copied())
    }

    /// Exact `P[X ≤ x]`.
    pub fn cdf_exact(&self, x: f64) -> BigRational {
        let k = self.values.partition_point(|&v| v <= x);
        if k == 0 {
            BigRational::zero()
        } else {
            self.cum[k - 1].clone()
        }
    }

    /// Exact `P[X < x]`.
    pub fn cdf_left_exact(&self, x: f64) -> BigRational {
        let k = self.values.partition_point(|&v| v < x);
        if k == 0 {
            BigRational::zero()
        } else {
            self.cum[k - 1].clone()
        }
    }

    /// Index of the smallest atom with `F(x_k) ≥ p`.
    fn left_index(&self, p: &BigRational) -> usize {
        self.cum.partition_point(|c| c < p).min(self.len() - 1)
    }

    /// Index of the smallest atom with `F(x_k) > p`, if any.
    fn right_index(&self, p: &BigRational) -> Option<usize> {
        let k = self.cum.partition_point(|c| c <= p);
        (k < self.len()).then_some(k)
    }

    pub fn quantile_left(&self, p: f64) -> ExtReal {
        if p <= 0.0 {
            return ExtReal::NegInf;
        }
        ExtReal::Finite(self.values[self.left_index(&rational(p))])
    }

    pub fn quantile_right(&self, p: f64) -> ExtReal {
        if p >= 1.0 {
            return ExtReal::PosInf;
        }
        match self.right_index(&rational(p.max(0.0))) {
            Some(k) => ExtReal::Finite(self.values[k]),
            None => ExtReal::PosInf,
        }
    }

    /// `F⁻¹(1 − p)` and `F⁻¹⁺(1 − p)` with the complement taken exactly.
    pub fn quantile_complement(&self, p: f64, side: QuantileSide) -> ExtReal {
        let q = BigRational::one() - rational(p);
        match side.normalized() {
            QuantileSide::Right if p <= 0.0 => ExtReal::PosInf,
            QuantileSide::Right => match self.right_index(&q) {
                Some(k) => ExtReal::Finite(self.values[k]),
                None => ExtReal::PosInf,
            },
            _ if p >= 1.0 => ExtReal::NegInf,
            _ => ExtReal::Finite(self.values[self.left_index(&q)]),
        }
    }

    /// Exact `∫_{q0}^{q1} F⁻¹(q) dq` as a sum over the atom mass intervals.
    pub fn quantile_integral(&self, q0: f64, q1: f64) -> f64 {
        let a = rational(q0);
        let b = rational(q1);
        let mut lo = BigRational::zero();
        let mut total = 0.0;
        for (k, hi) in self.cum.iter().enumerate() {
            let l = if lo > a { lo.clone() } else { a.clone() };
            let h = if *hi < b { hi.clone() } else { b.clone() };
            if h > l {
                total += self.values[k] * rational_to_f64(&(h - l));
            }
            lo = hi.clone();
        }
        total
    }
}

/// A univariate law.
#[derive(Debug, Clone)]
pub enum Distribution {
    Discrete(Discrete),
    /// Uniform on `[lower, upper]`.
    Uniform {
        lower: f64,
        upper: f64,
    },
    /// `μ + σW`.
    LocationScale {
        mu: f64,
        sigma: f64,
        w: Arc<dyn Standardizer>,
    },
    /// `exp(μ + σW)`.
    ExpLocationScale {
        mu: f64,
        sigma: f64,
        w: Arc<dyn Standardizer>,
    },
}

/// Standardizers compare by name.
impl PartialEq for Distribution {
    fn eq(&self, other: &Self) -> bool {
        use Distribution::*;
        match (self, other) {
            (Discrete(a), Discrete(b)) => a == b,
            (Uniform { lower: a, upper: b }, Uniform { lower: c, upper: d }) => a == c && b == d,
            (
                LocationScale { mu, sigma, w },
                LocationScale {
                    mu: m,
                    sigma: s,
                    w: v,
                },
            )
            | (
                ExpLocationScale { mu, sigma, w },
                ExpLocationScale {
                    mu: m,
                    sigma: s,
                    w: v,
                },
            ) => mu == m && sigma == s && w.name() == v.name(),
            _ => false,
        }
    }
}

impl Distribution {
    pub fn discrete(atoms: &[(f64, f64)]) -> Result<Self> {
        Discrete::new(atoms).map(Distribution::Discrete)
    }

    /// Equally weighted atoms at the given values.
    pub fn uniform_atoms(values: &[f64]) -> Result<Self> {
        Discrete::empirical(values).map(Distribution::Discrete)
    }

    pub fn empirical(values: &[f64]) -> Result<Self> {
        Discrete::empirical(values).map(Distribution::Discrete)
    }

    pub fn uniform01() -> Self {
        Distribution::Uniform {
            lower: 0.0,
            upper: 1.0,
        }
    }

    pub fn uniform(lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && lower < upper) {
            return Err(Error::InvalidDistribution(format!(
                "uniform bounds [{lower}, {upper}]"
            )));
        }
        Ok(Distribution::Uniform { lower, upper })
    }

    pub fn location_scale(mu: f64, sigma: f64, w: Arc<dyn Standardizer>) -> Result<Self> {
        check_params(mu, sigma)?;
        Ok(Distribution::LocationScale { mu, sigma, w })
    }

    pub fn exp_location_scale(mu: f64, sigma: f64, w: Arc<dyn Standardizer>) -> Result<Self> {
        check_params(mu, sigma)?;
        Ok(Distribution::ExpLocationScale { mu, sigma, w })
    }

    /// `exp(μ + σW)` with `W` standard normal.
    pub fn lognormal(mu: f64, sigma: f64) -> Result<Self> {
        Self::exp_location_scale(mu, sigma, Arc::new(StandardNormal))
    }

    pub fn normal(mu: f64, sigma: f64) -> Result<Self> {
        Self::location_scale(mu, sigma, Arc::new(StandardNormal))
    }

    pub fn as_discrete(&self) -> Option<&Discrete> {
        match self {
            Distribution::Discrete(d) => Some(d),
            _ => None,
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, Distribution::Discrete(_))
    }

    /// True for laws without atoms.
    pub fn is_continuous(&self) -> bool {
        !self.is_discrete()
    }

    /// Smallest closed interval carrying all the mass.
    pub fn support(&self) -> (ExtReal, ExtReal) {
        match self {
            Distribution::Discrete(d) => (
                ExtReal::Finite(d.values[0]),
                ExtReal::Finite(*d.values.last().unwrap()),
            ),
            Distribution::Uniform { lower, upper } => {
                (ExtReal::Finite(*lower), ExtReal::Finite(*upper))
            }
            Distribution::LocationScale { .. } => (ExtReal::NegInf, ExtReal::PosInf),
            Distribution::ExpLocationScale { .. } => (ExtReal::ZERO, ExtReal::PosInf),
        }
    }

    /// `P[X ≤ x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Distribution::Discrete(d) => rational_to_f64(&d.cdf_exact(x)),
            Distribution::Uniform { lower, upper } => {
                ((x - lower) / (upper - lower)).clamp(0.0, 1.0)
            }
            Distribution::LocationScale { mu, sigma, w } => w.cdf((x - mu) / sigma),
            Distribution::ExpLocationScale { mu, sigma, w } => {
                if x <= 0.0 {
                    0.0
                } else {
                    w.cdf((x.ln() - mu) / sigma)
                }
            }
        }
    }

    /// `P[X ≤ x]`, exact for discrete and uniform laws.
    pub fn cdf_prob(&self, x: ExtReal) -> Prob {
        match x {
            ExtReal::NegInf => return Prob::zero(),
            ExtReal::PosInf => return Prob::one(),
            ExtReal::Finite(_) => {}
        }
        let x = x.to_f64();
        match self {
            Distribution::Discrete(d) => Prob::exact(d.cdf_exact(x)),
            Distribution::Uniform { lower, upper } => {
                Prob::exact(uniform_cdf_exact(*lower, *upper, x))
            }
            _ => Prob::approx(self.cdf(x)),
        }
    }

    /// `P[X < x]`.
    pub fn cdf_left_prob(&self, x: ExtReal) -> Prob {
        match (self, x) {
            (Distribution::Discrete(d), ExtReal::Finite(v)) => Prob::exact(d.cdf_left_exact(v)),
            _ => self.cdf_prob(x),
        }
    }

    /// Mass of the interval between `lo` and `hi` with the given closedness.
    pub fn interval_prob(
        &self,
        lo: ExtReal,
        lo_closed: bool,
        hi: ExtReal,
        hi_closed: bool,
    ) -> Prob {
        if hi < lo || (hi == lo && !(lo_closed && hi_closed)) {
            return Prob::zero();
        }
        let upper = if hi_closed {
            self.cdf_prob(hi)
        } else {
            self.cdf_left_prob(hi)
        };
        let lower = if lo_closed {
            self.cdf_left_prob(lo)
        } else {
            self.cdf_prob(lo)
        };
        let d = upper.sub(&lower);
        if d.value() < 0.0 {
            Prob::zero()
        } else {
            d
        }
    }

    /// Generalized inverse of the cdf at `p ∈ [0, 1]`.
    pub fn quantile(&self, p: f64, side: QuantileSide) -> Result<ExtReal> {
        check_level(p)?;
        Ok(match side.normalized() {
            QuantileSide::Left => self.quantile_left(p),
            QuantileSide::Right => self.quantile_right(p),
            QuantileSide::Alpha(a) => {
                if !(0.0..=1.0).contains(&a) {
                    return Err(Error::Domain(format!("alpha {a} is not in [0, 1]")));
                }
                let l = self.quantile_left(p);
                let r = self.quantile_right(p);
                l.scale(1.0 - a).checked_add(r.scale(a)).ok_or_else(|| {
                    Error::Domain("undefined combination of infinite quantiles".into())
                })?
            }
        })
    }

    fn quantile_left(&self, p: f64) -> ExtReal {
        match self {
            Distribution::Discrete(d) => d.quantile_left(p),
            _ if p <= 0.0 => ExtReal::NegInf,
            Distribution::Uniform { upper, .. } if p >= 1.0 => ExtReal::Finite(*upper),
            _ if p >= 1.0 => ExtReal::PosInf,
            _ => ExtReal::Finite(self.interior_quantile(p)),
        }
    }

    fn quantile_right(&self, p: f64) -> ExtReal {
        match self {
            Distribution::Discrete(d) => d.quantile_right(p),
            _ if p >= 1.0 => ExtReal::PosInf,
            Distribution::Uniform { lower, .. } if p <= 0.0 => ExtReal::Finite(*lower),
            Distribution::ExpLocationScale { .. } if p <= 0.0 => ExtReal::ZERO,
            _ if p <= 0.0 => ExtReal::NegInf,
            _ => ExtReal::Finite(self.interior_quantile(p)),
        }
    }

    /// Quantile of a continuous law at `p ∈ (0, 1)`, where both inverses agree.
    fn interior_quantile(&self, p: f64) -> f64 {
        match self {
            Distribution::Discrete(d) => d.quantile_left(p).to_f64(),
            Distribution::Uniform { lower, upper } => lower + p * (upper - lower),
            Distribution::LocationScale { mu, sigma, w } => mu + sigma * w.quantile(p),
            Distribution::ExpLocationScale { mu, sigma, w } => (mu + sigma * w.quantile(p)).exp(),
        }
    }

    /// Quantile at `1 − s` for a continuous law, without forming `1 − s`.
    fn interior_upper_quantile(&self, s: f64) -> f64 {
        match self {
            Distribution::LocationScale { mu, sigma, w } => mu + sigma * w.upper_quantile(s),
            Distribution::ExpLocationScale { mu, sigma, w } => {
                (mu + sigma * w.upper_quantile(s)).exp()
            }
            _ => self.interior_quantile(1.0 - s),
        }
    }

    /// Value-at-Risk: the left quantile at `p ∈ (0, 1]`.
    pub fn var(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::Domain(format!("level {p} is not in (0, 1]")));
        }
        self.quantile(p, QuantileSide::Left)?
            .finite()
            .ok_or_else(|| Error::Domain(format!("VaR at level {p} is infinite")))
    }

    /// `∫_{q0}^{q1} F⁻¹(q) dq` for `0 ≤ q0 ≤ q1 ≤ 1`. Left and right
    /// inverses differ on a null set only, so the side does not matter.
    pub fn quantile_integral(&self, q0: f64, q1: f64) -> Result<Integral> {
        check_level(q0)?;
        check_level(q1)?;
        if q1 <= q0 {
            return Ok(Integral::ZERO);
        }
        match self {
            Distribution::Discrete(d) => Ok(Integral {
                value: d.quantile_integral(q0, q1),
                error: 0.0,
            }),
            Distribution::Uniform { lower, upper } => Ok(Integral {
                value: lower * (q1 - q0) + (upper - lower) * (q1 * q1 - q0 * q0) / 2.0,
                error: 0.0,
            }),
            _ => self.numeric_quantile_integral(q0, q1),
        }
    }

    fn numeric_quantile_integral(&self, q0: f64, q1: f64) -> Result<Integral> {
        let mut total = Integral::ZERO;
        // lower half in s = q, upper half in s = 1 − q
        let lo_hi = q1.min(0.5);
        if q0 < lo_hi {
            let g = |s: f64| self.interior_quantile(s);
            total = total.add(if q0 <= TAIL_CUT {
                let head = integrate::integrate_to_zero(&g, lo_hi, TAIL_CUT, 0.5 * QUAD_TOL)?;
                if q0 > 0.0 {
                    head.add(negate(integrate::integrate_to_zero(
                        &g,
                        q0,
                        TAIL_CUT,
                        0.5 * QUAD_TOL,
                    )?))
                } else {
                    head
                }
            } else {
                integrate::integrate_decades(&g, q0, lo_hi, 0.5 * QUAD_TOL)
            });
        }
        let up_lo = q0.max(0.5);
        if up_lo < q1 {
            let g = |s: f64| self.interior_upper_quantile(s);
            let s_hi = 1.0 - up_lo;
            let s_lo = 1.0 - q1;
            total = total.add(if s_lo <= TAIL_CUT {
                let head = integrate::integrate_to_zero(&g, s_hi, TAIL_CUT, 0.5 * QUAD_TOL)?;
                if s_lo > 0.0 {
                    head.add(negate(integrate::integrate_to_zero(
                        &g,
                        s_lo,
                        TAIL_CUT,
                        0.5 * QUAD_TOL,
                    )?))
                } else {
                    head
                }
            } else {
                integrate::integrate_decades(&g, s_lo, s_hi, 0.5 * QUAD_TOL)
            });
        }
        if !total.value.is_finite() {
            return Err(Error::DivergentIntegral(
                "quantile integral is not finite".into(),
            ));
        }
        Ok(total)
    }

    /// Tail Value-at-Risk `(1/(1−p)) ∫_p^1 F⁻¹(q) dq`.
    pub fn tvar(&self, p: f64) -> Result<f64> {
        check_open_level(p)?;
        Ok(self.quantile_integral(p, 1.0)?.value / (1.0 - p))
    }

    /// Left Tail Value-at-Risk `(1/p) ∫_0^p F⁻¹⁺(q) dq`.
    pub fn ltvar(&self, p: f64) -> Result<f64> {
        check_open_level(p)?;
        Ok(self.quantile_integral(0.0, p)?.value / p)
    }

    /// Average of the `side` quantiles above `p`. Every side gives the same
    /// value since the inverses differ only at countably many levels.
    pub fn tvar_with(&self, p: f64, side: QuantileSide) -> Result<f64> {
        if let QuantileSide::Alpha(a) = side {
            QuantileSide::alpha(a)?;
        }
        self.tvar(p)
    }

    /// Average of the `side` quantiles below `p`.
    pub fn ltvar_with(&self, p: f64, side: QuantileSide) -> Result<f64> {
        if let QuantileSide::Alpha(a) = side {
            QuantileSide::alpha(a)?;
        }
        self.ltvar(p)
    }

    /// `F⁻¹(u)` for `u ∈ (0, 1)`; turns uniform draws into draws of the law.
    pub fn sample_at(&self, u: f64) -> f64 {
        self.quantile_left(u).to_f64()
    }
}

fn negate(i: Integral) -> Integral {
    Integral {
        value: -i.value,
        error: i.error,
    }
}

fn check_params(mu: f64, sigma: f64) -> Result<()> {
    if !mu.is_finite() || !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidDistribution(format!(
            "need finite mu and sigma > 0, got ({mu}, {sigma})"
        )));
    }
    Ok(())
}

fn uniform_cdf_exact(lower: f64, upper: f64, x: f64) -> BigRational {
    if x <= lower {
        return BigRational::zero();
    }
    if x >= upper {
        return BigRational::one();
    }
    (rational(x) - rational(lower)) / (rational(upper) - rational(lower))
}
