use std::fmt;
use std::sync::Arc;

use crate::distributions::Standardizer;
use crate::ext::{next_up, ExtReal};

/// Monotone direction of a segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    NonDecreasing,
    NonIncreasing,
    Constant,
}

impl Direction {
    pub fn flipped(self) -> Direction {
        match self {
            Direction::NonDecreasing => Direction::NonIncreasing,
            Direction::NonIncreasing => Direction::NonDecreasing,
            Direction::Constant => Direction::Constant,
        }
    }

    /// Whether the segment is compatible with a non-decreasing function.
    pub fn allows_increase(self) -> bool {
        matches!(self, Direction::NonDecreasing | Direction::Constant)
    }

    pub fn allows_decrease(self) -> bool {
        matches!(self, Direction::NonIncreasing | Direction::Constant)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::NonDecreasing => "nondecreasing",
            Direction::NonIncreasing => "nonincreasing",
            Direction::Constant => "constant",
        }
    }

    pub fn parse(s: &str) -> Option<Direction> {
        match s {
            "nondecreasing" | "non_decreasing" | "increasing" => Some(Direction::NonDecreasing),
            "nonincreasing" | "non_increasing" | "decreasing" => Some(Direction::NonIncreasing),
            "constant" => Some(Direction::Constant),
            _ => None,
        }
    }
}

/// `x ↦ exp(μ₁ + σ₁W⁻¹(p)) − exp(μ₂ + σ₂W⁻¹(p))` on `p ∈ (0, 1)`, the
/// quantile difference of two exponential location-scale laws sharing `W`.
///
/// The flags record reflections: `negate_arg` evaluates at `p = −x` and
/// `negate_value` negates the result.
#[derive(Debug, Clone)]
pub struct QuantileDifference {
    pub mu1: f64,
    pub sigma1: f64,
    pub mu2: f64,
    pub sigma2: f64,
    pub w: Arc<dyn Standardizer>,
    pub negate_value: bool,
    pub negate_arg: bool,
}

impl PartialEq for QuantileDifference {
    fn eq(&self, o: &Self) -> bool {
        self.mu1 == o.mu1
            && self.sigma1 == o.sigma1
            && self.mu2 == o.mu2
            && self.sigma2 == o.sigma2
            && self.w.name() == o.w.name()
            && self.negate_value == o.negate_value
            && self.negate_arg == o.negate_arg
    }
}

impl QuantileDifference {
    pub fn new(mu1: f64, sigma1: f64, mu2: f64, sigma2: f64, w: Arc<dyn Standardizer>) -> Self {
        QuantileDifference {
            mu1,
            sigma1,
            mu2,
            sigma2,
            w,
            negate_value: false,
            negate_arg: false,
        }
    }

    /// Unreflected difference at a standardized level `z = W⁻¹(p)`.
    pub fn at_z(&self, z: f64) -> f64 {
        let a = self.mu1 + self.sigma1 * z;
        let b = self.mu2 + self.sigma2 * z;
        // factor out the larger exponent to avoid overflow
        let m = a.max(b);
        if m > 700.0 {
            let d = (a - m).exp() - (b - m).exp();
            return d * m.exp();
        }
        a.exp() - b.exp()
    }

    fn level(&self, x: f64) -> f64 {
        if self.negate_arg {
            -x
        } else {
            x
        }
    }

    fn sign(&self) -> f64 {
        if self.negate_value {
            -1.0
        } else {
            1.0
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let p = self.level(x);
        if !(p > 0.0 && p < 1.0) {
            return f64::NAN;
        }
        self.sign() * self.at_z(self.w.quantile(p))
    }

    /// Value as the level tends to 1 (the upper end of the quantile range).
    fn at_level_one(&self) -> ExtReal {
        let s = if self.sigma1 > self.sigma2 {
            1.0
        } else if self.sigma1 < self.sigma2 {
            -1.0
        } else if self.mu1 > self.mu2 {
            1.0
        } else if self.mu1 < self.mu2 {
            -1.0
        } else {
            return ExtReal::ZERO;
        };
        ExtReal::PosInf.scale(s * self.sign())
    }

    fn limit(&self, x: ExtReal) -> ExtReal {
        let p = match x {
            ExtReal::Finite(v) => self.level(v),
            _ => return ExtReal::Finite(f64::NAN),
        };
        if p == 0.0 {
            ExtReal::ZERO
        } else if p == 1.0 {
            self.at_level_one()
        } else {
            ExtReal::new(self.eval(x.to_f64()))
        }
    }
}

/// Closed-form evaluator of a segment.
#[derive(Debug, Clone, PartialEq)]
pub enum Form {
    /// `a·x + b`
    Affine {
        a: f64,
        b: f64,
    },
    /// `a·exp(b·x) + c`
    ExpAffine {
        a: f64,
        b: f64,
        c: f64,
    },
    Constant {
        v: f64,
    },
    QuantileDifference(QuantileDifference),
}

impl Form {
    pub fn affine(a: f64, b: f64) -> Form {
        if a == 0.0 {
            Form::Constant { v: b }
        } else {
            Form::Affine { a, b }
        }
    }

    pub fn exp_affine(a: f64, b: f64, c: f64) -> Form {
        if a == 0.0 || b == 0.0 {
            Form::Constant {
                v: a * (b * 0.0).exp() + c,
            }
        } else {
            Form::ExpAffine { a, b, c }
        }
    }

    pub fn constant(v: f64) -> Form {
        Form::Constant { v }
    }

    pub fn identity() -> Form {
        Form::Affine { a: 1.0, b: 0.0 }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Form::Affine { a, b } => a * x + b,
            Form::ExpAffine { a, b, c } => a * (b * x).exp() + c,
            Form::Constant { v } => *v,
            Form::QuantileDifference(q) => q.eval(x),
        }
    }

    /// Limit of the form as its argument tends to `x`. Forms are continuous
    /// on their natural domain, so at interior points this is the value.
    pub fn limit(&self, x: ExtReal) -> ExtReal {
        match (self, x) {
            (Form::QuantileDifference(q), _) => q.limit(x),
            (_, ExtReal::Finite(v)) => ExtReal::new(self.eval(v)),
            (Form::Constant { v }, _) => ExtReal::Finite(*v),
            (Form::Affine { a, b }, inf) => {
                if *a == 0.0 {
                    ExtReal::Finite(*b)
                } else {
                    inf.scale(*a)
                }
            }
            (Form::ExpAffine { a, b, c }, inf) => {
                let grows = (*b > 0.0) == (inf == ExtReal::PosInf);
                if *b == 0.0 {
                    ExtReal::Finite(a + c)
                } else if grows {
                    if *a == 0.0 {
                        ExtReal::Finite(*c)
                    } else {
                        ExtReal::PosInf.scale(*a)
                    }
                } else {
                    ExtReal::Finite(*c)
                }
            }
        }
    }

    /// Direction implied by the closed form, when it does not depend on the interval.
    pub fn intrinsic_direction(&self) -> Option<Direction> {
        let from_sign = |s: f64| {
            if s > 0.0 {
                Direction::NonDecreasing
            } else if s < 0.0 {
                Direction::NonIncreasing
            } else {
                Direction::Constant
            }
        };
        match self {
            Form::Affine { a, .. } => Some(from_sign(*a)),
            Form::ExpAffine { a, b, .. } => Some(from_sign(a * b)),
            Form::Constant { .. } => Some(Direction::Constant),
            Form::QuantileDifference(_) => None,
        }
    }

    pub fn negate_value(&self) -> Form {
        match self {
            Form::Affine { a, b } => Form::Affine { a: -a, b: -b },
            Form::ExpAffine { a, b, c } => Form::ExpAffine {
                a: -a,
                b: *b,
                c: -c,
            },
            Form::Constant { v } => Form::Constant { v: -v },
            Form::QuantileDifference(q) => {
                let mut q = q.clone();
                q.negate_value = !q.negate_value;
                Form::QuantileDifference(q)
            }
        }
    }

    pub fn negate_arg(&self) -> Form {
        match self {
            Form::Affine { a, b } => Form::Affine { a: -a, b: *b },
            Form::ExpAffine { a, b, c } => Form::ExpAffine {
                a: *a,
                b: -b,
                c: *c,
            },
            Form::Constant { v } => Form::Constant { v: *v },
            Form::QuantileDifference(q) => {
                let mut q = q.clone();
                q.negate_arg = !q.negate_arg;
                Form::QuantileDifference(q)
            }
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Form::Affine { .. } => "affine",
            Form::ExpAffine { .. } => "exp_affine",
            Form::Constant { .. } => "constant",
            Form::QuantileDifference(_) => "quantile_difference",
        }
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Form::Affine { a, b } => write!(f, "{a}·x + {b}"),
            Form::ExpAffine { a, b, c } => write!(f, "{a}·exp({b}·x) + {c}"),
            Form::Constant { v } => write!(f, "{v}"),
            Form::QuantileDifference(q) => write!(
                f,
                "exp({} + {}·W⁻¹(p)) − exp({} + {}·W⁻¹(p))",
                q.mu1, q.sigma1, q.mu2, q.sigma2
            ),
        }
    }
}

/// Points strictly inside `(lo, hi)` used to spot-check declared directions.
pub(crate) fn grid_points(lo: ExtReal, hi: ExtReal, n: usize) -> Vec<f64> {
    let t = |i: usize| (i as f64 + 0.5) / n as f64;
    match (lo, hi) {
        (ExtReal::Finite(a), ExtReal::Finite(b)) => (0..n)
            .map(|i| a + (b - a) * t(i))
            .filter(|x| *x > a && *x < b)
            .collect(),
        (ExtReal::Finite(a), _) => (0..n)
            .map(|i| a + (1.0 + a.abs()) * ((8.0 * t(i)).exp() - 1.0))
            .filter(|x| *x > a)
            .collect(),
        (_, ExtReal::Finite(b)) => (0..n)
            .rev()
            .map(|i| b - (1.0 + b.abs()) * ((8.0 * t(i)).exp() - 1.0))
            .filter(|x| *x < b)
            .collect(),
        _ => (0..n).map(|i| (16.0 * (t(i) - 0.5)).sinh()).collect(),
    }
}

/// Order-preserving map from doubles to integers.
fn key(x: f64) -> i128 {
    let b = x.to_bits() as i64;
    if b < 0 {
        i64::MIN as i128 - b as i128
    } else {
        b as i128
    }
}

fn unkey(k: i128) -> f64 {
    let b = if k < 0 { i64::MIN as i128 - k } else { k };
    f64::from_bits(b as i64 as u64)
}

/// Smallest double `x` in `(lo, hi]` with `pred(x)`, for a predicate that is
/// false then true along the interval and true at `hi`. Infinite ends are
/// first replaced by finite brackets.
pub(crate) fn first_true<P: Fn(f64) -> bool>(lo: ExtReal, hi: ExtReal, pred: P) -> f64 {
    let mut h = match hi {
        ExtReal::Finite(v) => v,
        _ => {
            let base = lo.finite().unwrap_or(0.0);
            let mut step = 1.0;
            let mut x = base + step;
            while !pred(x) && x.is_finite() {
                step *= 2.0;
                x = base + step;
            }
            x
        }
    };
    let mut l = match lo {
        ExtReal::Finite(v) => v,
        _ => {
            let mut step = 1.0;
            let mut x = h - step;
            while pred(x) && x.is_finite() {
                step *= 2.0;
                x = h - step;
            }
            if !x.is_finite() {
                return x;
            }
            x
        }
    };
    // l is a point where pred is false (or the open lower end)
    while key(h) - key(l) > 1 {
        let m = unkey(key(l) + (key(h) - key(l)) / 2);
        if pred(m) {
            h = m;
        } else {
            l = m;
        }
    }
    if h <= l {
        next_up(l)
    } else {
        h
    }
}

/// Largest double `x` in `[lo, hi)` with `pred(x)`, for a predicate that is
/// true then false along the interval and true at `lo`.
pub(crate) fn last_true<P: Fn(f64) -> bool>(lo: ExtReal, hi: ExtReal, pred: P) -> f64 {
    -first_true(-hi, -lo, |x| pred(-x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::StandardNormal;

    #[test]
    fn limits_at_infinity() {
        assert_eq!(
            Form::affine(-2.0, 1.0).limit(ExtReal::PosInf),
            ExtReal::NegInf
        );
        assert_eq!(
            Form::exp_affine(3.0, -1.0, 2.0).limit(ExtReal::PosInf),
            ExtReal::Finite(2.0)
        );
        assert_eq!(
            Form::exp_affine(-3.0, 1.0, 2.0).limit(ExtReal::PosInf),
            ExtReal::NegInf
        );
        assert_eq!(
            Form::constant(4.0).limit(ExtReal::NegInf),
            ExtReal::Finite(4.0)
        );
    }

    #[test]
    fn reflections_of_forms() {
        let f = Form::exp_affine(2.0, 0.5, -1.0);
        for &x in &[-2.0, 0.0, 1.5] {
            assert_eq!(f.negate_value().eval(x), -f.eval(x));
            assert_eq!(f.negate_arg().eval(-x), f.eval(x));
        }
        let q = Form::QuantileDifference(QuantileDifference::new(
            0.0,
            0.3,
            0.0,
            0.2,
            Arc::new(StandardNormal),
        ));
        assert_eq!(q.negate_arg().eval(-0.7), q.eval(0.7));
        assert_eq!(q.limit(ExtReal::Finite(1.0)), ExtReal::PosInf);
        assert_eq!(q.negate_arg().limit(ExtReal::Finite(0.0)), ExtReal::ZERO);
        assert_eq!(q.eval(0.5), 0.0);
    }

    #[test]
    fn float_bisection_is_exact() {
        let x = first_true(ExtReal::Finite(0.0), ExtReal::Finite(10.0), |x| {
            3.0 * x - 1.0 >= 0.5
        });
        assert_eq!(x, 0.5);
        let y = first_true(ExtReal::NegInf, ExtReal::Finite(0.0), |x| x >= -1234.5);
        assert_eq!(y, -1234.5);
        let z = last_true(ExtReal::Finite(-1.0), ExtReal::PosInf, |x| x <= 77.25);
        assert_eq!(z, 77.25);
    }

    #[test]
    fn grid_inside_interval() {
        for (lo, hi) in [
            (ExtReal::Finite(1.0), ExtReal::Finite(2.0)),
            (ExtReal::Finite(-3.0), ExtReal::PosInf),
            (ExtReal::NegInf, ExtReal::Finite(-3.0)),
            (ExtReal::NegInf, ExtReal::PosInf),
        ] {
            let g = grid_points(lo, hi, 64);
            assert!(!g.is_empty());
            assert!(g.windows(2).all(|w| w[0] < w[1]));
            assert!(g
                .iter()
                .all(|&x| ExtReal::Finite(x) > lo && ExtReal::Finite(x) < hi));
        }
    }
}
