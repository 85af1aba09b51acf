//! Piecewise monotone functions and their classification into the four
//! monotone-tail classes.

mod classify;
pub mod form;

use crate::error::{Error, Result};
use crate::ext::ExtReal;
pub(crate) use classify::check_support;
pub use classify::{
    boundary_probability, build_h_tilde, classify_tail, preimage_prob, satisfies_tail_at,
    TailClass, TailClassification, TailKind, ValueRelation,
};
pub use form::{Direction, Form, QuantileDifference};

const GRID: usize = 64;
const GRID_TOL: f64 = 1e-12;

/// A closed-form evaluator on an open interval between two knots.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub form: Form,
    pub direction: Direction,
}

impl Piece {
    /// A piece whose direction follows from its closed form.
    pub fn new(form: Form) -> Self {
        let direction = form
            .intrinsic_direction()
            .unwrap_or(Direction::NonDecreasing);
        Piece { form, direction }
    }

    pub fn with_direction(form: Form, direction: Direction) -> Self {
        Piece { form, direction }
    }
}

/// Reflections relating the four tail classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reflection {
    /// `x ↦ −f(x)`
    NegateValue,
    /// `x ↦ f(−x)`
    NegateArgument,
    /// `x ↦ −f(−x)`
    NegateBoth,
}

/// A real function on an interval, given by monotone closed-form pieces
/// between knots `x₀ < x₁ < … < xₙ` and explicit values at the knots.
///
/// The end knots may be infinite or excluded from the domain; interior
/// knots always belong to it. Pieces live on the open intervals between
/// consecutive knots.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseFunction {
    knots: Vec<ExtReal>,
    values: Vec<Option<f64>>,
    pieces: Vec<Piece>,
}

impl PiecewiseFunction {
    pub fn new(
        knots: Vec<ExtReal>,
        values: Vec<Option<f64>>,
        mut pieces: Vec<Piece>,
    ) -> Result<Self> {
        for p in pieces.iter_mut() {
            if p.form.intrinsic_direction() == Some(Direction::Constant) {
                p.direction = Direction::Constant;
            }
        }
        let f = PiecewiseFunction {
            knots,
            values,
            pieces,
        };
        f.validate()?;
        Ok(f)
    }

    /// Starts a function at `start`, included in the domain when `closed`.
    pub fn builder(start: ExtReal, closed: bool) -> Builder {
        Builder {
            knots: vec![start],
            rules: vec![if closed {
                KnotRule::FromRight
            } else {
                KnotRule::Excluded
            }],
            pieces: Vec::new(),
        }
    }

    /// The identity on the given interval.
    pub fn identity(lo: ExtReal, hi: ExtReal) -> Result<Self> {
        Self::builder(lo, lo.is_finite())
            .piece(Form::identity(), hi)
            .build(hi.is_finite())
    }

    fn validate(&self) -> Result<()> {
        let n = self.pieces.len();
        if n == 0 && self.knots.len() == 1 {
            if self.values[0].is_none() || !self.knots[0].is_finite() {
                return Err(Error::InvalidFunction(
                    "a single-point domain needs a finite included point".into(),
                ));
            }
            return Ok(());
        }
        if n == 0 || self.knots.len() != n + 1 || self.values.len() != n + 1 {
            return Err(Error::InvalidFunction(
                "need n pieces between n + 1 knots".into(),
            ));
        }
        for w in self.knots.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::InvalidFunction(format!(
                    "knots {} and {} are not increasing",
                    w[0], w[1]
                )));
            }
        }
        if self.knots[1..n].iter().any(|k| !k.is_finite()) {
            return Err(Error::InvalidFunction(
                "interior knots must be finite".into(),
            ));
        }
        for (i, v) in self.values.iter().enumerate() {
            match v {
                None if i != 0 && i != n => {
                    return Err(Error::InvalidFunction(format!(
                        "missing value at interior knot {}",
                        self.knots[i]
                    )))
                }
                Some(_) if !self.knots[i].is_finite() => {
                    return Err(Error::InvalidFunction(
                        "an infinite end cannot carry a value".into(),
                    ))
                }
                Some(x) if !x.is_finite() => {
                    return Err(Error::InvalidFunction(format!(
                        "value {x} at knot {} is not finite",
                        self.knots[i]
                    )))
                }
                _ => {}
            }
        }
        for (i, p) in self.pieces.iter().enumerate() {
            self.check_piece(i, p)?;
        }
        Ok(())
    }

    fn check_piece(&self, i: usize, p: &Piece) -> Result<()> {
        let (lo, hi) = (self.knots[i], self.knots[i + 1]);
        if let Some(d) = p.form.intrinsic_direction() {
            if d != p.direction && !(d == Direction::Constant) {
                return Err(Error::InvalidFunction(format!(
                    "piece {} on ({lo}, {hi}) is {} but declared {}",
                    p.form,
                    d.as_str(),
                    p.direction.as_str()
                )));
            }
            if d == Direction::Constant {
                return Ok(());
            }
        }
        let grid = form::grid_points(lo, hi, GRID);
        let vals: Vec<f64> = grid.iter().map(|&x| p.form.eval(x)).collect();
        if vals.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidFunction(format!(
                "piece {} is undefined on ({lo}, {hi})",
                p.form
            )));
        }
        for w in vals.windows(2) {
            let tol = GRID_TOL * w[0].abs().max(w[1].abs()).max(1.0);
            let ok = match p.direction {
                Direction::NonDecreasing => w[1] >= w[0] - tol,
                Direction::NonIncreasing => w[1] <= w[0] + tol,
                Direction::Constant => (w[1] - w[0]).abs() <= tol,
            };
            if !ok {
                return Err(Error::InvalidFunction(format!(
                    "piece {} is not {} on ({lo}, {hi})",
                    p.form,
                    p.direction.as_str()
                )));
            }
        }
        Ok(())
    }

    pub fn knots(&self) -> &[ExtReal] {
        &self.knots
    }

    pub fn knot_values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn inf_domain(&self) -> ExtReal {
        self.knots[0]
    }

    pub fn sup_domain(&self) -> ExtReal {
        *self.knots.last().unwrap()
    }

    pub fn includes_start(&self) -> bool {
        self.values[0].is_some()
    }

    pub fn includes_end(&self) -> bool {
        self.values.last().unwrap().is_some()
    }

    pub fn is_single_point(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Whether `x` belongs to the domain.
    pub fn contains(&self, x: f64) -> bool {
        self.eval(x).is_some()
    }

    pub fn eval(&self, x: f64) -> Option<f64> {
        if x.is_nan() {
            return None;
        }
        let xe = ExtReal::Finite(x);
        let k = self.knots.partition_point(|&k| k < xe);
        if k < self.knots.len() && self.knots[k] == xe {
            return self.values[k];
        }
        if k == 0 || k == self.knots.len() {
            return None;
        }
        Some(self.pieces[k - 1].form.eval(x))
    }

    pub fn eval_checked(&self, x: f64) -> Result<f64> {
        self.eval(x)
            .ok_or_else(|| Error::Domain(format!("{x} lies outside the domain of the function")))
    }

    /// Evaluates at an extended real; infinite points are never in the domain.
    pub fn eval_ext(&self, x: ExtReal) -> Result<f64> {
        match x {
            ExtReal::Finite(v) => self.eval_checked(v),
            _ => Err(Error::Domain(format!(
                "{x} lies outside the domain of the function"
            ))),
        }
    }

    /// `f(xᵢ−)`, the limit from the left at knot `i`.
    pub fn left_limit(&self, i: usize) -> Option<ExtReal> {
        (i > 0).then(|| self.pieces[i - 1].form.limit(self.knots[i]))
    }

    /// `f(xᵢ+)`, the limit from the right at knot `i`.
    pub fn right_limit(&self, i: usize) -> Option<ExtReal> {
        (i < self.pieces.len()).then(|| self.pieces[i].form.limit(self.knots[i]))
    }

    /// Supremum of piece `i` over its open interval.
    pub fn piece_sup(&self, i: usize) -> ExtReal {
        let a = self.pieces[i].form.limit(self.knots[i]);
        let b = self.pieces[i].form.limit(self.knots[i + 1]);
        a.max(b)
    }

    /// Infimum of piece `i` over its open interval.
    pub fn piece_inf(&self, i: usize) -> ExtReal {
        let a = self.pieces[i].form.limit(self.knots[i]);
        let b = self.pieces[i].form.limit(self.knots[i + 1]);
        a.min(b)
    }

    /// `f(b) = f(b−)` at every knot in the domain with a left neighbourhood.
    pub fn is_left_continuous(&self) -> bool {
        (1..self.knots.len()).all(|i| match self.values[i] {
            Some(v) => self.left_limit(i) == Some(ExtReal::Finite(v)),
            None => true,
        })
    }

    /// `f(b) = f(b+)` at every knot in the domain with a right neighbourhood.
    pub fn is_right_continuous(&self) -> bool {
        (0..self.pieces.len()).all(|i| match self.values[i] {
            Some(v) => self.right_limit(i) == Some(ExtReal::Finite(v)),
            None => true,
        })
    }

    /// Reflected function; argument negation reverses the knot order and
    /// swaps left and right continuity.
    pub fn reflect(&self, mode: Reflection) -> PiecewiseFunction {
        let neg_val = matches!(mode, Reflection::NegateValue | Reflection::NegateBoth);
        let neg_arg = matches!(mode, Reflection::NegateArgument | Reflection::NegateBoth);
        let map_form = |f: &Form| {
            let f = if neg_val { f.negate_value() } else { f.clone() };
            if neg_arg {
                f.negate_arg()
            } else {
                f
            }
        };
        let map_dir = |d: Direction| if neg_val != neg_arg { d.flipped() } else { d };
        let mut knots: Vec<ExtReal> = self.knots.clone();
        let mut values: Vec<Option<f64>> = self
            .values
            .iter()
            .map(|v| v.map(|x| if neg_val { -x } else { x }))
            .collect();
        let mut pieces: Vec<Piece> = self
            .pieces
            .iter()
            .map(|p| Piece {
                form: map_form(&p.form),
                direction: map_dir(p.direction),
            })
            .collect();
        if neg_arg {
            knots = knots.into_iter().rev().map(|k| -k).collect();
            values.reverse();
            pieces.reverse();
        }
        PiecewiseFunction {
            knots,
            values,
            pieces,
        }
    }

    /// Knots and piece-interior sample points, for grid checks.
    pub fn sample_points(&self, per_piece: usize) -> Vec<f64> {
        let mut out = Vec::new();
        for i in 0..self.knots.len() {
            if let (Some(_), ExtReal::Finite(k)) = (self.values[i], self.knots[i]) {
                out.push(k);
            }
            if i < self.pieces.len() {
                out.extend(form::grid_points(
                    self.knots[i],
                    self.knots[i + 1],
                    per_piece,
                ));
            }
        }
        out
    }
}

/// How the value at a knot is determined while building.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KnotRule {
    /// The two adjacent pieces must meet; the common limit is the value.
    Continuous,
    /// The value of the piece on the left.
    FromLeft,
    /// The value of the piece on the right.
    FromRight,
    Value(f64),
    /// Only allowed at the ends of the domain.
    Excluded,
}

/// Incremental construction of a [`PiecewiseFunction`].
#[derive(Debug, Clone)]
pub struct Builder {
    knots: Vec<ExtReal>,
    rules: Vec<KnotRule>,
    pieces: Vec<Piece>,
}

impl Builder {
    /// Appends a piece ending at `end`; the knot it ends on defaults to continuous.
    pub fn piece(self, form: Form, end: ExtReal) -> Self {
        let p = Piece::new(form);
        self.push(p, end)
    }

    pub fn piece_with(self, form: Form, direction: Direction, end: ExtReal) -> Self {
        self.push(Piece::with_direction(form, direction), end)
    }

    fn push(mut self, p: Piece, end: ExtReal) -> Self {
        self.pieces.push(p);
        self.knots.push(end);
        self.rules.push(KnotRule::Continuous);
        self
    }

    /// Sets the rule for the most recent knot.
    pub fn at_knot(mut self, rule: KnotRule) -> Self {
        *self.rules.last_mut().unwrap() = rule;
        self
    }

    /// Finishes; the last knot is included in the domain when `closed`.
    pub fn build(mut self, closed: bool) -> Result<PiecewiseFunction> {
        let n = self.pieces.len();
        if !closed {
            self.rules[n] = KnotRule::Excluded;
        } else if self.rules[n] == KnotRule::Continuous {
            self.rules[n] = KnotRule::FromLeft;
        }
        let mut values = Vec::with_capacity(n + 1);
        for (i, rule) in self.rules.iter().enumerate() {
            let left = (i > 0).then(|| self.pieces[i - 1].form.limit(self.knots[i]));
            let right = (i < n).then(|| self.pieces[i].form.limit(self.knots[i]));
            let v = match *rule {
                KnotRule::Excluded => None,
                KnotRule::Value(v) => Some(v),
                KnotRule::FromLeft => left.and_then(|l| l.finite()).or(if n == 0 {
                    None
                } else {
                    right.and_then(|r| r.finite())
                }),
                KnotRule::FromRight => right
                    .and_then(|r| r.finite())
                    .or(left.and_then(|l| l.finite())),
                KnotRule::Continuous => match (left, right) {
                    (Some(l), Some(r)) if l == r => l.finite(),
                    (Some(l), Some(r)) => {
                        return Err(Error::InvalidFunction(format!(
                            "pieces do not meet at {}: {l} vs {r}; give an explicit knot rule",
                            self.knots[i]
                        )))
                    }
                    (l, r) => l.or(r).and_then(|x| x.finite()),
                },
            };
            if v.is_none() && *rule != KnotRule::Excluded {
                return Err(Error::InvalidFunction(format!(
                    "no finite value at knot {}",
                    self.knots[i]
                )));
            }
            values.push(v);
        }
        PiecewiseFunction::new(self.knots, values, self.pieces)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn counterexample() -> PiecewiseFunction {
        PiecewiseFunction::builder(ExtReal::Finite(0.0), true)
            .piece(Form::identity(), ExtReal::Finite(1.0))
            .piece(Form::affine(-1.0, 2.0), ExtReal::Finite(2.0))
            .piece(Form::affine(2.0, -4.0), ExtReal::Finite(3.0))
            .build(true)
            .unwrap()
    }

    #[test]
    fn evaluation_and_domain() {
        let f = counterexample();
        assert_eq!(f.eval(0.0), Some(0.0));
        assert_eq!(f.eval(1.0), Some(1.0));
        assert_eq!(f.eval(1.5), Some(0.5));
        assert_eq!(f.eval(2.0), Some(0.0));
        assert_eq!(f.eval(3.0), Some(2.0));
        assert_eq!(f.eval(3.5), None);
        assert_eq!(f.eval(-0.1), None);
        assert!(f.is_left_continuous() && f.is_right_continuous());
    }

    #[test]
    fn jumps_need_explicit_rule() {
        let b = PiecewiseFunction::builder(ExtReal::Finite(0.0), true)
            .piece(Form::constant(1.0), ExtReal::Finite(1.0))
            .piece(Form::constant(2.0), ExtReal::Finite(2.0));
        assert!(b.build(true).is_err());
        let g = PiecewiseFunction::builder(ExtReal::Finite(0.0), true)
            .piece(Form::constant(1.0), ExtReal::Finite(1.0))
            .at_knot(KnotRule::FromLeft)
            .piece(Form::constant(2.0), ExtReal::Finite(2.0))
            .build(true)
            .unwrap();
        assert!(g.is_left_continuous());
        assert!(!g.is_right_continuous());
        let h = g.reflect(Reflection::NegateArgument);
        assert!(h.is_right_continuous());
        assert!(!h.is_left_continuous());
    }

    #[test]
    fn declared_direction_is_checked() {
        let bad = PiecewiseFunction::new(
            vec![ExtReal::Finite(0.0), ExtReal::Finite(1.0)],
            vec![Some(0.0), Some(1.0)],
            vec![Piece::with_direction(
                Form::identity(),
                Direction::NonIncreasing,
            )],
        );
        assert!(matches!(bad, Err(Error::InvalidFunction(_))));
    }

    #[test]
    fn reflections_are_involutions() {
        let f = counterexample();
        for mode in [
            Reflection::NegateValue,
            Reflection::NegateArgument,
            Reflection::NegateBoth,
        ] {
            let g = f.reflect(mode).reflect(mode);
            assert_eq!(g, f);
        }
        let g = f.reflect(Reflection::NegateBoth);
        for x in f.sample_points(16) {
            assert_eq!(g.eval(-x), f.eval(x).map(|v| -v));
        }
    }
}
