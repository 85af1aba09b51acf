use serde::Serialize;

use super::form::{first_true, last_true, Direction};
use super::{Piece, PiecewiseFunction, Reflection};
use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::ext::{ExtReal, Prob};
use crate::tail_functions::Form;

/// Shape class of a function with respect to monotone tails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TailKind {
    Monotone(Direction),
    NonDecreasingUpper,
    NonIncreasingUpper,
    NonDecreasingLower,
    NonIncreasingLower,
    NoMonotoneTail,
}

impl TailKind {
    pub const TAIL_KINDS: [TailKind; 4] = [
        TailKind::NonDecreasingUpper,
        TailKind::NonIncreasingUpper,
        TailKind::NonDecreasingLower,
        TailKind::NonIncreasingLower,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TailKind::Monotone(Direction::NonIncreasing) => "monotone_nonincreasing",
            TailKind::Monotone(_) => "monotone_nondecreasing",
            TailKind::NonDecreasingUpper => "nondecreasing_upper",
            TailKind::NonIncreasingUpper => "nonincreasing_upper",
            TailKind::NonDecreasingLower => "nondecreasing_lower",
            TailKind::NonIncreasingLower => "nonincreasing_lower",
            TailKind::NoMonotoneTail => "no_monotone_tail",
        }
    }

    pub fn is_tail(self) -> bool {
        Self::TAIL_KINDS.contains(&self)
    }

    /// Kinds whose boundary probability is `P[f(X) ≤ h★]` rather than `P[f(X) ≥ g★]`.
    pub fn uses_lower_mass(self) -> bool {
        matches!(
            self,
            TailKind::NonDecreasingUpper | TailKind::NonIncreasingLower
        )
    }
}

impl Serialize for TailKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// One applicable tail class with its threshold and boundary value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailClass {
    pub kind: TailKind,
    /// `c` or `d`: the infimum (upper tails) or supremum (lower tails) of
    /// the admissible split points.
    pub threshold: ExtReal,
    /// Whether the threshold is itself an admissible split point.
    pub threshold_attained: bool,
    /// `h★` or `g★`: the extreme value of the function on the side of the
    /// threshold where it is not monotone.
    pub boundary_value: ExtReal,
}

/// Result of [`classify_tail`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailClassification {
    pub kind: TailKind,
    pub threshold: ExtReal,
    pub threshold_attained: bool,
    pub boundary_value: Option<ExtReal>,
    /// Set for constant functions, which are monotone in both directions.
    pub both_directions: bool,
    /// Every tail class the function belongs to, in the order
    /// non-decreasing upper, non-increasing upper, non-decreasing lower,
    /// non-increasing lower. The first one is the primary kind.
    pub alternatives: Vec<TailClass>,
    pub note: Option<String>,
}

impl TailClassification {
    pub fn class(&self, kind: TailKind) -> Option<&TailClass> {
        self.alternatives.iter().find(|c| c.kind == kind)
    }

    pub fn primary(&self) -> Option<&TailClass> {
        self.alternatives.first()
    }

    pub fn is_monotone(&self) -> bool {
        matches!(self.kind, TailKind::Monotone(_))
    }

    /// Whether the monotone direction `d` is admissible for the whole function.
    pub fn monotone_in(&self, d: Direction) -> bool {
        match self.kind {
            TailKind::Monotone(k) => k == d || self.both_directions,
            _ => false,
        }
    }
}

struct Upper {
    threshold: ExtReal,
    attained: bool,
    boundary: ExtReal,
}

enum Scan {
    Global,
    Tail(Upper),
    Empty,
}

#[derive(Clone, Copy)]
enum Elem {
    Knot(usize, f64),
    Piece(usize),
}

fn elements(f: &PiecewiseFunction) -> Vec<Elem> {
    let mut out = Vec::with_capacity(2 * f.knots.len());
    for i in 0..f.knots.len() {
        if let Some(v) = f.values[i] {
            out.push(Elem::Knot(i, v));
        }
        if i < f.pieces.len() {
            out.push(Elem::Piece(i));
        }
    }
    out
}

/// Non-decreasing upper tail analysis.
///
/// `R` is the set of split points beyond which `f` is non-decreasing; it is
/// an up-set of the domain starting at a knot. A split point `x'` then also
/// satisfies the domination condition iff `f(x') ≥ sup_{𝓘∖R} f`, so the
/// threshold is the first point of `R` reaching that supremum.
fn scan_upper(f: &PiecewiseFunction) -> Scan {
    let elems = elements(f);
    let mut inf_right = ExtReal::PosInf;
    let mut start = elems.len();
    for (idx, e) in elems.iter().enumerate().rev() {
        let ok = match *e {
            Elem::Knot(_, v) => {
                let v = ExtReal::Finite(v);
                if v <= inf_right {
                    inf_right = v;
                    true
                } else {
                    false
                }
            }
            Elem::Piece(i) => {
                let p = &f.pieces[i];
                let sup = p.form.limit(f.knots[i + 1]);
                if p.direction.allows_increase() && sup <= inf_right {
                    inf_right = p.form.limit(f.knots[i]);
                    true
                } else {
                    false
                }
            }
        };
        if !ok {
            break;
        }
        start = idx;
    }
    if start == 0 {
        return Scan::Global;
    }
    if start == elems.len() {
        return Scan::Empty;
    }
    let mut m0 = ExtReal::NegInf;
    for e in &elems[..start] {
        m0 = m0.max(match *e {
            Elem::Knot(_, v) => ExtReal::Finite(v),
            Elem::Piece(i) => f.piece_sup(i),
        });
    }
    if m0 == ExtReal::PosInf {
        return Scan::Empty;
    }
    for e in &elems[start..] {
        match *e {
            Elem::Knot(i, v) => {
                if ExtReal::Finite(v) >= m0 {
                    return Scan::Tail(Upper {
                        threshold: f.knots[i],
                        attained: true,
                        boundary: m0,
                    });
                }
            }
            Elem::Piece(i) => {
                let form = &f.pieces[i].form;
                let a = form.limit(f.knots[i]);
                let b = form.limit(f.knots[i + 1]);
                if a >= m0 {
                    return Scan::Tail(Upper {
                        threshold: f.knots[i],
                        attained: false,
                        boundary: m0,
                    });
                }
                if b > m0 {
                    let target = m0.to_f64();
                    let x = first_true(f.knots[i], f.knots[i + 1], |x| form.eval(x) >= target);
                    if ExtReal::Finite(x) < f.knots[i + 1] {
                        return Scan::Tail(Upper {
                            threshold: ExtReal::Finite(x),
                            attained: true,
                            boundary: m0,
                        });
                    }
                }
            }
        }
    }
    Scan::Empty
}

/// Classifies `f` into the monotone-tail classes with exact thresholds.
pub fn classify_tail(f: &PiecewiseFunction) -> TailClassification {
    let inf = f.inf_domain();
    if f.is_single_point() {
        return TailClassification {
            kind: TailKind::Monotone(Direction::NonDecreasing),
            threshold: inf,
            threshold_attained: true,
            boundary_value: None,
            both_directions: true,
            alternatives: Vec::new(),
            note: Some("single-point domain".into()),
        };
    }
    let nd = scan_upper(f);
    let ni = scan_upper(&f.reflect(Reflection::NegateValue));
    let monotone = |d: Direction, both: bool| TailClassification {
        kind: TailKind::Monotone(d),
        threshold: inf,
        threshold_attained: f.includes_start(),
        boundary_value: None,
        both_directions: both,
        alternatives: Vec::new(),
        note: both.then(|| "constant function".to_string()),
    };
    match (&nd, &ni) {
        (Scan::Global, Scan::Global) => return monotone(Direction::NonDecreasing, true),
        (Scan::Global, _) => return monotone(Direction::NonDecreasing, false),
        (_, Scan::Global) => return monotone(Direction::NonIncreasing, false),
        _ => {}
    }
    let ndl = scan_upper(&f.reflect(Reflection::NegateBoth));
    let nil = scan_upper(&f.reflect(Reflection::NegateArgument));
    let mut alternatives = Vec::new();
    // (kind, scan, threshold sign, boundary sign)
    for (kind, scan, ts, bs) in [
        (TailKind::NonDecreasingUpper, nd, 1.0, 1.0),
        (TailKind::NonIncreasingUpper, ni, 1.0, -1.0),
        (TailKind::NonDecreasingLower, ndl, -1.0, -1.0),
        (TailKind::NonIncreasingLower, nil, -1.0, 1.0),
    ] {
        if let Scan::Tail(u) = scan {
            alternatives.push(TailClass {
                kind,
                threshold: u.threshold.scale(ts),
                threshold_attained: u.attained,
                boundary_value: u.boundary.scale(bs),
            });
        }
    }
    match alternatives.first().cloned() {
        Some(p) => TailClassification {
            kind: p.kind,
            threshold: p.threshold,
            threshold_attained: p.threshold_attained,
            boundary_value: Some(p.boundary_value),
            both_directions: false,
            note: (alternatives.len() > 1).then(|| {
                format!(
                    "also {}",
                    alternatives[1..]
                        .iter()
                        .map(|c| c.kind.as_str())
                        .collect::<Vec<_>>()
                        .join(", ")
                )
            }),
            alternatives,
        },
        None => TailClassification {
            kind: TailKind::NoMonotoneTail,
            threshold: f.sup_domain(),
            threshold_attained: false,
            boundary_value: None,
            both_directions: false,
            alternatives,
            note: Some(
                "no admissible split point; threshold set to the supremum of the domain".into(),
            ),
        },
    }
}

/// Whether `x` is an admissible split point for the class `kind`, i.e.
/// whether `x` belongs to the set whose infimum (or supremum) is the
/// threshold.
pub fn satisfies_tail_at(f: &PiecewiseFunction, kind: TailKind, x: f64) -> bool {
    match kind {
        TailKind::NonDecreasingUpper => upper_split(f, x),
        TailKind::NonIncreasingUpper => upper_split(&f.reflect(Reflection::NegateValue), x),
        TailKind::NonDecreasingLower => upper_split(&f.reflect(Reflection::NegateBoth), -x),
        TailKind::NonIncreasingLower => upper_split(&f.reflect(Reflection::NegateArgument), -x),
        _ => false,
    }
}

fn upper_split(f: &PiecewiseFunction, x: f64) -> bool {
    let Some(fx) = f.eval(x) else {
        return false;
    };
    let at = ExtReal::Finite(x);
    let mut sup_left = ExtReal::NegInf;
    let mut cur = ExtReal::Finite(fx);
    for e in elements(f) {
        match e {
            Elem::Knot(i, v) => {
                let v = ExtReal::Finite(v);
                if f.knots[i] < at {
                    sup_left = sup_left.max(v);
                } else if f.knots[i] > at {
                    if v < cur {
                        return false;
                    }
                    cur = v;
                }
            }
            Elem::Piece(i) => {
                let (l, r) = (f.knots[i], f.knots[i + 1]);
                let p = &f.pieces[i];
                if r <= at {
                    sup_left = sup_left.max(f.piece_sup(i));
                    continue;
                }
                if l < at {
                    sup_left = sup_left
                        .max(p.form.limit(l))
                        .max(ExtReal::Finite(p.form.eval(x)));
                } else if p.form.limit(l) < cur {
                    return false;
                }
                if !p.direction.allows_increase() {
                    return false;
                }
                cur = p.form.limit(r);
            }
        }
    }
    sup_left <= ExtReal::Finite(fx)
}

/// Comparison of `f(X)` against a level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueRelation {
    Le,
    Lt,
    Ge,
    Gt,
}

impl ValueRelation {
    fn holds(self, a: f64, b: ExtReal) -> bool {
        let a = ExtReal::Finite(a);
        match self {
            ValueRelation::Le => a <= b,
            ValueRelation::Lt => a < b,
            ValueRelation::Ge => a >= b,
            ValueRelation::Gt => a > b,
        }
    }

    fn below(self) -> bool {
        matches!(self, ValueRelation::Le | ValueRelation::Lt)
    }
}

/// Checks that the law of `X` lives on the domain of `f`.
pub(crate) fn check_support(f: &PiecewiseFunction, dist: &Distribution) -> Result<()> {
    match dist {
        Distribution::Discrete(d) => {
            if let Some(x) = d.values().iter().find(|&&x| !f.contains(x)) {
                return Err(Error::Domain(format!(
                    "atom {x} lies outside the domain of the function"
                )));
            }
        }
        _ => {
            let (lo, hi) = dist.support();
            if lo < f.inf_domain() || hi > f.sup_domain() {
                return Err(Error::Domain(format!(
                    "support [{lo}, {hi}] is not inside the domain [{}, {}]",
                    f.inf_domain(),
                    f.sup_domain()
                )));
            }
        }
    }
    Ok(())
}

/// `P[f(X) rel v]`: exact for discrete laws by enumeration, and by the
/// preimage measure of each monotone piece for continuous laws.
pub fn preimage_prob(
    f: &PiecewiseFunction,
    dist: &Distribution,
    v: ExtReal,
    rel: ValueRelation,
) -> Result<Prob> {
    check_support(f, dist)?;
    if let Distribution::Discrete(d) = dist {
        let mut acc = Prob::zero();
        for (k, &x) in d.values().iter().enumerate() {
            if rel.holds(f.eval_checked(x)?, v) {
                acc = acc.add(&Prob::exact(d.exact_probs()[k].clone()));
            }
        }
        return Ok(acc);
    }
    let mut acc = Prob::zero();
    for i in 0..f.knots.len() {
        if let (Some(val), ExtReal::Finite(_)) = (f.values[i], f.knots[i]) {
            if rel.holds(val, v) {
                acc = acc.add(&dist.interval_prob(f.knots[i], true, f.knots[i], true));
            }
        }
        if i < f.pieces.len() {
            acc = acc.add(&piece_preimage(f, i, dist, v, rel));
        }
    }
    Ok(acc)
}

fn piece_preimage(
    f: &PiecewiseFunction,
    i: usize,
    dist: &Distribution,
    v: ExtReal,
    rel: ValueRelation,
) -> Prob {
    let (l, r) = (f.knots[i], f.knots[i + 1]);
    let Piece { form, direction } = &f.pieces[i];
    let all = || dist.interval_prob(l, false, r, false);
    let a = form.limit(l);
    let b = form.limit(r);
    if *direction == Direction::Constant {
        return if rel.holds(a.to_f64(), v) {
            all()
        } else {
            Prob::zero()
        };
    }
    let (lo_val, hi_val) = (a.min(b), a.max(b));
    // values strictly inside (lo_val, hi_val) on the open piece
    let every = match rel {
        ValueRelation::Le => hi_val <= v,
        ValueRelation::Lt => hi_val <= v,
        ValueRelation::Ge => lo_val >= v,
        ValueRelation::Gt => lo_val >= v,
    };
    let none = match rel {
        ValueRelation::Le | ValueRelation::Lt => lo_val >= v,
        ValueRelation::Ge | ValueRelation::Gt => hi_val <= v,
    };
    if every {
        return all();
    }
    if none {
        return Prob::zero();
    }
    let target = v.to_f64();
    let increasing = *direction == Direction::NonDecreasing;
    // crossing point of the strictly monotone piece through the level
    let x = if increasing {
        first_true(l, r, |x| form.eval(x) >= target)
    } else {
        last_true(l, r, |x| form.eval(x) >= target)
    };
    let x = ExtReal::Finite(x);
    let left_side = increasing == rel.below();
    if left_side {
        dist.interval_prob(l, false, x, true)
    } else {
        dist.interval_prob(x, false, r, false)
    }
}

/// `π = P[f(X) ≤ h★]` for non-decreasing upper and non-increasing lower
/// tails, `λ = P[f(X) ≥ g★]` for the other two classes.
pub fn boundary_probability(
    f: &PiecewiseFunction,
    class: &TailClass,
    dist: &Distribution,
) -> Result<Prob> {
    if !class.kind.is_tail() {
        return Err(Error::UnsupportedKind(format!(
            "no boundary probability for {}",
            class.kind.as_str()
        )));
    }
    let rel = if class.kind.uses_lower_mass() {
        ValueRelation::Le
    } else {
        ValueRelation::Ge
    };
    preimage_prob(f, dist, class.boundary_value, rel)
}

/// The monotone rewrite `h̃`: `h★` below the threshold `c`,
/// `max(f(c), h★)` at `c` and `f` above it.
pub fn build_h_tilde(
    f: &PiecewiseFunction,
    class: &TailClassification,
) -> Result<PiecewiseFunction> {
    if class.monotone_in(Direction::NonDecreasing) {
        return Ok(f.clone());
    }
    let c = class.class(TailKind::NonDecreasingUpper).ok_or_else(|| {
        Error::UnsupportedKind(format!(
            "the rewrite needs a non-decreasing upper tail, got {}",
            class.kind.as_str()
        ))
    })?;
    build_h_tilde_for(f, c)
}

pub(crate) fn build_h_tilde_for(
    f: &PiecewiseFunction,
    class: &TailClass,
) -> Result<PiecewiseFunction> {
    if class.kind != TailKind::NonDecreasingUpper {
        return Err(Error::UnsupportedKind(class.kind.as_str().into()));
    }
    let c = class.threshold;
    let h_star = class
        .boundary_value
        .finite()
        .ok_or_else(|| Error::InvalidFunction("boundary value is not finite".into()))?;
    if c <= f.inf_domain() {
        return Ok(f.clone());
    }
    let cv = c.to_f64();
    let at_c = f.eval_checked(cv)?.max(h_star);
    let mut knots = vec![f.knots[0], c];
    let mut values = vec![f.values[0].map(|_| h_star), Some(at_c)];
    let mut pieces = vec![Piece::with_direction(
        Form::constant(h_star),
        Direction::Constant,
    )];
    // piece containing or starting at c
    let j = f.knots.partition_point(|&k| k <= c);
    if j < f.knots.len() {
        pieces.push(f.pieces[j - 1].clone());
        knots.extend_from_slice(&f.knots[j..]);
        values.extend_from_slice(&f.values[j..]);
        pieces.extend_from_slice(&f.pieces[j..]);
    }
    PiecewiseFunction::new(knots, values, pieces)
}

#[cfg(test)]
mod tests {
    use super::super::tests::counterexample;
    use super::super::KnotRule;
    use super::*;
    use crate::ext::ratio;

    fn straddle(k: f64) -> PiecewiseFunction {
        PiecewiseFunction::builder(ExtReal::Finite(0.0), true)
            .piece(Form::affine(-1.0, k), ExtReal::Finite(k))
            .piece(Form::affine(1.0, -k), ExtReal::PosInf)
            .build(false)
            .unwrap()
    }

    #[test]
    fn straddle_upper_tail() {
        let c = classify_tail(&straddle(10.0));
        assert_eq!(c.kind, TailKind::NonDecreasingUpper);
        assert_eq!(c.threshold, ExtReal::Finite(20.0));
        assert_eq!(c.boundary_value, Some(ExtReal::Finite(10.0)));
        assert!(c.threshold_attained);
    }

    #[test]
    fn counterexample_threshold() {
        let c = classify_tail(&counterexample());
        assert_eq!(c.kind, TailKind::NonDecreasingUpper);
        assert_eq!(c.threshold, ExtReal::Finite(2.5));
        assert_eq!(c.boundary_value, Some(ExtReal::Finite(1.0)));
        let x = Distribution::uniform_atoms(&[0.0, 1.0, 2.0, 3.0]).unwrap();
        let pi = boundary_probability(&counterexample(), c.primary().unwrap(), &x).unwrap();
        assert_eq!(pi.exact_value().unwrap(), &ratio(3, 4));
    }

    #[test]
    fn constant_is_monotone_both_ways() {
        let f = PiecewiseFunction::builder(ExtReal::Finite(0.0), true)
            .piece(Form::constant(3.0), ExtReal::Finite(1.0))
            .build(true)
            .unwrap();
        let c = classify_tail(&f);
        assert_eq!(c.kind, TailKind::Monotone(Direction::NonDecreasing));
        assert!(c.both_directions);
        assert!(c.monotone_in(Direction::NonIncreasing));
    }

    #[test]
    fn reflections_follow_the_link() {
        let f = straddle(10.0);
        let g = classify_tail(&f.reflect(Reflection::NegateValue));
        assert_eq!(
            (g.kind, g.threshold),
            (TailKind::NonIncreasingUpper, ExtReal::Finite(20.0))
        );
        assert_eq!(g.boundary_value, Some(ExtReal::Finite(-10.0)));
        let h = classify_tail(&f.reflect(Reflection::NegateBoth));
        assert_eq!(
            (h.kind, h.threshold),
            (TailKind::NonDecreasingLower, ExtReal::Finite(-20.0))
        );
        let k = classify_tail(&f.reflect(Reflection::NegateArgument));
        assert_eq!(
            (k.kind, k.threshold),
            (TailKind::NonIncreasingLower, ExtReal::Finite(-20.0))
        );
        assert_eq!(k.boundary_value, Some(ExtReal::Finite(10.0)));
    }

    #[test]
    fn both_tails_without_monotonicity() {
        // x on [0,1], 3 − x on (1,2), x on [2,4]
        let f = PiecewiseFunction::builder(ExtReal::Finite(0.0), true)
            .piece(Form::identity(), ExtReal::Finite(1.0))
            .at_knot(KnotRule::FromLeft)
            .piece(Form::affine(-1.0, 3.0), ExtReal::Finite(2.0))
            .at_knot(KnotRule::FromRight)
            .piece(Form::identity(), ExtReal::Finite(4.0))
            .build(true)
            .unwrap();
        let c = classify_tail(&f);
        assert_eq!(c.kind, TailKind::NonDecreasingUpper);
        assert_eq!(c.threshold, ExtReal::Finite(2.0));
        let l = c.class(TailKind::NonDecreasingLower).unwrap();
        assert_eq!(l.threshold, ExtReal::Finite(1.0));
        assert_eq!(l.boundary_value, ExtReal::Finite(1.0));
    }

    #[test]
    fn no_tail() {
        // zig-zag through 0, 3, -1, 2, 1 with neither end extreme
        let f = PiecewiseFunction::builder(ExtReal::Finite(0.0), true)
            .piece(Form::affine(3.0, 0.0), ExtReal::Finite(1.0))
            .piece(Form::affine(-4.0, 7.0), ExtReal::Finite(2.0))
            .piece(Form::affine(3.0, -7.0), ExtReal::Finite(3.0))
            .piece(Form::affine(-1.0, 5.0), ExtReal::Finite(4.0))
            .build(true)
            .unwrap();
        let c = classify_tail(&f);
        assert_eq!(c.kind, TailKind::NoMonotoneTail);
        assert_eq!(c.threshold, ExtReal::Finite(4.0));
    }

    #[test]
    fn continuous_boundary_probability() {
        let x = Distribution::uniform(0.0, 40.0).unwrap();
        let f = straddle(10.0);
        let c = classify_tail(&f);
        let pi = boundary_probability(&f, c.primary().unwrap(), &x).unwrap();
        assert_eq!(pi.value(), 0.5);
    }

    #[test]
    fn h_tilde_of_straddle() {
        let f = straddle(10.0);
        let h = build_h_tilde(&f, &classify_tail(&f)).unwrap();
        assert_eq!(h.eval(0.0), Some(10.0));
        assert_eq!(h.eval(19.0), Some(10.0));
        assert_eq!(h.eval(20.0), Some(10.0));
        assert_eq!(h.eval(25.0), Some(15.0));
        assert!(classify_tail(&h).monotone_in(Direction::NonDecreasing));
        let g = counterexample();
        let h = build_h_tilde(&g, &classify_tail(&g)).unwrap();
        assert_eq!(h.eval(2.4), Some(1.0));
        assert_eq!(h.eval(2.5), Some(1.0));
        assert_eq!(h.eval(3.0), Some(2.0));
    }
}
