//! Quadrant perfect dependence on finite supports and its link with the
//! monotone tails of the quantile difference of a comonotonic pair.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::distributions::Discrete;
use crate::error::{Error, Result};
use crate::ext::{rational, rational_to_f64, ExtReal};
use crate::tail_functions::{
    classify_tail, satisfies_tail_at, Form, Piece, PiecewiseFunction, TailClassification, TailKind,
};

/// A finite support in the plane, optionally with point masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportSet {
    pub points: Vec<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<f64>>,
}

impl SupportSet {
    pub fn new(points: Vec<(f64, f64)>, probs: Option<Vec<f64>>) -> Result<Self> {
        let s = SupportSet { points, probs };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::InvalidSpec("support set is empty".into()));
        }
        if self
            .points
            .iter()
            .any(|(a, b)| !a.is_finite() || !b.is_finite())
        {
            return Err(Error::InvalidSpec("support points must be finite".into()));
        }
        let mut sorted = self.points.clone();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSpec("support points must be distinct".into()));
        }
        if let Some(p) = &self.probs {
            if p.len() != self.points.len() || p.iter().any(|&q| !(0.0..=1.0).contains(&q)) {
                return Err(Error::InvalidSpec(
                    "need one probability in [0, 1] per point".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadrantKind {
    UpperUpperComonotone,
    LowerLowerComonotone,
    UpperLowerCounter,
    LowerUpperCounter,
    None,
}

impl QuadrantKind {
    pub const ALL: [QuadrantKind; 4] = [
        QuadrantKind::UpperUpperComonotone,
        QuadrantKind::LowerLowerComonotone,
        QuadrantKind::UpperLowerCounter,
        QuadrantKind::LowerUpperCounter,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            QuadrantKind::UpperUpperComonotone => "upper_upper_comonotone",
            QuadrantKind::LowerLowerComonotone => "lower_lower_comonotone",
            QuadrantKind::UpperLowerCounter => "upper_lower_counter",
            QuadrantKind::LowerUpperCounter => "lower_upper_counter",
            QuadrantKind::None => "none",
        }
    }

    pub fn parse(s: &str) -> Option<QuadrantKind> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s || format!("{k:?}").eq_ignore_ascii_case(s))
    }

    /// The quadrant structure matching a tail class of the quantile difference.
    pub fn for_tail(kind: TailKind) -> QuadrantKind {
        match kind {
            TailKind::NonDecreasingUpper => QuadrantKind::UpperUpperComonotone,
            TailKind::NonDecreasingLower => QuadrantKind::LowerLowerComonotone,
            TailKind::NonIncreasingUpper => QuadrantKind::UpperLowerCounter,
            TailKind::NonIncreasingLower => QuadrantKind::LowerUpperCounter,
            _ => QuadrantKind::None,
        }
    }

    pub fn tail(self) -> Option<TailKind> {
        TailKind::TAIL_KINDS
            .into_iter()
            .find(|&t| QuadrantKind::for_tail(t) == self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct QuadrantOptions {
    /// Use the printed lower-lower condition, which allows `BR(a) ∪ TR̄(a)`,
    /// instead of `BL(a) ∪ TR̄(a)` obtained by rotating the upper-upper case.
    pub strict_paper: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConditionFlags {
    /// The points in the designated open quadrant form a (counter-)monotonic set.
    pub quadrant_monotone: bool,
    /// Positive mass (or, without masses, some point) in the designated open quadrant.
    pub mass_beyond: bool,
    /// No point outside the two allowed quadrants.
    pub forbidden_empty: bool,
}

/// Indices of the support points by position relative to the threshold.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Witnesses {
    pub designated: Vec<usize>,
    pub closed: Vec<usize>,
    pub forbidden: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadrantVerdict {
    pub kind: QuadrantKind,
    pub tested: QuadrantKind,
    pub threshold: (f64, f64),
    pub witnesses: Witnesses,
    pub flags: ConditionFlags,
}

impl QuadrantVerdict {
    pub fn holds(&self) -> bool {
        self.kind != QuadrantKind::None
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Side {
    Below,
    Above,
}

/// Open quadrant with the given sides, then its closure test.
fn open(p: (f64, f64), a: (f64, f64), s1: Side, s2: Side) -> bool {
    let c = |x: f64, t: f64, s: Side| if s == Side::Above { x > t } else { x < t };
    c(p.0, a.0, s1) && c(p.1, a.1, s2)
}

fn closed(p: (f64, f64), a: (f64, f64), s1: Side, s2: Side) -> bool {
    let c = |x: f64, t: f64, s: Side| if s == Side::Above { x >= t } else { x <= t };
    c(p.0, a.0, s1) && c(p.1, a.1, s2)
}

/// Pairwise monotonicity: sorted by the first coordinate (ties broken in
/// the direction being tested), the second must be monotone.
fn is_monotone_set(points: &[(f64, f64)], counter: bool) -> bool {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| {
        a.0.total_cmp(&b.0).then(if counter {
            b.1.total_cmp(&a.1)
        } else {
            a.1.total_cmp(&b.1)
        })
    });
    pts.windows(2).all(|w| {
        if counter {
            w[1].1 <= w[0].1
        } else {
            w[1].1 >= w[0].1
        }
    })
}

/// Checks one of the four quadrant dependence structures at threshold `a`.
pub fn check_quadrant_dependence(
    s: &SupportSet,
    a: (f64, f64),
    kind: QuadrantKind,
) -> QuadrantVerdict {
    check_quadrant_dependence_with(s, a, kind, QuadrantOptions::default())
}

pub fn check_quadrant_dependence_with(
    s: &SupportSet,
    a: (f64, f64),
    kind: QuadrantKind,
    opts: QuadrantOptions,
) -> QuadrantVerdict {
    use Side::{Above, Below};
    // designated open quadrant, then the closed quadrant allowed besides it
    let ((d1, d2), (c1, c2), counter) = match kind {
        QuadrantKind::UpperUpperComonotone => ((Above, Above), (Below, Below), false),
        QuadrantKind::LowerLowerComonotone => ((Below, Below), (Above, Above), false),
        QuadrantKind::UpperLowerCounter => ((Above, Below), (Below, Above), true),
        QuadrantKind::LowerUpperCounter => ((Below, Above), (Above, Below), true),
        QuadrantKind::None => {
            return QuadrantVerdict {
                kind: QuadrantKind::None,
                tested: kind,
                threshold: a,
                witnesses: Witnesses::default(),
                flags: ConditionFlags {
                    quadrant_monotone: false,
                    mass_beyond: false,
                    forbidden_empty: false,
                },
            }
        }
    };
    let literal_ll = opts.strict_paper && kind == QuadrantKind::LowerLowerComonotone;
    let allowed = |p: (f64, f64)| {
        if literal_ll {
            open(p, a, Above, Below) || closed(p, a, Above, Above)
        } else {
            open(p, a, d1, d2) || closed(p, a, c1, c2)
        }
    };
    let mut w = Witnesses::default();
    for (i, &p) in s.points.iter().enumerate() {
        let inside = open(p, a, d1, d2);
        if inside {
            w.designated.push(i);
        }
        if !allowed(p) {
            w.forbidden.push(i);
        } else if !inside {
            w.closed.push(i);
        }
    }
    let pts: Vec<(f64, f64)> = w.designated.iter().map(|&i| s.points[i]).collect();
    let flags = ConditionFlags {
        quadrant_monotone: is_monotone_set(&pts, counter),
        mass_beyond: match &s.probs {
            Some(p) => w.designated.iter().any(|&i| p[i] > 0.0),
            None => !w.designated.is_empty(),
        },
        forbidden_empty: w.forbidden.is_empty(),
    };
    QuadrantVerdict {
        kind: if flags.quadrant_monotone && flags.mass_beyond && flags.forbidden_empty {
            kind
        } else {
            QuadrantKind::None
        },
        tested: kind,
        threshold: a,
        witnesses: w,
        flags,
    }
}

/// Sign flips of the coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rotation {
    NegateBoth,
    NegateSecond,
    NegateFirst,
}

impl Rotation {
    pub fn apply(self, (x, y): (f64, f64)) -> (f64, f64) {
        match self {
            Rotation::NegateBoth => (-x, -y),
            Rotation::NegateSecond => (x, -y),
            Rotation::NegateFirst => (-x, y),
        }
    }

    /// Image of an upper-upper structure under the rotation.
    pub fn image_of_upper_upper(self) -> QuadrantKind {
        match self {
            Rotation::NegateBoth => QuadrantKind::LowerLowerComonotone,
            Rotation::NegateSecond => QuadrantKind::UpperLowerCounter,
            Rotation::NegateFirst => QuadrantKind::LowerUpperCounter,
        }
    }

    /// Image of any structure under the rotation.
    pub fn image(self, kind: QuadrantKind) -> QuadrantKind {
        use QuadrantKind::*;
        let (flip1, flip2) = match self {
            Rotation::NegateBoth => (true, true),
            Rotation::NegateSecond => (false, true),
            Rotation::NegateFirst => (true, false),
        };
        let (u1, u2) = match kind {
            UpperUpperComonotone => (true, true),
            LowerLowerComonotone => (false, false),
            UpperLowerCounter => (true, false),
            LowerUpperCounter => (false, true),
            None => return None,
        };
        match (u1 != flip1, u2 != flip2) {
            (true, true) => UpperUpperComonotone,
            (false, false) => LowerLowerComonotone,
            (true, false) => UpperLowerCounter,
            (false, true) => LowerUpperCounter,
        }
    }
}

pub fn rotate_support(s: &SupportSet, mode: Rotation) -> SupportSet {
    SupportSet {
        points: s.points.iter().map(|&p| mode.apply(p)).collect(),
        probs: s.probs.clone(),
    }
}

/// The quantile difference `h_α = F₁^{−1(α)} − F₂^{−1(α)}` of a comonotonic
/// pair of discrete laws on the merged probability grid, together with the
/// support of `(X₂, X₁ − X₂)` traced by `p ↦ (F₂^{−1(α)}(p), h_α(p))`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileDifferenceSupport {
    pub alpha: f64,
    /// Interior grid levels, exact.
    pub grid: Vec<BigRational>,
    pub h: PiecewiseFunction,
    pub support: SupportSet,
    steps: Vec<(f64, f64)>,
    at_grid: Vec<(f64, f64)>,
}

fn mix(alpha: f64, l: f64, r: f64) -> f64 {
    if alpha == 0.0 {
        l
    } else if alpha == 1.0 {
        r
    } else {
        (1.0 - alpha) * l + alpha * r
    }
}

fn step_values(d: &Discrete, grid: &[BigRational]) -> Vec<f64> {
    // value of the left inverse on each open cell between grid levels
    let cum = d.cumulative();
    let mut out = Vec::with_capacity(grid.len() + 1);
    let mut j = 0;
    let mut lo = BigRational::zero();
    for hi in grid.iter().chain(std::iter::once(&BigRational::one())) {
        while cum[j] <= lo {
            j += 1;
        }
        debug_assert!(&cum[j] >= hi);
        out.push(d.values()[j]);
        lo = hi.clone();
    }
    out
}

impl QuantileDifferenceSupport {
    pub fn new(d1: &Discrete, d2: &Discrete, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Domain(format!(
                "alpha must lie in [0, 1], got {alpha}"
            )));
        }
        let mut grid: Vec<BigRational> = d1
            .cumulative()
            .iter()
            .chain(d2.cumulative())
            .cloned()
            .collect();
        grid.sort();
        grid.dedup();
        grid.retain(|g| !g.is_zero() && !g.is_one());
        let v1 = step_values(d1, &grid);
        let v2 = step_values(d2, &grid);
        let steps: Vec<(f64, f64)> = v2.iter().zip(&v1).map(|(&x2, &x1)| (x2, x1 - x2)).collect();
        let at_grid: Vec<(f64, f64)> = (0..grid.len())
            .map(|k| {
                let x1 = mix(alpha, v1[k], v1[k + 1]);
                let x2 = mix(alpha, v2[k], v2[k + 1]);
                (x2, x1 - x2)
            })
            .collect();
        let mut knots = vec![ExtReal::Finite(0.0)];
        knots.extend(grid.iter().map(|g| ExtReal::Finite(rational_to_f64(g))));
        knots.push(ExtReal::Finite(1.0));
        let mut values = vec![None];
        values.extend(at_grid.iter().map(|&(_, h)| Some(h)));
        values.push(None);
        let pieces = steps
            .iter()
            .map(|&(_, h)| Piece::new(Form::constant(h)))
            .collect();
        let h = PiecewiseFunction::new(knots, values, pieces)?;

        let mut mass: Vec<((f64, f64), BigRational)> = Vec::new();
        let mut lo = BigRational::zero();
        for (k, hi) in grid
            .iter()
            .chain(std::iter::once(&BigRational::one()))
            .enumerate()
        {
            mass.push((steps[k], hi - &lo));
            lo = hi.clone();
        }
        mass.extend(at_grid.iter().map(|&p| (p, BigRational::zero())));
        mass.sort_by(|a, b| a.0 .0.total_cmp(&b.0 .0).then(a.0 .1.total_cmp(&b.0 .1)));
        let mut points: Vec<(f64, f64)> = Vec::new();
        let mut probs: Vec<BigRational> = Vec::new();
        for (p, m) in mass {
            if points.last() == Some(&p) {
                *probs.last_mut().unwrap() += m;
            } else {
                points.push(p);
                probs.push(m);
            }
        }
        let support = SupportSet {
            points,
            probs: Some(probs.iter().map(rational_to_f64).collect()),
        };
        Ok(QuantileDifferenceSupport {
            alpha,
            grid,
            h,
            support,
            steps,
            at_grid,
        })
    }

    /// Exact law of `h_α(U)` for `U` uniform on `(0, 1)`.
    pub fn difference_law(&self) -> Result<Discrete> {
        let mut lo = BigRational::zero();
        let mut atoms = Vec::with_capacity(self.steps.len());
        for (k, hi) in self
            .grid
            .iter()
            .chain(std::iter::once(&BigRational::one()))
            .enumerate()
        {
            atoms.push((self.steps[k].1, hi - &lo));
            lo = hi.clone();
        }
        Discrete::from_exact(atoms)
    }

    /// Whether `h_α` is constant on `(0, 1)`.
    pub fn is_degenerate(&self) -> bool {
        let h0 = self.steps[0].1;
        self.steps.iter().all(|s| s.1 == h0) && self.at_grid.iter().all(|g| g.1 == h0)
    }

    /// `a = (F₂^{−1(α)}(π), h_α(π))`.
    pub fn threshold_point(&self, pi: f64) -> Result<(f64, f64)> {
        if !(pi > 0.0 && pi < 1.0) {
            return Err(Error::Domain(format!("pi must lie in (0, 1), got {pi}")));
        }
        // grid levels are matched through their nearest double, as in the knots of `h`
        let k = self.grid.partition_point(|g| rational_to_f64(g) < pi);
        if k < self.grid.len() && rational_to_f64(&self.grid[k]) == pi {
            return Ok(self.at_grid[k]);
        }
        let exact = rational(pi);
        Ok(self.steps[self.grid.partition_point(|g| g < &exact)])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailAtPi {
    pub kind: TailKind,
    /// `π` is an admissible threshold of this class for `h_α`.
    pub tail: bool,
    pub verdict: QuadrantVerdict,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DependenceFromTail {
    pub alpha: f64,
    pub pi: f64,
    pub threshold: (f64, f64),
    pub classification: TailClassification,
    /// The quadrant structure matching the tail class of `h_α`, checked at `a`.
    pub verdict: QuadrantVerdict,
    /// One entry per tail class: tail at `π` versus quadrant structure at `a`.
    pub checks: Vec<TailAtPi>,
    /// Agreement for the class of `verdict`.
    pub primary_agree: bool,
    /// Agreement for all four classes.
    pub agree: bool,
}

/// Builds `h_α` for the comonotonic pair, classifies it and checks each
/// tail class at threshold `π` against the matching quadrant structure of
/// `(X₂, X₁ − X₂)` at `a = (F₂^{−1(α)}(π), h_α(π))`.
pub fn dependence_from_tail(
    d1: &Discrete,
    d2: &Discrete,
    alpha: f64,
    pi: f64,
) -> Result<DependenceFromTail> {
    dependence_from_tail_with(d1, d2, alpha, pi, QuadrantOptions::default())
}

pub fn dependence_from_tail_with(
    d1: &Discrete,
    d2: &Discrete,
    alpha: f64,
    pi: f64,
    opts: QuadrantOptions,
) -> Result<DependenceFromTail> {
    let q = QuantileDifferenceSupport::new(d1, d2, alpha)?;
    if q.is_degenerate() {
        return Err(Error::DegenerateDifference);
    }
    let a = q.threshold_point(pi)?;
    let classification = classify_tail(&q.h);
    let checks: Vec<TailAtPi> = TailKind::TAIL_KINDS
        .into_iter()
        .map(|kind| {
            let tail = satisfies_tail_at(&q.h, kind, pi);
            let verdict =
                check_quadrant_dependence_with(&q.support, a, QuadrantKind::for_tail(kind), opts);
            TailAtPi {
                kind,
                tail,
                agree: tail == verdict.holds(),
                verdict,
            }
        })
        .collect();
    let primary = match classification.kind {
        TailKind::Monotone(_) | TailKind::NoMonotoneTail => {
            checks.iter().find(|c| c.tail).unwrap_or(&checks[0]).kind
        }
        k => k,
    };
    let primary = checks.iter().find(|c| c.kind == primary).unwrap();
    let (verdict, primary_agree) = (primary.verdict.clone(), primary.agree);
    let agree = checks.iter().all(|c| c.agree);
    Ok(DependenceFromTail {
        alpha,
        pi,
        threshold: a,
        classification,
        verdict,
        checks,
        primary_agree,
        agree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(points: &[(f64, f64)]) -> SupportSet {
        SupportSet::new(points.to_vec(), None).unwrap()
    }

    fn eq4(values: &[f64]) -> Discrete {
        Discrete::empirical(values).unwrap()
    }

    #[test]
    fn upper_upper_example() {
        let s = set(&[(1.0, 0.0), (2.0, 0.0), (3.0, 2.0), (4.0, 5.0)]);
        let v = check_quadrant_dependence(&s, (2.0, 0.0), QuadrantKind::UpperUpperComonotone);
        assert_eq!(v.kind, QuadrantKind::UpperUpperComonotone);
        assert_eq!(v.witnesses.designated, vec![2, 3]);
        for mode in [
            Rotation::NegateBoth,
            Rotation::NegateSecond,
            Rotation::NegateFirst,
        ] {
            let r = rotate_support(&s, mode);
            let v =
                check_quadrant_dependence(&r, mode.apply((2.0, 0.0)), mode.image_of_upper_upper());
            assert_eq!(v.kind, mode.image_of_upper_upper());
        }
        let twice = rotate_support(
            &rotate_support(&s, Rotation::NegateBoth),
            Rotation::NegateBoth,
        );
        assert_eq!(twice, s);
    }

    #[test]
    fn upper_lower_example() {
        let s = set(&[(1.0, 0.0), (2.0, 3.0), (8.0, -2.0), (12.0, -5.0)]);
        let v = check_quadrant_dependence(&s, (2.0, 3.0), QuadrantKind::UpperLowerCounter);
        assert_eq!(v.witnesses.designated, vec![2, 3]);
        assert!(v.flags.quadrant_monotone && v.flags.mass_beyond);
        // (1, 0) lies in the open bottom-left quadrant, outside BR ∪ closed TL
        assert_eq!(v.witnesses.forbidden, vec![0]);
        assert_eq!(v.kind, QuadrantKind::None);
        let v = check_quadrant_dependence(&s, (1.0, 0.0), QuadrantKind::UpperLowerCounter);
        assert_eq!(v.kind, QuadrantKind::None);
        let s = set(&[(1.0, 4.0), (2.0, 3.0), (8.0, -2.0), (12.0, -5.0)]);
        let v = check_quadrant_dependence(&s, (2.0, 3.0), QuadrantKind::UpperLowerCounter);
        assert_eq!(v.kind, QuadrantKind::UpperLowerCounter);
    }

    #[test]
    fn flat_second_coordinate() {
        let s = set(&[(1.0, 0.0), (2.0, 0.0), (3.0, 0.0)]);
        let v = check_quadrant_dependence(&s, (2.0, 0.0), QuadrantKind::UpperUpperComonotone);
        assert!(v.flags.quadrant_monotone);
        assert!(!v.flags.mass_beyond);
        assert!(!v.flags.forbidden_empty);
        assert_eq!(v.kind, QuadrantKind::None);
    }

    #[test]
    fn lower_lower_readings_differ() {
        // a point in BR is allowed only by the printed condition
        let s = set(&[(0.0, 0.0), (3.0, -1.0), (4.0, 4.0)]);
        let a = (2.0, 2.0);
        let rotated = check_quadrant_dependence(&s, a, QuadrantKind::LowerLowerComonotone);
        let literal = check_quadrant_dependence_with(
            &s,
            a,
            QuadrantKind::LowerLowerComonotone,
            QuadrantOptions { strict_paper: true },
        );
        assert_eq!(rotated.kind, QuadrantKind::None);
        assert!(!literal.flags.forbidden_empty);
        let s = set(&[(0.0, 0.0), (1.0, 1.0), (4.0, 4.0)]);
        assert_eq!(
            check_quadrant_dependence(&s, a, QuadrantKind::LowerLowerComonotone).kind,
            QuadrantKind::LowerLowerComonotone
        );
    }

    #[test]
    fn rotation_images() {
        for k in QuadrantKind::ALL {
            for r in [
                Rotation::NegateBoth,
                Rotation::NegateSecond,
                Rotation::NegateFirst,
            ] {
                assert_eq!(r.image(r.image(k)), k);
            }
            assert_eq!(QuadrantKind::parse(k.as_str()), Some(k));
        }
        assert_eq!(
            Rotation::NegateSecond.image(QuadrantKind::UpperUpperComonotone),
            QuadrantKind::UpperLowerCounter
        );
    }

    #[test]
    fn difference_examples() {
        let r = dependence_from_tail(
            &eq4(&[1.0, 2.0, 5.0, 9.0]),
            &eq4(&[1.0, 2.0, 3.0, 4.0]),
            0.0,
            0.5,
        )
        .unwrap();
        assert_eq!(r.threshold, (2.0, 0.0));
        assert_eq!(r.verdict.kind, QuadrantKind::UpperUpperComonotone);
        assert!(r.primary_agree);
        // h is flat below π, so π is also a non-decreasing lower split point,
        // yet no support point lies strictly below a
        let ll = &r.checks[2];
        assert!(ll.tail && !ll.verdict.flags.mass_beyond);
        assert!(!r.agree);
        let r = dependence_from_tail(
            &eq4(&[1.0, 5.0, 6.0, 7.0]),
            &eq4(&[1.0, 2.0, 8.0, 12.0]),
            1.0,
            0.5,
        )
        .unwrap();
        assert_eq!(r.classification.kind, TailKind::NonIncreasingUpper);
        assert_eq!(r.verdict.kind, QuadrantKind::UpperLowerCounter);
        assert!(r.agree);
        let same = eq4(&[1.0, 2.0, 3.0]);
        assert!(matches!(
            dependence_from_tail(&same, &same, 0.5, 0.5),
            Err(Error::DegenerateDifference)
        ));
    }

    #[test]
    fn flat_hedger_hides_an_increase() {
        // X₂ is flat on (0, 1/2) while X₁ rises, so h goes 0, 1, −8
        let d1 = eq4(&[0.0, 1.0, 2.0, 2.0]);
        let d2 = Discrete::new(&[(0.0, 0.5), (10.0, 0.5)]).unwrap();
        let r = dependence_from_tail(&d1, &d2, 0.0, 0.25).unwrap();
        assert_eq!(r.threshold, (0.0, 0.0));
        let ul = &r.checks[1];
        assert_eq!(ul.kind, TailKind::NonIncreasingUpper);
        assert_eq!(ul.verdict.kind, QuadrantKind::UpperLowerCounter);
        assert!(!ul.tail);
    }
}
