//! Reproducible random instances. Instance `i` of a generator depends only
//! on the seed and `i`.

use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::mc::block_rng;
use crate::distributions::{Discrete, Distribution};
use crate::ext::{ratio, ExtReal};
use crate::payoffs::PayoffSpec;
use crate::tail_functions::{Form, KnotRule, PiecewiseFunction, Reflection};

const DISCRETE: u64 = 0x6469_7363;
const FUNCTION: u64 = 0x6675_6e63;
const PAIR: u64 = 0x7061_6972;

#[derive(Debug, Clone, PartialEq)]
pub struct RandomCorpusConfig {
    pub seed: u64,
    pub count: usize,
    /// Inclusive bounds on the number of atoms.
    pub atoms: (usize, usize),
    /// Inclusive bounds on the number of pieces.
    pub segments: (usize, usize),
    /// Functions live on `[-half_width, half_width]`, atoms inside it.
    pub half_width: f64,
}

impl Default for RandomCorpusConfig {
    fn default() -> Self {
        RandomCorpusConfig {
            seed: 42,
            count: 100,
            atoms: (1, 12),
            segments: (1, 5),
            half_width: 8.0,
        }
    }
}

impl RandomCorpusConfig {
    fn rng(&self, tag: u64, i: usize) -> ChaCha8Rng {
        block_rng(self.seed ^ tag.rotate_left(17), i as u64)
    }
}

/// A multiple of `1/4` in `[lo, hi]`.
fn quarter(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let a = (lo * 4.0).ceil() as i64;
    let b = (hi * 4.0).floor() as i64;
    rng.random_range(a..=b) as f64 / 4.0
}

fn random_discrete(
    rng: &mut ChaCha8Rng,
    cfg: &RandomCorpusConfig,
    lo: f64,
    hi: f64,
) -> Distribution {
    let k = rng.random_range(cfg.atoms.0.max(1)..=cfg.atoms.1.max(1));
    let mut values: Vec<f64> = Vec::with_capacity(k);
    while values.len() < k {
        let x = quarter(rng, lo, hi);
        if !values.contains(&x) {
            values.push(x);
        }
    }
    let weights: Vec<i64> = (0..k).map(|_| rng.random_range(1..=6)).collect();
    let total: i64 = weights.iter().sum();
    let atoms: Vec<(f64, BigRational)> = values
        .into_iter()
        .zip(weights)
        .map(|(x, w)| (x, ratio(w, total)))
        .collect();
    Distribution::Discrete(Discrete::from_exact(atoms).expect("generated atoms are valid"))
}

/// Discrete laws with dyadic atoms and exact rational masses.
pub fn gen_discrete(cfg: &RandomCorpusConfig) -> Vec<Distribution> {
    let w = cfg.half_width;
    (0..cfg.count)
        .map(|i| random_discrete(&mut cfg.rng(DISCRETE, i), cfg, -w, w))
        .collect()
}

/// Pairs of discrete laws, read as the marginals of a comonotonic vector.
/// Half of the pairs share their probability grid.
pub fn gen_comonotone_pair(cfg: &RandomCorpusConfig) -> Vec<(Distribution, Distribution)> {
    let w = cfg.half_width;
    (0..cfg.count)
        .map(|i| {
            let mut rng = cfg.rng(PAIR, i);
            let a = random_discrete(&mut rng, cfg, -w, w);
            let b = if rng.random_bool(0.5) {
                let d = a.as_discrete().unwrap();
                let mut values: Vec<f64> = Vec::with_capacity(d.len());
                while values.len() < d.len() {
                    let x = quarter(&mut rng, -w, w);
                    if !values.contains(&x) {
                        values.push(x);
                    }
                }
                values.sort_by(f64::total_cmp);
                let atoms = values
                    .into_iter()
                    .zip(d.exact_probs().iter().cloned())
                    .collect();
                Distribution::Discrete(Discrete::from_exact(atoms).unwrap())
            } else {
                random_discrete(&mut rng, cfg, -w, w)
            };
            (a, b)
        })
        .collect()
}

const SLOPES: [f64; 7] = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0];
const RISING: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

struct Draft {
    knots: Vec<f64>,
    forms: Vec<Form>,
    rules: Vec<KnotRule>,
}

impl Draft {
    fn build(self) -> PiecewiseFunction {
        let n = self.forms.len();
        let mut b = PiecewiseFunction::builder(ExtReal::Finite(self.knots[0]), true);
        for (i, form) in self.forms.into_iter().enumerate() {
            b = b.piece(form, ExtReal::Finite(self.knots[i + 1]));
            if i + 1 < n {
                b = b.at_knot(self.rules[i]);
            }
        }
        b.build(true).expect("generated function is valid")
    }
}

fn knot_rule(rng: &mut ChaCha8Rng, left: f64, right: f64) -> KnotRule {
    if left == right {
        return KnotRule::Continuous;
    }
    match rng.random_range(0..20) {
        0..=8 => KnotRule::FromLeft,
        9..=17 => KnotRule::FromRight,
        _ => KnotRule::Value(0.5 * (left + right)),
    }
}

fn affine_from(start: f64, slope: f64, at: f64) -> Form {
    Form::affine(slope, start - slope * at)
}

/// One random function. Mode 0 is unconstrained; the other modes build a
/// non-decreasing upper tail (possibly the whole domain) and reflect it
/// into one of the four classes.
fn random_function(rng: &mut ChaCha8Rng, cfg: &RandomCorpusConfig) -> PiecewiseFunction {
    let w = cfg.half_width;
    let s = rng.random_range(cfg.segments.0.max(1)..=cfg.segments.1.max(1));
    let mut interior: Vec<f64> = Vec::new();
    let slots = (4.0 * w) as i64 - 1;
    while interior.len() + 1 < s {
        let x = (rng.random_range(1..=slots) as f64) / 2.0 - w;
        if !interior.contains(&x) {
            interior.push(x);
        }
    }
    interior.sort_by(f64::total_cmp);
    let mut knots = vec![-w];
    knots.extend(interior);
    knots.push(w);

    let mode = rng.random_range(0..4);
    let split = if mode == 0 { s } else { rng.random_range(0..s) };
    let level = quarter(rng, -2.0, 2.0);
    let mut forms = Vec::with_capacity(s);
    let mut rules = Vec::with_capacity(s);
    let mut prev_end: Option<f64> = None;
    let mut prev_exact = true;
    for i in 0..s {
        let (a, b) = (knots[i], knots[i + 1]);
        let len = b - a;
        let tail = mode != 0 && i >= split;
        let form = if mode == 0 {
            let start = match prev_end {
                Some(e) if prev_exact && rng.random_bool(0.6) => e,
                _ => quarter(rng, -4.0, 4.0),
            };
            affine_from(start, SLOPES[rng.random_range(0..SLOPES.len())], a)
        } else if !tail {
            let start = match prev_end {
                Some(e) if prev_exact && e <= level && rng.random_bool(0.6) => e,
                _ => quarter(rng, -4.0, level),
            };
            let mut slope = SLOPES[rng.random_range(0..SLOPES.len())];
            let end = start + slope * len;
            if end > level || end < -4.0 - 2.0 * w {
                slope = 0.0;
            }
            affine_from(start, slope, a)
        } else {
            let floor = prev_end.filter(|_| i > split).unwrap_or(level);
            let keep = i > split && prev_exact && rng.random_bool(0.5);
            let start = if keep {
                floor
            } else if i == split && rng.random_bool(0.3) {
                level
            } else {
                (floor * 4.0).ceil() / 4.0 + quarter(rng, 0.0, 1.5)
            };
            if !keep && rng.random_bool(0.15) {
                let scale = [0.5, 1.0][rng.random_range(0..2)];
                let rate = [0.25, 0.5][rng.random_range(0..2)];
                Form::exp_affine(scale, rate, start - scale * (rate * a).exp())
            } else {
                affine_from(start, RISING[rng.random_range(0..RISING.len())], a)
            }
        };
        if i > 0 {
            let left = prev_end.unwrap();
            let right = form.eval(a);
            rules.push(knot_rule(rng, left, right));
        }
        prev_exact = matches!(form, Form::Affine { .. } | Form::Constant { .. });
        prev_end = Some(form.eval(b));
        forms.push(form);
    }
    let f = Draft {
        knots,
        forms,
        rules,
    }
    .build();
    if mode == 0 {
        return f;
    }
    match rng.random_range(0..4) {
        0 => f,
        1 => f.reflect(Reflection::NegateValue),
        2 => f.reflect(Reflection::NegateArgument),
        _ => f.reflect(Reflection::NegateBoth),
    }
}

/// Piecewise functions on `[-half_width, half_width]` covering jumps with
/// either continuity side, flat pieces, all four tail classes, monotone
/// functions and functions without a monotone tail.
pub fn gen_piecewise(cfg: &RandomCorpusConfig) -> Vec<PiecewiseFunction> {
    (0..cfg.count)
        .map(|i| random_function(&mut cfg.rng(FUNCTION, i), cfg))
        .collect()
}

/// `x` on `[0,1]`, `2 − x` on `(1,2]`, `2(x − 2)` on `(2,3]`: with `X`
/// uniform on `{0,1,2,3}` the transformed left quantile at `π = 3/4` is
/// not `h(F⁻¹(π))`.
pub fn counterexample() -> PiecewiseFunction {
    PiecewiseFunction::builder(ExtReal::Finite(0.0), true)
        .piece(Form::identity(), ExtReal::Finite(1.0))
        .piece(Form::affine(-1.0, 2.0), ExtReal::Finite(2.0))
        .piece(Form::affine(2.0, -4.0), ExtReal::Finite(3.0))
        .build(true)
        .expect("valid")
}

/// Named fixed members of the corpus.
pub fn pinned_functions() -> Vec<(String, PiecewiseFunction)> {
    let mut out = vec![("counterexample".to_string(), counterexample())];
    let specs = [
        PayoffSpec::Straddle { k: 10.0 },
        PayoffSpec::Strangle {
            k_put: 5.0,
            k_call: 8.0,
        },
        PayoffSpec::BackSpreadCalls { k1: 5.0, k2: 8.0 },
        PayoffSpec::BackSpreadPuts { k1: 5.0, k2: 8.0 },
        PayoffSpec::ShortStraddle { k: 10.0 },
        PayoffSpec::ShortStrangle {
            k_put: 5.0,
            k_call: 8.0,
        },
        PayoffSpec::Endowment {
            s1: 100.0,
            s2: 150.0,
            n: 10.0,
            v: 0.96,
        },
        PayoffSpec::Endowment {
            s1: 50.0,
            s2: 150.0,
            n: 10.0,
            v: 0.96,
        },
    ];
    for s in specs {
        out.push((s.name().to_string(), s.function().expect("valid payoff")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tail_functions::{classify_tail, TailKind};

    #[test]
    fn deterministic() {
        let cfg = RandomCorpusConfig {
            count: 10,
            ..Default::default()
        };
        assert_eq!(gen_discrete(&cfg), gen_discrete(&cfg));
        assert_eq!(gen_piecewise(&cfg), gen_piecewise(&cfg));
        assert_eq!(gen_comonotone_pair(&cfg), gen_comonotone_pair(&cfg));
        let other = RandomCorpusConfig {
            seed: 43,
            ..cfg.clone()
        };
        assert_ne!(gen_discrete(&cfg), gen_discrete(&other));
    }

    #[test]
    fn census_covers_every_class() {
        let cfg = RandomCorpusConfig {
            count: 400,
            ..Default::default()
        };
        let fs = gen_piecewise(&cfg);
        let mut seen = std::collections::HashSet::new();
        let (mut lc_only, mut rc_only, mut neither) = (0, 0, 0);
        for f in &fs {
            let c = classify_tail(f);
            seen.insert(match c.kind {
                TailKind::Monotone(_) => "monotone",
                k => k.as_str(),
            });
            match (f.is_left_continuous(), f.is_right_continuous()) {
                (true, false) => lc_only += 1,
                (false, true) => rc_only += 1,
                (false, false) => neither += 1,
                _ => {}
            }
        }
        for k in TailKind::TAIL_KINDS {
            assert!(seen.contains(k.as_str()), "missing {}", k.as_str());
        }
        assert!(seen.contains("monotone"));
        assert!(seen.contains("no_monotone_tail"));
        assert!(lc_only > 0 && rc_only > 0 && neither > 0);
    }
}
