use montail::ext::rational_to_f64;
use montail::oracle::corpus::{
    gen_comonotone_pair, gen_discrete, gen_piecewise, RandomCorpusConfig,
};
use montail::oracle::{oracle_quantile, pushforward};
use montail::quadrant_dependence::{
    check_quadrant_dependence, dependence_from_tail, rotate_support, QuadrantKind,
    QuantileDifferenceSupport, Rotation,
};
use montail::quantile_transform::transform_quantile_with;
use montail::tail_functions::{build_h_tilde, Reflection};
use montail::{classify_tail, Direction, Distribution, ExtReal, QuantileSide, TailKind};
use proptest::prelude::*;

fn one(seed: u64) -> RandomCorpusConfig {
    RandomCorpusConfig {
        seed,
        count: 1,
        ..RandomCorpusConfig::default()
    }
}

fn function(seed: u64) -> montail::PiecewiseFunction {
    gen_piecewise(&one(seed)).remove(0)
}

fn law(seed: u64) -> Distribution {
    gen_discrete(&one(seed)).remove(0)
}

fn image(kind: TailKind, mode: Reflection) -> TailKind {
    use TailKind::*;
    let (flip_dir, flip_end) = match mode {
        Reflection::NegateValue => (true, false),
        Reflection::NegateArgument => (true, true),
        Reflection::NegateBoth => (false, true),
    };
    let upper = matches!(kind, NonDecreasingUpper | NonIncreasingUpper);
    let dec = matches!(kind, NonDecreasingUpper | NonDecreasingLower);
    match (upper != flip_end, dec != flip_dir) {
        (true, true) => NonDecreasingUpper,
        (true, false) => NonIncreasingUpper,
        (false, true) => NonDecreasingLower,
        (false, false) => NonIncreasingLower,
    }
}

fn negate(x: ExtReal) -> ExtReal {
    match x {
        ExtReal::NegInf => ExtReal::PosInf,
        ExtReal::PosInf => ExtReal::NegInf,
        ExtReal::Finite(v) => ExtReal::Finite(-v),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn reflections_map_tail_classes(seed in any::<u64>()) {
        let f = function(seed);
        let cls = classify_tail(&f);
        for mode in [Reflection::NegateValue, Reflection::NegateArgument, Reflection::NegateBoth] {
            let g = classify_tail(&f.reflect(mode));
            for class in &cls.alternatives {
                let target = image(class.kind, mode);
                let mapped = g.class(target);
                prop_assert!(mapped.is_some(), "{:?} under {:?}", class.kind, mode);
                let expected = if mode == Reflection::NegateValue { class.threshold } else { negate(class.threshold) };
                prop_assert_eq!(mapped.unwrap().threshold, expected);
            }
            prop_assert_eq!(cls.is_monotone(), g.is_monotone());
        }
    }

    #[test]
    fn reflecting_twice_is_the_identity(seed in any::<u64>()) {
        let f = function(seed);
        for mode in [Reflection::NegateValue, Reflection::NegateArgument, Reflection::NegateBoth] {
            prop_assert_eq!(&f.reflect(mode).reflect(mode), &f);
        }
    }

    #[test]
    fn rules_agree_with_the_pushforward(seed in any::<u64>(), p in 0.001f64..0.999, right in any::<bool>()) {
        let f = function(seed);
        let x = law(seed.rotate_left(7));
        let cls = classify_tail(&f);
        let side = if right { QuantileSide::Right } else { QuantileSide::Left };
        if let Ok(r) = transform_quantile_with(&f, &cls, &x, p, side, false) {
            prop_assert_eq!(r.value, oracle_quantile(&f, &x, p, side).unwrap());
        }
    }

    #[test]
    fn fallback_always_answers_with_the_oracle(seed in any::<u64>(), p in 0.001f64..0.999) {
        let f = function(seed);
        let x = law(seed ^ 0x55);
        let cls = classify_tail(&f);
        match transform_quantile_with(&f, &cls, &x, p, QuantileSide::Left, true) {
            Ok(r) => prop_assert_eq!(r.value, oracle_quantile(&f, &x, p, QuantileSide::Left).unwrap()),
            Err(e) => prop_assert!(matches!(e, montail::Error::ContinuityMismatch(_))),
        }
    }

    #[test]
    fn rewrite_is_monotone_and_keeps_the_upper_law(seed in any::<u64>()) {
        let f = function(seed);
        let cls = classify_tail(&f);
        if let Some(class) = cls.class(TailKind::NonDecreasingUpper) {
            let t = build_h_tilde(&f, &cls).unwrap();
            prop_assert!(classify_tail(&t).monotone_in(Direction::NonDecreasing));
            let x = law(seed.wrapping_add(1));
            let h_star = class.boundary_value.to_f64();
            let (a, b) = (pushforward(&f, &x).unwrap(), pushforward(&t, &x).unwrap());
            let (a, b) = (a.as_discrete().unwrap(), b.as_discrete().unwrap());
            for &y in a.values().iter().filter(|&&y| y >= h_star) {
                prop_assert_eq!(a.cdf_exact(y), b.cdf_exact(y));
            }
        }
    }

    #[test]
    fn left_quantile_never_exceeds_right(seed in any::<u64>(), p in 0.0001f64..0.9999) {
        let x = law(seed);
        prop_assert!(x.quantile(p, QuantileSide::Left).unwrap() <= x.quantile(p, QuantileSide::Right).unwrap());
    }

    #[test]
    fn nondecreasing_structures_imply_tails(seed in any::<u64>(), alpha in prop::sample::select(vec![0.0, 0.5, 1.0])) {
        let cfg = RandomCorpusConfig { atoms: (1, 10), ..one(seed) };
        let (a, b) = gen_comonotone_pair(&cfg).remove(0);
        let (d1, d2) = (a.as_discrete().unwrap(), b.as_discrete().unwrap());
        let q = QuantileDifferenceSupport::new(d1, d2, alpha).unwrap();
        prop_assume!(!q.is_degenerate());
        for pi in q.grid.iter().map(rational_to_f64) {
            let r = dependence_from_tail(d1, d2, alpha, pi).unwrap();
            for c in &r.checks {
                if matches!(c.kind, TailKind::NonDecreasingUpper | TailKind::NonDecreasingLower) && c.verdict.holds() {
                    prop_assert!(c.tail, "{:?} at {}", c.kind, pi);
                }
            }
        }
    }

    #[test]
    fn rotations_conjugate_every_structure(seed in any::<u64>(), alpha in prop::sample::select(vec![0.0, 0.5, 1.0])) {
        let cfg = RandomCorpusConfig { atoms: (1, 10), ..one(seed) };
        let (a, b) = gen_comonotone_pair(&cfg).remove(0);
        let q = QuantileDifferenceSupport::new(a.as_discrete().unwrap(), b.as_discrete().unwrap(), alpha).unwrap();
        for pi in q.grid.iter().map(rational_to_f64) {
            let t = q.threshold_point(pi).unwrap();
            for kind in [
                QuadrantKind::UpperUpperComonotone,
                QuadrantKind::LowerLowerComonotone,
                QuadrantKind::UpperLowerCounter,
                QuadrantKind::LowerUpperCounter,
            ] {
                let direct = check_quadrant_dependence(&q.support, t, kind).holds();
                for mode in [Rotation::NegateBoth, Rotation::NegateSecond, Rotation::NegateFirst] {
                    let v = check_quadrant_dependence(&rotate_support(&q.support, mode), mode.apply(t), mode.image(kind));
                    prop_assert_eq!(v.holds(), direct);
                }
            }
        }
    }
}
