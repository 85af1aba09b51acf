use std::sync::Arc;

use montail::distributions::StandardNormal;
use montail::reducers::difference_var;
use montail::{classify_levy_case, classify_tail, comonotonic_difference, LevyCase, RiskMeasure};
use proptest::prelude::*;

fn scales() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (-1.0f64..1.0, 0.05f64..1.0, -1.0f64..1.0, 0.05f64..1.0)
        .prop_filter("distinct scales", |(_, s1, _, s2)| (s1 - s2).abs() > 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn extremal_value_bounds_the_difference((m1, s1, m2, s2) in scales(), u in 0.0001f64..0.9999) {
        let a = classify_levy_case(m1, s1, m2, s2, Arc::new(StandardNormal)).unwrap();
        let y = a.y_star.unwrap();
        let h = a.h(u);
        let slack = 1e-12 * (1.0 + y.abs());
        match a.case {
            LevyCase::Sigma1Gt => prop_assert!(h >= y - slack),
            LevyCase::Sigma2Gt => prop_assert!(h <= y + slack),
            _ => unreachable!(),
        }
        prop_assert!(a.sign_pattern_ok);
    }

    #[test]
    fn piecewise_threshold_is_the_crossing_level((m1, s1, m2, s2) in scales()) {
        let a = classify_levy_case(m1, s1, m2, s2, Arc::new(StandardNormal)).unwrap();
        // levels that round to 0 or 1 leave a monotone shape in double precision
        prop_assume!(a.c_star < 1.0 - 1e-9 && a.u_star.unwrap() > 1e-290);
        let c = classify_tail(&a.quantile_difference_function().unwrap());
        prop_assert_eq!(c.kind, a.tail_kind);
        prop_assert!((c.threshold.to_f64() - a.c_star).abs() < 1e-9);
    }

    #[test]
    fn var_of_difference_splits_inside_the_interval((m1, s1, m2, s2) in scales(), t in 0.0f64..1.0) {
        let a = classify_levy_case(m1, s1, m2, s2, Arc::new(StandardNormal)).unwrap();
        let (lo, hi) = a.valid_interval(RiskMeasure::VaR);
        let p = (lo + (hi - lo) * t).clamp(1e-6, 1.0 - 1e-6);
        prop_assume!(p > lo && p < hi);
        let diff = comonotonic_difference(&a.liability(), &a.hedger()).unwrap();
        let (z, _) = difference_var(&diff, p).unwrap();
        let expected = if a.case == LevyCase::Sigma1Gt {
            a.liability().var(p).unwrap() - a.hedger().var(p).unwrap()
        } else {
            a.liability().var(1.0 - p).unwrap() - a.hedger().var(1.0 - p).unwrap()
        };
        prop_assert!((z - expected).abs() <= 1e-9 * (1.0 + expected.abs()), "{} vs {}", z, expected);
    }
}
