use std::fmt::Debug;

use libm::erfc;

/// Zero-mean, unit-variance driver `W` of a location-scale family.
///
/// Implementations must have a continuous, strictly increasing cdf on the
/// whole real line.
pub trait Standardizer: Send + Sync + Debug {
    fn cdf(&self, x: f64) -> f64;

    /// Inverse cdf on `(0, 1)`.
    fn quantile(&self, p: f64) -> f64;

    /// `quantile(1 - s)` for small `s`. Override when the upper tail can be
    /// evaluated without forming `1 - s`.
    fn upper_quantile(&self, s: f64) -> f64 {
        self.quantile(1.0 - s)
    }

    /// `1 - cdf(x)`, override for accuracy in the upper tail.
    fn sf(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }

    fn name(&self) -> &str;
}

/// The standard normal law.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StandardNormal;

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

// rational approximation coefficients for the normal inverse cdf
const A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];
const P_LOW: f64 = 0.02425;

impl StandardNormal {
    fn initial(p: f64) -> f64 {
        if p < P_LOW {
            let q = (-2.0 * p.ln()).sqrt();
            (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
                / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
        } else {
            let q = p - 0.5;
            let r = q * q;
            (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
                / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
        }
    }

    /// Quantile for `p <= 0.5`, refined by one Halley step on the cdf.
    fn lower_half(p: f64) -> f64 {
        let x = Self::initial(p);
        if x == 0.0 {
            return 0.0;
        }
        let e = 0.5 * erfc(-x / SQRT_2) - p;
        let u = e * SQRT_2PI * (0.5 * x * x).exp();
        x - u / (1.0 + 0.5 * x * u)
    }
}

impl Standardizer for StandardNormal {
    fn cdf(&self, x: f64) -> f64 {
        if x == f64::INFINITY {
            return 1.0;
        }
        if x == f64::NEG_INFINITY {
            return 0.0;
        }
        0.5 * erfc(-x / SQRT_2)
    }

    fn sf(&self, x: f64) -> f64 {
        self.cdf(-x)
    }

    fn quantile(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return f64::NEG_INFINITY;
        }
        if p >= 1.0 {
            return f64::INFINITY;
        }
        if p > 0.5 {
            -Self::lower_half(1.0 - p)
        } else {
            Self::lower_half(p)
        }
    }

    fn upper_quantile(&self, s: f64) -> f64 {
        -self.quantile(s)
    }

    fn name(&self) -> &str {
        "normal"
    }
}

/// Looks up a shipped standardizer by name.
pub fn standardizer_by_name(name: &str) -> Option<std::sync::Arc<dyn Standardizer>> {
    match name {
        "normal" | "gaussian" | "standard_normal" => Some(std::sync::Arc::new(StandardNormal)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn known_values() {
        let w = StandardNormal;
        assert_eq!(w.cdf(0.0), 0.5);
        assert_eq!(w.quantile(0.5), 0.0);
        assert_abs_diff_eq!(w.quantile(0.95), 1.644_853_626_951_472_2, epsilon = 1e-13);
        assert_abs_diff_eq!(w.quantile(0.975), 1.959_963_984_540_054, epsilon = 1e-13);
        assert_abs_diff_eq!(w.quantile(1e-10), -6.361_340_902_404_056, epsilon = 1e-11);
        assert_abs_diff_eq!(w.cdf(1.0), 0.841_344_746_068_542_9, epsilon = 1e-15);
    }

    #[test]
    fn round_trip_grid() {
        let w = StandardNormal;
        // above ~4.5 the cdf rounds to within a few ulps of 1
        for i in 0..=1250 {
            let x = -8.0 + i as f64 * 0.01;
            let back = w.quantile(w.cdf(x));
            assert!((back - x).abs() < 1e-10, "x={x} back={back}");
        }
    }

    #[test]
    fn symmetric_upper_tail() {
        let w = StandardNormal;
        assert_eq!(w.upper_quantile(1e-14), -w.quantile(1e-14));
        assert!(w.upper_quantile(1e-14) > 7.0);
    }

    #[test]
    fn strictly_increasing_cdf() {
        let w = StandardNormal;
        let mut prev = w.cdf(-9.0);
        for i in 1..=1400 {
            let c = w.cdf(-9.0 + i as f64 * 0.01);
            assert!(c > prev);
            prev = c;
        }
    }
}
