//! Adaptive Gauss–Legendre quadrature for quantile integrals.

use crate::error::{Error, Result};
use std::ops::Add;

const NODES: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const WEIGHTS: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_3,
    0.219_086_362_515_982,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_1,
];

const MAX_DEPTH: u32 = 40;

/// Value of a definite integral with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

impl Integral {
    pub const ZERO: Integral = Integral {
        value: 0.0,
        error: 0.0,
    };
}

impl std::ops::Add for Integral {
    type Output = Integral;

    fn add(self, other: Integral) -> Integral {
        Integral {
            value: self.value + other.value,
            error: self.error + other.error,
        }
    }
}

fn gl10<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut s = 0.0;
    for (x, w) in NODES.iter().zip(WEIGHTS.iter()) {
        s += w * (f(mid - half * x) + f(mid + half * x));
    }
    s * half
}

fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> Integral {
    let m = 0.5 * (a + b);
    let left = gl10(f, a, m);
    let right = gl10(f, m, b);
    let diff = (left + right - whole).abs();
    if diff <= tol.max(4.0 * f64::EPSILON * (left + right).abs())
        || depth >= MAX_DEPTH
        || m <= a
        || m >= b
    {
        return Integral {
            value: left + right,
            error: diff,
        };
    }
    recurse(f, a, m, left, 0.5 * tol, depth + 1).add(recurse(f, m, b, right, 0.5 * tol, depth + 1))
}

/// Adaptive composite 10-point Gauss–Legendre on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_gauss_legendre<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Integral {
    if b <= a {
        return Integral::ZERO;
    }
    let whole = gl10(f, a, b);
    recurse(f, a, b, whole, tol, 0)
}

/// Integral of `g` over `[a, b]` with `0 < a`, split at powers of ten so
/// that integrands varying on a logarithmic scale stay well resolved.
pub fn integrate_decades<F: Fn(f64) -> f64>(g: &F, a: f64, b: f64, tol: f64) -> Integral {
    if b <= a {
        return Integral::ZERO;
    }
    let mut edges = vec![b];
    let mut k = b.log10().floor();
    loop {
        let e = 10f64.powf(k);
        if e <= a {
            break;
        }
        if e < b {
            edges.push(e);
        }
        k -= 1.0;
    }
    edges.push(a);
    let pieces = (edges.len() - 1) as f64;
    let mut total = Integral::ZERO;
    for w in edges.windows(2) {
        total = total.add(adaptive_gauss_legendre(g, w[1], w[0], tol / pieces));
    }
    total
}

/// Integral of `g` over `(0, s_hi]` where `g` may be unbounded at 0.
///
/// `[cut, s_hi]` is integrated by decades. The remainder `(0, cut)` is
/// extrapolated from the next two decades as a geometric series; the
/// integral is declared divergent when those decades do not shrink.
pub fn integrate_to_zero<F: Fn(f64) -> f64>(
    g: &F,
    s_hi: f64,
    cut: f64,
    tol: f64,
) -> Result<Integral> {
    let mut total = Integral::ZERO;
    let mut hi = s_hi;
    if hi > cut {
        total = integrate_decades(g, cut, hi, 0.5 * tol);
        hi = cut;
    }
    let d1 = adaptive_gauss_legendre(g, hi / 10.0, hi, tol * 1e-3);
    let d2 = adaptive_gauss_legendre(g, hi / 100.0, hi / 10.0, tol * 1e-3);
    if !d1.value.is_finite() || !d2.value.is_finite() {
        return Err(Error::DivergentIntegral(
            "non-finite integrand near the boundary".into(),
        ));
    }
    let rest = if d1.value == 0.0 {
        if d2.value != 0.0 {
            return Err(Error::DivergentIntegral(
                "tail contributions do not shrink".into(),
            ));
        }
        0.0
    } else {
        let r = d2.value / d1.value;
        if r.abs() >= 0.99 {
            return Err(Error::DivergentIntegral(format!(
                "decade contributions grow by a factor {r:.3} near the boundary"
            )));
        }
        d2.value * r / (1.0 - r)
    };
    Ok(total.add(Integral {
        value: d1.value + d2.value + rest,
        error: d1.error + d2.error + rest.abs(),
    }))
}
