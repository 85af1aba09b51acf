//! Plain numerical references, deliberately naive.

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Midpoint-rule average of `g` over `[a, b]` with `n` cells.
pub fn midpoint_mean<G: Fn(f64) -> f64>(g: G, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    (0..n).map(|i| g(a + (i as f64 + 0.5) * h)).sum::<f64>() / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola() {
        let (x, y) = golden_section_max(|x| 1.0 - (x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-8);
        assert!((y - 1.0).abs() < 1e-15);
        assert!((midpoint_mean(|x| x, 0.0, 2.0, 1000) - 1.0).abs() < 1e-12);
    }
}
