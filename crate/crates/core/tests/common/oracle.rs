//! Composite Simpson with one Richardson step, on plain point evaluations.

use lapspec::{FunctionDescriptor, C64};

/// Simpson's rule with n (even) panels on [a, b].
pub fn simpson<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, n: usize) -> C64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for j in 1..n {
        let w = if j % 2 == 1 { 4.0 } else { 2.0 };
        s += f(a + j as f64 * h) * w;
    }
    s * (h / 3.0)
}

/// Simpson at n and 2n combined by Richardson, doubling n until successive
/// extrapolants agree to `tol`. Returns (value, last correction).
pub fn simpson_richardson<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, n0: usize, tol: f64) -> (C64, f64) {
    let mut n = n0.max(2);
    let mut coarse = simpson(f, a, b, n);
    let mut prev: Option<C64> = None;
    loop {
        let fine = simpson(f, a, b, 2 * n);
        let extrap = fine + (fine - coarse) / 15.0;
        if let Some(p) = prev {
            let d = (extrap - p).norm();
            if d < tol || n > 1 << 18 {
                return (extrap, d);
            }
        }
        prev = Some(extrap);
        coarse = fine;
        n *= 2;
    }
}

/// ∫₀^∞ e^{−λt}f(t)dt for Re λ > 0 and |f| ≤ bound.
///
/// The interval is cut where bound·e^{−aT}/a < tol/10 and split into unit pieces so
/// the panel width tracks the local frequency |Im λ| + `freq(t)`.
pub fn integrate_half_line<F: Fn(f64) -> C64, W: Fn(f64) -> f64>(f: &F, lambda: C64, bound: f64, freq: &W, tol: f64) -> C64 {
    let a = lambda.re;
    assert!(a > 0.0);
    let t_end = ((bound.max(1e-300) / (a * tol * 0.1)).ln() / a).max(1.0);
    let g = |t: f64| (-lambda * t).exp() * f(t);
    let pieces = t_end.ceil() as usize;
    let mut total = C64::new(0.0, 0.0);
    for j in 0..pieces {
        let lo = j as f64;
        let hi = (lo + 1.0).min(t_end);
        if hi <= lo {
            break;
        }
        let w = lambda.im.abs() + freq(hi) + 1.0;
        let n = ((w * (hi - lo)) * 4.0).ceil() as usize + 8;
        total += simpson_richardson(&g, lo, hi, n, tol * 1e-3 / pieces as f64).0;
    }
    total
}

/// ℒφ(λ) for a scalar descriptor, by [`integrate_half_line`].
pub fn laplace_oracle<F: Fn(f64) -> f64>(phi: &FunctionDescriptor, lambda: C64, bound: f64, freq: F, tol: f64) -> C64 {
    let f = |t: f64| phi.evaluate(t).expect("evaluates").0[0];
    integrate_half_line(&f, lambda, bound, &freq, tol)
}
