//! Entire helper functions and the chirp transforms.

use crate::cvec::{cr, C64, I};
use std::f64::consts::{FRAC_PI_4, PI};

/// (e^z − 1)/z, entire.
pub fn exprel(z: C64) -> C64 {
    if z.norm() < 1.0 {
        let mut term = cr(1.0);
        let mut sum = cr(1.0);
        for k in 2..30 {
            term = term * z / k as f64;
            sum += term;
        }
        sum
    } else {
        (z.exp() - 1.0) / z
    }
}

/// ∫₀¹ u e^{zu} du, the derivative of `exprel`.
pub fn exprel_d1(z: C64) -> C64 {
    if z.norm() < 1.0 {
        let mut pow = cr(1.0);
        let mut fact = 1.0;
        let mut sum = cr(0.5);
        for k in 1..30 {
            pow *= z;
            fact *= k as f64;
            sum += pow / (fact * (k as f64 + 2.0));
        }
        sum
    } else {
        (z.exp() * (z - 1.0) + 1.0) / (z * z)
    }
}

/// ∫₀ˢ e^{μτ} dτ (oriented for negative s).
pub fn exp_integral(mu: C64, s: f64) -> C64 {
    exprel(mu * s) * s
}

/// ∫₀ˢ τ e^{μτ} dτ.
pub fn exp_moment(mu: C64, s: f64) -> C64 {
    exprel_d1(mu * s) * (s * s)
}

/// Faddeeva function w(z) = e^{−z²} erfc(−iz).
pub fn faddeeva(z: C64) -> C64 {
    errorfunctions::w_with_relerror(z, 0.0)
}

/// Entire extension of ∫₀^∞ e^{−λt} e^{it²} dt.
pub fn chirp_laplace(lambda: C64) -> C64 {
    let rot = C64::from_polar(1.0, FRAC_PI_4);
    let z = C64::from_polar(1.0, 3.0 * FRAC_PI_4) * lambda * 0.5;
    rot * (PI.sqrt() * 0.5) * faddeeva(z)
}

/// ∫₀ˢ e^{−λt} e^{it²} dt for any real s.
pub fn chirp_partial(lambda: C64, s: f64) -> C64 {
    if s == 0.0 {
        return cr(0.0);
    }
    let shifted = lambda - I * (2.0 * s);
    let phase = I * (s * s) - lambda * s;
    chirp_laplace(lambda) - phase.exp() * chirp_laplace(shifted)
}

/// Fourier transform of e^{it²}: √π e^{iπ/4} e^{−iξ²/4}.
pub fn chirp_fourier(xi: f64) -> C64 {
    C64::from_polar(PI.sqrt(), FRAC_PI_4 - xi * xi / 4.0)
}

/// Value of the removable expression `f` at `z0`, averaging over a circle when z0 is near 0.
/// `scale` is the length scale L of the expression (its singular terms look like 1/(zL)).
pub fn removable<F: FnMut(C64) -> T, T: RemovableValue>(z0: C64, scale: f64, mut f: F) -> T {
    let l = scale.abs().max(1e-300);
    if z0.norm() * l >= 0.25 {
        return f(z0);
    }
    let r = 0.5 / l;
    let n = 16;
    let mut acc: Option<T> = None;
    for j in 0..n {
        let th = 2.0 * PI * (j as f64 + 0.5) / n as f64;
        let v = f(z0 + C64::from_polar(r, th));
        acc = Some(match acc {
            None => v,
            Some(a) => a.sum(v),
        });
    }
    acc.unwrap().div(n as f64)
}

pub trait RemovableValue {
    fn sum(self, o: Self) -> Self;
    fn div(self, n: f64) -> Self;
}

impl RemovableValue for C64 {
    fn sum(self, o: Self) -> Self {
        self + o
    }
    fn div(self, n: f64) -> Self {
        self / n
    }
}
