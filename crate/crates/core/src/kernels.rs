//! The bump-squared kernel ψ, its dilations/modulations, and inverse filters.
//!
//! ψ = ĝ² with g(u) = a·e^{1/(u²−1)} on (−1, 1); ψ̂ = 2π(g∗g) is supported in [−2, 2].

use crate::cvec::{cr, C64};
use crate::error::{Result, SpectraError};
use crate::quad::{integrate_panels, QuadOptions};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;

pub const EPS_SUPP: f64 = 1e-12;
const TABLE_VERSION: u32 = 1;
const TIME_STEP: f64 = 1.0 / 256.0;
const TIME_MAX: f64 = 160.0;
const FREQ_STEP: f64 = 1.0 / 1024.0;
const BUMP_NODES: usize = 1024;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tables {
    pub version: u32,
    pub bump_a: f64,
    pub time_step: f64,
    pub ghat: Vec<f64>,
    pub dghat: Vec<f64>,
    pub freq_step: f64,
    pub psi_hat: Vec<f64>,
    pub dpsi_hat: Vec<f64>,
    pub eff_support: f64,
}

fn bump_raw(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (1.0 / (u * u - 1.0)).exp()
    }
}

fn bump_raw_d(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        return 0.0;
    }
    let q = u * u - 1.0;
    (1.0 / q).exp() * (-2.0 * u / (q * q))
}

impl Tables {
    pub fn build() -> Tables {
        // trapezoid on a C∞-flat integrand converges faster than any power
        let du = 1.0 / BUMP_NODES as f64;
        let mut i2 = bump_raw(0.0).powi(2);
        for j in 1..BUMP_NODES {
            i2 += 2.0 * bump_raw(j as f64 * du).powi(2);
        }
        i2 *= du;
        let a = 1.0 / (2.0 * PI * i2).sqrt();

        let nt = (TIME_MAX / TIME_STEP).round() as usize + 1;
        let mut ghat = vec![a * bump_raw(0.0) * du; nt];
        let mut dghat = vec![0.0; nt];
        for j in 1..BUMP_NODES {
            let u = j as f64 * du;
            let w = 2.0 * a * bump_raw(u) * du;
            let step = C64::from_polar(1.0, TIME_STEP * u);
            let mut z = cr(1.0);
            for m in 0..nt {
                if m % 512 == 0 {
                    z = C64::from_polar(1.0, m as f64 * TIME_STEP * u);
                }
                ghat[m] += w * z.re;
                dghat[m] -= w * u * z.im;
                z *= step;
            }
        }

        let nf = (2.0 / FREQ_STEP).round() as usize + 1;
        let mut psi_hat = vec![0.0; nf];
        let mut dpsi_hat = vec![0.0; nf];
        let m = 2048;
        for (k, (ph, dph)) in psi_hat.iter_mut().zip(dpsi_hat.iter_mut()).enumerate() {
            let s = k as f64 * FREQ_STEP;
            let lo = s - 1.0;
            let h = (1.0 - lo) / m as f64;
            if h <= 0.0 {
                continue;
            }
            let (mut v, mut d) = (0.0, 0.0);
            for i in 1..m {
                let u = lo + i as f64 * h;
                let gu = bump_raw(u);
                v += gu * bump_raw(s - u);
                d += gu * bump_raw_d(s - u);
            }
            *ph = 2.0 * PI * a * a * v * h;
            *dph = 2.0 * PI * a * a * d * h;
        }

        let mut t = Tables {
            version: TABLE_VERSION,
            bump_a: a,
            time_step: TIME_STEP,
            ghat,
            dghat,
            freq_step: FREQ_STEP,
            psi_hat,
            dpsi_hat,
            eff_support: TIME_MAX,
        };
        let mut last = 0.0;
        for (m, g) in t.ghat.iter().enumerate() {
            if g * g >= EPS_SUPP {
                last = m as f64 * TIME_STEP;
            }
        }
        t.eff_support = last + TIME_STEP;
        t
    }

    fn load_or_build() -> Tables {
        let Ok(path) = std::env::var("SPECTRA_KERNEL_CACHE") else {
            return Tables::build();
        };
        if let Ok(text) = std::fs::read_to_string(&path) {
            if let Ok(t) = serde_json::from_str::<Tables>(&text) {
                if t.version == TABLE_VERSION
                    && t.time_step == TIME_STEP
                    && t.freq_step == FREQ_STEP
                {
                    return t;
                }
            }
        }
        let t = Tables::build();
        if let Ok(s) = serde_json::to_string(&t) {
            let _ = std::fs::write(&path, s);
        }
        t
    }

    fn ghat_at(&self, t: f64) -> f64 {
        let x = t.abs();
        let pos = x / self.time_step;
        let i = pos.floor() as usize;
        if i + 1 >= self.ghat.len() {
            return 0.0;
        }
        hermite(
            pos - i as f64,
            self.time_step,
            self.ghat[i],
            self.ghat[i + 1],
            self.dghat[i],
            self.dghat[i + 1],
        )
    }

    /// (ψ̂(s), ψ̂'(s)).
    fn psi_hat_at(&self, s: f64) -> (f64, f64) {
        let x = s.abs();
        if x >= 2.0 {
            return (0.0, 0.0);
        }
        let pos = x / self.freq_step;
        let i = (pos.floor() as usize).min(self.psi_hat.len() - 2);
        let u = pos - i as f64;
        let h = self.freq_step;
        let (p0, p1, d0, d1) = (
            self.psi_hat[i],
            self.psi_hat[i + 1],
            self.dpsi_hat[i],
            self.dpsi_hat[i + 1],
        );
        let v = hermite(u, h, p0, p1, d0, d1).max(0.0);
        let d = hermite_d(u, h, p0, p1, d0, d1);
        if s < 0.0 {
            (v, -d)
        } else {
            (v, d)
        }
    }
}

fn hermite(u: f64, h: f64, p0: f64, p1: f64, d0: f64, d1: f64) -> f64 {
    let u2 = u * u;
    let u3 = u2 * u;
    (2.0 * u3 - 3.0 * u2 + 1.0) * p0
        + (u3 - 2.0 * u2 + u) * h * d0
        + (-2.0 * u3 + 3.0 * u2) * p1
        + (u3 - u2) * h * d1
}

fn hermite_d(u: f64, h: f64, p0: f64, p1: f64, d0: f64, d1: f64) -> f64 {
    let u2 = u * u;
    ((6.0 * u2 - 6.0 * u) * p0 + (-6.0 * u2 + 6.0 * u) * p1) / h
        + (3.0 * u2 - 4.0 * u + 1.0) * d0
        + (3.0 * u2 - 2.0 * u) * d1
}

pub fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(Tables::load_or_build)
}

/// ψ(t).
pub fn psi(t: f64) -> f64 {
    let g = tables().ghat_at(t);
    g * g
}

/// ψ̂(s).
pub fn psi_hat(s: f64) -> f64 {
    tables().psi_hat_at(s).0
}

/// ψ̂'(s).
pub fn psi_hat_d(s: f64) -> f64 {
    tables().psi_hat_at(s).1
}

/// |t| beyond which ψ(t) < ε_supp.
pub fn psi_support() -> f64 {
    tables().eff_support
}

/// Smooth step: 0 for x ≤ 0, 1 for x ≥ 1.
fn smooth_step(x: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 0.0);
    }
    if x >= 1.0 {
        return (1.0, 0.0);
    }
    let h = |y: f64| (-1.0 / y).exp();
    let dh = |y: f64| (-1.0 / y).exp() / (y * y);
    let (a, b) = (h(x), h(1.0 - x));
    let (da, db) = (dh(x), -dh(1.0 - x));
    let v = a / (a + b);
    let d = (da * (a + b) - a * (da + db)) / ((a + b) * (a + b));
    (v, d)
}

/// A filter with compactly supported Fourier transform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Kernel {
    Psi,
    ApproxIdentity {
        n: f64,
    },
    BandPass {
        omega: f64,
        eps: f64,
    },
    /// ĝ = χ/b̂ with χ = 1 on [lo, hi] and 0 outside [lo − margin, hi + margin].
    Inverse {
        base: Box<Kernel>,
        lo: f64,
        hi: f64,
        margin: f64,
        time_support: f64,
        sup: f64,
        l1: f64,
    },
}

impl Kernel {
    /// (center Ω, dilation n) for the ψ family: k(t) = e^{iΩt} n ψ(nt).
    fn psi_params(&self) -> Option<(f64, f64)> {
        match self {
            Kernel::Psi => Some((0.0, 1.0)),
            Kernel::ApproxIdentity { n } => Some((0.0, *n)),
            Kernel::BandPass { omega, eps } => Some((*omega, eps / 2.0)),
            Kernel::Inverse { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Kernel::Psi => Ok(()),
            Kernel::ApproxIdentity { n } if *n > 0.0 && n.is_finite() => Ok(()),
            Kernel::BandPass { omega, eps } if *eps > 0.0 && eps.is_finite() && omega.is_finite() => {
                Ok(())
            }
            Kernel::Inverse { base, lo, hi, margin, .. } if lo <= hi && *margin > 0.0 => {
                base.validate()
            }
            _ => Err(SpectraError::InvalidKernel(format!("{self:?}"))),
        }
    }

    pub fn time(&self, t: f64) -> C64 {
        match self.psi_params() {
            Some((om, n)) => C64::from_polar(n * psi(n * t), om * t),
            None => {
                let (lo, hi) = self.freq_support();
                let panel = (2.0 * PI / t.abs().max(1.0)).min(hi - lo);
                let o = QuadOptions::tol(1e-13, 1e-10);
                let r = integrate_panels(
                    |xi: f64| self.freq(xi) * C64::from_polar(1.0, xi * t),
                    lo,
                    hi,
                    panel,
                    &o,
                );
                r.value / (2.0 * PI)
            }
        }
    }

    pub fn freq(&self, xi: f64) -> C64 {
        match self.psi_params() {
            Some((om, n)) => cr(psi_hat((xi - om) / n)),
            None => self.inverse_freq(xi).0,
        }
    }

    /// Derivative of the Fourier transform.
    pub fn freq_d(&self, xi: f64) -> C64 {
        match self.psi_params() {
            Some((om, n)) => cr(psi_hat_d((xi - om) / n) / n),
            None => self.inverse_freq(xi).1,
        }
    }

    fn inverse_freq(&self, xi: f64) -> (C64, C64) {
        let Kernel::Inverse { base, lo, hi, margin, .. } = self else {
            unreachable!()
        };
        let (a, da) = smooth_step((xi - (lo - margin)) / margin);
        let (b, db) = smooth_step(((hi + margin) - xi) / margin);
        let chi = a * b;
        if chi == 0.0 {
            return (cr(0.0), cr(0.0));
        }
        let dchi = (da * b - a * db) / margin;
        let f = base.freq(xi);
        let df = base.freq_d(xi);
        (cr(chi) / f, (cr(dchi) * f - df * chi) / (f * f))
    }

    /// Closed interval outside which the Fourier transform vanishes.
    pub fn freq_support(&self) -> (f64, f64) {
        match self {
            Kernel::Inverse { lo, hi, margin, .. } => (lo - margin, hi + margin),
            _ => {
                let (om, n) = self.psi_params().unwrap();
                (om - 2.0 * n, om + 2.0 * n)
            }
        }
    }

    /// Symmetric interval [−T, T] outside which |k(t)| < ε_supp.
    pub fn time_support(&self) -> f64 {
        match self {
            Kernel::Inverse { time_support, .. } => *time_support,
            _ => psi_support() / self.psi_params().unwrap().1,
        }
    }

    pub fn l1_norm(&self) -> f64 {
        match self {
            Kernel::Inverse { l1, .. } => *l1,
            // ψ ≥ 0, so ∫|nψ(n·)| = ψ̂(0) = 1
            _ => 1.0,
        }
    }

    pub fn sup_norm(&self) -> f64 {
        match self {
            Kernel::Inverse { sup, .. } => *sup,
            _ => self.psi_params().unwrap().1 * psi(0.0),
        }
    }

    /// Kernel of t ↦ k(−t).
    pub fn reflect(&self) -> Kernel {
        match self {
            Kernel::BandPass { omega, eps } => Kernel::BandPass {
                omega: -omega,
                eps: *eps,
            },
            Kernel::Inverse {
                base,
                lo,
                hi,
                margin,
                time_support,
                sup,
                l1,
            } => Kernel::Inverse {
                base: Box::new(base.reflect()),
                lo: -hi,
                hi: -lo,
                margin: *margin,
                time_support: *time_support,
                sup: *sup,
                l1: *l1,
            },
            k => k.clone(),
        }
    }

    /// Largest |frequency| present, used to size quadrature panels.
    pub fn max_frequency(&self) -> f64 {
        let (lo, hi) = self.freq_support();
        lo.abs().max(hi.abs())
    }
}

pub fn make_psi() -> Kernel {
    let _ = tables();
    Kernel::Psi
}

pub fn approximate_identity(n: u32) -> Result<Kernel> {
    if n == 0 {
        return Err(SpectraError::InvalidKernel("n must be positive".into()));
    }
    Ok(Kernel::ApproxIdentity { n: n as f64 })
}

pub fn band_pass(omega: f64, eps: f64) -> Result<Kernel> {
    let k = Kernel::BandPass { omega, eps };
    k.validate()?;
    Ok(k)
}

/// μ with γ_ω ∗ k = μ γ_ω.
pub fn convolve_character(omega: f64, k: &Kernel) -> C64 {
    k.freq(omega)
}

/// Inverse filter: ĝ = 1/k̂ on [lo, hi], smoothly cut off within `margin`.
pub fn inverse_on(k: &Kernel, lo: f64, hi: f64, margin: f64) -> Result<Kernel> {
    if !(lo <= hi) || !(margin > 0.0) {
        return Err(SpectraError::InvalidKernel("need lo ≤ hi and margin > 0".into()));
    }
    let (a, b) = (lo - margin, hi + margin);
    let n = 400;
    for j in 0..=n {
        let xi = a + (b - a) * j as f64 / n as f64;
        if k.freq(xi).norm() < 1e-3 {
            return Err(SpectraError::InvalidKernel(format!(
                "base transform too small at {xi}"
            )));
        }
    }
    let mut g = Kernel::Inverse {
        base: Box::new(k.clone()),
        lo,
        hi,
        margin,
        time_support: f64::INFINITY,
        sup: f64::INFINITY,
        l1: f64::INFINITY,
    };
    // scan outward for the effective support and norms
    let dt = (PI / (b - a).abs().max(1e-3)).min(0.5 / margin.max(1e-3)).min(0.25);
    let mut sup: f64 = 0.0;
    let mut l1 = 0.0;
    let mut t = 0.0;
    let mut quiet = 0.0;
    let mut last = 0.0;
    let run = 20.0 / margin;
    while t < 1e5 && quiet < run {
        let v = g.time(t).norm().max(g.time(-t).norm());
        sup = sup.max(v);
        l1 += 2.0 * v * dt;
        if v >= EPS_SUPP {
            last = t;
            quiet = 0.0;
        } else {
            quiet += dt;
        }
        t += dt;
    }
    if let Kernel::Inverse {
        time_support,
        sup: s,
        l1: l,
        ..
    } = &mut g
    {
        *time_support = last + dt;
        *s = sup * 1.01;
        *l = l1 * 1.05;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalisation() {
        assert!((psi_hat(0.0) - 1.0).abs() < 1e-12);
        assert!((tables().bump_a - 1.0935627).abs() < 1e-6);
        assert_eq!(psi_hat(2.0), 0.0);
        assert_eq!(psi_hat(-3.0), 0.0);
    }

    #[test]
    fn psi_nonnegative_and_even() {
        for j in 0..1000 {
            let t = -150.0 + 0.3 * j as f64;
            assert!(psi(t) >= 0.0);
            assert_eq!(psi(t), psi(-t));
        }
    }

    #[test]
    fn psi_hat_derivative_consistent() {
        for s in [-1.7, -0.4, 0.3, 1.1, 1.6] {
            let h = 1e-5;
            let fd = (psi_hat(s + h) - psi_hat(s - h)) / (2.0 * h);
            assert!((fd - psi_hat_d(s)).abs() < 1e-6, "{s}");
        }
    }

    #[test]
    fn support_beyond_64() {
        let t = psi_support();
        assert!(t > 64.0 && t <= TIME_MAX, "{t}");
    }

    #[test]
    fn band_pass_centering() {
        let b = band_pass(3.0, 0.5).unwrap();
        assert!((b.freq(3.0) - cr(1.0)).norm() < 1e-12);
        assert_eq!(b.freq(3.6), cr(0.0));
        assert_eq!(b.freq_support(), (2.5, 3.5));
        assert!(band_pass(0.0, 0.0).is_err());
    }

    #[test]
    fn convolve_character_examples() {
        assert!((convolve_character(0.0, &make_psi()) - cr(1.0)).norm() < 1e-12);
        let b = band_pass(1.0, 0.5).unwrap();
        assert_eq!(convolve_character(5.0, &b), cr(0.0));
        assert!((convolve_character(1.0, &b) - cr(1.0)).norm() < 1e-12);
    }

    #[test]
    fn smooth_step_derivative() {
        for x in [0.1, 0.4, 0.77] {
            let h = 1e-6;
            let fd = (smooth_step(x + h).0 - smooth_step(x - h).0) / (2.0 * h);
            assert!((fd - smooth_step(x).1).abs() < 1e-6);
        }
    }

    #[test]
    fn inverse_filter_inverts() {
        let k = make_psi();
        let g = inverse_on(&k, -0.5, 0.5, 0.25).unwrap();
        for j in 0..=20 {
            let xi = -0.5 + j as f64 * 0.05;
            assert!((k.freq(xi) * g.freq(xi) - cr(1.0)).norm() < 1e-12);
        }
        assert_eq!(g.freq(0.8), cr(0.0));
        assert!(inverse_on(&k, 1.5, 1.99, 0.1).is_err());
    }
}
