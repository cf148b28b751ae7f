//! Spectral representation φ(t) = Σ (a + b t) e^{iωt} + (1/2π)∫ D(ξ) e^{iξt} dξ
//! and the convolution / transform formulas built on it.

use crate::cvec::{cr, CVec, Est, C64, I};
use crate::error::{Result, SpectraError};
use crate::func_model::{eval_body, Body};
use crate::kernels::Kernel;
use crate::quad::{integrate_breaks, integrate_panels, QuadOptions, QuadOutput};
use crate::transforms::laplace_body;
use crate::special::{chirp_fourier, exp_integral, exp_moment, exprel, exprel_d1};
use std::f64::consts::PI;

/// (a + b·t)·e^{iωt}
#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub omega: f64,
    pub a: CVec,
    pub b: CVec,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Support {
    Empty,
    Interval(f64, f64),
    Whole,
}

impl Support {
    fn hull(self, o: Support) -> Support {
        match (self, o) {
            (Support::Empty, x) | (x, Support::Empty) => x,
            (Support::Whole, _) | (_, Support::Whole) => Support::Whole,
            (Support::Interval(a, b), Support::Interval(c, d)) => Support::Interval(a.min(c), b.max(d)),
        }
    }

    fn meet(self, lo: f64, hi: f64) -> Support {
        match self {
            Support::Empty => Support::Empty,
            Support::Whole => Support::Interval(lo, hi),
            Support::Interval(a, b) => {
                let (l, h) = (a.max(lo), b.min(hi));
                if l < h {
                    Support::Interval(l, h)
                } else {
                    Support::Empty
                }
            }
        }
    }

    fn shift(self, w: f64) -> Support {
        match self {
            Support::Interval(a, b) => Support::Interval(a + w, b + w),
            s => s,
        }
    }
}

/// Multiplier μ(ξ) and μ'(ξ) applied to atoms.
fn apply_multiplier(atoms: &mut [Atom], mu: impl Fn(f64) -> (C64, C64)) {
    for at in atoms.iter_mut() {
        let (m, dm) = mu(at.omega);
        let mut a = at.a.scale(m);
        a.axpy(-I * dm, &at.b);
        at.a = a;
        at.b = at.b.scale(m);
    }
}

/// Atoms and density support, when the body has a spectral representation.
pub fn representation(b: &Body, d: usize) -> Option<(Vec<Atom>, Support)> {
    Some(match b {
        Body::Character { omega, c } => (
            vec![Atom {
                omega: *omega,
                a: c.clone(),
                b: CVec::zeros(d),
            }],
            Support::Empty,
        ),
        Body::TrigPoly { terms } => (
            terms
                .iter()
                .map(|t| Atom {
                    omega: t.omega,
                    a: t.c.clone(),
                    b: CVec::zeros(d),
                })
                .collect(),
            Support::Empty,
        ),
        Body::LinearChirp { c } => (
            vec![Atom {
                omega: 1.0,
                a: CVec::zeros(d),
                b: c.clone(),
            }],
            Support::Empty,
        ),
        Body::Chirp { .. } | Body::DampedCharacter { .. } => (vec![], Support::Whole),
        Body::L1Kernel { kernel, .. } => {
            let (lo, hi) = kernel.freq_support();
            (vec![], Support::Interval(lo, hi))
        }
        Body::Translate { inner, shift } => {
            let (mut at, s) = representation(inner, d)?;
            let sh = *shift;
            apply_multiplier(&mut at, |w| {
                let e = C64::from_polar(1.0, w * sh);
                (e, I * sh * e)
            });
            (at, s)
        }
        Body::Modulate { inner, omega } => {
            let (mut at, s) = representation(inner, d)?;
            for x in at.iter_mut() {
                x.omega += omega;
            }
            (at, s.shift(*omega))
        }
        Body::Scale { inner, alpha } => {
            let (mut at, s) = representation(inner, d)?;
            for x in at.iter_mut() {
                x.a = x.a.scale(*alpha);
                x.b = x.b.scale(*alpha);
            }
            (at, s)
        }
        Body::Sum { terms } => {
            let mut atoms = vec![];
            let mut sup = Support::Empty;
            for t in terms {
                let (a, s) = representation(t, d)?;
                atoms.extend(a);
                sup = sup.hull(s);
            }
            (atoms, sup)
        }
        Body::Mollified { inner, h } => {
            let (mut at, s) = representation(inner, d)?;
            let h = *h;
            apply_multiplier(&mut at, |w| {
                let z = I * (w * h);
                (exprel(z), I * h * exprel_d1(z))
            });
            (at, s)
        }
        Body::Convolved { inner, kernel } => {
            let (mut at, s) = representation(inner, d)?;
            apply_multiplier(&mut at, |w| (kernel.freq(w), kernel.freq_d(w)));
            at.retain(|x| !(x.a.is_zero() && x.b.is_zero()));
            let (lo, hi) = kernel.freq_support();
            (at, s.meet(lo, hi))
        }
        Body::Primitive { .. } | Body::Sampled { .. } => return None,
    })
}

/// Adds coef·D(ξ) into `out` without allocating.
fn density_acc(b: &Body, xi: f64, coef: C64, out: &mut [C64]) {
    fn axpy(out: &mut [C64], m: C64, c: &CVec) {
        for (o, x) in out.iter_mut().zip(&c.0) {
            *o += m * x;
        }
    }
    match b {
        Body::Character { .. } | Body::TrigPoly { .. } | Body::LinearChirp { .. } => {}
        Body::Chirp { c } => axpy(out, coef * chirp_fourier(xi), c),
        Body::DampedCharacter { omega, decay, c } => {
            axpy(out, coef / (I * xi - C64::new(-decay, *omega)), c)
        }
        Body::L1Kernel { kernel, c } => axpy(out, coef * kernel.freq(xi), c),
        Body::Translate { inner, shift } => {
            density_acc(inner, xi, coef * C64::from_polar(1.0, xi * shift), out)
        }
        Body::Modulate { inner, omega } => density_acc(inner, xi - omega, coef, out),
        Body::Scale { inner, alpha } => density_acc(inner, xi, coef * alpha, out),
        Body::Sum { terms } => {
            for t in terms {
                density_acc(t, xi, coef, out);
            }
        }
        Body::Mollified { inner, h } => density_acc(inner, xi, coef * exprel(I * (xi * h)), out),
        Body::Convolved { inner, kernel } => {
            let k = kernel.freq(xi);
            if k != cr(0.0) {
                density_acc(inner, xi, coef * k, out)
            }
        }
        Body::Primitive { .. } | Body::Sampled { .. } => {}
    }
}

/// Continuous spectral density D(ξ).
pub fn density(b: &Body, xi: f64, d: usize) -> CVec {
    let mut v = vec![cr(0.0); d];
    density_acc(b, xi, cr(1.0), &mut v);
    CVec(v)
}

enum Mesh<'a> {
    Breaks(&'a [f64]),
    Panels(f64, f64, f64),
}

/// ∫ w(ξ)(D(ξ) − D₀) dξ, with a scalar fast path for d = 1.
fn density_integral(
    b: &Body,
    d: usize,
    d0: Option<&CVec>,
    w: impl Fn(f64) -> C64,
    mesh: Mesh,
    opts: &QuadOptions<f64>,
) -> QuadOutput<f64, CVec> {
    if d == 1 {
        let z0 = d0.map(|v| v.0[0]).unwrap_or(cr(0.0));
        let f = |xi: f64| {
            let mut o = [cr(0.0)];
            density_acc(b, xi, cr(1.0), &mut o);
            (o[0] - z0) * w(xi)
        };
        let r = match mesh {
            Mesh::Breaks(bk) => integrate_breaks(f, bk, opts),
            Mesh::Panels(lo, hi, p) => integrate_panels(f, lo, hi, p, opts),
        };
        QuadOutput {
            value: CVec(vec![r.value]),
            error: r.error,
            evals: r.evals,
            converged: r.converged,
        }
    } else {
        let f = |xi: f64| {
            let mut o = match d0 {
                Some(v) => -v.clone(),
                None => CVec::zeros(d),
            };
            density_acc(b, xi, cr(1.0), &mut o.0);
            let m = w(xi);
            for x in o.0.iter_mut() {
                *x *= m;
            }
            o
        };
        match mesh {
            Mesh::Breaks(bk) => integrate_breaks(f, bk, opts),
            Mesh::Panels(lo, hi, p) => integrate_panels(f, lo, hi, p, opts),
        }
    }
}

/// Rough rate of phase change of D over [lo, hi].
fn phase_rate(b: &Body, lo: f64, hi: f64) -> f64 {
    let m = lo.abs().max(hi.abs());
    match b {
        Body::Chirp { .. } => m / 2.0,
        Body::Translate { inner, shift } => phase_rate(inner, lo, hi) + shift.abs(),
        Body::Modulate { inner, omega } => phase_rate(inner, lo - omega, hi - omega),
        Body::Scale { inner, .. } | Body::Mollified { inner, h: _ } | Body::Convolved { inner, .. } => {
            phase_rate(inner, lo, hi)
        }
        Body::Sum { terms } => terms.iter().fold(0.0, |a, t| a.max(phase_rate(t, lo, hi))),
        _ => 0.0,
    }
}

fn quad_opts(scale: f64) -> QuadOptions<f64> {
    QuadOptions::tol(1e-10 * scale.max(1e-300), 1e-9)
}

fn finite_scale(b: &Body) -> f64 {
    let s = b.sup_bound();
    if s.is_finite() && s > 0.0 {
        s
    } else {
        1.0
    }
}

fn check(r: &QuadOutput<f64, CVec>, what: &str) -> Result<()> {
    if r.converged || r.error <= 1e-6 * (1.0 + r.value.norm()) {
        Ok(())
    } else {
        Err(SpectraError::QuadFail(format!(
            "{what}: error estimate {:.3e}",
            r.error
        )))
    }
}

/// (φ∗k)(t) on the full line.
pub fn convolve_body(inner: &Body, k: &Kernel, t: f64, d: usize, causal: bool) -> Result<Est> {
    let tk = k.time_support();
    if !causal || t - tk >= 0.0 {
        if let Some((atoms, sup)) = representation(inner, d) {
            let mut acc = CVec::zeros(d);
            for at in &atoms {
                let (m, dm) = (k.freq(at.omega), k.freq_d(at.omega));
                let mut v = at.a.scale(m);
                v.axpy(-I * dm, &at.b);
                v.axpy(m * t, &at.b);
                acc.axpy(C64::from_polar(1.0, at.omega * t), &v);
            }
            let mut err = 4.0 * f64::EPSILON * acc.norm();
            let (klo, khi) = k.freq_support();
            if let Support::Interval(lo, hi) = sup.meet(klo, khi) {
                let rate = t.abs() + phase_rate(inner, lo, hi) + 1.0;
                let r = density_integral(
                    inner,
                    d,
                    None,
                    |xi| k.freq(xi) * C64::from_polar(1.0, xi * t),
                    Mesh::Panels(lo, hi, PI / rate),
                    &quad_opts(finite_scale(inner)),
                );
                check(&r, "spectral convolution")?;
                acc.axpy(cr(1.0 / (2.0 * PI)), &r.value);
                err += r.error / (2.0 * PI);
            }
            return Ok(Est::new(acc, err));
        }
    }
    if causal && laplace_entire(inner) {
        // (φ₊∗k)(t) = (1/2π)∫ k̂(ξ) ℒφ(iξ) e^{iξt} dξ: ℒφ is entire, so it is the transform of φ₊
        let (lo, hi) = k.freq_support();
        let rate = t.abs() + phase_rate(inner, lo, hi) + 1.0;
        let r = integrate_panels(
            |xi: f64| match laplace_body(inner, C64::new(0.0, xi), d) {
                Ok(e) => e.v.scale(k.freq(xi) * C64::from_polar(1.0 / (2.0 * PI), xi * t)),
                Err(_) => CVec(vec![cr(f64::NAN); d]),
            },
            lo,
            hi,
            PI / rate,
            &quad_opts(finite_scale(inner)),
        );
        if !r.value.is_finite() {
            return Err(SpectraError::QuadFail("boundary-value convolution".into()));
        }
        check(&r, "boundary-value convolution")?;
        return Ok(Est::new(r.value, r.error));
    }
    convolve_time(inner, k, t, d, causal)
}

/// ∫ φ(t−u) k(u) du over the kernel's effective support (u ≤ t when causal).
fn convolve_time(inner: &Body, k: &Kernel, t: f64, d: usize, causal: bool) -> Result<Est> {
    let tk = k.time_support();
    let hi = if causal { tk.min(t) } else { tk };
    let lo = -tk;
    if hi <= lo {
        return Ok(Est::zeros(d));
    }
    let rate = inner
        .local_frequency(t - lo)
        .max(inner.local_frequency(t - hi))
        + k.max_frequency()
        + 1.0;
    let r = integrate_panels(
        |u: f64| match eval_body(inner, t - u, d) {
            Ok(v) => v.scale(k.time(u)),
            Err(_) => CVec(vec![cr(f64::NAN); d]),
        },
        lo,
        hi,
        PI / rate,
        &quad_opts(finite_scale(inner) * k.sup_norm()),
    );
    if !r.value.is_finite() {
        return Err(SpectraError::QuadFail("time-domain convolution".into()));
    }
    check(&r, "time-domain convolution")?;
    Ok(Est::new(r.value, r.error))
}

/// Bodies whose half-line Laplace transform has an entire closed form.
fn laplace_entire(b: &Body) -> bool {
    match b {
        Body::Chirp { .. } => true,
        Body::Translate { inner, .. }
        | Body::Modulate { inner, .. }
        | Body::Scale { inner, .. }
        | Body::Mollified { inner, .. } => laplace_entire(inner),
        Body::Sum { terms } => terms.iter().all(laplace_entire),
        _ => false,
    }
}

fn compact(b: &Body, d: usize) -> Option<(Vec<Atom>, Option<(f64, f64)>)> {
    let (atoms, sup) = representation(b, d)?;
    match sup {
        Support::Whole => None,
        Support::Empty => Some((atoms, None)),
        Support::Interval(lo, hi) => Some((atoms, Some((lo, hi)))),
    }
}

/// ℒφ(λ) for bodies whose density has compact support. `None` if not applicable.
pub fn laplace_compact(b: &Body, lambda: C64, d: usize) -> Option<Result<Est>> {
    let (atoms, sup) = compact(b, d)?;
    let mut acc = CVec::zeros(d);
    for at in &atoms {
        let z = cr(1.0) / (lambda - I * at.omega);
        acc.axpy(z, &at.a);
        acc.axpy(z * z, &at.b);
    }
    let mut err = 8.0 * f64::EPSILON * acc.norm();
    if let Some((lo, hi)) = sup {
        let x0 = lambda.im;
        let a = lambda.re;
        let opts = quad_opts(finite_scale(b));
        let r = if x0 > lo && x0 < hi && a < (hi - lo) {
            let d0 = density(b, x0, d);
            let r = density_integral(
                b,
                d,
                Some(&d0),
                |xi| cr(1.0) / (lambda - I * xi),
                Mesh::Breaks(&[lo, x0, hi]),
                &opts,
            );
            let logs = I * ((lambda - I * hi).ln() - (lambda - I * lo).ln());
            let mut v = r.value.clone();
            v.axpy(logs, &d0);
            QuadOutput { value: v, ..r }
        } else {
            density_integral(
                b,
                d,
                None,
                |xi| cr(1.0) / (lambda - I * xi),
                Mesh::Breaks(&[lo, hi]),
                &opts,
            )
        };
        if let Err(e) = check(&r, "spectral Laplace") {
            return Some(Err(e));
        }
        acc.axpy(cr(1.0 / (2.0 * PI)), &r.value);
        err += r.error / (2.0 * PI);
    }
    Some(Ok(Est::new(acc, err)))
}

/// ∫₀ˢ e^{−λt}φ(t)dt for bodies whose density has compact support.
pub fn partial_compact(b: &Body, lambda: C64, s: f64, d: usize) -> Option<Result<Est>> {
    let (atoms, sup) = compact(b, d)?;
    let mut s_eff = s;
    if atoms.is_empty() {
        if s > 0.0 {
            if let Some(h) = b.decay_horizon() {
                s_eff = s.min(h);
            }
        } else if let Ok(rb) = crate::func_model::reflect_body(b) {
            if let Some(h) = rb.decay_horizon() {
                s_eff = s.max(-h);
            }
        }
    }
    let mut acc = CVec::zeros(d);
    for at in &atoms {
        let mu = I * at.omega - lambda;
        acc.axpy(exp_integral(mu, s), &at.a);
        acc.axpy(exp_moment(mu, s), &at.b);
    }
    let mut err = 8.0 * f64::EPSILON * acc.norm() * (1.0 + s.abs());
    if let Some((lo, hi)) = sup {
        let rate = s_eff.abs() + phase_rate(b, lo, hi) + 1.0;
        let r = density_integral(
            b,
            d,
            None,
            |xi| exp_integral(I * xi - lambda, s_eff),
            Mesh::Panels(lo, hi, PI / rate),
            &quad_opts(finite_scale(b)),
        );
        if let Err(e) = check(&r, "spectral partial Laplace") {
            return Some(Err(e));
        }
        acc.axpy(cr(1.0 / (2.0 * PI)), &r.value);
        err += r.error / (2.0 * PI);
    }
    Some(Ok(Est::new(acc, err)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{band_pass, make_psi, psi};

    #[test]
    fn kernel_density_inverts() {
        let b = Body::L1Kernel {
            kernel: make_psi(),
            c: CVec::scalar(cr(1.0)),
        };
        // ψ(t) = (1/2π)∫ψ̂(ξ)e^{iξt}dξ
        for t in [0.0, 1.3, 7.0] {
            let (_, sup) = representation(&b, 1).unwrap();
            let Support::Interval(lo, hi) = sup else { panic!() };
            let r = integrate_panels(
                |xi: f64| density(&b, xi, 1).scale(C64::from_polar(1.0, xi * t)),
                lo,
                hi,
                0.1,
                &QuadOptions::tol(1e-13, 1e-12),
            );
            assert!((r.value.0[0] / (2.0 * PI) - cr(psi(t))).norm() < 1e-10);
        }
    }

    #[test]
    fn causal_chirp_boundary_route_matches_time_domain() {
        let k = band_pass(0.5, 2.0).unwrap();
        let chirp = Body::Chirp {
            c: CVec::scalar(cr(1.0)),
        };
        let moll = Body::Mollified {
            inner: Box::new(chirp.clone()),
            h: 0.5,
        };
        for b in [&chirp, &moll] {
            for t in [-3.0, 0.5, 4.0] {
                let f = convolve_body(b, &k, t, 1, true).unwrap();
                let g = convolve_time(b, &k, t, 1, true).unwrap();
                assert!(f.v.dist(&g.v) < 1e-8, "t={t}: {:?} vs {:?}", f.v, g.v);
            }
        }
    }

    #[test]
    fn linear_chirp_convolution_rule() {
        // (t e^{it}) ∗ b = e^{it}(t b̂(1) − i b̂'(1))
        let k = band_pass(1.2, 1.0).unwrap();
        let b = Body::LinearChirp {
            c: CVec::scalar(cr(1.0)),
        };
        let t = 2.0;
        let v = convolve_body(&b, &k, t, 1, false).unwrap().v.0[0];
        let e = C64::from_polar(1.0, t) * (k.freq(1.0) * t - I * k.freq_d(1.0));
        assert!((v - e).norm() < 1e-12);
    }

    #[test]
    fn laplace_of_psi_near_axis_is_finite() {
        let b = Body::L1Kernel {
            kernel: make_psi(),
            c: CVec::scalar(cr(1.0)),
        };
        let v = laplace_compact(&b, C64::new(1e-4, 0.5), 1).unwrap().unwrap();
        assert!(v.v.norm() < 10.0);
    }
}
