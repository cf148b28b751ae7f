//! Laplace and Carleman transforms, partial transforms, convolution,
//! ergodic means and the uniform (translate-family) transforms.

use crate::cvec::{cr, CVec, Est, C64, I};
use crate::error::{Result, SpectraError};
use crate::func_model::{eval_body, Body, Domain, FunctionDescriptor, Hold};
use crate::kernels::Kernel;
use crate::quad::{integrate_panels, QuadOptions};
use crate::spectral::{convolve_body, laplace_compact, partial_compact};
use crate::special::{
    chirp_laplace, chirp_partial, exp_integral, exp_moment, exprel, removable, RemovableValue,
};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransformSettings {
    pub eps_quad: f64,
    pub eps_tail: f64,
    pub t_max: f64,
}

impl Default for TransformSettings {
    fn default() -> Self {
        TransformSettings {
            eps_quad: 1e-8,
            eps_tail: 1e-8,
            t_max: 1e6,
        }
    }
}

/// A transform value with its error estimate; `horizon` is ∞ for closed forms.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformSample {
    pub point: C64,
    pub value: CVec,
    pub err_est: f64,
    pub horizon: f64,
}

impl RemovableValue for Result<Est> {
    fn sum(self, o: Self) -> Self {
        Ok(self?.plus(&o?))
    }
    fn div(self, n: f64) -> Self {
        self.map(|e| e.scale(cr(1.0 / n)))
    }
}

fn sampled_segment_integral(
    t0: f64,
    dt: f64,
    values: &[CVec],
    lambda: C64,
    from: f64,
    to: f64,
    d: usize,
) -> CVec {
    // oriented ∫_from^to e^{−λt} f(t) dt for the piecewise-linear interpolant
    let (lo, hi, sign) = if from <= to {
        (from, to, 1.0)
    } else {
        (to, from, -1.0)
    };
    let n = values.len();
    let mut acc = CVec::zeros(d);
    for j in 0..n - 1 {
        let a = t0 + j as f64 * dt;
        let b = a + dt;
        let p = a.max(lo);
        let q = b.min(hi);
        if q <= p {
            continue;
        }
        let slope = (values[j + 1].clone() - values[j].clone()).scale(cr(1.0 / dt));
        let mut fp = values[j].clone();
        fp.axpy(cr(p - a), &slope);
        let len = q - p;
        let e = (-lambda * p).exp();
        acc.axpy(e * exp_integral(-lambda, len), &fp);
        acc.axpy(e * exp_moment(-lambda, len), &slope);
    }
    acc.scale(cr(sign))
}

/// ℒ of a full-line body restricted to ℝ₊, for Re λ > 0.
pub fn laplace_body(b: &Body, lambda: C64, d: usize) -> Result<Est> {
    Ok(match b {
        Body::Character { omega, c } => Est::exact(c.scale(cr(1.0) / (lambda - I * omega))),
        Body::TrigPoly { terms } => {
            let mut acc = CVec::zeros(d);
            for t in terms {
                acc.axpy(cr(1.0) / (lambda - I * t.omega), &t.c);
            }
            Est::exact(acc)
        }
        Body::DampedCharacter { omega, decay, c } => {
            Est::exact(c.scale(cr(1.0) / (lambda - C64::new(-decay, *omega))))
        }
        Body::Chirp { c } => Est::exact(c.scale(chirp_laplace(lambda))),
        Body::LinearChirp { c } => {
            let z = cr(1.0) / (lambda - I);
            Est::exact(c.scale(z * z))
        }
        Body::L1Kernel { .. } | Body::Convolved { .. } => match laplace_compact(b, lambda, d) {
            Some(r) => r?,
            None => {
                let bound = b.sup_bound();
                let s = laplace_direct(
                    |t| eval_body(b, t, d),
                    d,
                    if bound.is_finite() { bound } else { 1.0 },
                    lambda,
                    |t| b.local_frequency(t),
                    &TransformSettings::default(),
                )?;
                Est::new(s.value, s.err_est)
            }
        },
        Body::Translate { inner, shift } => {
            let l = laplace_body(inner, lambda, d)?;
            let p = partial_laplace_body(inner, lambda, *shift, d)?;
            l.minus(&p).scale((lambda * shift).exp())
        }
        Body::Modulate { inner, omega } => laplace_body(inner, lambda - I * omega, d)?,
        Body::Sum { terms } => {
            let mut acc = Est::zeros(d);
            for t in terms {
                acc = acc.plus(&laplace_body(t, lambda, d)?);
            }
            acc
        }
        Body::Scale { inner, alpha } => laplace_body(inner, lambda, d)?.scale(*alpha),
        Body::Mollified { inner, h } => {
            let h = *h;
            let main = laplace_body(inner, lambda, d)?.scale(exprel(lambda * h));
            let corr = removable(lambda, h, |mu| -> Result<Est> {
                let a = partial_laplace_body(inner, mu, h, d)?.scale((mu * h).exp());
                let b0 = partial_laplace_body(inner, cr(0.0), h, d)?;
                Ok(a.minus(&b0).scale(cr(1.0) / (mu * h)))
            })?;
            main.minus(&corr)
        }
        Body::Primitive { inner, offset } => {
            let mut l = laplace_body(inner, lambda, d)?;
            l.v += offset.clone();
            l.scale(cr(1.0) / lambda)
        }
        Body::Sampled {
            t0, dt, values, ..
        } => {
            let end = t0 + dt * (values.len() - 1) as f64;
            if end <= 0.0 {
                Est::zeros(d)
            } else {
                let v = sampled_segment_integral(*t0, *dt, values, lambda, 0.0, end, d);
                Est::new(v.clone(), 1e-14 * (1.0 + v.norm()) * values.len() as f64)
            }
        }
    })
}

/// Q(μ, x) = ∫₀ˣ e^{−μu} Pφ(u) du = (PL(φ, μ, x) − e^{−μx} Pφ(x)) / μ.
fn q_term(inner: &Body, mu: C64, x: f64, d: usize) -> Result<Est> {
    let a = partial_laplace_body(inner, mu, x, d)?;
    let p = partial_laplace_body(inner, cr(0.0), x, d)?.scale((-mu * x).exp());
    Ok(a.minus(&p).scale(cr(1.0) / mu))
}

/// Oriented ∫₀ˢ e^{−λt} φ(t) dt of a full-line body, any λ.
pub fn partial_laplace_body(b: &Body, lambda: C64, s: f64, d: usize) -> Result<Est> {
    if s == 0.0 {
        return Ok(Est::zeros(d));
    }
    Ok(match b {
        Body::Character { omega, c } => Est::exact(c.scale(exp_integral(I * omega - lambda, s))),
        Body::TrigPoly { terms } => {
            let mut acc = CVec::zeros(d);
            for t in terms {
                acc.axpy(exp_integral(I * t.omega - lambda, s), &t.c);
            }
            Est::exact(acc)
        }
        Body::DampedCharacter { omega, decay, c } => {
            if s <= 0.0 {
                Est::zeros(d)
            } else {
                Est::exact(c.scale(exp_integral(C64::new(-decay, *omega) - lambda, s)))
            }
        }
        Body::Chirp { c } => Est::exact(c.scale(chirp_partial(lambda, s))),
        Body::LinearChirp { c } => Est::exact(c.scale(exp_moment(I - lambda, s))),
        Body::L1Kernel { .. } | Body::Convolved { .. } => match partial_compact(b, lambda, s, d) {
            Some(r) => r?,
            None => {
                let rate = b.local_frequency(0.0).max(b.local_frequency(s)) + lambda.im.abs() + 1.0;
                let opts = QuadOptions::tol(1e-11, 1e-10);
                let r = integrate_panels(
                    |t: f64| match eval_body(b, t, d) {
                        Ok(v) => v.scale((-lambda * t).exp()),
                        Err(_) => CVec(vec![cr(f64::NAN); d]),
                    },
                    0.0,
                    s,
                    std::f64::consts::PI / rate,
                    &opts,
                );
                if !r.value.is_finite() || !r.converged {
                    return Err(SpectraError::QuadFail("partial Laplace quadrature".into()));
                }
                Est::new(r.value, r.error)
            }
        },
        Body::Translate { inner, shift } => {
            let a = partial_laplace_body(inner, lambda, s + shift, d)?;
            let b0 = partial_laplace_body(inner, lambda, *shift, d)?;
            a.minus(&b0).scale((lambda * shift).exp())
        }
        Body::Modulate { inner, omega } => partial_laplace_body(inner, lambda - I * omega, s, d)?,
        Body::Sum { terms } => {
            let mut acc = Est::zeros(d);
            for t in terms {
                acc = acc.plus(&partial_laplace_body(t, lambda, s, d)?);
            }
            acc
        }
        Body::Scale { inner, alpha } => partial_laplace_body(inner, lambda, s, d)?.scale(*alpha),
        Body::Mollified { inner, h } => {
            let h = *h;
            removable(lambda, s.abs() + h, |mu| -> Result<Est> {
                let q1 = q_term(inner, mu, s + h, d)?;
                let q2 = q_term(inner, mu, h, d)?;
                let q3 = q_term(inner, mu, s, d)?;
                Ok(q1.minus(&q2).scale((mu * h).exp()).minus(&q3).scale(cr(1.0 / h)))
            })?
        }
        Body::Primitive { inner, offset } => {
            let q = removable(lambda, s.abs(), |mu| q_term(inner, mu, s, d))?;
            q.plus(&Est::exact(offset.scale(exp_integral(-lambda, s))))
        }
        Body::Sampled {
            t0, dt, values, ..
        } => {
            let v = sampled_segment_integral(*t0, *dt, values, lambda, 0.0, s, d);
            Est::new(v.clone(), 1e-14 * (1.0 + v.norm()) * values.len() as f64)
        }
    })
}

/// Direct quadrature of ∫₀^T e^{−λt} f(t) dt with a certified tail bound.
pub fn laplace_direct<F: Fn(f64) -> Result<CVec>, R: Fn(f64) -> f64>(
    f: F,
    d: usize,
    bound: f64,
    lambda: C64,
    rate: R,
    settings: &TransformSettings,
) -> Result<TransformSample> {
    let a = lambda.re;
    if !(a > 0.0) {
        return Err(SpectraError::PrecondError("Re λ must be positive".into()));
    }
    let t_end = ((bound.max(1e-300) / (a * settings.eps_tail)).ln() / a).max(1.0);
    if t_end > settings.t_max {
        return Err(SpectraError::QuadFail(format!(
            "horizon {t_end:.3e} exceeds cap"
        )));
    }
    let nu = rate(0.0).max(rate(t_end)) + lambda.im.abs() + 1.0;
    let panel = std::f64::consts::PI / nu;
    if t_end / panel > 2e5 {
        return Err(SpectraError::QuadFail("too many oscillation panels".into()));
    }
    let failed = std::cell::Cell::new(false);
    let opts = QuadOptions::tol(settings.eps_quad * 1e-2 * bound.max(1e-300), settings.eps_quad * 1e-2);
    let r = integrate_panels(
        |t: f64| match f(t) {
            Ok(v) => v.scale((-lambda * t).exp()),
            Err(_) => {
                failed.set(true);
                CVec::zeros(d)
            }
        },
        0.0,
        t_end,
        panel,
        &opts,
    );
    if failed.get() || !r.value.is_finite() {
        return Err(SpectraError::QuadFail("integrand evaluation failed".into()));
    }
    let tail = bound * (-a * t_end).exp() / a;
    if !r.converged && r.error > settings.eps_quad * (1.0 + r.value.norm()) {
        return Err(SpectraError::QuadFail(format!(
            "quadrature error {:.3e}",
            r.error
        )));
    }
    Ok(TransformSample {
        point: lambda,
        value: r.value,
        err_est: r.error + tail,
        horizon: t_end,
    })
}

fn sample(lambda: C64, e: Est) -> TransformSample {
    TransformSample {
        point: lambda,
        value: e.v,
        err_est: e.err,
        horizon: f64::INFINITY,
    }
}

/// ℒφ(λ) = ∫₀^∞ e^{−λt}φ(t)dt, Re λ > 0.
pub fn laplace(phi: &FunctionDescriptor, lambda: C64) -> Result<TransformSample> {
    if !(lambda.re > 0.0) {
        return Err(SpectraError::PrecondError(format!(
            "Laplace needs Re λ > 0, got {lambda}"
        )));
    }
    Ok(sample(lambda, laplace_body(&phi.body, lambda, phi.dim)?))
}

/// Oriented ∫₀ˢ e^{−λt}φ(t)dt.
pub fn partial_laplace(phi: &FunctionDescriptor, lambda: C64, s: f64) -> Result<Est> {
    if phi.domain == Domain::HalfLine && s < 0.0 {
        return Err(SpectraError::DomainError("negative upper limit on ℝ₊".into()));
    }
    partial_laplace_body(&phi.body, lambda, s, phi.dim)
}

/// Carleman transform; `reflected` may carry a precomputed t ↦ φ(−t).
pub fn carleman_with(
    phi: &FunctionDescriptor,
    reflected: &FunctionDescriptor,
    lambda: C64,
) -> Result<TransformSample> {
    if lambda.re > 0.0 {
        laplace(phi, lambda)
    } else if lambda.re < 0.0 {
        let mut s = laplace(reflected, -lambda)?;
        s.point = lambda;
        s.value = -s.value;
        Ok(s)
    } else {
        Err(SpectraError::PrecondError(
            "Carleman transform is undefined on the imaginary axis".into(),
        ))
    }
}

pub fn carleman(phi: &FunctionDescriptor, lambda: C64) -> Result<TransformSample> {
    if phi.domain != Domain::FullLine {
        return Err(SpectraError::PrecondError("Carleman needs a function on ℝ".into()));
    }
    if !phi.is_bounded() {
        return Err(SpectraError::PrecondError("Carleman needs a bounded function".into()));
    }
    if lambda.re == 0.0 {
        return Err(SpectraError::PrecondError(
            "Carleman transform is undefined on the imaginary axis".into(),
        ));
    }
    carleman_with(phi, &phi.reflect()?, lambda)
}

/// (φ∗k)(t), with φ extended by zero off its domain.
pub fn convolve_est(
    phi: &FunctionDescriptor,
    k: &Kernel,
    t: f64,
    allow_unbounded: bool,
) -> Result<Est> {
    if !phi.is_bounded() && !allow_unbounded {
        return Err(SpectraError::PrecondError(
            "convolution of an unbounded function needs an explicit override".into(),
        ));
    }
    convolve_body(&phi.body, k, t, phi.dim, phi.domain == Domain::HalfLine)
}

pub fn convolve(phi: &FunctionDescriptor, k: &Kernel, t: f64, allow_unbounded: bool) -> Result<CVec> {
    Ok(convolve_est(phi, k, t, allow_unbounded)?.v)
}

pub fn mollify(phi: &FunctionDescriptor, h: f64) -> Result<FunctionDescriptor> {
    phi.mollify(h)
}

pub fn primitive(phi: &FunctionDescriptor) -> Result<FunctionDescriptor> {
    phi.primitive(CVec::zeros(phi.dim))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErgodicVerdict {
    Ergodic,
    NotErgodic,
    Undecided,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErgodicReport {
    pub mean: Option<CVec>,
    pub sup_deviation_ladder: Vec<(f64, f64)>,
    pub verdict: ErgodicVerdict,
}

pub fn default_t_ladder() -> Vec<f64> {
    (6..=14).map(|k| 2f64.powi(k)).collect()
}

pub fn default_shift_grid() -> Vec<f64> {
    vec![0.0, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0]
}

/// Cesàro means (1/T)∫₀^T φ(t+s)dt over the shift grid and T ladder.
pub fn ergodic_mean(
    phi: &FunctionDescriptor,
    shifts: &[f64],
    t_ladder: &[f64],
    tol: f64,
) -> Result<ErgodicReport> {
    if t_ladder.len() < 2 || shifts.is_empty() {
        return Err(SpectraError::PrecondError("need ≥ 2 horizons and ≥ 1 shift".into()));
    }
    if phi.domain == Domain::HalfLine && shifts.iter().any(|&s| s < 0.0) {
        return Err(SpectraError::DomainError("negative shift on ℝ₊".into()));
    }
    let pf = |x: f64| partial_laplace_body(&phi.body, cr(0.0), x, phi.dim).map(|e| e.v);
    let avg = |t: f64, s: f64| -> Result<CVec> { Ok((pf(t + s)? - pf(s)?).scale(cr(1.0 / t))) };
    let t_max = *t_ladder.last().unwrap();
    let mean = avg(t_max, 0.0)?;
    let mut ladder = Vec::with_capacity(t_ladder.len());
    for &t in t_ladder {
        let mut dev: f64 = 0.0;
        for &s in shifts {
            dev = dev.max(avg(t, s)?.dist(&mean));
        }
        ladder.push((t, dev));
    }
    let n = ladder.len();
    let last = ladder[n - 1].1;
    let first_half_max = ladder[..n / 2].iter().fold(0.0f64, |m, x| m.max(x.1));
    let late_min = ladder[n / 2..].iter().fold(f64::INFINITY, |m, x| m.min(x.1));
    let verdict = if last <= tol && last <= first_half_max.max(1e-300) {
        ErgodicVerdict::Ergodic
    } else if late_min > 10.0 * tol {
        ErgodicVerdict::NotErgodic
    } else {
        ErgodicVerdict::Undecided
    };
    Ok(ErgodicReport {
        mean: if verdict == ErgodicVerdict::Ergodic {
            Some(mean)
        } else {
            None
        },
        sup_deviation_ladder: ladder,
        verdict,
    })
}

/// s ↦ ℒφ_s(λ) (Re λ > 0) or 𝒞φ_s(λ) (Re λ < 0) through the translation identity.
pub fn uniform_transform(
    phi: &FunctionDescriptor,
    lambda: C64,
    s_grid: &[f64],
) -> Result<Vec<TransformSample>> {
    if lambda.re > 0.0 {
        let base = laplace(phi, lambda)?;
        s_grid
            .iter()
            .map(|&s| {
                if s == 0.0 {
                    return Ok(base.clone());
                }
                let p = partial_laplace(phi, lambda, s)?;
                let e = (lambda * s).exp();
                Ok(TransformSample {
                    point: lambda,
                    value: (base.value.clone() - p.v).scale(e),
                    err_est: (base.err_est + p.err) * e.norm(),
                    horizon: base.horizon,
                })
            })
            .collect()
    } else if lambda.re < 0.0 {
        if phi.domain != Domain::FullLine || !phi.is_bounded() {
            return Err(SpectraError::PrecondError(
                "uniform Carleman transform needs a bounded function on ℝ".into(),
            ));
        }
        let rho = phi.reflect()?;
        let mu = -lambda;
        let base = laplace(&rho, mu)?;
        s_grid
            .iter()
            .map(|&s| {
                if s == 0.0 {
                    let mut b = base.clone();
                    b.point = lambda;
                    b.value = -b.value;
                    return Ok(b);
                }
                let p = partial_laplace(&rho, mu, -s)?;
                let e = (lambda * s).exp();
                Ok(TransformSample {
                    point: lambda,
                    value: (base.value.clone() - p.v).scale(-e),
                    err_est: (base.err_est + p.err) * e.norm(),
                    horizon: base.horizon,
                })
            })
            .collect()
    } else {
        Err(SpectraError::PrecondError("Re λ must be nonzero".into()))
    }
}

/// Piecewise-linear samples of a descriptor on [t0, t0 + (n−1)dt].
pub fn sample_descriptor(phi: &FunctionDescriptor, t0: f64, dt: f64, n: usize) -> Result<FunctionDescriptor> {
    let values = (0..n)
        .map(|j| eval_body(&phi.body, t0 + j as f64 * dt, phi.dim))
        .collect::<Result<Vec<_>>>()?;
    FunctionDescriptor::new(
        phi.domain,
        phi.dim,
        Body::Sampled {
            t0,
            dt,
            values,
            hold: Hold::Linear,
        },
    )
}
