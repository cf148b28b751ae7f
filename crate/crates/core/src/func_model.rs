//! Immutable descriptors of functions φ: 𝕁 → ℂᵈ.
//!
//! A body always describes a function on the whole line; the domain flag says
//! whether the descriptor is read on ℝ or on ℝ₊ (extended by zero).

use crate::cvec::{cr, CVec, C64, I};
use crate::error::{Result, SpectraError};
use crate::kernels::Kernel;
use crate::special::exprel;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Domain {
    #[serde(rename = "R+")]
    HalfLine,
    #[serde(rename = "R")]
    FullLine,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub omega: f64,
    pub c: CVec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hold {
    Linear,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Body {
    /// c·e^{iωt}
    Character { omega: f64, c: CVec },
    TrigPoly { terms: Vec<Term> },
    /// c·e^{(iω − decay)t} for t ≥ 0, zero for t < 0.
    DampedCharacter { omega: f64, decay: f64, c: CVec },
    /// c·e^{it²}
    Chirp { c: CVec },
    /// c·t·e^{it}
    LinearChirp { c: CVec },
    L1Kernel { kernel: Kernel, c: CVec },
    Translate { inner: Box<Body>, shift: f64 },
    Modulate { inner: Box<Body>, omega: f64 },
    Sum { terms: Vec<Body> },
    Scale { inner: Box<Body>, alpha: C64 },
    Mollified { inner: Box<Body>, h: f64 },
    Primitive { inner: Box<Body>, offset: CVec },
    Convolved { inner: Box<Body>, kernel: Kernel },
    /// Values at t0 + j·dt, interpolated, zero outside the grid.
    Sampled {
        t0: f64,
        dt: f64,
        values: Vec<CVec>,
        hold: Hold,
    },
}

impl Body {
    pub fn zero() -> Body {
        Body::Sum { terms: vec![] }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Body::Sum { terms } if terms.is_empty())
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            Body::Character { c, .. }
            | Body::DampedCharacter { c, .. }
            | Body::Chirp { c }
            | Body::LinearChirp { c }
            | Body::L1Kernel { c, .. } => Some(c.dim()),
            Body::TrigPoly { terms } => terms.first().map(|t| t.c.dim()),
            Body::Translate { inner, .. }
            | Body::Modulate { inner, .. }
            | Body::Scale { inner, .. }
            | Body::Mollified { inner, .. }
            | Body::Convolved { inner, .. } => inner.dim(),
            Body::Primitive { offset, .. } => Some(offset.dim()),
            Body::Sum { terms } => terms.iter().find_map(|t| t.dim()),
            Body::Sampled { values, .. } => values.first().map(|v| v.dim()),
        }
    }

    fn check(&self, d: usize) -> Result<()> {
        let bad = |m: &str| Err(SpectraError::PrecondError(m.to_string()));
        let fin = |x: f64| x.is_finite();
        let cv = |c: &CVec| c.dim() == d && c.is_finite();
        match self {
            Body::Character { omega, c } | Body::DampedCharacter { omega, c, .. }
                if !fin(*omega) || !cv(c) =>
            {
                bad("character needs finite frequency and a d-vector amplitude")
            }
            Body::DampedCharacter { decay, .. } if !(*decay >= 0.0) => bad("decay must be ≥ 0"),
            Body::Chirp { c } | Body::LinearChirp { c } if !cv(c) => bad("amplitude dimension"),
            Body::L1Kernel { kernel, c } => {
                kernel.validate()?;
                if !cv(c) {
                    return bad("amplitude dimension");
                }
                Ok(())
            }
            Body::TrigPoly { terms } => {
                for t in terms {
                    if !fin(t.omega) || !cv(&t.c) {
                        return bad("trig term");
                    }
                }
                Ok(())
            }
            Body::Translate { inner, shift } => {
                if !fin(*shift) {
                    return bad("shift");
                }
                inner.check(d)
            }
            Body::Modulate { inner, omega } => {
                if !fin(*omega) {
                    return bad("modulation frequency");
                }
                inner.check(d)
            }
            Body::Scale { inner, alpha } => {
                if !fin(alpha.re) || !fin(alpha.im) {
                    return bad("scale factor");
                }
                inner.check(d)
            }
            Body::Mollified { inner, h } => {
                if !(*h > 0.0) || !fin(*h) {
                    return bad("mollifier width must be positive");
                }
                inner.check(d)
            }
            Body::Primitive { inner, offset } => {
                if !cv(offset) {
                    return bad("offset dimension");
                }
                inner.check(d)
            }
            Body::Convolved { inner, kernel } => {
                kernel.validate()?;
                inner.check(d)
            }
            Body::Sum { terms } => terms.iter().try_for_each(|t| t.check(d)),
            Body::Sampled { t0, dt, values, .. } => {
                if !fin(*t0) || !(*dt > 0.0) || values.len() < 2 || !values.iter().all(cv) {
                    return bad("sampled grid needs dt > 0, ≥ 2 nodes and d-vector values");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn contains_sampled(&self) -> bool {
        match self {
            Body::Sampled { .. } => true,
            Body::Translate { inner, .. }
            | Body::Modulate { inner, .. }
            | Body::Scale { inner, .. }
            | Body::Mollified { inner, .. }
            | Body::Primitive { inner, .. }
            | Body::Convolved { inner, .. } => inner.contains_sampled(),
            Body::Sum { terms } => terms.iter().any(|t| t.contains_sampled()),
            _ => false,
        }
    }

    /// Certified bound on sup_t ‖φ(t)‖ (∞ when unbounded or unknown).
    pub fn sup_bound(&self) -> f64 {
        match self {
            Body::Character { c, .. }
            | Body::DampedCharacter { c, .. }
            | Body::Chirp { c } => c.norm(),
            Body::TrigPoly { terms } => terms.iter().map(|t| t.c.norm()).sum(),
            Body::LinearChirp { c } => {
                if c.is_zero() {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Body::L1Kernel { kernel, c } => c.norm() * kernel.sup_norm(),
            Body::Translate { inner, .. }
            | Body::Modulate { inner, .. }
            | Body::Mollified { inner, .. } => inner.sup_bound(),
            Body::Scale { inner, alpha } => alpha.norm() * inner.sup_bound(),
            Body::Sum { terms } => terms.iter().map(|t| t.sup_bound()).sum(),
            Body::Primitive { .. } => f64::INFINITY,
            Body::Convolved { inner, kernel } => inner.sup_bound() * kernel.l1_norm(),
            Body::Sampled { values, .. } => values.iter().fold(0.0, |m, v| m.max(v.norm())),
        }
    }

    /// Largest instantaneous frequency near t, used to size quadrature panels.
    pub fn local_frequency(&self, t: f64) -> f64 {
        match self {
            Body::Character { omega, .. } | Body::DampedCharacter { omega, .. } => omega.abs(),
            Body::TrigPoly { terms } => terms.iter().fold(0.0, |m, x| m.max(x.omega.abs())),
            Body::Chirp { .. } => 2.0 * t.abs(),
            Body::LinearChirp { .. } => 1.0,
            Body::L1Kernel { kernel, .. } => kernel.max_frequency(),
            Body::Translate { inner, shift } => inner.local_frequency(t + shift),
            Body::Modulate { inner, omega } => inner.local_frequency(t) + omega.abs(),
            Body::Scale { inner, .. } | Body::Mollified { inner, .. } | Body::Primitive { inner, .. } => {
                inner.local_frequency(t)
            }
            Body::Sum { terms } => terms.iter().fold(0.0, |m, x| m.max(x.local_frequency(t))),
            Body::Convolved { inner, kernel } => {
                inner.local_frequency(t).min(kernel.max_frequency() + 1.0)
            }
            Body::Sampled { dt, .. } => std::f64::consts::PI / dt,
        }
    }

    /// Time beyond which ‖φ(t)‖ is negligible for t → +∞, if known.
    pub fn decay_horizon(&self) -> Option<f64> {
        match self {
            Body::L1Kernel { kernel, .. } => Some(kernel.time_support()),
            Body::DampedCharacter { decay, c, .. } => {
                if *decay > 0.0 {
                    Some((c.norm().max(1e-300) / 1e-14).ln().max(0.0) / decay)
                } else {
                    None
                }
            }
            Body::Translate { inner, shift } => inner.decay_horizon().map(|h| (h - shift).max(0.0)),
            Body::Modulate { inner, .. } | Body::Scale { inner, .. } | Body::Mollified { inner, .. } => {
                inner.decay_horizon()
            }
            Body::Sum { terms } => terms
                .iter()
                .try_fold(0.0f64, |m, t| t.decay_horizon().map(|h| m.max(h))),
            Body::Convolved { inner, kernel } => {
                inner.decay_horizon().map(|h| h + kernel.time_support())
            }
            Body::Sampled { t0, dt, values, .. } => {
                Some((t0 + dt * (values.len() - 1) as f64).max(0.0))
            }
            _ => None,
        }
    }
}

fn zero_if(c: &CVec, b: Body) -> Body {
    if c.is_zero() {
        Body::zero()
    } else {
        b
    }
}

fn trig(terms: Vec<Term>) -> Body {
    let mut terms: Vec<Term> = terms;
    terms.sort_by(|a, b| a.omega.total_cmp(&b.omega));
    let mut out: Vec<Term> = Vec::with_capacity(terms.len());
    for t in terms {
        match out.last_mut() {
            Some(last) if last.omega == t.omega => last.c.axpy(cr(1.0), &t.c),
            _ => out.push(t),
        }
    }
    out.retain(|t| !t.c.is_zero());
    match out.len() {
        0 => Body::zero(),
        1 => {
            let t = out.pop().unwrap();
            Body::Character {
                omega: t.omega,
                c: t.c,
            }
        }
        _ => Body::TrigPoly { terms: out },
    }
}

fn as_terms(b: &Body) -> Option<Vec<Term>> {
    match b {
        Body::Character { omega, c } => Some(vec![Term {
            omega: *omega,
            c: c.clone(),
        }]),
        Body::TrigPoly { terms } => Some(terms.clone()),
        _ => None,
    }
}

fn map_terms(terms: Vec<Term>, f: impl Fn(&Term) -> Term) -> Body {
    trig(terms.iter().map(f).collect())
}

fn distribute(terms: Vec<Body>, f: impl Fn(Body) -> Body) -> Body {
    simplify(Body::Sum {
        terms: terms.into_iter().map(f).collect(),
    })
}

/// Canonical form: flattened sums, merged characters, folded identities.
pub fn simplify(b: Body) -> Body {
    match b {
        Body::Character { omega, c } => zero_if(&c.clone(), Body::Character { omega, c }),
        Body::TrigPoly { terms } => trig(terms),
        Body::DampedCharacter { omega, decay, c } => {
            if decay == 0.0 {
                simplify(Body::Character { omega, c })
            } else {
                zero_if(&c.clone(), Body::DampedCharacter { omega, decay, c })
            }
        }
        Body::Chirp { c } => zero_if(&c.clone(), Body::Chirp { c }),
        Body::LinearChirp { c } => zero_if(&c.clone(), Body::LinearChirp { c }),
        Body::L1Kernel { kernel, c } => zero_if(&c.clone(), Body::L1Kernel { kernel, c }),
        Body::Sampled { .. } => b,
        Body::Translate { inner, shift } => {
            let i = simplify(*inner);
            if shift == 0.0 || i.is_zero() {
                return i;
            }
            if let Some(ts) = as_terms(&i) {
                return map_terms(ts, |t| Term {
                    omega: t.omega,
                    c: t.c.scale(C64::from_polar(1.0, t.omega * shift)),
                });
            }
            match i {
                Body::Chirp { c } => simplify(Body::Modulate {
                    inner: Box::new(Body::Chirp {
                        c: c.scale(C64::from_polar(1.0, shift * shift)),
                    }),
                    omega: 2.0 * shift,
                }),
                Body::LinearChirp { c } => {
                    let ph = C64::from_polar(1.0, shift);
                    simplify(Body::Sum {
                        terms: vec![
                            Body::LinearChirp { c: c.scale(ph) },
                            Body::Character {
                                omega: 1.0,
                                c: c.scale(ph * shift),
                            },
                        ],
                    })
                }
                Body::Translate { inner, shift: s2 } => simplify(Body::Translate {
                    inner,
                    shift: shift + s2,
                }),
                Body::Sum { terms } => distribute(terms, |t| Body::Translate {
                    inner: Box::new(t),
                    shift,
                }),
                Body::Scale { inner, alpha } => simplify(Body::Scale {
                    inner: Box::new(Body::Translate { inner, shift }),
                    alpha,
                }),
                Body::Modulate { inner, omega } => simplify(Body::Scale {
                    inner: Box::new(Body::Modulate {
                        inner: Box::new(Body::Translate { inner, shift }),
                        omega,
                    }),
                    alpha: C64::from_polar(1.0, omega * shift),
                }),
                other => Body::Translate {
                    inner: Box::new(other),
                    shift,
                },
            }
        }
        Body::Modulate { inner, omega } => {
            let i = simplify(*inner);
            if omega == 0.0 || i.is_zero() {
                return i;
            }
            if let Some(ts) = as_terms(&i) {
                return map_terms(ts, |t| Term {
                    omega: t.omega + omega,
                    c: t.c.clone(),
                });
            }
            match i {
                Body::DampedCharacter { omega: w, decay, c } => Body::DampedCharacter {
                    omega: w + omega,
                    decay,
                    c,
                },
                Body::Modulate { inner, omega: w } => simplify(Body::Modulate {
                    inner,
                    omega: omega + w,
                }),
                Body::Sum { terms } => distribute(terms, |t| Body::Modulate {
                    inner: Box::new(t),
                    omega,
                }),
                Body::Scale { inner, alpha } => simplify(Body::Scale {
                    inner: Box::new(Body::Modulate { inner, omega }),
                    alpha,
                }),
                other => Body::Modulate {
                    inner: Box::new(other),
                    omega,
                },
            }
        }
        Body::Sum { terms } => {
            let mut flat = Vec::new();
            for t in terms {
                match simplify(t) {
                    Body::Sum { terms } => flat.extend(terms),
                    x => flat.push(x),
                }
            }
            let mut tri = Vec::new();
            let mut rest = Vec::new();
            for t in flat {
                match as_terms(&t) {
                    Some(ts) => tri.extend(ts),
                    None => rest.push(t),
                }
            }
            let tp = trig(tri);
            let mut out = Vec::new();
            if !tp.is_zero() {
                out.push(tp);
            }
            out.extend(rest);
            if out.len() == 1 {
                out.pop().unwrap()
            } else {
                Body::Sum { terms: out }
            }
        }
        Body::Scale { inner, alpha } => {
            let i = simplify(*inner);
            if alpha == cr(1.0) || i.is_zero() {
                return i;
            }
            if alpha == cr(0.0) {
                return Body::zero();
            }
            if let Some(ts) = as_terms(&i) {
                return map_terms(ts, |t| Term {
                    omega: t.omega,
                    c: t.c.scale(alpha),
                });
            }
            match i {
                Body::DampedCharacter { omega, decay, c } => Body::DampedCharacter {
                    omega,
                    decay,
                    c: c.scale(alpha),
                },
                Body::Chirp { c } => Body::Chirp { c: c.scale(alpha) },
                Body::LinearChirp { c } => Body::LinearChirp { c: c.scale(alpha) },
                Body::L1Kernel { kernel, c } => Body::L1Kernel {
                    kernel,
                    c: c.scale(alpha),
                },
                Body::Scale { inner, alpha: a2 } => simplify(Body::Scale {
                    inner,
                    alpha: alpha * a2,
                }),
                Body::Sum { terms } => distribute(terms, |t| Body::Scale {
                    inner: Box::new(t),
                    alpha,
                }),
                other => Body::Scale {
                    inner: Box::new(other),
                    alpha,
                },
            }
        }
        Body::Mollified { inner, h } => {
            let i = simplify(*inner);
            if i.is_zero() {
                return i;
            }
            if let Some(ts) = as_terms(&i) {
                return map_terms(ts, |t| Term {
                    omega: t.omega,
                    c: t.c.scale(exprel(I * (t.omega * h))),
                });
            }
            match i {
                Body::Sum { terms } => distribute(terms, |t| Body::Mollified {
                    inner: Box::new(t),
                    h,
                }),
                Body::Scale { inner, alpha } => simplify(Body::Scale {
                    inner: Box::new(Body::Mollified { inner, h }),
                    alpha,
                }),
                other => Body::Mollified {
                    inner: Box::new(other),
                    h,
                },
            }
        }
        Body::Primitive { inner, offset } => {
            let i = simplify(*inner);
            if i.is_zero() {
                return simplify(Body::Character {
                    omega: 0.0,
                    c: offset,
                });
            }
            if let Some(ts) = as_terms(&i) {
                if ts.iter().all(|t| t.omega != 0.0) {
                    let mut out = vec![Term {
                        omega: 0.0,
                        c: offset,
                    }];
                    for t in ts {
                        let a = t.c.scale(cr(1.0) / (I * t.omega));
                        out[0].c.axpy(cr(-1.0), &a);
                        out.push(Term { omega: t.omega, c: a });
                    }
                    return trig(out);
                }
            }
            Body::Primitive {
                inner: Box::new(i),
                offset,
            }
        }
        Body::Convolved { inner, kernel } => {
            let i = simplify(*inner);
            if i.is_zero() {
                return i;
            }
            if let Some(ts) = as_terms(&i) {
                return map_terms(ts, |t| Term {
                    omega: t.omega,
                    c: t.c.scale(kernel.freq(t.omega)),
                });
            }
            match i {
                Body::Sum { terms } => distribute(terms, |t| Body::Convolved {
                    inner: Box::new(t),
                    kernel: kernel.clone(),
                }),
                Body::Scale { inner, alpha } => simplify(Body::Scale {
                    inner: Box::new(Body::Convolved { inner, kernel }),
                    alpha,
                }),
                other => Body::Convolved {
                    inner: Box::new(other),
                    kernel,
                },
            }
        }
    }
}

/// Body of t ↦ φ(−t).
pub fn reflect_body(b: &Body) -> Result<Body> {
    Ok(match b {
        Body::Character { omega, c } => Body::Character {
            omega: -omega,
            c: c.clone(),
        },
        Body::TrigPoly { terms } => Body::TrigPoly {
            terms: terms
                .iter()
                .map(|t| Term {
                    omega: -t.omega,
                    c: t.c.clone(),
                })
                .collect(),
        },
        Body::DampedCharacter { .. } => {
            return Err(SpectraError::PrecondError(
                "reflection of a causal damped character is not representable".into(),
            ))
        }
        Body::Chirp { c } => Body::Chirp { c: c.clone() },
        Body::LinearChirp { c } => Body::Modulate {
            inner: Box::new(Body::LinearChirp { c: c.scale(cr(-1.0)) }),
            omega: -2.0,
        },
        Body::L1Kernel { kernel, c } => Body::L1Kernel {
            kernel: kernel.reflect(),
            c: c.clone(),
        },
        Body::Translate { inner, shift } => Body::Translate {
            inner: Box::new(reflect_body(inner)?),
            shift: -shift,
        },
        Body::Modulate { inner, omega } => Body::Modulate {
            inner: Box::new(reflect_body(inner)?),
            omega: -omega,
        },
        Body::Sum { terms } => Body::Sum {
            terms: terms.iter().map(reflect_body).collect::<Result<_>>()?,
        },
        Body::Scale { inner, alpha } => Body::Scale {
            inner: Box::new(reflect_body(inner)?),
            alpha: *alpha,
        },
        Body::Mollified { inner, h } => Body::Translate {
            inner: Box::new(Body::Mollified {
                inner: Box::new(reflect_body(inner)?),
                h: *h,
            }),
            shift: -h,
        },
        Body::Primitive { inner, offset } => Body::Scale {
            inner: Box::new(Body::Primitive {
                inner: Box::new(reflect_body(inner)?),
                offset: offset.scale(cr(-1.0)),
            }),
            alpha: cr(-1.0),
        },
        Body::Convolved { inner, kernel } => Body::Convolved {
            inner: Box::new(reflect_body(inner)?),
            kernel: kernel.reflect(),
        },
        Body::Sampled {
            t0,
            dt,
            values,
            hold,
        } => {
            let n = values.len();
            let mut v = values.clone();
            v.reverse();
            Body::Sampled {
                t0: -(t0 + dt * (n - 1) as f64),
                dt: *dt,
                values: v,
                hold: *hold,
            }
        }
    })
}

/// Full-line value of a body.
pub fn eval_body(b: &Body, t: f64, d: usize) -> Result<CVec> {
    Ok(match b {
        Body::Character { omega, c } => c.scale(C64::from_polar(1.0, omega * t)),
        Body::TrigPoly { terms } => {
            let mut acc = CVec::zeros(d);
            for x in terms {
                acc.axpy(C64::from_polar(1.0, x.omega * t), &x.c);
            }
            acc
        }
        Body::DampedCharacter { omega, decay, c } => {
            if t < 0.0 {
                CVec::zeros(d)
            } else {
                c.scale(C64::from_polar((-decay * t).exp(), omega * t))
            }
        }
        Body::Chirp { c } => c.scale(C64::from_polar(1.0, t * t)),
        Body::LinearChirp { c } => c.scale(C64::from_polar(t, t)),
        Body::L1Kernel { kernel, c } => c.scale(kernel.time(t)),
        Body::Translate { inner, shift } => eval_body(inner, t + shift, d)?,
        Body::Modulate { inner, omega } => {
            eval_body(inner, t, d)?.scale(C64::from_polar(1.0, omega * t))
        }
        Body::Sum { terms } => {
            let mut acc = CVec::zeros(d);
            for x in terms {
                acc += eval_body(x, t, d)?;
            }
            acc
        }
        Body::Scale { inner, alpha } => eval_body(inner, t, d)?.scale(*alpha),
        Body::Mollified { inner, h } => {
            let z = cr(0.0);
            let a = crate::transforms::partial_laplace_body(inner, z, t + h, d)?;
            let b0 = crate::transforms::partial_laplace_body(inner, z, t, d)?;
            (a.v - b0.v).scale(cr(1.0 / h))
        }
        Body::Primitive { inner, offset } => {
            crate::transforms::partial_laplace_body(inner, cr(0.0), t, d)?.v + offset.clone()
        }
        Body::Convolved { inner, kernel } => {
            crate::spectral::convolve_body(inner, kernel, t, d, false)?.v
        }
        Body::Sampled { t0, dt, values, .. } => {
            let x = (t - t0) / dt;
            let n = values.len();
            if x < 0.0 || x > (n - 1) as f64 {
                CVec::zeros(d)
            } else {
                let j = (x.floor() as usize).min(n - 2);
                let u = x - j as f64;
                let mut v = values[j].scale(cr(1.0 - u));
                v.axpy(cr(u), &values[j + 1]);
                v
            }
        }
    })
}

fn ser_bound<S: Serializer>(b: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if b.is_finite() {
        s.serialize_f64(*b)
    } else {
        s.serialize_str("inf")
    }
}

fn de_bound<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum B {
        N(f64),
        S(String),
    }
    match B::deserialize(d)? {
        B::N(x) => Ok(x),
        B::S(s) if s == "inf" => Ok(f64::INFINITY),
        B::S(s) => Err(serde::de::Error::custom(format!("bad sup_norm_bound {s}"))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionDescriptor {
    pub domain: Domain,
    pub dim: usize,
    pub body: Body,
    #[serde(serialize_with = "ser_bound", deserialize_with = "de_bound")]
    pub sup_norm_bound: f64,
}

impl FunctionDescriptor {
    /// Validates and canonicalizes a body.
    pub fn new(domain: Domain, dim: usize, body: Body) -> Result<Self> {
        if dim == 0 {
            return Err(SpectraError::PrecondError("dimension must be positive".into()));
        }
        body.check(dim)?;
        let body = simplify(body);
        let sup_norm_bound = body.sup_bound();
        Ok(FunctionDescriptor {
            domain,
            dim,
            body,
            sup_norm_bound,
        })
    }

    fn derived(&self, body: Body) -> Result<Self> {
        FunctionDescriptor::new(self.domain, self.dim, body)
    }

    pub fn full(body: Body) -> Result<Self> {
        let d = body
            .dim()
            .ok_or_else(|| SpectraError::PrecondError("cannot infer dimension".into()))?;
        FunctionDescriptor::new(Domain::FullLine, d, body)
    }

    pub fn character(omega: f64, c: C64) -> Self {
        FunctionDescriptor::full(Body::Character {
            omega,
            c: CVec::scalar(c),
        })
        .unwrap()
    }

    pub fn trig_poly(terms: &[(f64, C64)]) -> Self {
        FunctionDescriptor::full(Body::TrigPoly {
            terms: terms
                .iter()
                .map(|&(omega, c)| Term {
                    omega,
                    c: CVec::scalar(c),
                })
                .collect(),
        })
        .unwrap()
    }

    pub fn chirp() -> Self {
        FunctionDescriptor::full(Body::Chirp {
            c: CVec::scalar(cr(1.0)),
        })
        .unwrap()
    }

    pub fn linear_chirp() -> Self {
        FunctionDescriptor::full(Body::LinearChirp {
            c: CVec::scalar(cr(1.0)),
        })
        .unwrap()
    }

    pub fn kernel(k: Kernel) -> Result<Self> {
        FunctionDescriptor::full(Body::L1Kernel {
            kernel: k,
            c: CVec::scalar(cr(1.0)),
        })
    }

    pub fn zero(domain: Domain, dim: usize) -> Self {
        FunctionDescriptor::new(domain, dim, Body::zero()).unwrap()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: FunctionDescriptor = serde_json::from_str(s)?;
        if raw.dim == 0 {
            return Err(SpectraError::Parse("dim must be positive".into()));
        }
        raw.body.check(raw.dim)?;
        if raw.sup_norm_bound.is_nan() || raw.sup_norm_bound < 0.0 {
            return Err(SpectraError::Parse("sup_norm_bound must be ≥ 0".into()));
        }
        let body = simplify(raw.body);
        Ok(FunctionDescriptor { body, ..raw })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("descriptor serializes")
    }

    pub fn is_bounded(&self) -> bool {
        self.sup_norm_bound.is_finite()
    }

    /// False when any part is interpolated from samples.
    pub fn is_exact(&self) -> bool {
        !self.body.contains_sampled()
    }

    pub fn evaluate(&self, t: f64) -> Result<CVec> {
        if self.domain == Domain::HalfLine && t < 0.0 {
            return Err(SpectraError::DomainError(format!("t = {t} < 0 on ℝ₊")));
        }
        eval_body(&self.body, t, self.dim)
    }

    pub fn translate(&self, s: f64) -> Result<Self> {
        if self.domain == Domain::HalfLine && s < 0.0 {
            return Err(SpectraError::DomainError(format!(
                "negative shift {s} on ℝ₊"
            )));
        }
        self.derived(Body::Translate {
            inner: Box::new(self.body.clone()),
            shift: s,
        })
    }

    pub fn modulate(&self, omega: f64) -> Self {
        self.derived(Body::Modulate {
            inner: Box::new(self.body.clone()),
            omega,
        })
        .expect("modulation of a valid descriptor")
    }

    pub fn scale(&self, alpha: C64) -> Self {
        self.derived(Body::Scale {
            inner: Box::new(self.body.clone()),
            alpha,
        })
        .expect("scaling of a valid descriptor")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim || self.domain != other.domain {
            return Err(SpectraError::PrecondError(
                "sum needs equal dimension and domain".into(),
            ));
        }
        self.derived(Body::Sum {
            terms: vec![self.body.clone(), other.body.clone()],
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(cr(-1.0)))
    }

    pub fn mollify(&self, h: f64) -> Result<Self> {
        self.derived(Body::Mollified {
            inner: Box::new(self.body.clone()),
            h,
        })
    }

    pub fn primitive(&self, offset: CVec) -> Result<Self> {
        self.derived(Body::Primitive {
            inner: Box::new(self.body.clone()),
            offset,
        })
    }

    pub fn convolve_with(&self, k: &Kernel) -> Result<Self> {
        self.derived(Body::Convolved {
            inner: Box::new(self.body.clone()),
            kernel: k.clone(),
        })
    }

    /// φ|ℝ₊ extended by zero.
    pub fn restrict_and_extend(&self) -> Result<Self> {
        fn slice(b: Body) -> Body {
            match b {
                Body::Sampled {
                    t0,
                    dt,
                    values,
                    hold,
                } if t0 < 0.0 => {
                    let first = (-t0 / dt).ceil() as usize;
                    if first + 1 >= values.len() {
                        return Body::Sampled {
                            t0,
                            dt,
                            values,
                            hold,
                        };
                    }
                    Body::Sampled {
                        t0: t0 + first as f64 * dt,
                        dt,
                        values: values[first..].to_vec(),
                        hold,
                    }
                }
                Body::Sum { terms } => Body::Sum {
                    terms: terms.into_iter().map(slice).collect(),
                },
                Body::Scale { inner, alpha } => Body::Scale {
                    inner: Box::new(slice(*inner)),
                    alpha,
                },
                other => other,
            }
        }
        let mut out = self.clone();
        out.domain = Domain::HalfLine;
        out.body = slice(out.body);
        Ok(out)
    }

    /// t ↦ φ(−t), full line only.
    pub fn reflect(&self) -> Result<Self> {
        if self.domain != Domain::FullLine {
            return Err(SpectraError::DomainError("reflection needs ℝ".into()));
        }
        self.derived(reflect_body(&self.body)?)
    }

    /// Scale used to make thresholds relative.
    pub fn scale_value(&self) -> f64 {
        if self.sup_norm_bound.is_finite() && self.sup_norm_bound > 0.0 {
            self.sup_norm_bound
        } else {
            1.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: &CVec, b: &CVec, tol: f64) -> bool {
        a.dist(b) <= tol
    }

    #[test]
    fn evaluate_examples() {
        let g = FunctionDescriptor::character(1.0, cr(1.0));
        assert!(close(&g.evaluate(PI).unwrap(), &CVec::scalar(cr(-1.0)), 1e-15));
        assert_eq!(
            FunctionDescriptor::chirp().evaluate(0.0).unwrap(),
            CVec::scalar(cr(1.0))
        );
        let m = g.mollify(PI).unwrap();
        assert!(matches!(m.body, Body::Character { .. }));
        let v = m.evaluate(0.0).unwrap();
        assert!((v.0[0] - C64::new(0.0, 2.0 / PI)).norm() < 1e-15);
    }

    #[test]
    fn translate_examples() {
        let g2 = FunctionDescriptor::character(2.0, cr(1.0));
        assert_eq!(g2.translate(0.0).unwrap(), g2);
        let g1 = FunctionDescriptor::character(1.0, cr(1.0));
        let v = g1.translate(PI).unwrap().evaluate(0.0).unwrap();
        assert!((v.0[0] + 1.0).norm() < 1e-15);
        let c = FunctionDescriptor::chirp().translate(1.0).unwrap();
        let v = c.evaluate(2.0).unwrap();
        assert!((v.0[0] - C64::from_polar(1.0, 9.0)).norm() < 1e-14);
        let h = g1.restrict_and_extend().unwrap();
        assert!(h.translate(-1.0).is_err());
        assert!(h.evaluate(-0.5).is_err());
    }

    #[test]
    fn modulate_examples() {
        let g1 = FunctionDescriptor::character(1.0, cr(1.0));
        assert_eq!(g1.modulate(-1.0), FunctionDescriptor::character(0.0, cr(1.0)));
        let v = FunctionDescriptor::chirp().modulate(3.0).evaluate(1.0).unwrap();
        assert!((v.0[0] - C64::from_polar(1.0, 4.0)).norm() < 1e-15);
        let s2 = 2f64.sqrt();
        let tp = FunctionDescriptor::trig_poly(&[(1.0, cr(1.0)), (s2, cr(1.0))]).modulate(5.0);
        assert_eq!(
            tp,
            FunctionDescriptor::trig_poly(&[(6.0, cr(1.0)), (5.0 + s2, cr(1.0))])
        );
        let c = FunctionDescriptor::chirp();
        assert_eq!(c.modulate(0.0), c);
        assert_eq!(c.modulate(1.0).modulate(2.0), c.modulate(3.0));
    }

    #[test]
    fn restrict_slices_samples() {
        let vals: Vec<CVec> = (0..11).map(|j| CVec::scalar(cr(j as f64))).collect();
        let s = FunctionDescriptor::full(Body::Sampled {
            t0: -5.0,
            dt: 1.0,
            values: vals,
            hold: Hold::Linear,
        })
        .unwrap();
        let r = s.restrict_and_extend().unwrap();
        match &r.body {
            Body::Sampled { t0, values, .. } => {
                assert_eq!(*t0, 0.0);
                assert_eq!(values.len(), 6);
            }
            _ => panic!(),
        }
        assert_eq!(r.evaluate(2.5).unwrap(), s.evaluate(2.5).unwrap());
    }

    #[test]
    fn primitive_and_unbounded() {
        let one = FunctionDescriptor::character(0.0, cr(1.0));
        let p = one.primitive(CVec::scalar(cr(0.0))).unwrap();
        assert!((p.evaluate(7.0).unwrap().0[0] - cr(7.0)).norm() < 1e-13);
        assert!(!p.is_bounded());
        assert!(!FunctionDescriptor::linear_chirp().is_bounded());
        let pg = FunctionDescriptor::character(2.0, cr(1.0))
            .primitive(CVec::scalar(cr(0.0)))
            .unwrap();
        assert!(pg.is_bounded());
    }

    #[test]
    fn json_roundtrip() {
        let d = FunctionDescriptor::chirp()
            .translate(0.3)
            .unwrap()
            .mollify(0.7)
            .unwrap();
        let s = d.to_json();
        let back = FunctionDescriptor::from_json(&s).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.to_json(), s);
        let u = FunctionDescriptor::linear_chirp().to_json();
        assert!(u.contains("\"sup_norm_bound\":\"inf\""));
        assert!(FunctionDescriptor::from_json("{\"domain\":\"R\"}").is_err());
    }

    #[test]
    fn zero_sum_cancels() {
        let c = FunctionDescriptor::character(0.0, cr(1.0));
        let z = c.sub(&c.translate(0.5).unwrap()).unwrap();
        assert!(z.body.is_zero());
        assert_eq!(z.evaluate(3.0).unwrap(), CVec::scalar(cr(0.0)));
    }

    #[test]
    fn reflect_rules() {
        let t = 0.7;
        for d in [
            FunctionDescriptor::linear_chirp(),
            FunctionDescriptor::chirp().mollify(0.5).unwrap(),
            FunctionDescriptor::chirp().modulate(1.5),
            FunctionDescriptor::character(1.0, cr(1.0))
                .primitive(CVec::scalar(cr(2.0)))
                .unwrap(),
        ] {
            let r = d.reflect().unwrap();
            let a = r.evaluate(t).unwrap();
            let b = d.evaluate(-t).unwrap();
            assert!(a.dist(&b) < 1e-12, "{d:?}");
        }
    }
}
