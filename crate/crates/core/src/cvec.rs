use crate::quad::Accumulate;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

pub type C64 = Complex<f64>;

pub const I: C64 = Complex::new(0.0, 1.0);

pub fn cr(x: f64) -> C64 {
    Complex::new(x, 0.0)
}

/// Element of ℂᵈ. The norm is the largest component modulus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CVec(pub Vec<C64>);

impl CVec {
    pub fn zeros(d: usize) -> Self {
        CVec(vec![cr(0.0); d])
    }
    pub fn scalar(z: C64) -> Self {
        CVec(vec![z])
    }
    pub fn dim(&self) -> usize {
        self.0.len()
    }
    pub fn norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
    pub fn scale(&self, a: C64) -> Self {
        CVec(self.0.iter().map(|z| z * a).collect())
    }
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }
    pub fn axpy(&mut self, a: C64, x: &CVec) {
        for (u, v) in self.0.iter_mut().zip(&x.0) {
            *u += a * v;
        }
    }
    pub fn dist(&self, other: &CVec) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }
    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Add for CVec {
    type Output = CVec;
    fn add(mut self, o: CVec) -> CVec {
        self += o;
        self
    }
}

impl AddAssign for CVec {
    fn add_assign(&mut self, o: CVec) {
        for (u, v) in self.0.iter_mut().zip(o.0) {
            *u += v;
        }
    }
}

impl Sub for CVec {
    type Output = CVec;
    fn sub(self, o: CVec) -> CVec {
        CVec(self.0.into_iter().zip(o.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for CVec {
    type Output = CVec;
    fn neg(self) -> CVec {
        CVec(self.0.into_iter().map(|a| -a).collect())
    }
}

impl Mul<C64> for CVec {
    type Output = CVec;
    fn mul(self, a: C64) -> CVec {
        CVec(self.0.into_iter().map(|z| z * a).collect())
    }
}

impl Accumulate<f64> for CVec {
    fn zero_like(&self) -> Self {
        CVec::zeros(self.dim())
    }
    fn add_scaled(&mut self, w: f64, x: &Self) {
        for (a, b) in self.0.iter_mut().zip(&x.0) {
            *a += b * w;
        }
    }
    fn norm(&self) -> f64 {
        CVec::norm(self)
    }
    fn dist(&self, other: &Self) -> f64 {
        CVec::dist(self, other)
    }
}

/// A vector value with an absolute error estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct Est {
    pub v: CVec,
    pub err: f64,
}

impl Est {
    pub fn exact(v: CVec) -> Self {
        let err = 4.0 * f64::EPSILON * v.norm();
        Est { v, err }
    }
    pub fn new(v: CVec, err: f64) -> Self {
        Est { v, err }
    }
    pub fn zeros(d: usize) -> Self {
        Est {
            v: CVec::zeros(d),
            err: 0.0,
        }
    }
    pub fn scale(&self, a: C64) -> Self {
        Est {
            v: self.v.scale(a),
            err: self.err * a.norm(),
        }
    }
    pub fn plus(mut self, o: &Est) -> Self {
        self.v.axpy(cr(1.0), &o.v);
        self.err += o.err;
        self
    }
    pub fn minus(mut self, o: &Est) -> Self {
        self.v.axpy(cr(-1.0), &o.v);
        self.err += o.err;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_is_max_modulus() {
        let v = CVec(vec![Complex::new(3.0, 4.0), cr(-6.0)]);
        assert_eq!(v.norm(), 6.0);
    }

    #[test]
    fn serde_shape() {
        let v = CVec(vec![Complex::new(1.0, -2.0)]);
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, "[[1.0,-2.0]]");
        let back: CVec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
