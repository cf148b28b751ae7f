//! Matrix semigroups T(t) = e^{tA} on ℂᵈ, their resolvents and orbits.

use crate::cvec::{cr, CVec, C64};
use crate::error::{Result, SpectraError};
use crate::func_model::{Body, Domain, FunctionDescriptor};
use crate::spectra::{
    beurling_spectrum, carleman_spectrum, laplace_spectrum, EstimatorParams, FrequencyGrid,
    SpectrumEstimate, SpectrumKind,
};
use crate::transforms::{laplace, laplace_direct, TransformSettings};
use nalgebra::{DMatrix, DVector, Schur, SVD};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeSet;

/// Eigenvalues closer than this are one cluster.
const CLUSTER_TOL: f64 = 1e-8;
/// Resolvent points closer than this to σ(A) are refused.
const RESOLVENT_GAP: f64 = 1e-8;
/// Eigen-coordinates at or below this are absent from an orbit.
const COEF_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct SemigroupSystem {
    pub a: DMatrix<C64>,
    /// Eigenvalues with multiplicity, in the column order of `v`.
    pub eig: Vec<C64>,
    /// Cluster index of each eigenvalue.
    cluster: Vec<usize>,
    /// Distinct eigenvalues (cluster representatives).
    pub distinct: Vec<C64>,
    v: DMatrix<C64>,
    v_inv: DMatrix<C64>,
    /// Bounded group: every eigenvalue on iℝ.
    pub group_flag: bool,
    /// Bounded on ℝ₊: no eigenvalue in the open right half-plane.
    pub bounded: bool,
}

fn imag_tol(norm: f64) -> f64 {
    1e-10 * norm.max(1.0)
}

impl SemigroupSystem {
    /// Diagonalizes `a`; rejects defective or non-square input.
    pub fn new(a: DMatrix<C64>) -> Result<Self> {
        let d = a.nrows();
        if d == 0 || a.ncols() != d {
            return Err(SpectraError::PrecondError("generator must be a non-empty square matrix".into()));
        }
        if a.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(SpectraError::PrecondError("generator has non-finite entries".into()));
        }
        let norm = a.norm();
        let schur = Schur::try_new(a.clone(), f64::EPSILON, 10_000)
            .ok_or_else(|| SpectraError::PrecondError("Schur iteration did not converge".into()))?;
        let (_, t) = schur.unpack();
        let mut raw: Vec<C64> = (0..d).map(|k| t[(k, k)]).collect();
        raw.sort_by(|x, y| x.im.total_cmp(&y.im).then(x.re.total_cmp(&y.re)));

        // greedy clustering, representative = mean
        let mut groups: Vec<Vec<C64>> = Vec::new();
        for z in raw {
            let tol = CLUSTER_TOL * norm.max(1.0);
            match groups.iter_mut().find(|g| (g[0] - z).norm() <= tol) {
                Some(g) => g.push(z),
                None => groups.push(vec![z]),
            }
        }
        let itol = imag_tol(norm);
        let distinct: Vec<C64> = groups
            .iter()
            .map(|g| {
                let m = g.iter().sum::<C64>() / g.len() as f64;
                if m.re.abs() <= itol {
                    C64::new(0.0, m.im)
                } else {
                    m
                }
            })
            .collect();

        let null_tol = 1e-7 * norm.max(1.0);
        let mut v = DMatrix::<C64>::zeros(d, d);
        let mut eig = Vec::with_capacity(d);
        let mut cluster = Vec::with_capacity(d);
        let mut col = 0;
        for (ci, (mu, g)) in distinct.iter().zip(&groups).enumerate() {
            let m = g.len();
            let shifted = &a - DMatrix::<C64>::identity(d, d) * *mu;
            let svd = SVD::new(shifted, false, true);
            let vt = svd.v_t.as_ref().expect("right singular vectors requested");
            let small = svd.singular_values.iter().filter(|&&s| s <= null_tol).count();
            if small < m {
                return Err(SpectraError::NonDiagonalizable(format!(
                    "eigenvalue {mu} has algebraic multiplicity {m} but geometric multiplicity {small}"
                )));
            }
            for r in d - m..d {
                for i in 0..d {
                    v[(i, col)] = vt[(r, i)].conj();
                }
                eig.push(*mu);
                cluster.push(ci);
                col += 1;
            }
        }
        let v_inv = v
            .clone()
            .try_inverse()
            .ok_or_else(|| SpectraError::NonDiagonalizable("eigenvector matrix is singular".into()))?;
        let lam = DMatrix::from_diagonal(&DVector::from_vec(eig.clone()));
        let recon = (&v * lam * &v_inv - &a).norm();
        if recon > 1e-10 * norm.max(f64::MIN_POSITIVE) {
            return Err(SpectraError::NonDiagonalizable(format!(
                "eigen-decomposition reproduces A only to {recon:.3e}"
            )));
        }
        let group_flag = distinct.iter().all(|z| z.re == 0.0);
        let bounded = distinct.iter().all(|z| z.re <= 0.0);
        Ok(SemigroupSystem {
            a,
            eig,
            cluster,
            distinct,
            v,
            v_inv,
            group_flag,
            bounded,
        })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(SpectraError::Parse("matrix rows must all have length d".into()));
        }
        Self::new(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
    }

    pub fn diagonal(mu: &[C64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_vec(mu.to_vec())))
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// e^{tA} = V e^{tΛ} V⁻¹.
    pub fn exp(&self, t: f64) -> DMatrix<C64> {
        let e = DVector::from_iterator(self.eig.len(), self.eig.iter().map(|m| (m * t).exp()));
        &self.v * DMatrix::from_diagonal(&e) * &self.v_inv
    }

    /// ‖V‖·‖V⁻¹‖ (Frobenius), a bound on sup_t ‖e^{tA}‖ where the semigroup is bounded.
    pub fn exp_bound(&self) -> f64 {
        self.v.norm() * self.v_inv.norm()
    }

    fn gap(&self, lambda: C64) -> f64 {
        self.distinct
            .iter()
            .fold(f64::INFINITY, |m, z| m.min((lambda - z).norm()))
    }

    /// (λI − A)⁻¹ by LU, with one refinement step.
    pub fn resolvent(&self, lambda: C64) -> Result<DMatrix<C64>> {
        let g = self.gap(lambda);
        if g < RESOLVENT_GAP {
            return Err(SpectraError::SingularMatrix(format!(
                "λ = {lambda} lies within {g:.3e} of the spectrum"
            )));
        }
        let d = self.dim();
        let id = DMatrix::<C64>::identity(d, d);
        let m = &id * lambda - &self.a;
        let mut r = m
            .clone()
            .lu()
            .try_inverse()
            .ok_or_else(|| SpectraError::SingularMatrix(format!("λI − A singular at λ = {lambda}")))?;
        let mut res = (&m * &r - &id).norm();
        if res > 1e-10 {
            r = &r + &r * (&id - &m * &r);
            res = (&m * &r - &id).norm();
        }
        if res > 1e-10 {
            return Err(SpectraError::SingularMatrix(format!(
                "resolvent residual {res:.3e} at λ = {lambda}"
            )));
        }
        Ok(r)
    }

    /// Per-cluster eigen-components of x: (μ, Σ_k V[:,k](V⁻¹x)_k).
    fn components(&self, x: &CVec) -> Result<Vec<(C64, CVec)>> {
        let d = self.dim();
        if x.dim() != d {
            return Err(SpectraError::PrecondError(format!(
                "vector has dimension {}, system has {d}",
                x.dim()
            )));
        }
        let y = &self.v_inv * DVector::from_vec(x.0.clone());
        let mut out = Vec::new();
        for (ci, mu) in self.distinct.iter().enumerate() {
            let mut c = CVec::zeros(d);
            for k in (0..d).filter(|&k| self.cluster[k] == ci) {
                for i in 0..d {
                    c.0[i] += self.v[(i, k)] * y[k];
                }
            }
            if c.norm() > COEF_TOL {
                out.push((*mu, c));
            }
        }
        Ok(out)
    }

    /// σ(A_x): eigenvalues whose eigen-component of x is present.
    pub fn sigma_x(&self, x: &CVec) -> Result<Vec<C64>> {
        Ok(self.components(x)?.into_iter().map(|(m, _)| m).collect())
    }

    /// t ↦ e^{tA}x as a descriptor: on ℝ for groups, on ℝ₊ otherwise.
    pub fn orbit(&self, x: &CVec) -> Result<FunctionDescriptor> {
        let mut terms = Vec::new();
        for (mu, c) in self.components(x)? {
            if mu.re > 0.0 {
                return Err(SpectraError::PrecondError(format!(
                    "orbit grows like e^{{{:.3}t}}; only bounded orbits are representable",
                    mu.re
                )));
            }
            terms.push(if mu.re == 0.0 {
                Body::Character { omega: mu.im, c }
            } else {
                Body::DampedCharacter {
                    omega: mu.im,
                    decay: -mu.re,
                    c,
                }
            });
        }
        let domain = if self.group_flag {
            Domain::FullLine
        } else {
            Domain::HalfLine
        };
        FunctionDescriptor::new(domain, self.dim(), Body::Sum { terms })
    }

    /// Im of σ(A_x) ∩ iℝ, or of σ(A) ∩ iℝ when `x` is `None`.
    pub fn imaginary_frequencies(&self, x: Option<&CVec>) -> Result<Vec<f64>> {
        let mus = match x {
            Some(x) => self.sigma_x(x)?,
            None => self.distinct.clone(),
        };
        Ok(mus.into_iter().filter(|m| m.re == 0.0).map(|m| m.im).collect())
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| [self.a[(i, j)].re, self.a[(i, j)].im]).collect())
            .collect();
        serde_json::json!({ "A": rows }).to_string()
    }

    /// Parses `{"A": [[entry, ...], ...]}` with entries `[re, im]` or plain reals.
    pub fn from_json(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s)?;
        let rows = v
            .get("A")
            .and_then(Value::as_array)
            .ok_or_else(|| SpectraError::Parse("matrix JSON needs an \"A\" array".into()))?;
        let entry = |e: &Value| -> Result<C64> {
            if let Some(x) = e.as_f64() {
                return Ok(cr(x));
            }
            match e.as_array().map(|p| p.as_slice()) {
                Some([re, im]) => match (re.as_f64(), im.as_f64()) {
                    (Some(re), Some(im)) => Ok(C64::new(re, im)),
                    _ => Err(SpectraError::Parse(format!("bad matrix entry {e}"))),
                },
                _ => Err(SpectraError::Parse(format!("bad matrix entry {e}"))),
            }
        };
        let parsed = rows
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| SpectraError::Parse("matrix row must be an array".into()))?
                    .iter()
                    .map(entry)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(&parsed)
    }
}

/// Largest distance between ℒ(T(·)x)(λ) and R(λ)x over `lambdas`.
///
/// The transform is taken twice: from the orbit descriptor in closed form and
/// by direct quadrature of t ↦ e^{tA}x evaluated through the matrix exponential.
pub fn orbit_laplace_check(sys: &SemigroupSystem, x: &CVec, lambdas: &[C64]) -> Result<f64> {
    if !sys.bounded {
        return Err(SpectraError::PrecondError("semigroup is not bounded on ℝ₊".into()));
    }
    let orbit = sys.orbit(x)?;
    let d = sys.dim();
    let xv = DVector::from_vec(x.0.clone());
    let bound = sys.exp_bound() * x.norm() * (d as f64).sqrt();
    let rate = sys.distinct.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
    let settings = TransformSettings::default();
    let mut worst: f64 = 0.0;
    for &lam in lambdas {
        if !(lam.re > 0.0) {
            return Err(SpectraError::PrecondError(format!("Re λ must be positive, got {lam}")));
        }
        let rx = CVec((sys.resolvent(lam)? * &xv).iter().copied().collect());
        let closed = laplace(&orbit, lam)?;
        let direct = laplace_direct(
            |t| Ok(CVec((sys.exp(t) * &xv).iter().copied().collect())),
            d,
            bound,
            lam,
            |_| rate,
            &settings,
        )?;
        worst = worst.max(closed.value.dist(&rx)).max(direct.value.dist(&rx));
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub identity: String,
    pub x_id: Option<usize>,
    pub kind: SpectrumKind,
    pub expected: Vec<f64>,
    pub singular: Vec<f64>,
    pub undecided: Vec<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct OrbitEstimate {
    pub x_id: usize,
    pub estimate: SpectrumEstimate,
}

#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
    pub estimates: Vec<OrbitEstimate>,
    pub pass: bool,
}

impl IdentityReport {
    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

fn node_set(grid: &FrequencyGrid, freqs: &[f64]) -> BTreeSet<usize> {
    let lo = grid.omega_min - 0.5 * grid.step;
    let hi = grid.omega_max + 0.5 * grid.step;
    freqs
        .iter()
        .filter(|&&w| w >= lo && w <= hi)
        .map(|&w| grid.nearest(w))
        .collect()
}

fn points(grid: &FrequencyGrid, idx: &BTreeSet<usize>) -> Vec<f64> {
    idx.iter().map(|&k| grid.point(k)).collect()
}

fn spans(xs: &[CVec], d: usize) -> bool {
    if xs.len() < d {
        return false;
    }
    let m = DMatrix::from_fn(d, xs.len(), |i, j| xs[j].0[i]);
    let s = m.singular_values();
    s.iter().filter(|&&v| v > 1e-10 * s[0].max(f64::MIN_POSITIVE)).count() == d
}

/// Orbit-spectrum identities: Singular(orbit) = Im(σ(A_x) ∩ iℝ) per vector, agreement
/// of the Laplace, Carleman and Beurling sets for groups, and the union over a
/// spanning set covering Im(σ(A) ∩ iℝ).
pub fn verify_spectral_identities(
    sys: &SemigroupSystem,
    xs: &[CVec],
    grid: &FrequencyGrid,
    params: &EstimatorParams,
) -> Result<IdentityReport> {
    if !sys.bounded {
        return Err(SpectraError::PrecondError("semigroup is not bounded on ℝ₊".into()));
    }
    let mut kinds = vec![SpectrumKind::Laplace];
    if sys.group_flag {
        kinds.push(SpectrumKind::Carleman);
        kinds.push(SpectrumKind::Beurling);
    }
    let mut checks = Vec::new();
    let mut estimates = Vec::new();
    let mut unions: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); kinds.len()];
    for (xi, x) in xs.iter().enumerate() {
        let orbit = sys.orbit(x)?;
        let expected = node_set(grid, &sys.imaginary_frequencies(Some(x))?);
        for (ki, &kind) in kinds.iter().enumerate() {
            let est = match kind {
                SpectrumKind::Laplace => laplace_spectrum(&orbit, grid, params)?,
                SpectrumKind::Carleman => carleman_spectrum(&orbit, grid, params)?,
                _ => beurling_spectrum(&orbit, grid, params)?,
            };
            let sing: BTreeSet<usize> = est.indices(crate::spectra::Classification::Singular).into_iter().collect();
            let und = est.indices(crate::spectra::Classification::Undecided);
            unions[ki].extend(sing.iter().copied());
            checks.push(IdentityCheck {
                identity: if ki == 0 { "orbit_laplace".into() } else { "group_coincidence".into() },
                x_id: Some(xi),
                kind,
                expected: points(grid, &expected),
                singular: points(grid, &sing),
                undecided: und.iter().map(|&k| grid.point(k)).collect(),
                pass: sing == expected,
            });
            estimates.push(OrbitEstimate { x_id: xi, estimate: est });
        }
    }
    if spans(xs, sys.dim()) {
        let all = node_set(grid, &sys.imaginary_frequencies(None)?);
        for (ki, &kind) in kinds.iter().enumerate() {
            checks.push(IdentityCheck {
                identity: "union_covers_spectrum".into(),
                x_id: None,
                kind,
                expected: points(grid, &all),
                singular: points(grid, &unions[ki]),
                undecided: vec![],
                pass: unions[ki] == all,
            });
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(IdentityReport {
        checks,
        estimates,
        pass,
    })
}

/// A generated test system with the eigenvalues it was built from.
#[derive(Clone, Debug)]
pub struct SeededSystem {
    pub system: SemigroupSystem,
    pub eigenvalues: Vec<C64>,
}

fn rand_c(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Diagonalizable generators A = VΛV⁻¹ with V = I + ½R.
///
/// Imaginary eigenvalues sit on multiples of 0.25 in [−2.5, 2.5], pairwise at least
/// 0.25 apart; the rest are −r + iω with r ∈ [0.2, 1.5]. Every fourth system is a
/// group, and system 7 (when present) carries a doubled imaginary eigenvalue.
pub fn seeded_systems(seed: u64, count: usize) -> Result<Vec<SeededSystem>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for idx in 0..count {
        let d: usize = rng.gen_range(1..=6);
        let group = idx % 4 == 3;
        let n_imag = if group { d } else { rng.gen_range(1..=d) };
        let mut slots: Vec<i32> = (-10..=10).collect();
        let mut lam = Vec::with_capacity(d);
        for _ in 0..n_imag {
            let k = rng.gen_range(0..slots.len());
            lam.push(C64::new(0.0, 0.25 * slots.remove(k) as f64));
        }
        if idx == 7 && d >= 2 {
            lam[n_imag.min(d) - 1] = lam[0];
        }
        while lam.len() < d {
            lam.push(C64::new(-rng.gen_range(0.2..1.5), rng.gen_range(-3.0..3.0)));
        }
        let v = loop {
            let r = DMatrix::from_fn(d, d, |_, _| rand_c(&mut rng));
            let v = DMatrix::<C64>::identity(d, d) + r * cr(0.5 / (d as f64).sqrt());
            if let Some(vi) = v.clone().try_inverse() {
                if v.norm() * vi.norm() < 50.0 {
                    break v;
                }
            }
        };
        let vi = v.clone().try_inverse().expect("checked above");
        let a = &v * DMatrix::from_diagonal(&DVector::from_vec(lam.clone())) * vi;
        let system = SemigroupSystem::new(a)?;
        out.push(SeededSystem {
            system,
            eigenvalues: lam,
        });
    }
    Ok(out)
}

/// Standard basis, the all-ones vector and one seeded random vector.
pub fn probe_vectors(d: usize, seed: u64) -> Vec<CVec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs: Vec<CVec> = (0..d)
        .map(|k| {
            let mut e = CVec::zeros(d);
            e.0[k] = cr(1.0);
            e
        })
        .collect();
    xs.push(CVec(vec![cr(1.0); d]));
    xs.push(CVec((0..d).map(|_| rand_c(&mut rng)).collect()));
    xs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cvec::I;

    fn mat(rows: &[&[C64]]) -> DMatrix<C64> {
        let d = rows.len();
        DMatrix::from_fn(d, d, |i, j| rows[i][j])
    }

    #[test]
    fn diagonal_resolvent() {
        let s = SemigroupSystem::diagonal(&[I, cr(-1.0)]).unwrap();
        let r = s.resolvent(cr(1.0)).unwrap();
        assert!((r[(0, 0)] - cr(1.0) / (cr(1.0) - I)).norm() < 1e-15);
        assert!((r[(1, 1)] - cr(0.5)).norm() < 1e-15);
        assert!(r[(0, 1)].norm() < 1e-15);
        let z = SemigroupSystem::diagonal(&[cr(0.0)]).unwrap();
        assert!((z.resolvent(cr(2.0)).unwrap()[(0, 0)] - cr(0.5)).norm() < 1e-15);
        assert!(matches!(s.resolvent(I * (1.0 + 1e-9)), Err(SpectraError::SingularMatrix(_))));
        assert!(!s.group_flag && s.bounded);
    }

    #[test]
    fn jordan_block_rejected() {
        let j = mat(&[&[cr(0.0), cr(1.0)], &[cr(0.0), cr(0.0)]]);
        assert!(matches!(SemigroupSystem::new(j), Err(SpectraError::NonDiagonalizable(_))));
    }

    #[test]
    fn random_system_matches_eigen_formula() {
        let sys = &seeded_systems(11, 3).unwrap()[2];
        let s = &sys.system;
        let lam = C64::new(3.0, 1.0);
        let r = s.resolvent(lam).unwrap();
        let e = DVector::from_iterator(s.dim(), s.eig.iter().map(|m| cr(1.0) / (lam - m)));
        let oracle = &s.v * DMatrix::from_diagonal(&e) * &s.v_inv;
        assert!((r - oracle).norm() < 1e-9);
    }

    #[test]
    fn semigroup_law_and_orbit() {
        for sys in seeded_systems(5, 6).unwrap() {
            let s = &sys.system;
            let (t, u) = (0.37, 1.9);
            let lhs = s.exp(t + u);
            let rhs = s.exp(t) * s.exp(u);
            assert!((lhs - rhs).norm() <= 1e-10 * s.exp_bound().powi(2));
            let x = CVec(vec![cr(1.0); s.dim()]);
            let o = s.orbit(&x).unwrap();
            for &t in &[0.0, 0.5, 3.0, 11.0] {
                let direct: Vec<C64> = (s.exp(t) * DVector::from_vec(x.0.clone())).iter().copied().collect();
                let v = o.evaluate(t).unwrap();
                assert!(v.dist(&CVec(direct)) <= 1e-12 * s.exp_bound());
            }
        }
    }

    #[test]
    fn orbit_laplace_examples() {
        let s = SemigroupSystem::diagonal(&[I]).unwrap();
        let r = orbit_laplace_check(&s, &CVec::scalar(cr(1.0)), &[cr(1.0)]).unwrap();
        assert!(r <= 1e-8);
        let s = SemigroupSystem::diagonal(&[I, cr(-1.0)]).unwrap();
        let r = orbit_laplace_check(&s, &CVec(vec![cr(1.0), cr(1.0)]), &[C64::new(0.5, 0.5)]).unwrap();
        assert!(r <= 1e-6);
    }

    #[test]
    fn sigma_x_and_domain() {
        let s = SemigroupSystem::diagonal(&[I, cr(-1.0)]).unwrap();
        assert_eq!(s.sigma_x(&CVec(vec![cr(0.0), cr(1.0)])).unwrap(), vec![cr(-1.0)]);
        assert_eq!(s.imaginary_frequencies(Some(&CVec(vec![cr(1.0), cr(1.0)]))).unwrap(), vec![1.0]);
        assert_eq!(s.orbit(&CVec(vec![cr(1.0), cr(0.0)])).unwrap().domain, Domain::HalfLine);
        let g = SemigroupSystem::diagonal(&[I, I * 2.0]).unwrap();
        assert!(g.group_flag);
        assert_eq!(g.orbit(&CVec(vec![cr(1.0), cr(1.0)])).unwrap().domain, Domain::FullLine);
        let up = SemigroupSystem::diagonal(&[cr(1.0)]).unwrap();
        assert!(!up.bounded);
        assert!(up.orbit(&CVec::scalar(cr(1.0))).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = SemigroupSystem::diagonal(&[I, C64::new(-0.5, 2.0)]).unwrap();
        let t = SemigroupSystem::from_json(&s.to_json()).unwrap();
        assert_eq!(s.a, t.a);
        assert!(SemigroupSystem::from_json(r#"{"A": [[0, 1]]}"#).is_err());
        let real = SemigroupSystem::from_json(r#"{"A": [[-1, 0], [0, -2]]}"#).unwrap();
        assert_eq!(real.distinct.len(), 2);
    }

    #[test]
    fn identity_examples() {
        let grid = FrequencyGrid::new(-0.5, 2.5, 0.05).unwrap();
        let p = EstimatorParams::default();
        let g = SemigroupSystem::diagonal(&[I, I * 2.0]).unwrap();
        let rep = verify_spectral_identities(&g, &[CVec(vec![cr(1.0), cr(1.0)])], &grid, &p).unwrap();
        assert!(rep.pass, "{:?}", rep.failures().collect::<Vec<_>>());
        assert_eq!(rep.checks.len(), 3);
        for c in &rep.checks {
            assert_eq!(c.singular.len(), 2);
        }
        let s = SemigroupSystem::diagonal(&[I, cr(-1.0)]).unwrap();
        let xs = [CVec(vec![cr(0.0), cr(1.0)]), CVec(vec![cr(1.0), cr(1.0)])];
        let rep = verify_spectral_identities(&s, &xs, &grid, &p).unwrap();
        assert!(rep.pass, "{:?}", rep.failures().collect::<Vec<_>>());
        assert!(rep.checks[0].singular.is_empty());
        assert_eq!(rep.checks[1].singular.len(), 1);
    }
}
