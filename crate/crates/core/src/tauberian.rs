//! Executable checks of the Ingham-type tauberian theorems and the ergodic criteria.

use crate::cvec::{cr, CVec, C64};
use crate::error::{Result, SpectraError};
use crate::func_model::{Domain, FunctionDescriptor};
use crate::kernels::Kernel;
use crate::spectra::{
    laplace_spectrum, reduced_beurling_c0, weak_laplace_spectrum, Classification, EstimatorParams,
    FrequencyGrid, SpectrumEstimate,
};
use crate::spectral::convolve_body;
use crate::transforms::{
    default_shift_grid, default_t_ladder, ergodic_mean, laplace, partial_laplace, ErgodicVerdict,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    Ingham_2_3_i,
    Ingham_2_3_ii,
    Primitive_2_3_iv,
    Transfer_2_4_i,
    Inclusion_2_4_ii,
    Ergodic_2_4_iii,
    Primitive_2_4_iv,
    Ergodic_1_5,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HypothesisStatus {
    Verified,
    AssumedFromClosedForm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauberianReport {
    pub theorem_id: TheoremId,
    pub hypothesis_status: HypothesisStatus,
    pub metrics: BTreeMap<String, f64>,
    pub pass: bool,
}

impl TauberianReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// How a theorem's spectral hypothesis is established.
#[derive(Clone, Debug)]
pub enum Hypothesis {
    /// Known analytically; not re-estimated.
    Known,
    /// Estimated on the given grid.
    Estimate {
        grid: FrequencyGrid,
        params: EstimatorParams,
    },
}

/// Which estimator certifies regularity at ω₀ for the ergodic checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErgodicSource {
    ReducedC0,
    WeakLaplace,
}

#[derive(Clone, Debug)]
pub struct TauberianSettings {
    pub tau_decay: f64,
    pub tol_ergodic: f64,
    /// Dyadic window edges for decay ladders.
    pub windows: Vec<f64>,
    pub samples_per_window: usize,
    /// Primitive horizons S₀ < S₁ < … for the bounded-primitive check.
    pub s_ladder: Vec<f64>,
    /// Growth slope below which a primitive counts as bounded.
    pub bounded_slope: f64,
}

impl Default for TauberianSettings {
    fn default() -> Self {
        TauberianSettings {
            tau_decay: 1e-3,
            tol_ergodic: 1e-3,
            windows: vec![4.0, 8.0, 16.0, 32.0, 64.0, 128.0],
            samples_per_window: 64,
            s_ladder: (5..=12).map(|k| 2f64.powi(k)).collect(),
            bounded_slope: 0.35,
        }
    }
}

fn unverified(what: &str, est: &SpectrumEstimate, idx: &[usize]) -> SpectraError {
    let pts: Vec<String> = idx.iter().map(|&k| est.grid.format_point(k)).collect();
    SpectraError::HypothesisUnverified(format!("{what} not regular at [{}]", pts.join(", ")))
}

/// Golden-ratio sample points in [lo, hi] including both ends.
fn window_samples(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let g = 0.618_033_988_749_894_9;
    let mut v: Vec<f64> = (0..n).map(|j| lo + (hi - lo) * ((j as f64 * g) % 1.0)).collect();
    v.push(hi);
    v
}

/// A ladder passes when each rung drops strictly (or sits below `floor`) and the last is below `tol`.
fn decays(ladder: &[f64], floor: f64, tol: f64) -> bool {
    ladder.windows(2).all(|w| w[1] < w[0] || w[1] < floor) && *ladder.last().unwrap() < tol
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let (mut num, mut den) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        num += (a - mx) * (b - my);
        den += (a - mx) * (a - mx);
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Ingham decay: with sp^{wℒ}(φ) empty, φ∗k vanishes at infinity for band-limited k.
///
/// φ is read on ℝ₊ (extended by zero); the metric is the sup of ‖(φ∗k)(t)‖ over ±[T_j, T_{j+1}].
pub fn check_ingham_decay(
    phi: &FunctionDescriptor,
    k: &Kernel,
    hypothesis: &Hypothesis,
    settings: &TauberianSettings,
) -> Result<TauberianReport> {
    let status = match hypothesis {
        Hypothesis::Known => HypothesisStatus::AssumedFromClosedForm,
        Hypothesis::Estimate { grid, params } => {
            let est = weak_laplace_spectrum(phi, grid, params)?;
            let bad: Vec<usize> = (0..grid.len())
                .filter(|&i| est.classification[i] != Classification::Regular)
                .collect();
            if !bad.is_empty() {
                return Err(unverified("weak Laplace spectrum", &est, &bad));
            }
            HypothesisStatus::Verified
        }
    };
    let half = phi.restrict_and_extend()?;
    let (b, d) = (&half.body, half.dim);
    let scale = phi.scale_value() * k.l1_norm().max(1e-300);
    let mut ladder = Vec::with_capacity(settings.windows.len() - 1);
    let mut m = BTreeMap::new();
    for w in settings.windows.windows(2) {
        let mut sup: f64 = 0.0;
        for t in window_samples(w[0], w[1], settings.samples_per_window) {
            sup = sup.max(convolve_body(b, k, t, d, true)?.v.norm());
            sup = sup.max(convolve_body(b, k, -t, d, true)?.v.norm());
        }
        m.insert(format!("window_sup_{}", w[1]), sup);
        ladder.push(sup);
    }
    let pass = decays(&ladder, 1e-8 * scale, settings.tau_decay * scale);
    m.insert("final_sup".into(), *ladder.last().unwrap());
    m.insert("scale".into(), scale);
    Ok(TauberianReport {
        theorem_id: if phi.is_bounded() {
            TheoremId::Ingham_2_3_ii
        } else {
            TheoremId::Ingham_2_3_i
        },
        hypothesis_status: status,
        metrics: m,
        pass,
    })
}

/// Boundary value lim_{a↘0} ℒφ(a+iω), Richardson-extrapolated from a = 2⁻¹⁰, 2⁻¹¹.
fn boundary_value(phi: &FunctionDescriptor, omega: f64) -> Result<CVec> {
    let (a1, a2) = (2f64.powi(-10), 2f64.powi(-11));
    let v1 = laplace(phi, C64::new(a1, omega))?.value;
    let v2 = laplace(phi, C64::new(a2, omega))?.value;
    Ok(v2.scale(cr(2.0)) - v1)
}

/// Bounded primitive at a Laplace-regular frequency ω.
///
/// Passes on the convergent branch when ∫₀ˢ e^{−iωt}φ settles below τ_decay on the
/// window ladder at the boundary value ℒ̄φ(iω); passes on the bounded branch when the
/// primitive stays bounded and its mean over the last window equals that boundary value.
pub fn check_bounded_primitive(
    phi: &FunctionDescriptor,
    omega: f64,
    hypothesis: &Hypothesis,
    settings: &TauberianSettings,
) -> Result<TauberianReport> {
    if !phi.is_bounded() {
        return Err(SpectraError::PrecondError("bounded-primitive check needs L∞ input".into()));
    }
    let mut global = false;
    let status = match hypothesis {
        Hypothesis::Known => HypothesisStatus::AssumedFromClosedForm,
        Hypothesis::Estimate { grid, params } => {
            let est = laplace_spectrum(phi, grid, params)?;
            let node = grid.nearest(omega);
            if (grid.point(node) - omega).abs() > 0.5 * grid.step
                || est.classification[node] != Classification::Regular
            {
                return Err(unverified("Laplace spectrum", &est, &[node]));
            }
            global = est.count(Classification::Regular) == grid.len();
            HypothesisStatus::Verified
        }
    };
    let scale = phi.scale_value();
    let lam = C64::new(0.0, omega);
    let prim = |s: f64| partial_laplace(phi, lam, s).map(|e| e.v);
    let sl = &settings.s_ladder;
    let s_max = *sl.last().unwrap();
    let l_hat = prim(s_max)?;
    let boundary = boundary_value(phi, omega)?;
    let mut devs = Vec::new();
    let mut sups = Vec::new();
    for w in sl.windows(2) {
        let (mut dev, mut sup): (f64, f64) = (0.0, 0.0);
        for s in window_samples(w[0], w[1], settings.samples_per_window) {
            let p = prim(s)?;
            dev = dev.max(p.dist(&l_hat));
            sup = sup.max(p.norm());
        }
        devs.push(dev);
        sups.push(sup);
    }
    // exact mean of the primitive over the last window, through a second primitive
    let pp = phi
        .restrict_and_extend()?
        .modulate(-omega)
        .primitive(CVec::zeros(phi.dim))?;
    let s_lo = sl[sl.len() - 2];
    let last_mean = (partial_laplace(&pp, cr(0.0), s_max)?.v - partial_laplace(&pp, cr(0.0), s_lo)?.v)
        .scale(cr(1.0 / (s_max - s_lo)));
    let tol = settings.tau_decay * scale;
    let match_err = l_hat.dist(&boundary);
    let convergent = decays(&devs, 1e-10 * scale, tol) && match_err <= tol;
    let running: Vec<f64> = sups
        .iter()
        .scan(0.0f64, |m, &s| {
            *m = m.max(s);
            Some(m.max(1e-300).ln())
        })
        .collect();
    let lx: Vec<f64> = sl[1..].iter().map(|s| s.ln()).collect();
    let growth = slope(&lx, &running);
    let mean_err = last_mean.dist(&boundary);
    let bounded = growth < settings.bounded_slope && mean_err <= tol;
    let mut m = BTreeMap::new();
    m.insert("l_hat_norm".into(), l_hat.norm());
    m.insert("boundary_norm".into(), boundary.norm());
    m.insert("match_error".into(), match_err);
    m.insert("final_deviation".into(), *devs.last().unwrap());
    m.insert("primitive_sup".into(), sups.iter().fold(0.0, |a: f64, &b| a.max(b)));
    m.insert("primitive_growth".into(), growth);
    m.insert("mean_error".into(), mean_err);
    m.insert("convergent".into(), if convergent { 1.0 } else { 0.0 });
    Ok(TauberianReport {
        theorem_id: if global {
            TheoremId::Primitive_2_3_iv
        } else {
            TheoremId::Primitive_2_4_iv
        },
        hypothesis_status: status,
        metrics: m,
        pass: convergent || bounded,
    })
}

/// γ_{−ω₀}φ ∈ E₀ when ω₀ is regular for the chosen estimator.
pub fn check_regular_ergodic(
    phi: &FunctionDescriptor,
    omega0: f64,
    source: ErgodicSource,
    hypothesis: &Hypothesis,
    settings: &TauberianSettings,
) -> Result<TauberianReport> {
    let status = match hypothesis {
        Hypothesis::Known => HypothesisStatus::AssumedFromClosedForm,
        Hypothesis::Estimate { grid, params } => {
            let est = match source {
                ErgodicSource::ReducedC0 => reduced_beurling_c0(phi, grid, params)?,
                ErgodicSource::WeakLaplace => weak_laplace_spectrum(phi, grid, params)?,
            };
            let node = grid.nearest(omega0);
            if (grid.point(node) - omega0).abs() > 0.5 * grid.step
                || est.classification[node] != Classification::Regular
            {
                return Err(unverified("spectral hypothesis", &est, &[node]));
            }
            HypothesisStatus::Verified
        }
    };
    let shifted = phi.modulate(-omega0);
    let shifts: Vec<f64> = match shifted.domain {
        Domain::HalfLine => default_shift_grid(),
        Domain::FullLine => default_shift_grid()
            .into_iter()
            .flat_map(|s| if s == 0.0 { vec![s] } else { vec![-s, s] })
            .collect(),
    };
    let rep = ergodic_mean(&shifted, &shifts, &default_t_ladder(), settings.tol_ergodic)?;
    let mut m = BTreeMap::new();
    let mean_norm = rep.mean.as_ref().map_or(f64::INFINITY, |c| c.norm());
    m.insert("mean_norm".into(), mean_norm);
    m.insert("final_deviation".into(), rep.sup_deviation_ladder.last().unwrap().1);
    m.insert(
        "verdict".into(),
        match rep.verdict {
            ErgodicVerdict::Ergodic => 1.0,
            ErgodicVerdict::NotErgodic => -1.0,
            ErgodicVerdict::Undecided => 0.0,
        },
    );
    Ok(TauberianReport {
        theorem_id: match source {
            ErgodicSource::ReducedC0 => TheoremId::Ergodic_1_5,
            ErgodicSource::WeakLaplace => TheoremId::Ergodic_2_4_iii,
        },
        hypothesis_status: status,
        metrics: m,
        pass: rep.verdict == ErgodicVerdict::Ergodic && mean_norm <= settings.tol_ergodic,
    })
}

/// Ergodicity with mean 0 when 0 is a C₀-regular point.
pub fn check_regular_zero_ergodic(
    phi: &FunctionDescriptor,
    hypothesis: &Hypothesis,
    settings: &TauberianSettings,
) -> Result<TauberianReport> {
    check_regular_ergodic(phi, 0.0, ErgodicSource::ReducedC0, hypothesis, settings)
}

/// sp^{wℒ}(φ∗f) ⊂ sp^{wℒ}(φ) ∩ supp f̂, each side within one grid step.
pub fn check_transfer(
    phi: &FunctionDescriptor,
    f: &Kernel,
    grid: &FrequencyGrid,
    params: &EstimatorParams,
) -> Result<TauberianReport> {
    let conv = phi.convolve_with(f)?;
    let a = weak_laplace_spectrum(phi, grid, params)?;
    let b = weak_laplace_spectrum(&conv, grid, params)?;
    let (lo, hi) = f.freq_support();
    let slack = grid.step * (1.0 + 1e-9);
    let sing_phi = a.singular_points();
    let sing_conv = b.singular_points();
    let violations = sing_conv
        .iter()
        .filter(|&&p| {
            let in_support = p >= lo - slack && p <= hi + slack;
            let near = sing_phi.iter().any(|q| (p - q).abs() <= slack);
            !(in_support && near)
        })
        .count();
    let mut m = BTreeMap::new();
    m.insert("violations".into(), violations as f64);
    m.insert("singular_phi".into(), sing_phi.len() as f64);
    m.insert("singular_conv".into(), sing_conv.len() as f64);
    Ok(TauberianReport {
        theorem_id: TheoremId::Transfer_2_4_i,
        hypothesis_status: HypothesisStatus::Verified,
        metrics: m,
        pass: violations == 0,
    })
}

/// sp_{C₀}(φ) ⊂ sp^{wℒ}(φ): no node is C₀-Singular while weak-Regular.
pub fn check_inclusion(
    phi: &FunctionDescriptor,
    grid: &FrequencyGrid,
    params: &EstimatorParams,
) -> Result<TauberianReport> {
    let c0 = reduced_beurling_c0(phi, grid, params)?;
    let weak = weak_laplace_spectrum(phi, grid, params)?;
    check_inclusion_from(&c0, &weak)
}

/// The inclusion check on precomputed estimates over the same grid.
pub fn check_inclusion_from(c0: &SpectrumEstimate, weak: &SpectrumEstimate) -> Result<TauberianReport> {
    if c0.grid != weak.grid {
        return Err(SpectraError::PrecondError("estimates use different grids".into()));
    }
    let violations = c0
        .classification
        .iter()
        .zip(&weak.classification)
        .filter(|(c, w)| **c == Classification::Singular && **w == Classification::Regular)
        .count();
    let mut m = BTreeMap::new();
    m.insert("violations".into(), violations as f64);
    m.insert("singular_c0".into(), c0.count(Classification::Singular) as f64);
    m.insert("singular_weak".into(), weak.count(Classification::Singular) as f64);
    Ok(TauberianReport {
        theorem_id: TheoremId::Inclusion_2_4_ii,
        hypothesis_status: HypothesisStatus::Verified,
        metrics: m,
        pass: violations == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{band_pass, make_psi};

    fn est(lo: f64, hi: f64, step: f64) -> Hypothesis {
        Hypothesis::Estimate {
            grid: FrequencyGrid::new(lo, hi, step).unwrap(),
            params: EstimatorParams::default(),
        }
    }

    #[test]
    fn ingham_gamma1_refused() {
        let g1 = FunctionDescriptor::character(1.0, cr(1.0));
        let k = band_pass(1.0, 0.5).unwrap();
        let r = check_ingham_decay(&g1, &k, &est(0.5, 1.5, 0.05), &TauberianSettings::default());
        assert!(matches!(r, Err(SpectraError::HypothesisUnverified(_))));
    }

    #[test]
    fn ingham_psi_psi() {
        let psi = FunctionDescriptor::kernel(make_psi()).unwrap();
        let r = check_ingham_decay(&psi, &make_psi(), &Hypothesis::Known, &TauberianSettings::default()).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.hypothesis_status, HypothesisStatus::AssumedFromClosedForm);
    }

    #[test]
    fn primitive_examples() {
        let s = TauberianSettings::default();
        let chirp = FunctionDescriptor::chirp();
        let r = check_bounded_primitive(&chirp, 0.0, &est(-0.1, 0.1, 0.05), &s).unwrap();
        assert!(r.pass && r.metrics["convergent"] == 1.0, "{r:?}");
        let g2 = FunctionDescriptor::character(2.0, cr(1.0)).restrict_and_extend().unwrap();
        let r = check_bounded_primitive(&g2, 0.0, &est(-0.1, 0.1, 0.05), &s).unwrap();
        assert!(r.pass && r.metrics["convergent"] == 0.0, "{r:?}");
        let g1 = FunctionDescriptor::character(1.0, cr(1.0));
        assert!(matches!(
            check_bounded_primitive(&g1, 1.0, &est(0.9, 1.1, 0.05), &s),
            Err(SpectraError::HypothesisUnverified(_))
        ));
    }

    #[test]
    fn ergodic_examples() {
        let s = TauberianSettings::default();
        let g1 = FunctionDescriptor::character(1.0, cr(1.0));
        let r = check_regular_zero_ergodic(&g1, &est(-0.1, 0.1, 0.05), &s).unwrap();
        assert!(r.pass, "{r:?}");
        let g0 = FunctionDescriptor::character(0.0, cr(1.0));
        assert!(matches!(
            check_regular_zero_ergodic(&g0, &est(-0.1, 0.1, 0.05), &s),
            Err(SpectraError::HypothesisUnverified(_))
        ));
        let json = r.to_json();
        assert!(json.contains("\"theorem_id\":\"Ergodic_1_5\""));
    }

    #[test]
    fn transfer_and_inclusion_trig() {
        let phi = FunctionDescriptor::trig_poly(&[(1.0, cr(1.0)), (2f64.sqrt(), cr(1.0))]);
        let grid = FrequencyGrid::new(0.5, 2.0, 0.05).unwrap();
        let p = EstimatorParams::default();
        let r = check_transfer(&phi, &band_pass(1.0, 0.3).unwrap(), &grid, &p).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.metrics["singular_conv"], 1.0);
        let r = check_inclusion(&phi, &grid, &p).unwrap();
        assert!(r.pass, "{r:?}");
    }
}
