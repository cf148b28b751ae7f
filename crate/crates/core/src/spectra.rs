//! Grid estimators for the Laplace, weak Laplace, Carleman, Beurling,
//! reduced (C₀) Beurling and uniform spectra.

use crate::cvec::{CVec, C64};
use crate::error::{Result, SpectraError};
use crate::func_model::{eval_body, Body, Domain, FunctionDescriptor};
use crate::kernels::band_pass;
use crate::quad::{integrate_breaks, QuadOptions};
use crate::spectral::convolve_body;
use crate::transforms::{laplace_body, partial_laplace_body};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub omega_min: f64,
    pub omega_max: f64,
    pub step: f64,
}

impl FrequencyGrid {
    pub fn new(omega_min: f64, omega_max: f64, step: f64) -> Result<Self> {
        if !(omega_min.is_finite() && omega_max.is_finite() && step.is_finite()) {
            return Err(SpectraError::PrecondError("grid values must be finite".into()));
        }
        if !(step > 0.0) {
            return Err(SpectraError::PrecondError(format!("grid step must be positive, got {step}")));
        }
        if !(omega_min < omega_max) {
            return Err(SpectraError::PrecondError("grid needs ω_min < ω_max".into()));
        }
        if (omega_max - omega_min) / step > 1e6 {
            return Err(SpectraError::PrecondError("grid has too many points".into()));
        }
        Ok(FrequencyGrid {
            omega_min,
            omega_max,
            step,
        })
    }

    /// Parses `MIN:MAX:STEP`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(SpectraError::Parse(format!("grid must be MIN:MAX:STEP, got {text:?}")));
        }
        let v = parts
            .iter()
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|e| SpectraError::Parse(format!("bad grid value {p:?}: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        FrequencyGrid::new(v[0], v[1], v[2])
    }

    pub fn len(&self) -> usize {
        ((self.omega_max - self.omega_min) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, k: usize) -> f64 {
        self.omega_min + k as f64 * self.step
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }

    /// Index of the node nearest to ω (clamped).
    pub fn nearest(&self, omega: f64) -> usize {
        let k = ((omega - self.omega_min) / self.step).round();
        k.clamp(0.0, (self.len() - 1) as f64) as usize
    }

    pub fn max_abs(&self) -> f64 {
        self.omega_min.abs().max(self.omega_max.abs())
    }

    fn decimals(&self) -> usize {
        ((-self.step.log10()) - 1e-9).ceil().clamp(2.0, 12.0) as usize
    }

    pub fn format_point(&self, k: usize) -> String {
        let x = self.point(k);
        let s = format!("{:.*}", self.decimals(), x);
        if s.starts_with("-") && s[1..].chars().all(|c| c == '0' || c == '.') {
            s[1..].to_string()
        } else {
            s
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpectrumKind {
    Laplace,
    WeakLaplace,
    Carleman,
    Beurling,
    ReducedBeurlingC0,
    UniformLaplace,
    UniformCarleman,
}

impl SpectrumKind {
    pub const ALL: [SpectrumKind; 7] = [
        SpectrumKind::Laplace,
        SpectrumKind::WeakLaplace,
        SpectrumKind::Carleman,
        SpectrumKind::Beurling,
        SpectrumKind::ReducedBeurlingC0,
        SpectrumKind::UniformLaplace,
        SpectrumKind::UniformCarleman,
    ];

    pub fn parse(s: &str) -> Result<Self> {
        let norm: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        Ok(match norm.as_str() {
            "laplace" => SpectrumKind::Laplace,
            "weaklaplace" | "weak" => SpectrumKind::WeakLaplace,
            "carleman" => SpectrumKind::Carleman,
            "beurling" | "arveson" | "beurlingarveson" => SpectrumKind::Beurling,
            "reducedbeurlingc0" | "c0" | "reduced" => SpectrumKind::ReducedBeurlingC0,
            "uniformlaplace" => SpectrumKind::UniformLaplace,
            "uniformcarleman" => SpectrumKind::UniformCarleman,
            _ => return Err(SpectraError::Parse(format!("unknown spectrum kind {s:?}"))),
        })
    }
}

impl fmt::Display for SpectrumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SpectrumKind::Laplace => "Laplace",
            SpectrumKind::WeakLaplace => "WeakLaplace",
            SpectrumKind::Carleman => "Carleman",
            SpectrumKind::Beurling => "Beurling/Arveson",
            SpectrumKind::ReducedBeurlingC0 => "ReducedBeurlingC0",
            SpectrumKind::UniformLaplace => "UniformLaplace",
            SpectrumKind::UniformCarleman => "UniformCarleman",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    Regular,
    Singular,
    Undecided,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub jump_magnitude: Option<f64>,
    pub growth_exponent: Option<f64>,
    pub primitive_sup: Option<f64>,
    pub primitive_slope: Option<f64>,
    pub filter_residual: Option<f64>,
    pub decay_slope: Option<f64>,
    pub cauchy_defect: Option<f64>,
    pub a_min_used: Option<f64>,
    pub horizon_used: Option<f64>,
    /// Set when a quadrature failure forced Undecided.
    pub quad_failed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub tau_jump: f64,
    pub p_min: f64,
    pub tau_filter: f64,
    pub tau_decay: f64,
    pub tau_weak: f64,
    pub q_min: f64,
    pub p3_bounded: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            tau_jump: 1e-3,
            p_min: 0.3,
            tau_filter: 1e-4,
            tau_decay: 1e-3,
            tau_weak: 1e-4,
            q_min: 0.5,
            p3_bounded: 0.35,
        }
    }
}

impl Thresholds {
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let slot = match key {
            "tau_jump" => &mut self.tau_jump,
            "p_min" => &mut self.p_min,
            "tau_filter" => &mut self.tau_filter,
            "tau_decay" => &mut self.tau_decay,
            "tau_weak" => &mut self.tau_weak,
            "q_min" => &mut self.q_min,
            "p3_bounded" => &mut self.p3_bounded,
            _ => return Err(SpectraError::Parse(format!("unknown threshold {key:?}"))),
        };
        if !(value.is_finite() && value > 0.0) {
            return Err(SpectraError::Parse(format!("threshold {key} must be positive")));
        }
        *slot = value;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorParams {
    /// Decreasing real parts a₀ > a₁ > … approaching the axis.
    pub a_ladder: Vec<f64>,
    /// Number of final rungs used in the exponent fits.
    pub fit_len: usize,
    /// Increasing primitive horizons; window k is [S_{k−1}, S_k].
    pub primitive_windows: Vec<f64>,
    pub primitive_samples: usize,
    pub s_grid: Vec<f64>,
    /// Filter widths; `None` means {2·step, step}.
    pub widths: Option<Vec<f64>>,
    pub thresholds: Thresholds,
}

pub fn dyadic_ladder(hi_exp: i32, lo_exp: i32) -> Vec<f64> {
    (lo_exp..=hi_exp).rev().map(|k| 2f64.powi(k)).collect()
}

impl Default for EstimatorParams {
    fn default() -> Self {
        EstimatorParams {
            a_ladder: dyadic_ladder(-3, -13),
            fit_len: 4,
            primitive_windows: (5..=11).map(|k| 2f64.powi(k)).collect(),
            primitive_samples: 16,
            s_grid: vec![0.0, 1.0, 2.0, 5.0, 10.0],
            widths: None,
            thresholds: Thresholds::default(),
        }
    }
}

impl EstimatorParams {
    /// Parses `MIN:MAX` into the dyadic ladder between them.
    pub fn parse_a_ladder(text: &str) -> Result<Vec<f64>> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 2 {
            return Err(SpectraError::Parse(format!("a-ladder must be MIN:MAX, got {text:?}")));
        }
        let lo: f64 = parts[0]
            .trim()
            .parse()
            .map_err(|e| SpectraError::Parse(format!("bad a-ladder: {e}")))?;
        let hi: f64 = parts[1]
            .trim()
            .parse()
            .map_err(|e| SpectraError::Parse(format!("bad a-ladder: {e}")))?;
        if !(lo > 0.0 && hi > lo) {
            return Err(SpectraError::Parse("a-ladder needs 0 < MIN < MAX".into()));
        }
        let l = dyadic_ladder(hi.log2().round() as i32, lo.log2().round() as i32);
        if l.len() < 3 {
            return Err(SpectraError::Parse("a-ladder needs at least three rungs".into()));
        }
        Ok(l)
    }

    fn validate(&self) -> Result<()> {
        if self.a_ladder.len() < 3 || self.a_ladder.windows(2).any(|w| !(w[1] < w[0] && w[1] > 0.0)) {
            return Err(SpectraError::PrecondError("a-ladder must decrease and stay positive".into()));
        }
        if self.fit_len < 2 || self.fit_len >= self.a_ladder.len() {
            return Err(SpectraError::PrecondError("fit length must be in [2, ladder length)".into()));
        }
        if self.primitive_windows.len() < 3 {
            return Err(SpectraError::PrecondError("need at least three primitive windows".into()));
        }
        if self.s_grid.is_empty() {
            return Err(SpectraError::PrecondError("empty translate grid".into()));
        }
        Ok(())
    }

    /// The final rungs entering the fits (one extra for the first Cauchy defect).
    pub fn used_rungs(&self) -> &[f64] {
        &self.a_ladder[self.a_ladder.len() - self.fit_len - 1..]
    }

    fn widths_for(&self, grid: &FrequencyGrid) -> Vec<f64> {
        let mut w = self
            .widths
            .clone()
            .unwrap_or_else(|| vec![2.0 * grid.step, grid.step]);
        w.sort_by(|a, b| b.partial_cmp(a).unwrap());
        w
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEstimate {
    pub kind: SpectrumKind,
    pub grid: FrequencyGrid,
    pub classification: Vec<Classification>,
    pub diagnostics: Vec<Diagnostics>,
    pub params: EstimatorParams,
}

impl SpectrumEstimate {
    pub fn singular_points(&self) -> Vec<f64> {
        self.indices(Classification::Singular)
            .into_iter()
            .map(|k| self.grid.point(k))
            .collect()
    }

    pub fn indices(&self, c: Classification) -> Vec<usize> {
        self.classification
            .iter()
            .enumerate()
            .filter(|(_, x)| **x == c)
            .map(|(k, _)| k)
            .collect()
    }

    pub fn count(&self, c: Classification) -> usize {
        self.classification.iter().filter(|x| **x == c).count()
    }

    pub fn fraction(&self, c: Classification) -> f64 {
        self.count(c) as f64 / self.classification.len() as f64
    }

    pub fn quad_failures(&self) -> usize {
        self.diagnostics.iter().filter(|d| d.quad_failed).count()
    }

    pub const CSV_HEADER: &'static str = "omega,kind,classification,jump_magnitude,growth_exponent,primitive_sup,filter_residual,decay_slope,cauchy_defect,a_min_used,horizon_used";

    pub fn csv_rows(&self) -> Vec<String> {
        fn f(x: Option<f64>) -> String {
            x.map(|v| format!("{v:.6e}")).unwrap_or_default()
        }
        self.classification
            .iter()
            .zip(&self.diagnostics)
            .enumerate()
            .map(|(k, (c, d))| {
                format!(
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    self.grid.format_point(k),
                    self.kind,
                    c,
                    f(d.jump_magnitude),
                    f(d.growth_exponent),
                    f(d.primitive_sup),
                    f(d.filter_residual),
                    f(d.decay_slope),
                    f(d.cauchy_defect),
                    f(d.a_min_used),
                    f(d.horizon_used),
                )
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for r in self.csv_rows() {
            s.push_str(&r);
            s.push('\n');
        }
        s
    }
}

/// Least-squares slope of y against x.
fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
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

/// Log-log slope with values clamped at a floor.
fn loglog_slope(x: &[f64], y: &[f64], floor: f64) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.max(floor).ln()).collect();
    slope(&lx, &ly)
}

/// Radius of the frequency interval a node is responsible for.
pub fn probe_radius(step: f64) -> f64 {
    7.0 * step / 8.0
}

struct Probe {
    sup: Vec<f64>,
    aux: Vec<f64>,
    /// defect[k] compares rungs k and k+1.
    defect: Vec<f64>,
}

type Target<'a> = dyn Fn(f64, f64) -> Result<CVec> + Sync + 'a;
type Score<'a> = dyn Fn(&CVec) -> f64 + Sync + 'a;

/// Sup of `score` over the cell [ω−ρ, ω+ρ] per rung, refined around the maximiser.
fn cell_probe(
    target: &Target,
    score: &Score,
    aux: &Score,
    omega: f64,
    rho: f64,
    ladder: &[f64],
) -> Result<Probe> {
    let coarse: Vec<f64> = (-4..=4).map(|j| omega + j as f64 * rho / 4.0).collect();
    let mut out = Probe {
        sup: Vec::with_capacity(ladder.len()),
        aux: Vec::with_capacity(ladder.len()),
        defect: Vec::with_capacity(ladder.len()),
    };
    let mut prev: Option<(Vec<CVec>, f64, CVec)> = None;
    for &a in ladder {
        let vals = coarse
            .iter()
            .map(|&s| target(a, s))
            .collect::<Result<Vec<_>>>()?;
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        let mut aux_sup: f64 = 0.0;
        for (i, v) in vals.iter().enumerate() {
            let sc = score(v);
            aux_sup = aux_sup.max(aux(v));
            if sc > best_score {
                best_score = sc;
                best = i;
            }
        }
        let mut best_s = coarse[best];
        let mut best_v = vals[best].clone();
        if let Some((pv, ps, pstar)) = &prev {
            let mut d: f64 = 0.0;
            for (x, y) in pv.iter().zip(&vals) {
                d = d.max(x.dist(y));
            }
            let v = target(a, *ps)?;
            d = d.max(pstar.dist(&v));
            aux_sup = aux_sup.max(aux(&v));
            let sc = score(&v);
            if sc > best_score {
                best_score = sc;
                best_s = *ps;
                best_v = v;
            }
            out.defect.push(d);
        }
        let mut delta = rho / 8.0;
        while delta > a / 4.0 {
            for cand in [best_s - delta, best_s + delta] {
                if (cand - omega).abs() > rho {
                    continue;
                }
                let v = target(a, cand)?;
                aux_sup = aux_sup.max(aux(&v));
                let sc = score(&v);
                if sc > best_score {
                    best_score = sc;
                    best_s = cand;
                    best_v = v;
                }
            }
            delta *= 0.5;
        }
        out.sup.push(best_score);
        out.aux.push(aux_sup);
        prev = Some((vals, best_s, best_v));
    }
    Ok(out)
}

fn tail<T: Clone>(v: &[T], n: usize) -> Vec<T> {
    v[v.len().saturating_sub(n)..].to_vec()
}

/// Fits on the final rungs: (exponent p̂ with sup ~ a^{−p̂}, defect slope q̂, last defect).
fn ladder_fits(probe_sup: &[f64], defect: &[f64], ladder: &[f64], fit: usize, floor: f64) -> (f64, f64, f64) {
    let a_fit = tail(ladder, fit);
    let p_hat = -loglog_slope(&a_fit, &tail(probe_sup, fit), floor);
    let d_fit = tail(defect, fit);
    let a_d = tail(&ladder[1..], d_fit.len());
    let q_hat = loglog_slope(&a_d, &d_fit, floor);
    (p_hat, q_hat, *defect.last().unwrap_or(&0.0))
}

/// Window sups of ‖prim(S)‖ and the log-log slope of their running maximum.
/// Samples sit at golden-ratio offsets to avoid locking onto a period;
/// beyond `horizon` the primitive is constant and evaluated once.
fn primitive_probe(
    prim: &(dyn Fn(f64) -> Result<CVec> + Sync),
    windows: &[f64],
    samples: usize,
    horizon: Option<f64>,
) -> Result<(Vec<f64>, f64)> {
    const GOLDEN: f64 = 0.618_033_988_749_894_8;
    let mut frozen: Option<f64> = None;
    let mut sups = Vec::with_capacity(windows.len() - 1);
    for w in windows.windows(2) {
        let mut m: f64 = 0.0;
        for j in 0..=samples {
            let u = if j == samples {
                1.0
            } else {
                (0.5 + j as f64 * GOLDEN).fract()
            };
            let s = w[0] + (w[1] - w[0]) * u;
            let v = match horizon {
                Some(h) if s >= h => match frozen {
                    Some(x) => x,
                    None => {
                        let x = prim(h)?.norm();
                        frozen = Some(x);
                        x
                    }
                },
                _ => prim(s)?.norm(),
            };
            m = m.max(v);
        }
        sups.push(m);
    }
    let mut run = Vec::with_capacity(sups.len());
    let mut acc: f64 = 0.0;
    for &x in &sups {
        acc = acc.max(x);
        run.push(acc);
    }
    let r = if acc < 1e-12 {
        0.0
    } else {
        loglog_slope(&windows[1..], &run, acc * 1e-12)
    };
    Ok((sups, r))
}

/// Point past which ∫₀ˢ e^{−λt}φ(t)dt no longer changes, for atom-free bodies.
fn primitive_horizon(b: &Body, d: usize, extra: f64) -> Option<f64> {
    let (atoms, _) = crate::spectral::representation(b, d)?;
    if !atoms.is_empty() {
        return None;
    }
    b.decay_horizon().map(|h| h + extra)
}

fn run_nodes<F>(grid: &FrequencyGrid, f: F) -> (Vec<Classification>, Vec<Diagnostics>)
where
    F: Fn(f64) -> Result<(Classification, Diagnostics)> + Sync,
{
    let res: Vec<(Classification, Diagnostics)> = grid
        .points()
        .into_par_iter()
        .map(|w| match f(w) {
            Ok(x) => x,
            Err(_) => (
                Classification::Undecided,
                Diagnostics {
                    quad_failed: true,
                    ..Default::default()
                },
            ),
        })
        .collect();
    res.into_iter().unzip()
}

fn require_bounded(phi: &FunctionDescriptor) -> Result<()> {
    if !phi.is_bounded() {
        return Err(SpectraError::PrecondError("estimator needs a bounded function".into()));
    }
    Ok(())
}

fn require_full(phi: &FunctionDescriptor) -> Result<()> {
    if phi.domain != Domain::FullLine {
        return Err(SpectraError::PrecondError("estimator needs a function on ℝ".into()));
    }
    Ok(())
}

fn concat(parts: Vec<CVec>) -> CVec {
    CVec(parts.into_iter().flat_map(|v| v.0).collect())
}

/// Laplace-side probes shared by the ordinary and uniform estimators.
fn laplace_node(
    target: &Target,
    prim: &(dyn Fn(f64, f64) -> Result<CVec> + Sync),
    horizon: Option<f64>,
    omega: f64,
    grid: &FrequencyGrid,
    params: &EstimatorParams,
    scale: f64,
) -> Result<(Classification, Diagnostics)> {
    let th = &params.thresholds;
    let rho = probe_radius(grid.step);
    let norm = |v: &CVec| v.norm();
    let ladder = params.used_rungs();
    let p = cell_probe(target, &norm, &norm, omega, rho, ladder)?;
    let floor = 1e-14 * scale;
    let (p_hat, q_hat, last_defect) = ladder_fits(&p.sup, &p.defect, ladder, params.fit_len, floor);
    let p1 = last_defect < th.tau_jump * scale || q_hat >= th.q_min;
    let p2 = p_hat < th.p_min;
    let (sups, r_hat) = primitive_probe(
        &|s| prim(omega, s),
        &params.primitive_windows,
        params.primitive_samples,
        horizon,
    )?;
    let p3_bounded = r_hat < th.p3_bounded;
    let class = if !p2 {
        Classification::Singular
    } else if p1 && p3_bounded {
        Classification::Regular
    } else {
        Classification::Undecided
    };
    Ok((
        class,
        Diagnostics {
            growth_exponent: Some(p_hat),
            primitive_sup: Some(sups.iter().cloned().fold(0.0, f64::max)),
            primitive_slope: Some(r_hat),
            cauchy_defect: Some(last_defect),
            a_min_used: params.a_ladder.last().copied(),
            horizon_used: params.primitive_windows.last().copied(),
            ..Default::default()
        },
    ))
}

/// Carleman-side probe on a target returning [right side; left side].
fn carleman_node(
    target: &Target,
    omega: f64,
    grid: &FrequencyGrid,
    params: &EstimatorParams,
    scale: f64,
) -> Result<(Classification, Diagnostics)> {
    let th = &params.thresholds;
    let rho = probe_radius(grid.step);
    let jump = |v: &CVec| {
        let n = v.0.len() / 2;
        (0..n).map(|i| (v.0[i] - v.0[n + i]).norm()).fold(0.0, f64::max)
    };
    let sides = |v: &CVec| v.norm();
    let ladder = params.used_rungs();
    let p = cell_probe(target, &jump, &sides, omega, rho, ladder)?;
    let floor = 1e-14 * scale;
    let (p_hat, q_hat, last_defect) = ladder_fits(&p.aux, &p.defect, ladder, params.fit_len, floor);
    let a_fit = tail(ladder, params.fit_len);
    let j_fit = tail(&p.sup, params.fit_len);
    let j_slope = loglog_slope(&a_fit, &j_fit, floor);
    let j_last = *p.sup.last().unwrap();
    let jump_vanishes = j_last < th.tau_jump * scale || j_slope >= th.q_min;
    let sides_cauchy = last_defect < th.tau_jump * scale || q_hat >= th.q_min;
    let class = if (!jump_vanishes && j_last >= 10.0 * th.tau_jump * scale) || p_hat > th.p_min {
        Classification::Singular
    } else if jump_vanishes && sides_cauchy && p_hat < th.p_min {
        Classification::Regular
    } else {
        Classification::Undecided
    };
    Ok((
        class,
        Diagnostics {
            jump_magnitude: Some(j_last),
            growth_exponent: Some(p_hat),
            cauchy_defect: Some(last_defect),
            a_min_used: params.a_ladder.last().copied(),
            ..Default::default()
        },
    ))
}

pub fn laplace_spectrum(
    phi: &FunctionDescriptor,
    grid: &FrequencyGrid,
    params: &EstimatorParams,
) -> Result<SpectrumEstimate> {
    require_bounded(phi)?;
    params.validate()?;
    let (b, d, scale) = (&phi.body, phi.dim, phi.scale_value());
    let target = |a: f64, s: f64| laplace_body(b, C64::new(a, s), d).map(|e| e.v);
    let prim = |w: f64, s: f64| partial_laplace_body(b, C64::new(0.0, w), s, d).map(|e| e.v);
    let hz = primitive_horizon(b, d, 0.0);
    let (classification, diagnostics) =
        run_nodes(grid, |w| laplace_node(&target, &prim, hz, w, grid, params, scale));
    Ok(SpectrumEstimate {
        kind: SpectrumKind::Laplace,
        grid: *grid,
        classification,
        diagnostics,
        params: params.clone(),
    })
}

pub fn carleman_spectrum(
    phi: &FunctionDescriptor,
    grid: &FrequencyGrid,
    params: &EstimatorParams,
) -> Result<SpectrumEstimate> {
    require_bounded(phi)?;
    require_full(phi)?;
    params.validate()?;
    let refl = phi.reflect()?;
    let (b, rb, d, scale) = (&phi.body, &refl.body, phi.dim, phi.scale_value());
    let target = |a: f64, s: f64| -> Result<CVec> {
        let right = laplace_body(b, C64::new(a, s), d)?.v;
        let left = -laplace_body(rb, C64::new(a, -s), d)?.v;
        Ok(concat(vec![right, left]))
    };
    let (classification, diagnostics) =
        run_nodes(grid, |w| carleman_node(&target, w, grid, params, scale));
    Ok(SpectrumEstimate {
        kind: SpectrumKind::Carleman,
        grid: *grid,
        classification,
        diagnostics,
        params: params.clone(),
    })
}

fn bump(x: f64, w: f64) -> f64 {
    let u = x / w;
    if u.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - u * u)).exp()
    }
}

pub fn weak_laplace_spectrum(
    phi: &FunctionDescriptor,
    grid: &FrequencyGrid,
    params: &EstimatorParams,
) -> Result<SpectrumEstimate> {
    require_bounded(phi)?;
    params.validate()?;
    let th = params.thresholds;
    let (b, d, scale) = (&phi.body, phi.dim, phi.scale_value());
    let rho = probe_radius(grid.step);
    let ladder = &params.a_ladder;
    let first = ladder.len() - params.fit_len - 1;
    let node = |w: f64| -> Result<(Classification, Diagnostics)> {
        let widths = [rho, rho / 2.0];
        let breaks = [w - rho, w - rho / 2.0, w, w + rho / 2.0, w + rho];
        let opts = QuadOptions::tol(1e-2 * th.tau_weak * scale * rho, 1e-3);
        let mut defects: Vec<[f64; 2]> = Vec::new();
        for k in first..ladder.len() - 1 {
            let failed = std::cell::Cell::new(false);
            let r = integrate_breaks(
                |s: f64| -> [f64; 2] {
                    let x = laplace_body(b, C64::new(ladder[k], s), d);
                    let y = laplace_body(b, C64::new(ladder[k + 1], s), d);
                    match (x, y) {
                        (Ok(x), Ok(y)) => {
                            let n = x.v.dist(&y.v);
                            [n * bump(s - w, widths[0]), n * bump(s - w, widths[1])]
                        }
                        _ => {
                            failed.set(true);
                            [0.0, 0.0]
                        }
                    }
                },
                &breaks,
                &opts,
            );
            if failed.get() {
                return Err(SpectraError::QuadFail("weak pairing".into()));
            }
            defects.push([r.value[0] / (2.0 * widths[0]), r.value[1] / (2.0 * widths[1])]);
        }
        let a_d = &ladder[first + 1..];
        let floor = 1e-14 * scale;
        let mut all_decay = true;
        let mut any_stagnant = false;
        let mut worst: f64 = 0.0;
        for j in 0..2 {
            let dj: Vec<f64> = defects.iter().map(|x| x[j]).collect();
            let q = loglog_slope(a_d, &dj, floor);
            let last = *dj.last().unwrap();
            worst = worst.max(last);
            let decays = last < th.tau_weak * scale || q >= th.q_min;
            all_decay &= decays;
            any_stagnant |= q < th.q_min && last >= 10.0 * th.tau_weak * scale;
        }
        let class = if all_decay {
            Classification::Regular
        } else if any_stagnant {
            Classification::Singular
        } else {
            Classification::Undecided
        };
        Ok((
            class,
            Diagnostics {
                cauchy_defect: Some(worst),
                a_min_used: ladder.last().copied(),
                ..Default::default()
            },
        ))
    };
    let (classification, diagnostics) = run_nodes(grid, node);
    Ok(SpectrumEstimate {
        kind: SpectrumKind::WeakLaplace,
        grid: *grid,
        classification,
        diagnostics,
        params: params.clone(),
    })
}

fn probe_times(grid: &FrequencyGrid, eps: f64) -> Vec<f64> {
    let tp = grid.max_abs() + 20.0 / eps;
    let dt = 0.5 / eps;
    let n = (tp / dt).floor() as i64;
    (-n..=n).map(|j| j as f64 * dt).collect()
}

pub fn beurling_spectrum(
    phi: &FunctionDescriptor,
    grid: &FrequencyGrid,
    params: &EstimatorParams,
) -> Result<SpectrumEstimate> {
    params.validate()?;
    require_full(phi)?;
    let th = params.thresholds;
    let (b, d) = (&phi.body, phi.dim);
    let widths = params.widths_for(grid);
    let smallest = *widths.last().unwrap();
    let scale = if phi.sup_norm_bound.is_finite() {
        phi.scale_value()
    } else {
        let mut m: f64 = 0.0;
        for t in probe_times(grid, smallest) {
            m = m.max(eval_body(b, t, d)?.norm());
        }
        m.max(1e-300)
    };
    let node = |w: f64| -> Result<(Classification, Diagnostics)> {
        let mut res = Vec::with_capacity(widths.len());
        for &eps in &widths {
            let k = band_pass(w, eps)?;
            let mut r: f64 = 0.0;
            for t in probe_times(grid, eps) {
                r = r.max(convolve_body(b, &k, t, d, false)?.v.norm());
            }
            res.push(r);
        }
        let last = *res.last().unwrap();
        let class = if last < th.tau_filter * scale {
            Classification::Regular
        } else if res.iter().all(|&r| r >= 10.0 * th.tau_filter * scale) {
            Classification::Singular
        } else {
            Classification::Undecided
        };
        Ok((
            class,
            Diagnostics {
                filter_residual: Some(last),
                ..Default::default()
            },
        ))
    };
    let (classification, diagnostics) = run_nodes(grid, node);
    let mut p = params.clone();
    p.widths = Some(widths.clone());
    Ok(SpectrumEstimate {
        kind: SpectrumKind::Beurling,
        grid: *grid,
        classification,
        diagnostics,
        params: p,
    })
}

/// Late-window sups of ‖(φ∗b)(t)‖ on [20/ε, 40/ε] and [40/ε, 80/ε], also at −t when `both_sides`.
///
/// The convolution uses the body's bounded extension to ℝ; at these times it differs
/// from the zero-extended one by at most ‖φ‖∞∫_{t}^∞|b|.
pub fn late_window_sups(b: &Body, d: usize, both_sides: bool, omega: f64, eps: f64) -> Result<(f64, f64)> {
    let k = band_pass(omega, eps)?;
    let mut out = [0.0f64; 2];
    for (i, (lo, hi)) in [(20.0, 40.0), (40.0, 80.0)].into_iter().enumerate() {
        let n = (hi - lo) as usize;
        for j in 0..=n {
            let t = (lo + j as f64) / eps;
            out[i] = out[i].max(convolve_body(b, &k, t, d, false)?.v.norm());
            if both_sides {
                out[i] = out[i].max(convolve_body(b, &k, -t, d, false)?.v.norm());
            }
        }
    }
    Ok((out[0], out[1]))
}

pub fn reduced_beurling_c0(
    phi: &FunctionDescriptor,
    grid: &FrequencyGrid,
    params: &EstimatorParams,
) -> Result<SpectrumEstimate> {
    require_bounded(phi)?;
    params.validate()?;
    let th = params.thresholds;
    let (b, d, scale) = (&phi.body, phi.dim, phi.scale_value());
    let both_sides = phi.domain == Domain::FullLine;
    let widths = params.widths_for(grid);
    let node = |w: f64| -> Result<(Classification, Diagnostics)> {
        let mut any_decay = false;
        let mut all_stagnant = true;
        let mut diag = (0.0, 0.0);
        for &eps in &widths {
            let (s1, s2) = late_window_sups(b, d, both_sides, w, eps)?;
            let nf = 1e-10 * scale;
            any_decay |= s2 < th.tau_decay * scale && (s2 <= s1 || s2 < nf);
            all_stagnant &= s2 >= 10.0 * th.tau_decay * scale && s2 >= 0.5 * s1;
            diag = (s2, (s1.max(1e-300) / s2.max(1e-300)).log2());
        }
        let class = if any_decay {
            Classification::Regular
        } else if all_stagnant {
            Classification::Singular
        } else {
            Classification::Undecided
        };
        Ok((
            class,
            Diagnostics {
                filter_residual: Some(diag.0),
                decay_slope: Some(diag.1),
                horizon_used: Some(80.0 / widths.last().unwrap()),
                ..Default::default()
            },
        ))
    };
    let (classification, diagnostics) = run_nodes(grid, node);
    let mut p = params.clone();
    p.widths = Some(widths);
    Ok(SpectrumEstimate {
        kind: SpectrumKind::ReducedBeurlingC0,
        grid: *grid,
        classification,
        diagnostics,
        params: p,
    })
}

/// Value of s ↦ ℒφ_s(λ) on the translate grid, for Re λ > 0.
fn translates_laplace(b: &Body, d: usize, lambda: C64, shifts: &[f64]) -> Result<CVec> {
    let base = laplace_body(b, lambda, d)?.v;
    let mut parts = Vec::with_capacity(shifts.len());
    for &s in shifts {
        if s == 0.0 {
            parts.push(base.clone());
        } else {
            let p = partial_laplace_body(b, lambda, s, d)?.v;
            parts.push((base.clone() - p).scale((lambda * s).exp()));
        }
    }
    Ok(concat(parts))
}

/// Translate-family estimator; `kind` must be UniformLaplace or UniformCarleman.
pub fn uniform_spectrum(
    phi: &FunctionDescriptor,
    kind: SpectrumKind,
    grid: &FrequencyGrid,
    params: &EstimatorParams,
) -> Result<SpectrumEstimate> {
    require_bounded(phi)?;
    params.validate()?;
    if phi.domain == Domain::HalfLine && params.s_grid.iter().any(|&s| s < 0.0) {
        return Err(SpectraError::DomainError("negative translate on ℝ₊".into()));
    }
    let (b, d, scale) = (&phi.body, phi.dim, phi.scale_value());
    let shifts = &params.s_grid;
    let (classification, diagnostics) = match kind {
        SpectrumKind::UniformLaplace => {
            let target = |a: f64, s: f64| translates_laplace(b, d, C64::new(a, s), shifts);
            let prim = |w: f64, s: f64| -> Result<CVec> {
                let lam = C64::new(0.0, w);
                let mut parts = Vec::with_capacity(shifts.len());
                for &sh in shifts {
                    let tb = Body::Translate {
                        inner: Box::new(b.clone()),
                        shift: sh,
                    };
                    parts.push(partial_laplace_body(&tb, lam, s, d)?.v);
                }
                Ok(concat(parts))
            };
            let back = shifts.iter().fold(0.0f64, |m, s| m.max(-s));
            let hz = primitive_horizon(b, d, back);
            run_nodes(grid, |w| laplace_node(&target, &prim, hz, w, grid, params, scale))
        }
        SpectrumKind::UniformCarleman => {
            require_full(phi)?;
            let refl = phi.reflect()?;
            let rb = &refl.body;
            let neg: Vec<f64> = shifts.iter().map(|s| -s).collect();
            // 𝒞φ_s(−a+iσ) = −ℒ(ρ_{−s})(a−iσ) with ρ the reflection
            let target = |a: f64, s: f64| -> Result<CVec> {
                let right = translates_laplace(b, d, C64::new(a, s), shifts)?;
                let left = -translates_laplace(rb, d, C64::new(a, -s), &neg)?;
                Ok(concat(vec![right, left]))
            };
            run_nodes(grid, |w| carleman_node(&target, w, grid, params, scale))
        }
        _ => {
            return Err(SpectraError::PrecondError(format!(
                "{kind} is not a uniform spectrum kind"
            )))
        }
    };
    Ok(SpectrumEstimate {
        kind,
        grid: *grid,
        classification,
        diagnostics,
        params: params.clone(),
    })
}

/// Dispatches on the kind.
pub fn estimate(
    phi: &FunctionDescriptor,
    kind: SpectrumKind,
    grid: &FrequencyGrid,
    params: &EstimatorParams,
) -> Result<SpectrumEstimate> {
    match kind {
        SpectrumKind::Laplace => laplace_spectrum(phi, grid, params),
        SpectrumKind::WeakLaplace => weak_laplace_spectrum(phi, grid, params),
        SpectrumKind::Carleman => carleman_spectrum(phi, grid, params),
        SpectrumKind::Beurling => beurling_spectrum(phi, grid, params),
        SpectrumKind::ReducedBeurlingC0 => reduced_beurling_c0(phi, grid, params),
        SpectrumKind::UniformLaplace | SpectrumKind::UniformCarleman => {
            uniform_spectrum(phi, kind, grid, params)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cvec::cr;

    fn g(a: f64, b: f64, s: f64) -> FrequencyGrid {
        FrequencyGrid::new(a, b, s).unwrap()
    }

    #[test]
    fn grid_points_and_parse() {
        let gr = FrequencyGrid::parse("-3:3:0.05").unwrap();
        assert_eq!(gr.len(), 121);
        assert_eq!(gr.format_point(80), "1.00");
        assert_eq!(gr.format_point(60), "0.00");
        assert!(FrequencyGrid::parse("0:1:0").is_err());
        assert!(FrequencyGrid::parse("1:0:0.1").is_err());
        assert!(FrequencyGrid::parse("a:b").is_err());
    }

    #[test]
    fn gamma1_laplace_and_carleman() {
        let phi = FunctionDescriptor::character(1.0, cr(1.0));
        let gr = g(0.5, 1.5, 0.05);
        let p = EstimatorParams::default();
        let l = laplace_spectrum(&phi, &gr, &p).unwrap();
        assert_eq!(l.singular_points().len(), 1);
        assert!((l.singular_points()[0] - 1.0).abs() < 1e-9);
        assert_eq!(l.count(Classification::Undecided), 0);
        let c = carleman_spectrum(&phi, &gr, &p).unwrap();
        assert_eq!(c.classification, l.classification);
    }

    #[test]
    fn gamma1_filters() {
        let phi = FunctionDescriptor::character(1.0, cr(1.0));
        let gr = g(0.5, 1.5, 0.05);
        let p = EstimatorParams::default();
        for e in [
            beurling_spectrum(&phi, &gr, &p).unwrap(),
            reduced_beurling_c0(&phi, &gr, &p).unwrap(),
            weak_laplace_spectrum(&phi, &gr, &p).unwrap(),
        ] {
            assert_eq!(e.singular_points().len(), 1, "{:?}", e.kind);
            assert_eq!(e.count(Classification::Undecided), 0, "{:?}", e.kind);
        }
    }

    #[test]
    fn csv_shape() {
        let phi = FunctionDescriptor::character(1.0, cr(1.0));
        let gr = g(0.9, 1.1, 0.05);
        let e = carleman_spectrum(&phi, &gr, &EstimatorParams::default()).unwrap();
        let csv = e.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 6);
        assert!(lines.iter().all(|l| l.split(',').count() == 11));
        assert!(lines[3].starts_with("1.00,Carleman,Singular,"));
    }

    #[test]
    fn unbounded_rejected() {
        let te = FunctionDescriptor::linear_chirp();
        let gr = g(0.0, 1.0, 0.5);
        assert!(laplace_spectrum(&te, &gr, &EstimatorParams::default()).is_err());
        assert!(beurling_spectrum(&te, &gr, &EstimatorParams::default()).is_ok());
    }

    #[test]
    fn slope_fit() {
        let x = [1.0, 2.0, 4.0];
        let y = [1.0, 4.0, 16.0];
        assert!((loglog_slope(&x, &y, 1e-300) - 2.0).abs() < 1e-12);
    }
}
