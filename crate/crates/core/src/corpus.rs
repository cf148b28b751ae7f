//! Named test functions with their analytically known spectra.

use crate::cvec::cr;
use crate::error::Result;
use crate::func_model::FunctionDescriptor;
use crate::kernels::{band_pass, make_psi};
use crate::spectra::{Classification, FrequencyGrid, SpectrumEstimate, SpectrumKind};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KnownSet {
    Points { values: Vec<f64> },
    All,
    Empty,
    /// A closed interval; the set is the interval itself.
    Interval { lo: f64, hi: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// Read off a closed-form transform.
    ClosedForm,
    /// Stated in the literature for this function.
    Literature,
    /// Follows from other entries by a stated identity.
    Derived,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnownSpectrum {
    pub set: KnownSet,
    pub source: Source,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub name: String,
    pub descriptor: FunctionDescriptor,
    pub known_spectra: BTreeMap<SpectrumKind, KnownSpectrum>,
    pub provenance: String,
}

/// Disagreement between an estimate and a known set.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Comparison {
    /// Expected points with no Singular node nearby.
    pub missing: Vec<f64>,
    /// Singular nodes outside the expected set.
    pub extra: Vec<f64>,
}

impl Comparison {
    pub fn ok(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

impl KnownSet {
    /// Compares Singular nodes with the set. Points match within one grid step; for
    /// intervals, nodes within `edge` of an endpoint may take any class.
    pub fn compare(&self, est: &SpectrumEstimate, edge: f64) -> Comparison {
        let g = &est.grid;
        let slack = g.step * (1.0 + 1e-9);
        let sing: Vec<f64> = est.singular_points();
        let mut out = Comparison::default();
        match self {
            KnownSet::Points { values } => {
                for &p in values {
                    if p >= g.omega_min - slack
                        && p <= g.omega_max + slack
                        && !sing.iter().any(|s| (s - p).abs() <= slack)
                    {
                        out.missing.push(p);
                    }
                }
                out.extra = sing
                    .into_iter()
                    .filter(|s| !values.iter().any(|p| (s - p).abs() <= slack))
                    .collect();
            }
            KnownSet::All => {
                out.missing = (0..g.len())
                    .filter(|&k| est.classification[k] != Classification::Singular)
                    .map(|k| g.point(k))
                    .collect();
            }
            KnownSet::Empty => out.extra = sing,
            KnownSet::Interval { lo, hi } => {
                for k in 0..g.len() {
                    let w = g.point(k);
                    let inner = w > lo + edge && w < hi - edge;
                    let outer = w < lo - edge.max(slack) || w > hi + edge.max(slack);
                    let s = est.classification[k] == Classification::Singular;
                    if inner && !s {
                        out.missing.push(w);
                    }
                    if outer && s {
                        out.extra.push(w);
                    }
                }
            }
        }
        out
    }

    /// Expected Singular nodes on a grid (interval ends included).
    pub fn nodes(&self, grid: &FrequencyGrid) -> Vec<usize> {
        match self {
            KnownSet::Points { values } => {
                let mut v: Vec<usize> = values
                    .iter()
                    .filter(|&&p| p >= grid.omega_min - 0.5 * grid.step && p <= grid.omega_max + 0.5 * grid.step)
                    .map(|&p| grid.nearest(p))
                    .collect();
                v.sort_unstable();
                v.dedup();
                v
            }
            KnownSet::All => (0..grid.len()).collect(),
            KnownSet::Empty => vec![],
            KnownSet::Interval { lo, hi } => (0..grid.len())
                .filter(|&k| grid.point(k) >= *lo && grid.point(k) <= *hi)
                .collect(),
        }
    }
}

fn known(set: KnownSet, source: Source, reason: &str) -> KnownSpectrum {
    KnownSpectrum {
        set,
        source,
        reason: reason.to_string(),
    }
}

fn every(kinds: &[SpectrumKind], k: KnownSpectrum) -> BTreeMap<SpectrumKind, KnownSpectrum> {
    kinds.iter().map(|&x| (x, k.clone())).collect()
}

use SpectrumKind::*;

fn points_all_kinds(values: Vec<f64>, reason: &str) -> BTreeMap<SpectrumKind, KnownSpectrum> {
    every(
        &SpectrumKind::ALL,
        known(KnownSet::Points { values }, Source::ClosedForm, reason),
    )
}

fn chirp_like(reason: &str) -> BTreeMap<SpectrumKind, KnownSpectrum> {
    let mut m = every(
        &[Laplace, WeakLaplace, ReducedBeurlingC0, UniformLaplace],
        known(KnownSet::Empty, Source::Literature, reason),
    );
    m.extend(every(
        &[Carleman, Beurling, UniformCarleman],
        known(KnownSet::All, Source::Literature, reason),
    ));
    m
}

fn band_limited_l1(lo: f64, hi: f64) -> BTreeMap<SpectrumKind, KnownSpectrum> {
    let mut m = every(
        &[WeakLaplace, ReducedBeurlingC0],
        known(
            KnownSet::Empty,
            Source::Literature,
            "integrable: weak boundary values exist and every filtered version vanishes at infinity",
        ),
    );
    m.extend(every(
        &[Carleman, Beurling, UniformCarleman],
        known(
            KnownSet::Interval { lo, hi },
            Source::ClosedForm,
            "the Fourier transform is positive inside its support and the transform jump equals it",
        ),
    ));
    m
}

fn entry(
    name: &str,
    descriptor: FunctionDescriptor,
    known_spectra: BTreeMap<SpectrumKind, KnownSpectrum>,
    provenance: &str,
) -> CorpusEntry {
    CorpusEntry {
        name: name.to_string(),
        descriptor,
        known_spectra,
        provenance: provenance.to_string(),
    }
}

pub fn standard_corpus() -> Result<Vec<CorpusEntry>> {
    let sqrt2 = 2f64.sqrt();
    let char_reason = "ℒγ_ω(λ) = 1/(λ − iω) and γ_ω∗f = f̂(ω)γ_ω";
    let trig = FunctionDescriptor::trig_poly(&[(1.0, cr(1.0)), (sqrt2, cr(1.0))]);
    let chirp = FunctionDescriptor::chirp();
    let psi = FunctionDescriptor::kernel(make_psi())?;
    let chirp_reason = "Fresnel: the primitive of e^{it²} converges while its Fourier transform never vanishes";
    let moll_reason = "M_h of the chirp vanishes at infinity; its Fourier transform vanishes only where e^{iξh} = 1";

    let mut half = BTreeMap::new();
    for k in [Laplace, WeakLaplace, ReducedBeurlingC0, UniformLaplace] {
        half.insert(
            k,
            known(KnownSet::Points { values: vec![2.0] }, Source::ClosedForm, char_reason),
        );
    }
    let mut te = BTreeMap::new();
    te.insert(
        Beurling,
        known(
            KnownSet::Points { values: vec![1.0] },
            Source::Literature,
            "t e^{it} is unbounded and not ergodic, but every filter vanishing at 1 annihilates it",
        ),
    );

    Ok(vec![
        entry("gamma_0", FunctionDescriptor::character(0.0, cr(1.0)), points_all_kinds(vec![0.0], char_reason), "character"),
        entry("gamma_1", FunctionDescriptor::character(1.0, cr(1.0)), points_all_kinds(vec![1.0], char_reason), "character"),
        entry(
            "gamma_-2.5",
            FunctionDescriptor::character(-2.5, cr(1.0)),
            points_all_kinds(vec![-2.5], char_reason),
            "character",
        ),
        entry(
            "gamma_2_half",
            FunctionDescriptor::character(2.0, cr(1.0)).restrict_and_extend()?,
            half,
            "character on the half-line",
        ),
        entry(
            "trig_1_sqrt2",
            trig.clone(),
            points_all_kinds(vec![1.0, sqrt2], "sum of two characters with incommensurate frequencies"),
            "trigonometric polynomial",
        ),
        entry("chirp", chirp.clone(), chirp_like(chirp_reason), "chirp e^{it²}"),
        entry("te_it", FunctionDescriptor::linear_chirp(), te, "unbounded counterexample t e^{it}"),
        entry("psi", psi.clone(), band_limited_l1(-2.0, 2.0), "band-limited Schwartz kernel ψ"),
        entry("mollified_chirp_0.5", chirp.mollify(0.5)?, chirp_like(moll_reason), "mollified chirp"),
        entry("mollified_chirp_1", chirp.mollify(1.0)?, chirp_like(moll_reason), "mollified chirp"),
        entry(
            "translate_chirp_3",
            chirp.translate(3.0)?,
            chirp_like("translation leaves every spectrum unchanged"),
            "translated chirp",
        ),
        entry(
            "translate_trig_2",
            trig.translate(2.0)?,
            points_all_kinds(vec![1.0, sqrt2], "translation multiplies each character by a unimodular constant"),
            "translated trigonometric polynomial",
        ),
        entry("translate_psi_5", psi.translate(5.0)?, band_limited_l1(-2.0, 2.0), "translated ψ"),
        entry(
            "convolved_trig_bp",
            trig.convolve_with(&band_pass(1.0, 0.3)?)?,
            points_all_kinds(vec![1.0], "the band-pass transform is 1 at 1 and 0 at √2"),
            "trigonometric polynomial through a band-pass filter on [0.7, 1.3]",
        ),
        entry(
            "convolved_psi_bp",
            psi.convolve_with(&band_pass(1.0, 0.5)?)?,
            band_limited_l1(0.5, 1.5),
            "ψ through a band-pass filter on [0.5, 1.5]",
        ),
    ])
}

pub fn corpus_to_json(entries: &[CorpusEntry]) -> String {
    let mut s = serde_json::to_string_pretty(entries).expect("corpus serializes");
    s.push('\n');
    s
}

pub fn corpus_from_json(s: &str) -> Result<Vec<CorpusEntry>> {
    let raw: Vec<CorpusEntry> = serde_json::from_str(s)?;
    raw.into_iter()
        .map(|e| {
            let descriptor = FunctionDescriptor::from_json(&e.descriptor.to_json())?;
            Ok(CorpusEntry { descriptor, ..e })
        })
        .collect()
}

pub fn find(entries: &[CorpusEntry], name: &str) -> Option<CorpusEntry> {
    entries.iter().find(|e| e.name == name).cloned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let c = standard_corpus().unwrap();
        let chirp = find(&c, "chirp").unwrap();
        assert_eq!(chirp.known_spectra[&Laplace].set, KnownSet::Empty);
        let g1 = find(&c, "gamma_1").unwrap();
        assert_eq!(g1.known_spectra[&Carleman].set, KnownSet::Points { values: vec![1.0] });
        let te = find(&c, "te_it").unwrap();
        assert_eq!(te.known_spectra[&Beurling].set, KnownSet::Points { values: vec![1.0] });
        assert!(!te.descriptor.is_bounded());
    }

    #[test]
    fn round_trip() {
        let c = standard_corpus().unwrap();
        let s = corpus_to_json(&c);
        let back = corpus_from_json(&s).unwrap();
        assert_eq!(back, c);
        assert_eq!(corpus_to_json(&back), s);
        for e in &c {
            let j = e.descriptor.to_json();
            assert_eq!(FunctionDescriptor::from_json(&j).unwrap().to_json(), j);
        }
    }

    #[test]
    fn known_nodes() {
        let g = FrequencyGrid::new(-1.0, 2.0, 0.05).unwrap();
        let s = KnownSet::Points { values: vec![1.0, 2f64.sqrt()] };
        let n = s.nodes(&g);
        assert_eq!(n.len(), 2);
        assert!((g.point(n[1]) - 1.40).abs() < 1e-12);
        assert_eq!(KnownSet::Interval { lo: 0.5, hi: 1.5 }.nodes(&g).len(), 21);
    }
}
