//! Named verification suites run over the standard corpus.

use crate::corpus::{standard_corpus, CorpusEntry, KnownSet};
use crate::cvec::C64;
use crate::error::{Result, SpectraError};
use crate::func_model::{Domain, FunctionDescriptor};
use crate::kernels::{band_pass, make_psi, Kernel};
use crate::semigroup::{
    orbit_laplace_check, probe_vectors, seeded_systems, verify_spectral_identities, SemigroupSystem,
};
use crate::spectra::{estimate, Classification, EstimatorParams, FrequencyGrid, SpectrumEstimate, SpectrumKind};
use crate::tauberian::{
    check_bounded_primitive, check_inclusion_from, check_ingham_decay, check_regular_ergodic,
    check_regular_zero_ergodic, check_transfer, ErgodicSource, Hypothesis, HypothesisStatus, TauberianReport,
    TauberianSettings,
};
use crate::transforms::{default_shift_grid, default_t_ladder, ergodic_mean, ErgodicVerdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

pub const SUITES: [&str; 9] = [
    "prop2_1", "eq1_11", "eq1_14", "prop4_2", "cor5_2", "sec3", "thm2_3", "thm2_4", "prop1_5",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub subject: String,
    pub pass: bool,
    pub metrics: BTreeMap<String, f64>,
    /// Offending grid points or a short reason.
    pub details: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system_id: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_id: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub assertions: Vec<Assertion>,
    pub pass: bool,
}

impl SuiteReport {
    pub fn failures(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.pass)
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub grid: FrequencyGrid,
    pub params: EstimatorParams,
    pub settings: TauberianSettings,
    pub seed: u64,
    /// Replaces the seeded systems in `sec3` when given.
    pub matrix: Option<SemigroupSystem>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            grid: FrequencyGrid::new(-3.0, 3.0, 0.05).expect("valid grid"),
            params: EstimatorParams::default(),
            settings: TauberianSettings::default(),
            seed: 2024,
            matrix: None,
        }
    }
}

type Key = (String, SpectrumKind, u64, u64, u64);

/// Corpus plus a memo of estimates keyed by subject label, kind and grid.
pub struct Workbench {
    pub config: SuiteConfig,
    pub corpus: Vec<CorpusEntry>,
    cache: Mutex<HashMap<Key, std::result::Result<SpectrumEstimate, String>>>,
}

/// Outcome of a cached estimate: `None` when the estimator does not apply.
type Est = std::result::Result<Option<SpectrumEstimate>, String>;

impl Workbench {
    pub fn new(config: SuiteConfig) -> Result<Self> {
        Ok(Workbench {
            config,
            corpus: standard_corpus()?,
            cache: Mutex::new(HashMap::new()),
        })
    }

    fn entry(&self, name: &str) -> &CorpusEntry {
        self.corpus.iter().find(|e| e.name == name).expect("corpus entry")
    }

    /// Estimates `phi` under `label`; precondition and domain errors mean "not applicable".
    pub fn est(&self, label: &str, phi: &FunctionDescriptor, kind: SpectrumKind, grid: &FrequencyGrid) -> Est {
        let key = (
            label.to_string(),
            kind,
            grid.omega_min.to_bits(),
            grid.omega_max.to_bits(),
            grid.step.to_bits(),
        );
        if let Some(r) = self.cache.lock().unwrap().get(&key) {
            return r.clone().map(Some);
        }
        let r = match estimate(phi, kind, grid, &self.config.params) {
            Ok(e) => Ok(e),
            Err(SpectraError::PrecondError(_)) | Err(SpectraError::DomainError(_)) => return Ok(None),
            Err(e) => Err(e.to_string()),
        };
        self.cache.lock().unwrap().insert(key, r.clone());
        r.map(Some)
    }

    pub fn run(&self, suite: &str) -> Result<SuiteReport> {
        let assertions = match suite {
            "prop2_1" => self.prop2_1(),
            "eq1_11" => self.eq1_11(),
            "eq1_14" => self.eq1_14(),
            "prop4_2" => self.prop4_2(),
            "cor5_2" => self.cor5_2(),
            "sec3" => self.sec3(),
            "thm2_3" => self.thm2_3(),
            "thm2_4" => self.thm2_4(),
            "prop1_5" => self.prop1_5(),
            _ => {
                return Err(SpectraError::Parse(format!(
                    "unknown suite {suite:?}; expected one of {}",
                    SUITES.join(", ")
                )))
            }
        };
        let pass = assertions.iter().all(|a| a.pass);
        Ok(SuiteReport {
            suite: suite.to_string(),
            assertions,
            pass,
        })
    }

    fn grid(&self) -> FrequencyGrid {
        self.config.grid
    }

    fn shifted_grid(&self, by: f64) -> Result<FrequencyGrid> {
        let g = self.grid();
        FrequencyGrid::new(g.omega_min + by, g.omega_max + by, g.step)
    }

    fn prop2_1(&self) -> Vec<Assertion> {
        let mut out = Vec::new();
        let grid = self.grid();
        let kinds = [SpectrumKind::Laplace, SpectrumKind::Carleman, SpectrumKind::Beurling];
        for e in &self.corpus {
            let phi = &e.descriptor;
            for kind in kinds {
                let base = match self.est(&e.name, phi, kind, &grid) {
                    Ok(Some(b)) => b,
                    Ok(None) => continue,
                    Err(msg) => {
                        out.push(error_assertion("base", &subject(&e.name, kind), msg));
                        continue;
                    }
                };
                for w0 in [1.0, -2.5] {
                    let name = format!("shift_{w0}");
                    let sub = subject(&e.name, kind);
                    let a = match self.shifted_grid(w0) {
                        Ok(g2) => {
                            let label = format!("{}|mod{w0}", e.name);
                            let r = self.est(&label, &phi.modulate(w0), kind, &g2);
                            compare_flips(&name, &sub, &base, r)
                        }
                        Err(err) => error_assertion(&name, &sub, err.to_string()),
                    };
                    out.push(a);
                }
                for a in [1.0, 10.0] {
                    let name = format!("translate_{a}");
                    let sub = subject(&e.name, kind);
                    let r = phi
                        .translate(a)
                        .map_err(|x| x.to_string())
                        .and_then(|t| self.est(&format!("{}|tr{a}", e.name), &t, kind, &grid));
                    out.push(compare_flips(&name, &sub, &base, r));
                }
                out.extend(self.mollifier_law(e, kind, &base));
            }
        }
        out
    }

    fn mollified(&self, e: &CorpusEntry, kind: SpectrumKind, h: f64) -> Est {
        let grid = self.grid();
        let m = e.descriptor.mollify(h).map_err(|x| x.to_string())?;
        self.est(&format!("{}|moll{h}", e.name), &m, kind, &grid)
    }

    fn mollifier_law(&self, e: &CorpusEntry, kind: SpectrumKind, base: &SpectrumEstimate) -> Vec<Assertion> {
        let sub = subject(&e.name, kind);
        let mut out = Vec::new();
        let mut by_h: Vec<(f64, SpectrumEstimate)> = Vec::new();
        for h in [0.5, 1.0] {
            match self.mollified(e, kind, h) {
                Ok(Some(m)) => {
                    let bad: Vec<usize> = (0..m.grid.len())
                        .filter(|&k| {
                            m.classification[k] == Classification::Singular
                                && base.classification[k] == Classification::Regular
                        })
                        .collect();
                    out.push(Assertion {
                        name: format!("mollify_{h}_subset"),
                        subject: sub.clone(),
                        pass: bad.is_empty(),
                        metrics: metrics(&[("violations", bad.len() as f64)]),
                        details: points(&m, &bad),
                        system_id: None,
                        x_id: None,
                    });
                    by_h.push((h, m));
                }
                Ok(None) => {}
                Err(msg) => out.push(error_assertion(&format!("mollify_{h}_subset"), &sub, msg)),
            }
        }
        let mut missing = Vec::new();
        for k in base.indices(Classification::Singular) {
            let w = base.grid.point(k);
            let mut hs: Vec<f64> = vec![0.5, 1.0];
            if w != 0.0 {
                hs.push(1.0 / w.abs());
            }
            hs.retain(|&h| g_abs(w * h) >= 0.5);
            let mut found = false;
            for h in hs {
                let m = match by_h.iter().find(|(x, _)| *x == h) {
                    Some((_, m)) => Some(m.clone()),
                    None => self.mollified(e, kind, h).ok().flatten(),
                };
                if m.is_some_and(|m| m.classification[k] == Classification::Singular) {
                    found = true;
                    break;
                }
            }
            if !found {
                missing.push(k);
            }
        }
        out.push(Assertion {
            name: "mollify_recovery".into(),
            subject: sub,
            pass: missing.is_empty(),
            metrics: metrics(&[
                ("singular", base.count(Classification::Singular) as f64),
                ("unrecovered", missing.len() as f64),
            ]),
            details: points(base, &missing),
            system_id: None,
            x_id: None,
        });
        out
    }

    fn eq1_11(&self) -> Vec<Assertion> {
        let grid = self.grid();
        let mut out = Vec::new();
        for e in &self.corpus {
            let phi = &e.descriptor;
            let w = self.est(&e.name, phi, SpectrumKind::WeakLaplace, &grid);
            let l = self.est(&e.name, phi, SpectrumKind::Laplace, &grid);
            let c = self.est(&e.name, phi, SpectrumKind::Carleman, &grid);
            out.push(inclusion("weak_in_laplace", &e.name, w, l.clone()));
            out.push(inclusion("laplace_in_carleman", &e.name, l, c));
        }
        out
    }

    fn eq1_14(&self) -> Vec<Assertion> {
        let grid = self.grid();
        let mut out = Vec::new();
        let filters = [(1.0, 0.3), (0.0, 0.5)];
        for e in &self.corpus {
            let phi = &e.descriptor;
            if phi.domain != Domain::FullLine || !phi.is_bounded() {
                continue;
            }
            for kind in [SpectrumKind::Beurling, SpectrumKind::ReducedBeurlingC0] {
                let base = self.est(&e.name, phi, kind, &grid);
                for (w0, eps) in filters {
                    let sub = format!("{}*bp({w0},{eps})/{kind}", e.name);
                    let f = band_pass(w0, eps).expect("valid band-pass");
                    let conv = phi
                        .convolve_with(&f)
                        .map_err(|x| x.to_string())
                        .and_then(|c| self.est(&format!("{}|bp{w0},{eps}", e.name), &c, kind, &grid));
                    out.push(support_law(&sub, base.clone(), conv, f.freq_support()));
                }
            }
        }
        // The trigonometric example: sp(φ∗f) ⊂ {1}.
        let e = self.entry("trig_1_sqrt2");
        let f = band_pass(1.0, 0.3).expect("valid band-pass");
        let r = e
            .descriptor
            .convolve_with(&f)
            .map_err(|x| x.to_string())
            .and_then(|c| self.est("trig_1_sqrt2|bp1,0.3", &c, SpectrumKind::Beurling, &grid));
        out.push(match r {
            Ok(Some(est)) => {
                let cmp = KnownSet::Points { values: vec![1.0] }.compare(&est, 0.0);
                Assertion {
                    name: "trig_convolution_support".into(),
                    subject: "trig_1_sqrt2*bp(1,0.3)/Beurling".into(),
                    pass: cmp.extra.is_empty(),
                    metrics: metrics(&[("extra", cmp.extra.len() as f64)]),
                    details: fmt_list(&cmp.extra),
                    system_id: None,
                    x_id: None,
                }
            }
            Ok(None) => error_assertion("trig_convolution_support", "trig_1_sqrt2", "not applicable".into()),
            Err(msg) => error_assertion("trig_convolution_support", "trig_1_sqrt2", msg),
        });
        out
    }

    fn prop4_2(&self) -> Vec<Assertion> {
        let grid = self.grid();
        let mut out = Vec::new();
        let pairs = [
            (SpectrumKind::Laplace, SpectrumKind::UniformLaplace),
            (SpectrumKind::Carleman, SpectrumKind::UniformCarleman),
        ];
        for e in &self.corpus {
            for (ord, uni) in pairs {
                let a = match self.est(&e.name, &e.descriptor, ord, &grid) {
                    Ok(Some(a)) => a,
                    Ok(None) => continue,
                    Err(msg) => {
                        out.push(error_assertion("uniform_equality", &subject(&e.name, ord), msg));
                        continue;
                    }
                };
                let b = self.est(&e.name, &e.descriptor, uni, &grid);
                out.push(compare_flips("uniform_equality", &subject(&e.name, uni), &a, b));
            }
        }
        out
    }

    /// Corpus entries whose every known spectrum is a finite point set, plus seeded trig polynomials.
    fn ap_subjects(&self) -> Vec<(String, FunctionDescriptor)> {
        let mut v: Vec<(String, FunctionDescriptor)> = self
            .corpus
            .iter()
            .filter(|e| {
                e.descriptor.domain == Domain::FullLine
                    && e.known_spectra.len() == SpectrumKind::ALL.len()
                    && e.known_spectra.values().all(|k| matches!(k.set, KnownSet::Points { .. }))
            })
            .map(|e| (e.name.clone(), e.descriptor.clone()))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        let g = self.grid();
        let lo = (g.omega_min / 0.25).ceil() as i32 + 1;
        let hi = (g.omega_max / 0.25).floor() as i32 - 1;
        for j in 0..3 {
            let n = rng.gen_range(2..=3);
            let mut terms: Vec<(f64, C64)> = Vec::new();
            while terms.len() < n {
                let w = 0.25 * rng.gen_range(lo..=hi) as f64;
                if terms.iter().all(|(x, _)| (x - w).abs() > 0.3) {
                    terms.push((w, C64::new(rng.gen_range(0.5..1.5), rng.gen_range(-0.5..0.5))));
                }
            }
            v.push((format!("seeded_trig_{j}"), FunctionDescriptor::trig_poly(&terms)));
        }
        v
    }

    fn cor5_2(&self) -> Vec<Assertion> {
        let grid = self.grid();
        let mut out = Vec::new();
        for (name, phi) in self.ap_subjects() {
            let l = self.est(&name, &phi, SpectrumKind::Laplace, &grid);
            let c = self.est(&name, &phi, SpectrumKind::Carleman, &grid);
            out.push(match (l, c) {
                (Ok(Some(l)), Ok(Some(c))) => {
                    let (ls, cs) = (l.indices(Classification::Singular), c.indices(Classification::Singular));
                    let diff: Vec<usize> = (0..grid.len())
                        .filter(|k| ls.contains(k) != cs.contains(k))
                        .collect();
                    Assertion {
                        name: "laplace_equals_carleman".into(),
                        subject: name,
                        pass: diff.is_empty(),
                        metrics: metrics(&[
                            ("laplace_singular", ls.len() as f64),
                            ("carleman_singular", cs.len() as f64),
                            ("mismatches", diff.len() as f64),
                        ]),
                        details: points(&l, &diff),
                        system_id: None,
                        x_id: None,
                    }
                }
                (Err(m), _) | (_, Err(m)) => error_assertion("laplace_equals_carleman", &name, m),
                _ => error_assertion("laplace_equals_carleman", &name, "not applicable".into()),
            });
        }
        out
    }

    fn sec3(&self) -> Vec<Assertion> {
        let grid = self.grid();
        let systems: Vec<SemigroupSystem> = match &self.config.matrix {
            Some(s) => vec![s.clone()],
            None => match seeded_systems(self.config.seed, 20) {
                Ok(v) => v.into_iter().map(|s| s.system).collect(),
                Err(e) => return vec![error_assertion("seeded_systems", "sec3", e.to_string())],
            },
        };
        let lambdas = [
            C64::new(0.5, 0.0),
            C64::new(1.0, 1.0),
            C64::new(0.25, -2.0),
            C64::new(2.0, 0.5),
            C64::new(0.1, 3.0),
        ];
        let mut out = Vec::new();
        for (sid, sys) in systems.iter().enumerate() {
            let xs = probe_vectors(sys.dim(), self.config.seed.wrapping_add(sid as u64));
            for (xid, x) in xs.iter().enumerate() {
                let (pass, res, details) = match orbit_laplace_check(sys, x, &lambdas) {
                    Ok(r) => (r <= 1e-6, r, String::new()),
                    Err(e) => (false, f64::NAN, e.to_string()),
                };
                out.push(Assertion {
                    name: "orbit_laplace_resolvent".into(),
                    subject: format!("system_{sid}"),
                    pass,
                    metrics: metrics(&[("residual", res)]),
                    details,
                    system_id: Some(sid),
                    x_id: Some(xid),
                });
            }
            match verify_spectral_identities(sys, &xs, &grid, &self.config.params) {
                Ok(rep) => {
                    for c in rep.checks {
                        out.push(Assertion {
                            name: c.identity.clone(),
                            subject: format!("system_{sid}/{}", c.kind),
                            pass: c.pass,
                            metrics: metrics(&[
                                ("expected", c.expected.len() as f64),
                                ("singular", c.singular.len() as f64),
                                ("undecided", c.undecided.len() as f64),
                            ]),
                            details: if c.pass {
                                String::new()
                            } else {
                                format!("expected {} got {}", fmt_list(&c.expected), fmt_list(&c.singular))
                            },
                            system_id: Some(sid),
                            x_id: c.x_id,
                        });
                    }
                }
                Err(e) => {
                    let mut a = error_assertion("spectral_identities", &format!("system_{sid}"), e.to_string());
                    a.system_id = Some(sid);
                    out.push(a);
                }
            }
        }
        out
    }

    fn hypothesis(&self) -> Hypothesis {
        Hypothesis::Estimate {
            grid: self.grid(),
            params: self.config.params.clone(),
        }
    }

    /// A small grid around ω for pointwise hypotheses.
    fn local(&self, w: f64) -> Hypothesis {
        let s = self.grid().step;
        Hypothesis::Estimate {
            grid: FrequencyGrid::new(w - 2.0 * s, w + 2.0 * s, s).expect("valid grid"),
            params: self.config.params.clone(),
        }
    }

    fn thm2_3(&self) -> Vec<Assertion> {
        let st = &self.config.settings;
        let kernels: Vec<(String, Kernel)> = vec![
            ("psi".into(), make_psi()),
            ("bp(0,0.5)".into(), band_pass(0.0, 0.5).expect("valid")),
            ("bp(1,0.5)".into(), band_pass(1.0, 0.5).expect("valid")),
        ];
        let mut out = Vec::new();
        for name in ["chirp", "psi"] {
            let phi = &self.entry(name).descriptor;
            for (kn, k) in &kernels {
                let r = check_ingham_decay(phi, k, &self.hypothesis(), st);
                out.push(from_tauberian("ingham_decay", &format!("{name}*{kn}"), r));
            }
        }
        let g1 = &self.entry("gamma_1").descriptor;
        let r = check_ingham_decay(g1, &kernels[2].1, &self.hypothesis(), st);
        out.push(refusal("ingham_refuses", "gamma_1*bp(1,0.5)", r));
        out
    }

    fn thm2_4(&self) -> Vec<Assertion> {
        let grid = self.grid();
        let st = &self.config.settings;
        let mut out = Vec::new();
        let f = band_pass(1.0, 0.3).expect("valid band-pass");
        for e in &self.corpus {
            let phi = &e.descriptor;
            if !phi.is_bounded() {
                continue;
            }
            let w = self.est(&e.name, phi, SpectrumKind::WeakLaplace, &grid);
            let c = self.est(&e.name, phi, SpectrumKind::ReducedBeurlingC0, &grid);
            out.push(match (c, w) {
                (Ok(Some(c)), Ok(Some(w))) => from_tauberian("inclusion_c0_in_weak", &e.name, check_inclusion_from(&c, &w)),
                (Err(m), _) | (_, Err(m)) => error_assertion("inclusion_c0_in_weak", &e.name, m),
                _ => continue,
            });
            if phi.domain == Domain::FullLine {
                let r = check_transfer(phi, &f, &grid, &self.config.params);
                out.push(from_tauberian("transfer_weak", &format!("{}*bp(1,0.3)", e.name), r));
            }
        }
        for (name, w0) in [("chirp", 0.0), ("gamma_1", 0.0), ("trig_1_sqrt2", 0.5), ("psi", 1.0)] {
            let phi = &self.entry(name).descriptor;
            let r = check_regular_ergodic(phi, w0, ErgodicSource::WeakLaplace, &self.local(w0), st);
            out.push(from_tauberian("regular_point_ergodic", &format!("{name}@{w0}"), r));
        }
        let regular = [
            ("chirp", 0.0),
            ("chirp", 1.0),
            ("chirp", -1.0),
            ("psi", 0.5),
            ("psi", 2.5),
            ("gamma_1", 0.0),
            ("gamma_1", -1.0),
            ("trig_1_sqrt2", 0.0),
            ("gamma_2_half", 0.0),
            ("mollified_chirp_1", 0.0),
        ];
        for (name, w0) in regular {
            let phi = &self.entry(name).descriptor;
            let r = check_bounded_primitive(phi, w0, &self.local(w0), st);
            out.push(from_tauberian("bounded_primitive", &format!("{name}@{w0}"), r));
        }
        let singular = [("gamma_1", 1.0), ("trig_1_sqrt2", 2f64.sqrt()), ("gamma_2_half", 2.0)];
        for (name, w0) in singular {
            let phi = &self.entry(name).descriptor;
            let r = check_bounded_primitive(phi, w0, &self.local(w0), st);
            out.push(refusal("bounded_primitive_refuses", &format!("{name}@{w0}"), r));
        }
        out
    }

    fn prop1_5(&self) -> Vec<Assertion> {
        let st = &self.config.settings;
        let mut out = Vec::new();
        for name in ["gamma_1", "chirp"] {
            let r = check_regular_zero_ergodic(&self.entry(name).descriptor, &self.local(0.0), st);
            out.push(from_tauberian("zero_regular_ergodic", name, r));
        }
        let r = check_regular_zero_ergodic(&self.entry("gamma_0").descriptor, &self.local(0.0), st);
        out.push(refusal("zero_regular_ergodic_refuses", "gamma_0", r));
        for e in &self.corpus {
            let phi = &e.descriptor;
            if !phi.is_bounded() {
                continue;
            }
            for h in [0.5, 1.0, std::f64::consts::PI] {
                for (tag, other) in [("translate", phi.translate(h)), ("mollify", phi.mollify(h))] {
                    let name = format!("ergodic_identity_{tag}");
                    let sub = format!("{}@{h:.4}", e.name);
                    let d = match other.and_then(|o| phi.sub(&o)) {
                        Ok(d) => d,
                        Err(err) => {
                            out.push(error_assertion(&name, &sub, err.to_string()));
                            continue;
                        }
                    };
                    out.push(mean_zero(&name, &sub, &d, st.tol_ergodic));
                }
            }
        }
        out
    }
}

fn mean_zero(name: &str, sub: &str, d: &FunctionDescriptor, tol: f64) -> Assertion {
    let shifts: Vec<f64> = match d.domain {
        Domain::HalfLine => default_shift_grid(),
        Domain::FullLine => default_shift_grid()
            .into_iter()
            .flat_map(|s| if s == 0.0 { vec![s] } else { vec![-s, s] })
            .collect(),
    };
    match ergodic_mean(d, &shifts, &default_t_ladder(), tol) {
        Ok(rep) => {
            let mean = rep.mean.as_ref().map_or(f64::INFINITY, |m| m.norm());
            let last = rep.sup_deviation_ladder.last().map_or(f64::NAN, |x| x.1);
            Assertion {
                name: name.into(),
                subject: sub.into(),
                pass: rep.verdict == ErgodicVerdict::Ergodic && mean <= tol,
                metrics: metrics(&[("mean_norm", mean), ("final_deviation", last)]),
                details: if rep.verdict == ErgodicVerdict::Ergodic {
                    String::new()
                } else {
                    format!("{:?}", rep.verdict)
                },
                system_id: None,
                x_id: None,
            }
        }
        Err(e) => error_assertion(name, sub, e.to_string()),
    }
}

fn subject(name: &str, kind: SpectrumKind) -> String {
    format!("{name}/{kind}")
}

fn metrics(kv: &[(&str, f64)]) -> BTreeMap<String, f64> {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn fmt_list(v: &[f64]) -> String {
    let s: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    format!("[{}]", s.join(" "))
}

fn points(est: &SpectrumEstimate, idx: &[usize]) -> String {
    if idx.is_empty() {
        return String::new();
    }
    let s: Vec<String> = idx.iter().map(|&k| est.grid.format_point(k)).collect();
    format!("[{}]", s.join(" "))
}

/// |g(iθ)| = |sinc(θ/2)| for the mollifier symbol g(z) = (e^z − 1)/z.
fn g_abs(theta: f64) -> f64 {
    let x = 0.5 * theta;
    if x.abs() < 1e-12 {
        1.0
    } else {
        (x.sin() / x).abs()
    }
}

fn error_assertion(name: &str, sub: &str, msg: String) -> Assertion {
    Assertion {
        name: name.into(),
        subject: sub.into(),
        pass: false,
        metrics: BTreeMap::new(),
        details: msg,
        system_id: None,
        x_id: None,
    }
}

fn flip_indices(a: &SpectrumEstimate, b: &SpectrumEstimate) -> Vec<usize> {
    use Classification::*;
    a.classification
        .iter()
        .zip(&b.classification)
        .enumerate()
        .filter(|(_, (x, y))| matches!((x, y), (Regular, Singular) | (Singular, Regular)))
        .map(|(k, _)| k)
        .collect()
}

fn compare_flips(name: &str, sub: &str, base: &SpectrumEstimate, other: Est) -> Assertion {
    match other {
        Ok(Some(o)) if o.classification.len() == base.classification.len() => {
            let f = flip_indices(base, &o);
            Assertion {
                name: name.into(),
                subject: sub.into(),
                pass: f.is_empty(),
                metrics: metrics(&[
                    ("flips", f.len() as f64),
                    ("base_singular", base.count(Classification::Singular) as f64),
                    ("other_singular", o.count(Classification::Singular) as f64),
                ]),
                details: points(base, &f),
                system_id: None,
                x_id: None,
            }
        }
        Ok(Some(_)) => error_assertion(name, sub, "grid length mismatch".into()),
        Ok(None) => error_assertion(name, sub, "estimator not applicable to transformed function".into()),
        Err(msg) => error_assertion(name, sub, msg),
    }
}

/// Singular(small) ⊆ Singular(big) ∪ Undecided(big).
fn inclusion(name: &str, sub: &str, small: Est, big: Est) -> Assertion {
    match (small, big) {
        (Ok(Some(s)), Ok(Some(b))) => {
            let bad: Vec<usize> = (0..s.grid.len())
                .filter(|&k| {
                    s.classification[k] == Classification::Singular
                        && b.classification[k] == Classification::Regular
                })
                .collect();
            Assertion {
                name: name.into(),
                subject: sub.into(),
                pass: bad.is_empty(),
                metrics: metrics(&[("violations", bad.len() as f64)]),
                details: points(&s, &bad),
                system_id: None,
                x_id: None,
            }
        }
        (Err(m), _) | (_, Err(m)) => error_assertion(name, sub, m),
        _ => Assertion {
            name: name.into(),
            subject: sub.into(),
            pass: true,
            metrics: BTreeMap::new(),
            details: "not applicable".into(),
            system_id: None,
            x_id: None,
        },
    }
}

/// Singular(φ∗f) ⊆ (Singular ∪ Undecided)(φ) ∩ supp f̂, with one step of slack.
fn support_law(sub: &str, base: Est, conv: Est, support: (f64, f64)) -> Assertion {
    let name = "convolution_support";
    match (base, conv) {
        (Ok(Some(b)), Ok(Some(c))) => {
            let slack = b.grid.step * (1.0 + 1e-9);
            let bad: Vec<usize> = c
                .indices(Classification::Singular)
                .into_iter()
                .filter(|&k| {
                    let w = c.grid.point(k);
                    let in_support = w >= support.0 - slack && w <= support.1 + slack;
                    let lo = k.saturating_sub(1);
                    let hi = (k + 1).min(b.grid.len() - 1);
                    let in_base = (lo..=hi).any(|j| b.classification[j] != Classification::Regular);
                    !(in_support && in_base)
                })
                .collect();
            Assertion {
                name: name.into(),
                subject: sub.into(),
                pass: bad.is_empty(),
                metrics: metrics(&[
                    ("violations", bad.len() as f64),
                    ("singular_conv", c.count(Classification::Singular) as f64),
                ]),
                details: points(&c, &bad),
                system_id: None,
                x_id: None,
            }
        }
        (Err(m), _) | (_, Err(m)) => error_assertion(name, sub, m),
        _ => error_assertion(name, sub, "not applicable".into()),
    }
}

fn from_tauberian(name: &str, sub: &str, r: Result<TauberianReport>) -> Assertion {
    match r {
        Ok(rep) => {
            let mut m = rep.metrics.clone();
            let verified = rep.hypothesis_status == HypothesisStatus::Verified;
            m.insert("hypothesis_verified".into(), if verified { 1.0 } else { 0.0 });
            Assertion {
                name: name.into(),
                subject: sub.into(),
                pass: rep.pass,
                metrics: m,
                details: format!("{:?}", rep.theorem_id),
                system_id: None,
                x_id: None,
            }
        }
        Err(e) => error_assertion(name, sub, e.to_string()),
    }
}

/// Passes when the check declines because its hypothesis fails.
fn refusal(name: &str, sub: &str, r: Result<TauberianReport>) -> Assertion {
    let (pass, details) = match r {
        Err(SpectraError::HypothesisUnverified(m)) => (true, m),
        Err(e) => (false, format!("unexpected error: {e}")),
        Ok(rep) => (false, format!("check ran with pass={}", rep.pass)),
    };
    Assertion {
        name: name.into(),
        subject: sub.into(),
        pass,
        metrics: BTreeMap::new(),
        details,
        system_id: None,
        x_id: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Workbench {
        Workbench::new(SuiteConfig {
            grid: FrequencyGrid::new(0.5, 1.5, 0.05).unwrap(),
            ..SuiteConfig::default()
        })
        .unwrap()
    }

    #[test]
    fn unknown_suite_is_parse_error() {
        assert!(matches!(small().run("nope"), Err(SpectraError::Parse(_))));
    }

    #[test]
    fn sec3_on_given_diagonal() {
        let sys = SemigroupSystem::diagonal(&[C64::new(0.0, 1.0), C64::new(0.0, 2.0)]).unwrap();
        let wb = Workbench::new(SuiteConfig {
            grid: FrequencyGrid::new(-3.0, 3.0, 0.05).unwrap(),
            matrix: Some(sys),
            ..SuiteConfig::default()
        })
        .unwrap();
        let r = wb.run("sec3").unwrap();
        assert!(r.pass, "{:?}", r.failures().collect::<Vec<_>>());
        assert!(r.assertions.iter().any(|a| a.x_id == Some(0)));
    }

    #[test]
    fn flip_detection() {
        let grid = FrequencyGrid::new(0.0, 0.2, 0.1).unwrap();
        let mk = |c: Vec<Classification>| SpectrumEstimate {
            kind: SpectrumKind::Laplace,
            grid,
            diagnostics: vec![Default::default(); c.len()],
            classification: c,
            params: EstimatorParams::default(),
        };
        use Classification::*;
        let a = mk(vec![Regular, Singular, Undecided]);
        let b = mk(vec![Undecided, Regular, Singular]);
        assert_eq!(flip_indices(&a, &b), vec![1]);
    }

    #[test]
    fn mollifier_symbol() {
        assert!((g_abs(0.0) - 1.0).abs() < 1e-15);
        assert!(g_abs(2.0 * std::f64::consts::PI) < 1e-15);
    }
}
