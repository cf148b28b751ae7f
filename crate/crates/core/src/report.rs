//! Run configuration, the `analyze`/`verify` commands and CSV/JSON emission.

use crate::error::{Result, SpectraError};
use crate::func_model::FunctionDescriptor;
use crate::semigroup::{probe_vectors, SemigroupSystem};
use crate::spectra::{estimate, EstimatorParams, FrequencyGrid, SpectrumEstimate, SpectrumKind, Thresholds};
use crate::suites::{SuiteConfig, SuiteReport, Workbench, SUITES};
use crate::tauberian::TauberianSettings;
use serde::{Deserialize, Serialize};
use std::io::Write;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_QUAD: i32 = 2;
pub const EXIT_ASSERT: i32 = 3;

/// Fraction of quadrature-forced Undecided nodes above which a run counts as failed.
pub const QUAD_FAIL_FRACTION: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Analyze,
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Everything that determines a report. `out` and `threads` affect where and how
/// fast it is written, not its content, so they stay out of the header echo.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub func: Option<String>,
    pub matrix: Option<String>,
    pub spectrum: Option<SpectrumKind>,
    pub suite: Option<String>,
    pub grid: FrequencyGrid,
    pub a_ladder: Vec<f64>,
    pub s_grid: Vec<f64>,
    pub thresholds: Thresholds,
    pub tol_ergodic: f64,
    pub seed: u64,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<String>,
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        let p = EstimatorParams::default();
        RunConfig {
            command,
            func: None,
            matrix: None,
            spectrum: None,
            suite: None,
            grid: FrequencyGrid::new(-3.0, 3.0, 0.05).expect("valid grid"),
            a_ladder: p.a_ladder,
            s_grid: p.s_grid,
            thresholds: p.thresholds,
            tol_ergodic: TauberianSettings::default().tol_ergodic,
            seed: 2024,
            format: Format::Csv,
            out: None,
            threads: None,
        }
    }

    /// Applies a `KEY=VAL` override.
    pub fn set_tol(&mut self, kv: &str) -> Result<()> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| SpectraError::Parse(format!("--tol expects KEY=VAL, got {kv:?}")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|e| SpectraError::Parse(format!("bad value for {k}: {e}")))?;
        match k.trim() {
            "tol_ergodic" => {
                if !(v.is_finite() && v > 0.0) {
                    return Err(SpectraError::Parse("tol_ergodic must be positive".into()));
                }
                self.tol_ergodic = v;
                Ok(())
            }
            key => self.thresholds.set(key, v),
        }
    }

    /// Canonical single-line JSON used in every report header.
    pub fn echo(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn from_echo(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| SpectraError::Parse(format!("config: {e}")))
    }

    pub fn params(&self) -> EstimatorParams {
        EstimatorParams {
            a_ladder: self.a_ladder.clone(),
            s_grid: self.s_grid.clone(),
            thresholds: self.thresholds,
            ..EstimatorParams::default()
        }
    }

    pub fn suite_config(&self, matrix: Option<SemigroupSystem>) -> SuiteConfig {
        SuiteConfig {
            grid: self.grid,
            params: self.params(),
            settings: TauberianSettings {
                tau_decay: self.thresholds.tau_decay,
                tol_ergodic: self.tol_ergodic,
                ..TauberianSettings::default()
            },
            seed: self.seed,
            matrix,
        }
    }
}

pub fn parse_s_grid(s: &str) -> Result<Vec<f64>> {
    let v = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| SpectraError::Parse(format!("bad s-grid value {p:?}: {e}")))
        })
        .collect::<Result<Vec<f64>>>()?;
    if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
        return Err(SpectraError::Parse("s-grid needs finite values".into()));
    }
    Ok(v)
}

fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| SpectraError::Io(format!("{path}: {e}")))
}

/// One estimate, tagged with (system, probe vector) for semigroup orbits.
pub struct AnalyzeRow {
    pub ids: Option<(usize, usize)>,
    pub estimate: SpectrumEstimate,
}

pub fn analyze(cfg: &RunConfig) -> Result<Vec<AnalyzeRow>> {
    let kind = cfg
        .spectrum
        .ok_or_else(|| SpectraError::Parse("analyze needs --spectrum".into()))?;
    let params = cfg.params();
    match (&cfg.func, &cfg.matrix) {
        (Some(f), None) => {
            let phi = FunctionDescriptor::from_json(&read(f)?)?;
            Ok(vec![AnalyzeRow {
                ids: None,
                estimate: estimate(&phi, kind, &cfg.grid, &params)?,
            }])
        }
        (None, Some(m)) => {
            let sys = SemigroupSystem::from_json(&read(m)?)?;
            probe_vectors(sys.dim(), cfg.seed)
                .iter()
                .enumerate()
                .map(|(xid, x)| {
                    let orbit = sys.orbit(x)?;
                    Ok(AnalyzeRow {
                        ids: Some((0, xid)),
                        estimate: estimate(&orbit, kind, &cfg.grid, &params)?,
                    })
                })
                .collect()
        }
        _ => Err(SpectraError::Parse("analyze needs exactly one of --func, --matrix".into())),
    }
}

pub fn render_analyze(cfg: &RunConfig, rows: &[AnalyzeRow]) -> String {
    let mut s = String::new();
    match cfg.format {
        Format::Csv => {
            s.push_str(&format!("# config: {}\n", cfg.echo()));
            let tagged = rows.iter().any(|r| r.ids.is_some());
            if tagged {
                s.push_str("system_id,x_id,");
            }
            s.push_str(SpectrumEstimate::CSV_HEADER);
            s.push('\n');
            for r in rows {
                for line in r.estimate.csv_rows() {
                    if let Some((sid, xid)) = r.ids {
                        s.push_str(&format!("{sid},{xid},"));
                    }
                    s.push_str(&line);
                    s.push('\n');
                }
            }
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Row<'a> {
                #[serde(skip_serializing_if = "Option::is_none")]
                system_id: Option<usize>,
                #[serde(skip_serializing_if = "Option::is_none")]
                x_id: Option<usize>,
                estimate: &'a SpectrumEstimate,
            }
            #[derive(Serialize)]
            struct Doc<'a> {
                config: &'a RunConfig,
                results: Vec<Row<'a>>,
            }
            let doc = Doc {
                config: cfg,
                results: rows
                    .iter()
                    .map(|r| Row {
                        system_id: r.ids.map(|x| x.0),
                        x_id: r.ids.map(|x| x.1),
                        estimate: &r.estimate,
                    })
                    .collect(),
            };
            s = serde_json::to_string_pretty(&doc).expect("report serializes");
            s.push('\n');
        }
    }
    s
}

pub fn verify(cfg: &RunConfig) -> Result<Vec<SuiteReport>> {
    let suite = cfg
        .suite
        .as_deref()
        .ok_or_else(|| SpectraError::Parse("verify needs --suite".into()))?;
    let names: Vec<&str> = if suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&suite) {
        vec![suite]
    } else {
        return Err(SpectraError::Parse(format!(
            "unknown suite {suite:?}; expected all or one of {}",
            SUITES.join(", ")
        )));
    };
    let matrix = match &cfg.matrix {
        Some(m) => Some(SemigroupSystem::from_json(&read(m)?)?),
        None => None,
    };
    let wb = Workbench::new(cfg.suite_config(matrix))?;
    names.into_iter().map(|n| wb.run(n)).collect()
}

pub fn render_verify(cfg: &RunConfig, reports: &[SuiteReport]) -> String {
    match cfg.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                config: &'a RunConfig,
                pass: bool,
                suites: &'a [SuiteReport],
            }
            let doc = Doc {
                config: cfg,
                pass: reports.iter().all(|r| r.pass),
                suites: reports,
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["suite", "name", "subject", "system_id", "x_id", "pass", "metrics", "details"])
                .expect("in-memory write");
            for r in reports {
                for a in &r.assertions {
                    let metrics: Vec<String> = a.metrics.iter().map(|(k, v)| format!("{k}={v:e}")).collect();
                    let opt = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
                    w.write_record([
                        r.suite.as_str(),
                        &a.name,
                        &a.subject,
                        &opt(a.system_id),
                        &opt(a.x_id),
                        if a.pass { "true" } else { "false" },
                        &metrics.join(";"),
                        &a.details,
                    ])
                    .expect("in-memory write");
                }
            }
            let body = String::from_utf8(w.into_inner().expect("flush")).expect("utf-8");
            format!("# config: {}\n{body}", cfg.echo())
        }
    }
}

fn emit(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.out {
        Some(p) => std::fs::write(p, text).map_err(|e| SpectraError::Io(format!("{p}: {e}"))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| SpectraError::Io(e.to_string())),
    }
}

fn input_error(e: &SpectraError) -> i32 {
    eprintln!("error: {e}");
    match e {
        SpectraError::QuadFail(_) => EXIT_QUAD,
        _ => EXIT_INPUT,
    }
}

pub fn cmd_analyze(cfg: &RunConfig) -> i32 {
    let rows = match analyze(cfg) {
        Ok(r) => r,
        Err(e) => return input_error(&e),
    };
    if let Err(e) = emit(cfg, &render_analyze(cfg, &rows)) {
        return input_error(&e);
    }
    let total: usize = rows.iter().map(|r| r.estimate.grid.len()).sum();
    let failed: usize = rows.iter().map(|r| r.estimate.quad_failures()).sum();
    if failed as f64 > QUAD_FAIL_FRACTION * total as f64 {
        eprintln!("error: {failed} of {total} nodes undecided by quadrature failure");
        return EXIT_QUAD;
    }
    EXIT_OK
}

pub fn cmd_verify(cfg: &RunConfig) -> i32 {
    let reports = match verify(cfg) {
        Ok(r) => r,
        Err(e) => return input_error(&e),
    };
    if let Err(e) = emit(cfg, &render_verify(cfg, &reports)) {
        return input_error(&e);
    }
    let mut code = EXIT_OK;
    for r in &reports {
        for a in r.failures() {
            eprintln!("FAIL {} {} {}: {}", r.suite, a.name, a.subject, a.details);
            code = EXIT_ASSERT;
        }
    }
    code
}
