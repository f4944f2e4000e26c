//! Seeded Monte Carlo campaigns over a parameter grid.
//!
//! Every trial is an independent task. Its sample is keyed by
//! `(mix(master_seed, cell), trial)`, so output does not depend on scheduling.
//! Workers send finished reports to one writer thread, which reorders them by
//! sequence number before appending to the JSON-lines file.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::audit::{lemma_audit, AuditRecord, CompleteHost};
use crate::combinatorics::binomial;
use crate::family::{cover_within, matching_number};
use crate::graph::{f_bound, max_nu_subgraph, SPartition};
use crate::oracle::{theorem_verdict_with, OracleLimits, Verdict};
use crate::regime::{regime_report, RegimeInputs};
use crate::sampler::{mix_seed, sample_kp, SampleSpec};
use crate::{Error, Result};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "MATCHLAB_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Thm1,
    Thm2,
    Prop23,
    K2,
    Audit,
}

impl ExperimentKind {
    fn name(self) -> &'static str {
        match self {
            ExperimentKind::Thm1 => "thm1",
            ExperimentKind::Thm2 => "thm2",
            ExperimentKind::Prop23 => "prop23",
            ExperimentKind::K2 => "k2",
            ExperimentKind::Audit => "audit",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Auto {
    Auto,
}

/// A grid value for `p`: a number, or `"auto"` for the threshold the
/// experiment kind calls for.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PChoice {
    Value(f64),
    Auto(Auto),
}

fn default_t() -> Vec<u32> {
    vec![1]
}

fn default_eps() -> Vec<f64> {
    vec![0.3]
}

fn default_p() -> Vec<PChoice> {
    vec![PChoice::Auto(Auto::Auto)]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n: Vec<u32>,
    pub k: Vec<u32>,
    pub s: Vec<u32>,
    #[serde(default = "default_t")]
    pub t: Vec<u32>,
    #[serde(default = "default_eps")]
    pub epsilon: Vec<f64>,
    #[serde(default = "default_p")]
    pub p: Vec<PChoice>,
}

fn default_budget() -> usize {
    100
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub kind: ExperimentKind,
    pub grid: Grid,
    pub trials: u32,
    pub master_seed: u64,
    /// Path prefix; `.jsonl` and `.csv` are appended.
    pub output: PathBuf,
    #[serde(default)]
    pub threads: Option<usize>,
    /// Minimum success fraction per cell; `None` disables the check.
    #[serde(default)]
    pub success_floor: Option<f64>,
    /// Abort on the first trial error instead of recording it.
    #[serde(default)]
    pub strict: bool,
    /// Random instances per audited condition.
    #[serde(default = "default_budget")]
    pub audit_budget: usize,
    /// Per-trial solver deadline.
    #[serde(default)]
    pub timeout_ms: Option<u64>,
}

impl CampaignConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: CampaignConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.grid;
        let empty = [
            ("n", g.n.is_empty()),
            ("k", g.k.is_empty()),
            ("s", g.s.is_empty()),
            ("t", g.t.is_empty()),
            ("epsilon", g.epsilon.is_empty()),
            ("p", g.p.is_empty()),
        ];
        if let Some((name, _)) = empty.iter().find(|(_, e)| *e) {
            return Err(Error::Config(format!("grid list `{name}` is empty")));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        for p in &g.p {
            if let PChoice::Value(v) = p {
                if !(0.0..=1.0).contains(v) {
                    return Err(Error::Config(format!("p = {v} outside [0, 1]")));
                }
            }
        }
        if let Some(f) = self.success_floor {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::Config(format!("success floor {f} outside [0, 1]")));
            }
        }
        if self.kind == ExperimentKind::Audit && self.audit_budget == 0 {
            return Err(Error::Config("audit budget must be at least 1".into()));
        }
        Ok(())
    }

    /// The grid cells in a fixed order (`n`, `k`, `s`, `t`, `ε`, `p`).
    pub fn cells(&self) -> Result<Vec<Cell>> {
        let g = &self.grid;
        let mut out = Vec::new();
        for &n in &g.n {
            for &k in &g.k {
                for &s in &g.s {
                    for &t in &g.t {
                        for &epsilon in &g.epsilon {
                            for &choice in &g.p {
                                let (p, auto) = resolve_p(self.kind, n, k, s, t, epsilon, choice)?;
                                out.push(Cell {
                                    index: out.len(),
                                    n,
                                    k,
                                    s,
                                    t,
                                    epsilon,
                                    p,
                                    auto_p: auto,
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub index: usize,
    pub n: u32,
    pub k: u32,
    pub s: u32,
    pub t: u32,
    pub epsilon: f64,
    pub p: f64,
    pub auto_p: bool,
}

fn resolve_p(
    kind: ExperimentKind,
    n: u32,
    k: u32,
    s: u32,
    t: u32,
    eps: f64,
    choice: PChoice,
) -> Result<(f64, bool)> {
    let v = match choice {
        PChoice::Value(v) => return Ok((v, false)),
        PChoice::Auto(_) => {
            let inputs = RegimeInputs {
                n,
                k,
                s,
                t: Some(t),
                eps: None,
                p: None,
            };
            let report = || regime_report(inputs).map_err(|e| Error::Config(e.to_string()));
            match kind {
                ExperimentKind::Thm1 | ExperimentKind::Audit => report()?.thm1.p_min,
                ExperimentKind::Thm2 => report()?.thm2.expect("t is supplied").p_min,
                ExperimentKind::Prop23 => report()?.prop_window.test_point.ok_or_else(|| {
                    Error::Config(format!("empty window at n = {n}, k = {k}, s = {s}"))
                })?,
                ExperimentKind::K2 => 250.0 * (n as f64).ln() / (eps * eps * n as f64),
            }
        }
    };
    Ok((v.min(1.0), true))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Verdict(Verdict),
    Prop23 {
        nu: usize,
        nu_le_s: bool,
        nontrivial: bool,
    },
    K2 {
        x: usize,
        f: u64,
        lower: f64,
        upper: f64,
        within: bool,
        partition: SPartition,
    },
    Audit(AuditRecord),
    Error {
        message: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub cell: usize,
    pub trial: u32,
    pub spec: SampleSpec,
    pub host_edge_count: u64,
    pub outcome: Outcome,
    pub lemma_audit: Option<AuditRecord>,
    pub success: bool,
    pub wall_time_ms: u64,
}

impl TrialReport {
    /// The per-kind size averaged in the summary.
    pub fn size(&self) -> f64 {
        match &self.outcome {
            Outcome::Verdict(v) => v.optimum_size as f64,
            Outcome::Prop23 { nu, .. } => *nu as f64,
            Outcome::K2 { x, .. } => *x as f64,
            Outcome::Audit(a) => a.checks.iter().map(|c| c.violations).sum::<usize>() as f64,
            Outcome::Error { .. } => 0.0,
        }
    }

    pub fn is_error(&self) -> bool {
        matches!(self.outcome, Outcome::Error { .. })
    }
}

/// Runs one trial of `cell`.
pub fn run_trial(cfg: &CampaignConfig, cell: &Cell, trial: u32) -> Result<TrialReport> {
    let start = Instant::now();
    let spec = SampleSpec {
        n: cell.n,
        k: cell.k,
        p: cell.p,
        seed: mix_seed(cfg.master_seed, cell.index as u64),
        trial_index: trial as u64,
    };
    let limits = OracleLimits {
        deadline: cfg.timeout_ms.map(|ms| start + Duration::from_millis(ms)),
        ..OracleLimits::default()
    };
    let s = cell.s as usize;
    let audit_seed = mix_seed(spec.seed, trial as u64);

    let (host_edge_count, outcome, lemma, success) = if cfg.kind == ExperimentKind::Audit
        && cell.p == 1.0
    {
        // closed-form counts; the complete host is never materialized
        let host = CompleteHost {
            n: cell.n,
            k: cell.k,
        };
        let rec = lemma_audit(&host, 1.0, s, cell.t as usize, cfg.audit_budget, audit_seed)?;
        let count = binomial(cell.n as u64, cell.k as u64).try_into().unwrap_or(u64::MAX);
        let ok = rec.all_pass;
        (count, Outcome::Audit(rec), None, ok)
    } else {
        let host = sample_kp(&spec)?;
        let audit = |budget: usize| {
            lemma_audit(&host, cell.p, s, cell.t as usize, budget, audit_seed)
        };
        let lemma = if cfg.kind != ExperimentKind::Audit && cfg.audit_budget > 0 {
            Some(audit(cfg.audit_budget)?)
        } else {
            None
        };
        let (outcome, ok) = match cfg.kind {
            ExperimentKind::Thm1 | ExperimentKind::Thm2 => {
                let v = theorem_verdict_with(&host, s, &limits)?;
                let ok = v.conclusion_holds;
                (Outcome::Verdict(v), ok)
            }
            ExperimentKind::Prop23 => {
                let (nu, _) = matching_number(&host);
                let nu_le_s = nu <= s;
                let nontrivial = cover_within(&host, nu).is_none();
                (
                    Outcome::Prop23 {
                        nu,
                        nu_le_s,
                        nontrivial,
                    },
                    nu_le_s && nontrivial,
                )
            }
            ExperimentKind::K2 => {
                let (x, partition) = max_nu_subgraph(&host, s)?;
                let f = f_bound(cell.n as u64, s as u64);
                let mean = cell.p * f as f64;
                let (lower, upper) = ((1.0 - cell.epsilon) * mean, (1.0 + cell.epsilon) * mean);
                let within = lower <= x as f64 && x as f64 <= upper;
                (
                    Outcome::K2 {
                        x,
                        f,
                        lower,
                        upper,
                        within,
                        partition,
                    },
                    within,
                )
            }
            ExperimentKind::Audit => {
                let rec = audit(cfg.audit_budget)?;
                let ok = rec.all_pass;
                (Outcome::Audit(rec), ok)
            }
        };
        (host.len() as u64, outcome, lemma, ok)
    };
    Ok(TrialReport {
        cell: cell.index,
        trial,
        spec,
        host_edge_count,
        outcome,
        lemma_audit: lemma,
        success,
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}

fn error_report(cfg: &CampaignConfig, cell: &Cell, trial: u32, err: &Error) -> TrialReport {
    TrialReport {
        cell: cell.index,
        trial,
        spec: SampleSpec {
            n: cell.n,
            k: cell.k,
            p: cell.p,
            seed: mix_seed(cfg.master_seed, cell.index as u64),
            trial_index: trial as u64,
        },
        host_edge_count: 0,
        outcome: Outcome::Error {
            message: err.to_string(),
        },
        lemma_audit: None,
        success: false,
        wall_time_ms: 0,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub cell: usize,
    pub kind: String,
    pub n: u32,
    pub k: u32,
    pub s: u32,
    pub t: u32,
    pub epsilon: f64,
    pub p: f64,
    pub auto_p: bool,
    pub trials: u32,
    pub successes: u32,
    pub errors: u32,
    pub success_fraction: f64,
    pub mean_host_edges: f64,
    pub mean_size: f64,
    pub mean_wall_ms: f64,
    pub floor_met: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub jsonl: PathBuf,
    pub csv: PathBuf,
    pub threads: usize,
    pub cells: Vec<CellSummary>,
    pub all_floors_met: bool,
}

/// Worker count: the configured cap, `MATCHLAB_THREADS`, and the job count,
/// whichever is smallest.
pub fn worker_count(configured: Option<usize>, jobs: usize) -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    let env = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&v| v > 0);
    configured
        .unwrap_or(available)
        .min(env.unwrap_or(usize::MAX))
        .min(jobs)
        .max(1)
}

fn with_extension(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignSummary> {
    cfg.validate()?;
    let cells = cfg.cells()?;
    let jobs: Vec<(usize, u32)> = (0..cells.len())
        .flat_map(|c| (0..cfg.trials).map(move |t| (c, t)))
        .collect();
    let threads = worker_count(cfg.threads, jobs.len());
    let jsonl = with_extension(&cfg.output, "jsonl");
    let csv_path = with_extension(&cfg.output, "csv");
    if let Some(dir) = jsonl.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let file = File::create(&jsonl)?;

    let (tx, rx) = mpsc::channel::<(usize, TrialReport)>();
    let writer = std::thread::spawn(move || -> Result<Vec<TrialReport>> {
        let mut out = BufWriter::new(file);
        let mut pending = BTreeMap::new();
        let mut next = 0;
        let mut done = Vec::new();
        for (seq, report) in rx {
            pending.insert(seq, report);
            while let Some(r) = pending.remove(&next) {
                serde_json::to_writer(&mut out, &r)?;
                out.write_all(b"\n")?;
                done.push(r);
                next += 1;
            }
        }
        out.flush()?;
        Ok(done)
    });

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let result: Result<()> = pool.install(|| {
        jobs.par_iter()
            .enumerate()
            .try_for_each_with(tx, |tx, (seq, &(c, trial))| {
                let cell = &cells[c];
                let report = match run_trial(cfg, cell, trial) {
                    Ok(r) => r,
                    Err(e) if !cfg.strict => error_report(cfg, cell, trial, &e),
                    Err(e) => return Err(e),
                };
                tx.send((seq, report))
                    .map_err(|_| Error::Config("writer thread stopped".into()))
            })
    });
    let reports = writer.join().expect("writer thread panicked")?;
    result?;

    let summaries = summarize(cfg, &cells, &reports);
    let mut w = csv::Writer::from_path(&csv_path).map_err(|e| Error::Config(e.to_string()))?;
    for s in &summaries {
        w.serialize(s).map_err(|e| Error::Config(e.to_string()))?;
    }
    w.flush()?;
    Ok(CampaignSummary {
        jsonl,
        csv: csv_path,
        threads,
        all_floors_met: summaries.iter().all(|s| s.floor_met),
        cells: summaries,
    })
}

/// Per-cell aggregates of a set of reports.
pub fn summarize(cfg: &CampaignConfig, cells: &[Cell], reports: &[TrialReport]) -> Vec<CellSummary> {
    cells
        .iter()
        .map(|cell| {
            let mine: Vec<&TrialReport> = reports.iter().filter(|r| r.cell == cell.index).collect();
            let count = mine.len().max(1) as f64;
            let successes = mine.iter().filter(|r| r.success).count() as u32;
            let fraction = successes as f64 / count;
            CellSummary {
                cell: cell.index,
                kind: cfg.kind.name().to_string(),
                n: cell.n,
                k: cell.k,
                s: cell.s,
                t: cell.t,
                epsilon: cell.epsilon,
                p: cell.p,
                auto_p: cell.auto_p,
                trials: mine.len() as u32,
                successes,
                errors: mine.iter().filter(|r| r.is_error()).count() as u32,
                success_fraction: fraction,
                mean_host_edges: mine.iter().map(|r| r.host_edge_count as f64).sum::<f64>() / count,
                mean_size: mine.iter().map(|r| r.size()).sum::<f64>() / count,
                mean_wall_ms: mine.iter().map(|r| r.wall_time_ms as f64).sum::<f64>() / count,
                floor_met: cfg.success_floor.is_none_or(|f| fraction >= f),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(kind: &str, extra: &str) -> String {
        format!(
            r#"{{"kind": "{kind}", "grid": {{"n": [8], "k": [2], "s": [1], "p": [0.5]}},
                "trials": 3, "master_seed": 11, "output": "unused"{extra}}}"#
        )
    }

    #[test]
    fn parses_defaults_and_auto() {
        let cfg = CampaignConfig::from_json(&config("thm1", "")).unwrap();
        assert_eq!(cfg.grid.t, vec![1]);
        assert_eq!(cfg.audit_budget, 100);
        let auto = r#"{"kind": "k2", "grid": {"n": [200], "k": [2], "s": [2], "epsilon": [0.3], "p": ["auto"]},
                        "trials": 1, "master_seed": 1, "output": "x"}"#;
        let cfg = CampaignConfig::from_json(auto).unwrap();
        let cells = cfg.cells().unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].p, 1.0);
        assert!(cells[0].auto_p);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(matches!(
            CampaignConfig::from_json(&config("thm1", r#", "trials": 0"#).replace(r#""trials": 3, "#, "")),
            Err(Error::Config(_))
        ));
        let bad_p = config("thm1", "").replace("[0.5]", "[1.5]");
        assert!(matches!(CampaignConfig::from_json(&bad_p), Err(Error::Config(_))));
        let empty = config("thm1", "").replace(r#""n": [8]"#, r#""n": []"#);
        assert!(matches!(CampaignConfig::from_json(&empty), Err(Error::Config(_))));
        assert!(matches!(CampaignConfig::from_json("{"), Err(Error::Config(_))));
        let window = r#"{"kind": "prop23", "grid": {"n": [100], "k": [3], "s": [2]},
                         "trials": 1, "master_seed": 1, "output": "x"}"#;
        let cfg = CampaignConfig::from_json(window).unwrap();
        assert!(matches!(cfg.cells(), Err(Error::Config(_))));
    }

    #[test]
    fn thread_count_respects_jobs() {
        assert_eq!(worker_count(Some(8), 3), 3);
        assert_eq!(worker_count(Some(2), 100).min(2), worker_count(Some(2), 100));
        assert_eq!(worker_count(Some(0), 5), 1);
    }

    #[test]
    fn trials_are_reproducible() {
        let cfg = CampaignConfig::from_json(&config("thm1", "")).unwrap();
        let cell = cfg.cells().unwrap()[0];
        let mut a = run_trial(&cfg, &cell, 1).unwrap();
        let mut b = run_trial(&cfg, &cell, 1).unwrap();
        a.wall_time_ms = 0;
        b.wall_time_ms = 0;
        assert_eq!(a, b);
        assert_eq!(a.spec.trial_index, 1);
    }
}
