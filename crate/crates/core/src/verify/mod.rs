//! Verification suites: named, seeded parameter sweeps that re-derive the
//! desk-scale identities and inequalities the library is built around, and
//! report one record per case.
//!
//! A run is fully determined by `(suite id, grid, seed)`. Records are sorted
//! by case key, so identical invocations give byte-identical reports.

mod suites;

use crate::adversary::AdversaryError;
use crate::boolfn::BoolFnError;
use crate::classical::ClassicalError;
use crate::linalg::LinalgError;
use crate::quantum::QuantumError;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Registered suite ids with a one-line description.
pub const SUITES: &[(&str, &str)] = &[
    ("spectral-witness", "adjacency witness ratio at p = 1 equals spectral sensitivity"),
    ("block-diag", "Γ_S of nearest-neighbor witnesses splits into restriction blocks"),
    ("barrier", "combinatorial bound never beats √(⌈C0/p⌉⌈C1/p⌉)"),
    ("pointer-bounds", "exact block-query rounds of pointer chasing are min(k, N/p)"),
    ("cor-sandwich", "min(D(f), D(g)) ≤ D(COR(f, g)) ≤ 2·min(D(f), D(g))"),
    ("forrelation", "one-query acceptance is (1 + Φ)/2"),
    ("grover", "parallel Grover success matches the closed form"),
    ("cheatsheet-upper", "3-round cheat-sheet algorithms on the toy input suite"),
    ("two-adaptive", "2-round algorithms succeed while low-parallelism strategies stay near 1/2"),
    ("bs-witness", "constructed cheat-sheet inputs have many disjoint sensitive blocks"),
    ("ksum-lift", "every lifted block has k-SUM equal to its source bit"),
    ("star-lemma", "few queries rarely hit many stars"),
    ("symmetric", "symmetric witness ratio is at least half the formula"),
];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerifyError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("suite `{suite}` has no parameter `{key}`")]
    UnknownParam { suite: String, key: String },
    #[error("bad value `{value}` for `{key}`: {reason}")]
    BadParam { key: String, value: String, reason: String },
    #[error(transparent)]
    BoolFn(#[from] BoolFnError),
    #[error(transparent)]
    Classical(#[from] ClassicalError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Adversary(#[from] AdversaryError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, VerifyError>;

/// Suite parameters as given on the command line (`--N 16` → `N = 16`).
/// Lists are comma separated.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid(pub BTreeMap<String, String>);

impl Grid {
    pub fn new() -> Self {
        Grid::default()
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.0.insert(key.to_string(), value.to_string());
        self
    }

    /// Parses `--key value` pairs.
    pub fn from_args<S: AsRef<str>>(args: &[S]) -> Result<Self> {
        let mut grid = Grid::new();
        let mut it = args.iter().map(AsRef::as_ref);
        while let Some(flag) = it.next() {
            let key = flag.strip_prefix("--").ok_or_else(|| VerifyError::BadParam {
                key: flag.to_string(),
                value: String::new(),
                reason: "expected `--key value`".into(),
            })?;
            let (key, value) = match key.split_once('=') {
                Some((k, v)) => (k.to_string(), v.to_string()),
                None => {
                    let v = it.next().ok_or_else(|| VerifyError::BadParam {
                        key: key.to_string(),
                        value: String::new(),
                        reason: "missing value".into(),
                    })?;
                    (key.to_string(), v.to_string())
                }
            };
            grid.0.insert(key, value);
        }
        Ok(grid)
    }

    fn bad(key: &str, value: &str, reason: impl Into<String>) -> VerifyError {
        VerifyError::BadParam { key: key.into(), value: value.into(), reason: reason.into() }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.0.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| Self::bad(key, v, "not a non-negative integer")),
        }
    }

    pub fn list_or(&self, key: &str, default: &[usize]) -> Result<Vec<usize>> {
        match self.0.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v.split(',').map(|s| s.trim().parse().map_err(|_| Self::bad(key, v, "not a comma-separated list"))).collect(),
        }
    }

    pub fn str_list_or(&self, key: &str, default: &[&str]) -> Vec<String> {
        match self.0.get(key) {
            None => default.iter().map(|s| s.to_string()).collect(),
            Some(v) => v.split(',').map(|s| s.trim().to_string()).collect(),
        }
    }

    fn check_keys(&self, suite: &str, allowed: &[&str]) -> Result<()> {
        match self.0.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(VerifyError::UnknownParam { suite: suite.into(), key: k.clone() }),
            None => Ok(()),
        }
    }
}

/// One checked case: `pass` iff `lower − tol ≤ measured ≤ upper + tol`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub suite: String,
    pub case: BTreeMap<String, Value>,
    /// The reference value the case is checked against.
    pub bound: f64,
    pub measured: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

impl CaseRecord {
    fn key(&self) -> String {
        serde_json::to_string(&self.case).expect("case maps serialize")
    }
}

/// How a measured value is compared with its reference.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Check {
    Eq(f64),
    AtMost(f64),
    AtLeast(f64),
    Within { lower: f64, upper: f64 },
}

/// Case parameters; keys sort, values keep their JSON type.
pub(crate) type Params = BTreeMap<String, Value>;

pub(crate) fn params<const K: usize>(pairs: [(&str, Value); K]) -> Params {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Accumulates records for one suite.
pub(crate) struct Recorder {
    suite: String,
    records: Vec<CaseRecord>,
}

impl Recorder {
    pub(crate) fn new(suite: &str) -> Self {
        Recorder { suite: suite.into(), records: Vec::new() }
    }

    pub(crate) fn check(&mut self, case: Params, measured: f64, check: Check, tolerance: f64) {
        let (bound, lower, upper) = match check {
            Check::Eq(b) => (b, Some(b), Some(b)),
            Check::AtMost(b) => (b, None, Some(b)),
            Check::AtLeast(b) => (b, Some(b), None),
            Check::Within { lower, upper } => (upper, Some(lower), Some(upper)),
        };
        let pass = measured.is_finite()
            && lower.is_none_or(|l| measured >= l - tolerance)
            && upper.is_none_or(|u| measured <= u + tolerance);
        self.records.push(CaseRecord { suite: self.suite.clone(), case, bound, measured, lower, upper, tolerance, pass });
    }

    pub(crate) fn finish(self, seed: u64, grid: &Grid) -> SuiteReport {
        let mut cases = self.records;
        cases.sort_by_cached_key(CaseRecord::key);
        SuiteReport { suite: self.suite, seed, grid: grid.clone(), cases }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub grid: Grid,
    pub cases: Vec<CaseRecord>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> usize {
        self.cases.iter().filter(|c| !c.pass).count()
    }

    /// One JSON object per case.
    pub fn json_lines(&self) -> String {
        self.cases.iter().map(|c| serde_json::to_string(c).expect("records serialize") + "\n").collect()
    }

    /// Tidy long format: one row per case and quantity.
    pub fn csv_for_plot(&self) -> String {
        let mut out = String::from("suite,case,quantity,value\n");
        for c in &self.cases {
            let key = c.key().replace('"', "\"\"");
            for (q, v) in [("measured", Some(c.measured)), ("lower", c.lower), ("upper", c.upper)] {
                if let Some(v) = v {
                    writeln!(out, "{},\"{key}\",{q},{v}", c.suite).expect("string write");
                }
            }
        }
        out
    }
}

/// Fixed-width per-suite table: cases, failures, status.
pub fn summary_table(reports: &[SuiteReport]) -> String {
    let mut out = format!("{:<18} {:>7} {:>8}  status\n", "suite", "cases", "failed");
    for r in reports {
        let status = if r.passed() { "pass" } else { "FAIL" };
        writeln!(out, "{:<18} {:>7} {:>8}  {status}", r.suite, r.cases.len(), r.failures()).expect("string write");
    }
    out
}

/// Parses JSON-lines records (as written by [`SuiteReport::json_lines`]),
/// possibly from several suites, into one report per suite in id order.
pub fn merge_records(text: &str) -> std::result::Result<Vec<SuiteReport>, serde_json::Error> {
    let mut by_suite: BTreeMap<String, Vec<CaseRecord>> = BTreeMap::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let r: CaseRecord = serde_json::from_str(line)?;
        by_suite.entry(r.suite.clone()).or_default().push(r);
    }
    Ok(by_suite
        .into_iter()
        .map(|(suite, mut cases)| {
            cases.sort_by_cached_key(CaseRecord::key);
            cases.dedup_by(|a, b| a.key() == b.key() && a == b);
            SuiteReport { suite, seed: 0, grid: Grid::new(), cases }
        })
        .collect())
}

/// Runs a registered suite.
pub fn run_suite(id: &str, grid: &Grid, seed: u64) -> Result<SuiteReport> {
    suites::run(id, grid, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parses_flag_pairs() {
        let g = Grid::from_args(&["--N", "16", "--p=4"]).unwrap();
        assert_eq!(g.usize_or("N", 0).unwrap(), 16);
        assert_eq!(g.list_or("p", &[1]).unwrap(), vec![4]);
        assert_eq!(g.list_or("r", &[0, 1]).unwrap(), vec![0, 1]);
        assert!(Grid::from_args(&["N", "16"]).is_err());
        assert!(Grid::from_args(&["--N"]).is_err());
        assert!(g.clone().with("x", "a").usize_or("x", 0).is_err());
    }

    #[test]
    fn records_check_intervals() {
        let mut r = Recorder::new("t");
        r.check(params([("a", 1.into())]), 1.0 + 1e-12, Check::Eq(1.0), 1e-9);
        r.check(params([("a", 2.into())]), 3.0, Check::AtMost(2.0), 0.0);
        r.check(params([("a", 3.into())]), 3.0, Check::Within { lower: 1.0, upper: 3.0 }, 0.0);
        r.check(params([("a", 0.into())]), -1.0, Check::AtLeast(0.0), 0.0);
        let rep = r.finish(0, &Grid::new());
        assert_eq!(rep.cases.iter().map(|c| c.pass).collect::<Vec<_>>(), vec![false, true, false, true]);
        assert_eq!(rep.failures(), 2);
        let merged = merge_records(&(rep.json_lines() + &rep.json_lines())).unwrap();
        assert_eq!(merged.len(), 1);
        assert_eq!(merged[0].cases, rep.cases);
        assert!(rep.csv_for_plot().starts_with("suite,case,quantity,value\nt,\"{\"\"a\"\":0}\",measured,-1\n"));
        assert!(summary_table(&[rep]).contains("FAIL"));
        let mut r = Recorder::new("t");
        r.check(Params::new(), f64::NAN, Check::AtLeast(0.0), 0.0);
        assert!(!r.finish(0, &Grid::new()).passed());
    }

    #[test]
    fn unknown_suite_and_param_are_rejected() {
        assert_eq!(run_suite("nope", &Grid::new(), 0).unwrap_err(), VerifyError::UnknownSuite("nope".into()));
        assert!(matches!(run_suite("grover", &Grid::new().with("q", 1), 0), Err(VerifyError::UnknownParam { .. })));
    }
}
