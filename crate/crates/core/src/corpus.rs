//! The shipped example constructions and a harness that verifies them.
//!
//! Documents live in `corpus/<name>.json` and are embedded at build time.
//! Expectations are kept here, apart from the documents, and pin only
//! values stated for each construction; everything else in a document is a
//! reconstruction choice explained in its `notes`.

use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::config::{parse, Document, ParseError, Violation};
use crate::exec::Exec;
use crate::ratlin::{fmt_rational, int};
use crate::smoothing::{report, Pi1Verdict, SingularSurfaceReport};
use crate::wahl::Chain;

pub const NAMES: [&str; 6] = [
    "enriques-k1",
    "enriques-k2",
    "enriques-k3-kondo2",
    "enriques-k3-kondo7",
    "enriques-k4",
    "enriques-k5-symplectic",
];

fn source(name: &str) -> Option<&'static str> {
    Some(match name {
        "enriques-k1" => include_str!("../corpus/enriques-k1.json"),
        "enriques-k2" => include_str!("../corpus/enriques-k2.json"),
        "enriques-k3-kondo2" => include_str!("../corpus/enriques-k3-kondo2.json"),
        "enriques-k3-kondo7" => include_str!("../corpus/enriques-k3-kondo7.json"),
        "enriques-k4" => include_str!("../corpus/enriques-k4.json"),
        "enriques-k5-symplectic" => include_str!("../corpus/enriques-k5-symplectic.json"),
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("unknown example `{0}` (known: {known})", known = NAMES.join(", "))]
    UnknownExample(String),
    #[error("shipped example {name} does not parse: {source}")]
    Broken { name: String, source: ParseError },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// Values a construction must reproduce.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Expected {
    #[serde(rename = "K2")]
    pub k2: i64,
    pub blowup_count: u32,
    /// Sorted; a chain and its reversal are the same singularity, so each
    /// is stored in its smaller orientation.
    pub chain_multiset: Vec<Chain>,
    /// Sorted multiset of indices, when stated.
    pub indices: Option<Vec<u64>>,
    pub gcd: Option<u64>,
    pub pi1: Option<Pi1Verdict>,
}

fn canonical_chains(chains: impl IntoIterator<Item = Chain>) -> Vec<Chain> {
    let mut out: Vec<Chain> = chains
        .into_iter()
        .map(|c| {
            let r = c.reversed();
            if r.entries() < c.entries() {
                r
            } else {
                c
            }
        })
        .collect();
    out.sort();
    out
}

fn chains(lists: &[&[u64]]) -> Vec<Chain> {
    canonical_chains(
        lists
            .iter()
            .map(|l| Chain::new(l.to_vec()).expect("literal chains are valid")),
    )
}

pub fn expected(name: &str) -> Option<Expected> {
    let e = |k2, blowup_count, ch: &[&[u64]]| Expected {
        k2,
        blowup_count,
        chain_multiset: chains(ch),
        indices: None,
        gcd: None,
        pi1: None,
    };
    let with_indices = |mut x: Expected, mut idx: Vec<u64>, gcd, pi1| {
        idx.sort();
        x.indices = Some(idx);
        x.gcd = Some(gcd);
        x.pi1 = Some(pi1);
        x
    };
    Some(match name {
        "enriques-k1" => with_indices(
            e(1, 5, &[&[4, 2, 3, 2], &[4, 2, 3, 2], &[4], &[4]]),
            vec![3, 3, 2, 2],
            1,
            Pi1Verdict::CriterionSatisfied,
        ),
        "enriques-k2" => with_indices(
            e(2, 7, &[&[6, 2, 2], &[7, 3, 2, 2, 2, 2], &[3, 3]]),
            vec![4, 6, 2],
            2,
            Pi1Verdict::Inconclusive,
        ),
        "enriques-k3-kondo2" => with_indices(
            e(
                3,
                12,
                &[&[5, 2], &[9, 2, 2, 2, 2, 2], &[2, 9, 2, 2, 2, 2, 3]],
            ),
            vec![3, 7, 13],
            1,
            Pi1Verdict::CriterionSatisfied,
        ),
        "enriques-k3-kondo7" => e(3, 10, &[&[5, 2], &[9, 2, 2, 2, 2, 2], &[8, 2, 2, 2, 2]]),
        "enriques-k4" => e(
            4,
            15,
            &[
                &[2, 2, 9, 2, 2, 2, 2, 4],
                &[2, 2, 7, 6, 2, 3, 2, 2, 2, 2, 4],
            ],
        ),
        "enriques-k5-symplectic" => e(
            5,
            12,
            &[&[6, 2, 2], &[5, 8, 6, 2, 3, 2, 2, 2, 2, 2, 3, 2, 2, 2]],
        ),
        _ => return None,
    })
}

#[derive(Debug, Clone)]
pub struct NamedExample {
    pub name: String,
    pub source: &'static str,
    pub document: Document,
    pub expected: Expected,
}

pub fn builtin(name: &str) -> Result<NamedExample, CorpusError> {
    let (src, exp) = match (source(name), expected(name)) {
        (Some(s), Some(e)) => (s, e),
        _ => return Err(CorpusError::UnknownExample(name.to_string())),
    };
    let document = parse(src).map_err(|source| CorpusError::Broken {
        name: name.to_string(),
        source,
    })?;
    Ok(NamedExample {
        name: name.to_string(),
        source: src,
        document,
        expected: exp,
    })
}

/// Result of running one document through the pipeline.
#[derive(Debug, Clone, Serialize)]
pub struct ExampleOutcome {
    pub name: String,
    /// Absent when the document could not be processed.
    pub report: Option<SingularSurfaceReport>,
    /// Input problem that stopped the pipeline.
    pub error: Option<String>,
    pub violations: Vec<Violation>,
    /// Expected values that did not match.
    pub mismatches: Vec<String>,
    /// Certificates that did not hold.
    pub failures: Vec<String>,
    pub passed: bool,
}

impl ExampleOutcome {
    fn failed(name: &str, error: Option<String>, violations: Vec<Violation>) -> Self {
        ExampleOutcome {
            name: name.to_string(),
            report: None,
            error,
            violations,
            mismatches: Vec::new(),
            failures: Vec::new(),
            passed: false,
        }
    }

    /// One summary line for tables.
    pub fn row(&self) -> String {
        let status = if self.passed { "pass" } else { "FAIL" };
        let Some(r) = &self.report else {
            let why = match (&self.error, self.violations.first()) {
                (Some(e), _) => e.clone(),
                (None, Some(v)) => v.to_string(),
                (None, None) => "no report".into(),
            };
            return format!("{} {status} {why}", self.name);
        };
        let idx: Vec<String> = r.pi1.indices.iter().map(BigInt::to_string).collect();
        let mut line = format!(
            "{} {status} K2_X={} indices={} gcd={} pi1={} ampleness={} hypotheses={}",
            self.name,
            fmt_rational(&r.k2_x),
            idx.join(","),
            r.pi1.gcd,
            r.pi1.verdict.as_str(),
            if r.ampleness.verdict {
                "positive"
            } else {
                "not-positive"
            },
            match &r.hypotheses {
                None => "n/a",
                Some(h) if h.holds() => "hold",
                Some(_) => "fail",
            }
        );
        for m in &self.mismatches {
            line.push_str(&format!(" mismatch=[{m}]"));
        }
        for v in &self.violations {
            line.push_str(&format!(" violation=[{v}]"));
        }
        for f in &self.failures {
            line.push_str(&format!(" failure=[{f}]"));
        }
        line
    }
}

fn compare(r: &SingularSurfaceReport, e: &Expected) -> Vec<String> {
    let mut out = Vec::new();
    if r.k2_x != int(e.k2) {
        out.push(format!("K2_X={} expected {}", fmt_rational(&r.k2_x), e.k2));
    }
    if r.blowup_count != e.blowup_count {
        out.push(format!(
            "blowups={} expected {}",
            r.blowup_count, e.blowup_count
        ));
    }
    let got = canonical_chains(
        r.chains
            .iter()
            .map(|c| Chain::new(c.entries.clone()).expect("contracted chains are valid")),
    );
    if got != e.chain_multiset {
        let show = |v: &[Chain]| {
            v.iter()
                .map(|c| format!("[{c}]"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        out.push(format!(
            "chains {} expected {}",
            show(&got),
            show(&e.chain_multiset)
        ));
    }
    if let Some(want) = &e.indices {
        let mut got: Vec<BigInt> = r.pi1.indices.clone();
        got.sort();
        let want: Vec<BigInt> = want.iter().map(|&x| BigInt::from(x)).collect();
        if got != want {
            out.push(format!("indices {got:?} expected {want:?}"));
        }
    }
    if let Some(g) = e.gcd {
        if r.pi1.gcd != BigInt::from(g) {
            out.push(format!("gcd={} expected {g}", r.pi1.gcd));
        }
    }
    if let Some(v) = e.pi1 {
        if r.pi1.verdict != v {
            out.push(format!(
                "pi1={} expected {}",
                r.pi1.verdict.as_str(),
                v.as_str()
            ));
        }
    }
    out
}

/// Run one document and compare against `expected`, if given. Passes iff
/// there is no validation violation, every expectation matches and every
/// certificate holds.
pub fn verify_document(name: &str, text: &str, expected: Option<&Expected>) -> ExampleOutcome {
    let doc = match parse(text) {
        Ok(d) => d,
        Err(ParseError::Validation(v)) => return ExampleOutcome::failed(name, None, v),
        Err(e) => return ExampleOutcome::failed(name, Some(e.to_string()), Vec::new()),
    };
    let r = match report(&doc) {
        Ok(r) => r,
        Err(e) => return ExampleOutcome::failed(name, Some(e.to_string()), Vec::new()),
    };
    let mismatches = expected.map(|e| compare(&r, e)).unwrap_or_default();
    let violations = r.violations.clone();
    let failures = r.certificate_failures();
    ExampleOutcome {
        name: name.to_string(),
        passed: mismatches.is_empty() && violations.is_empty() && failures.is_empty(),
        failures,
        report: Some(r),
        error: None,
        violations,
        mismatches,
    }
}

pub fn verify_example(name: &str) -> Result<ExampleOutcome, CorpusError> {
    let ex = builtin(name)?;
    Ok(verify_document(name, ex.source, Some(&ex.expected)))
}

/// Every shipped example, in [`NAMES`] order.
pub fn verify_all(exec: Exec) -> Vec<ExampleOutcome> {
    exec.map(NAMES.to_vec(), |name| {
        verify_example(name).expect("shipped names are known")
    })
}

/// Every `*.json` file in `dir`, sorted by file name. Files named after a
/// shipped example are held to its expectations.
pub fn verify_dir(dir: &Path, exec: Exec) -> Result<Vec<ExampleOutcome>, CorpusError> {
    let io = |e: std::io::Error| CorpusError::Io {
        path: dir.display().to_string(),
        message: e.to_string(),
    };
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.extension().is_some_and(|e| e == "json") {
            files.push(path);
        }
    }
    files.sort();
    let mut inputs = Vec::new();
    for path in files {
        let text = fs::read_to_string(&path).map_err(|e| CorpusError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        inputs.push((name, text));
    }
    Ok(exec.map(inputs, |(name, text)| {
        let exp = expected(&name);
        verify_document(&name, &text, exp.as_ref())
    }))
}

/// True when every outcome passed (vacuously for an empty table).
pub fn all_passed(outcomes: &[ExampleOutcome]) -> bool {
    outcomes.iter().all(|o| o.passed)
}
