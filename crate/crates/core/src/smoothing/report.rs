//! The full pipeline for one document and its report.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::Serialize;
use thiserror::Error;

use super::{
    ampleness_with, check_hypotheses, contracted_chains, invariants_from, moduli_dimension,
    pi1_with, topology_report, AmplenessCertificate, HypothesisReport, Pi1Report, Pi1Verdict,
    SmoothingError, TopologyReport,
};
use crate::blowup::{stages, StepError};
use crate::config::{validate, Document, SurfaceKind, Violation};
use crate::fibration::{
    euler_sum_check, i9_forces_i1_lint, i9_lint_applies, two_section_incidence_check, EulerCheck,
};
use crate::ratlin::{fmt_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error(transparent)]
    Blowup(#[from] StepError),
    #[error("document has no contraction plan")]
    NoPlan,
    #[error("hypotheses refer to stage {stage} but there are only {steps} blow-ups")]
    BadStage { stage: usize, steps: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub curves: Vec<String>,
    pub entries: Vec<u64>,
    #[serde(serialize_with = "crate::ser::bigint")]
    pub d: BigInt,
    #[serde(serialize_with = "crate::ser::bigint")]
    pub n: BigInt,
    #[serde(serialize_with = "crate::ser::bigint")]
    pub a: BigInt,
    #[serde(serialize_with = "crate::ser::bigint")]
    pub m: BigInt,
    #[serde(serialize_with = "crate::ser::bigint")]
    pub q: BigInt,
    #[serde(serialize_with = "crate::ser::rational")]
    pub contribution: Rational,
    #[serde(serialize_with = "crate::ser::rationals")]
    pub discrepancies: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FibrationReport {
    pub euler: EulerCheck,
    pub two_section_violations: Vec<Violation>,
    pub advisories: Vec<String>,
}

/// Everything known about `X` and `X_t` for one document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SingularSurfaceReport {
    pub surface: SurfaceKind,
    pub blowup_count: u32,
    /// `K^2` of the blown-up surface before contracting.
    pub ambient_k2: i64,
    pub chains: Vec<ChainReport>,
    #[serde(rename = "K2_X", serialize_with = "crate::ser::rational")]
    pub k2_x: Rational,
    pub chi: i64,
    pub p_g: i64,
    pub q: i64,
    pub pi1: Pi1Report,
    pub ampleness: AmplenessCertificate,
    /// Only when `K2_X` is an integer.
    pub moduli_dim: Option<i64>,
    pub general_type: bool,
    pub topology: Option<TopologyReport>,
    pub hypotheses: Option<HypothesisReport>,
    pub fibration: Option<FibrationReport>,
    pub assumptions: Vec<String>,
    /// Validation problems anywhere in the pipeline.
    pub violations: Vec<Violation>,
}

impl SingularSurfaceReport {
    pub fn k2_x_integer(&self) -> Option<i64> {
        self.k2_x
            .is_integer()
            .then(|| i64::try_from(self.k2_x.numer()).ok())
            .flatten()
    }

    /// Certificates that can fail without the input being malformed.
    pub fn certificate_failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for e in self.ampleness.failures() {
            out.push(format!(
                "ampleness: (f*K).{} = {}",
                e.curve,
                fmt_rational(&e.value)
            ));
        }
        if let Some(h) = &self.hypotheses {
            if !h.independent {
                out.push(format!(
                    "independence: rank {} of {}",
                    h.independence_rank, h.independence_candidates
                ));
            }
            for v in h.snc_violations.iter().chain(&h.violations) {
                out.push(format!("hypotheses: {v}"));
            }
        }
        if let Some(f) = &self.fibration {
            for v in &f.two_section_violations {
                out.push(format!("fibration: {v}"));
            }
        }
        out
    }

    /// No violations and every certificate holds.
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.certificate_failures().is_empty()
    }

    /// Line-oriented `key=value` rendering. The headline invariants come last.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(s, "{k}={v}");
        };
        line("surface", self.surface.to_string());
        line("blowups", self.blowup_count.to_string());
        line("K2_blown_up", self.ambient_k2.to_string());
        for (i, c) in self.chains.iter().enumerate() {
            let entries: Vec<String> = c.entries.iter().map(u64::to_string).collect();
            line(
                &format!("chain.{}", i + 1),
                format!(
                    "[{}] curves={} d={} n={} a={} m={} q={} index={} contribution={}",
                    entries.join(","),
                    c.curves.join(","),
                    c.d,
                    c.n,
                    c.a,
                    c.m,
                    c.q,
                    c.n,
                    fmt_rational(&c.contribution)
                ),
            );
        }
        line(
            "ampleness",
            format!(
                "{} ({})",
                if self.ampleness.verdict {
                    "positive"
                } else {
                    "not-positive"
                },
                self.ampleness.scope
            ),
        );
        for e in &self.ampleness.entries {
            line(
                &format!("ample.{}", e.curve),
                format!(
                    "{} K.C={} D.C={}",
                    fmt_rational(&e.value),
                    e.k_deg,
                    fmt_rational(&e.dp_term)
                ),
            );
        }
        if let Some(f) = &self.fibration {
            line(
                "fibration.euler",
                format!(
                    "{}/{} deficit={}",
                    f.euler.declared, f.euler.expected, f.euler.deficit
                ),
            );
            line(
                "fibration.two_sections",
                if f.two_section_violations.is_empty() {
                    "ok".into()
                } else {
                    "failed".into()
                },
            );
            for a in &f.advisories {
                line("fibration.advisory", a.clone());
            }
        }
        if let Some(h) = &self.hypotheses {
            line(
                "hypotheses",
                format!(
                    "stage={} rank={}/{} snc={} {}",
                    h.stage,
                    h.independence_rank,
                    h.independence_candidates,
                    if h.snc_violations.is_empty() {
                        "ok"
                    } else {
                        "failed"
                    },
                    if h.holds() { "holds" } else { "fails" }
                ),
            );
            if !h.declared_disjoint_from_multiple_fibers.is_empty() {
                line(
                    "hypotheses.assumed_disjoint_from_multiple_fibers",
                    h.declared_disjoint_from_multiple_fibers.join(","),
                );
            }
        }
        if let Some(t) = &self.topology {
            let b = &t.x_t;
            line(
                "topology.X_t",
                format!(
                    "c2={} b2+={} b2-={} sigma={}",
                    b.c2, b.b2plus, b.b2minus, b.sigma
                ),
            );
            if let Some(c) = &t.cover {
                let b = &c.betti;
                line(
                    "topology.cover",
                    format!(
                        "chi={} c1^2={} c2={} b2+={} b2-={} sigma={} sigma_divisible_by_16={} target={}",
                        c.chi,
                        c.c1_sq,
                        b.c2,
                        b.b2plus,
                        b.b2minus,
                        b.sigma,
                        if c.sigma_divisible_by_16 { "yes" } else { "no" },
                        c.target
                    ),
                );
            }
        }
        for a in &self.assumptions {
            line("assumption", a.clone());
        }
        for v in &self.violations {
            line("violation", v.to_string());
        }
        for f in self.certificate_failures() {
            line("failure", f);
        }
        line(
            "status",
            if self.passed() {
                "pass".into()
            } else {
                "fail".into()
            },
        );
        if let Some(m) = self.moduli_dim {
            line("moduli_dim", m.to_string());
        }
        line(
            "general_type",
            if self.general_type {
                "yes".into()
            } else {
                "no".into()
            },
        );
        line("K2_X", fmt_rational(&self.k2_x));
        line("chi", self.chi.to_string());
        line("p_g", self.p_g.to_string());
        line("q", self.q.to_string());
        let idx: Vec<String> = self.pi1.indices.iter().map(BigInt::to_string).collect();
        line("indices", idx.join(","));
        line("gcd", self.pi1.gcd.to_string());
        if let Some(n) = &self.pi1.note {
            line("pi1_note", n.clone());
        }
        line("pi1", self.pi1.verdict.as_str().into());
        s
    }
}

/// Replay the blow-ups, contract the plan and compute every invariant.
pub fn report(doc: &Document) -> Result<SingularSurfaceReport, ReportError> {
    let plan = doc.plan.as_ref().ok_or(ReportError::NoPlan)?;
    let all = stages(&doc.config, &doc.blowups)?;
    let last = all.last().expect("stage 0 always exists");

    let mut violations = validate(&doc.config);
    violations.extend(validate(last));

    let fibration = doc.config.fibration.as_ref().map(|f| {
        let euler = euler_sum_check(f, doc.config.surface.chi);
        let mut advisories = Vec::new();
        if euler.unlisted_fibers {
            advisories.push(format!("unlisted fibers: Euler deficit {}", euler.deficit));
        }
        if euler.deficit < 0 {
            violations.push(Violation::new(
                "euler-sum",
                format!(
                    "declared fibers have Euler sum {} > {}",
                    euler.declared, euler.expected
                ),
            ));
        }
        if i9_lint_applies(doc.config.surface.kind) {
            advisories.extend(i9_forces_i1_lint(f));
        }
        FibrationReport {
            euler,
            two_section_violations: two_section_incidence_check(&doc.config),
            advisories,
        }
    });

    let hypotheses = match &plan.hypotheses {
        None => None,
        Some(h) => {
            let stage = all.get(h.stage).ok_or(ReportError::BadStage {
                stage: h.stage,
                steps: doc.blowups.len(),
            })?;
            Some(check_hypotheses(stage, h))
        }
    };

    let chains = match contracted_chains(last, plan) {
        Ok(c) => c,
        Err(SmoothingError::PlanInvalid(v)) => {
            violations.extend(v);
            Vec::new()
        }
        Err(e) => unreachable!("contracted_chains only reports invalid plans: {e}"),
    };
    let inv = invariants_from(last, plan, &chains);
    let ampleness = ampleness_with(last, plan, &chains);
    let pi1 = if chains.len() == plan.chains.len() {
        pi1_with(last, plan, &chains)
    } else {
        Pi1Report {
            indices: Vec::new(),
            gcd: BigInt::from(0),
            verdict: Pi1Verdict::Inconclusive,
            note: Some("plan is invalid".into()),
        }
    };

    let k2_int = inv
        .k2_x
        .is_integer()
        .then(|| i64::try_from(inv.k2_x.numer()).ok())
        .flatten();
    let moduli_dim = k2_int.map(|k| moduli_dimension(inv.chi, k));
    // pi_1 = Z/2 is the construction's claim on an Enriques surface; the
    // cover data is bookkeeping under that claim.
    let claim_z2 = doc.config.surface.kind == SurfaceKind::Enriques;
    let topology = k2_int.and_then(|k| topology_report(k, inv.chi, claim_z2).ok());
    let general_type = inv.k2_x.is_positive() && ampleness.verdict;

    violations.sort();
    violations.dedup();
    Ok(SingularSurfaceReport {
        surface: doc.config.surface.kind,
        blowup_count: last.blowup_count,
        ambient_k2: last.ambient_k2(),
        chains: chains
            .into_iter()
            .map(|c| ChainReport {
                entries: c.chain.entries().to_vec(),
                curves: c.curves,
                d: c.class_t.d,
                n: c.class_t.n,
                a: c.class_t.a,
                m: c.class_t.m,
                q: c.class_t.q,
                contribution: c.contribution,
                discrepancies: c.discrepancies,
            })
            .collect(),
        k2_x: inv.k2_x,
        chi: inv.chi,
        p_g: inv.p_g,
        q: plan.q,
        pi1,
        ampleness,
        moduli_dim,
        general_type,
        topology,
        hypotheses,
        fibration,
        assumptions: plan.assumptions.clone(),
        violations,
    })
}
