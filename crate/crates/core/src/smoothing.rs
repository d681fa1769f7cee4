//! Contracting class T chains and the invariants of the resulting singular
//! surface `X` and of its Q-Gorenstein smoothing `X_t`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::config::{independence_certificate, snc_certificate, Configuration, Violation};
use crate::ratlin::{int, Rational};
use crate::wahl::{self, Chain, ClassTData};

mod report;

pub use report::{report, ReportError, SingularSurfaceReport};

/// Label carried by every ampleness certificate: only curves in the model
/// are checked.
pub const AMPLENESS_SCOPE: &str =
    "PARTIAL: checks only the curves of the finite model; curves outside it are not covered";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmoothingError {
    #[error("contraction plan is invalid: {}", join(.0))]
    PlanInvalid(Vec<Violation>),
    #[error("{0} is contracted by the plan")]
    CurveContracted(String),
    #[error("unknown curve `{0}`")]
    UnknownCurve(String),
    #[error("topology is only computed for chi = 1, got chi = {0}")]
    DomainError(i64),
}

fn join(vs: &[Violation]) -> String {
    vs.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// Hypotheses of the vanishing criterion to certify at one stage of the
/// blow-up sequence.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HypothesisSpec {
    /// Number of blow-ups applied before checking.
    pub stage: usize,
    /// Curves that must be numerically independent.
    pub independent: Vec<String>,
    /// Curves that must form a simple normal crossing divisor.
    pub snc: Vec<String>,
    /// Curves assumed to miss both multiple fibers; the fibration must
    /// declare the assumption.
    pub multiple_fiber_disjoint: Vec<String>,
    /// Pairs of curves that must not meet.
    pub disjoint_pairs: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ContractionPlan {
    /// Each chain is contracted to one point, listed end to end.
    pub chains: Vec<Vec<String>>,
    /// Irregularity of `X_t`; declared, not computed.
    pub q: i64,
    pub assumptions: Vec<String>,
    pub hypotheses: Option<HypothesisSpec>,
}

impl ContractionPlan {
    pub fn new(chains: &[&[&str]]) -> Self {
        ContractionPlan {
            chains: chains
                .iter()
                .map(|ch| ch.iter().map(|s| s.to_string()).collect())
                .collect(),
            ..Default::default()
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.chains.iter().flatten().any(|c| c == name)
    }
}

/// The chain of negated self-intersections along a list of curves.
pub fn chain_of(c: &Configuration, names: &[String]) -> Result<Chain, SmoothingError> {
    let entries = names
        .iter()
        .map(|n| {
            let curve = c
                .curve(n)
                .ok_or_else(|| SmoothingError::UnknownCurve(n.clone()))?;
            Ok(u64::try_from(-curve.self_int).unwrap_or(0))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Chain::new(entries).map_err(|_| {
        SmoothingError::PlanInvalid(vec![Violation::new(
            "chain-self",
            format!(
                "{} does not have all self-intersections <= -2",
                names.join(",")
            ),
        )])
    })
}

pub fn validate_plan(c: &Configuration, p: &ContractionPlan) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut owner: BTreeMap<&str, usize> = BTreeMap::new();
    for (k, chain) in p.chains.iter().enumerate() {
        if chain.is_empty() {
            out.push(Violation::new(
                "chain-empty",
                format!("chain #{k} is empty"),
            ));
            continue;
        }
        let mut known = true;
        for name in chain {
            if let Some(prev) = owner.insert(name, k) {
                out.push(Violation::new(
                    "chain-overlap",
                    format!("{name} appears in chains #{prev} and #{k}"),
                ));
            }
            match c.curve(name) {
                None => {
                    out.push(Violation::new(
                        "unknown-curve",
                        format!("unknown curve {name}"),
                    ));
                    known = false;
                }
                Some(curve) => {
                    if curve.genus != 0 {
                        out.push(Violation::new(
                            "chain-genus",
                            format!("{name} has genus {}", curve.genus),
                        ));
                    }
                    if curve.self_int > -2 {
                        out.push(Violation::new(
                            "chain-self",
                            format!("{name} has self-intersection {} > -2", curve.self_int),
                        ));
                    }
                }
            }
        }
        if !known {
            continue;
        }
        for (i, a) in chain.iter().enumerate() {
            for (j, b) in chain.iter().enumerate().skip(i + 1) {
                let v = c.pair(a, b).unwrap_or(0);
                let want = i64::from(j == i + 1);
                if a != b && v != want {
                    out.push(Violation::new(
                        "chain-shape",
                        format!("{a}.{b} = {v} in chain #{k}, expected {want}"),
                    ));
                }
            }
        }
        if let Ok(ch) = chain_of(c, chain) {
            if wahl::recognize_class_t(&ch).is_none() {
                out.push(Violation::new(
                    "not-class-t",
                    format!("chain #{k} [{ch}] is not of class T"),
                ));
            }
        }
    }
    for (k, x) in p.chains.iter().enumerate() {
        for (l, y) in p.chains.iter().enumerate().skip(k + 1) {
            for a in x {
                for b in y {
                    if a != b && c.pair(a, b).unwrap_or(0) != 0 {
                        out.push(Violation::new(
                            "chains-meet",
                            format!("{a} (chain #{k}) meets {b} (chain #{l})"),
                        ));
                    }
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// A validated chain with its singularity data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractedChain {
    pub curves: Vec<String>,
    pub chain: Chain,
    pub class_t: ClassTData,
    pub discrepancies: Vec<Rational>,
    pub contribution: Rational,
}

/// Validate the plan and compute the data of every chain.
pub fn contracted_chains(
    c: &Configuration,
    p: &ContractionPlan,
) -> Result<Vec<ContractedChain>, SmoothingError> {
    let violations = validate_plan(c, p);
    if !violations.is_empty() {
        return Err(SmoothingError::PlanInvalid(violations));
    }
    p.chains
        .iter()
        .map(|names| {
            let chain = chain_of(c, names)?;
            let class_t = wahl::recognize_class_t(&chain).expect("validated");
            Ok(ContractedChain {
                curves: names.clone(),
                discrepancies: wahl::discrepancies(&chain),
                contribution: wahl::k2_contribution(&chain),
                chain,
                class_t,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContractInvariants {
    #[serde(serialize_with = "crate::ser::rational")]
    pub k2_x: Rational,
    pub chi: i64,
    pub p_g: i64,
}

pub fn contract_invariants(
    c: &Configuration,
    p: &ContractionPlan,
) -> Result<ContractInvariants, SmoothingError> {
    let chains = contracted_chains(c, p)?;
    Ok(invariants_from(c, p, &chains))
}

fn invariants_from(
    c: &Configuration,
    p: &ContractionPlan,
    chains: &[ContractedChain],
) -> ContractInvariants {
    let k2_x = chains
        .iter()
        .fold(int(c.ambient_k2()), |acc, ch| acc + &ch.contribution);
    ContractInvariants {
        k2_x,
        chi: c.surface.chi,
        p_g: c.surface.chi - 1 + p.q,
    }
}

/// `(f^* K_X).C` split as `K.C` plus the contact with the contracted chains.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PullbackDegree {
    pub curve: String,
    pub k_deg: i64,
    /// `(sum D_p).C`
    #[serde(serialize_with = "crate::ser::rational")]
    pub dp_term: Rational,
    #[serde(serialize_with = "crate::ser::rational")]
    pub value: Rational,
}

fn pullback_with(
    c: &Configuration,
    chains: &[ContractedChain],
    curve: &str,
) -> Result<PullbackDegree, SmoothingError> {
    let cc = c
        .curve(curve)
        .ok_or_else(|| SmoothingError::UnknownCurve(curve.to_string()))?;
    let mut dp_term = Rational::zero();
    for ch in chains {
        if ch.curves.iter().any(|n| n == curve) {
            return Err(SmoothingError::CurveContracted(curve.to_string()));
        }
        dp_term += chain_term(c, ch, curve);
    }
    Ok(PullbackDegree {
        curve: curve.to_string(),
        k_deg: cc.k_deg,
        value: int(cc.k_deg) + &dp_term,
        dp_term,
    })
}

/// `-sum a_i (E_i . C)` for one chain.
fn chain_term(c: &Configuration, ch: &ContractedChain, curve: &str) -> Rational {
    ch.curves
        .iter()
        .zip(&ch.discrepancies)
        .fold(Rational::zero(), |acc, (e, a)| {
            acc - a * int(c.pair(e, curve).unwrap_or(0))
        })
}

pub fn pullback_degree(
    c: &Configuration,
    p: &ContractionPlan,
    curve: &str,
) -> Result<PullbackDegree, SmoothingError> {
    if p.contains(curve) {
        return Err(SmoothingError::CurveContracted(curve.to_string()));
    }
    let chains = contracted_chains(c, p)?;
    pullback_with(c, &chains, curve)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AmplenessCertificate {
    pub scope: &'static str,
    pub entries: Vec<PullbackDegree>,
    /// All entries strictly positive.
    pub verdict: bool,
}

impl AmplenessCertificate {
    pub fn failures(&self) -> impl Iterator<Item = &PullbackDegree> {
        self.entries.iter().filter(|e| !e.value.is_positive())
    }
}

fn ampleness_with(
    c: &Configuration,
    p: &ContractionPlan,
    chains: &[ContractedChain],
) -> AmplenessCertificate {
    let entries: Vec<PullbackDegree> = c
        .names()
        .filter(|n| !p.contains(n))
        .map(|n| pullback_with(c, chains, n).expect("curve is not contracted"))
        .collect();
    AmplenessCertificate {
        scope: AMPLENESS_SCOPE,
        verdict: entries.iter().all(|e| e.value.is_positive()),
        entries,
    }
}

pub fn ampleness_certificate(
    c: &Configuration,
    p: &ContractionPlan,
) -> Result<AmplenessCertificate, SmoothingError> {
    let chains = contracted_chains(c, p)?;
    Ok(ampleness_with(c, p, &chains))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pi1Verdict {
    CriterionSatisfied,
    Inconclusive,
}

impl Pi1Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Pi1Verdict::CriterionSatisfied => "criterion-satisfied",
            Pi1Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Pi1Report {
    #[serde(serialize_with = "crate::ser::bigints")]
    pub indices: Vec<BigInt>,
    #[serde(serialize_with = "crate::ser::bigint")]
    pub gcd: BigInt,
    pub verdict: Pi1Verdict,
    pub note: Option<String>,
}

/// Index criterion: on an Enriques surface, coprime indices among the
/// contracted points leave `pi_1(X_t)` equal to that of the surface.
/// Anything else is reported as inconclusive, with a note on curves meeting
/// exactly one end curve of one chain (the usual alternative argument, which
/// is not verified here).
pub fn pi1_criterion(c: &Configuration, p: &ContractionPlan) -> Result<Pi1Report, SmoothingError> {
    let chains = contracted_chains(c, p)?;
    Ok(pi1_with(c, p, &chains))
}

fn pi1_with(c: &Configuration, p: &ContractionPlan, chains: &[ContractedChain]) -> Pi1Report {
    let indices: Vec<BigInt> = chains.iter().map(|ch| ch.class_t.n.clone()).collect();
    let gcd = wahl::gcd_all(&indices);
    let enriques = c.surface.kind == crate::config::SurfaceKind::Enriques;
    if gcd.is_one() && enriques {
        return Pi1Report {
            indices,
            gcd,
            verdict: Pi1Verdict::CriterionSatisfied,
            note: None,
        };
    }
    let mut note = if enriques {
        format!("gcd of indices is {gcd}")
    } else {
        format!(
            "ambient is {}, index criterion needs an Enriques surface",
            c.surface.kind
        )
    };
    let one_end = one_end_curves(c, p);
    if !one_end.is_empty() {
        note.push_str(&format!(
            "; {} meet(s) only one end curve of a chain (not verified)",
            one_end.join(",")
        ));
    }
    Pi1Report {
        indices,
        gcd,
        verdict: Pi1Verdict::Inconclusive,
        note: Some(note),
    }
}

/// Curves outside the plan meeting the contracted locus exactly once, at an
/// end curve of a chain.
pub fn one_end_curves(c: &Configuration, p: &ContractionPlan) -> Vec<String> {
    c.names()
        .filter(|n| !p.contains(n))
        .filter(|n| {
            let mut total = 0;
            let mut at_end = false;
            for chain in &p.chains {
                for (i, e) in chain.iter().enumerate() {
                    let v = c.pair(n, e).unwrap_or(0);
                    total += v;
                    if v == 1 && (i == 0 || i + 1 == chain.len()) {
                        at_end = true;
                    }
                }
            }
            total == 1 && at_end
        })
        .map(str::to_string)
        .collect()
}

/// `h^1 - h^2` of the tangent sheaf, `10 chi - 2 K^2`.
pub fn moduli_dimension(chi: i64, k2: i64) -> i64 {
    10 * chi - 2 * k2
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Betti {
    pub c2: i64,
    pub b2plus: i64,
    pub b2minus: i64,
    /// `b2plus - b2minus`
    pub sigma: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverTopology {
    pub chi: i64,
    pub c1_sq: i64,
    pub betti: Betti,
    /// Rohlin: a spin 4-manifold has signature divisible by 16.
    pub sigma_divisible_by_16: bool,
    /// Connected sum the cover is homeomorphic to.
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TopologyReport {
    pub x_t: Betti,
    /// Unramified double cover, when `pi_1(X_t) = Z/2` is claimed.
    pub cover: Option<CoverTopology>,
}

/// Topology of `X_t` with `p_g = q = 0` and of its double cover.
pub fn topology_report(
    k2: i64,
    chi: i64,
    pi1_is_z2: bool,
) -> Result<TopologyReport, SmoothingError> {
    if chi != 1 {
        return Err(SmoothingError::DomainError(chi));
    }
    let b2minus = 9 - k2;
    let x_t = Betti {
        c2: 12 - k2,
        b2plus: 1,
        b2minus,
        sigma: 1 - b2minus,
    };
    let cover = pi1_is_z2.then(|| {
        let b2minus = 19 - 2 * k2;
        let sigma = 3 - b2minus;
        CoverTopology {
            chi: 2,
            c1_sq: 2 * k2,
            betti: Betti {
                c2: 24 - 2 * k2,
                b2plus: 3,
                b2minus,
                sigma,
            },
            sigma_divisible_by_16: sigma.abs() % 16 == 0,
            target: format!("3CP²#{b2minus}CP²bar"),
        }
    });
    Ok(TopologyReport { x_t, cover })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HypothesisReport {
    pub stage: usize,
    pub independence_rank: usize,
    pub independence_candidates: usize,
    pub independent: bool,
    pub snc_violations: Vec<Violation>,
    /// Echo of declared, unverifiable assumptions.
    pub declared_disjoint_from_multiple_fibers: Vec<String>,
    pub violations: Vec<Violation>,
}

impl HypothesisReport {
    pub fn holds(&self) -> bool {
        self.independent && self.snc_violations.is_empty() && self.violations.is_empty()
    }
}

fn names(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

/// Check a [`HypothesisSpec`] against the configuration at its stage.
pub fn check_hypotheses(stage: &Configuration, h: &HypothesisSpec) -> HypothesisReport {
    let mut violations = Vec::new();

    let (rank, independent) = match independence_certificate(stage, &names(&h.independent)) {
        Ok(cert) => (cert.rank, cert.verdict),
        Err(e) => {
            violations.push(Violation::new("hypothesis-independence", e.to_string()));
            (0, false)
        }
    };
    let snc_violations = if h.snc.is_empty() {
        Vec::new()
    } else {
        match snc_certificate(stage, &names(&h.snc)) {
            Ok(v) => v,
            Err(e) => vec![Violation::new("hypothesis-snc", e.to_string())],
        }
    };
    let declared: BTreeSet<&str> = stage
        .fibration
        .iter()
        .flat_map(|f| f.multiple_fiber_disjoint_from.iter().map(String::as_str))
        .collect();
    for name in &h.multiple_fiber_disjoint {
        if !declared.contains(name.as_str()) {
            violations.push(Violation::new(
                "hypothesis-multiple-fiber",
                format!("{name} is not declared disjoint from the multiple fibers"),
            ));
        }
    }
    for (a, b) in &h.disjoint_pairs {
        match stage.pair(a, b) {
            Ok(0) => {}
            Ok(v) => violations.push(Violation::new(
                "hypothesis-disjoint",
                format!("{a}.{b} = {v}, expected 0"),
            )),
            Err(e) => violations.push(Violation::new("hypothesis-disjoint", e.to_string())),
        }
    }
    violations.sort();
    HypothesisReport {
        stage: h.stage,
        independence_rank: rank,
        independence_candidates: h.independent.len(),
        independent,
        snc_violations,
        declared_disjoint_from_multiple_fibers: h.multiple_fiber_disjoint.clone(),
        violations,
    }
}

/// Split `curves` into the linear chains they form in `c`, each read from
/// the end with the smaller name. Fails unless every connected piece is a
/// path of transverse single intersections.
pub fn extract_chains(
    c: &Configuration,
    curves: &[&str],
) -> Result<Vec<Vec<String>>, SmoothingError> {
    let idx = curves
        .iter()
        .map(|n| {
            c.index_of(n)
                .ok_or_else(|| SmoothingError::UnknownCurve(n.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let k = idx.len();
    let mut adj = vec![Vec::new(); k];
    let mut bad = Vec::new();
    for x in 0..k {
        for y in x + 1..k {
            match c.pairing_at(idx[x], idx[y]) {
                0 => {}
                1 => {
                    adj[x].push(y);
                    adj[y].push(x);
                }
                v => bad.push(Violation::new(
                    "chain-shape",
                    format!("{}.{} = {v}", curves[x], curves[y]),
                )),
            }
        }
    }
    let mut seen = vec![false; k];
    let mut out = Vec::new();
    for start in 0..k {
        if seen[start] {
            continue;
        }
        // collect the component
        let mut comp = vec![start];
        seen[start] = true;
        let mut i = 0;
        while i < comp.len() {
            for &y in &adj[comp[i]] {
                if !seen[y] {
                    seen[y] = true;
                    comp.push(y);
                }
            }
            i += 1;
        }
        let edges: usize = comp.iter().map(|&x| adj[x].len()).sum::<usize>() / 2;
        let ends: Vec<usize> = comp
            .iter()
            .copied()
            .filter(|&x| adj[x].len() <= 1)
            .collect();
        if edges + 1 != comp.len() || comp.iter().any(|&x| adj[x].len() > 2) {
            bad.push(Violation::new(
                "chain-shape",
                format!("curves around {} do not form a linear chain", curves[start]),
            ));
            continue;
        }
        let first = *ends
            .iter()
            .min_by_key(|&&x| curves[x])
            .expect("a tree has an end");
        let mut path = vec![first];
        let mut prev = usize::MAX;
        let mut cur = first;
        while let Some(&next) = adj[cur].iter().find(|&&y| y != prev) {
            path.push(next);
            prev = cur;
            cur = next;
        }
        out.push(path.into_iter().map(|x| curves[x].to_string()).collect());
    }
    if !bad.is_empty() {
        return Err(SmoothingError::PlanInvalid(bad));
    }
    out.sort();
    Ok(out)
}

/// Chains up to reversal, sorted, for comparing chain lists.
pub fn normalized_chains(chains: &[Vec<String>]) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = chains
        .iter()
        .map(|ch| {
            let rev: Vec<String> = ch.iter().rev().cloned().collect();
            if rev < *ch {
                rev
            } else {
                ch.clone()
            }
        })
        .collect();
    out.sort();
    out
}
