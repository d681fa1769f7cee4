//! JSON documents: a configuration plus an optional blow-up sequence and
//! contraction plan.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{
    validate, Branch, Configuration, CurveClass, PointSpec, SurfaceInvariants, SurfaceKind,
    Violation,
};
use crate::blowup::{apply_blowups, auto_label, BlowupStep, StepError};
use crate::fibration::{Fiber, FiberTag, FibrationData};
use crate::smoothing::{ContractionPlan, HypothesisSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("name error: {0}")]
    Name(String),
    #[error("validation failed: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Validation(Vec<Violation>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub config: Configuration,
    pub blowups: Vec<BlowupStep>,
    pub plan: Option<ContractionPlan>,
    /// Free-form remarks carried along with the data.
    pub notes: Vec<String>,
}

impl Document {
    pub fn new(config: Configuration) -> Self {
        Document {
            config,
            blowups: Vec::new(),
            plan: None,
            notes: Vec::new(),
        }
    }

    /// The configuration after every blow-up.
    pub fn final_configuration(&self) -> Result<Configuration, StepError> {
        apply_blowups(&self.config, &self.blowups)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&RawDocument::from(self)).expect("plain data");
        s.push('\n');
        s
    }
}

/// Parse and validate a document.
pub fn parse(text: &str) -> Result<Document, ParseError> {
    let raw: RawDocument =
        serde_json::from_str(text).map_err(|e| ParseError::Schema(e.to_string()))?;
    raw.resolve()
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    surface: RawSurface,
    curves: Vec<RawCurve>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pairing: Vec<(String, String, i64)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    points: Vec<RawPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fibration: Option<RawFibration>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    blowups: Vec<RawBlowup>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    plan: Option<RawPlan>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawSurface {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<u32>,
    #[serde(default)]
    chi: Option<i64>,
    #[serde(default, rename = "K2")]
    k2: Option<i64>,
    #[serde(default, rename = "K_num_trivial")]
    k_num_trivial: Option<bool>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawCurve {
    name: String,
    #[serde(rename = "self")]
    self_int: i64,
    genus: i64,
    #[serde(rename = "Kdeg")]
    k_deg: i64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    tags: Vec<String>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawPoint {
    name: String,
    branches: Vec<(String, u32)>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawFibration {
    fibers: Vec<RawFiber>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    two_sections: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    multiple_fiber_disjoint_from: Vec<String>,
    #[serde(default)]
    generic_fiber_class_known: bool,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawFiber {
    #[serde(rename = "type")]
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    multiplicity: Option<u32>,
    #[serde(default)]
    components: Vec<String>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawBlowup {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    branches: Vec<(String, u32)>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawPlan {
    chains: Vec<Vec<String>>,
    #[serde(default)]
    q: i64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    assumptions: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hypotheses: Option<RawHypotheses>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawHypotheses {
    stage: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    independent: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    snc: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    multiple_fiber_disjoint: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    disjoint_pairs: Vec<(String, String)>,
}

fn schema(msg: impl Into<String>) -> ParseError {
    ParseError::Schema(msg.into())
}

fn known(c: &Configuration, name: &str, what: &str) -> Result<(), ParseError> {
    match c.index_of(name) {
        Some(_) => Ok(()),
        None => Err(ParseError::Name(format!("{what}: unknown curve `{name}`"))),
    }
}

fn branches(raw: &[(String, u32)]) -> Vec<Branch> {
    raw.iter()
        .map(|(c, m)| Branch::new(c.clone(), *m))
        .collect()
}

fn raw_branches(bs: &[Branch]) -> Vec<(String, u32)> {
    bs.iter().map(|b| (b.curve.clone(), b.mult)).collect()
}

impl RawSurface {
    fn resolve(&self) -> Result<SurfaceInvariants, ParseError> {
        let kind = match self.kind.as_str() {
            "enriques" => SurfaceKind::Enriques,
            "k3" => SurfaceKind::K3,
            "e" => SurfaceKind::Elliptic(
                self.n
                    .ok_or_else(|| schema("surface: kind \"e\" needs \"n\""))?,
            ),
            "other" => SurfaceKind::Other,
            k => return Err(schema(format!("surface: unknown kind \"{k}\""))),
        };
        if self.n.is_some() && !matches!(kind, SurfaceKind::Elliptic(_)) {
            return Err(schema("surface: \"n\" is only meaningful for kind \"e\""));
        }
        let base = match SurfaceInvariants::canonical(kind) {
            Some(s) => s,
            None => SurfaceInvariants::other(
                self.chi
                    .ok_or_else(|| schema("surface: kind \"other\" needs \"chi\""))?,
                self.k2
                    .ok_or_else(|| schema("surface: kind \"other\" needs \"K2\""))?,
            ),
        };
        Ok(SurfaceInvariants {
            kind,
            chi: self.chi.unwrap_or(base.chi),
            k2: self.k2.unwrap_or(base.k2),
            k_num_trivial: self.k_num_trivial.unwrap_or(base.k_num_trivial),
        })
    }
}

impl RawDocument {
    fn resolve(self) -> Result<Document, ParseError> {
        let surface = self.surface.resolve()?;
        let curves = self
            .curves
            .iter()
            .map(|c| {
                let mut cc = CurveClass::new(c.name.clone(), c.self_int, c.genus, c.k_deg);
                cc.tags = c.tags.iter().cloned().collect();
                cc
            })
            .collect();
        let mut config =
            Configuration::new(surface, curves).map_err(|e| ParseError::Name(e.to_string()))?;

        let mut pairs = BTreeSet::new();
        for (a, b, v) in &self.pairing {
            known(&config, a, "pairing")?;
            known(&config, b, "pairing")?;
            if a == b {
                return Err(schema(format!(
                    "pairing [{a}, {b}]: self-intersections belong in the curve's \"self\""
                )));
            }
            let key = if a < b { (a, b) } else { (b, a) };
            if !pairs.insert(key) {
                return Err(schema(format!("pairing lists {a}.{b} twice")));
            }
            config.set_pair(a, b, *v).expect("names checked");
        }

        for p in &self.points {
            for (c, m) in &p.branches {
                known(&config, c, &format!("point {}", p.name))?;
                if *m == 0 {
                    return Err(schema(format!(
                        "point {}: multiplicity of {c} must be >= 1",
                        p.name
                    )));
                }
            }
            config
                .points
                .push(PointSpec::new(p.name.clone(), branches(&p.branches)));
        }

        if let Some(f) = &self.fibration {
            let mut fibers = Vec::new();
            for (k, raw) in f.fibers.iter().enumerate() {
                let tag: FiberTag = raw
                    .kind
                    .parse()
                    .map_err(|e| schema(format!("fibration fiber #{k}: {e}")))?;
                let multiplicity = match (raw.multiplicity, tag.multiplicity) {
                    (Some(m), 1) => m,
                    (Some(m), t) if m == t => m,
                    (Some(m), _) => {
                        return Err(schema(format!(
                            "fibration fiber #{k}: multiplicity {m} contradicts type {}",
                            raw.kind
                        )))
                    }
                    (None, t) => t,
                };
                for c in &raw.components {
                    known(&config, c, &format!("fibration fiber #{k}"))?;
                }
                fibers.push(Fiber {
                    kind: tag.kind,
                    multiplicity,
                    components: raw.components.clone(),
                });
            }
            for c in &f.two_sections {
                known(&config, c, "fibration two_sections")?;
            }
            for c in &f.multiple_fiber_disjoint_from {
                known(&config, c, "fibration multiple_fiber_disjoint_from")?;
            }
            config.fibration = Some(FibrationData {
                fibers,
                two_sections: f.two_sections.clone(),
                multiple_fiber_disjoint_from: f.multiple_fiber_disjoint_from.clone(),
                generic_fiber_class_known: f.generic_fiber_class_known,
            });
        }

        let violations = validate(&config);
        if !violations.is_empty() {
            return Err(ParseError::Validation(violations));
        }

        // Names grow as the blow-ups create exceptional curves.
        let mut names: BTreeSet<String> = config.names().map(str::to_string).collect();
        let mut blowups = Vec::new();
        for (i, raw) in self.blowups.iter().enumerate() {
            for (c, m) in &raw.branches {
                if !names.contains(c) {
                    return Err(ParseError::Name(format!(
                        "blow-up step {i}: unknown curve `{c}`"
                    )));
                }
                if *m == 0 {
                    return Err(schema(format!(
                        "blow-up step {i}: multiplicity of {c} must be >= 1"
                    )));
                }
            }
            let label = raw
                .label
                .clone()
                .unwrap_or_else(|| auto_label(i as u32 + 1));
            if !names.insert(label.clone()) {
                return Err(ParseError::Name(format!(
                    "blow-up step {i}: curve name `{label}` is already taken"
                )));
            }
            blowups.push(BlowupStep {
                label: raw.label.clone(),
                branches: branches(&raw.branches),
            });
        }

        let plan = match self.plan {
            None => None,
            Some(p) => {
                let check = |n: &String, what: &str| {
                    if names.contains(n) {
                        Ok(())
                    } else {
                        Err(ParseError::Name(format!(
                            "plan {what}: unknown curve `{n}`"
                        )))
                    }
                };
                for n in p.chains.iter().flatten() {
                    check(n, "chains")?;
                }
                let hypotheses = match p.hypotheses {
                    None => None,
                    Some(h) => {
                        for n in h
                            .independent
                            .iter()
                            .chain(&h.snc)
                            .chain(&h.multiple_fiber_disjoint)
                        {
                            check(n, "hypotheses")?;
                        }
                        for (a, b) in &h.disjoint_pairs {
                            check(a, "hypotheses")?;
                            check(b, "hypotheses")?;
                        }
                        if h.stage > blowups.len() {
                            return Err(schema(format!(
                                "plan hypotheses: stage {} exceeds the {} blow-ups",
                                h.stage,
                                blowups.len()
                            )));
                        }
                        Some(HypothesisSpec {
                            stage: h.stage,
                            independent: h.independent,
                            snc: h.snc,
                            multiple_fiber_disjoint: h.multiple_fiber_disjoint,
                            disjoint_pairs: h.disjoint_pairs,
                        })
                    }
                };
                Some(ContractionPlan {
                    chains: p.chains,
                    q: p.q,
                    assumptions: p.assumptions,
                    hypotheses,
                })
            }
        };

        Ok(Document {
            config,
            blowups,
            plan,
            notes: self.notes,
        })
    }
}

impl From<&Document> for RawDocument {
    fn from(doc: &Document) -> Self {
        let c = &doc.config;
        let s = &c.surface;
        let (kind, n) = match s.kind {
            SurfaceKind::Enriques => ("enriques", None),
            SurfaceKind::K3 => ("k3", None),
            SurfaceKind::Elliptic(n) => ("e", Some(n)),
            SurfaceKind::Other => ("other", None),
        };
        RawDocument {
            surface: RawSurface {
                kind: kind.to_string(),
                n,
                chi: Some(s.chi),
                k2: Some(s.k2),
                k_num_trivial: Some(s.k_num_trivial),
            },
            curves: c
                .curves
                .iter()
                .map(|x| RawCurve {
                    name: x.name.clone(),
                    self_int: x.self_int,
                    genus: x.genus,
                    k_deg: x.k_deg,
                    tags: x.tags.iter().cloned().collect(),
                })
                .collect(),
            pairing: c
                .nonzero_pairs()
                .into_iter()
                .map(|(a, b, v)| (a.to_string(), b.to_string(), v))
                .collect(),
            points: c
                .points
                .iter()
                .map(|p| RawPoint {
                    name: p.name.clone(),
                    branches: raw_branches(&p.branches),
                })
                .collect(),
            fibration: c.fibration.as_ref().map(|f| RawFibration {
                fibers: f
                    .fibers
                    .iter()
                    .map(|x| RawFiber {
                        kind: x.tag().to_string(),
                        multiplicity: None,
                        components: x.components.clone(),
                    })
                    .collect(),
                two_sections: f.two_sections.clone(),
                multiple_fiber_disjoint_from: f.multiple_fiber_disjoint_from.clone(),
                generic_fiber_class_known: f.generic_fiber_class_known,
            }),
            blowups: doc
                .blowups
                .iter()
                .map(|b| RawBlowup {
                    label: b.label.clone(),
                    branches: raw_branches(&b.branches),
                })
                .collect(),
            plan: doc.plan.as_ref().map(|p| RawPlan {
                chains: p.chains.clone(),
                q: p.q,
                assumptions: p.assumptions.clone(),
                hypotheses: p.hypotheses.as_ref().map(|h| RawHypotheses {
                    stage: h.stage,
                    independent: h.independent.clone(),
                    snc: h.snc.clone(),
                    multiple_fiber_disjoint: h.multiple_fiber_disjoint.clone(),
                    disjoint_pairs: h.disjoint_pairs.clone(),
                }),
            }),
            notes: doc.notes.clone(),
        }
    }
}
