//! Curve configurations: named curves with an exact intersection pairing,
//! canonical degrees and arithmetic genera, the points where they meet, and
//! the invariants of the ambient surface.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use serde::Serialize;
use thiserror::Error;

use crate::fibration::FibrationData;
use crate::ratlin::{int, RatMatrix};

mod document;

pub use document::{parse, Document, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("unknown curve `{0}`")]
    UnknownCurve(String),
    #[error("duplicate curve `{0}`")]
    DuplicateCurve(String),
    #[error("{a}.{b} = {value} but no intersection point of the two is declared")]
    MissingPointData { a: String, b: String, value: i64 },
}

/// A problem found by one of the checks. Checks return these as data so a
/// caller can report everything at once.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Violation {
    pub code: &'static str,
    pub message: String,
}

impl Violation {
    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        Violation {
            code,
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceKind {
    Enriques,
    K3,
    /// The elliptic surface `E(n)`.
    #[serde(rename = "e")]
    Elliptic(u32),
    Other,
}

impl fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceKind::Enriques => f.write_str("enriques"),
            SurfaceKind::K3 => f.write_str("k3"),
            SurfaceKind::Elliptic(n) => write!(f, "E({n})"),
            SurfaceKind::Other => f.write_str("other"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurfaceInvariants {
    pub kind: SurfaceKind,
    pub chi: i64,
    pub k2: i64,
    pub k_num_trivial: bool,
}

impl SurfaceInvariants {
    pub fn enriques() -> Self {
        SurfaceInvariants {
            kind: SurfaceKind::Enriques,
            chi: 1,
            k2: 0,
            k_num_trivial: true,
        }
    }

    pub fn k3() -> Self {
        SurfaceInvariants {
            kind: SurfaceKind::K3,
            chi: 2,
            k2: 0,
            k_num_trivial: true,
        }
    }

    /// `E(n)`; the canonical class is numerically trivial only for `n = 2`.
    pub fn elliptic(n: u32) -> Self {
        SurfaceInvariants {
            kind: SurfaceKind::Elliptic(n),
            chi: n as i64,
            k2: 0,
            k_num_trivial: n == 2,
        }
    }

    pub fn other(chi: i64, k2: i64) -> Self {
        SurfaceInvariants {
            kind: SurfaceKind::Other,
            chi,
            k2,
            k_num_trivial: false,
        }
    }

    /// Values forced by the kind, if any.
    pub fn canonical(kind: SurfaceKind) -> Option<Self> {
        match kind {
            SurfaceKind::Enriques => Some(Self::enriques()),
            SurfaceKind::K3 => Some(Self::k3()),
            SurfaceKind::Elliptic(n) => Some(Self::elliptic(n)),
            SurfaceKind::Other => None,
        }
    }

    fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let Some(want) = Self::canonical(self.kind) else {
            return out;
        };
        if self.chi != want.chi || self.k2 != want.k2 {
            out.push(Violation::new(
                "surface",
                format!(
                    "{} surface must have chi={} K2={}, got chi={} K2={}",
                    self.kind, want.chi, want.k2, self.chi, self.k2
                ),
            ));
        }
        let forced_trivial = matches!(self.kind, SurfaceKind::Enriques | SurfaceKind::K3);
        if forced_trivial && !self.k_num_trivial {
            out.push(Violation::new(
                "surface",
                format!("{} surface must have numerically trivial K", self.kind),
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CurveClass {
    pub name: String,
    /// `C^2`
    pub self_int: i64,
    /// `K.C`
    pub k_deg: i64,
    /// Arithmetic genus.
    pub genus: i64,
    pub tags: BTreeSet<String>,
}

impl CurveClass {
    pub fn new(name: impl Into<String>, self_int: i64, genus: i64, k_deg: i64) -> Self {
        CurveClass {
            name: name.into(),
            self_int,
            k_deg,
            genus,
            tags: BTreeSet::new(),
        }
    }

    /// Smooth rational curve with `K.C = 0`, the only kind of smooth
    /// rational curve on a surface with numerically trivial `K`.
    pub fn minus_two(name: impl Into<String>) -> Self {
        Self::new(name, -2, 0, 0)
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tags.insert(tag.into());
        self
    }

    /// `2 p_a - 2 = C^2 + K.C`
    pub fn satisfies_adjunction(&self) -> bool {
        2 * self.genus - 2 == self.self_int + self.k_deg
    }
}

/// A curve passing through a point with the given multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Branch {
    pub curve: String,
    pub mult: u32,
}

impl Branch {
    pub fn new(curve: impl Into<String>, mult: u32) -> Self {
        Branch {
            curve: curve.into(),
            mult,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointSpec {
    pub name: String,
    pub branches: Vec<Branch>,
}

impl PointSpec {
    pub fn new(name: impl Into<String>, branches: Vec<Branch>) -> Self {
        PointSpec {
            name: name.into(),
            branches,
        }
    }

    /// A transverse crossing of two curves.
    pub fn crossing(name: impl Into<String>, a: &str, b: &str) -> Self {
        Self::new(name, vec![Branch::new(a, 1), Branch::new(b, 1)])
    }

    /// The node of a curve.
    pub fn node(name: impl Into<String>, curve: &str) -> Self {
        Self::new(name, vec![Branch::new(curve, 2)])
    }

    pub fn mult_of(&self, curve: &str) -> u32 {
        self.branches
            .iter()
            .filter(|b| b.curve == curve)
            .map(|b| b.mult)
            .sum()
    }

    /// Branches as a sorted multiset, for matching points regardless of the
    /// order branches were written in.
    pub(crate) fn branch_key(branches: &[Branch]) -> Vec<Branch> {
        let mut k = branches.to_vec();
        k.sort();
        k
    }
}

/// Curves on a smooth surface together with their intersection pairing.
///
/// The pairing is integer valued and indexed in curve declaration order; its
/// diagonal mirrors each curve's `self_int`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    pub surface: SurfaceInvariants,
    pub curves: Vec<CurveClass>,
    pub points: Vec<PointSpec>,
    pub fibration: Option<FibrationData>,
    pub blowup_count: u32,
    pairing: Vec<i64>,
}

impl Configuration {
    /// Curves with zero mutual intersection. Fails on duplicate names.
    pub fn new(surface: SurfaceInvariants, curves: Vec<CurveClass>) -> Result<Self, ConfigError> {
        let mut seen = BTreeSet::new();
        for c in &curves {
            if !seen.insert(c.name.as_str()) {
                return Err(ConfigError::DuplicateCurve(c.name.clone()));
            }
        }
        let n = curves.len();
        let mut pairing = vec![0; n * n];
        for (i, c) in curves.iter().enumerate() {
            pairing[i * n + i] = c.self_int;
        }
        Ok(Configuration {
            surface,
            curves,
            points: Vec::new(),
            fibration: None,
            blowup_count: 0,
            pairing,
        })
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.curves.iter().position(|c| c.name == name)
    }

    pub fn curve(&self, name: &str) -> Option<&CurveClass> {
        self.curves.iter().find(|c| c.name == name)
    }

    pub(crate) fn require(&self, name: &str) -> Result<usize, ConfigError> {
        self.index_of(name)
            .ok_or_else(|| ConfigError::UnknownCurve(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.curves.iter().map(|c| c.name.as_str())
    }

    /// Pairing entry by position.
    pub fn pairing_at(&self, i: usize, j: usize) -> i64 {
        self.pairing[i * self.len() + j]
    }

    /// `A.B` by name.
    pub fn pair(&self, a: &str, b: &str) -> Result<i64, ConfigError> {
        Ok(self.pairing_at(self.require(a)?, self.require(b)?))
    }

    /// Set `A.B = B.A = value`. For `A = B` this also updates `self_int`.
    pub fn set_pair(&mut self, a: &str, b: &str, value: i64) -> Result<(), ConfigError> {
        let (i, j) = (self.require(a)?, self.require(b)?);
        self.set_pairing_at(i, j, value);
        Ok(())
    }

    pub(crate) fn set_pairing_at(&mut self, i: usize, j: usize, value: i64) {
        let n = self.len();
        self.pairing[i * n + j] = value;
        self.pairing[j * n + i] = value;
        if i == j {
            self.curves[i].self_int = value;
        }
    }

    /// Overwrite a single entry without touching its mirror. Only useful
    /// for exercising the validator.
    #[doc(hidden)]
    pub fn set_pairing_entry_raw(&mut self, i: usize, j: usize, value: i64) {
        let n = self.len();
        self.pairing[i * n + j] = value;
    }

    /// Builder form of [`Configuration::set_pair`].
    pub fn with_pair(mut self, a: &str, b: &str, value: i64) -> Result<Self, ConfigError> {
        self.set_pair(a, b, value)?;
        Ok(self)
    }

    pub fn with_point(mut self, p: PointSpec) -> Self {
        self.points.push(p);
        self
    }

    pub fn with_fibration(mut self, f: FibrationData) -> Self {
        self.fibration = Some(f);
        self
    }

    /// Append a curve meeting nothing.
    pub fn push_curve(&mut self, c: CurveClass) -> Result<usize, ConfigError> {
        if self.index_of(&c.name).is_some() {
            return Err(ConfigError::DuplicateCurve(c.name));
        }
        let n = self.len();
        let mut pairing = vec![0; (n + 1) * (n + 1)];
        for i in 0..n {
            for j in 0..n {
                pairing[i * (n + 1) + j] = self.pairing[i * n + j];
            }
        }
        pairing[n * (n + 1) + n] = c.self_int;
        self.pairing = pairing;
        self.curves.push(c);
        Ok(n)
    }

    /// `K^2` of the current surface.
    pub fn ambient_k2(&self) -> i64 {
        self.surface.k2 - self.blowup_count as i64
    }

    /// The whole pairing as a rational matrix.
    pub fn pairing_matrix(&self) -> RatMatrix {
        let n = self.len();
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, int(self.pairing_at(i, j)));
            }
        }
        m
    }

    /// `(A, B, A.B)` for every unordered pair with a nonzero entry, in
    /// declaration order.
    pub fn nonzero_pairs(&self) -> Vec<(&str, &str, i64)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let v = self.pairing_at(i, j);
                if v != 0 {
                    out.push((
                        self.curves[i].name.as_str(),
                        self.curves[j].name.as_str(),
                        v,
                    ));
                }
            }
        }
        out
    }

    /// Total `m_A m_B` over declared points shared by `A` and `B`.
    pub fn declared_intersection(&self, a: &str, b: &str) -> i64 {
        self.points
            .iter()
            .map(|p| p.mult_of(a) as i64 * p.mult_of(b) as i64)
            .sum()
    }
}

fn ordered<'a>(a: &'a str, b: &'a str) -> (&'a str, &'a str) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Every problem with the configuration, sorted. Empty means valid.
pub fn validate(c: &Configuration) -> Vec<Violation> {
    let mut out = c.surface.violations();
    let n = c.len();

    let mut seen = BTreeSet::new();
    for curve in &c.curves {
        if !seen.insert(curve.name.as_str()) {
            out.push(Violation::new(
                "duplicate-curve",
                format!("curve {} is declared twice", curve.name),
            ));
        }
    }

    for (i, curve) in c.curves.iter().enumerate() {
        let name = &curve.name;
        if curve.genus < 0 {
            out.push(Violation::new(
                "genus",
                format!("{name} has negative genus {}", curve.genus),
            ));
        }
        if !curve.satisfies_adjunction() {
            out.push(Violation::new(
                "adjunction",
                format!(
                    "{name}: 2*{}-2 = {} but C^2+K.C = {}+{} = {}",
                    curve.genus,
                    2 * curve.genus - 2,
                    curve.self_int,
                    curve.k_deg,
                    curve.self_int + curve.k_deg
                ),
            ));
        }
        if c.pairing_at(i, i) != curve.self_int {
            out.push(Violation::new(
                "pairing-diagonal",
                format!(
                    "{name}: pairing diagonal {} differs from self-intersection {}",
                    c.pairing_at(i, i),
                    curve.self_int
                ),
            ));
        }
        if c.surface.k_num_trivial && c.blowup_count == 0 && curve.k_deg != 0 {
            out.push(Violation::new(
                "canonical-degree",
                format!("{name}: K.C = {} on a surface with K = 0", curve.k_deg),
            ));
        }
        if c.surface.kind == SurfaceKind::Enriques
            && c.blowup_count == 0
            && curve.genus == 0
            && curve.self_int != -2
        {
            out.push(Violation::new(
                "enriques-rational",
                format!(
                    "{name}: smooth rational curve with self-intersection {} (must be -2)",
                    curve.self_int
                ),
            ));
        }
    }

    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = ordered(&c.curves[i].name, &c.curves[j].name);
            let (x, y) = if c.curves[i].name <= c.curves[j].name {
                (c.pairing_at(i, j), c.pairing_at(j, i))
            } else {
                (c.pairing_at(j, i), c.pairing_at(i, j))
            };
            if x != y {
                out.push(Violation::new(
                    "pairing-symmetry",
                    format!("{a}.{b} is not symmetric ({x} vs {y})"),
                ));
            }
            if x < 0 || y < 0 {
                out.push(Violation::new(
                    "pairing-negative",
                    format!("{a}.{b} = {} is negative", x.min(y)),
                ));
            }
        }
    }

    out.extend(point_violations(c));
    if let Some(f) = &c.fibration {
        out.extend(crate::fibration::structure_violations(c, f));
    }
    out.sort();
    out.dedup();
    out
}

fn point_violations(c: &Configuration) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut names = BTreeSet::new();
    let mut node_budget: BTreeMap<&str, i64> = BTreeMap::new();
    for p in &c.points {
        if !names.insert(p.name.as_str()) {
            out.push(Violation::new(
                "duplicate-point",
                format!("point {} is declared twice", p.name),
            ));
        }
        let mut on = BTreeSet::new();
        for b in &p.branches {
            if c.index_of(&b.curve).is_none() {
                out.push(Violation::new(
                    "point-curve",
                    format!("point {} lies on unknown curve {}", p.name, b.curve),
                ));
            }
            if b.mult == 0 {
                out.push(Violation::new(
                    "point-multiplicity",
                    format!("point {}: multiplicity of {} must be >= 1", p.name, b.curve),
                ));
            }
            if !on.insert(b.curve.as_str()) {
                out.push(Violation::new(
                    "point-branch",
                    format!("point {} lists {} twice", p.name, b.curve),
                ));
            }
            let m = b.mult as i64;
            *node_budget.entry(b.curve.as_str()).or_default() += m * (m - 1) / 2;
        }
    }
    // A point of multiplicity m drops the genus by m(m-1)/2.
    for (name, used) in node_budget {
        if let Some(curve) = c.curve(name) {
            if used > curve.genus {
                out.push(Violation::new(
                    "point-singularity",
                    format!(
                        "{name} has genus {} but its declared singular points need {used}",
                        curve.genus
                    ),
                ));
            }
        }
    }
    // Declared points may not account for more than the pairing allows.
    let mut shared: BTreeMap<(&str, &str), i64> = BTreeMap::new();
    for p in &c.points {
        for (k, x) in p.branches.iter().enumerate() {
            for y in &p.branches[k + 1..] {
                if x.curve != y.curve {
                    *shared.entry(ordered(&x.curve, &y.curve)).or_default() +=
                        x.mult as i64 * y.mult as i64;
                }
            }
        }
    }
    for ((a, b), total) in shared {
        if let Ok(v) = c.pair(a, b) {
            if total > v {
                out.push(Violation::new(
                    "point-pairing",
                    format!("declared points give {a}.{b} >= {total} but the pairing says {v}"),
                ));
            }
        }
    }
    out
}

/// Exact-rank certificate that a set of curves is numerically independent,
/// obtained by pairing the candidates against every curve of the
/// configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependenceCertificate {
    pub candidates: Vec<String>,
    /// candidates x all curves
    pub test_matrix: RatMatrix,
    pub rank: usize,
    pub verdict: bool,
}

pub fn independence_certificate(
    c: &Configuration,
    candidates: &[&str],
) -> Result<IndependenceCertificate, ConfigError> {
    let rows = candidates
        .iter()
        .map(|&name| c.require(name))
        .collect::<Result<Vec<_>, _>>()?;
    let mut m = RatMatrix::zeros(rows.len(), c.len());
    for (r, &i) in rows.iter().enumerate() {
        for j in 0..c.len() {
            m.set(r, j, int(c.pairing_at(i, j)));
        }
    }
    let rank = m.rank();
    Ok(IndependenceCertificate {
        candidates: candidates.iter().map(|s| s.to_string()).collect(),
        test_matrix: m,
        rank,
        verdict: rank == candidates.len(),
    })
}

/// Checks that `divisor` is a simple normal crossing divisor, as far as the
/// declared points can tell.
pub fn snc_certificate(c: &Configuration, divisor: &[&str]) -> Result<Vec<Violation>, ConfigError> {
    let idx = divisor
        .iter()
        .map(|&name| c.require(name))
        .collect::<Result<Vec<_>, _>>()?;
    let in_divisor: BTreeSet<&str> = divisor.iter().copied().collect();
    let mut out = Vec::new();

    for &i in &idx {
        let curve = &c.curves[i];
        if curve.genus != 0 {
            out.push(Violation::new(
                "singular-component",
                format!("{} has arithmetic genus {}", curve.name, curve.genus),
            ));
        }
    }

    for p in &c.points {
        let on: Vec<&Branch> = p
            .branches
            .iter()
            .filter(|b| in_divisor.contains(b.curve.as_str()))
            .collect();
        if on.is_empty() {
            continue;
        }
        for b in &on {
            if b.mult > 1 {
                out.push(Violation::new(
                    "singular-point",
                    format!(
                        "{} passes through {} with multiplicity {}",
                        b.curve, p.name, b.mult
                    ),
                ));
            }
        }
        if on.len() > 2 {
            out.push(Violation::new(
                "triple point",
                format!("{} branches of the divisor meet at {}", on.len(), p.name),
            ));
        }
    }

    for (k, &i) in idx.iter().enumerate() {
        for &j in &idx[k + 1..] {
            let v = c.pairing_at(i, j);
            if v <= 0 {
                continue;
            }
            let (a, b) = (&c.curves[i].name, &c.curves[j].name);
            let declared = c.declared_intersection(a, b);
            if declared == 0 {
                return Err(ConfigError::MissingPointData {
                    a: a.clone(),
                    b: b.clone(),
                    value: v,
                });
            }
            if declared < v {
                let (a, b) = ordered(a, b);
                out.push(Violation::new(
                    "non-transverse",
                    format!("{a}.{b} = {v} but declared points account for only {declared}"),
                ));
            }
        }
    }
    out.sort();
    Ok(out)
}

fn dot_id(name: &str) -> String {
    format!("\"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Dual graph in DOT: one vertex per curve, one edge per unit of
/// intersection.
pub fn export_dot(c: &Configuration) -> String {
    let mut s = String::from("graph configuration {\n");
    for curve in &c.curves {
        let label = format!("{} ({})", curve.name, curve.self_int);
        let _ = writeln!(s, "  {} [label={}];", dot_id(&curve.name), dot_id(&label));
    }
    for (a, b, v) in c.nonzero_pairs() {
        for _ in 0..v.max(0) {
            let _ = writeln!(s, "  {} -- {};", dot_id(a), dot_id(b));
        }
    }
    s.push_str("}\n");
    s
}
