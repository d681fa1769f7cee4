//! Elliptic fibration bookkeeping: Kodaira fiber types, Euler number
//! accounting, 2-section incidence and multiple-fiber flags.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::config::{Configuration, SurfaceKind, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FibrationError {
    #[error("unknown Kodaira fiber type `{0}`")]
    UnknownTag(String),
}

/// Kodaira type of a (reduced) singular fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KodairaType {
    /// `I_n`; `I_0` is a smooth elliptic curve.
    I(u32),
    /// `I_n^*`
    IStar(u32),
    II,
    III,
    IV,
    IVStar,
    IIIStar,
    IIStar,
}

impl KodairaType {
    pub fn euler_number(self) -> u32 {
        match self {
            KodairaType::I(n) => n,
            KodairaType::IStar(n) => n + 6,
            KodairaType::II => 2,
            KodairaType::III => 3,
            KodairaType::IV => 4,
            KodairaType::IVStar => 8,
            KodairaType::IIIStar => 9,
            KodairaType::IIStar => 10,
        }
    }
}

pub fn euler_number(t: KodairaType) -> u32 {
    t.euler_number()
}

impl fmt::Display for KodairaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KodairaType::I(n) => write!(f, "I{n}"),
            KodairaType::IStar(n) => write!(f, "I{n}*"),
            KodairaType::II => f.write_str("II"),
            KodairaType::III => f.write_str("III"),
            KodairaType::IV => f.write_str("IV"),
            KodairaType::IVStar => f.write_str("IV*"),
            KodairaType::IIIStar => f.write_str("III*"),
            KodairaType::IIStar => f.write_str("II*"),
        }
    }
}

impl FromStr for KodairaType {
    type Err = FibrationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FibrationError::UnknownTag(s.to_string());
        Ok(match s {
            "II" => KodairaType::II,
            "III" => KodairaType::III,
            "IV" => KodairaType::IV,
            "IV*" => KodairaType::IVStar,
            "III*" => KodairaType::IIIStar,
            "II*" => KodairaType::IIStar,
            _ => {
                let rest = s.strip_prefix('I').ok_or_else(bad)?;
                let (digits, star) = match rest.strip_suffix('*') {
                    Some(d) => (d, true),
                    None => (rest, false),
                };
                if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(bad());
                }
                let n = digits.parse().map_err(|_| bad())?;
                if star {
                    KodairaType::IStar(n)
                } else {
                    KodairaType::I(n)
                }
            }
        })
    }
}

/// A fiber tag such as `I9`, `2I1` or `I0*`: optional multiplicity prefix
/// followed by the Kodaira type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FiberTag {
    pub multiplicity: u32,
    pub kind: KodairaType,
}

impl FromStr for FiberTag {
    type Err = FibrationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let split = s.find(|c: char| !c.is_ascii_digit()).unwrap_or(s.len());
        let (prefix, rest) = s.split_at(split);
        let multiplicity = if prefix.is_empty() {
            1
        } else {
            match prefix.parse() {
                Ok(m) if m >= 1 => m,
                _ => return Err(FibrationError::UnknownTag(s.to_string())),
            }
        };
        let kind = rest
            .parse()
            .map_err(|_| FibrationError::UnknownTag(s.to_string()))?;
        Ok(FiberTag { multiplicity, kind })
    }
}

impl fmt::Display for FiberTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.multiplicity != 1 {
            write!(f, "{}", self.multiplicity)?;
        }
        write!(f, "{}", self.kind)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fiber {
    pub kind: KodairaType,
    pub multiplicity: u32,
    /// Components present in the configuration; may be partial or empty.
    pub components: Vec<String>,
}

impl Fiber {
    pub fn new(tag: &str, components: &[&str]) -> Result<Self, FibrationError> {
        let t: FiberTag = tag.parse()?;
        Ok(Fiber {
            kind: t.kind,
            multiplicity: t.multiplicity,
            components: components.iter().map(|s| s.to_string()).collect(),
        })
    }

    pub fn tag(&self) -> FiberTag {
        FiberTag {
            multiplicity: self.multiplicity,
            kind: self.kind,
        }
    }

    pub fn is_multiple(&self) -> bool {
        self.multiplicity > 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FibrationData {
    pub fibers: Vec<Fiber>,
    pub two_sections: Vec<String>,
    /// Curves declared (not computed) to miss both multiple fibers.
    pub multiple_fiber_disjoint_from: Vec<String>,
    pub generic_fiber_class_known: bool,
}

impl FibrationData {
    /// Every curve name the fibration refers to.
    pub fn referenced_names(&self) -> impl Iterator<Item = &str> {
        self.fibers
            .iter()
            .flat_map(|f| f.components.iter())
            .chain(&self.two_sections)
            .chain(&self.multiple_fiber_disjoint_from)
            .map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EulerCheck {
    /// Sum of Euler numbers of the declared fibers.
    pub declared: u32,
    /// `12 chi`
    pub expected: i64,
    /// `expected - declared`
    pub deficit: i64,
    pub verdict: bool,
    /// Set when the declared fibers fall short, i.e. some singular fibers
    /// were left out.
    pub unlisted_fibers: bool,
}

pub fn euler_sum_check(f: &FibrationData, chi: i64) -> EulerCheck {
    let declared: u32 = f.fibers.iter().map(|x| x.kind.euler_number()).sum();
    let expected = 12 * chi;
    let deficit = expected - declared as i64;
    EulerCheck {
        declared,
        expected,
        deficit,
        verdict: deficit == 0,
        unlisted_fibers: deficit > 0,
    }
}

/// A 2-section meets a fiber with total multiplicity 2, or once the reduced
/// fiber of a double fiber. Only fibers whose components are listed are
/// checked.
pub fn two_section_incidence_check(c: &Configuration) -> Vec<Violation> {
    let Some(f) = &c.fibration else {
        return vec![Violation::new(
            "no-fibration",
            "configuration has no fibration data",
        )];
    };
    let mut out = Vec::new();
    for s in &f.two_sections {
        for (k, fiber) in f.fibers.iter().enumerate() {
            if fiber.components.is_empty() || fiber.components.contains(s) {
                continue;
            }
            let total: i64 = fiber
                .components
                .iter()
                .map(|comp| c.pair(s, comp).unwrap_or(0))
                .sum();
            let want = if fiber.is_multiple() { 1 } else { 2 };
            if total != want {
                out.push(Violation::new(
                    "two-section",
                    format!(
                        "{s} meets fiber #{k} ({}) with multiplicity {total}, expected {want}",
                        fiber.tag()
                    ),
                ));
            }
        }
    }
    out.sort();
    out
}

/// On an Enriques or `E(1)` surface an `I9` fiber comes with three `I1`
/// fibers. Returns an advisory when fewer are declared.
pub fn i9_forces_i1_lint(f: &FibrationData) -> Option<String> {
    let has_i9 = f.fibers.iter().any(|x| x.kind == KodairaType::I(9));
    let i1 = f
        .fibers
        .iter()
        .filter(|x| x.kind == KodairaType::I(1))
        .count();
    (has_i9 && i1 < 3).then(|| {
        format!("an I9 fiber implies three I1 fibers but only {i1} declared; fibration may be under-declared")
    })
}

/// Whether [`i9_forces_i1_lint`] applies to the surface at all.
pub fn i9_lint_applies(kind: SurfaceKind) -> bool {
    matches!(kind, SurfaceKind::Enriques | SurfaceKind::Elliptic(1))
}

/// Structural checks run by `config::validate`.
pub(crate) fn structure_violations(c: &Configuration, f: &FibrationData) -> Vec<Violation> {
    let mut out = Vec::new();
    for name in f.referenced_names() {
        if c.index_of(name).is_none() {
            out.push(Violation::new(
                "fibration-curve",
                format!("fibration refers to unknown curve {name}"),
            ));
        }
    }
    let mut owner: BTreeMap<&str, usize> = BTreeMap::new();
    for (k, fiber) in f.fibers.iter().enumerate() {
        for comp in &fiber.components {
            if let Some(prev) = owner.insert(comp.as_str(), k) {
                out.push(Violation::new(
                    "fiber-overlap",
                    format!("{comp} is a component of fibers #{prev} and #{k}"),
                ));
            }
        }
        if fiber.multiplicity == 0 {
            out.push(Violation::new(
                "fiber-multiplicity",
                format!("fiber #{k} has multiplicity 0"),
            ));
        }
        if fiber.is_multiple() && !matches!(fiber.kind, KodairaType::I(_)) {
            out.push(Violation::new(
                "multiple-fiber-type",
                format!("multiple fiber #{k} has type {}, expected I_n", fiber.tag()),
            ));
        }
    }
    if c.surface.kind == SurfaceKind::Enriques {
        let multiple: Vec<&Fiber> = f.fibers.iter().filter(|x| x.is_multiple()).collect();
        if multiple.len() > 2 {
            out.push(Violation::new(
                "multiple-fiber-count",
                format!(
                    "{} multiple fibers declared, an Enriques fibration has two",
                    multiple.len()
                ),
            ));
        }
        for m in multiple {
            if m.multiplicity != 2 {
                out.push(Violation::new(
                    "multiple-fiber-count",
                    format!(
                        "multiple fiber {} on an Enriques surface must be double",
                        m.tag()
                    ),
                ));
            }
        }
    }
    out
}
