//! Blow-ups of points on a configuration, tracking proper transforms.
//!
//! Blowing up a point through curves `C` with multiplicities `m`:
//! `C^2 -= m^2`, `K.C += m`, `p_a(C) -= m(m-1)/2`, `C.e = m`, and for two
//! branches `C.D -= m m'`. The new curve `e` is a smooth rational
//! `(-1)`-curve and `K^2` drops by one.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::config::{Branch, Configuration, CurveClass, PointSpec};

/// Tag carried by every exceptional curve.
pub const EXCEPTIONAL_TAG: &str = "exceptional";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlowupError {
    #[error("unknown curve `{0}`")]
    UnknownCurve(String),
    #[error("{curve} listed twice in one blow-up")]
    RepeatedBranch { curve: String },
    #[error("branch multiplicity of {curve} must be at least 1")]
    ZeroMultiplicity { curve: String },
    #[error("{a}.{b} = {available} cannot absorb multiplicities {ma} x {mb}")]
    ExcessMultiplicity {
        a: String,
        b: String,
        available: i64,
        ma: u32,
        mb: u32,
    },
    #[error("{curve} has genus {genus}; a point of multiplicity {mult} would make it negative")]
    NegativeGenus {
        curve: String,
        genus: i64,
        mult: u32,
    },
    #[error("exceptional curve name `{0}` is already taken")]
    DuplicateLabel(String),
}

/// Failure of one step in a sequence.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("blow-up step {index}: {source}")]
pub struct StepError {
    /// Zero-based position in the sequence.
    pub index: usize,
    #[source]
    pub source: BlowupError,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BlowupStep {
    /// Name of the new curve; `e<k>` for the k-th blow-up when absent.
    pub label: Option<String>,
    pub branches: Vec<Branch>,
}

impl BlowupStep {
    pub fn new(branches: &[(&str, u32)]) -> Self {
        BlowupStep {
            label: None,
            branches: branches.iter().map(|&(c, m)| Branch::new(c, m)).collect(),
        }
    }

    /// Transverse crossing of two curves.
    pub fn crossing(a: &str, b: &str) -> Self {
        Self::new(&[(a, 1), (b, 1)])
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// The label this step gives its curve when applied to `c`.
    pub fn resolved_label(&self, c: &Configuration) -> String {
        self.label
            .clone()
            .unwrap_or_else(|| auto_label(c.blowup_count + 1))
    }
}

pub fn auto_label(k: u32) -> String {
    format!("e{k}")
}

/// Check a step against `c` without applying it.
pub fn check_step(c: &Configuration, step: &BlowupStep) -> Result<Vec<usize>, BlowupError> {
    let mut idx = Vec::with_capacity(step.branches.len());
    let mut seen = BTreeSet::new();
    for b in &step.branches {
        let i = c
            .index_of(&b.curve)
            .ok_or_else(|| BlowupError::UnknownCurve(b.curve.clone()))?;
        if !seen.insert(i) {
            return Err(BlowupError::RepeatedBranch {
                curve: b.curve.clone(),
            });
        }
        if b.mult == 0 {
            return Err(BlowupError::ZeroMultiplicity {
                curve: b.curve.clone(),
            });
        }
        let m = b.mult as i64;
        let genus = c.curves[i].genus;
        if genus < m * (m - 1) / 2 {
            return Err(BlowupError::NegativeGenus {
                curve: b.curve.clone(),
                genus,
                mult: b.mult,
            });
        }
        idx.push(i);
    }
    for (x, (bx, &i)) in step.branches.iter().zip(&idx).enumerate() {
        for (by, &j) in step.branches[x + 1..].iter().zip(&idx[x + 1..]) {
            let available = c.pairing_at(i, j);
            if available < bx.mult as i64 * by.mult as i64 {
                return Err(BlowupError::ExcessMultiplicity {
                    a: bx.curve.clone(),
                    b: by.curve.clone(),
                    available,
                    ma: bx.mult,
                    mb: by.mult,
                });
            }
        }
    }
    let label = step.resolved_label(c);
    if c.index_of(&label).is_some() {
        return Err(BlowupError::DuplicateLabel(label));
    }
    Ok(idx)
}

/// Blow up one point.
///
/// The first declared point whose branches match the step is consumed. The
/// points where the proper transforms cross the new curve are declared in
/// its place, named `<label>.<curve>`.
pub fn blow_up(c: &Configuration, step: &BlowupStep) -> Result<Configuration, BlowupError> {
    let idx = check_step(c, step)?;
    let label = step.resolved_label(c);
    let mut out = c.clone();

    for (b, &i) in step.branches.iter().zip(&idx) {
        let m = b.mult as i64;
        let curve = &mut out.curves[i];
        curve.k_deg += m;
        curve.genus -= m * (m - 1) / 2;
        let self_int = curve.self_int - m * m;
        out.set_pairing_at(i, i, self_int);
    }
    for (x, (bx, &i)) in step.branches.iter().zip(&idx).enumerate() {
        for (by, &j) in step.branches[x + 1..].iter().zip(&idx[x + 1..]) {
            let v = out.pairing_at(i, j) - bx.mult as i64 * by.mult as i64;
            out.set_pairing_at(i, j, v);
        }
    }

    let e = out
        .push_curve(CurveClass::new(label.clone(), -1, 0, -1).with_tag(EXCEPTIONAL_TAG))
        .expect("label checked above");
    for (b, &i) in step.branches.iter().zip(&idx) {
        out.set_pairing_at(i, e, b.mult as i64);
    }
    out.blowup_count += 1;

    if !step.branches.is_empty() {
        let key = PointSpec::branch_key(&step.branches);
        if let Some(pos) = out
            .points
            .iter()
            .position(|p| PointSpec::branch_key(&p.branches) == key)
        {
            out.points.remove(pos);
        }
    }
    for b in &step.branches {
        for k in 1..=b.mult {
            let name = if b.mult == 1 {
                format!("{label}.{}", b.curve)
            } else {
                format!("{label}.{}.{k}", b.curve)
            };
            out.points.push(PointSpec::crossing(name, &b.curve, &label));
        }
    }
    Ok(out)
}

/// Apply `steps` in order.
pub fn apply_blowups(c: &Configuration, steps: &[BlowupStep]) -> Result<Configuration, StepError> {
    let mut cur = c.clone();
    for (index, step) in steps.iter().enumerate() {
        cur = blow_up(&cur, step).map_err(|source| StepError { index, source })?;
    }
    Ok(cur)
}

/// The configuration before any step, then after each step.
pub fn stages(c: &Configuration, steps: &[BlowupStep]) -> Result<Vec<Configuration>, StepError> {
    let mut out = Vec::with_capacity(steps.len() + 1);
    out.push(c.clone());
    for (index, step) in steps.iter().enumerate() {
        let next =
            blow_up(out.last().unwrap(), step).map_err(|source| StepError { index, source })?;
        out.push(next);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{validate, SurfaceInvariants};

    fn base() -> Configuration {
        Configuration::new(
            SurfaceInvariants::enriques(),
            vec![
                CurveClass::minus_two("A"),
                CurveClass::minus_two("B"),
                CurveClass::new("F", 0, 1, 0),
                CurveClass::minus_two("Far"),
            ],
        )
        .unwrap()
        .with_pair("A", "B", 1)
        .unwrap()
        .with_pair("A", "F", 2)
        .unwrap()
        .with_point(PointSpec::crossing("P", "A", "B"))
        .with_point(PointSpec::node("N", "F"))
        .with_point(PointSpec::crossing("Q", "A", "F"))
    }

    #[test]
    fn node_blowup() {
        let c = blow_up(&base(), &BlowupStep::new(&[("F", 2)]).labeled("E")).unwrap();
        let f = c.curve("F").unwrap();
        assert_eq!((f.self_int, f.k_deg, f.genus), (-4, 2, 0));
        assert_eq!(c.pair("F", "E").unwrap(), 2);
        assert_eq!(c.pair("A", "F").unwrap(), 2);
        assert!(c.points.iter().all(|p| p.name != "N"));
        assert_eq!(c.declared_intersection("F", "E"), 2);
        assert_eq!(c.ambient_k2(), -1);
        assert!(validate(&c).is_empty(), "{:?}", validate(&c));
    }

    #[test]
    fn crossing_blowup() {
        let c = blow_up(&base(), &BlowupStep::crossing("A", "B")).unwrap();
        for n in ["A", "B"] {
            let x = c.curve(n).unwrap();
            assert_eq!((x.self_int, x.k_deg, x.genus), (-3, 1, 0));
            assert_eq!(c.pair(n, "e1").unwrap(), 1);
        }
        assert_eq!(c.pair("A", "B").unwrap(), 0);
        assert_eq!(c.pair("Far", "e1").unwrap(), 0);
        let e = c.curve("e1").unwrap();
        assert_eq!((e.self_int, e.k_deg, e.genus), (-1, -1, 0));
        assert!(e.tags.contains(EXCEPTIONAL_TAG));
        // P consumed, Q kept
        let names: Vec<_> = c.points.iter().map(|p| p.name.as_str()).collect();
        assert_eq!(names, ["N", "Q", "e1.A", "e1.B"]);
    }

    #[test]
    fn empty_sequence_and_empty_point() {
        assert_eq!(apply_blowups(&base(), &[]).unwrap(), base());
        let c = blow_up(&base(), &BlowupStep::default()).unwrap();
        assert_eq!(c.len(), 5);
        assert_eq!(c.curves[..4], base().curves[..]);
        for i in 0..4 {
            assert_eq!(c.pairing_at(i, 4), 0);
            for j in 0..4 {
                assert_eq!(c.pairing_at(i, j), base().pairing_at(i, j));
            }
        }
        assert_eq!(c.points, base().points);
    }

    #[test]
    fn errors() {
        let b = base();
        assert_eq!(
            blow_up(&b, &BlowupStep::crossing("A", "Z")).unwrap_err(),
            BlowupError::UnknownCurve("Z".into())
        );
        assert!(matches!(
            blow_up(&b, &BlowupStep::crossing("A", "Far")).unwrap_err(),
            BlowupError::ExcessMultiplicity { .. }
        ));
        assert!(matches!(
            blow_up(&b, &BlowupStep::new(&[("A", 2)])).unwrap_err(),
            BlowupError::NegativeGenus { .. }
        ));
        assert!(matches!(
            blow_up(&b, &BlowupStep::new(&[("A", 1), ("A", 1)])).unwrap_err(),
            BlowupError::RepeatedBranch { .. }
        ));
        assert!(matches!(
            blow_up(&b, &BlowupStep::crossing("A", "B").labeled("Far")).unwrap_err(),
            BlowupError::DuplicateLabel(_)
        ));
        let steps = [
            BlowupStep::crossing("A", "B"),
            BlowupStep::crossing("A", "B"),
        ];
        let err = apply_blowups(&b, &steps).unwrap_err();
        assert_eq!(err.index, 1);
    }

    #[test]
    fn infinitely_near_points() {
        // three times along A at its crossing with F
        let steps = [
            BlowupStep::crossing("A", "F"),
            BlowupStep::crossing("e1", "A"),
            BlowupStep::crossing("e2", "A"),
        ];
        let all = stages(&base(), &steps).unwrap();
        assert_eq!(all.len(), 4);
        let c = all.last().unwrap();
        assert_eq!(c.curve("A").unwrap().self_int, -5);
        assert_eq!(c.curve("e1").unwrap().self_int, -2);
        assert_eq!(c.curve("e2").unwrap().self_int, -2);
        assert_eq!(c.pair("e1", "e2").unwrap(), 1);
        assert_eq!(c.pair("A", "F").unwrap(), 1);
        assert_eq!(c.ambient_k2(), -3);
        assert!(validate(c).is_empty(), "{:?}", validate(c));
    }
}
