//! Finite topological spaces presented by a basis, and presheaves of
//! algebras on such a basis.

mod presheaf;

pub use presheaf::{
    colimit_matches, colimit_stalk, CheckOutcome, ColimitStalk, GlobalSections, SheafFailure, Stalk, StalkEmbedding, StructPresheaf,
};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::algebra::{AlgebraError, AlgebraKind, HomViolation};

pub type PointSet = BTreeSet<usize>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpaceError {
    #[error("point {0} out of range")]
    PointOutOfRange(usize),
    #[error("basis does not cover point {0}")]
    NotCovering(usize),
    #[error("duplicate basis key {0:?}")]
    DuplicateKey(String),
    #[error("basic opens {0:?} and {1:?} have the same points")]
    DuplicateOpen(String, String),
    #[error("intersection of {0:?} and {1:?} is not a union of basic opens")]
    NotABasis(String, String),
    #[error("unknown basic open {0:?}")]
    UnknownOpen(String),
    #[error("expected {expected} sections, found {found}")]
    SectionCount { expected: usize, found: usize },
    #[error("section over {open:?} is a {found}, expected a {expected}")]
    KindMismatch { open: String, expected: AlgebraKind, found: AlgebraKind },
    #[error("missing restriction from {0:?} to {1:?}")]
    MissingRestriction(String, String),
    #[error("restriction from {0:?} to {1:?} given, but the second is not contained in the first")]
    NotAnInclusion(String, String),
    #[error("restriction from {from:?} to {to:?} is not a homomorphism: {violation}")]
    NotAHomomorphism { from: String, to: String, violation: HomViolation },
    #[error("restriction from {0:?} to itself is not the identity")]
    NotIdentity(String),
    #[error("restrictions {0:?} > {1:?} > {2:?} do not compose")]
    NotFunctorial(String, String, String),
    #[error("not a sheaf: {0}")]
    NotASheaf(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A basic open: a key and its point set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicOpen {
    pub key: String,
    pub points: PointSet,
}

/// A finite space given by points and a basis of opens.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinTopSpace {
    point_names: Vec<String>,
    basis: Vec<BasicOpen>,
    minimal: Vec<usize>,
}

impl FinTopSpace {
    /// Validates that the basis covers the space and that the intersection of
    /// two basic opens is a union of basic opens. Keys and point sets must be
    /// distinct.
    pub fn new(point_names: Vec<String>, basis: Vec<(String, PointSet)>) -> Result<Self, SpaceError> {
        let n = point_names.len();
        let mut keys = BTreeSet::new();
        let mut sets: BTreeMap<&PointSet, usize> = BTreeMap::new();
        for (i, (key, pts)) in basis.iter().enumerate() {
            if let Some(&p) = pts.iter().find(|&&p| p >= n) {
                return Err(SpaceError::PointOutOfRange(p));
            }
            if !keys.insert(key.as_str()) {
                return Err(SpaceError::DuplicateKey(key.clone()));
            }
            if let Some(prev) = sets.insert(pts, i) {
                return Err(SpaceError::DuplicateOpen(basis[prev].0.clone(), key.clone()));
            }
        }
        for p in 0..n {
            if !basis.iter().any(|(_, pts)| pts.contains(&p)) {
                return Err(SpaceError::NotCovering(p));
            }
        }
        // In a finite space the basis condition (each point of `a ∩ b` has a
        // basic neighbourhood inside `a ∩ b`) holds iff the intersection of
        // all basic opens around each point is itself basic.
        let minimal: Option<Vec<usize>> = (0..n)
            .map(|p| {
                let meet = basis
                    .iter()
                    .filter(|(_, b)| b.contains(&p))
                    .fold(None::<PointSet>, |acc, (_, b)| {
                        Some(match acc {
                            None => b.clone(),
                            Some(s) => s.intersection(b).copied().collect(),
                        })
                    })
                    .expect("basis covers the space");
                sets.get(&meet).copied()
            })
            .collect();
        let Some(minimal) = minimal else {
            for (ka, a) in &basis {
                for (kb, b) in &basis {
                    let meet: PointSet = a.intersection(b).copied().collect();
                    let covered: PointSet = basis
                        .iter()
                        .filter(|(_, c)| c.is_subset(&meet))
                        .flat_map(|(_, c)| c.iter().copied())
                        .collect();
                    if covered != meet {
                        return Err(SpaceError::NotABasis(ka.clone(), kb.clone()));
                    }
                }
            }
            unreachable!("some minimal neighbourhood is not basic");
        };
        let basis: Vec<BasicOpen> = basis.into_iter().map(|(key, points)| BasicOpen { key, points }).collect();
        Ok(FinTopSpace {
            point_names,
            basis,
            minimal,
        })
    }

    pub fn discrete(n: usize) -> Self {
        let names: Vec<String> = (0..n).map(|p| p.to_string()).collect();
        let basis = (0u64..1 << n)
            .map(|m| {
                let pts: PointSet = (0..n).filter(|&p| m >> p & 1 == 1).collect();
                let parts: Vec<&str> = pts.iter().map(|&p| names[p].as_str()).collect();
                (format!("{{{}}}", parts.join(",")), pts)
            })
            .collect();
        Self::new(names, basis).expect("discrete space")
    }

    /// Points `o` (open) and `c` (closed); opens `∅`, `{o}`, `{o,c}`.
    pub fn sierpinski() -> Self {
        Self::new(
            vec!["o".into(), "c".into()],
            vec![
                ("{}".into(), PointSet::new()),
                ("{o}".into(), PointSet::from([0])),
                ("{o,c}".into(), PointSet::from([0, 1])),
            ],
        )
        .expect("Sierpinski space")
    }

    pub fn len(&self) -> usize {
        self.point_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.point_names.is_empty()
    }

    pub fn points(&self) -> std::ops::Range<usize> {
        0..self.len()
    }

    pub fn point_name(&self, p: usize) -> &str {
        &self.point_names[p]
    }

    pub fn point_names(&self) -> &[String] {
        &self.point_names
    }

    pub fn basis(&self) -> &[BasicOpen] {
        &self.basis
    }

    pub fn basic(&self, i: usize) -> &PointSet {
        &self.basis[i].points
    }

    pub fn key(&self, i: usize) -> &str {
        &self.basis[i].key
    }

    pub fn basis_index(&self, key: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.key == key)
    }

    pub fn basis_index_of_set(&self, pts: &PointSet) -> Option<usize> {
        self.basis.iter().position(|b| &b.points == pts)
    }

    /// The smallest open containing `p`, as a basis index.
    pub fn minimal_open(&self, p: usize) -> usize {
        self.minimal[p]
    }

    /// `p ⇝ q`: `p` lies in the closure of `{q}`, i.e. every open around `p`
    /// contains `q`.
    pub fn specializes(&self, p: usize, q: usize) -> bool {
        self.basic(self.minimal[p]).contains(&q)
    }

    /// Every open set (union of basic opens), ordered by size then members.
    pub fn opens(&self) -> Vec<PointSet> {
        let mut found = BTreeSet::from([PointSet::new()]);
        let mut frontier = vec![PointSet::new()];
        while let Some(u) = frontier.pop() {
            for b in &self.basis {
                let v: PointSet = u.union(&b.points).copied().collect();
                if found.insert(v.clone()) {
                    frontier.push(v);
                }
            }
        }
        let mut out: Vec<PointSet> = found.into_iter().collect();
        out.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        out
    }

    pub fn is_open(&self, set: &PointSet) -> bool {
        let covered: PointSet = self
            .basis
            .iter()
            .filter(|b| b.points.is_subset(set))
            .flat_map(|b| b.points.iter().copied())
            .collect();
        &covered == set
    }

    /// The subspace on `keep`, with basic opens intersected and deduplicated
    /// (the first key wins). Points are renumbered in order.
    pub fn subspace(&self, keep: &PointSet) -> FinTopSpace {
        let old: Vec<usize> = keep.iter().copied().collect();
        let names = old.iter().map(|&p| self.point_names[p].clone()).collect();
        let mut seen = BTreeSet::new();
        let mut basis = Vec::new();
        for b in &self.basis {
            let pts: PointSet = old
                .iter()
                .enumerate()
                .filter(|(_, p)| b.points.contains(p))
                .map(|(i, _)| i)
                .collect();
            if seen.insert(pts.clone()) {
                basis.push((b.key.clone(), pts));
            }
        }
        FinTopSpace::new(names, basis).expect("subspace of a finite space")
    }

    pub fn set_name(&self, set: &PointSet) -> String {
        let parts: Vec<&str> = set.iter().map(|&p| self.point_names[p].as_str()).collect();
        format!("{{{}}}", parts.join(", "))
    }

    /// The specialization order as a Hasse diagram; an edge `p -> q` means
    /// `q` lies in every open around `p`.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("digraph \"{name}\" {{\n");
        for p in self.points() {
            let _ = writeln!(out, "  p{p} [label=\"{}\"];", escape(&self.point_names[p]));
        }
        for p in self.points() {
            for q in self.points() {
                if p == q || !self.specializes(p, q) || self.specializes(q, p) {
                    continue;
                }
                let covered = self.points().any(|r| {
                    r != p
                        && r != q
                        && self.specializes(p, r)
                        && self.specializes(r, q)
                        && !self.specializes(r, p)
                        && !self.specializes(q, r)
                });
                if !covered {
                    let _ = writeln!(out, "  p{p} -> p{q};");
                }
            }
        }
        out.push_str("}\n");
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "points {}", self.len());
        for p in self.points() {
            let _ = writeln!(
                out,
                "  {}  minimal open {}",
                self.point_names[p],
                self.key(self.minimal[p])
            );
        }
        let _ = writeln!(out, "basis {}", self.basis.len());
        for b in &self.basis {
            let _ = writeln!(out, "  {} = {}", b.key, self.set_name(&b.points));
        }
        out
    }
}

pub(crate) fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_opens() {
        let d = FinTopSpace::discrete(2);
        assert_eq!(d.basic(d.minimal_open(0)), &PointSet::from([0]));
        let s = FinTopSpace::sierpinski();
        assert_eq!(s.basic(s.minimal_open(0)), &PointSet::from([0]));
        assert_eq!(s.basic(s.minimal_open(1)), &PointSet::from([0, 1]));
        assert!(s.specializes(1, 0));
        assert!(!s.specializes(0, 1));
    }

    #[test]
    fn minimal_open_is_below_every_neighbourhood() {
        for x in [FinTopSpace::discrete(3), FinTopSpace::sierpinski()] {
            for p in x.points() {
                let m = x.basic(x.minimal_open(p));
                for b in x.basis().iter().filter(|b| b.points.contains(&p)) {
                    assert!(m.is_subset(&b.points));
                }
            }
        }
    }

    #[test]
    fn rejects_bad_bases() {
        let names = vec!["a".to_string(), "b".into(), "c".into()];
        let err = FinTopSpace::new(
            names.clone(),
            vec![("ab".into(), PointSet::from([0, 1])), ("bc".into(), PointSet::from([1, 2]))],
        )
        .unwrap_err();
        assert!(matches!(err, SpaceError::NotABasis(..)));
        let err = FinTopSpace::new(names, vec![("ab".into(), PointSet::from([0, 1]))]).unwrap_err();
        assert_eq!(err, SpaceError::NotCovering(2));
    }

    #[test]
    fn opens_of_sierpinski() {
        let s = FinTopSpace::sierpinski();
        assert_eq!(s.opens().len(), 3);
        assert_eq!(FinTopSpace::discrete(3).opens().len(), 8);
        assert!(!s.is_open(&PointSet::from([1])));
    }

    #[test]
    fn dot_has_one_edge_for_sierpinski() {
        let dot = FinTopSpace::sierpinski().to_dot("S");
        assert!(dot.contains("p1 -> p0;"));
        assert_eq!(dot.matches("->").count(), 1);
    }

    #[test]
    fn subspace_dedups() {
        let s = FinTopSpace::sierpinski().subspace(&PointSet::from([1]));
        assert_eq!(s.len(), 1);
        assert_eq!(s.basis().len(), 2);
    }
}
