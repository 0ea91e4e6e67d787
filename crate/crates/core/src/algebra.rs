//! Finite algebras with two binary operations and two constants.
//!
//! Rings (`+`, `·`, `0`, `1`) and bounded lattices (`∧`, `∨`, `⊥`, `⊤`) share
//! this shape, which lets one sheaf engine handle both. Ring negation is
//! determined by `+`, so preserving the two tables and constants is enough
//! for a map to be a homomorphism of either kind.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::order::{Lattice, OrderError};
use crate::ring::{FinCommRing, RingError};

pub trait TableAlgebra {
    fn size(&self) -> usize;
    fn op_tables(&self) -> [&[usize]; 2];
    fn constants(&self) -> [usize; 2];
    fn element_name(&self, x: usize) -> String;

    fn op(&self, k: usize, x: usize, y: usize) -> usize {
        self.op_tables()[k][x * self.size() + y]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomViolation {
    Length { expected: usize, found: usize },
    OutOfRange(usize),
    Constant(usize),
    Operation { op: usize, x: usize, y: usize },
}

impl fmt::Display for HomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HomViolation::Length { expected, found } => {
                write!(f, "map has {found} entries, expected {expected}")
            }
            HomViolation::OutOfRange(x) => write!(f, "image {x} out of range"),
            HomViolation::Constant(k) => write!(f, "constant #{k} not preserved"),
            HomViolation::Operation { op, x, y } => {
                write!(f, "operation #{op} not preserved at ({x}, {y})")
            }
        }
    }
}

pub fn check_homomorphism<A, B>(a: &A, b: &B, map: &[usize]) -> Result<(), HomViolation>
where
    A: TableAlgebra + ?Sized,
    B: TableAlgebra + ?Sized,
{
    if map.len() != a.size() {
        return Err(HomViolation::Length {
            expected: a.size(),
            found: map.len(),
        });
    }
    if let Some(&v) = map.iter().find(|&&v| v >= b.size()) {
        return Err(HomViolation::OutOfRange(v));
    }
    for k in 0..2 {
        if map[a.constants()[k]] != b.constants()[k] {
            return Err(HomViolation::Constant(k));
        }
    }
    for op in 0..2 {
        for x in 0..a.size() {
            for y in 0..a.size() {
                if map[a.op(op, x, y)] != b.op(op, map[x], map[y]) {
                    return Err(HomViolation::Operation { op, x, y });
                }
            }
        }
    }
    Ok(())
}

pub fn is_injective(map: &[usize]) -> bool {
    let mut seen = std::collections::HashSet::new();
    map.iter().all(|v| seen.insert(*v))
}

/// Isomorphism-invariant data about one element, used to prune the search.
fn fingerprint<A: TableAlgebra + ?Sized>(a: &A, x: usize) -> Vec<usize> {
    let mut fp = Vec::with_capacity(10);
    for k in 0..2 {
        fp.push((a.constants()[k] == x) as usize);
        // tail and cycle length of x, x∘x, (x∘x)∘x, ...
        let mut seen = HashMap::new();
        let mut cur = x;
        let mut i = 0;
        while let std::collections::hash_map::Entry::Vacant(e) = seen.entry(cur) {
            e.insert(i);
            cur = a.op(k, cur, x);
            i += 1;
        }
        fp.push(seen[&cur]);
        fp.push(i - seen[&cur]);
        fp.push((0..a.size()).filter(|&y| a.op(k, x, y) == x).count());
        fp.push((0..a.size()).filter(|&y| a.op(k, x, y) == y).count());
    }
    fp
}

/// Searches for an isomorphism `a → b`.
///
/// Generators of `a` are chosen greedily; each assignment of generator images
/// is propagated through the operations and abandoned at the first clash.
pub fn find_isomorphism<A, B>(a: &A, b: &B) -> Option<Vec<usize>>
where
    A: TableAlgebra + ?Sized,
    B: TableAlgebra + ?Sized,
{
    let n = a.size();
    if n != b.size() {
        return None;
    }
    let fa: Vec<_> = (0..n).map(|x| fingerprint(a, x)).collect();
    let fb: Vec<_> = (0..n).map(|x| fingerprint(b, x)).collect();
    let mut sa = fa.clone();
    let mut sb = fb.clone();
    sa.sort();
    sb.sort();
    if sa != sb {
        return None;
    }

    let mut search = IsoSearch {
        a,
        b,
        fa,
        fb,
        map: vec![usize::MAX; n],
        used: vec![false; n],
        mapped: Vec::new(),
    };
    for k in 0..2 {
        if !search.assign(a.constants()[k], b.constants()[k]) {
            return None;
        }
    }
    if !search.propagate(0) {
        return None;
    }
    if search.solve() {
        Some(search.map)
    } else {
        None
    }
}

struct IsoSearch<'a, A: ?Sized, B: ?Sized> {
    a: &'a A,
    b: &'a B,
    fa: Vec<Vec<usize>>,
    fb: Vec<Vec<usize>>,
    map: Vec<usize>,
    used: Vec<bool>,
    mapped: Vec<usize>,
}

impl<A: TableAlgebra + ?Sized, B: TableAlgebra + ?Sized> IsoSearch<'_, A, B> {
    fn assign(&mut self, x: usize, y: usize) -> bool {
        if self.map[x] != usize::MAX {
            return self.map[x] == y;
        }
        if self.used[y] || self.fa[x] != self.fb[y] {
            return false;
        }
        self.map[x] = y;
        self.used[y] = true;
        self.mapped.push(x);
        true
    }

    fn undo(&mut self, len: usize) {
        while self.mapped.len() > len {
            let x = self.mapped.pop().unwrap();
            self.used[self.map[x]] = false;
            self.map[x] = usize::MAX;
        }
    }

    /// Closes the partial map under both operations, checking consistency.
    fn propagate(&mut self, from: usize) -> bool {
        let mut i = from;
        while i < self.mapped.len() {
            let x = self.mapped[i];
            let mut j = 0;
            while j <= i {
                let y = self.mapped[j];
                for k in 0..2 {
                    for (p, q) in [(x, y), (y, x)] {
                        let r = self.a.op(k, p, q);
                        let img = self.b.op(k, self.map[p], self.map[q]);
                        if !self.assign(r, img) {
                            return false;
                        }
                    }
                }
                j += 1;
            }
            i += 1;
        }
        true
    }

    fn solve(&mut self) -> bool {
        let Some(x) = (0..self.a.size()).find(|&x| self.map[x] == usize::MAX) else {
            return true;
        };
        let len = self.mapped.len();
        for y in 0..self.b.size() {
            if self.used[y] || self.fa[x] != self.fb[y] {
                continue;
            }
            self.assign(x, y);
            if self.propagate(len) && self.solve() {
                return true;
            }
            self.undo(len);
        }
        false
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlgebraKind {
    Ring,
    Lattice,
}

impl fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraKind::Ring => write!(f, "ring"),
            AlgebraKind::Lattice => write!(f, "lattice"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("cannot combine a {0} with a {1}")]
    KindMismatch(AlgebraKind, AlgebraKind),
    #[error("tuple set is not closed under the operations")]
    NotClosed,
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Order(#[from] OrderError),
}

/// A ring or a lattice, as carried by a structure presheaf.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Algebra {
    Ring(FinCommRing),
    Lattice(Lattice),
}

impl Algebra {
    pub fn kind(&self) -> AlgebraKind {
        match self {
            Algebra::Ring(_) => AlgebraKind::Ring,
            Algebra::Lattice(_) => AlgebraKind::Lattice,
        }
    }

    pub fn table(&self) -> &dyn TableAlgebra {
        match self {
            Algebra::Ring(r) => r,
            Algebra::Lattice(l) => l,
        }
    }

    pub fn len(&self) -> usize {
        self.table().size()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_terminal(&self) -> bool {
        self.len() == 1
    }

    pub fn name(&self, x: usize) -> String {
        self.table().element_name(x)
    }

    pub fn as_ring(&self) -> Option<&FinCommRing> {
        match self {
            Algebra::Ring(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_lattice(&self) -> Option<&Lattice> {
        match self {
            Algebra::Lattice(l) => Some(l),
            _ => None,
        }
    }

    /// Builds an algebra of the given kind from tables, validating its axioms.
    /// A single-element carrier yields the terminal algebra of that kind.
    pub fn from_tables(
        kind: AlgebraKind,
        names: Vec<String>,
        t0: Vec<usize>,
        t1: Vec<usize>,
    ) -> Result<Algebra, AlgebraError> {
        Ok(match kind {
            AlgebraKind::Ring if names.len() == 1 => Algebra::Ring(FinCommRing::zero_ring_named(names[0].clone())),
            AlgebraKind::Ring => Algebra::Ring(FinCommRing::from_tables(names, t0, t1)?),
            AlgebraKind::Lattice => Algebra::Lattice(Lattice::from_tables(names, t0, t1)?),
        })
    }

    pub fn check_hom(&self, target: &Algebra, map: &[usize]) -> Result<(), HomViolation> {
        check_homomorphism(self.table(), target.table(), map)
    }

    pub fn find_isomorphism(&self, other: &Algebra) -> Option<Vec<usize>> {
        if self.kind() != other.kind() {
            return None;
        }
        find_isomorphism(self.table(), other.table())
    }

    /// The subalgebra of `∏ parts` on the given tuples, which must be closed
    /// under the componentwise operations and contain both constants.
    pub fn from_tuples(
        kind: AlgebraKind,
        parts: &[&Algebra],
        tuples: Vec<Vec<usize>>,
    ) -> Result<Algebra, AlgebraError> {
        if let Some(p) = parts.iter().find(|p| p.kind() != kind) {
            return Err(AlgebraError::KindMismatch(kind, p.kind()));
        }
        let index: HashMap<&[usize], usize> =
            tuples.iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect();
        let n = tuples.len();
        let mut tables = [vec![0; n * n], vec![0; n * n]];
        let mut scratch = vec![0; parts.len()];
        for (k, table) in tables.iter_mut().enumerate() {
            for x in 0..n {
                for y in 0..n {
                    for (c, p) in parts.iter().enumerate() {
                        scratch[c] = p.table().op(k, tuples[x][c], tuples[y][c]);
                    }
                    table[x * n + y] = *index.get(scratch.as_slice()).ok_or(AlgebraError::NotClosed)?;
                }
            }
        }
        for k in 0..2 {
            let c: Vec<usize> = parts.iter().map(|p| p.table().constants()[k]).collect();
            if !index.contains_key(c.as_slice()) {
                return Err(AlgebraError::NotClosed);
            }
        }
        let names = tuples
            .iter()
            .map(|t| {
                let parts: Vec<String> = t.iter().zip(parts).map(|(&e, p)| p.name(e)).collect();
                format!("({})", parts.join(","))
            })
            .collect();
        let [t0, t1] = tables;
        if parts.is_empty() {
            // the empty product is the terminal algebra
            return Algebra::from_tables(kind, vec!["()".into()], vec![0], vec![0]);
        }
        Algebra::from_tables(kind, names, t0, t1)
    }

    /// Every tuple of `∏ parts`, in lexicographic order.
    pub fn product_tuples(parts: &[&Algebra]) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for p in parts {
            out = out
                .into_iter()
                .flat_map(|t| {
                    (0..p.len()).map(move |e| {
                        let mut t = t.clone();
                        t.push(e);
                        t
                    })
                })
                .collect();
        }
        out
    }

    pub fn product(kind: AlgebraKind, parts: &[&Algebra]) -> Result<Algebra, AlgebraError> {
        Algebra::from_tuples(kind, parts, Algebra::product_tuples(parts))
    }
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} of order {}", self.kind(), self.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_isomorphisms() {
        let z6 = FinCommRing::zmod(6);
        let prod = FinCommRing::zmod(2).product(&FinCommRing::zmod(3));
        let iso = find_isomorphism(&z6, &prod).expect("CRT");
        check_homomorphism(&z6, &prod, &iso).unwrap();
        assert!(find_isomorphism(&FinCommRing::zmod(4), &FinCommRing::zmod(2).product(&FinCommRing::zmod(2))).is_none());
        assert!(find_isomorphism(&FinCommRing::zmod(4), &FinCommRing::f4()).is_none());
    }

    #[test]
    fn lattice_isomorphism_respects_order() {
        let a = Lattice::powerset(3);
        let b = Lattice::two().product(&Lattice::powerset(2));
        let iso = find_isomorphism(&a, &b).unwrap();
        check_homomorphism(&a, &b, &iso).unwrap();
        assert!(find_isomorphism(&Lattice::chain(4), &Lattice::powerset(2)).is_none());
    }

    #[test]
    fn large_boolean_algebra_iso_is_fast() {
        let a = Lattice::powerset(8);
        let b = Lattice::powerset(4).product(&Lattice::powerset(4));
        let iso = find_isomorphism(&a, &b).unwrap();
        check_homomorphism(&a, &b, &iso).unwrap();
    }

    #[test]
    fn products_and_closure() {
        let z2 = Algebra::Ring(FinCommRing::zmod(2));
        let z3 = Algebra::Ring(FinCommRing::zmod(3));
        let p = Algebra::product(AlgebraKind::Ring, &[&z2, &z3]).unwrap();
        assert_eq!(p.len(), 6);
        // the diagonal of Z/2 × Z/2 is a subring; an off-diagonal pair alone is not
        let d = Algebra::from_tuples(AlgebraKind::Ring, &[&z2, &z2], vec![vec![0, 0], vec![1, 1]]).unwrap();
        assert_eq!(d.len(), 2);
        let bad = Algebra::from_tuples(AlgebraKind::Ring, &[&z2, &z2], vec![vec![0, 0], vec![1, 0]]);
        assert!(matches!(bad, Err(AlgebraError::NotClosed)));
        let l = Algebra::Lattice(Lattice::two());
        assert!(matches!(Algebra::product(AlgebraKind::Ring, &[&z2, &l]), Err(AlgebraError::KindMismatch(..))));
    }

    #[test]
    fn empty_product_is_terminal() {
        let t = Algebra::from_tuples(AlgebraKind::Lattice, &[], vec![vec![]]).unwrap();
        assert!(t.is_terminal());
    }
}
