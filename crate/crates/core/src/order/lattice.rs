use super::poset::{default_names, FinPoset};
use super::OrderError;
use crate::algebra::TableAlgebra;

/// A finite bounded lattice given by explicit meet and join tables.
///
/// The one-element lattice is representable (it shows up as the slice over
/// the bottom element); user-facing constructors that require `bot != top`
/// go through [`DistLattice`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    names: Vec<String>,
    meet: Vec<usize>,
    join: Vec<usize>,
    bot: usize,
    top: usize,
}

impl Lattice {
    /// Validates the lattice laws on every tuple and derives the bounds.
    pub fn from_tables(
        names: Vec<String>,
        meet: Vec<usize>,
        join: Vec<usize>,
    ) -> Result<Self, OrderError> {
        let n = names.len();
        if n == 0 {
            return Err(OrderError::Empty);
        }
        for t in [&meet, &join] {
            if t.len() != n * n {
                return Err(OrderError::Shape {
                    expected: n * n,
                    found: t.len(),
                });
            }
            if let Some(&bad) = t.iter().find(|&&v| v >= n) {
                return Err(OrderError::ElementOutOfRange(bad));
            }
        }
        let m = |a: usize, b: usize| meet[a * n + b];
        let j = |a: usize, b: usize| join[a * n + b];
        let fail = |law: &'static str, witness: Vec<usize>| OrderError::NotALattice { law, witness };
        for x in 0..n {
            if m(x, x) != x || j(x, x) != x {
                return Err(fail("idempotence", vec![x]));
            }
            for y in 0..n {
                if m(x, y) != m(y, x) || j(x, y) != j(y, x) {
                    return Err(fail("commutativity", vec![x, y]));
                }
                if m(x, j(x, y)) != x || j(x, m(x, y)) != x {
                    return Err(fail("absorption", vec![x, y]));
                }
                for z in 0..n {
                    if m(m(x, y), z) != m(x, m(y, z)) || j(j(x, y), z) != j(x, j(y, z)) {
                        return Err(fail("associativity", vec![x, y, z]));
                    }
                }
            }
        }
        let bot = (0..n).find(|&b| (0..n).all(|x| m(b, x) == b));
        let top = (0..n).find(|&t| (0..n).all(|x| j(t, x) == t));
        match (bot, top) {
            (Some(bot), Some(top)) => Ok(Lattice {
                names,
                meet,
                join,
                bot,
                top,
            }),
            _ => Err(fail("bounded", vec![])),
        }
    }

    /// Meets and joins computed as greatest lower and least upper bounds.
    pub fn from_poset(poset: &FinPoset) -> Result<Self, OrderError> {
        let n = poset.len();
        let mut meet = vec![0; n * n];
        let mut join = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                let lower: Vec<usize> = (0..n).filter(|&c| poset.leq(c, a) && poset.leq(c, b)).collect();
                let glb = lower.iter().copied().find(|&c| lower.iter().all(|&d| poset.leq(d, c)));
                meet[a * n + b] = glb.ok_or(OrderError::NoMeet(a, b))?;
                let upper: Vec<usize> = (0..n).filter(|&c| poset.leq(a, c) && poset.leq(b, c)).collect();
                let lub = upper.iter().copied().find(|&c| upper.iter().all(|&d| poset.leq(c, d)));
                join[a * n + b] = lub.ok_or(OrderError::NoJoin(a, b))?;
            }
        }
        Self::from_tables(poset.names().to_vec(), meet, join)
    }

    pub(crate) fn from_fn(
        names: Vec<String>,
        meet: impl Fn(usize, usize) -> usize,
        join: impl Fn(usize, usize) -> usize,
    ) -> Result<Self, OrderError> {
        let n = names.len();
        let mt = (0..n * n).map(|i| meet(i / n, i % n)).collect();
        let jt = (0..n * n).map(|i| join(i / n, i % n)).collect();
        Self::from_tables(names, mt, jt)
    }

    /// The lattice `0 < 1`.
    pub fn two() -> Self {
        Self::chain(2)
    }

    pub fn chain(n: usize) -> Self {
        Self::from_fn(default_names(n), |a, b| a.min(b), |a, b| a.max(b)).expect("chain")
    }

    /// The diamond `M3`: 0, a, b, c, 1 with pairwise meets 0 and joins 1.
    pub fn m3() -> Self {
        let names = ["0", "a", "b", "c", "1"].map(String::from).to_vec();
        Self::from_fn(
            names,
            |x, y| if x == y || y == 4 { x } else if x == 4 { y } else { 0 },
            |x, y| if x == y || y == 0 { x } else if x == 0 { y } else { 4 },
        )
        .expect("M3 is a lattice")
    }

    /// The pentagon `N5`: 0 < a < c < 1 and 0 < b < 1.
    pub fn n5() -> Self {
        let names: Vec<String> = ["0", "a", "b", "c", "1"].map(String::from).to_vec();
        let poset = FinPoset::from_pairs(names, &[(0, 1), (1, 3), (3, 4), (0, 2), (2, 4)]).unwrap();
        Self::from_poset(&poset).expect("N5 is a lattice")
    }

    /// The powerset of an `n`-set; element `i` is the subset with bitmask `i`.
    pub fn powerset(n: usize) -> Self {
        let names = (0..1usize << n).map(|m| mask_name(m as u64, n)).collect();
        Self::from_fn(names, |a, b| a & b, |a, b| a | b).expect("powerset")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn meet(&self, x: usize, y: usize) -> usize {
        self.meet[x * self.len() + y]
    }

    pub fn join(&self, x: usize, y: usize) -> usize {
        self.join[x * self.len() + y]
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.meet(x, y) == x
    }

    pub fn bot(&self) -> usize {
        self.bot
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn is_trivial(&self) -> bool {
        self.bot == self.top
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.len()
    }

    pub fn meet_tables(&self) -> &[usize] {
        &self.meet
    }

    pub fn join_tables(&self) -> &[usize] {
        &self.join
    }

    /// The principal downset `↓q` as a lattice in its own right, together
    /// with the inclusion of its elements into `self` (sorted).
    pub fn slice(&self, q: usize) -> (Lattice, Vec<usize>) {
        let elems: Vec<usize> = self.elements().filter(|&x| self.leq(x, q)).collect();
        let pos = |x: usize| elems.binary_search(&x).expect("closed under meet/join");
        let names = elems.iter().map(|&x| self.names[x].clone()).collect();
        let sub = Lattice::from_fn(
            names,
            |a, b| pos(self.meet(elems[a], elems[b])),
            |a, b| pos(self.join(elems[a], elems[b])),
        )
        .expect("a downset of a lattice is a lattice");
        (sub, elems)
    }

    /// Elements covering the bottom.
    pub fn atoms(&self) -> Vec<usize> {
        self.elements()
            .filter(|&a| {
                a != self.bot
                    && self.elements().all(|x| x == self.bot || x == a || !self.leq(x, a))
            })
            .collect()
    }

    /// Direct product; element `(a, b)` has index `a * other.len() + b`.
    pub fn product(&self, other: &Lattice) -> Lattice {
        let m = other.len();
        let names = self
            .elements()
            .flat_map(|a| other.elements().map(move |b| (a, b)))
            .map(|(a, b)| format!("({},{})", self.names[a], other.names[b]))
            .collect();
        Lattice::from_fn(
            names,
            |x, y| self.meet(x / m, y / m) * m + other.meet(x % m, y % m),
            |x, y| self.join(x / m, y / m) * m + other.join(x % m, y % m),
        )
        .expect("product of lattices")
    }
}

impl TableAlgebra for Lattice {
    fn size(&self) -> usize {
        self.len()
    }
    fn op_tables(&self) -> [&[usize]; 2] {
        [&self.meet, &self.join]
    }
    fn constants(&self) -> [usize; 2] {
        [self.bot, self.top]
    }
    fn element_name(&self, x: usize) -> String {
        self.names[x].clone()
    }
}

pub(crate) fn mask_name(mask: u64, n: usize) -> String {
    let parts: Vec<String> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| i.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

/// Outcome of [`check_distributive`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Distributivity {
    Distributive,
    /// `x ∧ (y ∨ z) != (x ∧ y) ∨ (x ∧ z)`
    Violated { x: usize, y: usize, z: usize },
}

/// Tests `x ∧ (y ∨ z) = (x ∧ y) ∨ (x ∧ z)` on every triple, reporting the first failure
/// in lexicographic order.
pub fn check_distributive(l: &Lattice) -> Distributivity {
    for x in l.elements() {
        for y in l.elements() {
            for z in l.elements() {
                if l.meet(x, l.join(y, z)) != l.join(l.meet(x, y), l.meet(x, z)) {
                    return Distributivity::Violated { x, y, z };
                }
            }
        }
    }
    Distributivity::Distributive
}

/// `bot != top` and `x ∨ y = top` implies `x = top` or `y = top`.
pub fn is_sublocal(l: &Lattice) -> bool {
    sublocality_witness(l).is_none() && !l.is_trivial()
}

/// A pair `(x, y)` of non-top elements with `x ∨ y = top`, if one exists.
pub fn sublocality_witness(l: &Lattice) -> Option<(usize, usize)> {
    let top = l.top();
    l.elements()
        .flat_map(|x| l.elements().map(move |y| (x, y)))
        .find(|&(x, y)| x != top && y != top && l.join(x, y) == top)
}

/// A finite distributive lattice with `bot != top`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistLattice(Lattice);

impl DistLattice {
    pub fn new(l: Lattice) -> Result<Self, OrderError> {
        if l.is_trivial() {
            return Err(OrderError::Degenerate);
        }
        match check_distributive(&l) {
            Distributivity::Distributive => Ok(DistLattice(l)),
            Distributivity::Violated { x, y, z } => Err(OrderError::NotDistributive(x, y, z)),
        }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.0
    }

    pub fn into_lattice(self) -> Lattice {
        self.0
    }
}

impl std::ops::Deref for DistLattice {
    type Target = Lattice;
    fn deref(&self) -> &Lattice {
        &self.0
    }
}

/// The lattice of downward-closed subsets of `p` under inclusion.
///
/// Elements are ordered by size, then by bitmask; the empty poset yields the
/// one-element lattice, which is rejected as degenerate.
pub fn downset_lattice(p: &FinPoset) -> Result<DistLattice, OrderError> {
    let downs = p.downsets();
    let pos = |s: u64| downs.iter().position(|&d| d == s).expect("downsets closed under ∩, ∪");
    let names = downs
        .iter()
        .map(|&d| {
            let parts: Vec<&str> = (0..p.len()).filter(|i| d & (1 << i) != 0).map(|i| p.names()[i].as_str()).collect();
            format!("{{{}}}", parts.join(","))
        })
        .collect();
    let l = Lattice::from_fn(names, |a, b| pos(downs[a] & downs[b]), |a, b| pos(downs[a] | downs[b]))?;
    DistLattice::new(l)
}

/// A map between finite lattices, stored as an image table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeHom {
    pub map: Vec<usize>,
}

impl LatticeHom {
    /// Checks preservation of meet, join, bottom and top.
    pub fn verify(&self, source: &Lattice, target: &Lattice) -> Result<(), OrderError> {
        crate::algebra::check_homomorphism(source, target, &self.map)
            .map_err(|w| OrderError::NotAHomomorphism(w.to_string()))
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.map.iter().all(|v| seen.insert(*v))
    }

    pub fn is_surjective(&self, target_len: usize) -> bool {
        let img: std::collections::HashSet<_> = self.map.iter().collect();
        img.len() == target_len
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_distributive(l: &Lattice) -> Option<(usize, usize, usize)> {
        let n = l.len();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if l.meet(x, l.join(y, z)) != l.join(l.meet(x, y), l.meet(x, z)) {
                        return Some((x, y, z));
                    }
                }
            }
        }
        None
    }

    #[test]
    fn chain_is_distributive() {
        assert_eq!(check_distributive(&Lattice::chain(3)), Distributivity::Distributive);
    }

    #[test]
    fn diamond_fails_with_witness_abc() {
        let m3 = Lattice::m3();
        assert_eq!(brute_distributive(&m3), Some((1, 2, 3)));
        assert_eq!(check_distributive(&m3), Distributivity::Violated { x: 1, y: 2, z: 3 });
        assert!(matches!(DistLattice::new(m3), Err(OrderError::NotDistributive(1, 2, 3))));
    }

    #[test]
    fn pentagon_fails() {
        let n5 = Lattice::n5();
        assert!(brute_distributive(&n5).is_some());
        assert!(matches!(check_distributive(&n5), Distributivity::Violated { .. }));
    }

    #[test]
    fn inconsistent_tables_are_not_a_lattice() {
        // join table of the 2-chain paired with a meet that is not absorptive
        let err = Lattice::from_tables(default_names(2), vec![0, 1, 1, 1], vec![0, 1, 1, 1]).unwrap_err();
        assert!(matches!(err, OrderError::NotALattice { .. }));
    }

    #[test]
    fn degenerate_lattice_rejected() {
        let one = Lattice::chain(1);
        assert!(matches!(DistLattice::new(one), Err(OrderError::Degenerate)));
    }

    #[test]
    fn sublocality() {
        assert!(is_sublocal(&Lattice::two()));
        for n in 2..6 {
            assert!(is_sublocal(&Lattice::chain(n)));
        }
        let four = Lattice::powerset(2);
        assert!(!is_sublocal(&four));
        assert_eq!(sublocality_witness(&four), Some((1, 2)));
    }

    #[test]
    fn downset_lattices() {
        let single = downset_lattice(&FinPoset::antichain(1)).unwrap();
        assert_eq!(single.len(), 2);
        let four = downset_lattice(&FinPoset::antichain(2)).unwrap();
        assert_eq!(four.names(), &["{}", "{0}", "{1}", "{0,1}"]);
        assert_eq!(four.atoms(), vec![1, 2]);
        let chain3 = downset_lattice(&FinPoset::chain(2)).unwrap();
        assert_eq!(chain3.len(), 3);
        assert!(crate::algebra::find_isomorphism(chain3.lattice(), &Lattice::chain(3)).is_some());
        assert!(matches!(downset_lattice(&FinPoset::antichain(0)), Err(OrderError::Degenerate)));
    }

    #[test]
    fn slices_inherit_structure() {
        let l = Lattice::powerset(2);
        let (s, incl) = l.slice(1);
        assert_eq!(incl, vec![0, 1]);
        assert_eq!(s.len(), 2);
        let (z, _) = l.slice(0);
        assert!(z.is_trivial());
    }
}
