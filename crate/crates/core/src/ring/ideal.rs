use std::collections::{BTreeSet, VecDeque};

use super::{FinCommRing, RingError};

/// An ideal of a finite ring, as a member set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RingIdeal {
    members: BTreeSet<usize>,
}

impl RingIdeal {
    pub fn new(a: &FinCommRing, members: impl IntoIterator<Item = usize>) -> Result<Self, RingError> {
        let members: BTreeSet<usize> = members.into_iter().collect();
        if let Some(&x) = members.iter().find(|&&x| x >= a.len()) {
            return Err(RingError::ElementOutOfRange(x));
        }
        if !members.contains(&a.zero()) {
            return Err(RingError::NotAnIdeal("missing 0".into()));
        }
        for &x in &members {
            if let Some(&y) = members.iter().find(|&&y| !members.contains(&a.add(x, y))) {
                return Err(RingError::NotAnIdeal(format!("{} + {} escapes", a.name(x), a.name(y))));
            }
            if let Some(r) = a.elements().find(|&r| !members.contains(&a.mul(r, x))) {
                return Err(RingError::NotAnIdeal(format!("{} · {} escapes", a.name(r), a.name(x))));
            }
        }
        Ok(RingIdeal { members })
    }

    /// The smallest ideal containing `gens`.
    pub fn generated(a: &FinCommRing, gens: impl IntoIterator<Item = usize>) -> Self {
        let mut members = BTreeSet::from([a.zero()]);
        let mut queue: VecDeque<usize> = gens.into_iter().collect();
        while let Some(x) = queue.pop_front() {
            if !members.insert(x) {
                continue;
            }
            let snapshot: Vec<usize> = members.iter().copied().collect();
            for y in snapshot {
                queue.push_back(a.add(x, y));
            }
            queue.push_back(a.neg(x));
            for r in a.elements() {
                queue.push_back(a.mul(r, x));
            }
        }
        RingIdeal { members }
    }

    pub fn members(&self) -> &BTreeSet<usize> {
        &self.members
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.contains(&x)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_proper(&self, a: &FinCommRing) -> bool {
        !self.contains(a.one())
    }

    /// `A/I` is an integral domain.
    pub fn is_prime(&self, a: &FinCommRing) -> bool {
        self.is_proper(a) && self.quotient(a).is_integral_domain()
    }

    pub fn is_maximal(&self, a: &FinCommRing) -> bool {
        self.is_proper(a)
            && ideals(a)
                .iter()
                .all(|j| !j.is_proper(a) || !self.members.is_subset(&j.members) || j == self)
    }

    /// `A/I`, with cosets numbered by their least member.
    pub fn quotient(&self, a: &FinCommRing) -> FinCommRing {
        let n = a.len();
        let mut class = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for x in 0..n {
            if class[x] == usize::MAX {
                let c = reps.len();
                reps.push(x);
                for &i in &self.members {
                    class[a.add(x, i)] = c;
                }
            }
        }
        if reps.len() == 1 {
            return FinCommRing::zero_ring();
        }
        let k = reps.len();
        let names = reps.iter().map(|&r| format!("[{}]", a.name(r))).collect();
        let add = (0..k * k).map(|i| class[a.add(reps[i / k], reps[i % k])]).collect();
        let mul = (0..k * k).map(|i| class[a.mul(reps[i / k], reps[i % k])]).collect();
        FinCommRing::from_tables(names, add, mul).expect("quotient of a ring by a proper ideal")
    }

    /// `(g)` for the least-index principal generator, else the member list.
    pub fn display(&self, a: &FinCommRing) -> String {
        match a.elements().find(|&g| RingIdeal::generated(a, [g]) == *self) {
            Some(g) => format!("({})", a.name(g)),
            None => {
                let parts: Vec<&str> = self.members.iter().map(|&x| a.name(x)).collect();
                format!("{{{}}}", parts.join(","))
            }
        }
    }
}

/// The complete ideal lattice, by closure from `{0}`: each known ideal is
/// extended by every element outside it until no new ideal appears.
/// Sorted by size, then members.
pub fn ideals(a: &FinCommRing) -> Vec<RingIdeal> {
    let zero = RingIdeal::generated(a, []);
    let mut found = BTreeSet::from([zero.clone()]);
    let mut queue = VecDeque::from([zero]);
    while let Some(i) = queue.pop_front() {
        for x in a.elements().filter(|x| !i.contains(*x)) {
            let j = RingIdeal::generated(a, i.members.iter().copied().chain([x]));
            if found.insert(j.clone()) {
                queue.push_back(j);
            }
        }
    }
    let mut out: Vec<RingIdeal> = found.into_iter().collect();
    out.sort_by(|x, y| (x.len(), &x.members).cmp(&(y.len(), &y.members)));
    out
}

/// Both characterizations of a local ring, computed independently.
#[derive(Clone, Debug)]
pub struct Locality {
    /// `0 ≠ 1` and a sum of non-units is a non-unit.
    pub nonunits_closed: bool,
    /// Non-units `(x, y)` whose sum is a unit, when the first test fails.
    pub witness: Option<(usize, usize)>,
    pub maximal_ideals: Vec<RingIdeal>,
}

impl Locality {
    pub fn unique_maximal(&self) -> bool {
        self.maximal_ideals.len() == 1
    }

    pub fn agree(&self) -> bool {
        self.nonunits_closed == self.unique_maximal()
    }

    pub fn is_local(&self) -> bool {
        self.nonunits_closed && self.unique_maximal()
    }
}

pub fn locality(a: &FinCommRing) -> Locality {
    let nonunits: Vec<usize> = a.elements().filter(|&x| !a.is_unit(x)).collect();
    let witness = nonunits
        .iter()
        .flat_map(|&x| nonunits.iter().map(move |&y| (x, y)))
        .find(|&(x, y)| a.is_unit(a.add(x, y)));
    let all = ideals(a);
    let maximal_ideals = all
        .iter()
        .filter(|i| {
            i.is_proper(a) && all.iter().all(|j| !j.is_proper(a) || j == *i || !i.members.is_subset(&j.members))
        })
        .cloned()
        .collect();
    Locality {
        nonunits_closed: !a.is_zero_ring() && witness.is_none(),
        witness,
        maximal_ideals,
    }
}

/// Non-units closed under addition, with `0 ≠ 1`.
pub fn is_local(a: &FinCommRing) -> bool {
    locality(a).nonunits_closed
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sets(a: &FinCommRing) -> Vec<Vec<usize>> {
        ideals(a).into_iter().map(|i| i.members.into_iter().collect()).collect()
    }

    #[test]
    fn ideals_of_field() {
        let f = FinCommRing::zmod(5);
        assert_eq!(sets(&f), vec![vec![0], vec![0, 1, 2, 3, 4]]);
        assert_eq!(ideals(&FinCommRing::f4()).len(), 2);
    }

    #[test]
    fn ideals_of_z6_and_z12() {
        let z6 = FinCommRing::zmod(6);
        assert_eq!(sets(&z6), vec![vec![0], vec![0, 3], vec![0, 2, 4], (0..6).collect()]);
        let z12 = FinCommRing::zmod(12);
        let names: Vec<String> = ideals(&z12).iter().map(|i| i.display(&z12)).collect();
        assert_eq!(names, vec!["(0)", "(6)", "(4)", "(3)", "(2)", "(1)"]);
    }

    #[test]
    fn ideal_validation() {
        let z6 = FinCommRing::zmod(6);
        assert!(RingIdeal::new(&z6, [0, 3]).is_ok());
        assert!(RingIdeal::new(&z6, [0, 2]).is_err());
        assert!(RingIdeal::new(&z6, [3]).is_err());
    }

    #[test]
    fn prime_and_maximal() {
        let z4 = FinCommRing::zmod(4);
        let zero = RingIdeal::generated(&z4, []);
        assert!(!zero.is_prime(&z4));
        let two = RingIdeal::generated(&z4, [2]);
        assert!(two.is_prime(&z4) && two.is_maximal(&z4));
        let z12 = FinCommRing::zmod(12);
        let four = RingIdeal::generated(&z12, [4]);
        assert!(!four.is_prime(&z12));
    }

    #[test]
    fn locality_examples() {
        let z4 = locality(&FinCommRing::zmod(4));
        assert!(z4.nonunits_closed && z4.unique_maximal());
        let z6 = locality(&FinCommRing::zmod(6));
        assert!(!z6.nonunits_closed);
        assert_eq!(z6.maximal_ideals.len(), 2);
        assert_eq!(z6.witness, Some((2, 3)));
        assert!(is_local(&FinCommRing::f4()));
        assert!(!is_local(&FinCommRing::zero_ring()));
    }

    #[test]
    fn criteria_agree_on_small_rings() {
        let mut rings: Vec<FinCommRing> = (2..=30).map(FinCommRing::zmod).collect();
        rings.push(FinCommRing::f4());
        rings.push(FinCommRing::dual_numbers(2));
        rings.push(FinCommRing::dual_numbers(4));
        rings.push(FinCommRing::zmod(2).product(&FinCommRing::zmod(2)));
        for r in &rings {
            assert!(locality(r).agree(), "{:?}", r.names());
        }
    }

    #[test]
    fn quotient_ring() {
        let z12 = FinCommRing::zmod(12);
        let q = RingIdeal::generated(&z12, [4]).quotient(&z12);
        assert_eq!(q.len(), 4);
        assert!(crate::algebra::find_isomorphism(&q, &FinCommRing::zmod(4)).is_some());
    }
}
