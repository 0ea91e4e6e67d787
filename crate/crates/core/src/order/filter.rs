use std::collections::BTreeSet;

use super::heyting::HeytingAlgebra;
use super::lattice::{DistLattice, Lattice, LatticeHom};
use super::OrderError;

/// An upward-closed, meet-closed, nonempty set of lattice elements.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Filter {
    members: BTreeSet<usize>,
}

/// A downward-closed, join-closed, nonempty set of lattice elements.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ideal {
    members: BTreeSet<usize>,
}

impl Filter {
    pub fn new(l: &Lattice, members: impl IntoIterator<Item = usize>) -> Result<Self, OrderError> {
        let members: BTreeSet<usize> = members.into_iter().collect();
        if members.is_empty() {
            return Err(OrderError::NotAFilter("empty".into()));
        }
        if let Some(&x) = members.iter().find(|&&x| x >= l.len()) {
            return Err(OrderError::ElementOutOfRange(x));
        }
        for &x in &members {
            if let Some(y) = l.elements().find(|&y| l.leq(x, y) && !members.contains(&y)) {
                return Err(OrderError::NotAFilter(format!(
                    "not upward closed: {} ≤ {}",
                    l.name(x),
                    l.name(y)
                )));
            }
            if let Some(&y) = members.iter().find(|&&y| !members.contains(&l.meet(x, y))) {
                return Err(OrderError::NotAFilter(format!(
                    "not meet closed: {} ∧ {}",
                    l.name(x),
                    l.name(y)
                )));
            }
        }
        Ok(Filter { members })
    }

    /// `↑x`
    pub fn principal(l: &Lattice, x: usize) -> Self {
        Filter {
            members: l.elements().filter(|&y| l.leq(x, y)).collect(),
        }
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

    pub fn is_proper(&self, l: &Lattice) -> bool {
        !self.contains(l.bot())
    }

    pub fn is_prime(&self, l: &Lattice) -> bool {
        self.contains(l.top())
            && self.is_proper(l)
            && l.elements().all(|x| {
                l.elements()
                    .all(|y| !self.contains(l.join(x, y)) || self.contains(x) || self.contains(y))
            })
    }

    /// The set-theoretic complement, an ideal when `self` is prime.
    pub fn complement(&self, l: &Lattice) -> Ideal {
        Ideal {
            members: l.elements().filter(|x| !self.contains(*x)).collect(),
        }
    }

    pub fn display(&self, l: &Lattice) -> String {
        display_set(l, &self.members)
    }
}

impl Ideal {
    pub fn new(l: &Lattice, members: impl IntoIterator<Item = usize>) -> Result<Self, OrderError> {
        let members: BTreeSet<usize> = members.into_iter().collect();
        if members.is_empty() {
            return Err(OrderError::NotAnIdeal("empty".into()));
        }
        if let Some(&x) = members.iter().find(|&&x| x >= l.len()) {
            return Err(OrderError::ElementOutOfRange(x));
        }
        for &x in &members {
            if l.elements().any(|y| l.leq(y, x) && !members.contains(&y)) {
                return Err(OrderError::NotAnIdeal(format!("not downward closed at {}", l.name(x))));
            }
            if members.iter().any(|&y| !members.contains(&l.join(x, y))) {
                return Err(OrderError::NotAnIdeal(format!("not join closed at {}", l.name(x))));
            }
        }
        Ok(Ideal { members })
    }

    /// `↓x`
    pub fn principal(l: &Lattice, x: usize) -> Self {
        Ideal {
            members: l.elements().filter(|&y| l.leq(y, x)).collect(),
        }
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

    pub fn is_prime(&self, l: &Lattice) -> bool {
        self.contains(l.bot())
            && !self.contains(l.top())
            && l.elements().all(|x| {
                l.elements()
                    .all(|y| !self.contains(l.meet(x, y)) || self.contains(x) || self.contains(y))
            })
    }

    pub fn complement(&self, l: &Lattice) -> Filter {
        Filter {
            members: l.elements().filter(|x| !self.contains(*x)).collect(),
        }
    }

    pub fn display(&self, l: &Lattice) -> String {
        display_set(l, &self.members)
    }
}

fn display_set(l: &Lattice, s: &BTreeSet<usize>) -> String {
    let parts: Vec<&str> = s.iter().map(|&x| l.name(x)).collect();
    format!("{{{}}}", parts.join(","))
}

fn sort_by_size<T: Ord>(v: &mut [(usize, T)]) {
    v.sort();
}

/// All filters of a finite lattice, ordered by size then members.
///
/// A nonempty meet-closed subset of a finite lattice contains the meet of its
/// members, so every filter is principal and `↑x` ranges over all of them.
pub fn filters(l: &Lattice) -> Vec<Filter> {
    let mut v: Vec<(usize, Filter)> = l
        .elements()
        .map(|x| Filter::principal(l, x))
        .map(|f| (f.len(), f))
        .collect();
    sort_by_size(&mut v);
    v.into_iter().map(|(_, f)| f).collect()
}

pub fn prime_filters(l: &Lattice) -> Vec<Filter> {
    filters(l).into_iter().filter(|f| f.is_prime(l)).collect()
}

/// Prime ideals, ordered by size then members.
pub fn prime_ideals(l: &Lattice) -> Vec<Ideal> {
    let mut v: Vec<(usize, Ideal)> = l
        .elements()
        .map(|x| Ideal::principal(l, x))
        .filter(|i| i.is_prime(l))
        .map(|i| (i.len(), i))
        .collect();
    sort_by_size(&mut v);
    v.into_iter().map(|(_, i)| i).collect()
}

/// `x ↦ {F prime : x ∈ F}`, as a table of prime-filter index sets.
pub fn prime_filter_representation(l: &Lattice) -> (Vec<Filter>, Vec<BTreeSet<usize>>) {
    let primes = prime_filters(l);
    let rep = l
        .elements()
        .map(|x| (0..primes.len()).filter(|&i| primes[i].contains(x)).collect())
        .collect();
    (primes, rep)
}

/// The quotient `H/F` together with its projection.
#[derive(Clone, Debug)]
pub struct FilterQuotient {
    pub algebra: HeytingAlgebra,
    pub projection: LatticeHom,
}

/// Quotient by the congruence `x ~ y` iff `x ∧ r = y ∧ r` for some `r ∈ F`.
///
/// Classes are numbered by their least member. Quotienting by an improper
/// filter collapses everything and is rejected as degenerate.
pub fn quotient_by_filter(h: &HeytingAlgebra, f: &Filter) -> Result<FilterQuotient, OrderError> {
    let l: &Lattice = h;
    let f = Filter::new(l, f.members().iter().copied())?;
    let n = l.len();
    let congruent = |x: usize, y: usize| f.members().iter().any(|&r| l.meet(x, r) == l.meet(y, r));
    let mut class = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for x in 0..n {
        if class[x] == usize::MAX {
            let c = reps.len();
            reps.push(x);
            for y in x..n {
                if congruent(x, y) {
                    class[y] = c;
                }
            }
        }
    }
    let names = reps.iter().map(|&r| l.name(r).to_string()).collect();
    let k = reps.len();
    let quotient = Lattice::from_fn(
        names,
        |a, b| class[l.meet(reps[a], reps[b])],
        |a, b| class[l.join(reps[a], reps[b])],
    )?;
    let imp = (0..k * k).map(|i| class[h.imp(reps[i / k], reps[i % k])]).collect();
    let algebra = HeytingAlgebra::with_implication(DistLattice::new(quotient)?, imp)?;
    Ok(FilterQuotient {
        algebra,
        projection: LatticeHom { map: class },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::find_isomorphism;
    use crate::order::{downset_lattice, heyting_from_lattice, FinPoset};

    /// Every nonempty upward-closed, meet-closed subset, found by subset enumeration.
    fn brute_filters(l: &Lattice) -> BTreeSet<BTreeSet<usize>> {
        let n = l.len();
        (1u64..(1 << n))
            .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect::<BTreeSet<usize>>())
            .filter(|s| {
                s.iter().all(|&x| l.elements().all(|y| !l.leq(x, y) || s.contains(&y)))
                    && s.iter().all(|&x| s.iter().all(|&y| s.contains(&l.meet(x, y))))
            })
            .collect()
    }

    fn brute_prime_filters(l: &Lattice) -> BTreeSet<BTreeSet<usize>> {
        brute_filters(l)
            .into_iter()
            .filter(|s| {
                !s.contains(&l.bot())
                    && l.elements().all(|x| {
                        l.elements().all(|y| !s.contains(&l.join(x, y)) || s.contains(&x) || s.contains(&y))
                    })
            })
            .collect()
    }

    fn h(l: Lattice) -> HeytingAlgebra {
        heyting_from_lattice(DistLattice::new(l).unwrap())
    }

    fn corpus() -> Vec<DistLattice> {
        (1..=4)
            .flat_map(FinPoset::all_up_to_iso)
            .map(|p| downset_lattice(&p).unwrap())
            .collect()
    }

    #[test]
    fn prime_filters_of_small_lattices() {
        let two = Lattice::two();
        assert_eq!(prime_filters(&two).iter().map(|f| f.members().clone()).collect::<Vec<_>>(), vec![BTreeSet::from([1])]);
        let c3 = Lattice::chain(3);
        let pf: Vec<_> = prime_filters(&c3).into_iter().map(|f| f.members().clone()).collect();
        assert_eq!(pf, vec![BTreeSet::from([2]), BTreeSet::from([1, 2])]);
        let b4 = Lattice::powerset(2);
        let pf: Vec<_> = prime_filters(&b4).into_iter().map(|f| f.members().clone()).collect();
        assert_eq!(pf, vec![BTreeSet::from([1, 3]), BTreeSet::from([2, 3])]);
    }

    #[test]
    fn enumeration_matches_subset_oracle() {
        for l in corpus() {
            let fast: BTreeSet<_> = filters(&l).into_iter().map(|f| f.members().clone()).collect();
            assert_eq!(fast, brute_filters(&l));
            let fast: BTreeSet<_> = prime_filters(&l).into_iter().map(|f| f.members().clone()).collect();
            assert_eq!(fast, brute_prime_filters(&l));
        }
    }

    #[test]
    fn prime_ideals_are_complements_of_prime_filters() {
        for l in corpus() {
            let a: BTreeSet<_> = prime_ideals(&l).into_iter().collect();
            let b: BTreeSet<_> = prime_filters(&l).iter().map(|f| f.complement(&l)).collect();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn rejects_non_filters() {
        let c3 = Lattice::chain(3);
        assert!(Filter::new(&c3, [1]).is_err());
        assert!(Filter::new(&c3, []).is_err());
        assert!(Filter::new(&c3, [1, 2]).is_ok());
        let b4 = Lattice::powerset(2);
        assert!(matches!(Filter::new(&b4, [1, 2, 3]), Err(OrderError::NotAFilter(_))));
    }

    #[test]
    fn quotient_by_top_is_identity() {
        for l in corpus() {
            let ha = heyting_from_lattice(l);
            let q = quotient_by_filter(&ha, &Filter::principal(&ha, ha.top())).unwrap();
            assert_eq!(q.algebra.len(), ha.len());
            assert_eq!(q.projection.map, (0..ha.len()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn three_chain_quotient_is_two() {
        let ha = h(Lattice::chain(3));
        let q = quotient_by_filter(&ha, &Filter::new(&ha, [1, 2]).unwrap()).unwrap();
        assert_eq!(q.projection.map, vec![0, 1, 1]);
        assert!(find_isomorphism(&**q.algebra.lattice(), &Lattice::two()).is_some());
    }

    #[test]
    fn boolean_quotient_by_ultrafilter_is_two() {
        let ha = h(Lattice::powerset(2));
        let q = quotient_by_filter(&ha, &Filter::principal(&ha, 1)).unwrap();
        assert_eq!(q.algebra.len(), 2);
        assert_eq!(q.projection.map, vec![0, 1, 0, 1]);
    }

    #[test]
    fn improper_filter_degenerates() {
        let ha = h(Lattice::chain(3));
        let err = quotient_by_filter(&ha, &Filter::principal(&ha, 0)).unwrap_err();
        assert!(matches!(err, OrderError::Degenerate));
    }

    #[test]
    fn projection_preserves_heyting_operations() {
        for l in corpus() {
            let ha = heyting_from_lattice(l);
            for f in filters(&ha).into_iter().filter(|f| f.is_proper(&ha)) {
                let q = quotient_by_filter(&ha, &f).unwrap();
                let m = &q.projection.map;
                q.projection.verify(&ha, &q.algebra).unwrap();
                assert!(q.projection.is_surjective(q.algebra.len()));
                for x in ha.elements() {
                    for y in ha.elements() {
                        assert_eq!(m[ha.imp(x, y)], q.algebra.imp(m[x], m[y]));
                    }
                }
            }
        }
    }

    #[test]
    fn meet_congruence_agrees_with_biimplication() {
        for l in corpus() {
            let ha = heyting_from_lattice(l);
            for f in filters(&ha) {
                for x in ha.elements() {
                    for y in ha.elements() {
                        let by_meet = f.members().iter().any(|&r| ha.meet(x, r) == ha.meet(y, r));
                        assert_eq!(by_meet, f.contains(ha.iff(x, y)));
                    }
                }
            }
        }
    }

    #[test]
    fn prime_quotients_are_sublocal() {
        for l in corpus() {
            let ha = heyting_from_lattice(l);
            for p in prime_filters(&ha) {
                let q = quotient_by_filter(&ha, &p).unwrap();
                assert!(crate::order::is_sublocal(&q.algebra));
            }
        }
    }

    #[test]
    fn quotients_compose_along_filter_chains() {
        // (H/F)/(π F') ≅ H/F' for F ⊆ F', checked through the composite projection.
        for l in corpus().into_iter().filter(|l| l.len() <= 8) {
            let ha = heyting_from_lattice(l);
            let fs: Vec<_> = filters(&ha).into_iter().filter(|f| f.is_proper(&ha)).collect();
            for small in &fs {
                for big in fs.iter().filter(|b| small.members().is_subset(b.members())) {
                    let q1 = quotient_by_filter(&ha, small).unwrap();
                    let image: BTreeSet<usize> = big.members().iter().map(|&x| q1.projection.map[x]).collect();
                    let f2 = Filter::new(&q1.algebra, image).unwrap();
                    let q2 = quotient_by_filter(&q1.algebra, &f2).unwrap();
                    let direct = quotient_by_filter(&ha, big).unwrap();
                    assert_eq!(q2.algebra.len(), direct.algebra.len());
                    for x in ha.elements() {
                        for y in ha.elements() {
                            let composite_eq = q2.projection.map[q1.projection.map[x]]
                                == q2.projection.map[q1.projection.map[y]];
                            let direct_eq = direct.projection.map[x] == direct.projection.map[y];
                            assert_eq!(composite_eq, direct_eq);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn birkhoff_stone_representation_is_injective_hom() {
        let mut lattices: Vec<Lattice> = corpus().into_iter().map(|l| l.into_lattice()).collect();
        lattices.push(Lattice::powerset(4));
        lattices.push(Lattice::chain(20));
        for l in lattices.iter().filter(|l| l.len() <= 20) {
            let (primes, rep) = prime_filter_representation(l);
            let all: BTreeSet<usize> = (0..primes.len()).collect();
            assert_eq!(rep[l.bot()], BTreeSet::new());
            assert_eq!(rep[l.top()], all);
            for x in l.elements() {
                for y in l.elements() {
                    let meet: BTreeSet<_> = rep[x].intersection(&rep[y]).copied().collect();
                    let join: BTreeSet<_> = rep[x].union(&rep[y]).copied().collect();
                    assert_eq!(rep[l.meet(x, y)], meet);
                    assert_eq!(rep[l.join(x, y)], join);
                    if x != y {
                        assert_ne!(rep[x], rep[y]);
                    }
                }
            }
        }
    }
}
