use super::lattice::{DistLattice, Lattice};
use super::OrderError;

/// A finite Heyting algebra: a distributive lattice with its residual `→`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeytingAlgebra {
    lattice: DistLattice,
    imp: Vec<usize>,
}

impl HeytingAlgebra {
    /// Accepts an explicit implication table if it satisfies residuation.
    pub fn with_implication(lattice: DistLattice, imp: Vec<usize>) -> Result<Self, OrderError> {
        let n = lattice.len();
        if imp.len() != n * n {
            return Err(OrderError::Shape {
                expected: n * n,
                found: imp.len(),
            });
        }
        for x in 0..n {
            for y in 0..n {
                let xy = imp[x * n + y];
                if xy >= n {
                    return Err(OrderError::ElementOutOfRange(xy));
                }
                for z in 0..n {
                    if lattice.leq(z, xy) != lattice.leq(lattice.meet(z, x), y) {
                        return Err(OrderError::NotHeyting(x, y, z));
                    }
                }
            }
        }
        Ok(HeytingAlgebra { lattice, imp })
    }

    pub fn lattice(&self) -> &DistLattice {
        &self.lattice
    }

    pub fn imp(&self, x: usize, y: usize) -> usize {
        self.imp[x * self.lattice.len() + y]
    }

    pub fn neg(&self, x: usize) -> usize {
        self.imp(x, self.lattice.bot())
    }

    pub fn imp_table(&self) -> &[usize] {
        &self.imp
    }

    /// `(x → y) ∧ (y → x)`
    pub fn iff(&self, x: usize, y: usize) -> usize {
        self.lattice.meet(self.imp(x, y), self.imp(y, x))
    }

    pub fn is_boolean(&self) -> bool {
        let l = &self.lattice;
        l.elements().all(|x| l.join(x, self.neg(x)) == l.top())
    }
}

impl std::ops::Deref for HeytingAlgebra {
    type Target = Lattice;
    fn deref(&self) -> &Lattice {
        self.lattice.lattice()
    }
}

/// `x → y` is the join of all `z` with `z ∧ x ≤ y`.
pub fn heyting_from_lattice(l: DistLattice) -> HeytingAlgebra {
    let n = l.len();
    let mut imp = vec![0; n * n];
    for x in 0..n {
        for y in 0..n {
            imp[x * n + y] = l
                .elements()
                .filter(|&z| l.leq(l.meet(z, x), y))
                .fold(l.bot(), |acc, z| l.join(acc, z));
        }
    }
    HeytingAlgebra { lattice: l, imp }
}

/// A finite Boolean algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BooleanAlgebra(HeytingAlgebra);

impl BooleanAlgebra {
    pub fn new(h: HeytingAlgebra) -> Result<Self, OrderError> {
        let l = h.lattice();
        if let Some(x) = l.elements().find(|&x| l.join(x, h.neg(x)) != l.top()) {
            return Err(OrderError::NotBoolean(x));
        }
        Ok(BooleanAlgebra(h))
    }

    pub fn from_lattice(l: Lattice) -> Result<Self, OrderError> {
        Self::new(heyting_from_lattice(DistLattice::new(l)?))
    }

    /// The powerset of an `n`-set, element index = subset bitmask.
    pub fn powerset(n: usize) -> Self {
        Self::from_lattice(Lattice::powerset(n)).expect("powerset algebra is Boolean")
    }

    pub fn heyting(&self) -> &HeytingAlgebra {
        &self.0
    }

    pub fn complement(&self, x: usize) -> usize {
        self.0.neg(x)
    }
}

impl std::ops::Deref for BooleanAlgebra {
    type Target = Lattice;
    fn deref(&self) -> &Lattice {
        self.0.lattice().lattice()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn chain3() -> HeytingAlgebra {
        heyting_from_lattice(DistLattice::new(Lattice::chain(3)).unwrap())
    }

    #[test]
    fn two_element_implication() {
        let h = heyting_from_lattice(DistLattice::new(Lattice::two()).unwrap());
        assert_eq!(h.imp(1, 0), 0);
        assert_eq!(h.imp(0, 0), 1);
        assert!(h.is_boolean());
    }

    #[test]
    fn three_chain_implication() {
        // 0 < a < 1 as indices 0 < 1 < 2; x → y = 1 if x ≤ y else y
        let h = chain3();
        assert_eq!(h.imp(2, 1), 1);
        assert_eq!(h.imp(1, 0), 0);
        assert_eq!(h.neg(1), 0);
        assert!(!h.is_boolean());
        assert!(matches!(BooleanAlgebra::new(h), Err(OrderError::NotBoolean(1))));
    }

    #[test]
    fn boolean_implication_is_material() {
        let b = BooleanAlgebra::powerset(2);
        for x in b.elements() {
            for y in b.elements() {
                // complement of a bitmask over two points
                let not_x = !x & 0b11;
                assert_eq!(b.heyting().imp(x, y), not_x | y);
            }
        }
    }

    #[test]
    fn rejects_bad_implication_table() {
        let l = DistLattice::new(Lattice::two()).unwrap();
        // claims 1 → 0 = 1
        let err = HeytingAlgebra::with_implication(l, vec![1, 1, 1, 1]).unwrap_err();
        assert!(matches!(err, OrderError::NotHeyting(1, 0, _)));
    }

    proptest! {
        #[test]
        fn residuation_on_downset_lattices(poset_idx in 0usize..24) {
            let posets: Vec<_> = (1..=4).flat_map(super::super::FinPoset::all_up_to_iso).collect();
            let l = super::super::downset_lattice(&posets[poset_idx]).unwrap();
            let h = heyting_from_lattice(l);
            for x in h.elements() {
                for y in h.elements() {
                    for z in h.elements() {
                        prop_assert_eq!(h.leq(z, h.imp(x, y)), h.leq(h.meet(z, x), y));
                    }
                }
            }
        }
    }
}
