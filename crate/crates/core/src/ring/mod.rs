//! Finite commutative rings given by tables, their ideals, spectra,
//! localizations, and the affine structure sheaf.

mod ideal;
mod localize;
mod sheaf;
mod spectrum;

pub use ideal::{ideals, locality, is_local, Locality, RingIdeal};
pub use localize::{localize, multiplicative_closure, Localization};
pub use sheaf::{describe_ring, structure_sheaf, verify_representation, RepresentationReport, StalkReport, StructureSheaf};
pub use spectrum::{all_basic_opens, basic_open, max_spectrum, prime_spectrum, Spectrum};

use thiserror::Error;

use crate::algebra::TableAlgebra;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("table has {found} entries, expected {expected}")]
    Shape { expected: usize, found: usize },
    #[error("element {0} out of range")]
    ElementOutOfRange(usize),
    #[error("not a ring: {law} fails at {witness:?}")]
    NotARing { law: &'static str, witness: Vec<usize> },
    #[error("degenerate ring: 0 = 1")]
    Degenerate,
    #[error("not an ideal: {0}")]
    NotAnIdeal(String),
    #[error("denominator set is not multiplicative: {0}")]
    NotMultiplicative(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

/// A finite commutative unital ring on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinCommRing {
    names: Vec<String>,
    add: Vec<usize>,
    mul: Vec<usize>,
    zero: usize,
    one: usize,
    neg: Vec<usize>,
}

impl FinCommRing {
    /// Validates every ring axiom on all tuples and locates `0` and `1`.
    /// The zero ring is rejected here; see [`FinCommRing::zero_ring`].
    pub fn from_tables(names: Vec<String>, add: Vec<usize>, mul: Vec<usize>) -> Result<Self, RingError> {
        let n = names.len();
        for t in [&add, &mul] {
            if t.len() != n * n {
                return Err(RingError::Shape {
                    expected: n * n,
                    found: t.len(),
                });
            }
            if let Some(&bad) = t.iter().find(|&&v| v >= n) {
                return Err(RingError::ElementOutOfRange(bad));
            }
        }
        let a = |x: usize, y: usize| add[x * n + y];
        let m = |x: usize, y: usize| mul[x * n + y];
        let fail = |law: &'static str, witness: Vec<usize>| RingError::NotARing { law, witness };
        for x in 0..n {
            for y in 0..n {
                if a(x, y) != a(y, x) {
                    return Err(fail("commutativity of +", vec![x, y]));
                }
                if m(x, y) != m(y, x) {
                    return Err(fail("commutativity of ·", vec![x, y]));
                }
                for z in 0..n {
                    if a(a(x, y), z) != a(x, a(y, z)) {
                        return Err(fail("associativity of +", vec![x, y, z]));
                    }
                    if m(m(x, y), z) != m(x, m(y, z)) {
                        return Err(fail("associativity of ·", vec![x, y, z]));
                    }
                    if m(x, a(y, z)) != a(m(x, y), m(x, z)) {
                        return Err(fail("distributivity", vec![x, y, z]));
                    }
                }
            }
        }
        let zero = (0..n)
            .find(|&z| (0..n).all(|x| a(z, x) == x))
            .ok_or_else(|| fail("additive identity", vec![]))?;
        let one = (0..n)
            .find(|&o| (0..n).all(|x| m(o, x) == x))
            .ok_or_else(|| fail("multiplicative identity", vec![]))?;
        let mut neg = vec![0; n];
        for x in 0..n {
            neg[x] = (0..n)
                .find(|&y| a(x, y) == zero)
                .ok_or_else(|| fail("additive inverse", vec![x]))?;
        }
        if zero == one {
            return Err(RingError::Degenerate);
        }
        Ok(FinCommRing {
            names,
            add,
            mul,
            zero,
            one,
            neg,
        })
    }

    /// The one-element ring, which only arises as a localization at a
    /// nilpotent (the section over the empty open).
    pub fn zero_ring() -> Self {
        Self::zero_ring_named("0".into())
    }

    pub(crate) fn zero_ring_named(name: String) -> Self {
        FinCommRing {
            names: vec![name],
            add: vec![0],
            mul: vec![0],
            zero: 0,
            one: 0,
            neg: vec![0],
        }
    }

    pub fn zmod(n: usize) -> Self {
        assert!(n >= 2, "Z/n needs n >= 2");
        let names = (0..n).map(|i| i.to_string()).collect();
        let add = (0..n * n).map(|i| (i / n + i % n) % n).collect();
        let mul = (0..n * n).map(|i| (i / n) * (i % n) % n).collect();
        Self::from_tables(names, add, mul).expect("Z/n is a ring")
    }

    /// The field with four elements `{0, 1, a, b}`, `b = a + 1 = a²`.
    pub fn f4() -> Self {
        let names = ["0", "1", "a", "b"].map(String::from).to_vec();
        // elements as bit pairs c0 + c1·a over F_2, reduced by a² = a + 1
        let add = (0..16).map(|i| (i / 4) ^ (i % 4)).collect();
        let mul = (0..16)
            .map(|i| {
                let (x, y) = (i / 4, i % 4);
                let (x0, x1, y0, y1) = (x & 1, x >> 1, y & 1, y >> 1);
                let c0 = (x0 & y0) ^ (x1 & y1);
                let c1 = (x0 & y1) ^ (x1 & y0) ^ (x1 & y1);
                c0 | (c1 << 1)
            })
            .collect();
        Self::from_tables(names, add, mul).expect("F4 is a field")
    }

    /// `Z/m[x]/(x²)`; element `a + b·x` has index `a * m + b`.
    pub fn dual_numbers(m: usize) -> Self {
        let n = m * m;
        let names = (0..n).map(|i| format!("{}+{}x", i / m, i % m)).collect();
        let split = |i: usize| (i / m, i % m);
        let add = (0..n * n)
            .map(|i| {
                let ((a, b), (c, d)) = (split(i / n), split(i % n));
                ((a + c) % m) * m + (b + d) % m
            })
            .collect();
        let mul = (0..n * n)
            .map(|i| {
                let ((a, b), (c, d)) = (split(i / n), split(i % n));
                ((a * c) % m) * m + (a * d + b * c) % m
            })
            .collect();
        Self::from_tables(names, add, mul).expect("dual numbers form a ring")
    }

    /// Direct product; `(a, b)` has index `a * other.len() + b`.
    pub fn product(&self, other: &FinCommRing) -> FinCommRing {
        let m = other.len();
        let n = self.len() * m;
        let names = (0..n)
            .map(|i| format!("({},{})", self.names[i / m], other.names[i % m]))
            .collect();
        let add = (0..n * n)
            .map(|i| {
                let (x, y) = (i / n, i % n);
                self.add(x / m, y / m) * m + other.add(x % m, y % m)
            })
            .collect();
        let mul = (0..n * n)
            .map(|i| {
                let (x, y) = (i / n, i % n);
                self.mul(x / m, y / m) * m + other.mul(x % m, y % m)
            })
            .collect();
        Self::from_tables(names, add, mul).expect("product of rings")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_zero_ring(&self) -> bool {
        self.zero == self.one
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.len()
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

    pub fn add(&self, x: usize, y: usize) -> usize {
        self.add[x * self.len() + y]
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.mul[x * self.len() + y]
    }

    pub fn neg(&self, x: usize) -> usize {
        self.neg[x]
    }

    pub fn sub(&self, x: usize, y: usize) -> usize {
        self.add(x, self.neg(y))
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn one(&self) -> usize {
        self.one
    }

    pub fn inverse(&self, x: usize) -> Option<usize> {
        self.elements().find(|&y| self.mul(x, y) == self.one)
    }

    pub fn is_unit(&self, x: usize) -> bool {
        self.inverse(x).is_some()
    }

    pub fn units(&self) -> Vec<usize> {
        self.elements().filter(|&x| self.is_unit(x)).collect()
    }

    /// No zero divisors and `0 ≠ 1`.
    pub fn is_integral_domain(&self) -> bool {
        !self.is_zero_ring()
            && self
                .elements()
                .all(|x| self.elements().all(|y| self.mul(x, y) != self.zero || x == self.zero || y == self.zero))
    }

    pub fn add_table(&self) -> &[usize] {
        &self.add
    }

    pub fn mul_table(&self) -> &[usize] {
        &self.mul
    }
}

impl TableAlgebra for FinCommRing {
    fn size(&self) -> usize {
        self.len()
    }
    fn op_tables(&self) -> [&[usize]; 2] {
        [&self.add, &self.mul]
    }
    fn constants(&self) -> [usize; 2] {
        [self.zero, self.one]
    }
    fn element_name(&self, x: usize) -> String {
        self.names[x].clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_rings_validate() {
        for n in 2..=30 {
            let r = FinCommRing::zmod(n);
            assert_eq!(r.units().len(), (1..=n).filter(|k| num_gcd(*k, n) == 1).count());
        }
        let f4 = FinCommRing::f4();
        assert!(f4.is_integral_domain());
        assert_eq!(f4.units().len(), 3);
        let d = FinCommRing::dual_numbers(4);
        assert_eq!(d.len(), 16);
        // x² = 0
        let x = d.index_of("0+1x").unwrap();
        assert_eq!(d.mul(x, x), d.zero());
    }

    fn num_gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            num_gcd(b, a % b)
        }
    }

    #[test]
    fn rejects_non_associative_addition() {
        // Z/3 addition with one entry (and its mirror) swapped
        let mut add: Vec<usize> = (0..9).map(|i| (i / 3 + i % 3) % 3).collect();
        add[3 + 1] = 0;
        add[3] = 1;
        let mul = (0..9).map(|i| (i / 3) * (i % 3) % 3).collect();
        let err = FinCommRing::from_tables(vec!["0".into(), "1".into(), "2".into()], add, mul).unwrap_err();
        assert!(matches!(err, RingError::NotARing { .. }), "{err}");
    }

    #[test]
    fn rejects_zero_ring_from_tables() {
        assert_eq!(FinCommRing::from_tables(vec!["0".into()], vec![0], vec![0]), Err(RingError::Degenerate));
        assert!(FinCommRing::zero_ring().is_zero_ring());
    }
}
