use std::collections::BTreeSet;

use super::{FinCommRing, RingError};

/// `S⁻¹A` with its canonical map `a ↦ a/1`.
#[derive(Clone, Debug)]
pub struct Localization {
    pub denominators: BTreeSet<usize>,
    pub ring: FinCommRing,
    /// image of each element of the source ring
    pub canonical: Vec<usize>,
    /// a representative fraction `(a, s)` per element of `ring`
    pub fractions: Vec<(usize, usize)>,
}

impl Localization {
    /// The class of the fraction `a/s`.
    pub fn fraction(&self, a: usize, s: usize) -> usize {
        let r = &self.ring;
        let inv = r.inverse(self.canonical[s]).expect("denominators become units");
        r.mul(self.canonical[a], inv)
    }

    pub fn source_len(&self) -> usize {
        self.canonical.len()
    }
}

/// `{1, g, g², …}` closed under products for every generator.
pub fn multiplicative_closure(a: &FinCommRing, gens: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
    let mut s = BTreeSet::from([a.one()]);
    let mut frontier: Vec<usize> = gens.into_iter().collect();
    while let Some(g) = frontier.pop() {
        if s.insert(g) {
            let snapshot: Vec<usize> = s.iter().copied().collect();
            frontier.extend(snapshot.into_iter().map(|x| a.mul(x, g)));
        }
    }
    s
}

/// Fractions `(a, s)` modulo `(a, s) ~ (b, t)` iff `u(at − bs) = 0` for some `u ∈ S`.
pub fn localize(a: &FinCommRing, s: &BTreeSet<usize>) -> Result<Localization, RingError> {
    if !s.contains(&a.one()) {
        return Err(RingError::NotMultiplicative("1 is missing".into()));
    }
    if let Some(&x) = s.iter().find(|&&x| x >= a.len()) {
        return Err(RingError::ElementOutOfRange(x));
    }
    for &x in s {
        if let Some(&y) = s.iter().find(|&&y| !s.contains(&a.mul(x, y))) {
            return Err(RingError::NotMultiplicative(format!(
                "{} · {} = {} is missing",
                a.name(x),
                a.name(y),
                a.name(a.mul(x, y))
            )));
        }
    }
    let n = a.len();
    let equivalent = |(x, s1): (usize, usize), (y, t1): (usize, usize)| {
        let diff = a.sub(a.mul(x, t1), a.mul(y, s1));
        s.iter().any(|&u| a.mul(u, diff) == a.zero())
    };

    let mut class = vec![usize::MAX; n * n];
    let mut reps: Vec<(usize, usize)> = Vec::new();
    // images of `a/1` are numbered first, so names stay readable
    let denominators = std::iter::once(a.one()).chain(s.iter().copied().filter(|&d| d != a.one()));
    for d in denominators {
        for x in 0..n {
            let c = reps
                .iter()
                .position(|&r| equivalent(r, (x, d)))
                .unwrap_or_else(|| {
                    reps.push((x, d));
                    reps.len() - 1
                });
            class[x * n + d] = c;
        }
    }
    let cls = |x: usize, d: usize| class[x * n + d];
    let canonical: Vec<usize> = (0..n).map(|x| cls(x, a.one())).collect();
    let ring = if reps.len() == 1 {
        FinCommRing::zero_ring()
    } else {
        let k = reps.len();
        let names = reps
            .iter()
            .map(|&(x, d)| {
                if d == a.one() {
                    a.name(x).to_string()
                } else {
                    format!("{}/{}", a.name(x), a.name(d))
                }
            })
            .collect();
        let add = (0..k * k)
            .map(|i| {
                let ((x, d), (y, e)) = (reps[i / k], reps[i % k]);
                cls(a.add(a.mul(x, e), a.mul(y, d)), a.mul(d, e))
            })
            .collect();
        let mul = (0..k * k)
            .map(|i| {
                let ((x, d), (y, e)) = (reps[i / k], reps[i % k]);
                cls(a.mul(x, y), a.mul(d, e))
            })
            .collect();
        FinCommRing::from_tables(names, add, mul)?
    };
    for &d in s {
        if !ring.is_unit(canonical[d]) {
            return Err(RingError::Verification(format!("{} did not become a unit", a.name(d))));
        }
    }
    Ok(Localization {
        denominators: s.clone(),
        ring,
        canonical,
        fractions: reps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{check_homomorphism, find_isomorphism};

    /// Brute-force pair quotient: count equivalence classes of `A × S` directly.
    fn brute_order(a: &FinCommRing, s: &BTreeSet<usize>) -> usize {
        let pairs: Vec<(usize, usize)> = a.elements().flat_map(|x| s.iter().map(move |&d| (x, d))).collect();
        let mut classes: Vec<Vec<(usize, usize)>> = Vec::new();
        for p in pairs {
            let eq = |q: &(usize, usize)| {
                let diff = a.sub(a.mul(p.0, q.1), a.mul(q.0, p.1));
                s.iter().any(|&u| a.mul(u, diff) == a.zero())
            };
            match classes.iter_mut().find(|c| eq(&c[0])) {
                Some(c) => c.push(p),
                None => classes.push(vec![p]),
            }
        }
        classes.len()
    }

    #[test]
    fn units_give_identity() {
        for n in [4, 6, 12] {
            let a = FinCommRing::zmod(n);
            let s: BTreeSet<usize> = a.units().into_iter().collect();
            let loc = localize(&a, &s).unwrap();
            assert_eq!(loc.ring.len(), n);
            assert_eq!(loc.canonical, (0..n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn z6_at_two_is_z3() {
        let a = FinCommRing::zmod(6);
        let s = multiplicative_closure(&a, [2]);
        assert_eq!(s, BTreeSet::from([1, 2, 4]));
        assert_eq!(brute_order(&a, &s), 3);
        let loc = localize(&a, &s).unwrap();
        assert!(find_isomorphism(&loc.ring, &FinCommRing::zmod(3)).is_some());
        check_homomorphism(&a, &loc.ring, &loc.canonical).unwrap();
    }

    #[test]
    fn z6_away_from_prime_two_is_z2() {
        let a = FinCommRing::zmod(6);
        let s = BTreeSet::from([1, 3, 5]);
        assert_eq!(brute_order(&a, &s), 2);
        let loc = localize(&a, &s).unwrap();
        assert!(find_isomorphism(&loc.ring, &FinCommRing::zmod(2)).is_some());
    }

    #[test]
    fn nilpotent_denominator_gives_zero_ring() {
        let a = FinCommRing::zmod(4);
        let loc = localize(&a, &multiplicative_closure(&a, [2])).unwrap();
        assert!(loc.ring.is_zero_ring());
    }

    #[test]
    fn rejects_non_multiplicative_sets() {
        let a = FinCommRing::zmod(6);
        assert!(matches!(localize(&a, &BTreeSet::from([1, 2])), Err(RingError::NotMultiplicative(_))));
        assert!(matches!(localize(&a, &BTreeSet::from([5])), Err(RingError::NotMultiplicative(_))));
    }

    #[test]
    fn canonical_map_iso_iff_denominators_are_units() {
        let rings = [FinCommRing::zmod(12), FinCommRing::zmod(8), FinCommRing::dual_numbers(2)];
        for a in &rings {
            for g in a.elements() {
                let s = multiplicative_closure(a, [g]);
                let loc = localize(a, &s).unwrap();
                check_homomorphism(a, &loc.ring, &loc.canonical).unwrap();
                let iso = loc.ring.len() == a.len() && crate::algebra::is_injective(&loc.canonical);
                assert_eq!(iso, s.iter().all(|&d| a.is_unit(d)), "g = {}", a.name(g));
                assert_eq!(loc.ring.len(), if loc.ring.is_zero_ring() { 1 } else { brute_order(a, &s) });
            }
        }
    }
}
