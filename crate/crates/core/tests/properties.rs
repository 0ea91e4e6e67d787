//! Randomized invariants across the modules, each checked against a
//! brute-force computation.

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use dualis::algebra::{check_homomorphism, find_isomorphism};
use dualis::fol::consequence::random_prop;
use dualis::fol::{parse_fo, FinModel};
use dualis::lattice_spec::{basic_open as lattice_basic_open, check_slice_equalizer, sspec, verify_lattice_representation};
use dualis::order::{
    downset_lattice, heyting_from_lattice, is_sublocal, prime_filter_representation, prime_filters, quotient_by_filter,
    DistLattice, FinPoset, Lattice,
};
use dualis::prop::{heyting_validity, lindenbaum, models_of, PropTheory, Validity};
use dualis::ring::{basic_open, locality, localize, multiplicative_closure, prime_spectrum, FinCommRing};
use dualis::suite::small_rings;

/// A poset on `n` points from a random set of pairs `i < j`, so the
/// closure is acyclic.
fn poset(n: usize, mask: u32) -> FinPoset {
    let mut pairs = Vec::new();
    let mut bit = 0;
    for i in 0..n {
        for j in i + 1..n {
            if mask >> bit & 1 == 1 {
                pairs.push((i, j));
            }
            bit += 1;
        }
    }
    FinPoset::from_pairs((0..n).map(|i| format!("p{i}")).collect(), &pairs).unwrap()
}

fn lattice() -> impl Strategy<Value = DistLattice> {
    (1usize..=5, any::<u32>()).prop_map(|(n, mask)| downset_lattice(&poset(n, mask)).unwrap())
}

fn ring() -> impl Strategy<Value = FinCommRing> {
    let n = small_rings().len();
    (0..n, 0..=n).prop_map(|(i, j)| {
        let rs = small_rings();
        match rs.get(j) {
            Some((_, b)) => rs[i].1.product(b),
            None => rs[i].1.clone(),
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn residuation(l in lattice()) {
        let h = heyting_from_lattice(l.clone());
        for x in l.elements() {
            for y in l.elements() {
                for z in l.elements() {
                    prop_assert_eq!(l.leq(z, h.imp(x, y)), l.leq(l.meet(z, x), y));
                }
            }
        }
    }

    #[test]
    fn prime_filter_quotients_are_sublocal(l in lattice()) {
        let h = heyting_from_lattice(l.clone());
        for f in prime_filters(&l) {
            let q = quotient_by_filter(&h, &f).unwrap();
            prop_assert!(is_sublocal(&q.algebra));
        }
    }

    #[test]
    fn birkhoff_map_is_an_injective_hom(l in lattice()) {
        let (primes, rep) = prime_filter_representation(&l);
        let power = Lattice::powerset(primes.len());
        let map: Vec<usize> = rep.iter().map(|s| s.iter().fold(0, |m, &i| m | 1 << i)).collect();
        prop_assert!(check_homomorphism::<Lattice, Lattice>(&l, &power, &map).is_ok());
        let distinct: BTreeSet<usize> = map.iter().copied().collect();
        prop_assert_eq!(distinct.len(), l.len());
    }

    #[test]
    fn lattice_basis_identities(l in lattice(), p in any::<prop::sample::Index>(), q in any::<prop::sample::Index>()) {
        let s = sspec(&l).unwrap();
        let (p, q) = (p.index(l.len()), q.index(l.len()));
        let bp = lattice_basic_open(&s.primes, p);
        let bq = lattice_basic_open(&s.primes, q);
        let meet: BTreeSet<usize> = bp.intersection(&bq).copied().collect();
        let join: BTreeSet<usize> = bp.union(&bq).copied().collect();
        prop_assert_eq!(lattice_basic_open(&s.primes, l.meet(p, q)), meet);
        prop_assert_eq!(lattice_basic_open(&s.primes, l.join(p, q)), join);
        prop_assert!(check_slice_equalizer(&l, p, q).holds());
    }

    #[test]
    fn lattice_representation(l in lattice()) {
        let rep = verify_lattice_representation(&l).unwrap();
        prop_assert!(rep.passed(), "{}", rep.to_report().render());
    }

    #[test]
    fn ring_basis_and_locality(a in ring(), f in any::<prop::sample::Index>(), g in any::<prop::sample::Index>()) {
        let s = prime_spectrum(&a);
        let (f, g) = (f.index(a.len()), g.index(a.len()));
        let meet: BTreeSet<usize> = basic_open(&s.ideals, f).intersection(&basic_open(&s.ideals, g)).copied().collect();
        prop_assert_eq!(basic_open(&s.ideals, a.mul(f, g)), meet);
        let loc = locality(&a);
        prop_assert!(loc.agree());
        // minimal open of each point lies in every basic open around it
        for p in s.space.points() {
            let min = s.space.basic(s.space.minimal_open(p));
            for b in s.space.basis() {
                if b.points.contains(&p) {
                    prop_assert!(min.is_subset(&b.points));
                }
            }
        }
    }

    #[test]
    fn canonical_map_is_iso_iff_denominators_are_units(a in ring(), g in any::<prop::sample::Index>()) {
        let g = g.index(a.len());
        let s = multiplicative_closure(&a, [g]);
        let loc = localize(&a, &s).unwrap();
        let bijective = loc.ring.len() == a.len()
            && loc.canonical.iter().copied().collect::<BTreeSet<_>>().len() == a.len();
        prop_assert_eq!(bijective, s.iter().all(|&x| a.is_unit(x)));
    }

    #[test]
    fn lindenbaum_top_iff_true_in_all_models(seed in any::<u64>(), axioms in 0usize..=2) {
        let vars: Vec<String> = ["p", "q", "r"].map(String::from).to_vec();
        let mut rng = StdRng::seed_from_u64(seed);
        let ax = (0..axioms).map(|_| random_prop(&mut rng, &vars, 3)).collect();
        let t = PropTheory::new(vars.clone(), ax).unwrap();
        let Ok(lt) = lindenbaum(&t) else {
            prop_assert!(models_of(&t).is_empty());
            return Ok(());
        };
        for _ in 0..8 {
            let f = random_prop(&mut rng, &vars, 4);
            let all = models_of(&t).into_iter().all(|v| t.satisfies(&f, v));
            prop_assert_eq!(lt.is_top(&f), all);
        }
    }

    #[test]
    fn two_valued_heyting_validity_is_tautology(seed in any::<u64>()) {
        let vars: Vec<String> = ["p", "q", "r"].map(String::from).to_vec();
        let mut rng = StdRng::seed_from_u64(seed);
        let f = random_prop(&mut rng, &vars, 4);
        let two = heyting_from_lattice(DistLattice::new(Lattice::two()).unwrap());
        let t = PropTheory::new(vars, vec![]).unwrap();
        let taut = t.valuations().all(|v| t.satisfies(&f, v));
        prop_assert_eq!(heyting_validity(&f, &two) == Validity::Valid, taut);
    }

    #[test]
    fn definable_sets_move_with_relabelling(
        size in 1usize..=4,
        edges in any::<u16>(),
        perm in Just((0..4usize).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        let t = parse_fo("rel E 2\naxiom forall x. ~E(x,x)\naxiom forall x y. E(x,y) -> E(y,x)").unwrap();
        let mut m = FinModel::blank(std::sync::Arc::new(t.signature.clone()), size);
        let mut bit = 0;
        for i in 0..size {
            for j in i + 1..size {
                let on = edges >> bit & 1 == 1;
                m.relations[0][i * size + j] = on;
                m.relations[0][j * size + i] = on;
                bit += 1;
            }
        }
        prop_assert!(m.is_model_of(&t).unwrap());
        let perm: Vec<usize> = perm.into_iter().filter(|&x| x < size).collect();
        let n = m.relabel(&perm);
        prop_assert_eq!(m.canonical_form(), n.canonical_form());
        let vars = ["x".to_string(), "y".to_string()];
        for text in ["E(x,y)", "exists z. E(x,z) & E(z,y)", "forall z. E(x,z) -> E(y,z)", "~x = y & ~E(x,y)"] {
            let f = t.parse_formula(text).unwrap();
            let moved: BTreeSet<Vec<usize>> = m
                .solutions(&f, &vars)
                .unwrap()
                .into_iter()
                .map(|t| t.iter().map(|&a| perm[a]).collect())
                .collect();
            prop_assert_eq!(moved, n.solutions(&f, &vars).unwrap());
        }
    }
}

#[test]
fn m3_fails_some_slice_equalizer() {
    let l = Lattice::m3();
    let fails = l
        .elements()
        .flat_map(|p| l.elements().map(move |q| (p, q)))
        .any(|(p, q)| !check_slice_equalizer(&l, p, q).holds());
    assert!(fails);
}

#[test]
fn quotient_stalks_match_for_every_small_ring() {
    for (_, a) in small_rings() {
        let s = prime_spectrum(&a);
        for (p, ideal) in s.ideals.iter().enumerate() {
            let comp: BTreeSet<usize> = a.elements().filter(|&x| !ideal.contains(x)).collect();
            let direct = localize(&a, &comp).unwrap().ring;
            let u = s.space.minimal_open(p);
            let via_open = localize(&a, &multiplicative_closure(&a, [s.rep[u]])).unwrap().ring;
            assert!(find_isomorphism(&direct, &via_open).is_some());
        }
    }
}
