//! Prime-ideal spectra of finite distributive lattices with the slice sheaf
//! `B_q ↦ ↓q`.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::algebra::{check_homomorphism, find_isomorphism, Algebra, AlgebraKind};
use crate::order::{
    check_distributive, heyting_from_lattice, is_sublocal, prime_ideals, quotient_by_filter, sublocality_witness,
    DistLattice, Distributivity, HeytingAlgebra, Ideal, Lattice, OrderError,
};
use crate::report::{render_map, Report};
use crate::space::{colimit_matches, colimit_stalk, CheckOutcome, FinTopSpace, PointSet, SpaceError, StructPresheaf};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeSpecError {
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

#[derive(Clone, Debug)]
pub struct SubSpectrum {
    pub lattice: DistLattice,
    /// the points, in the order of [`prime_ideals`]
    pub primes: Vec<Ideal>,
    pub space: FinTopSpace,
    /// the element `q` of each basic open `B_q`
    pub rep: Vec<usize>,
    /// basis index of `B_q` for every element `q`
    pub open_of: Vec<usize>,
    /// each section `↓q` with its elements as members of the lattice
    pub slices: Vec<(Lattice, Vec<usize>)>,
    pub sheaf: StructPresheaf,
}

/// `B_q = {P : q ∉ P}`, as indices into `primes`.
pub fn basic_open(primes: &[Ideal], q: usize) -> PointSet {
    primes.iter().enumerate().filter(|(_, p)| !p.contains(q)).map(|(i, _)| i).collect()
}

pub fn sspec(l: &DistLattice) -> Result<SubSpectrum, LatticeSpecError> {
    let primes = prime_ideals(l);
    let names = primes.iter().map(|p| p.display(l)).collect();
    let mut sets: Vec<PointSet> = Vec::new();
    let mut rep = Vec::new();
    let mut open_of = Vec::new();
    for q in l.elements() {
        let b = basic_open(&primes, q);
        match sets.iter().position(|s| *s == b) {
            Some(i) => open_of.push(i),
            None => {
                open_of.push(sets.len());
                sets.push(b);
                rep.push(q);
            }
        }
    }
    let basis = sets
        .into_iter()
        .zip(&rep)
        .map(|(pts, &q)| (format!("B_{}", l.name(q)), pts))
        .collect();
    let space = FinTopSpace::new(names, basis)?;
    let slices: Vec<(Lattice, Vec<usize>)> = rep.iter().map(|&q| l.slice(q)).collect();
    let sections = slices.iter().map(|(s, _)| Algebra::Lattice(s.clone())).collect();
    let sheaf = StructPresheaf::new(space.clone(), AlgebraKind::Lattice, sections, |u, v| {
        let (q, members_u, members_v) = (rep[v], &slices[u].1, &slices[v].1);
        Some(
            members_u
                .iter()
                .map(|&x| members_v.binary_search(&l.meet(x, q)).expect("x ∧ q lies below q"))
                .collect(),
        )
    })?;
    Ok(SubSpectrum {
        lattice: l.clone(),
        primes,
        space,
        rep,
        open_of,
        slices,
        sheaf,
    })
}

/// `q ↦ B_q` against the lattice of all opens.
#[derive(Clone, Debug)]
pub struct OpensIso {
    pub opens: Vec<PointSet>,
    /// index into `opens` of `B_q`, for each `q`
    pub map: Vec<Option<usize>>,
    pub bijective: bool,
    pub order_preserving_both_ways: bool,
}

impl OpensIso {
    pub fn holds(&self) -> bool {
        self.bijective && self.order_preserving_both_ways
    }
}

pub fn opens_iso(s: &SubSpectrum) -> OpensIso {
    let l = &s.lattice;
    let opens = s.space.opens();
    let b: Vec<PointSet> = l.elements().map(|q| basic_open(&s.primes, q)).collect();
    let map: Vec<Option<usize>> = b.iter().map(|u| opens.iter().position(|o| o == u)).collect();
    let hit: BTreeSet<usize> = map.iter().flatten().copied().collect();
    let bijective = map.iter().all(Option::is_some) && hit.len() == l.len() && opens.len() == l.len();
    let order_preserving_both_ways = l
        .elements()
        .all(|x| l.elements().all(|y| l.leq(x, y) == b[x].is_subset(&b[y])));
    OpensIso {
        opens,
        map,
        bijective,
        order_preserving_both_ways,
    }
}

/// The map `↓(p∨q) → {(a, b) ∈ ↓p × ↓q : a∧q = b∧p}`, `x ↦ (x∧p, x∧q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceEqualizer {
    pub p: usize,
    pub q: usize,
    pub domain: usize,
    pub matched_pairs: usize,
    pub injective: bool,
    pub surjective: bool,
}

impl SliceEqualizer {
    pub fn holds(&self) -> bool {
        self.injective && self.surjective
    }
}

pub fn check_slice_equalizer(l: &Lattice, p: usize, q: usize) -> SliceEqualizer {
    let top = l.join(p, q);
    let domain: Vec<usize> = l.elements().filter(|&x| l.leq(x, top)).collect();
    let pairs: BTreeSet<(usize, usize)> = l
        .elements()
        .filter(|&a| l.leq(a, p))
        .flat_map(|a| l.elements().filter(move |&b| l.leq(b, q)).map(move |b| (a, b)))
        .filter(|&(a, b)| l.meet(a, q) == l.meet(b, p))
        .collect();
    let image: BTreeSet<(usize, usize)> = domain.iter().map(|&x| (l.meet(x, p), l.meet(x, q))).collect();
    SliceEqualizer {
        p,
        q,
        domain: domain.len(),
        matched_pairs: pairs.len(),
        injective: image.len() == domain.len(),
        surjective: image == pairs,
    }
}

/// `chain of n`, `Boolean 2^k`, or the bare order.
pub fn describe_lattice(l: &Lattice) -> String {
    let n = l.len();
    let is_chain = l.elements().all(|x| l.elements().all(|y| l.leq(x, y) || l.leq(y, x)));
    if is_chain {
        return format!("chain of {n}");
    }
    let atoms = l.atoms().len();
    if atoms < usize::BITS as usize && 1usize << atoms == n && matches!(check_distributive(l), Distributivity::Distributive) {
        return format!("Boolean 2^{atoms}");
    }
    format!("lattice of order {n}")
}

#[derive(Clone, Debug)]
pub struct LatticeStalkReport {
    pub point: String,
    /// `L / P^c`
    pub quotient: HeytingAlgebra,
    pub sublocal: bool,
    pub sublocal_witness: Option<(usize, usize)>,
    /// section over the minimal open, and an isomorphism from it to the quotient
    pub stalk: Lattice,
    pub stalk_iso: Option<Vec<usize>>,
    pub colimit_agrees: bool,
}

#[derive(Clone, Debug)]
pub struct LatticeRepresentationReport {
    pub spectrum: SubSpectrum,
    pub sheaf_check: CheckOutcome,
    pub stalks: Vec<LatticeStalkReport>,
    pub gamma: Lattice,
    pub gamma_iso: Option<Vec<usize>>,
    /// `L → ∏_P L/P^c`
    pub embedding: Vec<Vec<usize>>,
    pub embedding_injective: bool,
    pub sections_into_stalks_injective: bool,
    pub opens: OpensIso,
    pub equalizer_failures: Vec<SliceEqualizer>,
    pub equalizer_pairs: usize,
    /// restrictions along `B_q ⊇ B_q'` that also preserve `→`, out of all
    pub implication_preserved: (usize, usize),
}

impl LatticeRepresentationReport {
    pub fn passed(&self) -> bool {
        self.to_report().passed()
    }

    pub fn to_report(&self) -> Report {
        let s = &self.spectrum;
        let l: &Lattice = &s.lattice;
        let mut r = Report::new(format!("lattice representation: {} (order {})", describe_lattice(l), l.len()));
        let pts: Vec<&str> = s.space.point_names().iter().map(String::as_str).collect();
        r.info(format!("spectrum: {} prime ideal(s) {}", pts.len(), pts.join(" ")));
        for (i, b) in s.space.basis().iter().enumerate() {
            r.info(format!(
                "  {} = {} section {}",
                b.key,
                s.space.set_name(&b.points),
                describe_lattice(&s.slices[i].0)
            ));
        }
        let (kept, all) = self.implication_preserved;
        r.info(format!("restrictions preserving implication: {kept}/{all}"));
        match &self.sheaf_check {
            CheckOutcome::Sheaf { covers_checked } => {
                r.check("sheaf condition", true, format!("{covers_checked} covers glue uniquely"))
            }
            CheckOutcome::Fails(f) => r.check("sheaf condition", false, f.describe(&s.sheaf)),
        }
        for st in &self.stalks {
            let q: &Lattice = &st.quotient;
            r.check(
                format!("stalk at {} is sublocal", st.point),
                st.sublocal,
                match st.sublocal_witness {
                    Some((x, y)) => format!("{} v {} = top", q.name(x), q.name(y)),
                    None => format!("L/P^c is {}", describe_lattice(q)),
                },
            );
            r.check(
                format!("stalk at {} matches the filter quotient", st.point),
                st.stalk_iso.is_some() && st.colimit_agrees,
                match &st.stalk_iso {
                    Some(m) => render_map(m, |i| st.stalk.name(i).to_string(), |j| q.name(j).to_string()),
                    None => format!("{} vs {}", describe_lattice(&st.stalk), describe_lattice(q)),
                },
            );
        }
        r.check(
            "L is isomorphic to global sections",
            self.gamma_iso.is_some(),
            match &self.gamma_iso {
                Some(m) => render_map(m, |i| l.name(i).to_string(), |j| self.gamma.name(j).to_string()),
                None => format!("Γ has order {}", self.gamma.len()),
            },
        );
        let images: Vec<String> = l
            .elements()
            .map(|e| {
                let parts: Vec<&str> = self
                    .embedding
                    .iter()
                    .zip(&self.stalks)
                    .map(|(m, st)| st.quotient.name(m[e]))
                    .collect();
                format!("{}->({})", l.name(e), parts.join(","))
            })
            .collect();
        r.check(
            "subdirect embedding into the product of stalks",
            self.embedding_injective && self.sections_into_stalks_injective,
            images.join(" "),
        );
        r.check(
            "q -> B_q is an isomorphism onto the opens",
            self.opens.holds(),
            format!("{} opens", self.opens.opens.len()),
        );
        r.check(
            "slice equalizer for all pairs",
            self.equalizer_failures.is_empty(),
            match self.equalizer_failures.first() {
                None => format!("{} pairs", self.equalizer_pairs),
                Some(e) => format!(
                    "p={} q={}: {} elements vs {} matched pairs",
                    l.name(e.p),
                    l.name(e.q),
                    e.domain,
                    e.matched_pairs
                ),
            },
        );
        r
    }
}

pub fn verify_lattice_representation(l: &DistLattice) -> Result<LatticeRepresentationReport, LatticeSpecError> {
    let h = heyting_from_lattice(l.clone());
    let spectrum = sspec(l)?;
    let f = &spectrum.sheaf;
    let sheaf_check = f.check_sheaf();

    let mut stalks = Vec::new();
    let mut embedding = Vec::new();
    for (i, p) in spectrum.primes.iter().enumerate() {
        let fq = quotient_by_filter(&h, &p.complement(l))?;
        let quotient_lattice: &Lattice = &fq.algebra;
        let stalk = f.stalk_at(i);
        let stalk_lattice = stalk.algebra.as_lattice().expect("lattice sheaf").clone();
        let stalk_iso = find_isomorphism(&stalk_lattice, quotient_lattice);
        let colim = colimit_stalk(f, i)?;
        stalks.push(LatticeStalkReport {
            point: spectrum.space.point_name(i).to_string(),
            sublocal: is_sublocal(quotient_lattice),
            sublocal_witness: sublocality_witness(quotient_lattice),
            stalk: stalk_lattice,
            stalk_iso,
            colimit_agrees: colimit_matches(&stalk, &colim),
            quotient: fq.algebra.clone(),
        });
        embedding.push(fq.projection.map);
    }

    let gs = f.global_sections()?;
    let gamma = gs.algebra.as_lattice().expect("lattice sheaf").clone();
    let gamma_iso = find_isomorphism(l.lattice(), &gamma);
    let homs_ok = embedding
        .iter()
        .zip(&stalks)
        .all(|(m, st)| check_homomorphism(l.lattice(), &*st.quotient, m).is_ok());
    let tuples: BTreeSet<Vec<usize>> = l.elements().map(|x| embedding.iter().map(|m| m[x]).collect()).collect();
    let embedding_injective = homs_ok && tuples.len() == l.len();
    let sections_into_stalks_injective = f.sections_into_stalks(&gs)?.injective;

    let opens = opens_iso(&spectrum);
    let mut equalizer_failures = Vec::new();
    let mut equalizer_pairs = 0;
    for p in l.elements() {
        for q in l.elements() {
            equalizer_pairs += 1;
            let e = check_slice_equalizer(l, p, q);
            if !e.holds() {
                equalizer_failures.push(e);
            }
        }
    }
    let implication_preserved = implication_preservation(&spectrum);

    Ok(LatticeRepresentationReport {
        spectrum,
        sheaf_check,
        stalks,
        gamma,
        gamma_iso,
        embedding,
        embedding_injective,
        sections_into_stalks_injective,
        opens,
        equalizer_failures,
        equalizer_pairs,
        implication_preserved,
    })
}

/// How many restrictions between distinct basic opens commute with the
/// implication recomputed on each slice.
pub fn implication_preservation(s: &SubSpectrum) -> (usize, usize) {
    let nb = s.slices.len();
    // the slice over the bottom is the one-element lattice, which has no
    // `DistLattice`; any map into it preserves everything
    let heyting: Vec<Option<HeytingAlgebra>> = s
        .slices
        .iter()
        .map(|(sl, _)| DistLattice::new(sl.clone()).ok().map(heyting_from_lattice))
        .collect();
    let mut kept = 0;
    let mut all = 0;
    for u in 0..nb {
        for &v in s.sheaf.below(u) {
            if u == v {
                continue;
            }
            all += 1;
            let m = s.sheaf.restriction(u, v);
            let n = s.slices[u].0.len();
            let preserved = match (&heyting[u], &heyting[v]) {
                (Some(hu), Some(hv)) => (0..n).all(|x| (0..n).all(|y| m[hu.imp(x, y)] == hv.imp(m[x], m[y]))),
                _ => true,
            };
            if preserved {
                kept += 1;
            }
        }
    }
    (kept, all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::{downset_lattice, FinPoset};

    fn dist(l: Lattice) -> DistLattice {
        DistLattice::new(l).unwrap()
    }

    #[test]
    fn spectrum_of_two() {
        let s = sspec(&dist(Lattice::two())).unwrap();
        assert_eq!(s.space.len(), 1);
        assert_eq!(describe_lattice(&s.slices[s.open_of[1]].0), "chain of 2");
    }

    #[test]
    fn three_chain_is_sierpinski() {
        let s = sspec(&dist(Lattice::chain(3))).unwrap();
        assert_eq!(s.space.len(), 2);
        assert_eq!(s.space.opens().len(), 3);
        assert!(s.sheaf.check_sheaf().is_sheaf());
        assert_eq!(s.slices[s.open_of[1]].0.len(), 2);
        assert_eq!(s.slices[s.open_of[2]].0.len(), 3);
        // stalk at the prime ideal {0} is the 2-chain
        let p = s.space.point_names().iter().position(|n| n == "{0}").unwrap();
        assert_eq!(s.sheaf.stalk_at(p).algebra.len(), 2);
    }

    #[test]
    fn boolean_square_is_discrete() {
        let l = dist(Lattice::powerset(2));
        let s = sspec(&l).unwrap();
        assert_eq!(s.space.len(), 2);
        assert_eq!(s.space.opens().len(), 4);
        for atom in l.atoms() {
            assert_eq!(s.slices[s.open_of[atom]].0.len(), 2);
        }
        assert!(opens_iso(&s).holds());
    }

    #[test]
    fn slice_equalizer_examples() {
        let c = Lattice::chain(3);
        assert!(check_slice_equalizer(&c, 1, 2).holds());
        assert!(check_slice_equalizer(&c, 1, 1).holds());
        let b = Lattice::powerset(2);
        let e = check_slice_equalizer(&b, 1, 2);
        assert!(e.holds());
        assert_eq!((e.domain, e.matched_pairs), (4, 4));
        let m3 = Lattice::m3();
        let e = check_slice_equalizer(&m3, 1, 2);
        assert!(!e.holds());
        assert_eq!((e.domain, e.matched_pairs), (5, 4));
    }

    #[test]
    fn representation_of_small_lattices() {
        for l in [Lattice::two(), Lattice::chain(3), Lattice::powerset(2)] {
            let rep = verify_lattice_representation(&dist(l)).unwrap();
            assert!(rep.passed(), "{}", rep.to_report().render());
        }
        let rep = verify_lattice_representation(&dist(Lattice::chain(3))).unwrap();
        let mut sizes: Vec<usize> = rep.stalks.iter().map(|s| s.quotient.len()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![2, 3]);
    }

    #[test]
    fn basis_identities_on_downset_corpus() {
        for n in 1..=3 {
            for p in FinPoset::all_up_to_iso(n) {
                let l = downset_lattice(&p).unwrap();
                let s = sspec(&l).unwrap();
                for x in l.elements() {
                    for y in l.elements() {
                        let (bx, by) = (basic_open(&s.primes, x), basic_open(&s.primes, y));
                        let meet: PointSet = bx.intersection(&by).copied().collect();
                        let join: PointSet = bx.union(&by).copied().collect();
                        assert_eq!(basic_open(&s.primes, l.meet(x, y)), meet);
                        assert_eq!(basic_open(&s.primes, l.join(x, y)), join);
                    }
                }
            }
        }
    }
}
