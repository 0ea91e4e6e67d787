use std::collections::BTreeSet;

use super::{PropError, PropFormula, PropTheory, Valuation};
use crate::algebra::{check_homomorphism, is_injective, HomViolation};
use crate::order::{prime_filters, BooleanAlgebra, Filter, Lattice};
use crate::report::Report;
use crate::space::{FinTopSpace, PointSet};

/// Lindenbaum algebras are materialized, so the number of models is capped.
pub const MAX_MODELS: usize = 8;

/// The Lindenbaum algebra of a consistent theory, realized as the powerset
/// of its models; element `e` is the set of models whose bits are set in `e`.
#[derive(Clone, Debug)]
pub struct Lindenbaum {
    pub theory: PropTheory,
    pub models: Vec<Valuation>,
    pub algebra: BooleanAlgebra,
}

impl Lindenbaum {
    /// `[φ]`: the models satisfying `φ`.
    pub fn class_of(&self, f: &PropFormula) -> usize {
        self.models
            .iter()
            .enumerate()
            .filter(|(_, &v)| self.theory.satisfies(f, v))
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    pub fn is_top(&self, f: &PropFormula) -> bool {
        self.class_of(f) == self.algebra.top()
    }

    /// A disjunction of model-describing conjunctions of literals.
    pub fn representative(&self, e: usize) -> PropFormula {
        if e == self.algebra.bot() {
            return PropFormula::False;
        }
        if e == self.algebra.top() {
            return PropFormula::True;
        }
        let minterm = |v: Valuation| {
            self.theory
                .vars
                .iter()
                .enumerate()
                .map(|(i, name)| {
                    let lit = PropFormula::var(name);
                    if v.get(i) {
                        lit
                    } else {
                        PropFormula::not(lit)
                    }
                })
                .reduce(PropFormula::and)
                .unwrap_or(PropFormula::True)
        };
        (0..self.models.len())
            .filter(|i| e >> i & 1 == 1)
            .map(|i| minterm(self.models[i]))
            .reduce(PropFormula::or)
            .expect("nonempty class")
    }
}

pub fn lindenbaum(t: &PropTheory) -> Result<Lindenbaum, PropError> {
    let models = super::models_of(t);
    if models.is_empty() {
        return Err(PropError::Inconsistent);
    }
    if models.len() > MAX_MODELS {
        return Err(PropError::TooManyModels(models.len()));
    }
    Ok(Lindenbaum {
        theory: t.clone(),
        algebra: BooleanAlgebra::powerset(models.len()),
        models,
    })
}

/// Homomorphisms `B → 2` as truth tables, found by backtracking with
/// propagation through `∧`, `∨`, complement and the constants.
pub fn homs_to_two(b: &BooleanAlgebra) -> Vec<Vec<bool>> {
    fn set(v: &mut [Option<bool>], x: usize, val: bool, changed: &mut bool) -> bool {
        match v[x] {
            Some(old) => old == val,
            None => {
                v[x] = Some(val);
                *changed = true;
                true
            }
        }
    }
    fn propagate(b: &BooleanAlgebra, v: &mut [Option<bool>]) -> bool {
        loop {
            let mut changed = false;
            let assigned: Vec<(usize, bool)> =
                v.iter().enumerate().filter_map(|(x, val)| val.map(|t| (x, t))).collect();
            for &(x, vx) in &assigned {
                if !set(v, b.complement(x), !vx, &mut changed) {
                    return false;
                }
                for &(y, vy) in &assigned {
                    if !set(v, b.meet(x, y), vx && vy, &mut changed)
                        || !set(v, b.join(x, y), vx || vy, &mut changed)
                    {
                        return false;
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }
    fn search(b: &BooleanAlgebra, v: Vec<Option<bool>>, out: &mut Vec<Vec<bool>>) {
        match v.iter().position(Option::is_none) {
            None => out.push(v.into_iter().map(|t| t.expect("assigned")).collect()),
            Some(x) => {
                for val in [false, true] {
                    let mut w = v.clone();
                    w[x] = Some(val);
                    if propagate(b, &mut w) {
                        search(b, w, out);
                    }
                }
            }
        }
    }
    let mut v = vec![None; b.len()];
    v[b.bot()] = Some(false);
    let mut out = Vec::new();
    if b.bot() != b.top() {
        v[b.top()] = Some(true);
        if propagate(b, &mut v) {
            search(b, v, &mut out);
        }
    }
    out
}

/// `Spec(B)` for finite `B`, with the three point enumerations.
#[derive(Clone, Debug)]
pub struct StoneSpace {
    pub space: FinTopSpace,
    /// point `p` as the map `B → 2`
    pub points: Vec<Vec<bool>>,
    pub ultrafilters: Vec<Filter>,
    pub atoms: Vec<usize>,
    /// `b̂` for each element
    pub hat: Vec<PointSet>,
    pub enumerations_agree: bool,
}

/// Points are ordered by their atoms; the basis is `{b̂}` keyed `^name`.
pub fn stone_spec(b: &BooleanAlgebra) -> StoneSpace {
    let homs = homs_to_two(b);
    let ultrafilters = prime_filters(b);
    let atoms = b.atoms();
    let l: &Lattice = b;

    let kernel = |h: &Vec<bool>| -> BTreeSet<usize> { (0..h.len()).filter(|&x| h[x]).collect() };
    let least = |f: &BTreeSet<usize>| f.iter().copied().fold(l.top(), |acc, x| l.meet(acc, x));

    let hom_filters: BTreeSet<BTreeSet<usize>> = homs.iter().map(kernel).collect();
    let uf_sets: BTreeSet<BTreeSet<usize>> = ultrafilters.iter().map(|f| f.members().clone()).collect();
    let atom_filters: BTreeSet<BTreeSet<usize>> =
        atoms.iter().map(|&a| Filter::principal(l, a).members().clone()).collect();
    let enumerations_agree = homs.len() == ultrafilters.len()
        && homs.len() == atoms.len()
        && hom_filters == uf_sets
        && uf_sets == atom_filters
        && homs.iter().all(|h| atoms.contains(&least(&kernel(h))));

    let mut points = homs;
    points.sort_by_key(|h| atoms.iter().position(|&a| a == least(&kernel(h))));
    let names = points
        .iter()
        .map(|h| l.name(least(&kernel(h))).to_string())
        .collect();
    let hat: Vec<PointSet> = l
        .elements()
        .map(|x| (0..points.len()).filter(|&p| points[p][x]).collect())
        .collect();
    let basis = l.elements().map(|x| (format!("^{}", l.name(x)), hat[x].clone())).collect();
    let space = FinTopSpace::new(names, basis).expect("b ↦ b̂ is injective and b̂ of atoms are singletons");
    StoneSpace {
        space,
        points,
        ultrafilters,
        atoms,
        hat,
        enumerations_agree,
    }
}

/// The clopen sets of a finite space, as a Boolean algebra.
#[derive(Clone, Debug)]
pub struct Clopens {
    pub sets: Vec<PointSet>,
    pub algebra: BooleanAlgebra,
}

impl Clopens {
    pub fn index_of(&self, set: &PointSet) -> Option<usize> {
        self.sets.iter().position(|s| s == set)
    }
}

pub fn clop(x: &FinTopSpace) -> Clopens {
    let all: PointSet = x.points().collect();
    let sets: Vec<PointSet> = x
        .opens()
        .into_iter()
        .filter(|u| x.is_open(&all.difference(u).copied().collect()))
        .collect();
    let pos = |s: PointSet| sets.iter().position(|t| *t == s).expect("clopens form a sublattice");
    let names = sets.iter().map(|s| x.set_name(s)).collect();
    let lattice = Lattice::from_fn(
        names,
        |a, b| pos(sets[a].intersection(&sets[b]).copied().collect()),
        |a, b| pos(sets[a].union(&sets[b]).copied().collect()),
    )
    .expect("clopens form a lattice");
    let algebra = BooleanAlgebra::from_lattice(lattice).expect("clopens are complemented");
    Clopens { sets, algebra }
}

#[derive(Clone, Debug)]
pub struct StoneRoundTrip {
    pub spec: StoneSpace,
    pub clopens: Clopens,
    /// `b ↦ b̂` as indices into the clopens
    pub iso: Vec<usize>,
    pub hom: Result<(), HomViolation>,
    pub bijective: bool,
    /// `b ↦ b̂` into `2^X` with `X = Spec(B)`, element index = bitmask
    pub embedding: Vec<usize>,
    pub embedding_hom: Result<(), HomViolation>,
    pub embedding_injective: bool,
}

impl StoneRoundTrip {
    pub fn holds(&self) -> bool {
        self.spec.enumerations_agree
            && self.hom.is_ok()
            && self.bijective
            && self.embedding_hom.is_ok()
            && self.embedding_injective
    }

    pub fn to_report(&self, b: &BooleanAlgebra) -> Report {
        let x = &self.spec.space;
        let mut r = Report::new("Stone round trip");
        r.info(format!("B has {} elements, Spec(B) has {} points", b.len(), x.len()));
        r.info(format!("points: {}", x.point_names().join(", ")));
        r.check(
            "point enumerations agree",
            self.spec.enumerations_agree,
            format!(
                "{} homs to 2, {} ultrafilters, {} atoms",
                self.spec.points.len(),
                self.spec.ultrafilters.len(),
                self.spec.atoms.len()
            ),
        );
        let pairs: Vec<String> = b
            .elements()
            .map(|e| format!("{}->{}", b.name(e), self.clopens.algebra.name(self.iso[e])))
            .collect();
        r.check(
            "b -> b^ is a homomorphism into Clop(Spec B)",
            self.hom.is_ok(),
            match &self.hom {
                Ok(()) => pairs.join(" "),
                Err(v) => v.to_string(),
            },
        );
        r.check(
            "b -> b^ is bijective",
            self.bijective,
            format!("|B| = {}, |Clop| = {}", b.len(), self.clopens.sets.len()),
        );
        r.check(
            "Stone embedding into 2^X preserves meets, joins, bottom, top",
            self.embedding_hom.is_ok(),
            match &self.embedding_hom {
                Ok(()) => String::new(),
                Err(v) => v.to_string(),
            },
        );
        r.check("Stone embedding is injective", self.embedding_injective, "");
        r
    }
}

pub fn stone_round_trip(b: &BooleanAlgebra) -> StoneRoundTrip {
    let spec = stone_spec(b);
    let clopens = clop(&spec.space);
    let iso: Vec<usize> = spec
        .hat
        .iter()
        .map(|s| clopens.index_of(s).unwrap_or(usize::MAX))
        .collect();
    let hom = check_homomorphism::<Lattice, Lattice>(b, &clopens.algebra, &iso);
    let bijective = is_injective(&iso) && iso.len() == clopens.sets.len();
    let power = Lattice::powerset(spec.space.len());
    let embedding: Vec<usize> = spec.hat.iter().map(|s| s.iter().fold(0, |m, &p| m | 1 << p)).collect();
    let embedding_hom = check_homomorphism::<Lattice, Lattice>(b, &power, &embedding);
    let embedding_injective = is_injective(&embedding);
    StoneRoundTrip {
        spec,
        clopens,
        iso,
        hom,
        bijective,
        embedding,
        embedding_hom,
        embedding_injective,
    }
}

/// For a homomorphism `h: B → B′`, checks that precomposition sends points
/// of `Spec(B′)` to points of `Spec(B)` and pulls `b̂` back to `(h b)^`.
pub fn duality_naturality(b: &BooleanAlgebra, b2: &BooleanAlgebra, h: &[usize]) -> bool {
    let s = stone_spec(b);
    let s2 = stone_spec(b2);
    let point_map: Option<Vec<usize>> = s2
        .points
        .iter()
        .map(|q| {
            let pulled: Vec<bool> = b.elements().map(|x| q[h[x]]).collect();
            s.points.iter().position(|p| *p == pulled)
        })
        .collect();
    let Some(point_map) = point_map else {
        return false;
    };
    b.elements().all(|x| {
        let preimage: PointSet = (0..point_map.len()).filter(|&q| s.hat[x].contains(&point_map[q])).collect();
        preimage == s2.hat[h[x]]
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prop::parse_prop;
    use crate::space::FinTopSpace;

    fn theory(vars: &str, axioms: &[&str]) -> PropTheory {
        let vars = vars.split_whitespace().map(String::from).collect();
        PropTheory::new(vars, axioms.iter().map(|a| parse_prop(a).unwrap()).collect()).unwrap()
    }

    #[test]
    fn lindenbaum_sizes() {
        let lt = lindenbaum(&theory("p", &[])).unwrap();
        assert_eq!(lt.algebra.len(), 4);
        let p = lt.class_of(&parse_prop("p").unwrap());
        assert!(lt.algebra.atoms().contains(&p));
        assert_eq!(lindenbaum(&theory("p q", &["p | q"])).unwrap().algebra.len(), 8);
        let lt = lindenbaum(&theory("p", &["p"])).unwrap();
        assert_eq!(lt.algebra.len(), 2);
        assert!(lt.is_top(&parse_prop("p").unwrap()));
        assert_eq!(lindenbaum(&theory("p", &["p", "~p"])).unwrap_err(), PropError::Inconsistent);
    }

    #[test]
    fn representatives_realize_every_class() {
        let lt = lindenbaum(&theory("p q", &["p | q"])).unwrap();
        for e in lt.algebra.elements() {
            assert_eq!(lt.class_of(&lt.representative(e)), e);
        }
    }

    #[test]
    fn class_map_is_a_homomorphism_on_connectives() {
        let lt = lindenbaum(&theory("p q r", &["p -> q"])).unwrap();
        let fs: Vec<PropFormula> = ["p", "q & ~r", "r | p", "true", "false"]
            .iter()
            .map(|s| parse_prop(s).unwrap())
            .collect();
        for a in &fs {
            for b in &fs {
                let (x, y) = (lt.class_of(a), lt.class_of(b));
                assert_eq!(lt.class_of(&PropFormula::and(a.clone(), b.clone())), lt.algebra.meet(x, y));
                assert_eq!(lt.class_of(&PropFormula::or(a.clone(), b.clone())), lt.algebra.join(x, y));
                assert_eq!(
                    lt.class_of(&PropFormula::implies(a.clone(), b.clone())),
                    lt.algebra.heyting().imp(x, y)
                );
            }
            assert_eq!(lt.class_of(&PropFormula::not(a.clone())), lt.algebra.complement(lt.class_of(a)));
        }
    }

    #[test]
    fn spec_point_counts() {
        let two = BooleanAlgebra::from_lattice(Lattice::two()).unwrap();
        assert_eq!(stone_spec(&two).space.len(), 1);
        let s = stone_spec(&BooleanAlgebra::powerset(2));
        assert_eq!(s.space.len(), 2);
        assert!(s.enumerations_agree);
        let s = stone_spec(&BooleanAlgebra::powerset(4));
        assert_eq!(s.space.len(), 4);
        assert!(s.enumerations_agree);
    }

    #[test]
    fn clopen_examples() {
        assert_eq!(clop(&FinTopSpace::discrete(3)).algebra.len(), 8);
        assert_eq!(clop(&FinTopSpace::sierpinski()).algebra.len(), 2);
        assert_eq!(clop(&FinTopSpace::discrete(1)).algebra.len(), 2);
    }

    #[test]
    fn round_trips() {
        let two = BooleanAlgebra::from_lattice(Lattice::two()).unwrap();
        let rt = stone_round_trip(&two);
        assert!(rt.holds());
        assert_eq!(rt.iso, vec![0, 1]);
        let lt = lindenbaum(&theory("p q", &["p | q"])).unwrap();
        let rt = stone_round_trip(&lt.algebra);
        assert!(rt.holds());
        assert_eq!(rt.spec.space.len(), 3);
        let rt = stone_round_trip(&BooleanAlgebra::powerset(4));
        assert!(rt.holds());
        assert_eq!(rt.clopens.sets.len(), 16);
        assert!(rt.to_report(&BooleanAlgebra::powerset(4)).passed());
    }

    #[test]
    fn homs_are_homomorphisms() {
        let b = BooleanAlgebra::powerset(3);
        let two = Lattice::two();
        for h in homs_to_two(&b) {
            let map: Vec<usize> = h.iter().map(|&t| t as usize).collect();
            assert!(check_homomorphism::<Lattice, Lattice>(&b, &two, &map).is_ok());
        }
    }

    /// `h(S) = {q : g(q) ∈ S}` for `g: n → m`, on powerset indices.
    fn induced(g: &[usize]) -> impl Fn(usize) -> usize + '_ {
        move |s| (0..g.len()).filter(|&q| s >> g[q] & 1 == 1).fold(0, |acc, q| acc | 1 << q)
    }

    #[test]
    fn naturality_exhaustive_small() {
        for m in 1..=3usize {
            for n in 1..=3usize {
                let b = BooleanAlgebra::powerset(m);
                let b2 = BooleanAlgebra::powerset(n);
                for code in 0..m.pow(n as u32) {
                    let g: Vec<usize> = (0..n).map(|q| code / m.pow(q as u32) % m).collect();
                    let f = induced(&g);
                    let h: Vec<usize> = (0..1 << m).map(&f).collect();
                    assert!(check_homomorphism::<Lattice, Lattice>(&b, &b2, &h).is_ok());
                    assert!(duality_naturality(&b, &b2, &h), "m={m} n={n} g={g:?}");
                }
            }
        }
    }

    #[test]
    fn naturality_rejects_non_homomorphism() {
        let b = BooleanAlgebra::powerset(1);
        let b2 = BooleanAlgebra::powerset(2);
        assert!(!duality_naturality(&b, &b2, &[0, 1]));
    }
}
