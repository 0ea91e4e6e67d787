use std::collections::HashMap;
use std::fmt::Write as _;

use super::{FinTopSpace, PointSet, SpaceError};
use crate::algebra::{is_injective, Algebra, AlgebraKind};

/// A presheaf of rings or lattices on the basis of a finite space.
///
/// Restrictions are stored for every pair `V ⊆ U` of basic opens and are
/// checked at construction to be homomorphisms, to fix identities and to
/// compose.
#[derive(Clone, Debug)]
pub struct StructPresheaf {
    space: FinTopSpace,
    kind: AlgebraKind,
    sections: Vec<Algebra>,
    restrictions: Vec<Option<Vec<usize>>>,
    /// basis indices contained in each basic open
    below: Vec<Vec<usize>>,
}

impl StructPresheaf {
    /// `restrict(u, v)` is asked for every pair of distinct basis indices with
    /// `basic(v) ⊆ basic(u)`; identities are filled in.
    pub fn new(
        space: FinTopSpace,
        kind: AlgebraKind,
        sections: Vec<Algebra>,
        mut restrict: impl FnMut(usize, usize) -> Option<Vec<usize>>,
    ) -> Result<Self, SpaceError> {
        let nb = space.basis().len();
        if sections.len() != nb {
            return Err(SpaceError::SectionCount {
                expected: nb,
                found: sections.len(),
            });
        }
        for (i, s) in sections.iter().enumerate() {
            if s.kind() != kind {
                return Err(SpaceError::KindMismatch {
                    open: space.key(i).to_string(),
                    expected: kind,
                    found: s.kind(),
                });
            }
        }
        let below: Vec<Vec<usize>> = (0..nb)
            .map(|u| (0..nb).filter(|&v| space.basic(v).is_subset(space.basic(u))).collect())
            .collect();
        let mut restrictions = vec![None; nb * nb];
        for u in 0..nb {
            for &v in &below[u] {
                let map = if u == v {
                    (0..sections[u].len()).collect()
                } else {
                    restrict(u, v).ok_or_else(|| {
                        SpaceError::MissingRestriction(space.key(u).to_string(), space.key(v).to_string())
                    })?
                };
                sections[u].check_hom(&sections[v], &map).map_err(|violation| SpaceError::NotAHomomorphism {
                    from: space.key(u).to_string(),
                    to: space.key(v).to_string(),
                    violation,
                })?;
                restrictions[u * nb + v] = Some(map);
            }
        }
        let f = StructPresheaf {
            space,
            kind,
            sections,
            restrictions,
            below,
        };
        f.check_functorial()?;
        Ok(f)
    }

    fn check_functorial(&self) -> Result<(), SpaceError> {
        let key = |i: usize| self.space.key(i).to_string();
        for u in 0..self.sections.len() {
            if self.restriction(u, u).iter().enumerate().any(|(i, &j)| i != j) {
                return Err(SpaceError::NotIdentity(key(u)));
            }
            for &v in &self.below[u] {
                for &w in &self.below[v] {
                    let direct = self.restriction(u, w);
                    let via = self.restriction(v, w);
                    if self.restriction(u, v).iter().zip(direct).any(|(&x, &d)| via[x] != d) {
                        return Err(SpaceError::NotFunctorial(key(u), key(v), key(w)));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn space(&self) -> &FinTopSpace {
        &self.space
    }

    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    pub fn section(&self, u: usize) -> &Algebra {
        &self.sections[u]
    }

    pub fn sections(&self) -> &[Algebra] {
        &self.sections
    }

    /// The restriction `F(U) → F(V)`; panics unless `V ⊆ U`.
    pub fn restriction(&self, u: usize, v: usize) -> &[usize] {
        self.restrictions[u * self.sections.len() + v]
            .as_deref()
            .expect("restriction along an inclusion")
    }

    pub fn restrict(&self, u: usize, v: usize, s: usize) -> usize {
        self.restriction(u, v)[s]
    }

    /// Basis indices contained in `basic(u)`, including `u`.
    pub fn below(&self, u: usize) -> &[usize] {
        &self.below[u]
    }

    /// Visits every family `(s_i ∈ F(V_i))` over `cover` that agrees on every
    /// basic open inside each pairwise intersection. Stops when `visit`
    /// returns `false`.
    pub fn compatible_families(&self, cover: &[usize], mut visit: impl FnMut(&[usize]) -> bool) {
        let k = cover.len();
        let mut common: Vec<Vec<Vec<usize>>> = vec![vec![]; k];
        for i in 0..k {
            for j in 0..i {
                let meet: PointSet = self
                    .space
                    .basic(cover[i])
                    .intersection(self.space.basic(cover[j]))
                    .copied()
                    .collect();
                let ws = self.below[cover[i]]
                    .iter()
                    .copied()
                    .filter(|&w| self.space.basic(w).is_subset(&meet))
                    .collect();
                common[i].push(ws);
            }
        }
        let mut family = Vec::with_capacity(k);
        self.families_rec(cover, &common, &mut family, &mut visit);
    }

    fn families_rec(
        &self,
        cover: &[usize],
        common: &[Vec<Vec<usize>>],
        family: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize]) -> bool,
    ) -> bool {
        let i = family.len();
        if i == cover.len() {
            return visit(family);
        }
        for s in 0..self.sections[cover[i]].len() {
            let ok = (0..i).all(|j| {
                common[i][j]
                    .iter()
                    .all(|&w| self.restrict(cover[i], w, s) == self.restrict(cover[j], w, family[j]))
            });
            if ok {
                family.push(s);
                let go_on = self.families_rec(cover, common, family, visit);
                family.pop();
                if !go_on {
                    return false;
                }
            }
        }
        true
    }

    /// Checks gluing for every basic open and every cover of it by smaller
    /// basic opens.
    ///
    /// Only antichain covers are tried: a member contained in another member
    /// is determined by it on compatible families, so dropping it changes
    /// neither side of the equalizer. Covers containing `U` itself hold
    /// trivially.
    pub fn check_sheaf(&self) -> CheckOutcome {
        let mut checked = 0;
        for u in 0..self.sections.len() {
            let target = self.space.basic(u);
            let subs: Vec<usize> = self.below[u].iter().copied().filter(|&v| v != u).collect();
            let mut failure = None;
            let mut chosen = Vec::new();
            self.antichain_covers(target, &subs, 0, &mut chosen, &mut |cover| {
                checked += 1;
                match self.glue(u, cover) {
                    Ok(()) => true,
                    Err(f) => {
                        failure = Some(f);
                        false
                    }
                }
            });
            if let Some(f) = failure {
                return CheckOutcome::Fails(f);
            }
        }
        CheckOutcome::Sheaf { covers_checked: checked }
    }

    fn antichain_covers(
        &self,
        target: &PointSet,
        subs: &[usize],
        from: usize,
        chosen: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize]) -> bool,
    ) -> bool {
        let union: PointSet = chosen.iter().flat_map(|&v| self.space.basic(v).iter().copied()).collect();
        if &union == target {
            if !visit(chosen) {
                return false;
            }
        } else {
            let reachable: PointSet = union
                .iter()
                .copied()
                .chain(subs[from..].iter().flat_map(|&v| self.space.basic(v).iter().copied()))
                .collect();
            if &reachable != target {
                return true;
            }
        }
        for i in from..subs.len() {
            let v = self.space.basic(subs[i]);
            let comparable = chosen.iter().any(|&c| {
                let c = self.space.basic(c);
                c.is_subset(v) || v.is_subset(c)
            });
            if comparable {
                continue;
            }
            chosen.push(subs[i]);
            let go_on = self.antichain_covers(target, subs, i + 1, chosen, visit);
            chosen.pop();
            if !go_on {
                return false;
            }
        }
        true
    }

    /// The gluing condition for one cover of `u`: restriction to the cover is
    /// a bijection onto the compatible families.
    pub fn glue(&self, u: usize, cover: &[usize]) -> Result<(), SheafFailure> {
        let fail = |detail: String, family: Vec<usize>| SheafFailure {
            open: u,
            cover: cover.to_vec(),
            family,
            detail,
        };
        let mut images: HashMap<Vec<usize>, usize> = HashMap::new();
        for s in 0..self.sections[u].len() {
            let img: Vec<usize> = cover.iter().map(|&v| self.restrict(u, v, s)).collect();
            if let Some(t) = images.insert(img.clone(), s) {
                return Err(fail(
                    format!(
                        "sections {} and {} restrict to the same family",
                        self.sections[u].name(t),
                        self.sections[u].name(s)
                    ),
                    img,
                ));
            }
        }
        let mut missing = None;
        let mut count = 0;
        self.compatible_families(cover, |fam| {
            count += 1;
            if images.contains_key(fam) {
                true
            } else {
                missing = Some(fam.to_vec());
                false
            }
        });
        if let Some(fam) = missing {
            return Err(fail("compatible family has no gluing".into(), fam));
        }
        debug_assert_eq!(count, images.len());
        Ok(())
    }

    /// The stalk at `p`: the section over the minimal open around `p`, with the
    /// restrictions from every basic neighbourhood as cocone.
    pub fn stalk_at(&self, p: usize) -> Stalk {
        let open = self.space.minimal_open(p);
        let cocone = (0..self.sections.len())
            .filter(|&v| self.space.basic(v).contains(&p))
            .map(|v| (v, self.restriction(v, open).to_vec()))
            .collect();
        Stalk {
            point: p,
            open,
            algebra: self.sections[open].clone(),
            cocone,
        }
    }

    /// Γ as the equalizer over the cover by minimal opens.
    pub fn global_sections(&self) -> Result<GlobalSections, SpaceError> {
        let mut cover: Vec<usize> = self.space.points().map(|p| self.space.minimal_open(p)).collect();
        cover.sort();
        cover.dedup();
        let mut tuples = Vec::new();
        self.compatible_families(&cover, |fam| {
            tuples.push(fam.to_vec());
            true
        });
        let parts: Vec<&Algebra> = cover.iter().map(|&v| &self.sections[v]).collect();
        let algebra = Algebra::from_tuples(self.kind, &parts, tuples.clone())?;
        let whole: PointSet = self.space.points().collect();
        if let Some(x) = self.space.basis_index_of_set(&whole) {
            if !cover.contains(&x) {
                self.glue(x, &cover).map_err(|f| SpaceError::NotASheaf(f.describe(self)))?;
            }
        }
        Ok(GlobalSections { cover, tuples, algebra })
    }

    /// The canonical map `Γ(F) → ∏_p F_p`, checked to be a homomorphism in
    /// every component; injectivity is computed, not assumed.
    pub fn sections_into_stalks(&self, gs: &GlobalSections) -> Result<StalkEmbedding, SpaceError> {
        let mut stalks = Vec::new();
        let mut components = Vec::new();
        for p in self.space.points() {
            let stalk = self.stalk_at(p);
            let c = gs.cover.iter().position(|&v| v == stalk.open).expect("cover by minimal opens");
            let map: Vec<usize> = gs.tuples.iter().map(|t| t[c]).collect();
            gs.algebra
                .check_hom(&stalk.algebra, &map)
                .map_err(|violation| SpaceError::NotAHomomorphism {
                    from: "global sections".into(),
                    to: format!("stalk at {}", self.space.point_name(p)),
                    violation,
                })?;
            stalks.push(stalk);
            components.push(map);
        }
        let images: Vec<Vec<usize>> = (0..gs.algebra.len())
            .map(|g| components.iter().map(|m| m[g]).collect())
            .collect();
        let injective = {
            let mut seen = std::collections::HashSet::new();
            images.iter().all(|i| seen.insert(i.clone()))
        };
        Ok(StalkEmbedding {
            stalks,
            components,
            injective,
        })
    }

    /// Basis, sections and restriction maps as plain text.
    pub fn to_text(&self) -> String {
        let mut out = self.space.to_text();
        let _ = writeln!(out, "sections ({})", self.kind);
        for (u, s) in self.sections.iter().enumerate() {
            let names: Vec<String> = (0..s.len()).map(|x| s.name(x)).collect();
            let _ = writeln!(out, "  F({}) order {}: {}", self.space.key(u), s.len(), names.join(" "));
        }
        let _ = writeln!(out, "restrictions");
        for u in 0..self.sections.len() {
            for &v in &self.below[u] {
                if u == v {
                    continue;
                }
                let pairs: Vec<String> = self
                    .restriction(u, v)
                    .iter()
                    .enumerate()
                    .map(|(x, &y)| format!("{}>{}", self.sections[u].name(x), self.sections[v].name(y)))
                    .collect();
                let _ = writeln!(out, "  {} -> {}: {}", self.space.key(u), self.space.key(v), pairs.join(" "));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SheafFailure {
    /// basis index of the covered open
    pub open: usize,
    pub cover: Vec<usize>,
    /// the family that fails to glue uniquely, one section index per member
    pub family: Vec<usize>,
    pub detail: String,
}

impl SheafFailure {
    pub fn describe(&self, f: &StructPresheaf) -> String {
        let x = f.space();
        let cover: Vec<&str> = self.cover.iter().map(|&v| x.key(v)).collect();
        let fam: Vec<String> = self
            .cover
            .iter()
            .zip(&self.family)
            .map(|(&v, &s)| f.section(v).name(s))
            .collect();
        format!(
            "{} covered by [{}]: {} (family [{}])",
            x.key(self.open),
            cover.join(", "),
            self.detail,
            fam.join(", ")
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckOutcome {
    Sheaf { covers_checked: usize },
    Fails(SheafFailure),
}

impl CheckOutcome {
    pub fn is_sheaf(&self) -> bool {
        matches!(self, CheckOutcome::Sheaf { .. })
    }
}

#[derive(Clone, Debug)]
pub struct Stalk {
    pub point: usize,
    /// basis index of the minimal open
    pub open: usize,
    pub algebra: Algebra,
    /// `(V, F(V) → stalk)` for every basic neighbourhood `V`
    pub cocone: Vec<(usize, Vec<usize>)>,
}

#[derive(Clone, Debug)]
pub struct GlobalSections {
    pub cover: Vec<usize>,
    /// each global section as its family over `cover`
    pub tuples: Vec<Vec<usize>>,
    pub algebra: Algebra,
}

#[derive(Clone, Debug)]
pub struct StalkEmbedding {
    pub stalks: Vec<Stalk>,
    /// per point, the map `Γ → F_p`
    pub components: Vec<Vec<usize>>,
    pub injective: bool,
}

/// A stalk built as an explicit colimit.
#[derive(Clone, Debug)]
pub struct ColimitStalk {
    pub algebra: Algebra,
    /// `(V, F(V) → colimit)` for every basic neighbourhood `V`
    pub maps: Vec<(usize, Vec<usize>)>,
}

/// The filtered colimit of `F(V)` over basic `V ∋ p`: the disjoint union of
/// the sections modulo `(V, s) ~ (W, t)` iff they agree on some basic
/// neighbourhood of `p` inside `V ∩ W`.
pub fn colimit_stalk(f: &StructPresheaf, p: usize) -> Result<ColimitStalk, SpaceError> {
    let x = f.space();
    let nbhd: Vec<usize> = (0..x.basis().len()).filter(|&v| x.basic(v).contains(&p)).collect();
    let inside = |v: usize, w: usize| -> Vec<usize> {
        nbhd.iter()
            .copied()
            .filter(|&z| x.basic(z).is_subset(x.basic(v)) && x.basic(z).is_subset(x.basic(w)))
            .collect()
    };
    let equivalent = |(v, s): (usize, usize), (w, t): (usize, usize)| {
        inside(v, w).into_iter().any(|z| f.restrict(v, z, s) == f.restrict(w, z, t))
    };
    let mut class: HashMap<(usize, usize), usize> = HashMap::new();
    let mut reps: Vec<(usize, usize)> = Vec::new();
    for &v in &nbhd {
        for s in 0..f.section(v).len() {
            let c = reps.iter().position(|&r| equivalent(r, (v, s))).unwrap_or_else(|| {
                reps.push((v, s));
                reps.len() - 1
            });
            class.insert((v, s), c);
        }
    }
    let k = reps.len();
    let mut tables = [vec![0; k * k], vec![0; k * k]];
    for (op, table) in tables.iter_mut().enumerate() {
        for a in 0..k {
            for b in 0..k {
                let ((v, s), (w, t)) = (reps[a], reps[b]);
                let z = inside(v, w)[0];
                let r = f.section(z).table().op(op, f.restrict(v, z, s), f.restrict(w, z, t));
                table[a * k + b] = class[&(z, r)];
            }
        }
    }
    let names = reps.iter().map(|&(v, s)| f.section(v).name(s)).collect();
    let [t0, t1] = tables;
    let algebra = Algebra::from_tables(f.kind(), names, t0, t1)?;
    let maps: Vec<(usize, Vec<usize>)> = nbhd
        .iter()
        .map(|&v| (v, (0..f.section(v).len()).map(|s| class[&(v, s)]).collect()))
        .collect();
    for (v, m) in &maps {
        f.section(*v).check_hom(&algebra, m).map_err(|violation| SpaceError::NotAHomomorphism {
            from: x.key(*v).to_string(),
            to: "colimit".into(),
            violation,
        })?;
    }
    Ok(ColimitStalk { algebra, maps })
}

/// Whether the stalk map from the minimal open is a bijection onto the colimit.
pub fn colimit_matches(stalk: &Stalk, colim: &ColimitStalk) -> bool {
    colim
        .maps
        .iter()
        .find(|(v, _)| *v == stalk.open)
        .map(|(_, m)| m.len() == colim.algebra.len() && is_injective(m))
        .unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::Lattice;
    use crate::ring::FinCommRing;

    fn lat(l: Lattice) -> Algebra {
        Algebra::Lattice(l)
    }

    /// Constant `A` on the discrete 2-point space, with `whole` over the full space.
    fn constant_on_discrete(a: &Algebra, whole: Algebra, to_part: impl Fn(usize, usize) -> usize) -> Result<StructPresheaf, SpaceError> {
        let x = FinTopSpace::discrete(2);
        let terminal = Algebra::from_tuples(a.kind(), &[], vec![vec![]]).unwrap();
        // basis order from `discrete`: {}, {0}, {1}, {0,1}
        let sections = vec![terminal, a.clone(), a.clone(), whole.clone()];
        let whole_len = whole.len();
        StructPresheaf::new(x, a.kind(), sections, move |u, v| {
            Some(match (u, v) {
                (_, 0) => vec![0; [1, a.len(), a.len(), whole_len][u]],
                (3, 1) => (0..whole_len).map(|s| to_part(s, 0)).collect(),
                (3, 2) => (0..whole_len).map(|s| to_part(s, 1)).collect(),
                _ => return None,
            })
        })
    }

    #[test]
    fn product_over_discrete_space_is_a_sheaf() {
        let two = lat(Lattice::two());
        let prod = lat(Lattice::two().product(&Lattice::two()));
        let f = constant_on_discrete(&two, prod, |s, i| if i == 0 { s / 2 } else { s % 2 }).unwrap();
        assert!(f.check_sheaf().is_sheaf());
        let gs = f.global_sections().unwrap();
        assert_eq!(gs.algebra.len(), 4);
        let emb = f.sections_into_stalks(&gs).unwrap();
        assert!(emb.injective);
    }

    #[test]
    fn constant_value_over_discrete_space_is_not_a_sheaf() {
        let two = lat(Lattice::two());
        let f = constant_on_discrete(&two, two.clone(), |s, _| s).unwrap();
        let CheckOutcome::Fails(fail) = f.check_sheaf() else {
            panic!("diagonal is not the product")
        };
        assert_eq!(fail.open, 3);
        assert_eq!(fail.cover, vec![1, 2]);
        assert!(f.global_sections().is_err());
    }

    #[test]
    fn empty_open_needs_terminal_section() {
        let x = FinTopSpace::discrete(1);
        let two = lat(Lattice::two());
        let f = StructPresheaf::new(x, AlgebraKind::Lattice, vec![two.clone(), two], |_, _| Some(vec![0, 1])).unwrap();
        let CheckOutcome::Fails(fail) = f.check_sheaf() else {
            panic!()
        };
        assert_eq!(fail.open, 0);
        assert!(fail.cover.is_empty());
    }

    /// Sierpinski space with the 2-chain on both nonempty opens and the
    /// restriction `{o,c} → {o}` collapsing everything to the top.
    #[test]
    fn sierpinski_collapsing_restriction_is_rejected() {
        let x = FinTopSpace::sierpinski();
        let terminal = Algebra::from_tuples(AlgebraKind::Lattice, &[], vec![vec![]]).unwrap();
        let two = lat(Lattice::two());
        let err = StructPresheaf::new(x, AlgebraKind::Lattice, vec![terminal, two.clone(), two], |u, v| {
            Some(match (u, v) {
                (_, 0) => vec![0, 0],
                (2, 1) => vec![1, 1],
                _ => return None,
            })
        })
        .unwrap_err();
        // bottom must go to bottom
        assert!(matches!(err, SpaceError::NotAHomomorphism { .. }));
    }

    /// Sheaf condition on the Sierpinski space against a direct equalizer count:
    /// the only nontrivial cover of `{o,c}` contains `{o,c}` itself, so any
    /// functorial presheaf with terminal `F(∅)` is a sheaf.
    #[test]
    fn sierpinski_presheaves_are_sheaves() {
        let x = FinTopSpace::sierpinski();
        let terminal = Algebra::from_tuples(AlgebraKind::Lattice, &[], vec![vec![]]).unwrap();
        let three = lat(Lattice::chain(3));
        let two = lat(Lattice::two());
        let f = StructPresheaf::new(x, AlgebraKind::Lattice, vec![terminal, two, three], |u, v| {
            Some(match (u, v) {
                (_, 0) => vec![0; [1, 2, 3][u]],
                (2, 1) => vec![0, 1, 1],
                _ => return None,
            })
        })
        .unwrap();
        assert!(f.check_sheaf().is_sheaf());
        let gs = f.global_sections().unwrap();
        assert_eq!(gs.algebra.len(), 3);
        let c = colimit_stalk(&f, 0).unwrap();
        assert_eq!(c.algebra.len(), 2);
        assert!(colimit_matches(&f.stalk_at(0), &c));
        let c = colimit_stalk(&f, 1).unwrap();
        assert_eq!(c.algebra.len(), 3);
    }

    #[test]
    fn rejects_non_functorial_restrictions() {
        let z2 = Algebra::Ring(FinCommRing::zmod(2));
        let zero = Algebra::Ring(FinCommRing::zero_ring());
        let x = FinTopSpace::discrete(1);
        // F({0}) = Z/2 with a nontrivial automorphism would be needed; Z/2 has
        // none, so instead give a wrong size
        let err = StructPresheaf::new(x, AlgebraKind::Ring, vec![zero, z2], |_, _| Some(vec![0, 0, 0])).unwrap_err();
        assert!(matches!(err, SpaceError::NotAHomomorphism { .. }));
    }

    #[test]
    fn one_point_space_global_sections_are_identity() {
        let x = FinTopSpace::new(vec!["*".into()], vec![("X".into(), PointSet::from([0]))]).unwrap();
        let l = lat(Lattice::chain(4));
        let f = StructPresheaf::new(x, AlgebraKind::Lattice, vec![l.clone()], |_, _| None).unwrap();
        assert!(f.check_sheaf().is_sheaf());
        let gs = f.global_sections().unwrap();
        assert_eq!(gs.algebra.len(), 4);
        let emb = f.sections_into_stalks(&gs).unwrap();
        assert_eq!(emb.components[0], vec![0, 1, 2, 3]);
    }
}
