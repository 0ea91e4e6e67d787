use std::collections::BTreeSet;

use super::{locality, localize, multiplicative_closure, prime_spectrum, FinCommRing, Localization, Locality, RingError, Spectrum};
use crate::algebra::{check_homomorphism, find_isomorphism, is_injective, Algebra, AlgebraKind};
use crate::report::{render_map, Report};
use crate::space::{colimit_matches, colimit_stalk, CheckOutcome, StructPresheaf};

/// The affine structure sheaf `B_f ↦ [f]⁻¹A` on the prime spectrum.
#[derive(Clone, Debug)]
pub struct StructureSheaf {
    pub spectrum: Spectrum,
    /// localization at the representative of each basic open
    pub localizations: Vec<Localization>,
    pub presheaf: StructPresheaf,
}

/// Builds the sheaf on the deduplicated basis. Each basic open carries the
/// localization at its least representative; every other `g` with the same
/// `B_g` is checked to give an isomorphic ring. For `B_g ⊆ B_f` the
/// restriction `a/s ↦ ι(a)·ι(s)⁻¹` is the only map compatible with the
/// canonical maps; it is checked to be well defined on every fraction.
pub fn structure_sheaf(a: &FinCommRing) -> Result<StructureSheaf, RingError> {
    let spectrum = prime_spectrum(a);
    let localizations: Vec<Localization> = spectrum
        .rep
        .iter()
        .map(|&f| localize(a, &multiplicative_closure(a, [f])))
        .collect::<Result<_, _>>()?;
    for g in a.elements() {
        let b = spectrum.open_of[g];
        if spectrum.rep[b] == g {
            continue;
        }
        let other = localize(a, &multiplicative_closure(a, [g]))?;
        if find_isomorphism(&other.ring, &localizations[b].ring).is_none() {
            return Err(RingError::Verification(format!(
                "B_{} = B_{} but the localizations differ",
                a.name(g),
                a.name(spectrum.rep[b])
            )));
        }
    }

    let mut restrictions = std::collections::HashMap::new();
    let nb = localizations.len();
    for u in 0..nb {
        for v in 0..nb {
            if u == v || !spectrum.space.basic(v).is_subset(spectrum.space.basic(u)) {
                continue;
            }
            restrictions.insert((u, v), restriction_map(a, &localizations[u], &localizations[v])?);
        }
    }
    let sections = localizations.iter().map(|l| Algebra::Ring(l.ring.clone())).collect();
    let presheaf = StructPresheaf::new(spectrum.space.clone(), AlgebraKind::Ring, sections, |u, v| {
        restrictions.remove(&(u, v))
    })
    .map_err(|e| RingError::Verification(e.to_string()))?;
    Ok(StructureSheaf {
        spectrum,
        localizations,
        presheaf,
    })
}

fn restriction_map(a: &FinCommRing, from: &Localization, to: &Localization) -> Result<Vec<usize>, RingError> {
    let r = &to.ring;
    let mut map = vec![usize::MAX; from.ring.len()];
    for x in a.elements() {
        for &s in &from.denominators {
            let inv = r.inverse(to.canonical[s]).ok_or_else(|| {
                RingError::Verification(format!("{} is not invertible on the smaller open", a.name(s)))
            })?;
            let value = r.mul(to.canonical[x], inv);
            let class = from.fraction(x, s);
            if map[class] == usize::MAX {
                map[class] = value;
            } else if map[class] != value {
                return Err(RingError::Verification(format!(
                    "restriction is not well defined at {}/{}",
                    a.name(x),
                    a.name(s)
                )));
            }
        }
    }
    if a.elements().any(|x| map[from.canonical[x]] != to.canonical[x]) {
        return Err(RingError::Verification("restriction does not commute with the canonical maps".into()));
    }
    Ok(map)
}

/// A short structural name: `Z/n` when `1` has additive order `|A|`, `F_q`
/// for other fields, else order and characteristic.
pub fn describe_ring(r: &FinCommRing) -> String {
    if r.is_zero_ring() {
        return "0".into();
    }
    let mut char = 1;
    let mut x = r.one();
    while x != r.zero() {
        x = r.add(x, r.one());
        char += 1;
    }
    if char == r.len() {
        format!("Z/{}", r.len())
    } else if r.is_integral_domain() {
        format!("F_{}", r.len())
    } else {
        format!("ring of order {} (char {})", r.len(), char)
    }
}

#[derive(Clone, Debug)]
pub struct StalkReport {
    pub point: String,
    pub ring: FinCommRing,
    pub locality: Locality,
    /// `A_p` computed directly as `(A ∖ p)⁻¹A`, and an isomorphism to it
    pub direct: FinCommRing,
    pub direct_iso: Option<Vec<usize>>,
    /// whether the explicit colimit over neighbourhoods matches the minimal open
    pub colimit_agrees: bool,
}

#[derive(Clone, Debug)]
pub struct RepresentationReport {
    pub ring: FinCommRing,
    pub sheaf: StructureSheaf,
    pub sheaf_check: CheckOutcome,
    pub stalks: Vec<StalkReport>,
    pub gamma: FinCommRing,
    /// `A → Γ` found by isomorphism search
    pub gamma_iso: Option<Vec<usize>>,
    /// `a ↦ (a/1)` on the cover is a bijective homomorphism
    pub canonical_iso: bool,
    /// `A → ∏_p A_p`, one component per point
    pub embedding: Vec<Vec<usize>>,
    pub embedding_injective: bool,
    pub sections_into_stalks_injective: bool,
}

impl RepresentationReport {
    pub fn passed(&self) -> bool {
        self.to_report().passed()
    }

    pub fn to_report(&self) -> Report {
        let a = &self.ring;
        let x = &self.sheaf.spectrum.space;
        let mut r = Report::new(format!("ring representation: {} (order {})", describe_ring(a), a.len()));
        let points: Vec<&str> = x.point_names().iter().map(String::as_str).collect();
        r.info(format!("spectrum: {} point(s) {}", points.len(), points.join(" ")));
        for (i, b) in x.basis().iter().enumerate() {
            r.info(format!(
                "  {} = {} section {}",
                b.key,
                x.set_name(&b.points),
                describe_ring(&self.sheaf.localizations[i].ring)
            ));
        }
        match &self.sheaf_check {
            CheckOutcome::Sheaf { covers_checked } => {
                r.check("sheaf condition", true, format!("{covers_checked} covers glue uniquely"))
            }
            CheckOutcome::Fails(f) => r.check("sheaf condition", false, f.describe(&self.sheaf.presheaf)),
        }
        for s in &self.stalks {
            let l = &s.locality;
            let detail = match l.witness {
                Some((u, v)) => format!(
                    "{} not local: {} + {} = {} is a unit",
                    describe_ring(&s.ring),
                    s.ring.name(u),
                    s.ring.name(v),
                    s.ring.name(s.ring.add(u, v))
                ),
                None => format!(
                    "{}, non-units closed under +, {} maximal ideal(s)",
                    describe_ring(&s.ring),
                    l.maximal_ideals.len()
                ),
            };
            r.check(format!("stalk at {} is local", s.point), l.is_local() && l.agree(), detail);
            r.check(
                format!("stalk at {} matches localization at the complement", s.point),
                s.direct_iso.is_some() && s.colimit_agrees,
                match &s.direct_iso {
                    Some(m) => render_map(m, |i| s.ring.name(i).to_string(), |j| s.direct.name(j).to_string()),
                    None => format!("no isomorphism to {}", describe_ring(&s.direct)),
                },
            );
        }
        r.check(
            "A is isomorphic to global sections",
            self.gamma_iso.is_some() && self.canonical_iso,
            match &self.gamma_iso {
                Some(m) => render_map(m, |i| a.name(i).to_string(), |j| self.gamma.name(j).to_string()),
                None => format!("Γ has order {}", self.gamma.len()),
            },
        );
        let images: Vec<String> = a
            .elements()
            .map(|e| {
                let parts: Vec<&str> = self
                    .embedding
                    .iter()
                    .zip(&self.stalks)
                    .map(|(m, s)| s.ring.name(m[e]))
                    .collect();
                format!("{}->({})", a.name(e), parts.join(","))
            })
            .collect();
        r.check(
            "subdirect embedding into the product of stalks",
            self.embedding_injective && self.sections_into_stalks_injective,
            images.join(" "),
        );
        r
    }
}

pub fn verify_representation(a: &FinCommRing) -> Result<RepresentationReport, RingError> {
    let sheaf = structure_sheaf(a)?;
    let f = &sheaf.presheaf;
    let spec = &sheaf.spectrum;
    let sheaf_check = f.check_sheaf();
    let verification = |e: crate::space::SpaceError| RingError::Verification(e.to_string());

    let mut stalks = Vec::new();
    for (p, ideal) in spec.ideals.iter().enumerate() {
        let stalk = f.stalk_at(p);
        let ring = stalk.algebra.as_ring().expect("ring sheaf").clone();
        let complement: BTreeSet<usize> = a.elements().filter(|&x| !ideal.contains(x)).collect();
        let direct = localize(a, &complement)?.ring;
        let direct_iso = find_isomorphism(&ring, &direct);
        let colim = colimit_stalk(f, p).map_err(verification)?;
        stalks.push(StalkReport {
            point: spec.space.point_name(p).to_string(),
            locality: locality(&ring),
            colimit_agrees: colimit_matches(&stalk, &colim),
            ring,
            direct,
            direct_iso,
        });
    }

    let gs = f.global_sections().map_err(verification)?;
    let gamma = gs.algebra.as_ring().expect("ring sheaf").clone();
    let gamma_iso = find_isomorphism(a, &gamma);
    // a ↦ (a/1 on each cover member)
    let canonical: Option<Vec<usize>> = a
        .elements()
        .map(|x| {
            let t: Vec<usize> = gs.cover.iter().map(|&u| sheaf.localizations[u].canonical[x]).collect();
            gs.tuples.iter().position(|s| *s == t)
        })
        .collect();
    let canonical_iso = canonical
        .map(|m| is_injective(&m) && m.len() == gamma.len() && check_homomorphism(a, &gamma, &m).is_ok())
        .unwrap_or(false);

    let embedding: Vec<Vec<usize>> = spec
        .space
        .points()
        .map(|p| sheaf.localizations[spec.space.minimal_open(p)].canonical.clone())
        .collect();
    let homs_ok = embedding
        .iter()
        .zip(&stalks)
        .all(|(m, s)| check_homomorphism(a, &s.ring, m).is_ok());
    let tuples: BTreeSet<Vec<usize>> = a.elements().map(|x| embedding.iter().map(|m| m[x]).collect()).collect();
    let embedding_injective = homs_ok && tuples.len() == a.len();
    let sections_into_stalks_injective = f.sections_into_stalks(&gs).map_err(verification)?.injective;

    Ok(RepresentationReport {
        ring: a.clone(),
        sheaf,
        sheaf_check,
        stalks,
        gamma,
        gamma_iso,
        canonical_iso,
        embedding,
        embedding_injective,
        sections_into_stalks_injective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn section_name(s: &StructureSheaf, _a: &FinCommRing, f: usize) -> String {
        describe_ring(&s.localizations[s.spectrum.open_of[f]].ring)
    }

    #[test]
    fn z6_sections() {
        let a = FinCommRing::zmod(6);
        let s = structure_sheaf(&a).unwrap();
        assert_eq!(section_name(&s, &a, 2), "Z/3");
        assert_eq!(section_name(&s, &a, 3), "Z/2");
        assert_eq!(section_name(&s, &a, 1), "Z/6");
        assert!(s.presheaf.check_sheaf().is_sheaf());
    }

    #[test]
    fn z12_sections() {
        let a = FinCommRing::zmod(12);
        let s = structure_sheaf(&a).unwrap();
        assert_eq!(section_name(&s, &a, 2), "Z/3");
        assert_eq!(section_name(&s, &a, 3), "Z/4");
    }

    #[test]
    fn field_has_constant_sheaf() {
        let a = FinCommRing::f4();
        let s = structure_sheaf(&a).unwrap();
        assert_eq!(s.spectrum.len(), 1);
        assert_eq!(section_name(&s, &a, 1), "F_4");
        let rep = verify_representation(&a).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.stalks.len(), 1);
    }

    #[test]
    fn z12_representation() {
        let rep = verify_representation(&FinCommRing::zmod(12)).unwrap();
        assert!(rep.passed(), "{}", rep.to_report().render());
        let mut stalks: Vec<String> = rep.stalks.iter().map(|s| describe_ring(&s.ring)).collect();
        stalks.sort();
        assert_eq!(stalks, vec!["Z/3", "Z/4"]);
    }

    #[test]
    fn boolean_square_representation() {
        let a = FinCommRing::zmod(2).product(&FinCommRing::zmod(2));
        let rep = verify_representation(&a).unwrap();
        assert!(rep.passed());
        assert!(rep.stalks.iter().all(|s| describe_ring(&s.ring) == "Z/2"));
        assert_eq!(rep.gamma.len(), 4);
    }

    #[test]
    fn z6_stalk_at_two_has_order_two() {
        let a = FinCommRing::zmod(6);
        let s = structure_sheaf(&a).unwrap();
        let p = s.spectrum.space.point_names().iter().position(|n| n == "(2)").unwrap();
        assert_eq!(s.presheaf.stalk_at(p).algebra.len(), 2);
        let gs = s.presheaf.global_sections().unwrap();
        let emb = s.presheaf.sections_into_stalks(&gs).unwrap();
        assert!(emb.injective);
    }

    #[test]
    fn describe_names() {
        assert_eq!(describe_ring(&FinCommRing::dual_numbers(2)), "ring of order 4 (char 2)");
        assert_eq!(describe_ring(&FinCommRing::f4()), "F_4");
    }
}
