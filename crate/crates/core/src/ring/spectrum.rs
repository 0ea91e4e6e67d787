use std::collections::BTreeSet;

use super::{ideals, FinCommRing, RingIdeal};
use crate::space::{FinTopSpace, PointSet};

/// A Zariski-type spectrum: prime (or maximal) ideals with basic opens `B_f`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub ideals: Vec<RingIdeal>,
    pub space: FinTopSpace,
    /// least `f` with `B_f` equal to each basic open
    pub rep: Vec<usize>,
    /// basis index of `B_f` for every element `f`
    pub open_of: Vec<usize>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.ideals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ideals.is_empty()
    }
}

/// `B_f = {P : f ∉ P}`, as indices into `points`.
pub fn basic_open(points: &[RingIdeal], f: usize) -> PointSet {
    points.iter().enumerate().filter(|(_, p)| !p.contains(f)).map(|(i, _)| i).collect()
}

fn spectrum_on(a: &FinCommRing, points: Vec<RingIdeal>) -> Spectrum {
    let names = points.iter().map(|p| p.display(a)).collect();
    let mut seen: Vec<PointSet> = Vec::new();
    let mut rep = Vec::new();
    let mut open_of = Vec::with_capacity(a.len());
    for f in a.elements() {
        let b = basic_open(&points, f);
        match seen.iter().position(|s| *s == b) {
            Some(i) => open_of.push(i),
            None => {
                open_of.push(seen.len());
                seen.push(b);
                rep.push(f);
            }
        }
    }
    let basis = seen
        .into_iter()
        .zip(&rep)
        .map(|(pts, &f)| (format!("B_{}", a.name(f)), pts))
        .collect();
    let space = FinTopSpace::new(names, basis).expect("basic opens of a ring form a basis");
    Spectrum {
        ideals: points,
        space,
        rep,
        open_of,
    }
}

pub fn prime_spectrum(a: &FinCommRing) -> Spectrum {
    spectrum_on(a, ideals(a).into_iter().filter(|i| i.is_prime(a)).collect())
}

/// The maximal ideals with the induced basic opens `B_f ∩ Max(A)`.
pub fn max_spectrum(a: &FinCommRing) -> Spectrum {
    let all = ideals(a);
    let maximal = all
        .iter()
        .filter(|i| {
            i.is_proper(a)
                && all
                    .iter()
                    .all(|j| !j.is_proper(a) || j == *i || !i.members().is_subset(j.members()))
        })
        .cloned()
        .collect();
    spectrum_on(a, maximal)
}

/// `B_f` for every element, as point sets.
pub fn all_basic_opens(spec: &Spectrum, a: &FinCommRing) -> Vec<BTreeSet<usize>> {
    a.elements().map(|f| spec.space.basic(spec.open_of[f]).clone()).collect()
}
