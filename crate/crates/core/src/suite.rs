//! The acceptance suite: six criteria, each a report plus a time limit.

use std::time::{Duration, Instant};

use crate::fol::{
    basic_open_algebra_check, category_of_elements, corpus, diagram_category, groupoid, iso_invariance,
    morphism_stability, prop_encoding_agrees, semantic_consequence, Budget, Convention, Definables, FoTheory,
    FolError,
};
use crate::lattice_spec::{describe_lattice, verify_lattice_representation};
use crate::order::{check_distributive, downset_lattice, BooleanAlgebra, DistLattice, Distributivity, FinPoset, Lattice};
use crate::prop::{lindenbaum, models_of, parse_prop, stone_round_trip, PropError, PropTheory};
use crate::report::Report;
use crate::ring::{describe_ring, verify_representation, FinCommRing};

#[derive(Clone, Debug)]
pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
    pub limit: Duration,
    pub elapsed: Duration,
    pub report: Report,
}

impl Criterion {
    pub fn passed(&self) -> bool {
        self.report.passed() && self.elapsed <= self.limit
    }

    /// `[PASS] 1 ring sheaf representation (312 checks, 1.2s <= 60s)`
    pub fn summary(&self) -> String {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let mut line = format!(
            "[{verdict}] {} {} ({} checks, {:.2}s <= {}s)",
            self.id,
            self.name,
            self.report.checks.len(),
            self.elapsed.as_secs_f64(),
            self.limit.as_secs()
        );
        if let Some(c) = self.report.failures().next() {
            line.push_str(&format!("; first failure: {}: {}", c.name, c.detail));
        } else if self.elapsed > self.limit {
            line.push_str("; over the time limit");
        }
        line
    }
}

pub const CRITERIA: [(usize, &str, u64); 6] = [
    (1, "ring sheaf representation", 60),
    (2, "lattice sheaf representation", 30),
    (3, "Stone duality", 30),
    (4, "groupoid spectrum properties", 300),
    (5, "completeness shadow", 60),
    (6, "cross-module stalk oracle", 60),
];

pub fn run(id: usize, seed: u64) -> Option<Criterion> {
    let &(_, name, secs) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let report = match id {
        1 => rings(),
        2 => lattices(),
        3 => stone(),
        4 => groupoids(),
        5 => consequence(seed),
        _ => stalk_oracle(),
    };
    Some(Criterion {
        id,
        name,
        limit: Duration::from_secs(secs),
        elapsed: start.elapsed(),
        report,
    })
}

pub fn run_all(seed: u64) -> Vec<Criterion> {
    CRITERIA.iter().filter_map(|c| run(c.0, seed)).collect()
}

/// Z/n for n ≤ 30, F4, Z/4[x]/(x²), and products of two rings of order ≤ 6.
pub fn ring_corpus() -> Vec<(String, FinCommRing)> {
    let mut out: Vec<(String, FinCommRing)> = (2..=30).map(|n| (format!("Z/{n}"), FinCommRing::zmod(n))).collect();
    out.push(("F4".into(), FinCommRing::f4()));
    out.push(("Z/4[x]/(x^2)".into(), FinCommRing::dual_numbers(4)));
    let small = small_rings();
    for i in 0..small.len() {
        for j in i..small.len() {
            out.push((
                format!("{} x {}", small[i].0, small[j].0),
                small[i].1.product(&small[j].1),
            ));
        }
    }
    out
}

/// Every ring of order at most 6, one per isomorphism class.
pub fn small_rings() -> Vec<(String, FinCommRing)> {
    let z2 = FinCommRing::zmod(2);
    let mut out: Vec<(String, FinCommRing)> = (2..=6).map(|n| (format!("Z/{n}"), FinCommRing::zmod(n))).collect();
    out.push(("F4".into(), FinCommRing::f4()));
    out.push(("Z/2[x]/(x^2)".into(), FinCommRing::dual_numbers(2)));
    out.push(("Z/2 x Z/2".into(), z2.product(&z2)));
    out
}

/// Downset lattices of all posets on 1 to 4 points, up to isomorphism.
pub fn lattice_corpus() -> Vec<(String, DistLattice)> {
    let mut out = Vec::new();
    for n in 1..=4 {
        for (k, p) in FinPoset::all_up_to_iso(n).iter().enumerate() {
            let l = downset_lattice(p).expect("a nonempty poset has a nontrivial downset lattice");
            out.push((format!("downsets of poset {n}.{k}"), l));
        }
    }
    out
}

fn rings() -> Report {
    let mut r = Report::new("ring sheaf representation");
    for (name, a) in ring_corpus() {
        match verify_representation(&a) {
            Ok(rep) => {
                let report = rep.to_report();
                let detail = match report.failures().next() {
                    None => format!(
                        "{} point(s), stalks {}",
                        rep.stalks.len(),
                        rep.stalks.iter().map(|s| describe_ring(&s.ring)).collect::<Vec<_>>().join(", ")
                    ),
                    Some(c) => format!("{}: {}", c.name, c.detail),
                };
                r.check(name, report.passed(), detail);
            }
            Err(e) => r.check(name, false, e.to_string()),
        }
    }
    r
}

fn lattices() -> Report {
    let mut r = Report::new("lattice sheaf representation");
    for (name, l) in lattice_corpus() {
        match verify_lattice_representation(&l) {
            Ok(rep) => {
                let report = rep.to_report();
                let detail = match report.failures().next() {
                    None => format!(
                        "{}, {} point(s), {} checks",
                        describe_lattice(&l),
                        rep.stalks.len(),
                        report.checks.len()
                    ),
                    Some(c) => format!("{}: {}", c.name, c.detail),
                };
                r.check(name, report.passed(), detail);
            }
            Err(e) => r.check(name, false, e.to_string()),
        }
    }
    for (name, l) in [("M3", Lattice::m3()), ("N5", Lattice::n5())] {
        let (ok, detail) = match check_distributive(&l) {
            Distributivity::Distributive => (false, "accepted as distributive".to_string()),
            Distributivity::Violated { x, y, z } => {
                let lhs = l.meet(x, l.join(y, z));
                let rhs = l.join(l.meet(x, y), l.meet(x, z));
                (
                    lhs != rhs && DistLattice::new(l.clone()).is_err(),
                    format!(
                        "{x} ^ ({y} v {z}) = {} but ({x} ^ {y}) v ({x} ^ {z}) = {}",
                        l.name(lhs),
                        l.name(rhs),
                        x = l.name(x),
                        y = l.name(y),
                        z = l.name(z)
                    ),
                )
            }
        };
        r.check(format!("{name} rejected as non-distributive"), ok, detail);
    }
    r
}

/// Axioms that theories in the Stone corpus draw from.
pub const STONE_GENERATORS: [&str; 8] = ["p", "~p", "p | q", "p -> q", "q & r", "~(p & q)", "p | q -> r", "(p -> q) -> p"];

/// Theories over `p`, `p q`, and `p q r` with at most two generator axioms
/// over their variables.
pub fn stone_corpus() -> Vec<PropTheory> {
    let gens: Vec<_> = STONE_GENERATORS.iter().map(|g| parse_prop(g).expect("generator parses")).collect();
    let mut out = Vec::new();
    for k in 1..=3 {
        let vars: Vec<String> = ["p", "q", "r"][..k].iter().map(|s| s.to_string()).collect();
        let usable: Vec<_> = gens
            .iter()
            .filter(|g| g.variables().iter().all(|v| vars.contains(v)))
            .collect();
        let mut choices: Vec<Vec<_>> = vec![vec![]];
        for i in 0..usable.len() {
            choices.push(vec![usable[i].clone()]);
            for j in i + 1..usable.len() {
                choices.push(vec![usable[i].clone(), usable[j].clone()]);
            }
        }
        for axioms in choices {
            out.push(PropTheory::new(vars.clone(), axioms).expect("axioms use declared variables"));
        }
    }
    out
}

fn stone() -> Report {
    let mut r = Report::new("Stone duality");
    let mut inconsistent = 0;
    for t in stone_corpus() {
        let axioms: Vec<String> = t.axioms.iter().map(|a| a.to_string()).collect();
        let name = format!("vars {} | {}", t.vars.join(" "), axioms.join("; "));
        match lindenbaum(&t) {
            Ok(lt) => {
                let rt = stone_round_trip(&lt.algebra);
                // truth-table oracle: 2^(number of models) classes and one point per model
                let models = models_of(&t).len();
                let sizes = lt.algebra.len() == 1 << models && rt.spec.space.len() == models;
                r.check(
                    name,
                    rt.holds() && sizes,
                    format!("{} elements, {} points", lt.algebra.len(), rt.spec.space.len()),
                );
            }
            Err(PropError::Inconsistent) => inconsistent += 1,
            Err(e) => r.check(name, false, e.to_string()),
        }
    }
    r.info(format!("{inconsistent} inconsistent theories skipped"));
    for n in 1..=4 {
        let b = BooleanAlgebra::powerset(n);
        let rt = stone_round_trip(&b);
        r.check(
            format!("powerset 2^{n}"),
            rt.holds() && rt.spec.space.len() == n,
            format!("{} points", rt.spec.space.len()),
        );
    }
    r
}

const DEFINABLE_BUDGET: usize = 1 << 24;

fn groupoids() -> Report {
    let mut r = Report::new("groupoid spectrum properties");
    for (name, t) in corpus::all() {
        if let Err(e) = groupoid_checks(&mut r, name, &t) {
            r.check(format!("{name}: construction"), false, e.to_string());
        }
    }
    r
}

fn groupoid_checks(r: &mut Report, name: &str, t: &FoTheory) -> Result<(), FolError> {
    let budget = Budget::from_env().unwrap_or_default();
    let g = groupoid(t, 3, 2, Convention::LabelCompatible, budget)?;
    r.check(
        format!("{name}: groupoid laws"),
        g.check_laws().is_ok(),
        match g.check_laws() {
            Ok(()) => format!("{} objects, {} morphisms", g.objects.len(), g.morphisms.len()),
            Err(w) => w,
        },
    );
    let defs = Definables::new(&t.signature, &g.models.models, 3, 3, DEFINABLE_BUDGET)?;
    let inv = iso_invariance(&g, &defs);
    r.check(
        format!("{name}: definable sets are isomorphism invariant to depth 3"),
        inv.failure.is_none(),
        match &inv.failure {
            None => format!("{} classes, {} isomorphisms", inv.classes, inv.isomorphisms),
            Some((f, a, b, map, tuple)) => format!("{f} not preserved by {map:?}: M{a} -> M{b} at {tuple:?}"),
        },
    );
    let stable = morphism_stability(&g, &defs);
    r.check(
        format!("{name}: basic opens are stable under morphisms"),
        stable.is_ok(),
        match &stable {
            Ok(k) => format!("{k} opens"),
            Err((f, k)) => {
                let m = &g.morphisms[*k];
                format!("V({f}) contains {} but not {}", g.object_name(m.source), g.object_name(m.target))
            }
        },
    );

    // identities on every pair of depth-≤1 classes in contexts up to 2
    let mut pairs = 0;
    let mut failure = None;
    'outer: for c in 0..=2 {
        let shallow: Vec<usize> = (0..defs.contexts[c].classes.len())
            .filter(|&i| defs.contexts[c].classes[i].depth <= 1)
            .collect();
        for &i in &shallow {
            for &j in &shallow {
                pairs += 1;
                let rep = basic_open_algebra_check(&g, &defs.formula(c, i), &defs.formula(c, j))?;
                let bad = rep.failures().next().map(|f| format!("{}: {}", f.name, f.detail));
                if let Some(w) = bad {
                    failure = Some(format!("{} / {}: {w}", defs.formula(c, i), defs.formula(c, j)));
                    break 'outer;
                }
            }
        }
    }
    r.check(
        format!("{name}: basic open identities"),
        failure.is_none(),
        failure.unwrap_or_else(|| format!("{pairs} formula pairs")),
    );

    let mut filtered = Ok(0);
    let mut diagrams = Ok(0);
    for (i, m) in g.models.models.iter().enumerate() {
        if filtered.is_ok() {
            let cat = category_of_elements(m, t, 1, 2, DEFINABLE_BUDGET)?;
            filtered = match &cat.failure {
                None => filtered.map(|k| k + 1),
                Some(w) => Err(format!("M{i}: {w}")),
            };
        }
        if diagrams.is_ok() {
            let d = diagram_category(m, 2);
            diagrams = match d.to_report().failures().next() {
                None => diagrams.map(|k| k + 1),
                Some(f) => Err(format!("M{i}: {}: {}", f.name, f.detail)),
            };
        }
    }
    let show = |x: &Result<usize, String>| match x {
        Ok(k) => format!("{k} models"),
        Err(w) => w.clone(),
    };
    r.check(format!("{name}: categories of elements are filtered"), filtered.is_ok(), show(&filtered));
    r.check(
        format!("{name}: diagram categories are local and well-pointed"),
        diagrams.is_ok(),
        show(&diagrams),
    );
    Ok(())
}

fn consequence(seed: u64) -> Report {
    let mut r = Report::new("completeness shadow");
    let t = corpus::pure_sets();
    let two = t.parse_formula("exists x y. ~x = y").expect("formula parses");
    match semantic_consequence(&t, &two, 1, Budget::default()) {
        Ok(v) => r.check("exists x y. ~x = y refuted at size 1", v.is_refuted(), v.to_string()),
        Err(e) => r.check("exists x y. ~x = y refuted at size 1", false, e.to_string()),
    }
    let refl = t.parse_formula("forall x. x = x").expect("formula parses");
    match semantic_consequence(&t, &refl, 3, Budget::default()) {
        Ok(v) => r.check(
            "bounded verdicts state that they are not proofs",
            !v.is_refuted() && v.to_string().contains("not a proof"),
            v.to_string(),
        ),
        Err(e) => r.check("bounded verdicts state that they are not proofs", false, e.to_string()),
    }
    let agree = prop_encoding_agrees(seed, 100);
    r.check(
        "propositional encoding agrees with truth tables on 100 formulas",
        agree == Ok(800),
        match agree {
            Ok(k) => format!("{k} formula/valuation pairs, seed {seed}"),
            Err(w) => format!("disagreement: {w}"),
        },
    );
    r.info("completeness itself is not checked: there is no proof calculus here");
    r
}

fn stalk_oracle() -> Report {
    let mut r = Report::new("cross-module stalk oracle");
    for (name, a) in ring_corpus() {
        match verify_representation(&a) {
            Ok(rep) => {
                let bad = rep.stalks.iter().find(|s| s.direct_iso.is_none() || !s.colimit_agrees);
                r.check(
                    format!("{name}: stalks match localizations"),
                    bad.is_none(),
                    match bad {
                        None => format!("{} point(s)", rep.stalks.len()),
                        Some(s) => format!("at {}", s.point),
                    },
                );
            }
            Err(e) => r.check(name, false, e.to_string()),
        }
    }
    for (name, l) in lattice_corpus() {
        match verify_lattice_representation(&l) {
            Ok(rep) => {
                let bad = rep.stalks.iter().find(|s| s.stalk_iso.is_none() || !s.colimit_agrees);
                r.check(
                    format!("{name}: stalks match filter quotients"),
                    bad.is_none(),
                    match bad {
                        None => format!("{} point(s)", rep.stalks.len()),
                        Some(s) => format!("at {}", s.point),
                    },
                );
            }
            Err(e) => r.check(name, false, e.to_string()),
        }
    }
    r
}
