//! The category of elements of a model and the category of its
//! parameter-definable sets.

use std::collections::BTreeSet;

use super::definable::Definables;
use super::model::{tuple_at, FinModel};
use super::{FoTheory, FolError, Term};
use crate::report::Report;

/// An object `(D, d)`: a definable set in context `c` and a tuple in it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementObject {
    pub context: usize,
    pub class: usize,
    pub tuple: Vec<usize>,
}

/// A definable map `(D, d) → (D′, d′)`, its graph being a class in
/// context `c + c′`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementMorphism {
    pub source: usize,
    pub target: usize,
    pub graph: usize,
}

#[derive(Clone, Debug)]
pub struct ElementsCategory {
    pub model: FinModel,
    pub definables: Definables,
    pub objects: Vec<ElementObject>,
    pub morphisms: Vec<ElementMorphism>,
    /// index of `(⊤, ())`
    pub terminal: usize,
    pub cones_checked: usize,
    pub equalizers_checked: usize,
    pub failure: Option<String>,
}

impl ElementsCategory {
    pub fn is_filtered(&self) -> bool {
        self.failure.is_none()
    }

    pub fn object_name(&self, o: usize) -> String {
        let obj = &self.objects[o];
        let vars: Vec<String> = (0..obj.context).map(super::definable::var).collect();
        let tuple: Vec<String> = obj.tuple.iter().map(|a| a.to_string()).collect();
        format!(
            "({}) {} @ ({})",
            vars.join(","),
            self.definables.formula(obj.context, obj.class),
            tuple.join(",")
        )
    }

    pub fn to_report(&self) -> Report {
        let mut r = Report::new("category of elements");
        r.info(format!("model: {}", self.model.to_text()));
        r.info(format!(
            "{} objects, {} definable morphisms, formula depth <= {}",
            self.objects.len(),
            self.morphisms.len(),
            self.definables.depth
        ));
        for o in 0..self.objects.len() {
            r.info(format!("  {}", self.object_name(o)));
        }
        r.check(
            "every object maps to (true, ())",
            self.objects
                .iter()
                .enumerate()
                .all(|(o, _)| self.morphisms.iter().any(|m| m.source == o && m.target == self.terminal)),
            "",
        );
        r.check(
            "filtered: product cones and equalizing cones exist",
            self.is_filtered(),
            match &self.failure {
                None => format!(
                    "{} object pairs, {} parallel pairs",
                    self.cones_checked, self.equalizers_checked
                ),
                Some(w) => w.clone(),
            },
        );
        r
    }
}

/// Objects are definable sets in contexts `0..=arity` with a chosen tuple;
/// formulas range up to `depth` with one extra bound variable beyond the
/// morphism contexts.
pub fn category_of_elements(m: &FinModel, t: &FoTheory, arity: usize, depth: usize, budget: usize) -> Result<ElementsCategory, FolError> {
    if !m.is_model_of(t)? {
        return Err(FolError::NotAModel(m.to_text()));
    }
    let defs = Definables::new(&t.signature, std::slice::from_ref(m), 2 * arity + 1, depth, budget)?;
    let ext = |c: usize, i: usize| defs.extension(c, i, 0);

    let mut objects = Vec::new();
    let mut terminal = 0;
    for c in 0..=arity {
        for (i, _) in defs.contexts[c].classes.iter().enumerate() {
            for tuple in ext(c, i) {
                if c == 0 {
                    terminal = objects.len();
                }
                objects.push(ElementObject {
                    context: c,
                    class: i,
                    tuple,
                });
            }
        }
    }

    // graph G ⊆ M^{c+c'} as a function E → E'
    let as_function = |g: &BTreeSet<Vec<usize>>, e: &BTreeSet<Vec<usize>>, e2: &BTreeSet<Vec<usize>>, c: usize| {
        let mut f = std::collections::BTreeMap::new();
        for row in g {
            let (x, y) = row.split_at(c);
            if !e.contains(x) || !e2.contains(y) || f.insert(x.to_vec(), y.to_vec()).is_some() {
                return None;
            }
        }
        (f.len() == e.len()).then_some(f)
    };

    let mut morphisms = Vec::new();
    let mut functions = Vec::new();
    for (s, a) in objects.iter().enumerate() {
        let e = ext(a.context, a.class);
        for (d, b) in objects.iter().enumerate() {
            let c2 = a.context + b.context;
            let e2 = ext(b.context, b.class);
            for gi in 0..defs.contexts[c2].classes.len() {
                let Some(f) = as_function(&ext(c2, gi), &e, &e2, a.context) else {
                    continue;
                };
                if f.get(&a.tuple) == Some(&b.tuple) {
                    morphisms.push(ElementMorphism {
                        source: s,
                        target: d,
                        graph: gi,
                    });
                    functions.push(f);
                }
            }
        }
    }

    let mut failure = None;
    let mut cones_checked = 0;
    'pairs: for (i, a) in objects.iter().enumerate() {
        let ea = ext(a.context, a.class);
        for (j, b) in objects.iter().enumerate() {
            cones_checked += 1;
            let eb = ext(b.context, b.class);
            // D × D′ with (d, d′) and its two projections
            let apex: BTreeSet<Vec<usize>> = ea
                .iter()
                .flat_map(|x| eb.iter().map(move |y| [x.as_slice(), y.as_slice()].concat()))
                .collect();
            let point = [a.tuple.as_slice(), b.tuple.as_slice()].concat();
            let projections_ok = apex.iter().all(|p| {
                let (x, y) = p.split_at(a.context);
                ea.contains(x) && eb.contains(y)
            });
            if !apex.contains(&point) || !projections_ok || apex.len() != ea.len() * eb.len() {
                failure = Some(format!("no product cone over objects {i} and {j}"));
                break 'pairs;
            }
        }
    }
    let mut equalizers_checked = 0;
    if failure.is_none() {
        'parallel: for (x, f) in morphisms.iter().enumerate() {
            for (y, g) in morphisms.iter().enumerate().skip(x + 1) {
                if (f.source, f.target) != (g.source, g.target) {
                    continue;
                }
                equalizers_checked += 1;
                let src = &objects[f.source];
                let equalizer: BTreeSet<&Vec<usize>> = functions[x]
                    .iter()
                    .filter(|(k, v)| functions[y].get(*k) == Some(*v))
                    .map(|(k, _)| k)
                    .collect();
                if !equalizer.contains(&src.tuple) {
                    failure = Some(format!("morphisms {x} and {y} have no equalizing cone"));
                    break 'parallel;
                }
            }
        }
    }
    Ok(ElementsCategory {
        model: m.clone(),
        definables: defs,
        objects,
        morphisms,
        terminal,
        cones_checked,
        equalizers_checked,
        failure,
    })
}

/// The category of subsets of `M^j` (`j ≤ k_max`) definable with
/// parameters, and the checks that make it local and well-pointed.
#[derive(Clone, Debug)]
pub struct DiagramReport {
    pub size: usize,
    pub k_max: usize,
    pub objects: usize,
    /// per arity `m ≤ 2·k_max`: (blocks of the generated partition, `n^m`)
    pub closure: Vec<(usize, usize)>,
    pub indecomposable: Result<usize, String>,
    pub projective: Result<usize, String>,
    pub faithful: Result<usize, String>,
}

impl DiagramReport {
    pub fn closure_is_powerset(&self) -> bool {
        self.closure.iter().all(|&(blocks, tuples)| blocks == tuples)
    }

    pub fn passed(&self) -> bool {
        self.closure_is_powerset() && self.indecomposable.is_ok() && self.projective.is_ok() && self.faithful.is_ok()
    }

    pub fn to_report(&self) -> Report {
        let mut r = Report::new("elementary diagram category");
        r.info(format!(
            "model of size {}, arities 0..={}, {} objects",
            self.size, self.k_max, self.objects
        ));
        let closure: Vec<String> = self
            .closure
            .iter()
            .enumerate()
            .map(|(m, (b, t))| format!("M^{m}: {b}/{t}"))
            .collect();
        r.check(
            "parameter-definable sets are all subsets (atoms of the generated algebra are singletons)",
            self.closure_is_powerset(),
            closure.join(", "),
        );
        let show = |x: &Result<usize, String>, what: &str| match x {
            Ok(k) => format!("{k} {what}"),
            Err(w) => w.clone(),
        };
        r.check(
            "terminal object is indecomposable",
            self.indecomposable.is_ok(),
            show(&self.indecomposable, "disjoint covers of 1 checked"),
        );
        r.check(
            "terminal object is projective",
            self.projective.is_ok(),
            show(&self.projective, "nonempty objects have a point"),
        );
        r.check(
            "global sections functor is faithful",
            self.faithful.is_ok(),
            show(&self.faithful, "parallel pairs separated by points"),
        );
        r.info("Boolean and local, hence well-pointed".to_string());
        r
    }
}

/// Blocks of `M^m` under the parameter atoms `x_i = a`, `x_i = x_j`,
/// relations and function equations over variables and parameters.
fn parameter_partition(model: &FinModel, m: usize) -> usize {
    let n = model.size;
    let vars: Vec<Term> = (0..m).map(|i| Term::Var(super::definable::var(i))).collect();
    let names: Vec<String> = (0..m).map(super::definable::var).collect();
    let sig = &model.signature;
    let mut base: Vec<Term> = vars.clone();
    let params = |a: usize| Term::Var(format!("p{a}"));
    base.extend((0..n).map(params));
    let mut atoms = Vec::new();
    for i in 0..base.len() {
        for j in i + 1..base.len() {
            atoms.push(super::FoFormula::Eq(base[i].clone(), base[j].clone()));
        }
    }
    for r in &sig.relations {
        for k in 0..base.len().pow(r.arity as u32) {
            let args = tuple_at(base.len(), r.arity, k).into_iter().map(|x| base[x].clone()).collect();
            atoms.push(super::FoFormula::Rel(r.name.clone(), args));
        }
    }
    for g in &sig.functions {
        for k in 0..base.len().pow(g.arity as u32) {
            let args: Vec<Term> = tuple_at(base.len(), g.arity, k).into_iter().map(|x| base[x].clone()).collect();
            for t in &base {
                atoms.push(super::FoFormula::Eq(Term::App(g.name.clone(), args.clone()), t.clone()));
            }
        }
    }
    let mut signatures = BTreeSet::new();
    for idx in 0..n.pow(m as u32) {
        let tuple = tuple_at(n, m, idx);
        let mut env: Vec<(String, usize)> = names.iter().cloned().zip(tuple).collect();
        env.extend((0..n).map(|a| (format!("p{a}"), a)));
        let sig: Vec<bool> = atoms
            .iter()
            .map(|f| model.satisfies(f, &env).expect("all variables bound"))
            .collect();
        signatures.insert(sig);
    }
    signatures.len()
}

pub fn diagram_category(model: &FinModel, k_max: usize) -> DiagramReport {
    let n = model.size;
    let closure: Vec<(usize, usize)> = (0..=2 * k_max)
        .map(|m| (parameter_partition(model, m), n.pow(m as u32)))
        .collect();
    let objects: Vec<(usize, u128)> = (0..=k_max)
        .flat_map(|j| {
            let tuples = n.pow(j as u32);
            (0..1u128 << tuples).map(move |s| (j, s))
        })
        .collect();

    // subobjects of 1 are ∅ and {()}
    let mut covers = 0;
    let mut indecomposable = Ok(0);
    for a in 0..2u8 {
        for b in 0..2u8 {
            if a & b == 0 && a | b == 1 {
                covers += 1;
                if a != 0 && b != 0 {
                    indecomposable = Err(format!("1 = {a} + {b}"));
                }
            }
        }
    }
    if indecomposable.is_ok() {
        indecomposable = Ok(covers);
    }

    // a point 1 → D is a definable singleton inside D
    let singletons_definable = |j: usize| closure[j].0 == closure[j].1;
    let mut projective = Ok(0);
    let mut nonempty = 0;
    for &(j, s) in &objects {
        if s != 0 {
            nonempty += 1;
            if !singletons_definable(j) {
                projective = Err(format!("object {s:#b} in M^{j} has no definable point"));
                break;
            }
        }
    }
    if projective.is_ok() {
        projective = Ok(nonempty);
    }

    // f ≠ g : D → E differ at some d, and the point at d separates them
    let mut faithful = Ok(0);
    let mut pairs = 0;
    'objects: for &(j, d) in &objects {
        let dom: Vec<usize> = (0..n.pow(j as u32)).filter(|&t| d >> t & 1 == 1).collect();
        for &(l, e) in &objects {
            let cod: Vec<usize> = (0..n.pow(l as u32)).filter(|&t| e >> t & 1 == 1).collect();
            let homs = (cod.len() as u128).checked_pow(dom.len() as u32).unwrap_or(u128::MAX);
            if homs > 64 || !singletons_definable(j) || !singletons_definable(j + l) {
                continue;
            }
            let all: Vec<Vec<usize>> = (0..homs as usize)
                .map(|h| tuple_at(cod.len(), dom.len(), h).into_iter().map(|k| cod[k]).collect())
                .collect();
            for x in 0..all.len() {
                for y in x + 1..all.len() {
                    pairs += 1;
                    if !(0..dom.len()).any(|p| all[x][p] != all[y][p]) {
                        faithful = Err(format!("two maps M^{j} -> M^{l} agree on every point"));
                        break 'objects;
                    }
                }
            }
        }
    }
    if faithful.is_ok() {
        faithful = Ok(pairs);
    }
    DiagramReport {
        size: n,
        k_max,
        objects: objects.len(),
        closure,
        indecomposable,
        projective,
        faithful,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::model::{enumerate_models, Budget};
    use crate::fol::parse_fo;
    use std::sync::Arc;

    #[test]
    fn unary_elements_depth_one() {
        let t = parse_fo("rel R 1").unwrap();
        let m = FinModel::new(Arc::new(t.signature.clone()), 2, vec![vec![true, false]], vec![]).unwrap();
        let cat = category_of_elements(&m, &t, 1, 1, 100_000).unwrap();
        let names: Vec<String> = (0..cat.objects.len()).map(|o| cat.object_name(o)).collect();
        assert!(names.contains(&"() true @ ()".to_string()));
        assert!(names.contains(&"(x0) R(x0) @ (0)".to_string()));
        // x = x at both elements: the class of true in context 1
        assert!(names.contains(&"(x0) true @ (0)".to_string()));
        assert!(names.contains(&"(x0) true @ (1)".to_string()));
        assert!(cat.is_filtered());
        assert!(cat.to_report().passed());
    }

    #[test]
    fn rejects_non_models() {
        let t = parse_fo("rel R 1\naxiom exists x. R(x)").unwrap();
        let m = FinModel::blank(Arc::new(t.signature.clone()), 1);
        assert!(matches!(category_of_elements(&m, &t, 1, 1, 1000), Err(FolError::NotAModel(_))));
    }

    #[test]
    fn diagram_examples() {
        let t = parse_fo("").unwrap();
        let sig = Arc::new(t.signature.clone());
        let one = diagram_category(&FinModel::blank(sig.clone(), 1), 2);
        assert!(one.passed());
        assert_eq!(one.objects, 2 + 2 + 2);
        let two = diagram_category(&FinModel::blank(sig, 2), 2);
        assert_eq!(two.objects, 2 + 4 + 16);
        assert!(two.passed(), "{}", two.to_report().render());
    }

    #[test]
    fn diagram_on_small_corpus() {
        let t = parse_fo("fun s 1\naxiom forall x. s(s(s(x))) = x").unwrap();
        for m in enumerate_models(&t, 3, Budget::default()).unwrap().models {
            assert!(diagram_category(&m, 1).passed());
        }
    }
}
