use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use super::model::{enumerate_models, isomorphisms, Budget, ModelList};
use super::{FoFormula, FoTheory, FolError};
use crate::report::Report;
use crate::space::escape;

/// Partial map from labels `x0, x1, …` to carrier elements.
pub type Labelling = Vec<Option<usize>>;

/// Which isomorphisms count as morphisms of labelled models.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Convention {
    /// `i: (M,α) → (N,β)` requires `dom α = dom β` and `i ∘ α = β`.
    #[default]
    LabelCompatible,
    /// Every isomorphism of the underlying models, labels ignored.
    AllIsos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelledModel {
    pub model: usize,
    pub labels: Labelling,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Morphism {
    pub source: usize,
    pub target: usize,
    pub map: Vec<usize>,
}

pub fn label_name(i: usize) -> String {
    format!("x{i}")
}

fn label_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || (digits.len() > 1 && digits.starts_with('0')) {
        return None;
    }
    digits.parse().ok()
}

#[derive(Clone, Debug)]
pub struct ModelGroupoid {
    pub theory: FoTheory,
    pub models: ModelList,
    pub label_count: usize,
    pub convention: Convention,
    pub objects: Vec<LabelledModel>,
    pub morphisms: Vec<Morphism>,
    /// isomorphisms between models, keyed by model indices
    pub isos: HashMap<(usize, usize), Vec<Vec<usize>>>,
}

/// Objects are all models up to `n_max` with all partial labellings of
/// `x0 … x{k-1}`; morphisms are the isomorphisms allowed by `convention`.
pub fn groupoid(
    t: &FoTheory,
    n_max: usize,
    k: usize,
    convention: Convention,
    budget: Budget,
) -> Result<ModelGroupoid, FolError> {
    let models = enumerate_models(t, n_max, budget)?;
    let mut objects = Vec::new();
    for (mi, m) in models.models.iter().enumerate() {
        for code in 0..(m.size + 1).pow(k as u32) {
            let labels = (0..k)
                .map(|i| {
                    let d = code / (m.size + 1).pow(i as u32) % (m.size + 1);
                    (d > 0).then(|| d - 1)
                })
                .collect();
            objects.push(LabelledModel { model: mi, labels });
        }
    }
    let mut isos = HashMap::new();
    for a in 0..models.len() {
        for b in 0..models.len() {
            if models.class_of[a] == models.class_of[b] {
                isos.insert((a, b), isomorphisms(&models.models[a], &models.models[b]));
            }
        }
    }
    let mut morphisms = Vec::new();
    for (s, src) in objects.iter().enumerate() {
        for (d, dst) in objects.iter().enumerate() {
            let Some(maps) = isos.get(&(src.model, dst.model)) else {
                continue;
            };
            for map in maps {
                let ok = match convention {
                    Convention::AllIsos => true,
                    Convention::LabelCompatible => src
                        .labels
                        .iter()
                        .zip(&dst.labels)
                        .all(|(a, b)| a.map(|v| map[v]) == *b),
                };
                if ok {
                    morphisms.push(Morphism {
                        source: s,
                        target: d,
                        map: map.clone(),
                    });
                }
            }
        }
    }
    Ok(ModelGroupoid {
        theory: t.clone(),
        models,
        label_count: k,
        convention,
        objects,
        morphisms,
        isos,
    })
}

impl ModelGroupoid {
    pub fn object_name(&self, o: usize) -> String {
        let obj = &self.objects[o];
        let labels: Vec<String> = obj
            .labels
            .iter()
            .enumerate()
            .map(|(i, l)| match l {
                Some(v) => format!("{}={v}", label_name(i)),
                None => format!("{}=-", label_name(i)),
            })
            .collect();
        format!("M{}[{}]", obj.model, labels.join(","))
    }

    /// Identities, inverses and composites are all present.
    pub fn check_laws(&self) -> Result<(), String> {
        let set: HashSet<(usize, usize, &[usize])> = self
            .morphisms
            .iter()
            .map(|m| (m.source, m.target, m.map.as_slice()))
            .collect();
        for (o, obj) in self.objects.iter().enumerate() {
            let id: Vec<usize> = (0..self.models.models[obj.model].size).collect();
            if !set.contains(&(o, o, id.as_slice())) {
                return Err(format!("no identity on {}", self.object_name(o)));
            }
        }
        let mut outgoing: HashMap<usize, Vec<&Morphism>> = HashMap::new();
        for m in &self.morphisms {
            outgoing.entry(m.source).or_default().push(m);
        }
        for f in &self.morphisms {
            let mut inv = vec![0; f.map.len()];
            for (x, &y) in f.map.iter().enumerate() {
                inv[y] = x;
            }
            if !set.contains(&(f.target, f.source, inv.as_slice())) {
                return Err(format!(
                    "no inverse for {} -> {}",
                    self.object_name(f.source),
                    self.object_name(f.target)
                ));
            }
            for g in outgoing.get(&f.target).into_iter().flatten() {
                let comp: Vec<usize> = f.map.iter().map(|&x| g.map[x]).collect();
                if !set.contains(&(f.source, g.target, comp.as_slice())) {
                    return Err(format!(
                        "composite {} -> {} -> {} missing",
                        self.object_name(f.source),
                        self.object_name(f.target),
                        self.object_name(g.target)
                    ));
                }
            }
        }
        Ok(())
    }

    /// Label indices of a context, checked against `K` and `φ`.
    fn context_labels(&self, context: &[String], f: &FoFormula) -> Result<Vec<usize>, FolError> {
        let mut idx = Vec::new();
        for v in context {
            match label_index(v) {
                Some(i) if i < self.label_count => idx.push(i),
                _ => {
                    return Err(FolError::ContextMismatch(format!(
                        "{v} is not one of the {} labels",
                        self.label_count
                    )))
                }
            }
        }
        if let Some(v) = f.free_vars().into_iter().find(|v| !context.contains(v)) {
            return Err(FolError::ContextMismatch(format!("free variable {v} is outside the context")));
        }
        Ok(idx)
    }

    /// `V_{φ(x̄)}`: objects labelled on all of `x̄` whose model satisfies
    /// `φ` at the labelled tuple.
    pub fn basic_open(&self, context: &[String], f: &FoFormula) -> Result<BTreeSet<usize>, FolError> {
        let idx = self.context_labels(context, f)?;
        let mut out = BTreeSet::new();
        for (o, obj) in self.objects.iter().enumerate() {
            let Some(env) = context
                .iter()
                .zip(&idx)
                .map(|(v, &i)| obj.labels[i].map(|a| (v.clone(), a)))
                .collect::<Option<Vec<_>>>()
            else {
                continue;
            };
            if self.models.models[obj.model].satisfies(f, &env)? {
                out.insert(o);
            }
        }
        Ok(out)
    }

    /// `V_φ` with the context formed by the free variables of `φ`.
    pub fn basic_open_of(&self, f: &FoFormula) -> Result<BTreeSet<usize>, FolError> {
        self.basic_open(&sorted_labels(&f.free_vars()), f)
    }

    /// A morphism whose source lies in `open` and whose target does not.
    pub fn instability(&self, open: &BTreeSet<usize>) -> Option<&Morphism> {
        self.morphisms
            .iter()
            .find(|m| open.contains(&m.source) && !open.contains(&m.target))
    }

    pub fn to_text(&self, opens: &[(String, BTreeSet<usize>)]) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "groupoid");
        let _ = writeln!(out, "theory:");
        for line in self.theory.to_text().lines() {
            let _ = writeln!(out, "  {line}");
        }
        let _ = writeln!(
            out,
            "labels: {}",
            (0..self.label_count).map(label_name).collect::<Vec<_>>().join(" ")
        );
        let _ = writeln!(out, "convention: {:?}", self.convention);
        let _ = writeln!(out, "models: {}", self.models.len());
        for (i, m) in self.models.models.iter().enumerate() {
            let flag = if self.models.is_representative(i) { " *" } else { "" };
            let _ = writeln!(out, "  M{i} class {}{flag}: {}", self.models.class_of[i], m.to_text());
        }
        let _ = writeln!(out, "objects: {}", self.objects.len());
        for o in 0..self.objects.len() {
            let _ = writeln!(out, "  {o}: {}", self.object_name(o));
        }
        let _ = writeln!(out, "morphisms: {}", self.morphisms.len());
        for m in &self.morphisms {
            let _ = writeln!(out, "  {} -> {} via {:?}", m.source, m.target, m.map);
        }
        for (name, set) in opens {
            let members: Vec<String> = set.iter().map(|o| o.to_string()).collect();
            let _ = writeln!(out, "open V[{name}] = {{{}}}", members.join(" "));
        }
        out
    }

    /// One node per isomorphism class of objects, labelled with the
    /// class size and automorphism count of a representative.
    pub fn to_dot(&self, name: &str) -> String {
        let mut parent: Vec<usize> = (0..self.objects.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for m in &self.morphisms {
            let (a, b) = (find(&mut parent, m.source), find(&mut parent, m.target));
            parent[a.max(b)] = a.min(b);
        }
        let mut classes: Vec<(usize, usize)> = Vec::new();
        for o in 0..self.objects.len() {
            let r = find(&mut parent, o);
            match classes.iter_mut().find(|(rep, _)| *rep == r) {
                Some((_, count)) => *count += 1,
                None => classes.push((r, 1)),
            }
        }
        let mut out = format!("digraph \"{}\" {{\n", escape(name));
        for (rep, count) in classes {
            let autos = self
                .morphisms
                .iter()
                .filter(|m| m.source == rep && m.target == rep)
                .count();
            let _ = writeln!(
                out,
                "  o{rep} [label=\"{}\\n{count} objects, |Aut|={autos}\"];",
                escape(&self.object_name(rep))
            );
        }
        out.push_str("}\n");
        out
    }
}

/// Label names sorted by index.
pub fn sorted_labels(vars: &[String]) -> Vec<String> {
    let mut v = vars.to_vec();
    v.sort_by_key(|s| (label_index(s).unwrap_or(usize::MAX), s.clone()));
    v.dedup();
    v
}

/// Checks the lattice identities of basic opens for `φ`, `ψ` in their
/// joint context.
pub fn basic_open_algebra_check(g: &ModelGroupoid, f: &FoFormula, h: &FoFormula) -> Result<Report, FolError> {
    let mut vars = f.free_vars();
    vars.extend(h.free_vars());
    let ctx = sorted_labels(&vars);
    let vf = g.basic_open(&ctx, f)?;
    let vh = g.basic_open(&ctx, h)?;
    let vand = g.basic_open(&ctx, &FoFormula::and(f.clone(), h.clone()))?;
    let vor = g.basic_open(&ctx, &FoFormula::or(f.clone(), h.clone()))?;
    let vtop = g.basic_open(&ctx, &FoFormula::True)?;
    let vbot = g.basic_open(&ctx, &FoFormula::False)?;
    let in_context: BTreeSet<usize> = g.basic_open(&ctx, &FoFormula::True)?;
    let all: BTreeSet<usize> = (0..g.objects.len()).collect();

    let mut r = Report::new("basic open identities");
    r.info(format!("phi = {f}"));
    r.info(format!("psi = {h}"));
    r.info(format!("context: ({})", ctx.join(", ")));
    let diff = |a: &BTreeSet<usize>, b: &BTreeSet<usize>| {
        let d: Vec<String> = a.symmetric_difference(b).map(|o| g.object_name(*o)).take(3).collect();
        if d.is_empty() {
            format!("{} objects", a.len())
        } else {
            format!("differ at {}", d.join(", "))
        }
    };
    let meet: BTreeSet<usize> = vf.intersection(&vh).copied().collect();
    let join: BTreeSet<usize> = vf.union(&vh).copied().collect();
    r.check("V(phi & psi) = V(phi) meet V(psi)", vand == meet, diff(&vand, &meet));
    r.check("V(phi | psi) = V(phi) join V(psi)", vor == join, diff(&vor, &join));
    if ctx.is_empty() {
        r.check("V(true) = all objects", vtop == all, diff(&vtop, &all));
    } else {
        r.check("V(true) = all objects labelled on the context", vtop == in_context, diff(&vtop, &in_context));
    }
    r.check("V(false) is empty", vbot.is_empty(), diff(&vbot, &BTreeSet::new()));
    Ok(r)
}

/// The family `M ↦ φ^M ⊆ M^k`, with equivariance checked on every morphism.
#[derive(Clone, Debug)]
pub struct DefinableSheaf {
    pub vars: Vec<String>,
    /// solution set per model
    pub sets: Vec<BTreeSet<Vec<usize>>>,
    pub morphisms_checked: usize,
    /// a morphism and a tuple of its source whose membership is not preserved
    pub violation: Option<(usize, Vec<usize>)>,
}

impl DefinableSheaf {
    pub fn equivariant(&self) -> bool {
        self.violation.is_none()
    }
}

pub fn definable_sheaf(g: &ModelGroupoid, f: &FoFormula, vars: &[String]) -> Result<DefinableSheaf, FolError> {
    if let Some(v) = f.free_vars().into_iter().find(|v| !vars.contains(v)) {
        return Err(FolError::ContextMismatch(format!("free variable {v} is not in the tuple")));
    }
    let sets = g
        .models
        .models
        .iter()
        .map(|m| m.solutions(f, vars))
        .collect::<Result<Vec<_>, _>>()?;
    let mut violation = None;
    'outer: for (i, m) in g.morphisms.iter().enumerate() {
        let src = &sets[g.objects[m.source].model];
        let dst = &sets[g.objects[m.target].model];
        let n = m.map.len();
        for idx in 0..n.pow(vars.len() as u32) {
            let t = super::model::tuple_at(n, vars.len(), idx);
            let image: Vec<usize> = t.iter().map(|&a| m.map[a]).collect();
            if src.contains(&t) != dst.contains(&image) {
                violation = Some((i, t));
                break 'outer;
            }
        }
    }
    Ok(DefinableSheaf {
        vars: vars.to_vec(),
        sets,
        morphisms_checked: g.morphisms.len(),
        violation,
    })
}
