//! Definable sets by formula depth, deduplicated by their extensions across
//! a fixed list of models.
//!
//! A formula in context `c` has free variables among `x0 … x{c-1}`; its
//! extension is one bit per model and tuple of `M^c`, concatenated. The
//! quantified variable of a formula in context `c` is always `x{c}`.

use std::collections::{BTreeSet, HashMap};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use super::groupoid::{label_name, ModelGroupoid};
use super::model::{tuple_at, FinModel};
use super::{FoFormula, FolError, Signature, Term};

type Bits = Vec<u64>;

fn get(bits: &Bits, i: usize) -> bool {
    bits[i / 64] >> (i % 64) & 1 == 1
}

fn set(bits: &mut Bits, i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

#[derive(Clone, Debug)]
enum Node {
    Atom(FoFormula),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    /// body in the next context
    Exists(usize),
    Forall(usize),
}

#[derive(Clone, Debug)]
pub struct Class {
    pub bits: Bits,
    pub depth: usize,
    node: Node,
}

#[derive(Clone, Debug)]
pub struct Context {
    pub vars: usize,
    /// first bit of each model
    pub offsets: Vec<usize>,
    pub len: usize,
    pub classes: Vec<Class>,
    index: HashMap<Bits, usize>,
}

impl Context {
    fn words(&self) -> usize {
        self.len.div_ceil(64).max(1)
    }

    pub fn bit(&self, model: usize, tuple: &[usize], size: usize) -> usize {
        self.offsets[model] + super::model::tuple_index(size, tuple)
    }

    fn insert(&mut self, bits: Bits, depth: usize, node: Node) -> bool {
        if self.index.contains_key(&bits) {
            return false;
        }
        self.index.insert(bits.clone(), self.classes.len());
        self.classes.push(Class { bits, depth, node });
        true
    }
}

#[derive(Clone, Debug)]
pub struct Definables {
    pub depth: usize,
    pub contexts: Vec<Context>,
    sizes: Vec<usize>,
}

pub fn var(i: usize) -> String {
    label_name(i)
}

/// Terms of depth at most one over `x0 … x{c-1}` and the constants.
fn terms(sig: &Signature, c: usize) -> Vec<Term> {
    let mut base: Vec<Term> = (0..c).map(|i| Term::Var(var(i))).collect();
    for g in sig.functions.iter().filter(|g| g.arity == 0) {
        base.push(Term::App(g.name.clone(), vec![]));
    }
    let mut out = base.clone();
    for g in sig.functions.iter().filter(|g| g.arity > 0) {
        for args in tuples_of(&base, g.arity) {
            out.push(Term::App(g.name.clone(), args));
        }
    }
    out
}

fn tuples_of<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    if items.is_empty() {
        return if k == 0 { vec![vec![]] } else { vec![] };
    }
    (0..items.len().pow(k as u32))
        .map(|i| tuple_at(items.len(), k, i).into_iter().map(|j| items[j].clone()).collect())
        .collect()
}

fn atoms(sig: &Signature, c: usize) -> Vec<FoFormula> {
    let ts = terms(sig, c);
    let mut out = vec![FoFormula::True, FoFormula::False];
    for i in 0..ts.len() {
        for j in i + 1..ts.len() {
            out.push(FoFormula::Eq(ts[i].clone(), ts[j].clone()));
        }
    }
    for r in &sig.relations {
        for args in tuples_of(&ts, r.arity) {
            out.push(FoFormula::Rel(r.name.clone(), args));
        }
    }
    out
}

impl Definables {
    /// Contexts `0..=max_vars`; every formula of depth at most `depth`
    /// whose variables stay within `x0 … x{max_vars-1}` is represented.
    pub fn new(
        sig: &Signature,
        models: &[FinModel],
        max_vars: usize,
        depth: usize,
        budget: usize,
    ) -> Result<Self, FolError> {
        let sizes: Vec<usize> = models.iter().map(|m| m.size).collect();
        let mut contexts: Vec<Context> = (0..=max_vars)
            .map(|c| {
                let mut offsets = Vec::new();
                let mut len = 0;
                for &n in &sizes {
                    offsets.push(len);
                    len += n.pow(c as u32);
                }
                Context {
                    vars: c,
                    offsets,
                    len,
                    classes: Vec::new(),
                    index: HashMap::new(),
                }
            })
            .collect();
        let mut total = 0;
        for (c, ctx) in contexts.iter_mut().enumerate() {
            let names: Vec<String> = (0..c).map(var).collect();
            for a in atoms(sig, c) {
                let mut bits = vec![0u64; ctx.words()];
                for (mi, m) in models.iter().enumerate() {
                    for t in &m.solutions(&a, &names)? {
                        set(&mut bits, ctx.offsets[mi] + super::model::tuple_index(m.size, t));
                    }
                }
                total += ctx.insert(bits, 0, Node::Atom(a)) as usize;
            }
        }
        for d in 1..=depth {
            let before: Vec<usize> = contexts.iter().map(|x| x.classes.len()).collect();
            let fresh: Vec<Vec<usize>> = contexts
                .iter()
                .map(|x| (0..x.classes.len()).filter(|&i| x.classes[i].depth == d - 1).collect())
                .collect();
            for c in 0..=max_vars {
                let w = contexts[c].words();
                let mask = full_mask(contexts[c].len, w);
                let mut buf = vec![0u64; w];
                let mut offer = |ctx: &mut Context, buf: &Bits, node: Node| -> Result<(), FolError> {
                    if !ctx.index.contains_key(buf) {
                        ctx.insert(buf.clone(), d, node);
                        total += 1;
                        if total > budget {
                            return Err(FolError::DepthBudgetExceeded { depth: d, budget });
                        }
                    }
                    Ok(())
                };
                for &a in &fresh[c] {
                    let x = contexts[c].classes[a].bits.clone();
                    for i in 0..w {
                        buf[i] = !x[i] & mask[i];
                    }
                    offer(&mut contexts[c], &buf, Node::Not(a))?;
                    for b in 0..before[c] {
                        let ops: [(fn(u64, u64) -> u64, Node); 4] = [
                            (|x, y| x & y, Node::And(a, b)),
                            (|x, y| x | y, Node::Or(a, b)),
                            (|x, y| !x | y, Node::Implies(a, b)),
                            (|x, y| !y | x, Node::Implies(b, a)),
                        ];
                        for (op, node) in ops {
                            let y = &contexts[c].classes[b].bits;
                            for i in 0..w {
                                buf[i] = op(x[i], y[i]) & mask[i];
                            }
                            offer(&mut contexts[c], &buf, node)?;
                        }
                    }
                }
                if c < max_vars {
                    for &a in &fresh[c + 1] {
                        let mut ex = vec![0u64; w];
                        let mut all = vec![0u64; w];
                        {
                            let inner = &contexts[c + 1];
                            let body = &inner.classes[a].bits;
                            for (mi, &n) in sizes.iter().enumerate() {
                                for t in 0..n.pow(c as u32) {
                                    let hits = (0..n).filter(|&v| get(body, inner.offsets[mi] + t * n + v)).count();
                                    if hits > 0 {
                                        set(&mut ex, contexts[c].offsets[mi] + t);
                                    }
                                    if hits == n {
                                        set(&mut all, contexts[c].offsets[mi] + t);
                                    }
                                }
                            }
                        }
                        offer(&mut contexts[c], &ex, Node::Exists(a))?;
                        offer(&mut contexts[c], &all, Node::Forall(a))?;
                    }
                }
            }
        }
        Ok(Definables { depth, contexts, sizes })
    }

    pub fn class_count(&self) -> usize {
        self.contexts.iter().map(|c| c.classes.len()).sum()
    }

    /// A formula realizing class `i` of context `c`.
    pub fn formula(&self, c: usize, i: usize) -> FoFormula {
        match &self.contexts[c].classes[i].node {
            Node::Atom(f) => f.clone(),
            Node::Not(a) => FoFormula::not(self.formula(c, *a)),
            Node::And(a, b) => FoFormula::and(self.formula(c, *a), self.formula(c, *b)),
            Node::Or(a, b) => FoFormula::or(self.formula(c, *a), self.formula(c, *b)),
            Node::Implies(a, b) => FoFormula::implies(self.formula(c, *a), self.formula(c, *b)),
            Node::Exists(a) => FoFormula::exists(&var(c), self.formula(c + 1, *a)),
            Node::Forall(a) => FoFormula::forall(&var(c), self.formula(c + 1, *a)),
        }
    }

    /// The extension of class `i` in model `m`.
    pub fn extension(&self, c: usize, i: usize, m: usize) -> BTreeSet<Vec<usize>> {
        let ctx = &self.contexts[c];
        let n = self.sizes[m];
        (0..n.pow(c as u32))
            .filter(|&t| get(&ctx.classes[i].bits, ctx.offsets[m] + t))
            .map(|t| tuple_at(n, c, t))
            .collect()
    }

    /// Re-evaluates a sample of classes with [`FinModel::solutions`]; returns
    /// the number checked or the first disagreeing formula.
    pub fn verify_against_tarski(&self, models: &[FinModel], sample: usize, seed: u64) -> Result<usize, String> {
        let mut ids: Vec<(usize, usize)> = self
            .contexts
            .iter()
            .enumerate()
            .flat_map(|(c, ctx)| (0..ctx.classes.len()).map(move |i| (c, i)))
            .collect();
        ids.shuffle(&mut StdRng::seed_from_u64(seed));
        ids.truncate(sample);
        for &(c, i) in &ids {
            let f = self.formula(c, i);
            let names: Vec<String> = (0..c).map(var).collect();
            for (mi, m) in models.iter().enumerate() {
                let direct = m.solutions(&f, &names).map_err(|e| e.to_string())?;
                if direct != self.extension(c, i, mi) {
                    return Err(format!("{f} in model {mi}"));
                }
            }
        }
        Ok(ids.len())
    }
}

fn full_mask(len: usize, words: usize) -> Bits {
    let mut m = vec![u64::MAX; words];
    let spare = words * 64 - len;
    if spare > 0 {
        m[words - 1] >>= spare;
    }
    if len == 0 {
        m.fill(0);
    }
    m
}

/// Outcome of the equivariance checks over all enumerated classes.
#[derive(Clone, Debug)]
pub struct InvarianceReport {
    pub classes: usize,
    pub isomorphisms: usize,
    /// formula, source model, target model, map, tuple
    pub failure: Option<(String, usize, usize, Vec<usize>, Vec<usize>)>,
}

/// Checks that every isomorphism `i: M → N` between the groupoid's models
/// maps `φ^M` onto `φ^N`, for every class in `defs`.
///
/// Each isomorphism links bit `(M, t)` to bit `(N, i(t))`; a class is
/// preserved by all of them exactly when it is constant on the connected
/// components of these links.
pub fn iso_invariance(g: &ModelGroupoid, defs: &Definables) -> InvarianceReport {
    let isos: Vec<(usize, usize, &Vec<usize>)> = g
        .isos
        .iter()
        .flat_map(|(&(a, b), maps)| maps.iter().map(move |m| (a, b, m)))
        .collect();
    let mut classes = 0;
    for (c, ctx) in defs.contexts.iter().enumerate() {
        let mut parent: Vec<usize> = (0..ctx.len).collect();
        let mut edges = Vec::new();
        for &(a, b, map) in &isos {
            let n = map.len();
            for t in 0..n.pow(c as u32) {
                let tuple = tuple_at(n, c, t);
                let image: Vec<usize> = tuple.iter().map(|&x| map[x]).collect();
                let (p, q) = (ctx.bit(a, &tuple, n), ctx.bit(b, &image, n));
                edges.push((p, q, a, b, map, tuple));
                let (rp, rq) = (find(&mut parent, p), find(&mut parent, q));
                parent[rp.max(rq)] = rp.min(rq);
            }
        }
        let roots: Vec<usize> = (0..ctx.len).map(|p| find(&mut parent, p)).collect();
        for (i, class) in ctx.classes.iter().enumerate() {
            classes += 1;
            if (0..ctx.len).any(|p| get(&class.bits, p) != get(&class.bits, roots[p])) {
                let (_, _, a, b, map, tuple) = edges
                    .iter()
                    .find(|(p, q, ..)| get(&class.bits, *p) != get(&class.bits, *q))
                    .expect("a component that is not constant has a disagreeing edge");
                return InvarianceReport {
                    classes,
                    isomorphisms: isos.len(),
                    failure: Some((defs.formula(c, i).to_string(), *a, *b, (*map).clone(), tuple.clone())),
                };
            }
        }
    }
    InvarianceReport {
        classes,
        isomorphisms: isos.len(),
        failure: None,
    }
}

fn find(p: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while p[r] != r {
        r = p[r];
    }
    let mut y = x;
    while p[y] != r {
        let next = p[y];
        p[y] = r;
        y = next;
    }
    r
}

/// For each class in a context of at most `g.label_count` variables, every
/// morphism with source in `V_{φ(x̄)}` has its target there too. Returns
/// the number of opens checked or a formula and morphism index.
pub fn morphism_stability(g: &ModelGroupoid, defs: &Definables) -> Result<usize, (String, usize)> {
    let mut checked = 0;
    for (c, ctx) in defs.contexts.iter().enumerate().take(g.label_count + 1) {
        // membership bit of each object, or None when unlabelled on x̄
        let slot: Vec<Option<usize>> = g
            .objects
            .iter()
            .map(|o| {
                let tuple: Option<Vec<usize>> = o.labels[..c].iter().copied().collect();
                tuple.map(|t| ctx.bit(o.model, &t, g.models.models[o.model].size))
            })
            .collect();
        let mut pairs: HashMap<(Option<usize>, Option<usize>), usize> = HashMap::new();
        for (k, m) in g.morphisms.iter().enumerate() {
            pairs.entry((slot[m.source], slot[m.target])).or_insert(k);
        }
        for (i, class) in ctx.classes.iter().enumerate() {
            checked += 1;
            let member = |s: Option<usize>| s.is_some_and(|p| get(&class.bits, p));
            if let Some((_, &k)) = pairs.iter().find(|((s, t), _)| member(*s) && !member(*t)) {
                return Err((defs.formula(c, i).to_string(), k));
            }
        }
    }
    Ok(checked)
}
