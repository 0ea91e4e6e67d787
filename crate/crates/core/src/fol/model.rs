use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use itertools::Itertools;

use super::{FoFormula, FoTheory, FolError, Signature, Term};

/// `(a₀, …, a_{k-1}) ↦ Σ aᵢ·n^{k-1-i}`
pub fn tuple_index(n: usize, tuple: &[usize]) -> usize {
    tuple.iter().fold(0, |acc, &a| acc * n + a)
}

pub fn tuple_at(n: usize, k: usize, mut index: usize) -> Vec<usize> {
    let mut t = vec![0; k];
    for slot in t.iter_mut().rev() {
        *slot = index % n;
        index /= n;
    }
    t
}

/// A finite structure on `{0, …, size-1}`. Tables are indexed by
/// [`tuple_index`]; nullary symbols have a single entry.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinModel {
    pub signature: Arc<Signature>,
    pub size: usize,
    pub relations: Vec<Vec<bool>>,
    pub functions: Vec<Vec<usize>>,
}

impl FinModel {
    pub fn new(
        signature: Arc<Signature>,
        size: usize,
        relations: Vec<Vec<bool>>,
        functions: Vec<Vec<usize>>,
    ) -> Result<Self, FolError> {
        let shape = |what: &str| FolError::NotAModel(format!("{what} table has the wrong shape"));
        if size == 0 {
            return Err(FolError::NotAModel("empty carrier".into()));
        }
        if relations.len() != signature.relations.len() || functions.len() != signature.functions.len() {
            return Err(shape("symbol"));
        }
        for (r, table) in signature.relations.iter().zip(&relations) {
            if table.len() != size.pow(r.arity as u32) {
                return Err(shape(&r.name));
            }
        }
        for (g, table) in signature.functions.iter().zip(&functions) {
            if table.len() != size.pow(g.arity as u32) || table.iter().any(|&v| v >= size) {
                return Err(shape(&g.name));
            }
        }
        Ok(FinModel {
            signature,
            size,
            relations,
            functions,
        })
    }

    /// Every relation empty and every function constantly `0`.
    pub fn blank(signature: Arc<Signature>, size: usize) -> Self {
        let relations = signature.relations.iter().map(|r| vec![false; size.pow(r.arity as u32)]).collect();
        let functions = signature.functions.iter().map(|g| vec![0; size.pow(g.arity as u32)]).collect();
        FinModel {
            signature,
            size,
            relations,
            functions,
        }
    }

    pub fn relation_holds(&self, r: usize, args: &[usize]) -> bool {
        self.relations[r][tuple_index(self.size, args)]
    }

    pub fn apply(&self, g: usize, args: &[usize]) -> usize {
        self.functions[g][tuple_index(self.size, args)]
    }

    pub fn eval_term(&self, t: &Term, env: &[(String, usize)]) -> Result<usize, FolError> {
        match t {
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(name, _)| name == v)
                .map(|&(_, a)| a)
                .ok_or_else(|| FolError::Unbound(v.clone())),
            Term::App(g, args) => {
                let (gi, _) = self
                    .signature
                    .function(g)
                    .ok_or_else(|| FolError::UnknownSymbol(g.clone()))?;
                let vals = args.iter().map(|a| self.eval_term(a, env)).collect::<Result<Vec<_>, _>>()?;
                Ok(self.apply(gi, &vals))
            }
        }
    }

    /// Tarski semantics; `env` binds at least the free variables, later
    /// entries shadowing earlier ones.
    pub fn satisfies(&self, f: &FoFormula, env: &[(String, usize)]) -> Result<bool, FolError> {
        let mut env = env.to_vec();
        self.sat(f, &mut env)
    }

    fn sat(&self, f: &FoFormula, env: &mut Vec<(String, usize)>) -> Result<bool, FolError> {
        use FoFormula as G;
        Ok(match f {
            G::True => true,
            G::False => false,
            G::Eq(a, b) => self.eval_term(a, env)? == self.eval_term(b, env)?,
            G::Rel(r, args) => {
                let (ri, _) = self
                    .signature
                    .relation(r)
                    .ok_or_else(|| FolError::UnknownSymbol(r.clone()))?;
                let vals = args.iter().map(|a| self.eval_term(a, env)).collect::<Result<Vec<_>, _>>()?;
                self.relation_holds(ri, &vals)
            }
            G::Not(a) => !self.sat(a, env)?,
            G::And(a, b) => self.sat(a, env)? && self.sat(b, env)?,
            G::Or(a, b) => self.sat(a, env)? || self.sat(b, env)?,
            G::Implies(a, b) => !self.sat(a, env)? || self.sat(b, env)?,
            G::Exists(v, a) | G::Forall(v, a) => {
                let exists = matches!(f, G::Exists(..));
                let mut result = !exists;
                for x in 0..self.size {
                    env.push((v.clone(), x));
                    let r = self.sat(a, env);
                    env.pop();
                    if r? == exists {
                        result = exists;
                        break;
                    }
                }
                result
            }
        })
    }

    /// Truth of a sentence.
    pub fn holds(&self, f: &FoFormula) -> Result<bool, FolError> {
        self.satisfies(f, &[])
    }

    pub fn is_model_of(&self, t: &FoTheory) -> Result<bool, FolError> {
        for a in &t.axioms {
            if !self.holds(a)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `φ^M ⊆ M^k` for the variable tuple `vars`.
    pub fn solutions(&self, f: &FoFormula, vars: &[String]) -> Result<BTreeSet<Vec<usize>>, FolError> {
        let k = vars.len();
        let mut out = BTreeSet::new();
        for i in 0..self.size.pow(k as u32) {
            let t = tuple_at(self.size, k, i);
            let env: Vec<(String, usize)> = vars.iter().cloned().zip(t.iter().copied()).collect();
            if self.satisfies(f, &env)? {
                out.insert(t);
            }
        }
        Ok(out)
    }

    /// The structure transported along the bijection `perm`.
    pub fn relabel(&self, perm: &[usize]) -> FinModel {
        let n = self.size;
        let mut out = FinModel::blank(self.signature.clone(), n);
        for (r, table) in self.relations.iter().enumerate() {
            let k = self.signature.relations[r].arity;
            for (i, &v) in table.iter().enumerate() {
                let t: Vec<usize> = tuple_at(n, k, i).into_iter().map(|a| perm[a]).collect();
                out.relations[r][tuple_index(n, &t)] = v;
            }
        }
        for (g, table) in self.functions.iter().enumerate() {
            let k = self.signature.functions[g].arity;
            for (i, &v) in table.iter().enumerate() {
                let t: Vec<usize> = tuple_at(n, k, i).into_iter().map(|a| perm[a]).collect();
                out.functions[g][tuple_index(n, &t)] = perm[v];
            }
        }
        out
    }

    /// Least relabelling under the derived ordering; equal exactly for
    /// isomorphic models.
    pub fn canonical_form(&self) -> FinModel {
        (0..self.size)
            .permutations(self.size)
            .map(|p| self.relabel(&p))
            .min_by(|a, b| (&a.relations, &a.functions).cmp(&(&b.relations, &b.functions)))
            .expect("at least one permutation")
    }

    pub fn to_text(&self) -> String {
        let mut parts = vec![format!("size {}", self.size)];
        for (r, table) in self.relations.iter().enumerate() {
            let sym = &self.signature.relations[r];
            let tuples: Vec<String> = (0..table.len())
                .filter(|&i| table[i])
                .map(|i| format!("({})", tuple_at(self.size, sym.arity, i).iter().join(",")))
                .collect();
            parts.push(format!("{} = {{{}}}", sym.name, tuples.join(" ")));
        }
        for (g, table) in self.functions.iter().enumerate() {
            let sym = &self.signature.functions[g];
            if sym.arity == 0 {
                parts.push(format!("{} = {}", sym.name, table[0]));
            } else {
                parts.push(format!("{} = [{}]", sym.name, table.iter().join(" ")));
            }
        }
        parts.join("; ")
    }
}

/// All bijections `M → N` preserving every symbol in both directions.
pub fn isomorphisms(m: &FinModel, n: &FinModel) -> Vec<Vec<usize>> {
    if m.size != n.size || m.signature != n.signature {
        return Vec::new();
    }
    (0..m.size)
        .permutations(m.size)
        .filter(|p| m.relabel(p) == *n)
        .collect()
}

/// Cap on the number of candidate interpretations examined.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget(pub u128);

impl Default for Budget {
    fn default() -> Self {
        Budget(1 << 22)
    }
}

impl Budget {
    pub const ENV: &'static str = "DUALIS_BUDGET";

    /// Reads `DUALIS_BUDGET`, falling back to the default.
    pub fn from_env() -> Result<Self, String> {
        match std::env::var(Self::ENV) {
            Ok(s) => s
                .trim()
                .parse()
                .map(Budget)
                .map_err(|_| format!("{} must be a positive integer, got {s:?}", Self::ENV)),
            Err(_) => Ok(Budget::default()),
        }
    }
}

/// Candidate interpretations on a carrier of size `n`, saturating.
pub fn candidate_count(sig: &Signature, n: usize) -> u128 {
    let mut total: u128 = 1;
    let pow = |base: u128, exp: u128| -> u128 {
        let mut acc: u128 = 1;
        for _ in 0..exp {
            acc = acc.saturating_mul(base);
            if acc == u128::MAX {
                break;
            }
        }
        acc
    };
    for r in &sig.relations {
        total = total.saturating_mul(pow(2, pow(n as u128, r.arity as u128)));
    }
    for g in &sig.functions {
        total = total.saturating_mul(pow(n as u128, pow(n as u128, g.arity as u128)));
    }
    total
}

#[derive(Clone, Debug)]
pub struct ModelList {
    pub models: Vec<FinModel>,
    /// iso class of each model
    pub class_of: Vec<usize>,
    /// first model of each class
    pub representatives: Vec<usize>,
    pub candidates: u128,
}

impl ModelList {
    pub fn is_representative(&self, i: usize) -> bool {
        self.representatives[self.class_of[i]] == i
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }
}

/// Every model of `t` on carriers `1..=n_max`, by exhaustive search over
/// interpretation tables. Fails up front if the search exceeds `budget`.
pub fn enumerate_models(t: &FoTheory, n_max: usize, budget: Budget) -> Result<ModelList, FolError> {
    let sig = Arc::new(t.signature.clone());
    let needed = (1..=n_max).fold(0u128, |acc, n| acc.saturating_add(candidate_count(&sig, n)));
    if needed > budget.0 {
        return Err(FolError::BudgetExceeded {
            needed,
            budget: budget.0,
        });
    }
    let mut models = Vec::new();
    for n in 1..=n_max {
        let mut m = FinModel::blank(sig.clone(), n);
        loop {
            if m.is_model_of(t)? {
                models.push(m.clone());
            }
            if !advance(&mut m) {
                break;
            }
        }
    }
    let mut classes: HashMap<FinModel, usize> = HashMap::new();
    let mut class_of = Vec::with_capacity(models.len());
    let mut representatives = Vec::new();
    for (i, m) in models.iter().enumerate() {
        let c = *classes.entry(m.canonical_form()).or_insert_with(|| {
            representatives.push(i);
            representatives.len() - 1
        });
        class_of.push(c);
    }
    Ok(ModelList {
        models,
        class_of,
        representatives,
        candidates: needed,
    })
}

/// Odometer step over all table cells; false after the last candidate.
fn advance(m: &mut FinModel) -> bool {
    for table in m.relations.iter_mut() {
        for cell in table.iter_mut() {
            *cell = !*cell;
            if *cell {
                return true;
            }
        }
    }
    let n = m.size;
    for table in m.functions.iter_mut() {
        for cell in table.iter_mut() {
            *cell += 1;
            if *cell < n {
                return true;
            }
            *cell = 0;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::parse_fo;

    #[test]
    fn satisfies_examples() {
        let t = parse_fo("rel R 2").unwrap();
        let sig = Arc::new(t.signature.clone());
        let mut m = FinModel::blank(sig, 2);
        m.relations[0][tuple_index(2, &[0, 1])] = true;
        assert!(m.holds(&FoFormula::True).unwrap());
        assert!(m.holds(&t.parse_formula("exists x y. R(x,y)").unwrap()).unwrap());
        assert!(!m.holds(&t.parse_formula("exists x. R(x,x)").unwrap()).unwrap());
        let open = t.parse_formula("R(x,y)").unwrap();
        assert_eq!(m.satisfies(&open, &[]).unwrap_err(), FolError::Unbound("x".into()));
        assert!(m.satisfies(&open, &[("x".into(), 0), ("y".into(), 1)]).unwrap());

        let t = parse_fo("fun s 1").unwrap();
        let m = FinModel::new(Arc::new(t.signature.clone()), 3, vec![], vec![vec![1, 2, 0]]).unwrap();
        assert!(m.holds(&t.parse_formula("forall x. s(s(s(x))) = x").unwrap()).unwrap());
        assert!(!m.holds(&t.parse_formula("exists x. s(x) = x").unwrap()).unwrap());
    }

    #[test]
    fn enumeration_examples() {
        let t = parse_fo("rel R 1").unwrap();
        assert_eq!(enumerate_models(&t, 1, Budget::default()).unwrap().len(), 2);
        let t = parse_fo("rel R 1\naxiom exists x. R(x)\naxiom exists x. ~R(x)").unwrap();
        let ms = enumerate_models(&t, 2, Budget::default()).unwrap();
        assert_eq!(ms.len(), 2);
        assert!(ms.models.iter().all(|m| m.size == 2));
        assert_eq!(ms.representatives.len(), 1);
        let t = parse_fo("rel R 1\naxiom false").unwrap();
        assert!(enumerate_models(&t, 3, Budget::default()).unwrap().is_empty());
    }

    #[test]
    fn budget_is_enforced() {
        let t = parse_fo("rel E 2").unwrap();
        let e = enumerate_models(&t, 3, Budget(100)).unwrap_err();
        assert_eq!(e, FolError::BudgetExceeded { needed: 2 + 16 + 512, budget: 100 });
    }

    #[test]
    fn isomorphism_examples() {
        let pure = parse_fo("").unwrap();
        let sig = Arc::new(pure.signature.clone());
        let m = FinModel::blank(sig.clone(), 3);
        assert_eq!(isomorphisms(&m, &m).len(), 6);
        assert!(isomorphisms(&m, &FinModel::blank(sig, 2)).is_empty());
        let t = parse_fo("rel R 1").unwrap();
        let m = FinModel::new(Arc::new(t.signature.clone()), 2, vec![vec![true, false]], vec![]).unwrap();
        assert_eq!(isomorphisms(&m, &m), vec![vec![0, 1]]);
    }

    #[test]
    fn classes_match_isomorphism_search() {
        for text in ["rel E 2\naxiom forall x. ~E(x,x)", "fun f 1", "rel R 1\nconst c"] {
            let t = parse_fo(text).unwrap();
            let ms = enumerate_models(&t, 3, Budget::default()).unwrap();
            for i in 0..ms.len() {
                for j in 0..ms.len() {
                    let iso = !isomorphisms(&ms.models[i], &ms.models[j]).is_empty();
                    assert_eq!(iso, ms.class_of[i] == ms.class_of[j], "{text}: {i} {j}");
                }
            }
        }
    }

    #[test]
    fn tuple_indexing_round_trips() {
        for i in 0..27 {
            assert_eq!(tuple_index(3, &tuple_at(3, 3, i)), i);
        }
        assert_eq!(tuple_index(3, &[]), 0);
    }
}
