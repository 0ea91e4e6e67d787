use std::fmt;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::model::{enumerate_models, Budget, FinModel};
use super::{FoFormula, FoTheory, FolError, Signature};
use crate::prop::{PropFormula, PropTheory, Valuation};

#[derive(Clone, Debug)]
pub enum Verdict {
    Refuted { countermodel: FinModel },
    ValidUpToBound { n_max: usize, models_checked: usize },
}

impl Verdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Refuted { countermodel } => {
                write!(f, "refuted: countermodel {}", countermodel.to_text())
            }
            Verdict::ValidUpToBound { n_max, models_checked } => write!(
                f,
                "valid-up-to-bound: holds in all {models_checked} models of size <= {n_max}; \
                 this is not a proof, since first-order logic lacks the finite model property"
            ),
        }
    }
}

/// Looks for a model of `t` of size at most `n_max` where `sentence` fails.
pub fn semantic_consequence(t: &FoTheory, sentence: &FoFormula, n_max: usize, budget: Budget) -> Result<Verdict, FolError> {
    if let Some(v) = sentence.free_vars().into_iter().next() {
        return Err(FolError::Unbound(v));
    }
    let models = enumerate_models(t, n_max, budget)?;
    for m in &models.models {
        if !m.holds(sentence)? {
            return Ok(Verdict::Refuted {
                countermodel: m.clone(),
            });
        }
    }
    Ok(Verdict::ValidUpToBound {
        n_max,
        models_checked: models.len(),
    })
}

/// Propositional variables become nullary relations.
pub fn prop_encoding(f: &PropFormula) -> FoFormula {
    match f {
        PropFormula::True => FoFormula::True,
        PropFormula::False => FoFormula::False,
        PropFormula::Var(v) => FoFormula::Rel(v.clone(), vec![]),
        PropFormula::Not(a) => FoFormula::not(prop_encoding(a)),
        PropFormula::And(a, b) => FoFormula::and(prop_encoding(a), prop_encoding(b)),
        PropFormula::Or(a, b) => FoFormula::or(prop_encoding(a), prop_encoding(b)),
        PropFormula::Implies(a, b) => FoFormula::implies(prop_encoding(a), prop_encoding(b)),
    }
}

/// A random formula over `vars` with at most `depth` nested connectives.
pub fn random_prop(rng: &mut StdRng, vars: &[String], depth: usize) -> PropFormula {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..vars.len() + 2) {
            0 => PropFormula::True,
            1 => PropFormula::False,
            i => PropFormula::var(&vars[i - 2]),
        };
    }
    let op = rng.gen_range(0..4);
    let a = random_prop(rng, vars, depth - 1);
    if op == 0 {
        return PropFormula::not(a);
    }
    let b = random_prop(rng, vars, depth - 1);
    match op {
        1 => PropFormula::and(a, b),
        2 => PropFormula::or(a, b),
        _ => PropFormula::implies(a, b),
    }
}

/// Compares first-order satisfaction of the encoding with truth tables on
/// `count` random formulas over `p, q, r`, over every valuation. Returns
/// the number of (formula, valuation) pairs compared or the first
/// disagreement.
pub fn prop_encoding_agrees(seed: u64, count: usize) -> Result<usize, String> {
    let vars: Vec<String> = ["p", "q", "r"].map(String::from).to_vec();
    let mut sig = Signature::default();
    for v in &vars {
        sig.add_relation(v, 0).expect("distinct names");
    }
    let sig = Arc::new(sig);
    let theory = PropTheory::new(vars.clone(), vec![]).expect("three variables");
    let mut rng = StdRng::seed_from_u64(seed);
    let mut compared = 0;
    for _ in 0..count {
        let f = random_prop(&mut rng, &vars, 4);
        let g = prop_encoding(&f);
        for v in theory.valuations() {
            let m = encode_valuation(&sig, v);
            let fo = m.holds(&g).map_err(|e| e.to_string())?;
            if fo != theory.satisfies(&f, v) {
                return Err(format!("{f} at {}", v.display(&vars)));
            }
            compared += 1;
        }
    }
    Ok(compared)
}

/// The one-element structure whose nullary relations follow `v`.
pub fn encode_valuation(sig: &Arc<Signature>, v: Valuation) -> FinModel {
    let relations = (0..sig.relations.len()).map(|i| vec![v.get(i)]).collect();
    FinModel::new(sig.clone(), 1, relations, vec![]).expect("nullary tables")
}
