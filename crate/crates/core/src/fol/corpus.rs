//! The five reference theories.

use super::{parse_fo, FoTheory};

pub const PURE_SETS: &str = "# no symbols\n";

pub const UNARY: &str = "rel R 1\n";

pub const GRAPH: &str = "\
rel E 2
axiom forall x. ~E(x,x)
axiom forall x y. E(x,y) -> E(y,x)
";

pub const LINEAR_ORDER: &str = "\
rel le 2
axiom forall x. le(x,x)
axiom forall x y. le(x,y) & le(y,x) -> x = y
axiom forall x y z. le(x,y) & le(y,z) -> le(x,z)
axiom forall x y. le(x,y) | le(y,x)
";

pub const SUCCESSOR: &str = "\
fun s 1
axiom forall x. s(s(s(x))) = x
";

pub fn pure_sets() -> FoTheory {
    parse_fo(PURE_SETS).expect("corpus theory parses")
}

pub fn unary() -> FoTheory {
    parse_fo(UNARY).expect("corpus theory parses")
}

pub fn graph() -> FoTheory {
    parse_fo(GRAPH).expect("corpus theory parses")
}

pub fn linear_order() -> FoTheory {
    parse_fo(LINEAR_ORDER).expect("corpus theory parses")
}

pub fn successor() -> FoTheory {
    parse_fo(SUCCESSOR).expect("corpus theory parses")
}

pub fn all() -> Vec<(&'static str, FoTheory)> {
    vec![
        ("pure sets", pure_sets()),
        ("unary relation", unary()),
        ("graph", graph()),
        ("linear order", linear_order()),
        ("successor of period 3", successor()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::model::{enumerate_models, Budget};

    #[test]
    fn model_counts_up_to_three() {
        let count = |t: &FoTheory| {
            let ms = enumerate_models(t, 3, Budget::default()).unwrap();
            (ms.len(), ms.representatives.len())
        };
        assert_eq!(count(&pure_sets()), (3, 3));
        assert_eq!(count(&unary()), (2 + 4 + 8, 2 + 3 + 4));
        // simple graphs on labelled vertex sets: 1, 2, 8
        assert_eq!(count(&graph()), (11, 1 + 2 + 4));
        // linear orders: n!
        assert_eq!(count(&linear_order()), (1 + 2 + 6, 3));
        // s³ = id: identity, and on 3 points the two 3-cycles
        assert_eq!(count(&successor()), (1 + 1 + 3, 1 + 1 + 2));
    }
}
