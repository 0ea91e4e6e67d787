//! Propositional formulas, theories, truth tables and evaluation in finite
//! Heyting algebras.

mod stone;

pub use stone::{
    clop, duality_naturality, homs_to_two, lindenbaum, stone_round_trip, stone_spec, Clopens, Lindenbaum,
    StoneRoundTrip, StoneSpace, MAX_MODELS,
};

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::lex::{Cursor, SyntaxError, Token};
use crate::order::HeytingAlgebra;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PropError {
    #[error("line {line}: {error}")]
    Syntax { line: usize, error: SyntaxError },
    #[error("line {line}: undeclared variable {name:?}")]
    Undeclared { line: usize, name: String },
    #[error("line {line}: {message}")]
    BadLine { line: usize, message: String },
    #[error("theory has no models")]
    Inconsistent,
    #[error("theory has {0} models; at most {max} are supported", max = MAX_MODELS)]
    TooManyModels(usize),
    #[error("too many variables ({0}); at most 16 are supported")]
    TooManyVariables(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PropFormula {
    True,
    False,
    Var(String),
    Not(Box<PropFormula>),
    And(Box<PropFormula>, Box<PropFormula>),
    Or(Box<PropFormula>, Box<PropFormula>),
    Implies(Box<PropFormula>, Box<PropFormula>),
}

use PropFormula as F;

impl PropFormula {
    pub fn var(name: &str) -> Self {
        F::Var(name.to_string())
    }

    pub fn not(a: F) -> Self {
        F::Not(Box::new(a))
    }

    pub fn and(a: F, b: F) -> Self {
        F::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: F, b: F) -> Self {
        F::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: F, b: F) -> Self {
        F::Implies(Box::new(a), Box::new(b))
    }

    /// Variables in order of first occurrence.
    pub fn variables(&self) -> Vec<String> {
        fn walk(f: &F, out: &mut Vec<String>) {
            match f {
                F::True | F::False => {}
                F::Var(v) => {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
                F::Not(a) => walk(a, out),
                F::And(a, b) | F::Or(a, b) | F::Implies(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// Two-valued evaluation.
    pub fn eval(&self, value: &impl Fn(&str) -> bool) -> bool {
        match self {
            F::True => true,
            F::False => false,
            F::Var(v) => value(v),
            F::Not(a) => !a.eval(value),
            F::And(a, b) => a.eval(value) && b.eval(value),
            F::Or(a, b) => a.eval(value) || b.eval(value),
            F::Implies(a, b) => !a.eval(value) || b.eval(value),
        }
    }

    /// Evaluation in a Heyting algebra, with `¬a = a → ⊥`.
    pub fn eval_in(&self, h: &HeytingAlgebra, value: &impl Fn(&str) -> usize) -> usize {
        match self {
            F::True => h.top(),
            F::False => h.bot(),
            F::Var(v) => value(v),
            F::Not(a) => h.neg(a.eval_in(h, value)),
            F::And(a, b) => h.meet(a.eval_in(h, value), b.eval_in(h, value)),
            F::Or(a, b) => h.join(a.eval_in(h, value), b.eval_in(h, value)),
            F::Implies(a, b) => h.imp(a.eval_in(h, value), b.eval_in(h, value)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            F::Implies(..) => 1,
            F::Or(..) => 2,
            F::And(..) => 3,
            F::Not(_) => 4,
            _ => 5,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = self.precedence() < min;
        if paren {
            write!(f, "(")?;
        }
        match self {
            F::True => write!(f, "true")?,
            F::False => write!(f, "false")?,
            F::Var(v) => write!(f, "{v}")?,
            F::Not(a) => {
                write!(f, "~")?;
                a.write_at(f, 4)?;
            }
            F::And(a, b) => {
                a.write_at(f, 3)?;
                write!(f, " & ")?;
                b.write_at(f, 4)?;
            }
            F::Or(a, b) => {
                a.write_at(f, 2)?;
                write!(f, " | ")?;
                b.write_at(f, 3)?;
            }
            F::Implies(a, b) => {
                a.write_at(f, 2)?;
                write!(f, " -> ")?;
                b.write_at(f, 1)?;
            }
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for PropFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

/// Parses `~` > `&` > `|` > `->`, with `->` associating to the right.
pub fn parse_prop(text: &str) -> Result<PropFormula, SyntaxError> {
    let mut c = Cursor::new(text)?;
    let f = implication(&mut c)?;
    if !c.at_end() {
        return Err(c.error("expected an operator or end of input"));
    }
    Ok(f)
}

fn implication(c: &mut Cursor) -> Result<F, SyntaxError> {
    let lhs = disjunction(c)?;
    if c.eat(&Token::Arrow) {
        Ok(F::implies(lhs, implication(c)?))
    } else {
        Ok(lhs)
    }
}

fn disjunction(c: &mut Cursor) -> Result<F, SyntaxError> {
    let mut f = conjunction(c)?;
    while c.eat(&Token::Or) {
        f = F::or(f, conjunction(c)?);
    }
    Ok(f)
}

fn conjunction(c: &mut Cursor) -> Result<F, SyntaxError> {
    let mut f = unary(c)?;
    while c.eat(&Token::And) {
        f = F::and(f, unary(c)?);
    }
    Ok(f)
}

fn unary(c: &mut Cursor) -> Result<F, SyntaxError> {
    if c.eat(&Token::Not) {
        return Ok(F::not(unary(c)?));
    }
    match c.peek().cloned() {
        Some(Token::LParen) => {
            c.next();
            let f = implication(c)?;
            c.expect(&Token::RParen)?;
            Ok(f)
        }
        Some(Token::Ident(name)) => {
            c.next();
            Ok(match name.as_str() {
                "true" => F::True,
                "false" => F::False,
                _ => F::Var(name),
            })
        }
        _ => Err(c.error("expected a formula")),
    }
}

/// A truth assignment; bit `i` is the value of variable `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Valuation(pub u32);

impl Valuation {
    pub fn get(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn display(self, vars: &[String]) -> String {
        let parts: Vec<String> = vars
            .iter()
            .enumerate()
            .map(|(i, v)| format!("{v}={}", self.get(i) as u8))
            .collect();
        parts.join(" ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropTheory {
    pub vars: Vec<String>,
    pub axioms: Vec<PropFormula>,
}

impl PropTheory {
    pub fn new(vars: Vec<String>, axioms: Vec<PropFormula>) -> Result<Self, PropError> {
        if vars.len() > 16 {
            return Err(PropError::TooManyVariables(vars.len()));
        }
        for (i, a) in axioms.iter().enumerate() {
            if let Some(v) = a.variables().into_iter().find(|v| !vars.contains(v)) {
                return Err(PropError::Undeclared { line: i + 1, name: v });
            }
        }
        Ok(PropTheory { vars, axioms })
    }

    /// `vars p q r`, then one axiom per line; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, PropError> {
        let mut vars = None;
        let mut axioms = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix("vars") {
                if vars.is_some() {
                    return Err(PropError::BadLine {
                        line,
                        message: "duplicate vars line".into(),
                    });
                }
                vars = Some(rest.split_whitespace().map(String::from).collect::<Vec<_>>());
                continue;
            }
            let Some(declared) = &vars else {
                return Err(PropError::BadLine {
                    line,
                    message: "axiom before the vars line".into(),
                });
            };
            let offset = raw.find(body).unwrap_or(0);
            let f = parse_prop(body).map_err(|mut error| {
                error.column += offset;
                PropError::Syntax { line, error }
            })?;
            if let Some(name) = f.variables().into_iter().find(|v| !declared.contains(v)) {
                return Err(PropError::Undeclared { line, name });
            }
            axioms.push(f);
        }
        let vars = vars.ok_or(PropError::BadLine {
            line: 1,
            message: "missing vars line".into(),
        })?;
        Self::new(vars, axioms)
    }

    pub fn satisfies(&self, f: &PropFormula, v: Valuation) -> bool {
        f.eval(&|name: &str| {
            let i = self.vars.iter().position(|x| x == name).expect("declared variable");
            v.get(i)
        })
    }

    pub fn valuations(&self) -> impl Iterator<Item = Valuation> {
        (0u32..1 << self.vars.len()).map(Valuation)
    }
}

/// All valuations satisfying every axiom, in increasing bit order.
pub fn models_of(t: &PropTheory) -> Vec<Valuation> {
    t.valuations()
        .filter(|&v| t.axioms.iter().all(|a| t.satisfies(a, v)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validity {
    Valid,
    /// a valuation into the algebra and the value it gives
    Counter { valuation: BTreeMap<String, usize>, value: usize },
}

/// Whether `f` evaluates to `⊤` under every valuation in `h`.
pub fn heyting_validity(f: &PropFormula, h: &HeytingAlgebra) -> Validity {
    let vars = f.variables();
    let n = h.len();
    let mut digits = vec![0usize; vars.len()];
    loop {
        let lookup = |name: &str| digits[vars.iter().position(|v| v == name).expect("collected")];
        let value = f.eval_in(h, &lookup);
        if value != h.top() {
            return Validity::Counter {
                valuation: vars.iter().cloned().zip(digits.iter().copied()).collect(),
                value,
            };
        }
        let mut i = 0;
        loop {
            if i == digits.len() {
                return Validity::Valid;
            }
            digits[i] += 1;
            if digits[i] < n {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::{heyting_from_lattice, BooleanAlgebra, DistLattice, Lattice};
    use proptest::prelude::*;

    fn p(s: &str) -> PropFormula {
        parse_prop(s).unwrap()
    }

    #[test]
    fn parses_precedence_and_associativity() {
        assert_eq!(p("p & (q | ~p)"), F::and(F::var("p"), F::or(F::var("q"), F::not(F::var("p")))));
        assert_eq!(p("p -> q -> p"), F::implies(F::var("p"), F::implies(F::var("q"), F::var("p"))));
        assert_eq!(p("p | q & r"), F::or(F::var("p"), F::and(F::var("q"), F::var("r"))));
        assert_eq!(p("a & b & c"), F::and(F::and(F::var("a"), F::var("b")), F::var("c")));
        assert_eq!(p("~~true"), F::not(F::not(F::True)));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse_prop("p & | q").unwrap_err();
        assert_eq!(e.column, 5);
        assert!(parse_prop("(p").is_err());
        assert!(parse_prop("p q").is_err());
        assert!(parse_prop("").is_err());
    }

    #[test]
    fn printer_uses_minimal_parentheses() {
        assert_eq!(p("(p -> q) -> p").to_string(), "(p -> q) -> p");
        assert_eq!(p("p -> (q -> p)").to_string(), "p -> q -> p");
        assert_eq!(p("(a | b) & ~(c & d)").to_string(), "(a | b) & ~(c & d)");
        assert_eq!(p("a & (b & c)").to_string(), "a & (b & c)");
    }

    fn arb_formula() -> impl Strategy<Value = PropFormula> {
        let leaf = prop_oneof![
            Just(F::True),
            Just(F::False),
            prop::sample::select(vec!["p", "q", "r"]).prop_map(F::var),
        ];
        leaf.prop_recursive(5, 40, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(F::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| F::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| F::or(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| F::implies(a, b)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(f in arb_formula()) {
            prop_assert_eq!(parse_prop(&f.to_string()).unwrap(), f);
        }

        #[test]
        fn two_valued_agrees_with_heyting_two(f in arb_formula()) {
            let two = heyting_from_lattice(DistLattice::new(Lattice::two()).unwrap());
            let t = PropTheory::new(vec!["p".into(), "q".into(), "r".into()], vec![]).unwrap();
            let tautology = t.valuations().all(|v| t.satisfies(&f, v));
            prop_assert_eq!(heyting_validity(&f, &two) == Validity::Valid, tautology);
        }

        #[test]
        fn boolean_validity_matches_two(f in arb_formula()) {
            let b = BooleanAlgebra::powerset(2);
            let two = heyting_from_lattice(DistLattice::new(Lattice::two()).unwrap());
            prop_assert_eq!(
                heyting_validity(&f, b.heyting()) == Validity::Valid,
                heyting_validity(&f, &two) == Validity::Valid
            );
        }
    }

    #[test]
    fn models_of_examples() {
        let t = PropTheory::parse("vars p\n").unwrap();
        assert_eq!(models_of(&t).len(), 2);
        let t = PropTheory::parse("# comment\nvars p q\np | q\n").unwrap();
        assert_eq!(models_of(&t), vec![Valuation(1), Valuation(2), Valuation(3)]);
        let t = PropTheory::parse("vars p\np\n~p").unwrap();
        assert!(models_of(&t).is_empty());
    }

    #[test]
    fn theory_errors() {
        assert!(matches!(PropTheory::parse("vars p\nq"), Err(PropError::Undeclared { line: 2, .. })));
        assert!(matches!(PropTheory::parse("p"), Err(PropError::BadLine { line: 1, .. })));
        let e = PropTheory::parse("vars p\n  p & | p").unwrap_err();
        assert!(matches!(e, PropError::Syntax { line: 2, error } if error.column == 7));
    }

    #[test]
    fn heyting_examples() {
        let h = heyting_from_lattice(DistLattice::new(Lattice::chain(3)).unwrap());
        assert_eq!(heyting_validity(&p("p -> p"), &h), Validity::Valid);
        let Validity::Counter { valuation, value } = heyting_validity(&p("((p -> q) -> p) -> p"), &h) else {
            panic!("Peirce fails intuitionistically")
        };
        assert_eq!(value, 1);
        assert_eq!(valuation["p"], 1);
        assert_eq!(valuation["q"], 0);
        assert!(matches!(heyting_validity(&p("p | ~p"), &h), Validity::Counter { .. }));
    }
}
