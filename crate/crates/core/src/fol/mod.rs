//! Single-sorted first-order logic over finite models: syntax, theories,
//! model enumeration, the groupoid of labelled models, definable sets and
//! the categories built from them.

pub mod consequence;
pub mod corpus;
pub mod definable;
pub mod elements;
pub mod groupoid;
pub mod model;

use std::fmt;

use thiserror::Error;

use crate::lex::{Cursor, SyntaxError, Token};

pub use consequence::{prop_encoding, prop_encoding_agrees, semantic_consequence, Verdict};
pub use definable::{iso_invariance, morphism_stability, Definables, InvarianceReport};
pub use elements::{category_of_elements, diagram_category, DiagramReport, ElementsCategory};
pub use groupoid::{
    basic_open_algebra_check, definable_sheaf, groupoid, Convention, DefinableSheaf, Labelling,
    ModelGroupoid, Morphism,
};
pub use model::{enumerate_models, isomorphisms, Budget, FinModel, ModelList};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FolError {
    #[error("line {line}: {error}")]
    Syntax { line: usize, error: SyntaxError },
    #[error("line {line}, column {column}: {symbol} has arity {expected}, applied to {found}")]
    Arity {
        line: usize,
        column: usize,
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: {message}")]
    BadLine { line: usize, message: String },
    #[error("duplicate symbol {0:?}")]
    DuplicateSymbol(String),
    #[error("line {line}: axiom has free variable {name:?}")]
    FreeVariable { line: usize, name: String },
    #[error("unbound variable {0:?}")]
    Unbound(String),
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error("search budget exceeded: {needed} candidates, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("definable-set budget exceeded at depth {depth}: more than {budget} classes")]
    DepthBudgetExceeded { depth: usize, budget: usize },
    #[error("context mismatch: {0}")]
    ContextMismatch(String),
    #[error("model does not satisfy the theory: {0}")]
    NotAModel(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

/// Relation and function symbols; constants are nullary functions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Signature {
    pub relations: Vec<Symbol>,
    pub functions: Vec<Symbol>,
}

impl Signature {
    pub fn relation(&self, name: &str) -> Option<(usize, usize)> {
        self.relations.iter().position(|s| s.name == name).map(|i| (i, self.relations[i].arity))
    }

    pub fn function(&self, name: &str) -> Option<(usize, usize)> {
        self.functions.iter().position(|s| s.name == name).map(|i| (i, self.functions[i].arity))
    }

    fn taken(&self, name: &str) -> bool {
        self.relation(name).is_some() || self.function(name).is_some() || KEYWORDS.contains(&name)
    }

    pub fn add_relation(&mut self, name: &str, arity: usize) -> Result<(), FolError> {
        if self.taken(name) {
            return Err(FolError::DuplicateSymbol(name.into()));
        }
        self.relations.push(Symbol { name: name.into(), arity });
        Ok(())
    }

    pub fn add_function(&mut self, name: &str, arity: usize) -> Result<(), FolError> {
        if self.taken(name) {
            return Err(FolError::DuplicateSymbol(name.into()));
        }
        self.functions.push(Symbol { name: name.into(), arity });
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty() && self.functions.is_empty()
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.relations {
            writeln!(f, "rel {} {}", r.name, r.arity)?;
        }
        for g in &self.functions {
            if g.arity == 0 {
                writeln!(f, "const {}", g.name)?;
            } else {
                writeln!(f, "fun {} {}", g.name, g.arity)?;
            }
        }
        Ok(())
    }
}

const KEYWORDS: [&str; 4] = ["exists", "forall", "true", "false"];

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(name.into())
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(g, args) if args.is_empty() => write!(f, "{g}"),
            Term::App(g, args) => {
                write!(f, "{g}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FoFormula {
    True,
    False,
    Eq(Term, Term),
    Rel(String, Vec<Term>),
    Not(Box<FoFormula>),
    And(Box<FoFormula>, Box<FoFormula>),
    Or(Box<FoFormula>, Box<FoFormula>),
    Implies(Box<FoFormula>, Box<FoFormula>),
    Exists(String, Box<FoFormula>),
    Forall(String, Box<FoFormula>),
}

use FoFormula as G;

impl FoFormula {
    pub fn not(a: G) -> Self {
        G::Not(Box::new(a))
    }

    pub fn and(a: G, b: G) -> Self {
        G::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: G, b: G) -> Self {
        G::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: G, b: G) -> Self {
        G::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(v: &str, a: G) -> Self {
        G::Exists(v.into(), Box::new(a))
    }

    pub fn forall(v: &str, a: G) -> Self {
        G::Forall(v.into(), Box::new(a))
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<String> {
        fn walk(f: &G, bound: &mut Vec<String>, out: &mut Vec<String>) {
            let push_term = |t: &Term, bound: &Vec<String>, out: &mut Vec<String>| {
                let mut vs = Vec::new();
                t.collect_vars(&mut vs);
                for v in vs {
                    if !bound.contains(&v) && !out.contains(&v) {
                        out.push(v);
                    }
                }
            };
            match f {
                G::True | G::False => {}
                G::Eq(a, b) => {
                    push_term(a, bound, out);
                    push_term(b, bound, out);
                }
                G::Rel(_, args) => args.iter().for_each(|a| push_term(a, bound, out)),
                G::Not(a) => walk(a, bound, out),
                G::And(a, b) | G::Or(a, b) | G::Implies(a, b) => {
                    walk(a, bound, out);
                    walk(b, bound, out);
                }
                G::Exists(v, a) | G::Forall(v, a) => {
                    bound.push(v.clone());
                    walk(a, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// No `¬`, `→` or `∀`.
    pub fn is_coherent(&self) -> bool {
        match self {
            G::True | G::False | G::Eq(..) | G::Rel(..) => true,
            G::And(a, b) | G::Or(a, b) => a.is_coherent() && b.is_coherent(),
            G::Exists(_, a) => a.is_coherent(),
            G::Not(_) | G::Implies(..) | G::Forall(..) => false,
        }
    }

    /// Nesting depth of connectives and quantifiers; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            G::True | G::False | G::Eq(..) | G::Rel(..) => 0,
            G::Not(a) | G::Exists(_, a) | G::Forall(_, a) => 1 + a.depth(),
            G::And(a, b) | G::Or(a, b) | G::Implies(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            G::Exists(..) | G::Forall(..) => 0,
            G::Implies(..) => 1,
            G::Or(..) => 2,
            G::And(..) => 3,
            G::Not(_) => 4,
            _ => 5,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = self.precedence() < min;
        if paren {
            write!(f, "(")?;
        }
        match self {
            G::True => write!(f, "true")?,
            G::False => write!(f, "false")?,
            G::Eq(a, b) => write!(f, "{a} = {b}")?,
            G::Rel(r, args) => write!(f, "{}", Term::App(r.clone(), args.clone()))?,
            G::Not(a) => {
                write!(f, "~")?;
                a.write_at(f, 4)?;
            }
            G::And(a, b) => {
                a.write_at(f, 3)?;
                write!(f, " & ")?;
                b.write_at(f, 4)?;
            }
            G::Or(a, b) => {
                a.write_at(f, 2)?;
                write!(f, " | ")?;
                b.write_at(f, 3)?;
            }
            G::Implies(a, b) => {
                a.write_at(f, 2)?;
                write!(f, " -> ")?;
                b.write_at(f, 1)?;
            }
            G::Exists(v, a) => {
                write!(f, "exists {v}. ")?;
                a.write_at(f, 0)?;
            }
            G::Forall(v, a) => {
                write!(f, "forall {v}. ")?;
                a.write_at(f, 0)?;
            }
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for FoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

struct Parser<'a> {
    sig: &'a Signature,
    c: Cursor,
}

enum ParseError {
    Syntax(SyntaxError),
    Arity {
        column: usize,
        symbol: String,
        expected: usize,
        found: usize,
    },
}

impl From<SyntaxError> for ParseError {
    fn from(e: SyntaxError) -> Self {
        ParseError::Syntax(e)
    }
}

impl ParseError {
    fn at_line(self, line: usize, offset: usize) -> FolError {
        match self {
            ParseError::Syntax(mut error) => {
                error.column += offset;
                FolError::Syntax { line, error }
            }
            ParseError::Arity {
                column,
                symbol,
                expected,
                found,
            } => FolError::Arity {
                line,
                column: column + offset,
                symbol,
                expected,
                found,
            },
        }
    }
}

type PResult<T> = Result<T, ParseError>;

impl Parser<'_> {
    fn implication(&mut self) -> PResult<G> {
        let lhs = self.disjunction()?;
        if self.c.eat(&Token::Arrow) {
            Ok(G::implies(lhs, self.implication()?))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> PResult<G> {
        let mut f = self.conjunction()?;
        while self.c.eat(&Token::Or) {
            f = G::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> PResult<G> {
        let mut f = self.unary()?;
        while self.c.eat(&Token::And) {
            f = G::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> PResult<G> {
        if self.c.eat(&Token::Not) {
            return Ok(G::not(self.unary()?));
        }
        if let Some(Token::Ident(kw)) = self.c.peek() {
            let exists = match kw.as_str() {
                "exists" => Some(true),
                "forall" => Some(false),
                _ => None,
            };
            if let Some(exists) = exists {
                self.c.next();
                let mut vars = Vec::new();
                while let Some(Token::Ident(v)) = self.c.peek().cloned() {
                    if self.sig.taken(&v) {
                        return Err(self.c.error("expected a variable").into());
                    }
                    self.c.next();
                    vars.push(v);
                }
                if vars.is_empty() {
                    return Err(self.c.error("expected a variable").into());
                }
                self.c.expect(&Token::Dot)?;
                let body = self.implication()?;
                return Ok(vars.iter().rev().fold(body, |acc, v| {
                    if exists {
                        G::exists(v, acc)
                    } else {
                        G::forall(v, acc)
                    }
                }));
            }
        }
        self.atom()
    }

    fn atom(&mut self) -> PResult<G> {
        match self.c.peek().cloned() {
            Some(Token::LParen) => {
                self.c.next();
                let f = self.implication()?;
                self.c.expect(&Token::RParen)?;
                Ok(f)
            }
            Some(Token::Ident(name)) if name == "true" => {
                self.c.next();
                Ok(G::True)
            }
            Some(Token::Ident(name)) if name == "false" => {
                self.c.next();
                Ok(G::False)
            }
            Some(Token::Ident(name)) if self.sig.relation(&name).is_some() => {
                let column = self.c.column();
                self.c.next();
                let (_, arity) = self.sig.relation(&name).expect("checked");
                let args = self.arguments(arity == 0)?;
                if args.len() != arity {
                    return Err(ParseError::Arity {
                        column,
                        symbol: name,
                        expected: arity,
                        found: args.len(),
                    });
                }
                Ok(G::Rel(name, args))
            }
            Some(Token::Ident(_)) => {
                let lhs = self.term()?;
                self.c.expect(&Token::Eq)?;
                let rhs = self.term()?;
                Ok(G::Eq(lhs, rhs))
            }
            _ => Err(self.c.error("expected a formula").into()),
        }
    }

    /// `( t, ... )`, optional when `optional` and absent.
    fn arguments(&mut self, optional: bool) -> PResult<Vec<Term>> {
        if optional && self.c.peek() != Some(&Token::LParen) {
            return Ok(Vec::new());
        }
        self.c.expect(&Token::LParen)?;
        let mut args = Vec::new();
        if self.c.eat(&Token::RParen) {
            return Ok(args);
        }
        loop {
            args.push(self.term()?);
            if self.c.eat(&Token::RParen) {
                return Ok(args);
            }
            self.c.expect(&Token::Comma)?;
        }
    }

    fn term(&mut self) -> PResult<Term> {
        let column = self.c.column();
        let Some(Token::Ident(name)) = self.c.peek().cloned() else {
            return Err(self.c.error("expected a term").into());
        };
        if KEYWORDS.contains(&name.as_str()) || self.sig.relation(&name).is_some() {
            return Err(self.c.error("expected a term").into());
        }
        self.c.next();
        match self.sig.function(&name) {
            Some((_, arity)) => {
                let args = self.arguments(arity == 0)?;
                if args.len() != arity {
                    return Err(ParseError::Arity {
                        column,
                        symbol: name,
                        expected: arity,
                        found: args.len(),
                    });
                }
                Ok(Term::App(name, args))
            }
            None if self.c.peek() == Some(&Token::LParen) => {
                Err(SyntaxError::new(column, format!("unknown function symbol {name:?}")).into())
            }
            None => Ok(Term::Var(name)),
        }
    }
}

fn parse_with(sig: &Signature, text: &str) -> PResult<G> {
    let mut p = Parser {
        sig,
        c: Cursor::new(text)?,
    };
    let f = p.implication()?;
    if !p.c.at_end() {
        return Err(p.c.error("expected an operator or end of input").into());
    }
    Ok(f)
}

/// Parses a formula over `sig`. Undeclared identifiers are variables.
pub fn parse_fo_formula(sig: &Signature, text: &str) -> Result<FoFormula, FolError> {
    parse_with(sig, text).map_err(|e| e.at_line(1, 0))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoTheory {
    pub signature: Signature,
    pub axioms: Vec<FoFormula>,
}

impl FoTheory {
    pub fn new(signature: Signature, axioms: Vec<FoFormula>) -> Result<Self, FolError> {
        for (i, a) in axioms.iter().enumerate() {
            if let Some(name) = a.free_vars().into_iter().next() {
                return Err(FolError::FreeVariable { line: i + 1, name });
            }
        }
        Ok(FoTheory { signature, axioms })
    }

    pub fn is_coherent(&self) -> bool {
        self.axioms.iter().all(FoFormula::is_coherent)
    }

    pub fn parse_formula(&self, text: &str) -> Result<FoFormula, FolError> {
        parse_fo_formula(&self.signature, text)
    }

    pub fn to_text(&self) -> String {
        let mut out = self.signature.to_string();
        for a in &self.axioms {
            out.push_str(&format!("axiom {a}\n"));
        }
        out
    }
}

/// Reads `rel R 2`, `fun f 1`, `const c` and `axiom <formula>` lines.
pub fn parse_fo(text: &str) -> Result<FoTheory, FolError> {
    let mut sig = Signature::default();
    let mut axioms = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (head, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        let bad = |message: &str| FolError::BadLine {
            line,
            message: message.into(),
        };
        let declaration = |rest: &str| -> Result<(String, usize), FolError> {
            let words: Vec<&str> = rest.split_whitespace().collect();
            match words.as_slice() {
                [name, arity] if valid_ident(name) => {
                    let arity = arity.parse().map_err(|_| bad("arity must be a number"))?;
                    Ok((name.to_string(), arity))
                }
                _ => Err(bad("expected a name and an arity")),
            }
        };
        match head {
            "rel" => {
                let (name, arity) = declaration(rest)?;
                sig.add_relation(&name, arity)?;
            }
            "fun" => {
                let (name, arity) = declaration(rest)?;
                sig.add_function(&name, arity)?;
            }
            "const" => {
                let name = rest.trim();
                if !valid_ident(name) {
                    return Err(bad("expected a constant name"));
                }
                sig.add_function(name, 0)?;
            }
            "axiom" => {
                let offset = raw.find(rest).unwrap_or(0);
                let f = parse_with(&sig, rest).map_err(|e| e.at_line(line, offset))?;
                if let Some(name) = f.free_vars().into_iter().next() {
                    return Err(FolError::FreeVariable { line, name });
                }
                axioms.push(f);
            }
            _ => return Err(bad("expected rel, fun, const or axiom")),
        }
    }
    Ok(FoTheory {
        signature: sig,
        axioms,
    })
}

fn valid_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphanumeric() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && !KEYWORDS.contains(&s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        let mut s = Signature::default();
        s.add_relation("R", 2).unwrap();
        s.add_relation("S", 1).unwrap();
        s.add_relation("P", 0).unwrap();
        s.add_function("f", 1).unwrap();
        s.add_function("c", 0).unwrap();
        s
    }

    #[test]
    fn parses_examples() {
        let s = sig();
        let f = parse_fo_formula(&s, "exists x. R(x,x)").unwrap();
        assert!(f.is_sentence() && f.is_coherent());
        let g = parse_fo_formula(&s, "forall x. R(x,x) -> S(x)").unwrap();
        assert!(!g.is_coherent());
        assert_eq!(g, G::forall("x", G::implies(
            G::Rel("R".into(), vec![Term::var("x"), Term::var("x")]),
            G::Rel("S".into(), vec![Term::var("x")]),
        )));
        let h = parse_fo_formula(&s, "~f(c) = x & P").unwrap();
        assert_eq!(h.free_vars(), vec!["x".to_string()]);
        assert_eq!(h.to_string(), "~f(c) = x & P");
    }

    #[test]
    fn arity_mismatch() {
        let e = parse_fo_formula(&sig(), "R(x)").unwrap_err();
        assert!(matches!(e, FolError::Arity { column: 1, expected: 2, found: 1, .. }));
        assert!(matches!(parse_fo_formula(&sig(), "f(x,y) = x"), Err(FolError::Arity { .. })));
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(parse_fo_formula(&sig(), "exists . R(x,x)"), Err(FolError::Syntax { .. })));
        assert!(matches!(parse_fo_formula(&sig(), "g(x) = x"), Err(FolError::Syntax { .. })));
        assert!(matches!(parse_fo_formula(&sig(), "x"), Err(FolError::Syntax { .. })));
        assert!(matches!(parse_fo_formula(&sig(), "S(x) &"), Err(FolError::Syntax { .. })));
    }

    #[test]
    fn multiple_binders_and_printing() {
        let s = sig();
        let f = parse_fo_formula(&s, "exists x y. R(x,y) & ~x = y").unwrap();
        assert_eq!(f.to_string(), "exists x. exists y. R(x,y) & ~x = y");
        assert_eq!(f.depth(), 4);
        let g = G::and(parse_fo_formula(&s, "exists x. S(x)").unwrap(), G::True);
        assert_eq!(g.to_string(), "(exists x. S(x)) & true");
        assert_eq!(parse_fo_formula(&s, &g.to_string()).unwrap(), g);
    }

    #[test]
    fn theory_files() {
        let t = parse_fo("# graph\nrel E 2\naxiom forall x. ~E(x,x)\naxiom forall x y. E(x,y) -> E(y,x)\n").unwrap();
        assert_eq!(t.axioms.len(), 2);
        assert!(!t.is_coherent());
        assert_eq!(parse_fo(&t.to_text()).unwrap(), t);
        assert!(matches!(parse_fo("rel E 2\naxiom E(x,x)"), Err(FolError::FreeVariable { line: 2, .. })));
        assert!(matches!(parse_fo("rel E 2\nrel E 1"), Err(FolError::DuplicateSymbol(_))));
        assert!(matches!(parse_fo("relation E 2"), Err(FolError::BadLine { line: 1, .. })));
        let e = parse_fo("rel E 2\naxiom  E(x)").unwrap_err();
        assert!(matches!(e, FolError::Arity { line: 2, column: 8, .. }));
        let t = parse_fo("fun s 1\nconst z\naxiom forall x. s(s(x)) = x | s(z) = z").unwrap();
        assert!(t.to_text().contains("const z"));
    }
}
