//! Text formats for rings and lattices.
//!
//! Both formats are line based; `#` starts a comment and blank lines are
//! ignored. Table entries and `leq` arguments are element names, which
//! default to `0 .. n-1`.
//!
//! Rings:
//!
//! ```text
//! zmod 12
//! f4
//! dual 4                  # Z/4[x]/(x^2)
//! product a.ring b.ring   # operands are paths relative to the file, or zmod:N, dual:M, f4
//! ring 2
//! names 0 1               # optional
//! add
//! 0 1
//! 1 0
//! mul
//! 0 0
//! 0 1
//! ```
//!
//! Lattices:
//!
//! ```text
//! chain 3 | powerset 2 | m3 | n5
//! lattice 4
//! names 0 a b 1           # optional
//! leq 0 a                 # reflexive-transitive closure is taken
//! leq a 1
//! ...
//! lattice 2
//! table meet
//! 0 0
//! 0 1
//! table join
//! 0 1
//! 1 1
//! downsets-of-poset 2     # followed by names/leq lines for the poset
//! leq 0 1
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::order::{downset_lattice, heyting_from_lattice, DistLattice, FinPoset, HeytingAlgebra, Lattice, OrderError};
use crate::ring::{FinCommRing, RingError};

const MAX_INCLUDE_DEPTH: usize = 8;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{path}: {message}")]
    Read { path: String, message: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Order(#[from] OrderError),
}

fn syntax(line: usize, message: impl Into<String>) -> InputError {
    InputError::Syntax {
        line,
        message: message.into(),
    }
}

pub fn read_file(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError::Read {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Non-empty lines with comments stripped, as `(line number, words)`.
fn lines(text: &str) -> Vec<(usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, w)| !w.is_empty())
        .collect()
}

fn number(line: usize, word: Option<&&str>, what: &str) -> Result<usize, InputError> {
    let w = word.ok_or_else(|| syntax(line, format!("missing {what}")))?;
    w.parse().map_err(|_| syntax(line, format!("{what} must be a number, found {w:?}")))
}

fn no_more(line: usize, words: &[&str], used: usize) -> Result<(), InputError> {
    match words.get(used) {
        Some(w) => Err(syntax(line, format!("unexpected {w:?}"))),
        None => Ok(()),
    }
}

fn default_names(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// Reads an optional `names` line at `pos`, advancing past it.
fn names_line(ls: &[(usize, Vec<&str>)], pos: &mut usize, n: usize) -> Result<Vec<String>, InputError> {
    match ls.get(*pos) {
        Some((line, w)) if w[0] == "names" => {
            *pos += 1;
            let names: Vec<String> = w[1..].iter().map(|s| s.to_string()).collect();
            if names.len() != n {
                return Err(syntax(*line, format!("expected {n} names, found {}", names.len())));
            }
            for (i, a) in names.iter().enumerate() {
                if names[..i].contains(a) {
                    return Err(syntax(*line, format!("duplicate name {a:?}")));
                }
            }
            Ok(names)
        }
        _ => Ok(default_names(n)),
    }
}

fn element(line: usize, names: &[String], word: &str) -> Result<usize, InputError> {
    names
        .iter()
        .position(|n| n == word)
        .ok_or_else(|| syntax(line, format!("unknown element {word:?}")))
}

/// Reads `n` rows of `n` element names.
fn table(ls: &[(usize, Vec<&str>)], pos: &mut usize, names: &[String], what: &str) -> Result<Vec<usize>, InputError> {
    let n = names.len();
    let mut out = Vec::with_capacity(n * n);
    for r in 0..n {
        let (line, w) = ls
            .get(*pos)
            .ok_or_else(|| syntax(ls.last().map_or(0, |l| l.0), format!("{what} table ends after {r} row(s)")))?;
        if w.len() != n {
            return Err(syntax(*line, format!("{what} row has {} entries, expected {n}", w.len())));
        }
        for word in w {
            out.push(element(*line, names, word)?);
        }
        *pos += 1;
    }
    Ok(out)
}

fn expect_keyword(ls: &[(usize, Vec<&str>)], pos: &mut usize, keyword: &[&str]) -> Result<(), InputError> {
    match ls.get(*pos) {
        Some((_, w)) if w.as_slice() == keyword => {
            *pos += 1;
            Ok(())
        }
        Some((line, w)) => Err(syntax(*line, format!("expected {:?}, found {:?}", keyword.join(" "), w.join(" ")))),
        None => Err(syntax(
            ls.last().map_or(0, |l| l.0),
            format!("expected {:?} at end of input", keyword.join(" ")),
        )),
    }
}

pub fn read_ring(path: &Path) -> Result<FinCommRing, InputError> {
    read_ring_at(path, 0)
}

fn read_ring_at(path: &Path, depth: usize) -> Result<FinCommRing, InputError> {
    let text = read_file(path)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_ring_at(&text, &base, depth)
}

/// Parses the ring format; `product` operands naming files are resolved
/// against `base`.
pub fn parse_ring(text: &str, base: &Path) -> Result<FinCommRing, InputError> {
    parse_ring_at(text, base, 0)
}

fn parse_ring_at(text: &str, base: &Path, depth: usize) -> Result<FinCommRing, InputError> {
    let ls = lines(text);
    let Some((line, w)) = ls.first() else {
        return Err(syntax(1, "empty ring description"));
    };
    let line = *line;
    let ring = match w[0] {
        "zmod" => {
            let n = number(line, w.get(1), "modulus")?;
            if n < 2 {
                return Err(syntax(line, "zmod needs a modulus of at least 2"));
            }
            no_more(line, w, 2)?;
            FinCommRing::zmod(n)
        }
        "f4" => {
            no_more(line, w, 1)?;
            FinCommRing::f4()
        }
        "dual" => {
            let m = number(line, w.get(1), "modulus")?;
            if m < 2 {
                return Err(syntax(line, "dual needs a modulus of at least 2"));
            }
            no_more(line, w, 2)?;
            FinCommRing::dual_numbers(m)
        }
        "product" => {
            if w.len() != 3 {
                return Err(syntax(line, "product takes two operands"));
            }
            if depth >= MAX_INCLUDE_DEPTH {
                return Err(syntax(line, "product nesting too deep"));
            }
            let a = ring_operand(line, w[1], base, depth)?;
            let b = ring_operand(line, w[2], base, depth)?;
            a.product(&b)
        }
        "ring" => {
            let n = number(line, w.get(1), "size")?;
            if n == 0 {
                return Err(syntax(line, "a ring needs at least one element"));
            }
            no_more(line, w, 2)?;
            let mut pos = 1;
            let names = names_line(&ls, &mut pos, n)?;
            expect_keyword(&ls, &mut pos, &["add"])?;
            let add = table(&ls, &mut pos, &names, "add")?;
            expect_keyword(&ls, &mut pos, &["mul"])?;
            let mul = table(&ls, &mut pos, &names, "mul")?;
            if let Some((l, w)) = ls.get(pos) {
                return Err(syntax(*l, format!("unexpected {:?}", w.join(" "))));
            }
            return Ok(FinCommRing::from_tables(names, add, mul)?);
        }
        other => return Err(syntax(line, format!("unknown ring form {other:?}"))),
    };
    if let Some((l, w)) = ls.get(1) {
        return Err(syntax(*l, format!("unexpected {:?}", w.join(" "))));
    }
    Ok(ring)
}

fn ring_operand(line: usize, word: &str, base: &Path, depth: usize) -> Result<FinCommRing, InputError> {
    let modulus = |s: &str| -> Result<usize, InputError> {
        match s.parse::<usize>() {
            Ok(n) if n >= 2 => Ok(n),
            _ => Err(syntax(line, format!("bad modulus in {word:?}"))),
        }
    };
    if word == "f4" {
        return Ok(FinCommRing::f4());
    }
    if let Some(n) = word.strip_prefix("zmod:") {
        return Ok(FinCommRing::zmod(modulus(n)?));
    }
    if let Some(m) = word.strip_prefix("dual:") {
        return Ok(FinCommRing::dual_numbers(modulus(m)?));
    }
    let path: PathBuf = base.join(word);
    read_ring_at(&path, depth + 1).map_err(|e| syntax(line, format!("in {}: {e}", path.display())))
}

pub fn read_lattice(path: &Path) -> Result<Lattice, InputError> {
    parse_lattice(&read_file(path)?)
}

pub fn parse_lattice(text: &str) -> Result<Lattice, InputError> {
    let ls = lines(text);
    let Some((line, w)) = ls.first() else {
        return Err(syntax(1, "empty lattice description"));
    };
    let line = *line;
    let simple = |l: Lattice| -> Result<Lattice, InputError> {
        match ls.get(1) {
            Some((l2, w2)) => Err(syntax(*l2, format!("unexpected {:?}", w2.join(" ")))),
            None => Ok(l),
        }
    };
    match w[0] {
        "chain" => {
            let n = number(line, w.get(1), "length")?;
            if n == 0 {
                return Err(syntax(line, "a chain needs at least one element"));
            }
            no_more(line, w, 2)?;
            simple(Lattice::chain(n))
        }
        "powerset" => {
            let n = number(line, w.get(1), "size")?;
            if n > 6 {
                return Err(syntax(line, "powerset size is limited to 6"));
            }
            no_more(line, w, 2)?;
            simple(Lattice::powerset(n))
        }
        "m3" => {
            no_more(line, w, 1)?;
            simple(Lattice::m3())
        }
        "n5" => {
            no_more(line, w, 1)?;
            simple(Lattice::n5())
        }
        "lattice" => {
            let n = number(line, w.get(1), "size")?;
            if n == 0 {
                return Err(syntax(line, "a lattice needs at least one element"));
            }
            no_more(line, w, 2)?;
            let mut pos = 1;
            let names = names_line(&ls, &mut pos, n)?;
            if matches!(ls.get(pos), Some((_, w)) if w[0] == "table") {
                expect_keyword(&ls, &mut pos, &["table", "meet"])?;
                let meet = table(&ls, &mut pos, &names, "meet")?;
                expect_keyword(&ls, &mut pos, &["table", "join"])?;
                let join = table(&ls, &mut pos, &names, "join")?;
                if let Some((l, w)) = ls.get(pos) {
                    return Err(syntax(*l, format!("unexpected {:?}", w.join(" "))));
                }
                return Ok(Lattice::from_tables(names, meet, join)?);
            }
            let poset = poset_lines(&ls[pos..], names)?;
            Ok(Lattice::from_poset(&poset)?)
        }
        "downsets-of-poset" => {
            let n = number(line, w.get(1), "size")?;
            if n == 0 || n > 16 {
                return Err(syntax(line, "poset size must be between 1 and 16"));
            }
            no_more(line, w, 2)?;
            let mut pos = 1;
            let names = names_line(&ls, &mut pos, n)?;
            let poset = poset_lines(&ls[pos..], names)?;
            Ok(downset_lattice(&poset)?.into_lattice())
        }
        other => Err(syntax(line, format!("unknown lattice form {other:?}"))),
    }
}

fn poset_lines(ls: &[(usize, Vec<&str>)], names: Vec<String>) -> Result<FinPoset, InputError> {
    let mut pairs = Vec::new();
    for (line, w) in ls {
        if w[0] != "leq" || w.len() != 3 {
            return Err(syntax(*line, format!("expected \"leq a b\", found {:?}", w.join(" "))));
        }
        pairs.push((element(*line, &names, w[1])?, element(*line, &names, w[2])?));
    }
    Ok(FinPoset::from_pairs(names, &pairs)?)
}

/// A lattice file read as a Heyting algebra; it must be distributive.
pub fn read_heyting(path: &Path) -> Result<HeytingAlgebra, InputError> {
    parse_heyting(&read_file(path)?)
}

pub fn parse_heyting(text: &str) -> Result<HeytingAlgebra, InputError> {
    let l = parse_lattice(text)?;
    Ok(heyting_from_lattice(DistLattice::new(l)?))
}
