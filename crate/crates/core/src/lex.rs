//! Tokenizer shared by the propositional and first-order parsers.

use std::fmt;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Token {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    And,
    Or,
    Arrow,
    Not,
    Eq,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) => write!(f, "{s}"),
            Token::LParen => write!(f, "("),
            Token::RParen => write!(f, ")"),
            Token::Comma => write!(f, ","),
            Token::Dot => write!(f, "."),
            Token::And => write!(f, "&"),
            Token::Or => write!(f, "|"),
            Token::Arrow => write!(f, "->"),
            Token::Not => write!(f, "~"),
            Token::Eq => write!(f, "="),
        }
    }
}

/// A parse error at a 1-based column.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("column {column}: {message}")]
pub struct SyntaxError {
    pub column: usize,
    pub message: String,
}

impl SyntaxError {
    pub fn new(column: usize, message: impl Into<String>) -> Self {
        SyntaxError {
            column,
            message: message.into(),
        }
    }
}

/// Tokens with their 1-based starting column.
pub fn lex(text: &str) -> Result<Vec<(Token, usize)>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        let single = match c {
            '(' => Some(Token::LParen),
            ')' => Some(Token::RParen),
            ',' => Some(Token::Comma),
            '.' => Some(Token::Dot),
            '&' => Some(Token::And),
            '|' => Some(Token::Or),
            '~' => Some(Token::Not),
            '=' => Some(Token::Eq),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, col));
            i += 1;
        } else if c == '-' {
            if chars.get(i + 1) == Some(&'>') {
                out.push((Token::Arrow, col));
                i += 2;
            } else {
                return Err(SyntaxError::new(col, "expected '->'"));
            }
        } else if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphanumeric() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            out.push((Token::Ident(chars[start..i].iter().collect()), col));
        } else {
            return Err(SyntaxError::new(col, format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

/// A cursor over a token list that reports positions.
pub(crate) struct Cursor {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end_column: usize,
}

impl Cursor {
    pub fn new(text: &str) -> Result<Self, SyntaxError> {
        Ok(Cursor {
            tokens: lex(text)?,
            pos: 0,
            end_column: text.chars().count() + 1,
        })
    }

    pub fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    pub fn column(&self) -> usize {
        self.tokens.get(self.pos).map(|(_, c)| *c).unwrap_or(self.end_column)
    }

    pub fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn eat(&mut self, t: &Token) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, t: &Token) -> Result<(), SyntaxError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{t}'")))
        }
    }

    pub fn error(&self, message: impl Into<String>) -> SyntaxError {
        let message = message.into();
        let found = match self.peek() {
            Some(t) => format!("'{t}'"),
            None => "end of input".into(),
        };
        SyntaxError::new(self.column(), format!("{message}, found {found}"))
    }

    pub fn at_end(&self) -> bool {
        self.pos == self.tokens.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_operators_and_columns() {
        let t = lex("p -> ~q(x,y)").unwrap();
        let cols: Vec<usize> = t.iter().map(|(_, c)| *c).collect();
        assert_eq!(cols, vec![1, 3, 6, 7, 8, 9, 10, 11, 12]);
        assert_eq!(t[1].0, Token::Arrow);
    }

    #[test]
    fn rejects_stray_characters() {
        assert_eq!(lex("p $ q").unwrap_err().column, 3);
        assert_eq!(lex("p - q").unwrap_err().column, 3);
    }
}
