//! Recursive-descent parser for the ASCII formula grammar.
//!
//! ```text
//! formula  := "forall" var "." formula | "exists" var "." formula | iff
//! iff      := impl ("<->" impl)*
//! impl     := disj ("->" impl)?
//! disj     := conj ("|" conj)*
//! conj     := unary ("&" unary)*
//! unary    := "~" unary | "[" INT "]" unary | "<" INT ">" unary | atom
//! atom     := "T" | "F" | PRED "(" var ("," var)* ")" | var "=" var
//!             | var "!=" var | "(" formula ")"
//! ```
//!
//! Quantifiers are additionally accepted in `unary` position, where their
//! scope extends as far right as possible.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::{Formula, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    IndexOutOfRange { index: usize, n: usize },
    ArityMismatch { pred: String, expected: usize, found: usize },
    InvalidModalCount,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(msg) => write!(f, "syntax error: {msg}"),
            ParseErrorKind::IndexOutOfRange { index, n } => {
                write!(f, "index out of range: modality {index} not in 1..={n}")
            }
            ParseErrorKind::ArityMismatch { pred, expected, found } => {
                write!(f, "arity mismatch: {pred} used with {found} arguments, earlier with {expected}")
            }
            ParseErrorKind::InvalidModalCount => write!(f, "modal count must be at least 1"),
        }
    }
}

/// A parse failure at a byte offset of the input.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{kind} (at offset {pos})")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub pos: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Var(String),
    Pred(String),
    Int(usize),
    Forall,
    Exists,
    Dot,
    Comma,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LAngle,
    RAngle,
    Eq,
    Neq,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Var(s) | Tok::Pred(s) => write!(f, "`{s}`"),
            Tok::Int(i) => write!(f, "`{i}`"),
            Tok::Forall => f.write_str("`forall`"),
            Tok::Exists => f.write_str("`exists`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::LAngle => f.write_str("`<`"),
            Tok::RAngle => f.write_str("`>`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Neq => f.write_str("`!=`"),
            Tok::Not => f.write_str("`~`"),
            Tok::And => f.write_str("`&`"),
            Tok::Or => f.write_str("`|`"),
            Tok::Implies => f.write_str("`->`"),
            Tok::Iff => f.write_str("`<->`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn syntax(pos: usize, msg: impl Into<String>) -> ParseError {
    ParseError { kind: ParseErrorKind::Syntax(msg.into()), pos }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let rest = &text[i..];
        let (tok, len) = if rest.starts_with("<->") {
            (Tok::Iff, 3)
        } else if rest.starts_with("->") {
            (Tok::Implies, 2)
        } else if rest.starts_with("!=") {
            (Tok::Neq, 2)
        } else if c.is_ascii_digit() {
            let len = rest.bytes().take_while(u8::is_ascii_digit).count();
            let value = rest[..len]
                .parse::<usize>()
                .map_err(|_| syntax(start, "integer too large"))?;
            (Tok::Int(value), len)
        } else if c.is_ascii_alphabetic() {
            let len = rest
                .bytes()
                .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_' || *b == b'\'')
                .count();
            let word = &rest[..len];
            let tok = match word {
                "forall" => Tok::Forall,
                "exists" => Tok::Exists,
                _ if c.is_ascii_uppercase() => Tok::Pred(word.to_string()),
                _ => Tok::Var(word.to_string()),
            };
            (tok, len)
        } else {
            let tok = match c {
                b'.' => Tok::Dot,
                b',' => Tok::Comma,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'[' => Tok::LBracket,
                b']' => Tok::RBracket,
                b'<' => Tok::LAngle,
                b'>' => Tok::RAngle,
                b'=' => Tok::Eq,
                b'~' => Tok::Not,
                b'&' => Tok::And,
                b'|' => Tok::Or,
                _ => {
                    let ch = rest.chars().next().unwrap_or('?');
                    return Err(syntax(start, format!("unexpected character `{ch}`")));
                }
            };
            (tok, 1)
        };
        out.push((tok, start));
        i += len;
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    n: usize,
    arities: HashMap<String, usize>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek2(&self) -> &Tok {
        let i = (self.at + 1).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(syntax(self.pos(), format!("expected {t}, found {}", self.peek())))
        }
    }

    fn var(&mut self) -> Result<Var, ParseError> {
        match self.peek().clone() {
            Tok::Var(name) => {
                self.bump();
                Ok(Var::new(name))
            }
            other => Err(syntax(self.pos(), format!("expected a variable, found {other}"))),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::Forall | Tok::Exists => {
                let universal = self.bump() == Tok::Forall;
                let x = self.var()?;
                self.expect(&Tok::Dot)?;
                let body = self.formula()?;
                Ok(if universal {
                    Formula::forall(x, body)
                } else {
                    Formula::exists(x, body)
                })
            }
            _ => self.iff(),
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.implication()?;
        while self.eat(&Tok::Iff) {
            let right = self.implication()?;
            left = Formula::iff(left, right);
        }
        Ok(left)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let left = self.disjunction()?;
        if self.eat(&Tok::Implies) {
            let right = self.implication()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.conjunction()?;
        while self.eat(&Tok::Or) {
            left = Formula::or(left, self.conjunction()?);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.unary()?;
        while self.eat(&Tok::And) {
            left = Formula::and(left, self.unary()?);
        }
        Ok(left)
    }

    fn modal_index(&mut self) -> Result<usize, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(k) if (1..=self.n).contains(&k) => Ok(k),
            Tok::Int(k) => Err(ParseError {
                kind: ParseErrorKind::IndexOutOfRange { index: k, n: self.n },
                pos,
            }),
            other => Err(syntax(pos, format!("expected a modality index, found {other}"))),
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LBracket => {
                self.bump();
                let k = self.modal_index()?;
                self.expect(&Tok::RBracket)?;
                Ok(Formula::boxed(k, self.unary()?))
            }
            Tok::LAngle => {
                self.bump();
                let k = self.modal_index()?;
                self.expect(&Tok::RAngle)?;
                Ok(Formula::diamond(k, self.unary()?))
            }
            Tok::Forall | Tok::Exists => self.formula(),
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Pred(name) if (name == "T" || name == "F") && *self.peek2() != Tok::LParen => {
                self.bump();
                Ok(if name == "T" { Formula::Top } else { Formula::Bottom })
            }
            Tok::Pred(name) => {
                self.bump();
                self.expect(&Tok::LParen)?;
                let mut args = vec![self.var()?];
                while self.eat(&Tok::Comma) {
                    args.push(self.var()?);
                }
                self.expect(&Tok::RParen)?;
                let expected = *self.arities.entry(name.clone()).or_insert(args.len());
                if expected != args.len() {
                    return Err(ParseError {
                        kind: ParseErrorKind::ArityMismatch {
                            pred: name,
                            expected,
                            found: args.len(),
                        },
                        pos,
                    });
                }
                Ok(Formula::Atom { pred: name, args })
            }
            Tok::Var(_) => {
                let x = self.var()?;
                match self.bump() {
                    Tok::Eq => Ok(Formula::Equal(x, self.var()?)),
                    Tok::Neq => Ok(Formula::not(Formula::Equal(x, self.var()?))),
                    other => Err(syntax(
                        pos,
                        format!("expected `=` or `!=` after variable `{x}`, found {other}"),
                    )),
                }
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(&Tok::RParen)?;
                Ok(f)
            }
            other => Err(syntax(pos, format!("expected a formula, found {other}"))),
        }
    }
}

/// Parses `text` as a formula of the language with `n` modalities.
pub fn parse_formula(text: &str, n: usize) -> Result<Formula, ParseError> {
    if n == 0 {
        return Err(ParseError { kind: ParseErrorKind::InvalidModalCount, pos: 0 });
    }
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, n, arities: HashMap::new() };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return Err(syntax(p.pos(), format!("unexpected {} after formula", p.peek())));
    }
    Ok(f)
}
