//! Recursive-descent parser for sentences.
//!
//! ```text
//! sentence := ["E" names "."] ["A" names "."] body
//! body     := conj ("|" conj)*
//! conj     := lit ("&" lit)*
//! lit      := "!" lit | atom | "(" body ")"
//! atom     := term ("<=" | "=") term
//! term     := factor ("+" factor)*
//! factor   := "0" | name | "(" term ")"
//! ```
//!
//! A `(` may open either a term or a body; we try the atom reading first and
//! fall back to the body. As a convenience a single universal block may also
//! appear inside the body, as in `E x. !(x<=0) & A y. ...`, provided it is not
//! under a negation and there is no leading `A` block. Its scope runs to the
//! end of the enclosing group, and it is pulled out to the front, which is
//! sound because `y` occurs nowhere else and the block sits under `&`/`|` only.

use thiserror::Error;

use super::{QfFormula, Sigma2Sentence, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("undeclared variable {name} at {position}")]
    Undeclared { name: String, position: usize },
    #[error("duplicated variable {name} at {position}")]
    Duplicate { name: String, position: usize },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { position, .. }
            | ParseError::Undeclared { position, .. }
            | ParseError::Duplicate { position, .. } => *position,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Zero,
    Le,
    Eq,
    Plus,
    LParen,
    RParen,
    Bang,
    Amp,
    Bar,
    Dot,
    Comma,
    End,
}

const KEYWORDS: [&str; 2] = ["E", "A"];

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '<' if bytes.get(i + 1) == Some(&b'=') => {
                i += 1;
                Tok::Le
            }
            '=' => Tok::Eq,
            '+' => Tok::Plus,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '!' => Tok::Bang,
            '&' => Tok::Amp,
            '|' => Tok::Bar,
            '.' => Tok::Dot,
            ',' => Tok::Comma,
            '0' if !bytes.get(i + 1).is_some_and(|b| b.is_ascii_alphanumeric()) => Tok::Zero,
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i + 1 < bytes.len() && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_') {
                    i += 1;
                }
                Tok::Ident(text[start..=i].to_string())
            }
            _ => return Err(ParseError::Syntax { position: start, message: format!("unexpected character {c:?}") }),
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    i: usize,
    declared: Vec<String>,
    univ: Vec<String>,
    lift_allowed: bool,
    negations: usize,
}

type Res<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn pos(&self) -> usize {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if t != Tok::End {
            self.i += 1;
        }
        t
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Res<T> {
        Err(ParseError::Syntax { position: self.pos(), message: message.into() })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Res<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.syntax(format!("expected {what}"))
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn names(&mut self) -> Res<Vec<String>> {
        let mut out = Vec::new();
        loop {
            let pos = self.pos();
            match self.peek().clone() {
                Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                    if self.declared.contains(&name) || self.univ.contains(&name) {
                        return Err(ParseError::Duplicate { name, position: pos });
                    }
                    self.bump();
                    self.declared.push(name.clone());
                    out.push(name);
                }
                _ if out.is_empty() => return self.syntax("expected a variable name"),
                _ => return Ok(out),
            }
            if *self.peek() == Tok::Comma {
                self.bump();
            }
        }
    }

    fn body(&mut self) -> Res<QfFormula> {
        let mut items = vec![self.conj()?];
        while *self.peek() == Tok::Bar {
            self.bump();
            items.push(self.conj()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { QfFormula::Or(items) })
    }

    fn conj(&mut self) -> Res<QfFormula> {
        let mut items = Vec::new();
        loop {
            if self.at_keyword("A") {
                items.push(self.inner_universal()?);
                break;
            }
            items.push(self.lit()?);
            if *self.peek() != Tok::Amp {
                break;
            }
            self.bump();
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { QfFormula::And(items) })
    }

    fn inner_universal(&mut self) -> Res<QfFormula> {
        if !self.lift_allowed {
            return self.syntax("only one universal block is allowed");
        }
        if self.negations > 0 {
            return self.syntax("a universal block cannot appear under negation");
        }
        self.bump();
        self.lift_allowed = false;
        let names = self.names()?;
        self.univ.extend(names);
        self.expect(Tok::Dot, "'.' after the universal block")?;
        self.body()
    }

    fn lit(&mut self) -> Res<QfFormula> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                self.negations += 1;
                let inner = self.lit();
                self.negations -= 1;
                Ok(QfFormula::negate(inner?))
            }
            Tok::LParen => {
                let save = self.i;
                let atom_err = match self.atom() {
                    Ok(a) => return Ok(a),
                    Err(e) => e,
                };
                self.i = save;
                self.bump();
                let scope = self.declared.len();
                let result = self.body().and_then(|b| {
                    self.expect(Tok::RParen, "')'")?;
                    Ok(b)
                });
                self.declared.truncate(scope);
                result.map_err(|e| if atom_err.position() > e.position() { atom_err } else { e })
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Res<QfFormula> {
        let lhs = self.term()?;
        match self.peek() {
            Tok::Le => {
                self.bump();
                Ok(QfFormula::Leq(lhs, self.term()?))
            }
            Tok::Eq => {
                self.bump();
                Ok(QfFormula::Eq(lhs, self.term()?))
            }
            _ => self.syntax("expected '<=' or '='"),
        }
    }

    fn term(&mut self) -> Res<Term> {
        let mut t = self.factor()?;
        while *self.peek() == Tok::Plus {
            self.bump();
            t = Term::join(t, self.factor()?);
        }
        Ok(t)
    }

    fn factor(&mut self) -> Res<Term> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Zero => {
                self.bump();
                Ok(Term::Zero)
            }
            Tok::Ident(name) if KEYWORDS.contains(&name.as_str()) => self.syntax(format!("{name} is a reserved word")),
            Tok::Ident(name) => {
                if !self.declared.contains(&name) {
                    return Err(ParseError::Undeclared { name, position: pos });
                }
                self.bump();
                Ok(Term::Var(name))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(t)
            }
            _ => self.syntax("expected a term"),
        }
    }
}

pub fn parse_sentence(text: &str) -> Result<Sigma2Sentence, ParseError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        i: 0,
        declared: Vec::new(),
        univ: Vec::new(),
        lift_allowed: true,
        negations: 0,
    };
    let mut exist = Vec::new();
    if p.at_keyword("E") {
        p.bump();
        exist = p.names()?;
        p.expect(Tok::Dot, "'.' after the existential block")?;
    }
    if p.at_keyword("A") {
        p.bump();
        let names = p.names()?;
        p.univ.extend(names);
        p.expect(Tok::Dot, "'.' after the universal block")?;
        p.lift_allowed = false;
    }
    let body = p.body()?;
    if *p.peek() != Tok::End {
        return p.syntax("unexpected trailing input");
    }
    Ok(Sigma2Sentence { exist_vars: exist, univ_vars: p.univ, body })
}

/// Parses a bare quantifier-free body over the given variables.
pub fn parse_body(text: &str, vars: &[&str]) -> Result<QfFormula, ParseError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        i: 0,
        declared: vars.iter().map(|v| v.to_string()).collect(),
        univ: Vec::new(),
        lift_allowed: false,
        negations: 0,
    };
    let body = p.body()?;
    if *p.peek() != Tok::End {
        return p.syntax("unexpected trailing input");
    }
    Ok(body)
}
