//! Quantifier-free sentences of the forcing language, in CNF.
//!
//! Text syntax (`|` binds tighter than `&`):
//!
//! ```text
//! cnf     := "true" | clause ("&" clause)*
//! clause  := "false" | lit ("|" lit)* | "(" lit ("|" lit)* ")"
//! lit     := "!"* atom
//! atom    := n "=" m                     numerals
//!          | halt(e, x, s, y, "bits")    {e}_s^bits(x) halts with output y
//!          | pre("bits", NAME)           bits is an initial segment of a parameter real
//!          | gen("01*")                  pattern on the generic, * leaves a bit open
//!          | gen(L: n1, n2, ...)         ones at n1, n2, ... and zeros elsewhere below L
//!          | in<x, y, "bits">            the axiom's code is a one of the generic
//! ```
//!
//! `gen("σ")` with no `*` is the atom "σ is an initial segment of the
//! generic". Open positions let a single atom talk about one axiom, which is
//! how `in<...>` is defined.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{codec, Axiom, BinaryString, KsfError};

/// Constraints on an initial segment of the generic's characteristic
/// sequence: position `n` is required to be 1, 0, or left open.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenericPattern(Vec<Option<bool>>);

impl GenericPattern {
    pub fn new(bits: Vec<Option<bool>>) -> Self {
        GenericPattern(bits)
    }

    /// The plain atom `σ ⊂ G`.
    pub fn prefix(sigma: &BinaryString) -> Self {
        GenericPattern(sigma.bits().iter().map(|&b| Some(b)).collect())
    }

    /// Ones at the listed positions, zeros elsewhere below `len`.
    pub fn sparse(len: u64, ones: &[u64]) -> Self {
        let mut bits = vec![Some(false); len as usize];
        for &n in ones {
            bits[n as usize] = Some(true);
        }
        GenericPattern(bits)
    }

    /// "The axiom is in the generic functional".
    pub fn member(a: &Axiom) -> Result<Self, KsfError> {
        let n = a.code()? as usize;
        let mut bits = vec![None; n + 1];
        bits[n] = Some(true);
        Ok(GenericPattern(bits))
    }

    pub fn len(&self) -> u64 {
        self.0.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, n: u64) -> Option<bool> {
        self.0.get(n as usize).copied().flatten()
    }

    pub fn bits(&self) -> &[Option<bool>] {
        &self.0
    }

    pub fn ones(&self) -> impl Iterator<Item = u64> + '_ {
        self.positions(true)
    }

    pub fn zeros(&self) -> impl Iterator<Item = u64> + '_ {
        self.positions(false)
    }

    fn positions(&self, bit: bool) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().enumerate().filter(move |(_, b)| **b == Some(bit)).map(|(n, _)| n as u64)
    }

    /// The axiom a one-position pattern names, when it is of that form.
    fn as_member(&self) -> Option<Axiom> {
        let (last, rest) = self.0.split_last()?;
        if *last != Some(true) || rest.iter().any(Option::is_some) {
            return None;
        }
        codec::decode(self.len() - 1).ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    NumEq(u64, u64),
    Halt { e: u64, x: u64, s: u64, y: u64, sigma: BinaryString },
    PrefixOfS { sigma: BinaryString, param: String },
    Generic(GenericPattern),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub positive: bool,
    pub atom: Atom,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { positive: true, atom }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal { positive: false, atom }
    }

    pub fn negated(&self) -> Self {
        Literal { positive: !self.positive, atom: self.atom.clone() }
    }
}

/// A conjunction of disjunctions of literals. No clauses is "true"; an
/// empty clause is "false".
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ForcingQf {
    pub clauses: Vec<Vec<Literal>>,
}

impl ForcingQf {
    pub fn new(clauses: Vec<Vec<Literal>>) -> Self {
        ForcingQf { clauses }
    }

    pub fn literal(l: Literal) -> Self {
        ForcingQf { clauses: vec![vec![l]] }
    }

    pub fn and(parts: impl IntoIterator<Item = ForcingQf>) -> Self {
        ForcingQf { clauses: parts.into_iter().flat_map(|p| p.clauses).collect() }
    }

    /// The formal negation, distributed back into CNF.
    pub fn negated(&self) -> ForcingQf {
        let mut clauses: Vec<Vec<Literal>> = vec![Vec::new()];
        for clause in &self.clauses {
            let mut next = Vec::with_capacity(clauses.len() * clause.len());
            for partial in &clauses {
                for l in clause {
                    let mut c = partial.clone();
                    let n = l.negated();
                    if !c.contains(&n) {
                        c.push(n);
                    }
                    next.push(c);
                }
            }
            clauses = next;
        }
        // a false conjunct makes the negation an empty disjunction set... i.e. "true"
        if self.clauses.iter().any(Vec::is_empty) {
            clauses.clear();
        }
        ForcingQf { clauses }
    }

    pub fn literals(&self) -> impl Iterator<Item = &Literal> {
        self.clauses.iter().flatten()
    }

    pub fn literal_count(&self) -> usize {
        self.literals().count()
    }

    pub fn params(&self) -> impl Iterator<Item = &str> {
        self.literals().filter_map(|l| match &l.atom {
            Atom::PrefixOfS { param, .. } => Some(param.as_str()),
            _ => None,
        })
    }
}

impl fmt::Display for GenericPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(a) = self.as_member() {
            return write!(f, "in<{},{},\"{}\">", a.x, a.y, a.sigma);
        }
        if self.len() > 64 && self.0.iter().all(Option::is_some) {
            let ones: Vec<String> = self.ones().map(|n| n.to_string()).collect();
            return write!(f, "gen({}: {})", self.len(), ones.join(", "));
        }
        let s: String = self
            .0
            .iter()
            .map(|b| match b {
                Some(true) => '1',
                Some(false) => '0',
                None => '*',
            })
            .collect();
        write!(f, "gen(\"{s}\")")
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::NumEq(n, m) => write!(f, "{n} = {m}"),
            Atom::Halt { e, x, s, y, sigma } => write!(f, "halt({e}, {x}, {s}, {y}, \"{sigma}\")"),
            Atom::PrefixOfS { sigma, param } => write!(f, "pre(\"{sigma}\", {param})"),
            Atom::Generic(p) => write!(f, "{p}"),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("!")?;
        }
        write!(f, "{}", self.atom)
    }
}

impl fmt::Display for ForcingQf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return f.write_str("true");
        }
        for (i, clause) in self.clauses.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            let lits: Vec<String> = clause.iter().map(Literal::to_string).collect();
            match clause.len() {
                0 => f.write_str("false")?,
                1 => f.write_str(&lits[0])?,
                _ if self.clauses.len() == 1 => f.write_str(&lits.join(" | "))?,
                _ => write!(f, "({})", lits.join(" | "))?,
            }
        }
        Ok(())
    }
}

impl Serialize for ForcingQf {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ForcingQf {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    Str(String),
    Sym(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    i: usize,
}

impl Lexer {
    fn new(text: &str) -> Result<Self, KsfError> {
        let err = |position: usize, message: &str| KsfError::Parse { position, message: message.into() };
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let (pos, c) = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let mut j = i;
                while j < chars.len() && chars[j].1.is_ascii_digit() {
                    j += 1;
                }
                let end = chars.get(j).map_or(text.len(), |c| c.0);
                let n = text[pos..end].parse().map_err(|_| err(pos, "number too large"))?;
                toks.push((Tok::Num(n), pos));
                i = j;
            } else if c.is_ascii_alphabetic() || c == '_' {
                let mut j = i;
                while j < chars.len() && (chars[j].1.is_ascii_alphanumeric() || chars[j].1 == '_') {
                    j += 1;
                }
                let end = chars.get(j).map_or(text.len(), |c| c.0);
                toks.push((Tok::Ident(text[pos..end].to_string()), pos));
                i = j;
            } else if c == '"' {
                let mut j = i + 1;
                while j < chars.len() && chars[j].1 != '"' {
                    j += 1;
                }
                if j == chars.len() {
                    return Err(err(pos, "unterminated string"));
                }
                toks.push((Tok::Str(text[pos + 1..chars[j].0].to_string()), pos));
                i = j + 1;
            } else if "()<>,:!&|=".contains(c) {
                toks.push((Tok::Sym(c), pos));
                i += 1;
            } else {
                return Err(err(pos, &format!("unexpected character {c:?}")));
            }
        }
        toks.push((Tok::End, text.len()));
        Ok(Lexer { toks, i: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.i + 1).min(self.toks.len() - 1)].0
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if t != Tok::End {
            self.i += 1;
        }
        t
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, KsfError> {
        Err(KsfError::Parse { position: self.toks[self.i].1, message: message.into() })
    }

    fn sym(&mut self, c: char) -> Result<(), KsfError> {
        if *self.peek() == Tok::Sym(c) {
            self.next();
            Ok(())
        } else {
            self.fail(format!("expected '{c}'"))
        }
    }

    fn num(&mut self) -> Result<u64, KsfError> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.next();
                Ok(n)
            }
            _ => self.fail("expected a number"),
        }
    }

    fn bits(&mut self) -> Result<BinaryString, KsfError> {
        match self.peek().clone() {
            Tok::Str(s) => match s.parse() {
                Ok(b) => {
                    self.next();
                    Ok(b)
                }
                Err(_) => self.fail("expected a string of 0s and 1s"),
            },
            _ => self.fail("expected a quoted bit string"),
        }
    }
}

fn parse_cnf(lx: &mut Lexer) -> Result<ForcingQf, KsfError> {
    if *lx.peek() == Tok::Ident("true".into()) && *lx.peek2() == Tok::End {
        lx.next();
        return Ok(ForcingQf::new(Vec::new()));
    }
    let mut clauses = vec![parse_clause(lx)?];
    while *lx.peek() == Tok::Sym('&') {
        lx.next();
        clauses.push(parse_clause(lx)?);
    }
    if *lx.peek() != Tok::End {
        return lx.fail("unexpected trailing input");
    }
    Ok(ForcingQf::new(clauses))
}

fn parse_clause(lx: &mut Lexer) -> Result<Vec<Literal>, KsfError> {
    if *lx.peek() == Tok::Ident("false".into()) {
        lx.next();
        return Ok(Vec::new());
    }
    let paren = *lx.peek() == Tok::Sym('(');
    if paren {
        lx.next();
    }
    let mut lits = vec![parse_literal(lx)?];
    while *lx.peek() == Tok::Sym('|') {
        lx.next();
        lits.push(parse_literal(lx)?);
    }
    if paren {
        lx.sym(')')?;
    }
    Ok(lits)
}

fn parse_literal(lx: &mut Lexer) -> Result<Literal, KsfError> {
    let mut positive = true;
    while *lx.peek() == Tok::Sym('!') {
        lx.next();
        positive = !positive;
    }
    Ok(Literal { positive, atom: parse_atom(lx)? })
}

fn parse_atom(lx: &mut Lexer) -> Result<Atom, KsfError> {
    match lx.peek().clone() {
        Tok::Num(n) => {
            lx.next();
            lx.sym('=')?;
            Ok(Atom::NumEq(n, lx.num()?))
        }
        Tok::Ident(name) => {
            lx.next();
            match name.as_str() {
                "halt" => {
                    lx.sym('(')?;
                    let mut nums = [0u64; 4];
                    for n in &mut nums {
                        *n = lx.num()?;
                        lx.sym(',')?;
                    }
                    let sigma = lx.bits()?;
                    lx.sym(')')?;
                    let [e, x, s, y] = nums;
                    Ok(Atom::Halt { e, x, s, y, sigma })
                }
                "pre" => {
                    lx.sym('(')?;
                    let sigma = lx.bits()?;
                    lx.sym(',')?;
                    let param = match lx.next() {
                        Tok::Ident(p) => p,
                        _ => return lx.fail("expected a parameter name"),
                    };
                    lx.sym(')')?;
                    Ok(Atom::PrefixOfS { sigma, param })
                }
                "gen" => {
                    lx.sym('(')?;
                    let pattern = match lx.peek().clone() {
                        Tok::Str(s) => {
                            lx.next();
                            let bits = s
                                .chars()
                                .map(|c| match c {
                                    '0' => Ok(Some(false)),
                                    '1' => Ok(Some(true)),
                                    '*' => Ok(None),
                                    _ => Err(()),
                                })
                                .collect::<Result<Vec<_>, _>>();
                            match bits {
                                Ok(b) => GenericPattern::new(b),
                                Err(()) => return lx.fail("pattern characters are 0, 1 and *"),
                            }
                        }
                        _ => {
                            let len = lx.num()?;
                            lx.sym(':')?;
                            let mut ones = Vec::new();
                            while let Tok::Num(n) = *lx.peek() {
                                lx.next();
                                if n >= len {
                                    return lx.fail("position beyond the pattern length");
                                }
                                ones.push(n);
                                if *lx.peek() == Tok::Sym(',') {
                                    lx.next();
                                }
                            }
                            if len > 1 << 20 {
                                return lx.fail("pattern too long");
                            }
                            GenericPattern::sparse(len, &ones)
                        }
                    };
                    lx.sym(')')?;
                    Ok(Atom::Generic(pattern))
                }
                "in" => {
                    lx.sym('<')?;
                    let x = lx.num()?;
                    lx.sym(',')?;
                    let y = lx.num()?;
                    lx.sym(',')?;
                    let sigma = lx.bits()?;
                    lx.sym('>')?;
                    if y > 1 {
                        return lx.fail("axiom outputs are 0 or 1");
                    }
                    Ok(Atom::Generic(GenericPattern::member(&Axiom::new(x, y as u8, sigma)?)?))
                }
                other => lx.fail(format!("unknown atom {other}")),
            }
        }
        _ => lx.fail("expected an atom"),
    }
}

impl FromStr for ForcingQf {
    type Err = KsfError;
    fn from_str(s: &str) -> Result<Self, KsfError> {
        parse_cnf(&mut Lexer::new(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ksf::bits;

    fn qf(s: &str) -> ForcingQf {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_print_round_trip() {
        for text in [
            "3 = 3",
            "!in<0,1,\"1\">",
            "(in<0,1,\"1\"> | !gen(\"0*1\")) & pre(\"01\", S) & halt(0, 1, 10, 1, \"\")",
            "gen(\"0001\") | 1 = 2",
            "true",
            "false",
            "gen(100: 3, 99)",
        ] {
            let f = qf(text);
            assert_eq!(qf(&f.to_string()), f, "{text}");
        }
        assert_eq!(qf("!!2 = 2"), qf("2 = 2"));
    }

    #[test]
    fn member_pattern_shape() {
        let f = qf("in<0,1,\"1\">");
        let Atom::Generic(p) = &f.clauses[0][0].atom else { panic!() };
        assert_eq!(p.len(), 14);
        assert_eq!(p.ones().collect::<Vec<_>>(), vec![13]);
        assert_eq!(p.zeros().count(), 0);
        assert_eq!(GenericPattern::prefix(&bits("01")).zeros().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn negation_distributes() {
        let f = qf("(1 = 1 | 2 = 3) & 4 = 4");
        let n = f.negated();
        assert_eq!(n, qf("(!1 = 1 | !4 = 4) & (!2 = 3 | !4 = 4)"));
        assert_eq!(qf("true").negated(), qf("false"));
        assert_eq!(qf("false").negated(), qf("true"));
    }

    #[test]
    fn parse_errors() {
        for bad in ["", "gen(\"012\")", "in<0,2,\"1\">", "halt(1,2)", "(1 = 1 | 2 = 2", "foo(1)", "gen(3: 5)"] {
            assert!(bad.parse::<ForcingQf>().is_err(), "{bad}");
        }
    }
}
