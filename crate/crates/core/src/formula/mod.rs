//! Terms, quantifier-free formulas and ∃∀ sentences over `{<=, =, +, 0}`,
//! where `+` is join.

mod eval;
mod parse;

pub use eval::{eval_formula, eval_term, EvalError};
pub use parse::{parse_body, parse_sentence, ParseError};

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Zero,
    Var(String),
    Join(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn join(a: Term, b: Term) -> Term {
        Term::Join(Box::new(a), Box::new(b))
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Term::Zero => {}
            Term::Var(v) => {
                out.insert(v);
            }
            Term::Join(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    fn renamed(&self, f: &dyn Fn(&str) -> String) -> Term {
        match self {
            Term::Zero => Term::Zero,
            Term::Var(v) => Term::Var(f(v)),
            Term::Join(a, b) => Term::join(a.renamed(f), b.renamed(f)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QfFormula {
    Leq(Term, Term),
    Eq(Term, Term),
    Not(Box<QfFormula>),
    And(Vec<QfFormula>),
    Or(Vec<QfFormula>),
}

impl QfFormula {
    pub fn leq(a: Term, b: Term) -> QfFormula {
        QfFormula::Leq(a, b)
    }

    pub fn negate(f: QfFormula) -> QfFormula {
        QfFormula::Not(Box::new(f))
    }

    pub fn free_vars(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            QfFormula::Leq(a, b) | QfFormula::Eq(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            QfFormula::Not(f) => f.collect_vars(out),
            QfFormula::And(fs) | QfFormula::Or(fs) => fs.iter().for_each(|f| f.collect_vars(out)),
        }
    }

    pub fn renamed(&self, f: &dyn Fn(&str) -> String) -> QfFormula {
        match self {
            QfFormula::Leq(a, b) => QfFormula::Leq(a.renamed(f), b.renamed(f)),
            QfFormula::Eq(a, b) => QfFormula::Eq(a.renamed(f), b.renamed(f)),
            QfFormula::Not(g) => QfFormula::negate(g.renamed(f)),
            QfFormula::And(gs) => QfFormula::And(gs.iter().map(|g| g.renamed(f)).collect()),
            QfFormula::Or(gs) => QfFormula::Or(gs.iter().map(|g| g.renamed(f)).collect()),
        }
    }

    /// Number of connective layers above the atoms (an atom has depth 1).
    pub fn depth(&self) -> usize {
        match self {
            QfFormula::Leq(..) | QfFormula::Eq(..) => 1,
            QfFormula::Not(f) => 1 + f.depth(),
            QfFormula::And(fs) | QfFormula::Or(fs) => 1 + fs.iter().map(QfFormula::depth).max().unwrap_or(0),
        }
    }
}

/// Negation normal form with `=` eliminated and `&`/`|` flattened. The
/// result contains only `Leq`, `Not(Leq)`, `And` and `Or` (with at least two
/// children each).
pub fn normalize_body(f: &QfFormula) -> QfFormula {
    nnf(f, true)
}

fn nnf(f: &QfFormula, positive: bool) -> QfFormula {
    match (f, positive) {
        (QfFormula::Leq(a, b), true) => QfFormula::Leq(a.clone(), b.clone()),
        (QfFormula::Leq(a, b), false) => QfFormula::negate(QfFormula::Leq(a.clone(), b.clone())),
        (QfFormula::Eq(a, b), _) => {
            let both = [QfFormula::Leq(a.clone(), b.clone()), QfFormula::Leq(b.clone(), a.clone())];
            let parts = both.iter().map(|g| nnf(g, positive)).collect();
            if positive {
                flat_and(parts)
            } else {
                flat_or(parts)
            }
        }
        (QfFormula::Not(g), _) => nnf(g, !positive),
        (QfFormula::And(gs), true) | (QfFormula::Or(gs), false) => {
            flat_and(gs.iter().map(|g| nnf(g, positive)).collect())
        }
        (QfFormula::Or(gs), true) | (QfFormula::And(gs), false) => {
            flat_or(gs.iter().map(|g| nnf(g, positive)).collect())
        }
    }
}

fn flat_and(parts: Vec<QfFormula>) -> QfFormula {
    let mut out = Vec::new();
    for p in parts {
        match p {
            QfFormula::And(inner) => out.extend(inner),
            other => out.push(other),
        }
    }
    if out.len() == 1 {
        out.pop().unwrap()
    } else {
        QfFormula::And(out)
    }
}

fn flat_or(parts: Vec<QfFormula>) -> QfFormula {
    let mut out = Vec::new();
    for p in parts {
        match p {
            QfFormula::Or(inner) => out.extend(inner),
            other => out.push(other),
        }
    }
    if out.len() == 1 {
        out.pop().unwrap()
    } else {
        QfFormula::Or(out)
    }
}

/// `∃ exist_vars ∀ univ_vars body`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sigma2Sentence {
    pub exist_vars: Vec<String>,
    pub univ_vars: Vec<String>,
    pub body: QfFormula,
}

impl Sigma2Sentence {
    /// Checks that the blocks are disjoint, duplicate free, and cover the
    /// free variables of the body.
    pub fn new(exist_vars: Vec<String>, univ_vars: Vec<String>, body: QfFormula) -> Result<Self, ParseError> {
        let mut seen = BTreeSet::new();
        for v in exist_vars.iter().chain(&univ_vars) {
            if !seen.insert(v.as_str()) {
                return Err(ParseError::Duplicate { name: v.clone(), position: 0 });
            }
        }
        if let Some(v) = body.free_vars().into_iter().find(|v| !seen.contains(v)) {
            return Err(ParseError::Undeclared { name: v.to_string(), position: 0 });
        }
        Ok(Sigma2Sentence { exist_vars, univ_vars, body })
    }

    pub fn var_count(&self) -> usize {
        self.exist_vars.len() + self.univ_vars.len()
    }

    /// Consistent renaming of every variable.
    pub fn renamed(&self, f: &dyn Fn(&str) -> String) -> Sigma2Sentence {
        Sigma2Sentence {
            exist_vars: self.exist_vars.iter().map(|v| f(v)).collect(),
            univ_vars: self.univ_vars.iter().map(|v| f(v)).collect(),
            body: self.body.renamed(f),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Zero => write!(f, "0"),
            Term::Var(v) => write!(f, "{v}"),
            // `+` parses left-associatively, so only a right join needs parens
            Term::Join(a, b) => match **b {
                Term::Join(..) => write!(f, "{a} + ({b})"),
                _ => write!(f, "{a} + {b}"),
            },
        }
    }
}

impl fmt::Display for QfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QfFormula::Leq(a, b) => write!(f, "{a} <= {b}"),
            QfFormula::Eq(a, b) => write!(f, "{a} = {b}"),
            QfFormula::Not(g) => match **g {
                QfFormula::Not(_) => write!(f, "!{g}"),
                _ => write!(f, "!({g})"),
            },
            QfFormula::And(gs) => write_joined(f, gs, " & ", |g| matches!(g, QfFormula::And(_) | QfFormula::Or(_))),
            QfFormula::Or(gs) => write_joined(f, gs, " | ", |g| matches!(g, QfFormula::Or(_))),
        }
    }
}

fn write_joined(
    f: &mut fmt::Formatter<'_>,
    items: &[QfFormula],
    sep: &str,
    needs_parens: impl Fn(&QfFormula) -> bool,
) -> fmt::Result {
    for (i, g) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        if needs_parens(g) {
            write!(f, "({g})")?;
        } else {
            write!(f, "{g}")?;
        }
    }
    Ok(())
}

impl fmt::Display for Sigma2Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.exist_vars.is_empty() {
            write!(f, "E {}. ", self.exist_vars.join(" "))?;
        }
        if !self.univ_vars.is_empty() {
            write!(f, "A {}. ", self.univ_vars.join(" "))?;
        }
        write!(f, "{}", self.body)
    }
}
