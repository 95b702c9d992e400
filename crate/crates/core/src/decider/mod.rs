//! Deciding ∃x̄∀ȳ sentences over the degree structures.
//!
//! A sentence `∃x̄ ∀ȳ φ` holds in the Turing, arithmetic and hyperarithmetic
//! degrees iff some finite USL `M` generated by `x̄` has the property that
//! every end extension `N` of `M` generated by `x̄ȳ` satisfies `φ`. The
//! criterion rests on three facts about the degree structures (every finite
//! USL is an initial segment, incomparable elements exist over any point,
//! and the extended Posner–Robinson theorem); we rely on them without proof.
//!
//! Both searches are finite: a USL generated by `n` elements has at most
//! `2^n` elements. Any cap that cuts the search short turns the answer into
//! [`Truth::UndecidedAtCap`] instead of a guess.

use std::cmp::Ordering;
use std::ops::ControlFlow;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{normalize_body, QfFormula, Sigma2Sentence, Term};
use crate::usl::{enumerate_generated, Diagram, FiniteUsl, GeneratorValuation, UslError, UslFile, MAX_GENERATORS};

pub const DEFAULT_MAX_VARS: usize = 5;
pub const DEFAULT_MAX_SIZE: usize = (1 << DEFAULT_MAX_VARS) + 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Bound on `|x̄| + |ȳ|`.
    pub max_vars: usize,
    /// Bound on carrier sizes of `M` and `N`.
    pub max_size: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_vars: DEFAULT_MAX_VARS, max_size: DEFAULT_MAX_SIZE }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truth {
    True,
    False,
    UndecidedAtCap,
}

/// A finite USL with named elements, stored in USL file format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "UslFile", into = "UslFile")]
pub struct Model {
    pub usl: FiniteUsl,
    /// Sorted by name.
    pub valuation: GeneratorValuation,
}

impl Model {
    pub fn new(usl: FiniteUsl, valuation: &GeneratorValuation) -> Model {
        let mut entries = valuation.entries().to_vec();
        entries.sort();
        let valuation = GeneratorValuation::new(entries).expect("names were distinct");
        Model { usl, valuation }
    }
}

impl TryFrom<UslFile> for Model {
    type Error = UslError;
    fn try_from(f: UslFile) -> Result<Self, UslError> {
        let (usl, valuation) = f.to_usl()?;
        Ok(Model { usl, valuation })
    }
}

impl From<Model> for UslFile {
    fn from(m: Model) -> Self {
        UslFile::from_usl(&m.usl, Some(&m.valuation))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub candidate: Model,
    pub extension: Model,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapsUsed {
    pub max_vars: usize,
    pub max_size: usize,
    pub candidates: usize,
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub truth: Truth,
    pub witness: Option<Model>,
    /// For a false verdict, one failing end extension per candidate, in
    /// candidate order.
    pub counterexamples: Vec<Counterexample>,
    pub caps_used: CapsUsed,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecideError {
    #[error("variable {0} is used but not quantified")]
    Unbound(String),
    #[error("sentence has both an existential and a universal block")]
    NotAFragment,
    #[error(transparent)]
    Usl(#[from] UslError),
}

/// The body compiled to generator bitmasks: `s <= t` holds in a diagram iff
/// `mask(s) ⊆ cl(mask(t))`.
#[derive(Clone, Debug)]
enum Compiled {
    Leq(u32, u32),
    Not(Box<Compiled>),
    And(Vec<Compiled>),
    Or(Vec<Compiled>),
}

impl Compiled {
    fn new(f: &QfFormula, vars: &[String]) -> Result<Compiled, DecideError> {
        let mask = |t: &Term| term_mask(t, vars);
        Ok(match f {
            QfFormula::Leq(a, b) => Compiled::Leq(mask(a)?, mask(b)?),
            QfFormula::Eq(..) => unreachable!("equalities are normalized away"),
            QfFormula::Not(g) => Compiled::Not(Box::new(Compiled::new(g, vars)?)),
            QfFormula::And(gs) => Compiled::And(gs.iter().map(|g| Compiled::new(g, vars)).collect::<Result<_, _>>()?),
            QfFormula::Or(gs) => Compiled::Or(gs.iter().map(|g| Compiled::new(g, vars)).collect::<Result<_, _>>()?),
        })
    }

    fn holds(&self, d: &Diagram) -> bool {
        match self {
            Compiled::Leq(s, t) => d.leq_masks(*s, *t),
            Compiled::Not(g) => !g.holds(d),
            Compiled::And(gs) => gs.iter().all(|g| g.holds(d)),
            Compiled::Or(gs) => gs.iter().any(|g| g.holds(d)),
        }
    }
}

fn term_mask(t: &Term, vars: &[String]) -> Result<u32, DecideError> {
    Ok(match t {
        Term::Zero => 0,
        Term::Var(v) => match vars.iter().position(|w| w == v) {
            Some(i) => 1 << i,
            None => return Err(DecideError::Unbound(v.clone())),
        },
        Term::Join(a, b) => term_mask(a, vars)? | term_mask(b, vars)?,
    })
}

enum Stage {
    Pass,
    Fail(Diagram),
    Truncated,
}

/// Universal stage for one candidate: the smallest failing end extension, if any.
fn universal_stage(m: &Diagram, j: usize, body: &Compiled, cap: usize) -> Stage {
    let mut worst: Option<(SortKey, Diagram)> = None;
    let truncated = m.for_each_end_extension(j, cap, |n| {
        if !body.holds(n) {
            let key = n.sort_key();
            if worst.as_ref().is_none_or(|(k, _)| key.cmp(k) == Ordering::Less) {
                worst = Some((key, n.clone()));
            }
        }
        ControlFlow::Continue(())
    });
    match (worst, truncated) {
        (Some((_, n)), _) => Stage::Fail(n),
        (None, true) => Stage::Truncated,
        (None, false) => Stage::Pass,
    }
}

type SortKey = (usize, Vec<bool>, Vec<usize>);

fn prepare(s: &Sigma2Sentence) -> Result<(Vec<String>, Compiled), DecideError> {
    let vars: Vec<String> = s.exist_vars.iter().chain(&s.univ_vars).cloned().collect();
    let body = Compiled::new(&normalize_body(&s.body), &vars)?;
    Ok((vars, body))
}

fn over_cap(s: &Sigma2Sentence, caps: Caps) -> bool {
    s.var_count() > caps.max_vars || s.var_count() > MAX_GENERATORS
}

pub fn decide(s: &Sigma2Sentence, caps: Caps) -> Result<Verdict, DecideError> {
    let (vars, body) = prepare(s)?;
    let mut caps_used = CapsUsed { max_vars: caps.max_vars, max_size: caps.max_size, candidates: 0, truncated: false };
    if over_cap(s, caps) {
        caps_used.truncated = true;
        return Ok(Verdict { truth: Truth::UndecidedAtCap, witness: None, counterexamples: Vec::new(), caps_used });
    }
    let k = s.exist_vars.len();
    let j = s.univ_vars.len();
    let candidates = enumerate_generated(k, caps.max_size)?;
    caps_used.candidates = candidates.items.len();
    caps_used.truncated = candidates.truncated;

    let stages: Vec<Stage> = candidates.items.par_iter().map(|m| universal_stage(m, j, &body, caps.max_size)).collect();

    if let Some(i) = stages.iter().position(|st| matches!(st, Stage::Pass)) {
        let (usl, val) = candidates.items[i].to_usl(&s.exist_vars)?;
        return Ok(Verdict {
            truth: Truth::True,
            witness: Some(Model::new(usl, &val)),
            counterexamples: Vec::new(),
            caps_used,
        });
    }
    if stages.iter().any(|st| matches!(st, Stage::Truncated)) {
        caps_used.truncated = true;
    }
    if caps_used.truncated {
        return Ok(Verdict { truth: Truth::UndecidedAtCap, witness: None, counterexamples: Vec::new(), caps_used });
    }
    let mut counterexamples = Vec::with_capacity(stages.len());
    for (m, st) in candidates.items.iter().zip(stages) {
        let Stage::Fail(n) = st else { unreachable!("no candidate passed or was truncated") };
        let (mu, mv) = m.to_usl(&s.exist_vars)?;
        let (nu, nv) = n.to_usl(&vars)?;
        counterexamples.push(Counterexample { candidate: Model::new(mu, &mv), extension: Model::new(nu, &nv) });
    }
    Ok(Verdict { truth: Truth::False, witness: None, counterexamples, caps_used })
}

/// The Σ₁, Π₁ and closed cases. These are ordinary [`decide`] runs with one
/// block empty; the separate entry point only checks the shape.
pub fn decide_fragment(s: &Sigma2Sentence, caps: Caps) -> Result<Verdict, DecideError> {
    if !s.exist_vars.is_empty() && !s.univ_vars.is_empty() {
        return Err(DecideError::NotAFragment);
    }
    decide(s, caps)
}

/// Outcome of re-running the universal stage on a given candidate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CandidateCheck {
    Passes,
    FailsAt(Model),
    Truncated,
}

/// Runs only the universal stage of `s` on `(m, mv)`, where `mv` must
/// assign exactly the existential variables and generate `m`.
pub fn check_candidate(
    s: &Sigma2Sentence,
    m: &FiniteUsl,
    mv: &GeneratorValuation,
    caps: Caps,
) -> Result<CandidateCheck, DecideError> {
    let (vars, body) = prepare(s)?;
    let ordered = GeneratorValuation::new(
        s.exist_vars
            .iter()
            .map(|v| {
                mv.target(v).map(|t| (v.clone(), t)).ok_or_else(|| UslError::Valuation(format!("{v} is not assigned")))
            })
            .collect::<Result<_, _>>()?,
    )?;
    let d = Diagram::from_usl(m, &ordered)?;
    if over_cap(s, caps) {
        return Ok(CandidateCheck::Truncated);
    }
    Ok(match universal_stage(&d, s.univ_vars.len(), &body, caps.max_size) {
        Stage::Pass => CandidateCheck::Passes,
        Stage::Truncated => CandidateCheck::Truncated,
        Stage::Fail(n) => {
            let (nu, nv) = n.to_usl(&vars)?;
            CandidateCheck::FailsAt(Model::new(nu, &nv))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{eval_formula, parse_sentence};

    fn run(text: &str) -> Verdict {
        decide(&parse_sentence(text).unwrap(), Caps::default()).unwrap()
    }

    #[test]
    fn two_incomparables() {
        let v = run("E x y. !(x<=y) & !(y<=x)");
        assert_eq!(v.truth, Truth::True);
        let w = v.witness.unwrap();
        assert_eq!(w.usl, FiniteUsl::diamond());
    }

    #[test]
    fn no_maximum() {
        let s = parse_sentence("E x. A y. y<=x").unwrap();
        let v = decide(&s, Caps::default()).unwrap();
        assert_eq!(v.truth, Truth::False);
        assert_eq!(v.counterexamples.len(), 2);
        for c in &v.counterexamples {
            assert!(!eval_formula(&s.body, &c.extension.usl, &c.extension.valuation).unwrap());
        }
    }

    #[test]
    fn minimal_degree_exists() {
        let v = run("E x. !(x<=0) & A y. (!(y<=x) | y=x | y<=0)");
        assert_eq!(v.truth, Truth::True);
        assert_eq!(v.witness.unwrap().usl, FiniteUsl::chain(2));
    }

    #[test]
    fn fragments() {
        for (text, truth) in [
            ("A y. 0<=y", Truth::True),
            ("A x y. x<=x+y", Truth::True),
            ("E x. !(x<=0)", Truth::True),
            ("A x. x<=0", Truth::False),
            ("0<=0", Truth::True),
            ("!(0<=0)", Truth::False),
        ] {
            let v = decide_fragment(&parse_sentence(text).unwrap(), Caps::default()).unwrap();
            assert_eq!(v.truth, truth, "{text}");
        }
        assert_eq!(
            decide_fragment(&parse_sentence("E x. A y. y<=x").unwrap(), Caps::default()),
            Err(DecideError::NotAFragment)
        );
    }

    #[test]
    fn caps_turn_into_undecided() {
        let s = parse_sentence("E x. A y z. y<=x").unwrap();
        let v = decide(&s, Caps { max_vars: 2, max_size: 33 }).unwrap();
        assert_eq!(v.truth, Truth::UndecidedAtCap);
        assert!(v.caps_used.truncated);
        let s = parse_sentence("E x. A y. y<=x").unwrap();
        let v = decide(&s, Caps { max_vars: 5, max_size: 2 }).unwrap();
        assert_eq!(v.truth, Truth::UndecidedAtCap);
    }

    #[test]
    fn verdict_serializes_round_trip() {
        for text in ["E x y. !(x<=y) & !(y<=x)", "E x. A y. y<=x"] {
            let v = run(text);
            let json = serde_json::to_string(&v).unwrap();
            assert_eq!(serde_json::from_str::<Verdict>(&json).unwrap(), v);
        }
    }
}
