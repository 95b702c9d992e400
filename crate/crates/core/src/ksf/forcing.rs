//! The forcing relation on quantifier-free sentences and its decision
//! procedure over a fixed finite functional.
//!
//! A unit clause is handled by the atomic clauses directly: a positive
//! generic pattern needs its ones in `Φ_p` and its zeros blocked, and a
//! negated one is forced when no extension can put the ones in while
//! keeping the zeros out. A clause with several undecided literals is
//! forced when no extension forces the negation of every literal.
//!
//! "Some extension exists" questions reduce to a search over markings of
//! the binary tree: a valid functional is the same thing as a set of marked
//! nodes, each with an output bit, where the axiom at `ρ` has input equal
//! to the number of marked proper prefixes of `ρ`. Only prefixes of uses
//! mentioned by the clause matter, so the search is a dynamic program over
//! a finite trie.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{codec, Atom, Axiom, BinaryString, Condition, Env, ForcingQf, GenericPattern, KsfError};
use super::{Literal, Mode, Real, TuringFunctional};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BitStatus {
    One,
    ZeroForced,
    Undecided,
}

/// What a condition already says about an initial segment of the generic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericOracle {
    pub condition: Condition,
    pub bits: Vec<BitStatus>,
}

impl GenericOracle {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn value(&self, n: usize) -> Option<bool> {
        match self.bits.get(n)? {
            BitStatus::One => Some(true),
            BitStatus::ZeroForced => Some(false),
            BitStatus::Undecided => None,
        }
    }

    /// `C ⊕ G` restricted to the first `2 * len` positions.
    pub fn joined(&self, c: &Real) -> Vec<Option<bool>> {
        (0..self.len()).flat_map(|n| [Some(c.bit(n as u64)), self.value(n)]).collect()
    }

    pub fn render(&self) -> String {
        self.bits
            .iter()
            .map(|b| match b {
                BitStatus::One => '1',
                BitStatus::ZeroForced => '0',
                BitStatus::Undecided => '?',
            })
            .collect()
    }
}

pub fn generic_oracle(p: &Condition, len: usize, mode: &Mode) -> GenericOracle {
    GenericOracle { condition: p.clone(), bits: (0..len as u64).map(|n| status(p, mode, n)).collect() }
}

pub(crate) fn status(p: &Condition, mode: &Mode, n: u64) -> BitStatus {
    match codec::decode(n) {
        Err(_) => BitStatus::ZeroForced,
        Ok(a) if p.phi.contains(&a) => BitStatus::One,
        Ok(a) if blocked(p, mode, &a) => BitStatus::ZeroForced,
        Ok(_) => BitStatus::Undecided,
    }
}

/// Clause 4(b) for an axiom outside `Φ_p`: a longer use already exists, an
/// axiom with input at least `x` has a compatible use, the use lies on a
/// frozen real, or (restricted forcing) the use lies on `A` with the wrong
/// value for `B`.
fn blocked(p: &Condition, mode: &Mode, a: &Axiom) -> bool {
    p.phi.iter().any(|b| b.sigma.len() > a.sigma.len() || (b.x >= a.x && b.sigma.compatible(&a.sigma)))
        || p.reals.iter().any(|r| a.applies_to(r))
        || !mode.admits(a)
}

fn check_params(psi: &ForcingQf, env: &Env) -> Result<(), KsfError> {
    psi.params().try_for_each(|name| env.param(name).map(|_| ()))
}

/// Truth of an arithmetic, halting or parameter atom; `None` for generic
/// patterns.
fn atom_truth(atom: &Atom, env: &Env) -> Result<Option<bool>, KsfError> {
    Ok(match atom {
        Atom::NumEq(n, m) => Some(n == m),
        Atom::Halt { e, x, s, y, sigma } => Some(env.evaluator.eval_on(*e, *x, *s, sigma) == Some(*y)),
        Atom::PrefixOfS { sigma, param } => Some(env.param(param)?.has_prefix(sigma)),
        Atom::Generic(_) => None,
    })
}

enum Reduced<'a> {
    True,
    Patterns(Vec<(bool, &'a GenericPattern)>),
}

/// Drops false decided literals; a true one settles the clause.
fn reduce<'a>(clause: &'a [Literal], env: &Env) -> Result<Reduced<'a>, KsfError> {
    let mut pats = Vec::new();
    for l in clause {
        match (atom_truth(&l.atom, env)?, &l.atom) {
            (Some(t), _) if t == l.positive => return Ok(Reduced::True),
            (Some(_), _) => {}
            (None, Atom::Generic(p)) => pats.push((l.positive, p)),
            (None, _) => unreachable!("only generic atoms are undecided"),
        }
    }
    Ok(Reduced::Patterns(pats))
}

pub fn forces_qf(p: &Condition, psi: &ForcingQf, mode: &Mode, env: &Env) -> Result<bool, KsfError> {
    check_params(psi, env)?;
    for clause in &psi.clauses {
        if !forces_clause(p, clause, mode, env)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn forces_clause(p: &Condition, clause: &[Literal], mode: &Mode, env: &Env) -> Result<bool, KsfError> {
    let pats = match reduce(clause, env)? {
        Reduced::True => return Ok(true),
        Reduced::Patterns(pats) => pats,
    };
    match pats.as_slice() {
        [] => Ok(false),
        [(true, pat)] => Ok(forces_pattern(p, mode, pat)),
        _ => {
            let neg: Vec<&GenericPattern> = pats.iter().filter(|l| !l.0).map(|l| l.1).collect();
            let pos: Vec<&GenericPattern> = pats.iter().filter(|l| l.0).map(|l| l.1).collect();
            Ok(!refuting_extension_exists(p, mode, &neg, &pos)?)
        }
    }
}

fn forces_pattern(p: &Condition, mode: &Mode, pat: &GenericPattern) -> bool {
    pat.ones().all(|n| status(p, mode, n) == BitStatus::One)
        && pat.zeros().all(|n| status(p, mode, n) == BitStatus::ZeroForced)
}

/// The axioms a pattern constrains; `None` when it demands a one at a
/// position that codes no axiom.
fn pattern_axioms(pat: &GenericPattern) -> Option<(Vec<Axiom>, Vec<Axiom>)> {
    let ones = pat.ones().map(|n| codec::decode(n).ok()).collect::<Option<Vec<_>>>()?;
    let zeros = pat.zeros().filter_map(|n| codec::decode(n).ok()).collect();
    Some((ones, zeros))
}

type NodeRules = HashMap<BinaryString, Vec<(usize, u64, u8)>>;

struct Search<'a> {
    p: &'a Condition,
    mode: &'a Mode,
    nodes: BTreeSet<BinaryString>,
    required: NodeRules,
    excluded: NodeRules,
    // positive literal i is falsified when the node's axiom differs from (x, y)
    pos_ones: NodeRules,
    // ... or when it equals (x, y)
    pos_zeros: NodeRules,
    memo: HashMap<(BinaryString, u64), Vec<u64>>,
}

fn or_product(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out: Vec<u64> = a.iter().flat_map(|x| b.iter().map(move |y| x | y)).collect();
    out.sort_unstable();
    out.dedup();
    out
}

impl Search<'_> {
    fn markable(&self, rho: &BinaryString, c: u64, y: u8) -> bool {
        let a = Axiom { x: c, y, sigma: rho.clone() };
        !self.p.reals.iter().any(|r| a.applies_to(r)) && self.mode.admits(&a)
    }

    /// Sets of falsified-literal masks reachable in the subtree at `rho`,
    /// given `c` marked proper prefixes.
    fn solve(&mut self, rho: &BinaryString, c: u64) -> Vec<u64> {
        let key = (rho.clone(), c);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let mut result = Vec::new();
        for option in [None, Some(0u8), Some(1u8)] {
            if let Some(y) = option {
                if !self.markable(rho, c, y) {
                    continue;
                }
            }
            let here = |rules: &NodeRules| rules.get(rho).map(Vec::as_slice).unwrap_or(&[]).to_vec();
            let is = |x: u64, y: u8| option == Some(y) && c == x;
            if !here(&self.required).iter().all(|&(_, x, y)| is(x, y))
                || here(&self.excluded).iter().any(|&(_, x, y)| is(x, y))
            {
                continue;
            }
            let mut mask = 0u64;
            for (i, x, y) in here(&self.pos_ones) {
                if !is(x, y) {
                    mask |= 1 << i;
                }
            }
            for (i, x, y) in here(&self.pos_zeros) {
                if is(x, y) {
                    mask |= 1 << i;
                }
            }
            let mut sets = vec![mask];
            let next = c + option.is_some() as u64;
            for bit in [false, true] {
                let child = rho.child(bit);
                if self.nodes.contains(&child) {
                    let sub = self.solve(&child, next);
                    sets = or_product(&sets, &sub);
                    if sets.is_empty() {
                        break;
                    }
                }
            }
            result.extend(sets);
        }
        result.sort_unstable();
        result.dedup();
        self.memo.insert(key, result.clone());
        result
    }
}

/// Whether some extension of `p` has a functional containing the ones and
/// avoiding the zeros of every `neg` pattern while disagreeing with every
/// `pos` pattern. Such a functional can always be topped with a long
/// blocking axiom, which makes the extension force the negation of each
/// literal of the clause `⋁ ¬neg ∨ ⋁ pos`.
fn refuting_extension_exists(
    p: &Condition,
    mode: &Mode,
    neg: &[&GenericPattern],
    pos: &[&GenericPattern],
) -> Result<bool, KsfError> {
    if pos.len() > 64 {
        return Err(KsfError::MalformedTarget("more than 64 positive generic literals in one clause".into()));
    }
    let min_len = p.phi.max_use().map_or(0, |l| l + 1);
    let mut search = Search {
        p,
        mode,
        nodes: BTreeSet::new(),
        required: HashMap::new(),
        excluded: HashMap::new(),
        pos_ones: HashMap::new(),
        pos_zeros: HashMap::new(),
        memo: HashMap::new(),
    };
    let mut uses = BTreeSet::new();
    for pat in neg {
        let Some((ones, zeros)) = pattern_axioms(pat) else {
            return Ok(false);
        };
        for (axioms, must_have, rules) in [(ones, true, &mut search.required), (zeros, false, &mut search.excluded)] {
            for a in axioms {
                if a.sigma.len() < min_len {
                    if p.phi.contains(&a) != must_have {
                        return Ok(false);
                    }
                } else {
                    uses.insert(a.sigma.clone());
                    rules.entry(a.sigma).or_default().push((0, a.x, a.y));
                }
            }
        }
    }
    let mut global = 0u64;
    for (i, pat) in pos.iter().enumerate() {
        let Some((ones, zeros)) = pattern_axioms(pat) else {
            global |= 1 << i;
            continue;
        };
        for (axioms, must_have, rules) in [(ones, true, &mut search.pos_ones), (zeros, false, &mut search.pos_zeros)] {
            for a in axioms {
                if a.sigma.len() < min_len {
                    if p.phi.contains(&a) != must_have {
                        global |= 1 << i;
                    }
                } else {
                    uses.insert(a.sigma.clone());
                    rules.entry(a.sigma).or_default().push((i, a.x, a.y));
                }
            }
        }
    }
    let mut roots = BTreeSet::new();
    for u in &uses {
        roots.insert(u.prefix(min_len));
        for len in min_len..=u.len() {
            search.nodes.insert(u.prefix(len));
        }
    }
    let mut sets = vec![global];
    for root in roots {
        let base = p.phi.iter().filter(|a| a.sigma.is_prefix_of(&root)).count() as u64;
        let sub = search.solve(&root, base);
        sets = or_product(&sets, &sub);
        if sets.is_empty() {
            return Ok(false);
        }
    }
    let full = if pos.len() == 64 { u64::MAX } else { (1u64 << pos.len()) - 1 };
    Ok(sets.contains(&full))
}

/// Some finite set of reals `X` with `(phi0, X) ⊩ psi`, if there is one.
///
/// Each clause gets the witness of its first literal that has one, and the
/// clause witnesses are merged (adding reals is an extension).
pub fn decide_qf_forcing(
    phi0: &TuringFunctional,
    psi: &ForcingQf,
    mode: &Mode,
    env: &Env,
) -> Result<Option<BTreeSet<Real>>, KsfError> {
    check_params(psi, env)?;
    let mut all = BTreeSet::new();
    for clause in &psi.clauses {
        match clause_witness(phi0, clause, mode, env)? {
            Some(reals) => all.extend(reals),
            None => return Ok(None),
        }
    }
    Ok(Some(all))
}

fn clause_witness(
    phi0: &TuringFunctional,
    clause: &[Literal],
    mode: &Mode,
    env: &Env,
) -> Result<Option<BTreeSet<Real>>, KsfError> {
    for l in clause {
        let witness = match (atom_truth(&l.atom, env)?, &l.atom) {
            (Some(t), _) => (t == l.positive).then(BTreeSet::new),
            (None, Atom::Generic(pat)) if l.positive => positive_witness(phi0, pat, mode),
            (None, Atom::Generic(pat)) => negative_witness(phi0, pat, mode)?,
            (None, _) => unreachable!("only generic atoms are undecided"),
        };
        if witness.is_some() {
            return Ok(witness);
        }
    }
    Ok(None)
}

/// A real through `tau`, avoiding `A` in restricted forcing.
fn real_through(tau: &BinaryString, mode: &Mode) -> Real {
    let zeros = Real::extending(tau, false);
    match mode {
        Mode::Q { a, .. } if *a == zeros => Real::extending(tau, true),
        _ => zeros,
    }
}

/// `phi0` must already agree with the pattern; every zero that is not yet
/// blocked gets a real through its use.
fn positive_witness(phi0: &TuringFunctional, pat: &GenericPattern, mode: &Mode) -> Option<BTreeSet<Real>> {
    let (ones, zeros) = pattern_axioms(pat)?;
    if !ones.iter().all(|a| phi0.contains(a)) || zeros.iter().any(|a| phi0.contains(a)) {
        return None;
    }
    let mut p = Condition::new(phi0.clone(), []);
    for a in zeros {
        if !blocked(&p, mode, &a) {
            p.reals.insert(real_through(&a.sigma, mode));
        }
    }
    Some(p.reals)
}

/// Already forced, or made forced by freezing a real through the use of a
/// required axiom that `phi0` lacks.
fn negative_witness(
    phi0: &TuringFunctional,
    pat: &GenericPattern,
    mode: &Mode,
) -> Result<Option<BTreeSet<Real>>, KsfError> {
    let base = Condition::new(phi0.clone(), []);
    if !refuting_extension_exists(&base, mode, &[pat], &[])? {
        return Ok(Some(BTreeSet::new()));
    }
    let Some((ones, _)) = pattern_axioms(pat) else {
        return Ok(Some(BTreeSet::new()));
    };
    Ok(ones.iter().find(|a| !phi0.contains(a)).map(|a| BTreeSet::from([real_through(&a.sigma, mode)])))
}
