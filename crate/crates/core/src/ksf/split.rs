//! Oracle computations a condition already decides, and bounded search for
//! pairs of conditions that decide them differently.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::forcing::{status, BitStatus};
use super::{Axiom, BinaryString, Condition, Env, Mode, Real, TuringFunctional};

/// Search limits shared by split search and the essential-tuple trees.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default)]
pub struct Bounds {
    /// Axioms a candidate condition may add.
    pub max_new_axioms: usize,
    /// Longest use of an added axiom, and of the finite part of an added real.
    pub max_use_len: usize,
    /// Reals a candidate condition may add.
    pub max_reals: usize,
    /// Step bound for oracle computations.
    pub max_steps: u64,
    /// Inputs `0..=max_input` are tried.
    pub max_input: u64,
    /// Length of the joined oracle `C ⊕ G` a computation may read.
    pub oracle_len: u64,
    /// Instances checked per conjunct family.
    pub max_instances: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_new_axioms: 2,
            max_use_len: 4,
            max_reals: 1,
            max_steps: 64,
            max_input: 2,
            oracle_len: 64,
            max_instances: 5,
        }
    }
}

/// Two conditions extending the base on which `e` converges to different
/// values at `x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub p: Condition,
    pub q: Condition,
    pub x: u64,
    pub values: [u64; 2],
}

/// `{e}^{C ⊕ G}(x)` as far as `p` decides it: bits of `G` that `p` leaves
/// open, and positions past `bounds.oracle_len`, are unavailable.
pub fn local_computation(
    p: &Condition,
    e: u64,
    x: u64,
    c: &Real,
    bounds: &Bounds,
    mode: &Mode,
    env: &Env,
) -> Option<u64> {
    let tape = |n: u64| -> Option<bool> {
        if n >= bounds.oracle_len {
            None
        } else if n.is_multiple_of(2) {
            Some(c.bit(n / 2))
        } else {
            match status(p, mode, n / 2) {
                BitStatus::One => Some(true),
                BitStatus::ZeroForced => Some(false),
                BitStatus::Undecided => None,
            }
        }
    };
    env.evaluator.eval(e, x, bounds.max_steps, &tape)
}

/// Functionals extending `phi0` by at most `max_new_axioms` axioms with
/// uses of length at most `max_use_len`, none compatible with a string in
/// `avoid`. Fewest new axioms first, then by use.
pub(crate) fn functional_extensions(
    phi0: &TuringFunctional,
    bounds: &Bounds,
    mode: &Mode,
    avoid: &[BinaryString],
) -> Vec<TuringFunctional> {
    let min_len = phi0.max_use().map_or(0, |l| l + 1);
    let nodes: Vec<BinaryString> = (min_len..=bounds.max_use_len)
        .flat_map(BinaryString::all_of_length)
        .filter(|s| !avoid.iter().any(|t| t.compatible(s)))
        .collect();
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    for size in 0..=bounds.max_new_axioms.min(nodes.len()) {
        choose(&nodes, 0, size, &mut chosen, &mut |set| {
            let xs: Vec<u64> = set
                .iter()
                .map(|rho| {
                    let old = phi0.iter().filter(|a| a.sigma.is_prefix_of(rho)).count();
                    let new = set.iter().filter(|s| s.is_strict_prefix_of(rho)).count();
                    (old + new) as u64
                })
                .collect();
            for ys in 0..1u32 << set.len() {
                let axioms: Vec<Axiom> = set
                    .iter()
                    .zip(&xs)
                    .enumerate()
                    .map(|(i, (rho, &x))| Axiom { x, y: (ys >> i & 1) as u8, sigma: (*rho).clone() })
                    .collect();
                if axioms.iter().all(|a| mode.admits(a)) {
                    out.push(phi0.with(axioms));
                }
            }
        });
    }
    out
}

fn choose<'a>(
    items: &'a [BinaryString],
    from: usize,
    left: usize,
    chosen: &mut Vec<&'a BinaryString>,
    f: &mut dyn FnMut(&[&'a BinaryString]),
) {
    if left == 0 {
        f(chosen);
        return;
    }
    for i in from..items.len() {
        chosen.push(&items[i]);
        choose(items, i + 1, left - 1, chosen, f);
        chosen.pop();
    }
}

/// Sets of at most `max_reals` reals of the form `τ·0^ω` or `τ·1^ω` with
/// `|τ| <= max_use_len`, smallest first.
pub(crate) fn real_sets(bounds: &Bounds, mode: &Mode) -> Vec<BTreeSet<Real>> {
    let reals: Vec<Real> = BinaryString::all_up_to(bounds.max_use_len)
        .iter()
        .flat_map(|t| [Real::extending(t, false), Real::extending(t, true)])
        .filter(|r| mode.admits_real(r))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut out = Vec::new();
    let mut queue: Vec<(usize, BTreeSet<Real>)> = vec![(0, BTreeSet::new())];
    // breadth first keeps smaller sets first
    let mut i = 0;
    while i < queue.len() {
        let (from, set) = queue[i].clone();
        out.push(set.clone());
        if set.len() < bounds.max_reals {
            for (j, r) in reals.iter().enumerate().skip(from) {
                let mut more = set.clone();
                more.insert(r.clone());
                queue.push((j + 1, more));
            }
        }
        i += 1;
    }
    out
}

/// The first disagreement among bounded extensions of `(phi0, ∅)`: `p` is
/// the first candidate to converge at `x`, `q` the first to converge there
/// to something else. `None` means no split within the bounds.
pub fn find_split(phi0: &TuringFunctional, e: u64, c: &Real, bounds: &Bounds, mode: &Mode, env: &Env) -> Option<Split> {
    find_split_avoiding(phi0, e, c, &[], bounds, mode, env)
}

pub(crate) fn find_split_avoiding(
    phi0: &TuringFunctional,
    e: u64,
    c: &Real,
    avoid: &[BinaryString],
    bounds: &Bounds,
    mode: &Mode,
    env: &Env,
) -> Option<Split> {
    let reals = real_sets(bounds, mode);
    let mut first: Vec<Option<(Condition, u64)>> = vec![None; bounds.max_input as usize + 1];
    for phi in functional_extensions(phi0, bounds, mode, avoid) {
        for xs in &reals {
            let cand = Condition::new(phi.clone(), xs.iter().cloned());
            for x in 0..=bounds.max_input {
                let Some(v) = local_computation(&cand, e, x, c, bounds, mode, env) else {
                    continue;
                };
                match &first[x as usize] {
                    None => first[x as usize] = Some((cand.clone(), v)),
                    Some((p, w)) if *w != v => {
                        return Some(Split { p: p.clone(), q: cand, x, values: [*w, v] });
                    }
                    Some(_) => {}
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ksf::{bits, ToyMachine};

    fn env(program: &str) -> Env {
        Env::with_machine(program.parse::<ToyMachine>().unwrap())
    }

    fn zero_c() -> Real {
        ":0".parse().unwrap()
    }

    const BIT_READER: &str = "set r1 27\nread r2 r1\nout r2";

    #[test]
    fn reads_decided_bits_only() {
        let env = env(BIT_READER);
        let b = Bounds::default();
        let with = Condition::new(TuringFunctional::new([Axiom::new(0, 1, bits("1")).unwrap()]), []);
        assert_eq!(local_computation(&with, 0, 0, &zero_c(), &b, &Mode::P, &env), Some(1));
        let frozen = Condition::new(TuringFunctional::empty(), [":1".parse().unwrap()]);
        assert_eq!(local_computation(&frozen, 0, 0, &zero_c(), &b, &Mode::P, &env), Some(0));
        assert_eq!(local_computation(&Condition::empty(), 0, 0, &zero_c(), &b, &Mode::P, &env), None);
        let short = Bounds { oracle_len: 27, ..Bounds::default() };
        assert_eq!(local_computation(&with, 0, 0, &zero_c(), &short, &Mode::P, &env), None);
    }

    #[test]
    fn bit_reader_splits_constant_does_not() {
        let b = Bounds { max_use_len: 2, ..Bounds::default() };
        let s = find_split(&TuringFunctional::empty(), 0, &zero_c(), &b, &Mode::P, &env(BIT_READER)).unwrap();
        assert_eq!(s.x, 0);
        assert_ne!(s.values[0], s.values[1]);
        assert_eq!(find_split(&TuringFunctional::empty(), 0, &zero_c(), &b, &Mode::P, &env("set r1 0\nout r1")), None);
        let full = TuringFunctional::new([Axiom::new(0, 1, bits("1")).unwrap()]);
        let tight = Bounds { max_use_len: 1, ..Bounds::default() };
        assert_eq!(find_split(&full, 0, &zero_c(), &tight, &Mode::P, &env(BIT_READER)), None);
    }

    #[test]
    fn extensions_are_valid_and_bounded() {
        let b = Bounds { max_use_len: 3, ..Bounds::default() };
        let phi0 = TuringFunctional::new([Axiom::new(0, 0, bits("1")).unwrap()]);
        let exts = functional_extensions(&phi0, &b, &Mode::P, &[bits("11")]);
        assert_eq!(exts[0], phi0);
        for f in &exts {
            f.validate().unwrap();
            assert!(phi0.is_subset(f) && f.len() <= 3);
            for a in f.iter().filter(|a| !phi0.contains(a)) {
                assert!(a.sigma.len() >= 2 && a.sigma.len() <= 3 && !a.sigma.compatible(&bits("11")));
            }
        }
        assert_eq!(real_sets(&Bounds { max_use_len: 1, ..b }, &Mode::P).len(), 1 + 4);
    }
}
