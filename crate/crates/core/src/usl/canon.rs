//! Canonical keys for USLs, optionally carrying a valuation.
//!
//! When the valuation join-generates the carrier the labeling is forced:
//! number elements in order of first appearance as joins of generator
//! subsets (subsets visited in increasing bitmask order). Otherwise we
//! minimize the order matrix over all zero-fixing relabelings, pruned to
//! permutations that respect a cheap invariant (down-set size, up-set size,
//! names pointing at the element).

use serde::{Deserialize, Serialize};

use super::{Element, FiniteUsl, GeneratorValuation, UslError, ZERO};

/// Isomorphism-invariant key. Ordered by carrier size first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalKey {
    size: usize,
    leq: Vec<bool>,
    valuation: Vec<(String, Element)>,
}

impl CanonicalKey {
    pub fn size(&self) -> usize {
        self.size
    }
}

/// Key for `u` (and `v`, when present). Equal keys iff isomorphic.
pub fn canonicalize(u: &FiniteUsl, v: Option<&GeneratorValuation>) -> Result<CanonicalKey, UslError> {
    Ok(canonical_form(u, v)?.2)
}

/// Canonically relabeled copy of `u` and `v`, plus the key.
pub fn canonical_form(
    u: &FiniteUsl,
    v: Option<&GeneratorValuation>,
) -> Result<(FiniteUsl, Option<GeneratorValuation>, CanonicalKey), UslError> {
    validate(u)?;
    if let Some(v) = v {
        v.check_targets(u)?;
    }
    let order = match v {
        Some(v) if v.len() < 16 && v.generates(u) => generated_order(u, v),
        _ => minimal_order(u, v),
    };
    let relabeled = u.permuted(&order);
    let mut inverse = vec![0; u.size()];
    for (new, &old) in order.iter().enumerate() {
        inverse[old] = new;
    }
    let valuation = v.map(|v| v.mapped(&inverse));
    let key = encode(&relabeled, valuation.as_ref());
    Ok((relabeled, valuation, key))
}

fn validate(u: &FiniteUsl) -> Result<(), UslError> {
    super::validate_usl(u.leq_matrix(), u.join_table())
}

fn encode(u: &FiniteUsl, v: Option<&GeneratorValuation>) -> CanonicalKey {
    let n = u.size();
    let mut leq = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            leq.push(u.leq(a, b));
        }
    }
    CanonicalKey { size: n, leq, valuation: v.map(|v| v.entries().to_vec()).unwrap_or_default() }
}

fn generated_order(u: &FiniteUsl, v: &GeneratorValuation) -> Vec<Element> {
    let targets: Vec<Element> = v.targets().collect();
    let mut order = Vec::with_capacity(u.size());
    let mut seen = vec![false; u.size()];
    for mask in 0usize..(1 << targets.len()) {
        let e = u.join_all((0..targets.len()).filter(|i| mask >> i & 1 == 1).map(|i| targets[i]));
        if !seen[e] {
            seen[e] = true;
            order.push(e);
        }
    }
    debug_assert_eq!(order[0], ZERO);
    order
}

type Invariant = (usize, usize, Vec<usize>);

fn minimal_order(u: &FiniteUsl, v: Option<&GeneratorValuation>) -> Vec<Element> {
    let n = u.size();
    let invariant = |e: Element| -> Invariant {
        let down = u.elements().filter(|&d| u.leq(d, e)).count();
        let up = u.elements().filter(|&d| u.leq(e, d)).count();
        let names =
            v.map(|v| v.targets().enumerate().filter(|&(_, t)| t == e).map(|(i, _)| i).collect()).unwrap_or_default();
        (down, up, names)
    };
    let mut rest: Vec<(Invariant, Element)> = (1..n).map(|e| (invariant(e), e)).collect();
    rest.sort();
    // classes of equal invariant, in invariant order
    let mut classes: Vec<Vec<Element>> = Vec::new();
    for (i, (inv, e)) in rest.iter().enumerate() {
        if i > 0 && rest[i - 1].0 == *inv {
            classes.last_mut().unwrap().push(*e);
        } else {
            classes.push(vec![*e]);
        }
    }

    let mut best: Option<(Vec<bool>, Vec<Element>)> = None;
    let mut current = vec![ZERO];
    search(u, &classes, 0, &mut current, &mut best);
    best.expect("at least one relabeling").1
}

fn search(
    u: &FiniteUsl,
    classes: &[Vec<Element>],
    class_idx: usize,
    current: &mut Vec<Element>,
    best: &mut Option<(Vec<bool>, Vec<Element>)>,
) {
    if class_idx == classes.len() {
        let mut bits = Vec::with_capacity(current.len() * current.len());
        for &a in current.iter() {
            for &b in current.iter() {
                bits.push(u.leq(a, b));
            }
        }
        if best.as_ref().is_none_or(|(b, _)| bits < *b) {
            *best = Some((bits, current.clone()));
        }
        return;
    }
    let class = &classes[class_idx];
    let mut perm: Vec<Element> = class.clone();
    permute(&mut perm, 0, &mut |p| {
        let base = current.len();
        current.extend_from_slice(p);
        search(u, classes, class_idx + 1, current, best);
        current.truncate(base);
    });
}

fn permute(items: &mut Vec<Element>, k: usize, f: &mut dyn FnMut(&[Element])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, f);
        items.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn val(pairs: &[(&str, Element)]) -> GeneratorValuation {
        GeneratorValuation::new(pairs.iter().map(|&(n, t)| (n.to_string(), t)).collect()).unwrap()
    }

    #[test]
    fn relabeled_chain_has_equal_key() {
        let c = FiniteUsl::chain(3);
        let swapped = c.permuted(&[0, 2, 1]);
        assert_ne!(c, swapped);
        assert_eq!(canonicalize(&c, None).unwrap(), canonicalize(&swapped, None).unwrap());
    }

    #[test]
    fn diamond_valuation_swap() {
        let d = FiniteUsl::diamond();
        let k1 = canonicalize(&d, Some(&val(&[("x", 1), ("y", 2)]))).unwrap();
        let k2 = canonicalize(&d, Some(&val(&[("x", 2), ("y", 1)]))).unwrap();
        assert_eq!(k1, k2);
        // exhaustive check: the swap (1 2) is an isomorphism carrying one onto the other
        let p = d.permuted(&[0, 2, 1, 3]);
        assert_eq!(p, d);
    }

    #[test]
    fn different_sizes_differ() {
        assert_ne!(
            canonicalize(&FiniteUsl::chain(2), None).unwrap(),
            canonicalize(&FiniteUsl::trivial(), None).unwrap()
        );
        assert!(canonicalize(&FiniteUsl::trivial(), None).unwrap() < canonicalize(&FiniteUsl::chain(2), None).unwrap());
    }

    #[test]
    fn non_generating_valuation_uses_search() {
        let c = FiniteUsl::chain(3);
        let a = canonicalize(&c, Some(&val(&[("x", 2)]))).unwrap();
        let b = canonicalize(&c, Some(&val(&[("x", 1)]))).unwrap();
        assert_ne!(a, b);
        let d = FiniteUsl::diamond();
        let k1 = canonicalize(&d, Some(&val(&[("x", 1)]))).unwrap();
        let k2 = canonicalize(&d, Some(&val(&[("x", 2)]))).unwrap();
        let k3 = canonicalize(&d, Some(&val(&[("x", 3)]))).unwrap();
        assert_eq!(k1, k2);
        assert_ne!(k1, k3);
    }

    #[test]
    fn out_of_range_valuation_is_an_error() {
        assert!(canonicalize(&FiniteUsl::chain(2), Some(&val(&[("x", 5)]))).is_err());
    }
}
