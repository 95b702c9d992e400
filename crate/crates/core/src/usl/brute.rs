//! Exhaustive enumeration of small USLs straight from order matrices.
//!
//! Independent of the closure-system enumerator; used as a test oracle.

use std::collections::BTreeMap;

use super::{canonicalize, FiniteUsl};

/// Every USL with at most `max_size` elements, one per isomorphism class,
/// sorted by canonical key.
///
/// Every finite order has a linear extension, so it suffices to try
/// relations where `a <= b` implies `a < b` as indices (and 0 is least).
pub fn brute_force_usls(max_size: usize) -> Vec<FiniteUsl> {
    let mut found = BTreeMap::new();
    for n in 1..=max_size {
        let pairs: Vec<(usize, usize)> = (1..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        for bits in 0u64..1 << pairs.len() {
            let mut leq = vec![vec![false; n]; n];
            for (i, row) in leq.iter_mut().enumerate() {
                row[i] = true;
                row[0] = i == 0;
            }
            leq[0].iter_mut().for_each(|c| *c = true);
            for (i, &(a, b)) in pairs.iter().enumerate() {
                leq[a][b] = bits >> i & 1 == 1;
            }
            if let Ok(u) = FiniteUsl::from_leq(leq) {
                let key = canonicalize(&u, None).expect("valid usl");
                found.entry(key).or_insert(u);
            }
        }
    }
    found.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_counts() {
        assert_eq!(brute_force_usls(1).len(), 1);
        assert_eq!(brute_force_usls(2).len(), 2);
        // sizes 1..3: {0}, 2-chain, 3-chain
        assert_eq!(brute_force_usls(3).len(), 3);
    }
}
