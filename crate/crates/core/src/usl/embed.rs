use serde::{Deserialize, Serialize};

use super::{Element, FiniteUsl, UslError, ZERO};

/// A map between carriers, to be checked by [`check_embedding`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UslEmbedding {
    pub source: FiniteUsl,
    pub dest: FiniteUsl,
    pub map: Vec<Element>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EmbeddingFailure {
    NotInjective { a: Element, b: Element },
    ZeroNotPreserved,
    OrderNotPreserved { a: Element, b: Element },
    JoinNotPreserved { a: Element, b: Element },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EmbeddingKind {
    NotEmbedding(EmbeddingFailure),
    /// An embedding whose image is not downward closed: `new` lies below `old`.
    Embedding {
        new: Element,
        old: Element,
    },
    EndExtension,
}

impl EmbeddingKind {
    pub fn is_embedding(&self) -> bool {
        !matches!(self, EmbeddingKind::NotEmbedding(_))
    }
}

pub fn check_embedding(e: &UslEmbedding) -> Result<EmbeddingKind, UslError> {
    let (src, dst, map) = (&e.source, &e.dest, &e.map);
    if map.len() != src.size() {
        return Err(UslError::Map(format!("map has {} entries for a source of size {}", map.len(), src.size())));
    }
    if let Some((i, &t)) = map.iter().enumerate().find(|&(_, &t)| t >= dst.size()) {
        return Err(UslError::Map(format!("element {i} maps to {t}, outside the destination")));
    }
    if map[ZERO] != dst.zero() {
        return Ok(EmbeddingKind::NotEmbedding(EmbeddingFailure::ZeroNotPreserved));
    }
    for a in src.elements() {
        for b in src.elements() {
            if a < b && map[a] == map[b] {
                return Ok(EmbeddingKind::NotEmbedding(EmbeddingFailure::NotInjective { a, b }));
            }
            if src.leq(a, b) != dst.leq(map[a], map[b]) {
                return Ok(EmbeddingKind::NotEmbedding(EmbeddingFailure::OrderNotPreserved { a, b }));
            }
            if map[src.join(a, b)] != dst.join(map[a], map[b]) {
                return Ok(EmbeddingKind::NotEmbedding(EmbeddingFailure::JoinNotPreserved { a, b }));
            }
        }
    }
    let mut in_image = vec![false; dst.size()];
    for &t in map {
        in_image[t] = true;
    }
    for new in dst.elements().filter(|&d| !in_image[d]) {
        if let Some(&old) = map.iter().find(|&&old| dst.leq(new, old)) {
            return Ok(EmbeddingKind::Embedding { new, old });
        }
    }
    Ok(EmbeddingKind::EndExtension)
}

impl UslEmbedding {
    pub fn identity(u: &FiniteUsl) -> Self {
        UslEmbedding { source: u.clone(), dest: u.clone(), map: u.elements().collect() }
    }

    /// `next ∘ self`; `next.source` must equal `self.dest`.
    pub fn then(&self, next: &UslEmbedding) -> Result<UslEmbedding, UslError> {
        if next.source != self.dest || self.map.iter().any(|&t| t >= next.map.len()) {
            return Err(UslError::Map("embeddings do not compose".into()));
        }
        Ok(UslEmbedding {
            source: self.source.clone(),
            dest: next.dest.clone(),
            map: self.map.iter().map(|&t| next.map[t]).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_end_extension() {
        for u in [FiniteUsl::trivial(), FiniteUsl::chain(3), FiniteUsl::diamond()] {
            assert_eq!(check_embedding(&UslEmbedding::identity(&u)).unwrap(), EmbeddingKind::EndExtension);
        }
    }

    #[test]
    fn chain_into_longer_chain_is_not_end_extension() {
        let e = UslEmbedding { source: FiniteUsl::chain(2), dest: FiniteUsl::chain(3), map: vec![0, 2] };
        // m = 1 sits strictly below the image of a
        assert_eq!(check_embedding(&e).unwrap(), EmbeddingKind::Embedding { new: 1, old: 2 });
    }

    #[test]
    fn chain_into_diamond_is_end_extension() {
        let e = UslEmbedding { source: FiniteUsl::chain(2), dest: FiniteUsl::diamond(), map: vec![0, 1] };
        assert_eq!(check_embedding(&e).unwrap(), EmbeddingKind::EndExtension);
        // onto the top instead: 1 and 2 are below the image of a
        let e = UslEmbedding { map: vec![0, 3], ..e };
        assert!(matches!(check_embedding(&e).unwrap(), EmbeddingKind::Embedding { .. }));
    }

    #[test]
    fn failures() {
        let e = UslEmbedding { source: FiniteUsl::chain(2), dest: FiniteUsl::chain(3), map: vec![1, 2] };
        assert_eq!(check_embedding(&e).unwrap(), EmbeddingKind::NotEmbedding(EmbeddingFailure::ZeroNotPreserved));
        let e = UslEmbedding { source: FiniteUsl::diamond(), dest: FiniteUsl::chain(4), map: vec![0, 1, 2, 3] };
        assert!(!check_embedding(&e).unwrap().is_embedding());
        let e = UslEmbedding { source: FiniteUsl::chain(2), dest: FiniteUsl::chain(2), map: vec![0, 7] };
        assert!(check_embedding(&e).is_err());
        let e = UslEmbedding { source: FiniteUsl::chain(2), dest: FiniteUsl::chain(2), map: vec![0] };
        assert!(check_embedding(&e).is_err());
    }
}
