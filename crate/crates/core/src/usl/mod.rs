//! Finite upper semilattices with a least element.
//!
//! Carriers are index based: element `0` is always the zero, `leq` is a dense
//! boolean matrix and `join` a dense table. Everything here is tiny (a few
//! dozen elements at most), so dense tables keep the checks obvious.

mod brute;
mod canon;
mod embed;
mod enumerate;
mod file;

pub use brute::brute_force_usls;
pub use canon::{canonical_form, canonicalize, CanonicalKey};
pub use embed::{check_embedding, EmbeddingFailure, EmbeddingKind, UslEmbedding};
pub use enumerate::{
    enumerate_end_extensions, enumerate_generated, Diagram, EndExtension, Enumeration, MAX_GENERATORS,
};
pub use file::UslFile;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of an element in a [`FiniteUsl`] carrier.
pub type Element = usize;

/// The zero element of every carrier.
pub const ZERO: Element = 0;

/// A violated semilattice axiom together with the witnessing elements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    Reflexivity { element: Element },
    Antisymmetry { a: Element, b: Element },
    Transitivity { a: Element, b: Element, c: Element },
    ZeroNotLeast { element: Element },
    JoinOutOfRange { a: Element, b: Element, value: Element },
    JoinNotUpperBound { a: Element, b: Element },
    JoinNotLeast { a: Element, b: Element, bound: Element },
    NoLeastUpperBound { a: Element, b: Element },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Reflexivity { element } => write!(f, "reflexivity at element {element}"),
            Violation::Antisymmetry { a, b } => write!(f, "antisymmetry at elements {a}, {b}"),
            Violation::Transitivity { a, b, c } => {
                write!(f, "transitivity at elements {a} <= {b} <= {c}")
            }
            Violation::ZeroNotLeast { element } => {
                write!(f, "zero is not below element {element}")
            }
            Violation::JoinOutOfRange { a, b, value } => {
                write!(f, "join({a}, {b}) = {value} is out of range")
            }
            Violation::JoinNotUpperBound { a, b } => {
                write!(f, "join({a}, {b}) is not an upper bound")
            }
            Violation::JoinNotLeast { a, b, bound } => {
                write!(f, "join({a}, {b}) is not below the upper bound {bound}")
            }
            Violation::NoLeastUpperBound { a, b } => {
                write!(f, "elements {a}, {b} have no least upper bound")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UslError {
    #[error("malformed table: {0}")]
    Shape(String),
    #[error("axiom violated: {0}")]
    Axiom(Violation),
    #[error("valuation: {0}")]
    Valuation(String),
    #[error("embedding map: {0}")]
    Map(String),
}

/// A validated finite upper semilattice with zero at index 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTables", into = "RawTables")]
pub struct FiniteUsl {
    leq: Vec<Vec<bool>>,
    join: Vec<Vec<Element>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawTables {
    leq: Vec<Vec<bool>>,
    join: Vec<Vec<Element>>,
}

impl TryFrom<RawTables> for FiniteUsl {
    type Error = UslError;
    fn try_from(raw: RawTables) -> Result<Self, UslError> {
        FiniteUsl::from_tables(raw.leq, raw.join)
    }
}

impl From<FiniteUsl> for RawTables {
    fn from(u: FiniteUsl) -> Self {
        RawTables { leq: u.leq, join: u.join }
    }
}

/// Checks a candidate pair of tables against every USL axiom.
///
/// Shape problems are reported as [`UslError::Shape`]; otherwise the first
/// violated axiom (in the order reflexivity, antisymmetry, transitivity,
/// zero, join range, upper bound, leastness) is returned with its witnesses.
pub fn validate_usl(leq: &[Vec<bool>], join: &[Vec<Element>]) -> Result<(), UslError> {
    let n = leq.len();
    if n == 0 {
        return Err(UslError::Shape("carrier must have at least one element".into()));
    }
    check_square("leq", leq.iter().map(Vec::len), n)?;
    if join.len() != n {
        return Err(UslError::Shape(format!("join has {} rows, expected {n}", join.len())));
    }
    check_square("join", join.iter().map(Vec::len), n)?;
    validate_order(leq)?;
    for a in 0..n {
        for b in 0..n {
            let j = join[a][b];
            if j >= n {
                return Err(UslError::Axiom(Violation::JoinOutOfRange { a, b, value: j }));
            }
            if !leq[a][j] || !leq[b][j] {
                return Err(UslError::Axiom(Violation::JoinNotUpperBound { a, b }));
            }
            for c in 0..n {
                if leq[a][c] && leq[b][c] && !leq[j][c] {
                    return Err(UslError::Axiom(Violation::JoinNotLeast { a, b, bound: c }));
                }
            }
        }
    }
    Ok(())
}

fn check_square(name: &str, rows: impl Iterator<Item = usize>, n: usize) -> Result<(), UslError> {
    for (i, len) in rows.enumerate() {
        if len != n {
            return Err(UslError::Shape(format!("{name} row {i} has length {len}, expected {n}")));
        }
    }
    Ok(())
}

fn validate_order(leq: &[Vec<bool>]) -> Result<(), UslError> {
    let n = leq.len();
    for a in 0..n {
        if !leq[a][a] {
            return Err(UslError::Axiom(Violation::Reflexivity { element: a }));
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            if leq[a][b] && leq[b][a] {
                return Err(UslError::Axiom(Violation::Antisymmetry { a, b }));
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            if !leq[a][b] {
                continue;
            }
            for c in 0..n {
                if leq[b][c] && !leq[a][c] {
                    return Err(UslError::Axiom(Violation::Transitivity { a, b, c }));
                }
            }
        }
    }
    for e in 0..n {
        if !leq[ZERO][e] {
            return Err(UslError::Axiom(Violation::ZeroNotLeast { element: e }));
        }
    }
    Ok(())
}

impl FiniteUsl {
    pub fn from_tables(leq: Vec<Vec<bool>>, join: Vec<Vec<Element>>) -> Result<Self, UslError> {
        validate_usl(&leq, &join)?;
        Ok(FiniteUsl { leq, join })
    }

    /// Builds a USL from its order alone, deriving the join table.
    pub fn from_leq(leq: Vec<Vec<bool>>) -> Result<Self, UslError> {
        let n = leq.len();
        if n == 0 {
            return Err(UslError::Shape("carrier must have at least one element".into()));
        }
        check_square("leq", leq.iter().map(Vec::len), n)?;
        validate_order(&leq)?;
        let join = derive_join(&leq)?;
        Ok(FiniteUsl { leq, join })
    }

    /// The one-element USL `{0}`.
    pub fn trivial() -> Self {
        FiniteUsl { leq: vec![vec![true]], join: vec![vec![ZERO]] }
    }

    /// The chain `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Self {
        assert!(n >= 1);
        let leq = (0..n).map(|a| (0..n).map(|b| a <= b).collect()).collect();
        let join = (0..n).map(|a| (0..n).map(|b| a.max(b)).collect()).collect();
        FiniteUsl { leq, join }
    }

    /// The four-element diamond `{0, a, b, a+b}` with `a`, `b` incomparable.
    pub fn diamond() -> Self {
        FiniteUsl::from_leq(vec![
            vec![true, true, true, true],
            vec![false, true, false, true],
            vec![false, false, true, true],
            vec![false, false, false, true],
        ])
        .expect("diamond is a USL")
    }

    pub fn size(&self) -> usize {
        self.leq.len()
    }

    pub fn zero(&self) -> Element {
        ZERO
    }

    pub fn leq(&self, a: Element, b: Element) -> bool {
        self.leq[a][b]
    }

    pub fn join(&self, a: Element, b: Element) -> Element {
        self.join[a][b]
    }

    pub fn leq_matrix(&self) -> &[Vec<bool>] {
        &self.leq
    }

    pub fn join_table(&self) -> &[Vec<Element>] {
        &self.join
    }

    pub fn elements(&self) -> std::ops::Range<Element> {
        0..self.size()
    }

    /// Join of all elements.
    pub fn top(&self) -> Element {
        self.join_all(self.elements())
    }

    pub fn join_all(&self, elems: impl IntoIterator<Item = Element>) -> Element {
        elems.into_iter().fold(ZERO, |acc, e| self.join(acc, e))
    }

    /// Relabels the carrier: new element `i` is old element `order[i]`.
    /// `order` must be a permutation with `order[0] == 0`.
    pub fn permuted(&self, order: &[Element]) -> FiniteUsl {
        let n = self.size();
        let mut inverse = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            inverse[old] = new;
        }
        let leq = (0..n).map(|i| (0..n).map(|j| self.leq[order[i]][order[j]]).collect()).collect();
        let join = (0..n).map(|i| (0..n).map(|j| inverse[self.join[order[i]][order[j]]]).collect()).collect();
        FiniteUsl { leq, join }
    }
}

fn derive_join(leq: &[Vec<bool>]) -> Result<Vec<Vec<Element>>, UslError> {
    let n = leq.len();
    let mut join = vec![vec![ZERO; n]; n];
    for a in 0..n {
        for b in 0..n {
            let lub =
                (0..n).find(|&c| leq[a][c] && leq[b][c] && (0..n).all(|d| !(leq[a][d] && leq[b][d]) || leq[c][d]));
            match lub {
                Some(c) => join[a][b] = c,
                None => return Err(UslError::Axiom(Violation::NoLeastUpperBound { a, b })),
            }
        }
    }
    Ok(join)
}

/// An ordered assignment of variable names to elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeneratorValuation {
    entries: Vec<(String, Element)>,
}

impl GeneratorValuation {
    pub fn new(entries: Vec<(String, Element)>) -> Result<Self, UslError> {
        let mut seen = BTreeSet::new();
        for (name, _) in &entries {
            if !seen.insert(name.as_str()) {
                return Err(UslError::Valuation(format!("duplicate name {name}")));
            }
        }
        Ok(GeneratorValuation { entries })
    }

    pub fn empty() -> Self {
        GeneratorValuation { entries: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }

    pub fn targets(&self) -> impl Iterator<Item = Element> + '_ {
        self.entries.iter().map(|&(_, t)| t)
    }

    pub fn entries(&self) -> &[(String, Element)] {
        &self.entries
    }

    pub fn target(&self, name: &str) -> Option<Element> {
        self.entries.iter().find(|(n, _)| n == name).map(|&(_, t)| t)
    }

    /// Checks that every target is in range.
    pub fn check_targets(&self, u: &FiniteUsl) -> Result<(), UslError> {
        for (name, t) in &self.entries {
            if *t >= u.size() {
                return Err(UslError::Valuation(format!("{name} -> {t} is outside a carrier of size {}", u.size())));
            }
        }
        Ok(())
    }

    /// True when the targets together with zero join-generate the carrier.
    pub fn generates(&self, u: &FiniteUsl) -> bool {
        if self.check_targets(u).is_err() {
            return false;
        }
        let targets: Vec<Element> = self.targets().collect();
        if targets.len() >= usize::BITS as usize {
            return false;
        }
        let mut hit = vec![false; u.size()];
        for mask in 0usize..(1 << targets.len()) {
            let e = u.join_all((0..targets.len()).filter(|i| mask >> i & 1 == 1).map(|i| targets[i]));
            hit[e] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// Applies an element map to every target.
    pub fn mapped(&self, map: &[Element]) -> GeneratorValuation {
        GeneratorValuation { entries: self.entries.iter().map(|(n, t)| (n.clone(), map[*t])).collect() }
    }

    /// Concatenation; names must stay distinct.
    pub fn extended(&self, more: &GeneratorValuation) -> Result<GeneratorValuation, UslError> {
        let mut entries = self.entries.clone();
        entries.extend(more.entries.iter().cloned());
        GeneratorValuation::new(entries)
    }
}
