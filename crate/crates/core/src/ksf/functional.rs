use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{codec, BinaryString, KsfError, Real};

/// `⟨x, y, σ⟩`: on input `x`, output `y` using oracle prefix `σ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawAxiom")]
pub struct Axiom {
    pub x: u64,
    pub y: u8,
    pub sigma: BinaryString,
}

#[derive(Deserialize)]
struct RawAxiom {
    x: u64,
    y: u64,
    sigma: BinaryString,
}

impl TryFrom<RawAxiom> for Axiom {
    type Error = KsfError;
    fn try_from(r: RawAxiom) -> Result<Self, KsfError> {
        if r.y > 1 {
            return Err(KsfError::BadOutput(r.y));
        }
        Axiom::new(r.x, r.y as u8, r.sigma)
    }
}

impl Axiom {
    pub fn new(x: u64, y: u8, sigma: BinaryString) -> Result<Axiom, KsfError> {
        if y > 1 {
            return Err(KsfError::BadOutput(y as u64));
        }
        Ok(Axiom { x, y, sigma })
    }

    pub fn code(&self) -> Result<u64, KsfError> {
        Ok(codec::encode(self)?)
    }

    /// True when the use is an initial segment of the oracle.
    pub fn applies_to(&self, oracle: &impl Oracle) -> bool {
        oracle.extends(&self.sigma)
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{},\"{}\">", self.x, self.y, self.sigma)
    }
}

/// Something an axiom's use can be an initial segment of.
pub trait Oracle {
    fn extends(&self, sigma: &BinaryString) -> bool;
}

impl Oracle for BinaryString {
    fn extends(&self, sigma: &BinaryString) -> bool {
        sigma.is_prefix_of(self)
    }
}

impl Oracle for Real {
    fn extends(&self, sigma: &BinaryString) -> bool {
        self.has_prefix(sigma)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FunctionalViolation {
    /// Same input, compatible uses, yet different axioms.
    Functionality { a: Axiom, b: Axiom },
    /// `shorter.sigma ⊊ longer.sigma` but `shorter.x >= longer.x`.
    UseMonotoneOrder { shorter: Axiom, longer: Axiom },
    /// No axiom for input `missing_x` with use strictly inside `axiom.sigma`.
    UseMonotoneMissing { axiom: Axiom, missing_x: u64 },
}

impl fmt::Display for FunctionalViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionalViolation::Functionality { a, b } => {
                write!(f, "functionality: {a} and {b} have compatible uses")
            }
            FunctionalViolation::UseMonotoneOrder { shorter, longer } => {
                write!(f, "use-monotonicity (shorter uses serve smaller inputs): {shorter} and {longer}")
            }
            FunctionalViolation::UseMonotoneMissing { axiom, missing_x } => write!(
                f,
                "use-monotonicity (smaller inputs are served first): {axiom} has no input {missing_x} below it"
            ),
        }
    }
}

impl std::error::Error for FunctionalViolation {}

/// A finite set of axioms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TuringFunctional {
    axioms: BTreeSet<Axiom>,
}

impl TuringFunctional {
    pub fn new(axioms: impl IntoIterator<Item = Axiom>) -> Self {
        TuringFunctional { axioms: axioms.into_iter().collect() }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn axioms(&self) -> &BTreeSet<Axiom> {
        &self.axioms
    }

    pub fn iter(&self) -> impl Iterator<Item = &Axiom> {
        self.axioms.iter()
    }

    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    pub fn contains(&self, a: &Axiom) -> bool {
        self.axioms.contains(a)
    }

    pub fn is_subset(&self, other: &TuringFunctional) -> bool {
        self.axioms.is_subset(&other.axioms)
    }

    pub fn with(&self, more: impl IntoIterator<Item = Axiom>) -> TuringFunctional {
        let mut axioms = self.axioms.clone();
        axioms.extend(more);
        TuringFunctional { axioms }
    }

    /// Length of the longest use, or `None` for the empty functional.
    pub fn max_use(&self) -> Option<usize> {
        self.axioms.iter().map(|a| a.sigma.len()).max()
    }

    /// Checks functionality and both use-monotonicity conditions.
    pub fn validate(&self) -> Result<(), FunctionalViolation> {
        for a in &self.axioms {
            for b in &self.axioms {
                if a < b && a.x == b.x && a.sigma.compatible(&b.sigma) {
                    return Err(FunctionalViolation::Functionality { a: a.clone(), b: b.clone() });
                }
            }
        }
        for a in &self.axioms {
            for b in &self.axioms {
                if a.sigma.is_strict_prefix_of(&b.sigma) && a.x >= b.x {
                    return Err(FunctionalViolation::UseMonotoneOrder { shorter: a.clone(), longer: b.clone() });
                }
            }
        }
        for b in &self.axioms {
            for x in 0..b.x {
                if !self.axioms.iter().any(|a| a.x == x && a.sigma.is_strict_prefix_of(&b.sigma)) {
                    return Err(FunctionalViolation::UseMonotoneMissing { axiom: b.clone(), missing_x: x });
                }
            }
        }
        Ok(())
    }

    /// `Φ(x)` on the given oracle, if some axiom applies.
    pub fn eval(&self, x: u64, oracle: &impl Oracle) -> Option<u8> {
        self.axioms.iter().find(|a| a.x == x && a.applies_to(oracle)).map(|a| a.y)
    }
}

impl FromIterator<Axiom> for TuringFunctional {
    fn from_iter<I: IntoIterator<Item = Axiom>>(iter: I) -> Self {
        TuringFunctional::new(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ksf::bits;

    fn ax(x: u64, y: u8, s: &str) -> Axiom {
        Axiom::new(x, y, bits(s)).unwrap()
    }

    #[test]
    fn validation_examples() {
        assert_eq!(TuringFunctional::new([ax(0, 1, "0"), ax(1, 0, "01")]).validate(), Ok(()));
        assert_eq!(
            TuringFunctional::new([ax(1, 0, "0")]).validate(),
            Err(FunctionalViolation::UseMonotoneMissing { axiom: ax(1, 0, "0"), missing_x: 0 })
        );
        assert!(matches!(
            TuringFunctional::new([ax(0, 1, "1"), ax(0, 0, "10")]).validate(),
            Err(FunctionalViolation::Functionality { .. })
        ));
        assert!(matches!(
            TuringFunctional::new([ax(1, 0, "0"), ax(0, 1, "01")]).validate(),
            Err(FunctionalViolation::UseMonotoneOrder { .. })
        ));
    }

    #[test]
    fn evaluation() {
        let f = TuringFunctional::new([ax(0, 1, "1")]);
        assert_eq!(f.eval(0, &bits("10")), Some(1));
        assert_eq!(f.eval(0, &bits("01")), None);
        let g = TuringFunctional::new([ax(0, 1, "1"), ax(1, 0, "11")]);
        let ones = Real::new(bits("1"), bits("1")).unwrap();
        assert_eq!(g.eval(1, &ones), Some(0));
    }

    #[test]
    fn axiom_json_rejects_bad_output() {
        assert!(serde_json::from_str::<Axiom>(r#"{"x":0,"y":2,"sigma":"1"}"#).is_err());
        assert_eq!(serde_json::from_str::<Axiom>(r#"{"x":0,"y":1,"sigma":"1"}"#).unwrap(), ax(0, 1, "1"));
    }
}
