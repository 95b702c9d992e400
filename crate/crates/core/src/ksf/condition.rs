use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Axiom, KsfError, Real, TuringFunctional};

/// A forcing condition `(Φ, X)`: a finite functional and finitely many
/// reals on which no further computations may be added.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawCondition", into = "RawCondition")]
pub struct Condition {
    pub phi: TuringFunctional,
    pub reals: BTreeSet<Real>,
}

#[derive(Serialize, Deserialize)]
struct RawCondition {
    phi: Vec<Axiom>,
    #[serde(default)]
    reals: Vec<Real>,
}

impl TryFrom<RawCondition> for Condition {
    type Error = KsfError;
    fn try_from(r: RawCondition) -> Result<Self, KsfError> {
        let reals: BTreeSet<Real> = r.reals.iter().cloned().collect();
        if reals.len() != r.reals.len() {
            return Err(KsfError::DuplicateReal);
        }
        let phi = TuringFunctional::new(r.phi);
        phi.validate()?;
        Ok(Condition { phi, reals })
    }
}

impl From<Condition> for RawCondition {
    fn from(c: Condition) -> Self {
        RawCondition { phi: c.phi.iter().cloned().collect(), reals: c.reals.into_iter().collect() }
    }
}

/// Plain forcing with functionals, or its restriction to conditions that
/// partially compute `b` on input `a` and never freeze `a` itself.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    #[default]
    P,
    Q {
        a: Real,
        b: Real,
    },
}

impl Mode {
    /// Whether the axiom may appear in a condition of this mode.
    pub fn admits(&self, ax: &Axiom) -> bool {
        match self {
            Mode::P => true,
            Mode::Q { a, b } => !a.has_prefix(&ax.sigma) || b.bit(ax.x) as u8 == ax.y,
        }
    }

    pub fn admits_real(&self, r: &Real) -> bool {
        match self {
            Mode::P => true,
            Mode::Q { a, .. } => r != a,
        }
    }
}

impl Condition {
    pub fn new(phi: TuringFunctional, reals: impl IntoIterator<Item = Real>) -> Self {
        Condition { phi, reals: reals.into_iter().collect() }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<(), KsfError> {
        Ok(self.phi.validate()?)
    }

    /// Whether the condition belongs to the given mode.
    pub fn is_member(&self, mode: &Mode) -> bool {
        match mode {
            Mode::P => true,
            Mode::Q { a, b } => membership_q(self, a, b),
        }
    }
}

/// Every axiom applying to `a` outputs `b(x)`, and `a` is not frozen.
pub fn membership_q(p: &Condition, a: &Real, b: &Real) -> bool {
    !p.reals.contains(a) && p.phi.iter().all(|ax| !ax.applies_to(a) || b.bit(ax.x) as u8 == ax.y)
}

/// `q ≤ p`: `q` keeps everything of `p`, new axioms have uses longer than
/// all old ones, and no new axiom applies to a real of `p`.
pub fn extends(q: &Condition, p: &Condition, mode: &Mode) -> Result<bool, KsfError> {
    p.validate()?;
    q.validate()?;
    if !p.is_member(mode) || !q.is_member(mode) {
        return Err(KsfError::NotInMode);
    }
    Ok(extends_unchecked(q, p))
}

pub(crate) fn extends_unchecked(q: &Condition, p: &Condition) -> bool {
    if !p.phi.is_subset(&q.phi) || !p.reals.is_subset(&q.reals) {
        return false;
    }
    let old_max = p.phi.max_use();
    q.phi
        .iter()
        .filter(|a| !p.phi.contains(a))
        .all(|a| old_max.is_none_or(|m| a.sigma.len() > m) && !p.reals.iter().any(|x| a.applies_to(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ksf::bits;

    fn ax(x: u64, y: u8, s: &str) -> Axiom {
        Axiom::new(x, y, bits(s)).unwrap()
    }

    fn real(s: &str) -> Real {
        s.parse().unwrap()
    }

    #[test]
    fn extension_examples() {
        let empty = Condition::empty();
        let q = Condition::new(TuringFunctional::new([ax(0, 1, "1")]), []);
        assert_eq!(extends(&q, &empty, &Mode::P), Ok(true));

        let p = Condition::new(TuringFunctional::empty(), [real(":1")]);
        let q = Condition::new(TuringFunctional::new([ax(0, 1, "1")]), [real(":1")]);
        assert_eq!(extends(&q, &p, &Mode::P), Ok(false));

        let p = Condition::new(TuringFunctional::new([ax(0, 1, "11")]), []);
        let q = Condition::new(TuringFunctional::new([ax(0, 1, "11"), ax(1, 0, "110")]), []);
        assert_eq!(extends(&q, &p, &Mode::P), Ok(true));
        // same-length new use is not allowed
        let q = Condition::new(TuringFunctional::new([ax(0, 1, "11"), ax(0, 0, "10")]), []);
        assert_eq!(extends(&q, &p, &Mode::P), Ok(false));
        // dropping reals is not allowed
        assert_eq!(
            extends(&Condition::empty(), &Condition::new(TuringFunctional::empty(), [real(":0")]), &Mode::P),
            Ok(false)
        );
    }

    #[test]
    fn q_membership_examples() {
        let phi = TuringFunctional::new([ax(0, 1, "1")]);
        let ones = real(":1");
        let zeros = real(":0");
        assert!(membership_q(&Condition::new(phi.clone(), []), &ones, &ones));
        assert!(!membership_q(&Condition::new(phi, []), &ones, &zeros));
        assert!(!membership_q(&Condition::new(TuringFunctional::empty(), [ones.clone()]), &ones, &ones));
        let mode = Mode::Q { a: ones.clone(), b: zeros };
        let bad = Condition::new(TuringFunctional::new([ax(0, 1, "1")]), []);
        assert_eq!(extends(&bad, &Condition::empty(), &mode), Err(KsfError::NotInMode));
    }

    #[test]
    fn condition_json() {
        let text = r#"{"phi":[{"x":0,"y":1,"sigma":"1"}],"reals":[{"prefix":"","period":"1"}]}"#;
        let c: Condition = serde_json::from_str(text).unwrap();
        assert_eq!(c.reals.len(), 1);
        let back: Condition = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        let dup = r#"{"phi":[],"reals":[{"prefix":"1","period":"1"},{"prefix":"","period":"1"}]}"#;
        assert!(serde_json::from_str::<Condition>(dup).is_err());
        let bad = r#"{"phi":[{"x":1,"y":0,"sigma":"0"}]}"#;
        assert!(serde_json::from_str::<Condition>(bad).is_err());
    }
}
