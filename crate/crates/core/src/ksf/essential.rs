//! Essential string vectors and the bounded trees they form.
//!
//! A vector `τ` of equal-length strings is essential (to refuting `ψ`, or
//! to splitting `e`) over `Φ0` when every condition that does the job must
//! add an axiom whose use is compatible with some component of `τ`. That
//! property is co-r.e., so the search here either finds a refutation, a
//! condition avoiding `τ` that does the job, or reports that none exists
//! within the bounds.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::split::{find_split_avoiding, functional_extensions};
use super::{decide_qf_forcing, BinaryString, Bounds, Condition, Env, ForcingQf, KsfError, Mode, Real, Split};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<BinaryString>", into = "Vec<BinaryString>")]
pub struct StringVector {
    components: Vec<BinaryString>,
}

impl TryFrom<Vec<BinaryString>> for StringVector {
    type Error = KsfError;
    fn try_from(v: Vec<BinaryString>) -> Result<Self, KsfError> {
        StringVector::new(v)
    }
}

impl From<StringVector> for Vec<BinaryString> {
    fn from(v: StringVector) -> Self {
        v.components
    }
}

impl StringVector {
    pub fn new(components: Vec<BinaryString>) -> Result<Self, KsfError> {
        if components.windows(2).any(|w| w[0].len() != w[1].len()) {
            return Err(KsfError::UnequalLengths);
        }
        Ok(StringVector { components })
    }

    /// `k` empty strings.
    pub fn root(k: usize) -> Self {
        StringVector { components: vec![BinaryString::empty(); k] }
    }

    pub fn components(&self) -> &[BinaryString] {
        &self.components
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    /// The common length of the components.
    pub fn depth(&self) -> usize {
        self.components.first().map_or(0, BinaryString::len)
    }

    /// All `2^k` one-bit extensions, in order.
    pub fn children(&self) -> Vec<StringVector> {
        let k = self.k();
        let mut out: Vec<StringVector> = (0..1u64 << k)
            .map(|m| StringVector {
                components: self
                    .components
                    .iter()
                    .enumerate()
                    .map(|(i, s)| s.child(m >> (k - 1 - i) & 1 == 1))
                    .collect(),
            })
            .collect();
        out.sort();
        out
    }

    pub fn is_prefix_of(&self, other: &StringVector) -> bool {
        self.k() == other.k() && self.components.iter().zip(&other.components).all(|(a, b)| a.is_prefix_of(b))
    }
}

/// `(111,010)`, with `ε` for empty components.
impl fmt::Display for StringVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.components.iter().map(|s| if s.is_empty() { "ε".to_string() } else { s.to_string() }).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for StringVector {
    type Err = KsfError;
    fn from_str(s: &str) -> Result<Self, KsfError> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let bad = |_| KsfError::Parse { position: 0, message: format!("bad string vector {s:?}") };
        let comps = inner
            .split(',')
            .map(|c| match c.trim() {
                "ε" | "" => Ok(BinaryString::empty()),
                t => t.parse().map_err(bad),
            })
            .collect::<Result<Vec<_>, _>>()?;
        StringVector::new(comps)
    }
}

/// One instance `θ(args)` of a universally quantified conjunct.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub args: Vec<u64>,
    pub body: ForcingQf,
}

/// The conjunct `∀ args θ(args)` cut down to explicitly listed instances.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjunctFamily {
    pub id: String,
    pub instances: Vec<Instance>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Target {
    /// Refute the conjunction of the families by forcing a negated instance.
    Conjuncts(Vec<ConjunctFamily>),
    /// Split `e` relative to the parameter `c`.
    Splits { e: u64, c: Real },
}

impl Target {
    pub fn validate(&self) -> Result<(), KsfError> {
        let Target::Conjuncts(families) = self else {
            return Ok(());
        };
        let mut ids = BTreeSet::new();
        for fam in families {
            if !ids.insert(fam.id.as_str()) {
                return Err(KsfError::MalformedTarget(format!("family {} listed twice", fam.id)));
            }
            if fam.instances.is_empty() {
                return Err(KsfError::MalformedTarget(format!("family {} has no instances", fam.id)));
            }
            if fam.instances.windows(2).any(|w| w[0].args.len() != w[1].args.len()) {
                return Err(KsfError::MalformedTarget(format!("family {} mixes arities", fam.id)));
            }
        }
        Ok(())
    }

    pub fn instance(&self, id: &str, args: &[u64]) -> Option<&Instance> {
        let Target::Conjuncts(families) = self else {
            return None;
        };
        families.iter().find(|f| f.id == id)?.instances.iter().find(|i| i.args == args)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Refutation {
    /// A condition avoiding the vector that forces the negation of an instance.
    Conjunct { condition: Condition, id: String, args: Vec<u64> },
    /// Two conditions avoiding the vector that split the computation.
    Split(Split),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EssentialityVerdict {
    Refuted(Refutation),
    /// No refutation among the candidates the bounds allow.
    EssentialUpTo(Bounds),
}

impl EssentialityVerdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, EssentialityVerdict::Refuted(_))
    }
}

pub fn essential_up_to(
    tau: &StringVector,
    phi0: &super::TuringFunctional,
    target: &Target,
    bounds: &Bounds,
    mode: &Mode,
    env: &Env,
) -> Result<EssentialityVerdict, KsfError> {
    target.validate()?;
    let refutation = match target {
        Target::Conjuncts(families) => {
            let negated: Vec<(&str, &[u64], ForcingQf)> = families
                .iter()
                .flat_map(|f| {
                    f.instances
                        .iter()
                        .take(bounds.max_instances)
                        .map(|i| (f.id.as_str(), i.args.as_slice(), i.body.negated()))
                })
                .collect();
            let candidates = functional_extensions(phi0, bounds, mode, tau.components());
            candidates
                .par_iter()
                .map(|phi| -> Result<Option<Refutation>, KsfError> {
                    for (id, args, neg) in &negated {
                        if let Some(reals) = decide_qf_forcing(phi, neg, mode, env)? {
                            return Ok(Some(Refutation::Conjunct {
                                condition: Condition::new(phi.clone(), reals),
                                id: id.to_string(),
                                args: args.to_vec(),
                            }));
                        }
                    }
                    Ok(None)
                })
                .find_map_first(Result::transpose)
                .transpose()?
        }
        Target::Splits { e, c } => {
            find_split_avoiding(phi0, *e, c, tau.components(), bounds, mode, env).map(Refutation::Split)
        }
    };
    Ok(match refutation {
        Some(r) => EssentialityVerdict::Refuted(r),
        None => EssentialityVerdict::EssentialUpTo(bounds.clone()),
    })
}

/// Vectors of `k` strings of length `depth` all of whose truncations
/// survive `essential_up_to`, sorted.
pub fn tree_frontier(
    phi0: &super::TuringFunctional,
    target: &Target,
    k: usize,
    depth: usize,
    bounds: &Bounds,
    mode: &Mode,
    env: &Env,
) -> Result<Vec<StringVector>, KsfError> {
    let survives = |v: &StringVector| -> Result<bool, KsfError> {
        Ok(!essential_up_to(v, phi0, target, bounds, mode, env)?.is_refuted())
    };
    let root = StringVector::root(k);
    let mut level = if survives(&root)? { vec![root] } else { Vec::new() };
    for _ in 0..depth {
        let children: Vec<StringVector> = level.iter().flat_map(StringVector::children).collect();
        let kept: Vec<Result<Option<StringVector>, KsfError>> =
            children.into_par_iter().map(|v| Ok(survives(&v)?.then_some(v))).collect();
        level = kept.into_iter().filter_map(Result::transpose).collect::<Result<_, _>>()?;
        level.sort();
        level.dedup();
    }
    Ok(level)
}

/// The reals a chain of vectors converges to once each component continues
/// with its period forever. One period is shared by every component;
/// otherwise there must be one per component.
pub fn path_reals(chain: &[StringVector], periods: &[BinaryString], mode: &Mode) -> Result<BTreeSet<Real>, KsfError> {
    let last = chain.last().ok_or_else(|| KsfError::NotAChain("empty".into()))?;
    if periods.len() != 1 && periods.len() != last.k() {
        return Err(KsfError::NotAChain(format!("{} periods for {} components", periods.len(), last.k())));
    }
    for w in chain.windows(2) {
        if !w[0].is_prefix_of(&w[1]) || w[1].depth() != w[0].depth() + 1 {
            return Err(KsfError::NotAChain(format!("{} does not continue {}", w[1], w[0])));
        }
    }
    let reals = last
        .components()
        .iter()
        .enumerate()
        .map(|(i, s)| Real::new(s.clone(), periods[i.min(periods.len() - 1)].clone()))
        .collect::<Result<BTreeSet<_>, _>>()?;
    if let Some(r) = reals.iter().find(|r| !mode.admits_real(r)) {
        return Err(KsfError::NotAChain(format!("the path {r} is A itself")));
    }
    Ok(reals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ksf::{bits, Axiom, TuringFunctional};

    fn avoid_ones(n: u64) -> Target {
        // ⋀_j ¬(⟨0,1,1^j⟩ ∈ Φ_G)
        Target::Conjuncts(vec![ConjunctFamily {
            id: "no_ones".into(),
            instances: (0..n)
                .map(|j| Instance {
                    args: vec![j],
                    body: format!("!in<0,1,\"{}\">", "1".repeat(j as usize)).parse().unwrap(),
                })
                .collect(),
        }])
    }

    fn sv(s: &str) -> StringVector {
        s.parse().unwrap()
    }

    #[test]
    fn vectors() {
        assert_eq!(sv("(ε,ε)"), StringVector::root(2));
        assert_eq!(sv("(01,10)").to_string(), "(01,10)");
        assert!("(0,10)".parse::<StringVector>().is_err());
        let kids = sv("(0,1)").children();
        assert_eq!(kids.len(), 4);
        assert_eq!(kids[0], sv("(00,10)"));
        assert!(kids.iter().all(|k| sv("(0,1)").is_prefix_of(k)));
    }

    #[test]
    fn essential_examples() {
        let env = Env::default();
        let b = Bounds::default();
        let phi0 = TuringFunctional::empty();
        let t = avoid_ones(5);
        let v = essential_up_to(&sv("(1)"), &phi0, &t, &b, &Mode::P, &env).unwrap();
        assert_eq!(v, EssentialityVerdict::EssentialUpTo(b.clone()));
        let v = essential_up_to(&sv("(0)"), &phi0, &t, &b, &Mode::P, &env).unwrap();
        let EssentialityVerdict::Refuted(Refutation::Conjunct { condition, id, args }) = v else { panic!() };
        assert_eq!(condition, Condition::new(TuringFunctional::new([Axiom::new(0, 1, bits("1")).unwrap()]), []));
        assert_eq!((id.as_str(), args), ("no_ones", vec![1]));
        assert!(!essential_up_to(&StringVector::root(1), &phi0, &t, &b, &Mode::P, &env).unwrap().is_refuted());
    }

    #[test]
    fn frontier_and_path() {
        let env = Env::default();
        let b = Bounds::default();
        let t = avoid_ones(5);
        let f = tree_frontier(&TuringFunctional::empty(), &t, 1, 3, &b, &Mode::P, &env).unwrap();
        assert_eq!(f, vec![sv("(111)")]);
        let chain = [sv("(1)"), sv("(11)"), sv("(111)")];
        let reals = path_reals(&chain, &[bits("1")], &Mode::P).unwrap();
        assert_eq!(reals, BTreeSet::from([":1".parse().unwrap()]));
        assert!(path_reals(&[sv("(1)"), sv("(01)")], &[bits("1")], &Mode::P).is_err());
        let q = Mode::Q { a: ":1".parse().unwrap(), b: ":0".parse().unwrap() };
        assert!(path_reals(&chain, &[bits("1")], &q).is_err());
        assert!(path_reals(&chain, &[bits("1"), bits("0")], &Mode::P).is_err());
        let pair = path_reals(&[sv("(0,1)")], &[bits("1"), bits("0")], &Mode::P).unwrap();
        assert_eq!(pair, BTreeSet::from(["0:1".parse().unwrap(), "1:0".parse().unwrap()]));
    }

    #[test]
    fn malformed_targets() {
        let empty = Target::Conjuncts(vec![ConjunctFamily { id: "a".into(), instances: vec![] }]);
        assert!(empty.validate().is_err());
        let Target::Conjuncts(mut fams) = avoid_ones(2) else { unreachable!() };
        fams.push(fams[0].clone());
        assert!(Target::Conjuncts(fams).validate().is_err());
    }
}
