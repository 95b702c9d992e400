use thiserror::Error;

use super::{QfFormula, Term};
use crate::usl::{Element, FiniteUsl, GeneratorValuation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("variable {0} is not assigned")]
    Unassigned(String),
    #[error("variable {name} is assigned element {element}, outside the carrier")]
    OutOfRange { name: String, element: Element },
}

pub fn eval_term(t: &Term, u: &FiniteUsl, v: &GeneratorValuation) -> Result<Element, EvalError> {
    match t {
        Term::Zero => Ok(u.zero()),
        Term::Var(name) => match v.target(name) {
            None => Err(EvalError::Unassigned(name.clone())),
            Some(e) if e >= u.size() => Err(EvalError::OutOfRange { name: name.clone(), element: e }),
            Some(e) => Ok(e),
        },
        Term::Join(a, b) => Ok(u.join(eval_term(a, u, v)?, eval_term(b, u, v)?)),
    }
}

/// Tarskian truth of `f` in `u` under the assignment `v`.
pub fn eval_formula(f: &QfFormula, u: &FiniteUsl, v: &GeneratorValuation) -> Result<bool, EvalError> {
    Ok(match f {
        QfFormula::Leq(a, b) => u.leq(eval_term(a, u, v)?, eval_term(b, u, v)?),
        QfFormula::Eq(a, b) => eval_term(a, u, v)? == eval_term(b, u, v)?,
        QfFormula::Not(g) => !eval_formula(g, u, v)?,
        QfFormula::And(gs) => {
            let mut all = true;
            for g in gs {
                // evaluate everything so unassigned variables are always reported
                all &= eval_formula(g, u, v)?;
            }
            all
        }
        QfFormula::Or(gs) => {
            let mut any = false;
            for g in gs {
                any |= eval_formula(g, u, v)?;
            }
            any
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_body;

    fn val(pairs: &[(&str, Element)]) -> GeneratorValuation {
        GeneratorValuation::new(pairs.iter().map(|&(n, e)| (n.to_string(), e)).collect()).unwrap()
    }

    fn holds(text: &str, u: &FiniteUsl, v: &GeneratorValuation) -> bool {
        eval_formula(&parse_body(text, &["x", "y"]).unwrap(), u, v).unwrap()
    }

    #[test]
    fn diamond_atoms_incomparable() {
        let d = FiniteUsl::diamond();
        assert!(!holds("x<=y", &d, &val(&[("x", 1), ("y", 2)])));
    }

    #[test]
    fn join_commutes_everywhere() {
        for u in [FiniteUsl::chain(3), FiniteUsl::diamond()] {
            for x in u.elements() {
                for y in u.elements() {
                    assert!(holds("x+y = y+x", &u, &val(&[("x", x), ("y", y)])));
                }
            }
        }
    }

    #[test]
    fn chain_strict_order() {
        // 0 < m < t with m = 1, t = 2; leq[1][2] true and leq[2][1] false
        let c = FiniteUsl::chain(3);
        assert!(c.leq(1, 2) && !c.leq(2, 1));
        assert!(holds("x<=y & !(y<=x)", &c, &val(&[("x", 1), ("y", 2)])));
    }

    #[test]
    fn unassigned_is_an_error() {
        let f = parse_body("x<=y", &["x", "y"]).unwrap();
        assert_eq!(eval_formula(&f, &FiniteUsl::chain(2), &val(&[("x", 1)])), Err(EvalError::Unassigned("y".into())));
        assert!(matches!(
            eval_formula(&f, &FiniteUsl::chain(2), &val(&[("x", 1), ("y", 9)])),
            Err(EvalError::OutOfRange { .. })
        ));
    }
}
