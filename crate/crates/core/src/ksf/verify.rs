//! Re-checking search results from scratch. These checks share no code
//! with the searches that produce the results, only the forcing relation
//! and the local computation they are stated in terms of.

use super::{
    forces_qf, local_computation, BinaryString, Bounds, Condition, Env, Mode, Real, Refutation, Split, StringVector,
    Target, TuringFunctional,
};

/// `q` extends `(phi0, ∅)`, is valid, belongs to the mode, and adds only
/// axioms with uses incompatible with every string in `avoid`.
pub fn check_extension(
    q: &Condition,
    phi0: &TuringFunctional,
    avoid: &[BinaryString],
    mode: &Mode,
) -> Result<(), String> {
    q.phi.validate().map_err(|v| format!("invalid functional: {v}"))?;
    if let Some(a) = phi0.iter().find(|a| !q.phi.contains(a)) {
        return Err(format!("drops the base axiom {a}"));
    }
    let old = phi0.iter().map(|a| a.sigma.len()).max();
    for a in q.phi.iter().filter(|a| !phi0.contains(a)) {
        if old.is_some_and(|l| a.sigma.len() <= l) {
            return Err(format!("new axiom {a} has a use no longer than the base uses"));
        }
        if let Some(t) = avoid.iter().find(|t| t.is_prefix_of(&a.sigma) || a.sigma.is_prefix_of(t)) {
            return Err(format!("new axiom {a} is compatible with {t}"));
        }
    }
    if let Mode::Q { a, b } = mode {
        if q.reals.contains(a) {
            return Err("the condition freezes A".into());
        }
        if let Some(bad) = q.phi.iter().find(|ax| a.has_prefix(&ax.sigma) && b.bit(ax.x) as u8 != ax.y) {
            return Err(format!("{bad} computes the wrong value of B on A"));
        }
    }
    Ok(())
}

pub fn verify_split(
    phi0: &TuringFunctional,
    e: u64,
    c: &Real,
    avoid: &[BinaryString],
    split: &Split,
    bounds: &Bounds,
    mode: &Mode,
    env: &Env,
) -> Result<(), String> {
    for (name, cond, want) in [("p", &split.p, split.values[0]), ("q", &split.q, split.values[1])] {
        check_extension(cond, phi0, avoid, mode).map_err(|m| format!("{name}: {m}"))?;
        let got = local_computation(cond, e, split.x, c, bounds, mode, env);
        if got != Some(want) {
            return Err(format!("{name} computes {got:?} at {}, not {want}", split.x));
        }
    }
    if split.values[0] == split.values[1] {
        return Err("the two values agree".into());
    }
    Ok(())
}

pub fn verify_refutation(
    tau: &StringVector,
    phi0: &TuringFunctional,
    target: &Target,
    refutation: &Refutation,
    bounds: &Bounds,
    mode: &Mode,
    env: &Env,
) -> Result<(), String> {
    match (target, refutation) {
        (Target::Conjuncts(_), Refutation::Conjunct { condition, id, args }) => {
            check_extension(condition, phi0, tau.components(), mode)?;
            let inst = target.instance(id, args).ok_or_else(|| format!("no instance {id}{args:?}"))?;
            match forces_qf(condition, &inst.body.negated(), mode, env) {
                Ok(true) => Ok(()),
                Ok(false) => Err(format!("the condition does not force the negation of {id}{args:?}")),
                Err(e) => Err(e.to_string()),
            }
        }
        (Target::Splits { e, c }, Refutation::Split(s)) => {
            verify_split(phi0, *e, c, tau.components(), s, bounds, mode, env)
        }
        _ => Err("refutation does not match the target kind".into()),
    }
}
