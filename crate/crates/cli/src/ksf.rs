use std::collections::BTreeSet;
use std::fmt::Write;
use std::fs;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sigma2::ksf::codec::{decode, encode};
use sigma2::ksf::verify::{verify_refutation, verify_split};
use sigma2::ksf::{
    decide_qf_forcing, essential_up_to, extends, find_split, forces_qf, generic_oracle, path_reals, tree_frontier,
    Axiom, Bounds, CodecError, Condition, ConjunctFamily, Env, EssentialityVerdict, ForcingQf, FunctionalViolation,
    KsfError, Mode, Real, Refutation, Split, StringVector, Target, ToyMachine, TuringFunctional,
};

use crate::args::{BoundsArgs, CodecCommand, EnvArgs, KsfCommand, ModeArgs, ModeKind, TreeKind};
use crate::decide::read_json;
use crate::output::{bounds_line, Outcome, UsageError, FALSE, TRUE, UNDECIDED};

fn mode_of(m: &ModeArgs) -> Result<Mode> {
    match (m.mode, &m.a, &m.b) {
        (ModeKind::P, None, None) => Ok(Mode::P),
        (ModeKind::P, ..) => Err(UsageError("--A and --B need --mode Q".into()).into()),
        (ModeKind::Q, Some(a), Some(b)) => Ok(Mode::Q { a: a.clone(), b: b.clone() }),
        (ModeKind::Q, ..) => Err(UsageError("--mode Q needs both --A and --B".into()).into()),
    }
}

fn env_of(e: &EnvArgs) -> Result<Env> {
    let mut env = match &e.program {
        Some(path) => {
            let src = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            let m: ToyMachine = src.parse().with_context(|| format!("in {}", path.display()))?;
            Env::with_machine(m)
        }
        None => Env::default(),
    };
    for (name, real) in &e.params {
        env.params.insert(name.clone(), real.clone());
    }
    Ok(env)
}

fn bounds_of(b: &BoundsArgs) -> Result<Bounds> {
    let mut out: Bounds = match &b.bounds {
        Some(path) => read_json(path)?,
        None => Bounds::default(),
    };
    macro_rules! set {
        ($($f:ident),*) => { $(if let Some(v) = b.$f { out.$f = v; })* };
    }
    set!(max_new_axioms, max_use_len, max_reals, max_steps, max_input, oracle_len, max_instances);
    Ok(out)
}

fn member(c: &Condition, mode: &Mode, what: &str) -> Result<()> {
    if !c.is_member(mode) {
        bail!("{what}: {}", KsfError::NotInMode);
    }
    Ok(())
}

/// A condition object, or a bare list of axioms standing for a condition with no reals.
fn read_condition(path: &std::path::Path, mode: &Mode) -> Result<Condition> {
    let v: Value = read_json(path)?;
    let c = if v.is_array() {
        let axioms: Vec<Axiom> =
            serde_json::from_value(v).with_context(|| format!("{} is not a list of axioms", path.display()))?;
        let phi = TuringFunctional::new(axioms);
        phi.validate().map_err(KsfError::from).with_context(|| format!("in {}", path.display()))?;
        Condition::new(phi, [])
    } else {
        serde_json::from_value(v).with_context(|| format!("{} is not a condition", path.display()))?
    };
    member(&c, mode, &path.display().to_string())?;
    Ok(c)
}

fn read_functional(path: &std::path::Path, mode: &Mode) -> Result<TuringFunctional> {
    let c = read_condition(path, mode)?;
    if !c.reals.is_empty() {
        bail!("{} lists reals; a bare functional is expected here", path.display());
    }
    Ok(c.phi)
}

fn parse_psi(text: &str) -> Result<ForcingQf> {
    text.parse().with_context(|| format!("cannot parse {text:?}"))
}

#[derive(Deserialize)]
struct RawCondition {
    phi: Vec<Axiom>,
    #[serde(default)]
    reals: Vec<Real>,
}

#[derive(Serialize)]
struct Validity {
    valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    violation: Option<FunctionalViolation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    duplicate_real: Option<Real>,
}

fn validate(path: &std::path::Path) -> Result<Outcome> {
    let v: Value = read_json(path)?;
    let raw: RawCondition = if v.is_array() {
        serde_json::from_value(v).map(|phi| RawCondition { phi, reals: Vec::new() })
    } else {
        serde_json::from_value(v)
    }
    .with_context(|| format!("{} is not a condition", path.display()))?;
    let phi = TuringFunctional::new(raw.phi.iter().cloned());
    let mut seen = BTreeSet::new();
    let duplicate_real = raw.reals.iter().find(|r| !seen.insert(*r)).cloned();
    let violation = phi.validate().err();
    let (code, h) = match (&violation, &duplicate_real) {
        (None, None) => (TRUE, format!("valid condition: {} axioms, {} reals\n", phi.len(), raw.reals.len())),
        (Some(v), _) => (FALSE, format!("invalid: {v}\n")),
        (None, Some(r)) => (FALSE, format!("invalid: the real {r} is listed twice\n")),
    };
    Ok(Outcome::new(code, h, Validity { valid: code == TRUE, violation, duplicate_real }))
}

#[derive(Serialize)]
struct Extension {
    extends: bool,
}

#[derive(Serialize)]
struct Forcing<'a> {
    psi: String,
    forced: bool,
    condition: &'a Condition,
}

#[derive(Serialize)]
struct Witness {
    psi: String,
    witness: Option<Vec<Real>>,
    condition: Option<Condition>,
}

#[derive(Serialize)]
struct OracleView {
    len: usize,
    bits: String,
}

#[derive(Serialize)]
struct SplitReport {
    e: u64,
    c: Real,
    bounds: Bounds,
    split: Option<Split>,
    verified: bool,
}

#[derive(Serialize)]
struct EssentialReport {
    tau: StringVector,
    verdict: EssentialityVerdict,
    verified: bool,
}

#[derive(Serialize)]
struct TreeReport {
    kind: &'static str,
    k: usize,
    depth: usize,
    bounds: Bounds,
    frontier: Vec<StringVector>,
}

#[derive(Serialize)]
struct PathReport {
    reals: Vec<Real>,
}

#[derive(Serialize)]
struct CodecReport {
    code: Option<u64>,
    axiom: Option<Axiom>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn describe_split(s: &Split) -> String {
    let show = |c: &Condition| {
        let axioms: Vec<String> = c.phi.iter().map(Axiom::to_string).collect();
        let reals: Vec<String> = c.reals.iter().map(Real::to_string).collect();
        format!("axioms {{{}}} reals {{{}}}", axioms.join(", "), reals.join(", "))
    };
    format!(
        "at input {}: p = {} computes {}; q = {} computes {}",
        s.x,
        show(&s.p),
        s.values[0],
        show(&s.q),
        s.values[1]
    )
}

/// `{"Conjuncts": [...]}`, `{"Splits": {...}}`, or a bare list of families.
fn read_target(path: &std::path::Path) -> Result<Target> {
    let v: Value = read_json(path)?;
    let t = if v.is_array() {
        Target::Conjuncts(serde_json::from_value::<Vec<ConjunctFamily>>(v)?)
    } else {
        serde_json::from_value(v).with_context(|| format!("{} is not a target", path.display()))?
    };
    t.validate()?;
    Ok(t)
}

pub fn run_ksf(cmd: &KsfCommand) -> Result<Outcome> {
    match cmd {
        KsfCommand::Validate { file } => validate(file),
        KsfCommand::Extends { p, q, mode } => {
            let mode = mode_of(mode)?;
            let (p, q) = (read_condition(p, &mode)?, read_condition(q, &mode)?);
            let ext = extends(&q, &p, &mode)?;
            let h = if ext { "q extends p\n" } else { "q does not extend p\n" };
            Ok(Outcome::new(if ext { TRUE } else { FALSE }, h.into(), Extension { extends: ext }))
        }
        KsfCommand::Force { condition, psi, mode, env } => {
            let mode = mode_of(mode)?;
            let c = read_condition(condition, &mode)?;
            let psi = parse_psi(psi)?;
            let forced = forces_qf(&c, &psi, &mode, &env_of(env)?)?;
            let h = format!("{}: {psi}\n", if forced { "forced" } else { "not forced" });
            let code = if forced { TRUE } else { FALSE };
            Ok(Outcome::new(code, h, Forcing { psi: psi.to_string(), forced, condition: &c }))
        }
        KsfCommand::DecideForce { phi, psi, mode, env } => {
            let mode = mode_of(mode)?;
            let phi = read_functional(phi, &mode)?;
            let psi = parse_psi(psi)?;
            let w = decide_qf_forcing(&phi, &psi, &mode, &env_of(env)?)?;
            let (code, h) = match &w {
                Some(xs) if xs.is_empty() => (TRUE, format!("the functional alone forces {psi}\n")),
                Some(xs) => {
                    let names: Vec<String> = xs.iter().map(Real::to_string).collect();
                    (TRUE, format!("forced by adding the reals {{{}}}: {psi}\n", names.join(", ")))
                }
                None => (FALSE, format!("no set of reals forces {psi} over this functional\n")),
            };
            let condition = w.as_ref().map(|xs| Condition::new(phi.clone(), xs.iter().cloned()));
            let witness = w.map(|xs| xs.into_iter().collect());
            Ok(Outcome::new(code, h, Witness { psi: psi.to_string(), witness, condition }))
        }
        KsfCommand::Oracle { condition, len, mode } => {
            let mode = mode_of(mode)?;
            let c = read_condition(condition, &mode)?;
            let o = generic_oracle(&c, *len, &mode);
            let bits = o.render();
            Ok(Outcome::new(TRUE, format!("{bits}\n"), OracleView { len: *len, bits }))
        }
        KsfCommand::Split { phi, e, c, mode, env, bounds } => {
            let mode = mode_of(mode)?;
            let phi = read_functional(phi, &mode)?;
            let (env, bounds) = (env_of(env)?, bounds_of(bounds)?);
            let split = find_split(&phi, *e, c, &bounds, &mode, &env);
            let verified = match &split {
                Some(s) => {
                    verify_split(&phi, *e, c, &[], s, &bounds, &mode, &env)
                        .map_err(|m| anyhow::anyhow!("internal error: the split fails re-verification: {m}"))?;
                    true
                }
                None => false,
            };
            let (code, h) = match &split {
                Some(s) => (TRUE, format!("split found and re-verified {}\n", describe_split(s))),
                None => (UNDECIDED, format!("no split within bounds ({})\n", bounds_line(&bounds))),
            };
            Ok(Outcome::new(code, h, SplitReport { e: *e, c: c.clone(), bounds, split, verified }))
        }
        KsfCommand::Essential { phi, tau, target, mode, env, bounds } => {
            let mode = mode_of(mode)?;
            let phi = read_functional(phi, &mode)?;
            let target = read_target(target)?;
            let (env, bounds) = (env_of(env)?, bounds_of(bounds)?);
            let verdict = essential_up_to(tau, &phi, &target, &bounds, &mode, &env)?;
            let (code, h, verified) = match &verdict {
                EssentialityVerdict::Refuted(r) => {
                    verify_refutation(tau, &phi, &target, r, &bounds, &mode, &env)
                        .map_err(|m| anyhow::anyhow!("internal error: the refutation fails re-verification: {m}"))?;
                    let how = match r {
                        Refutation::Conjunct { condition, id, args } => {
                            let axioms: Vec<String> = condition.phi.iter().map(Axiom::to_string).collect();
                            format!("axioms {{{}}} force the negation of {id}{args:?}", axioms.join(", "))
                        }
                        Refutation::Split(s) => describe_split(s),
                    };
                    (FALSE, format!("{tau} is refuted (re-verified): {how}\n"), true)
                }
                EssentialityVerdict::EssentialUpTo(b) => {
                    (UNDECIDED, format!("{tau} is essential up to bounds ({})\n", bounds_line(b)), false)
                }
            };
            Ok(Outcome::new(code, h, EssentialReport { tau: tau.clone(), verdict, verified }))
        }
        KsfCommand::Tree { kind, phi, k, depth, target, e, c, mode, env, bounds } => {
            let mode = mode_of(mode)?;
            let phi = read_functional(phi, &mode)?;
            let target = match (kind, target) {
                (TreeKind::T, Some(path)) => read_target(path)?,
                (TreeKind::T, None) => return Err(UsageError("tree T needs --target".into()).into()),
                (TreeKind::U, None) => Target::Splits { e: *e, c: c.clone() },
                (TreeKind::U, Some(_)) => return Err(UsageError("tree U takes -e and -c, not --target".into()).into()),
            };
            let (env, bounds) = (env_of(env)?, bounds_of(bounds)?);
            let mut frontier = tree_frontier(&phi, &target, *k, *depth, &bounds, &mode, &env)?;
            frontier.sort();
            let name = if *kind == TreeKind::T { "T" } else { "U" };
            let mut h = format!(
                "{name} at depth {depth}: {} vectors survive, each essential up to bounds ({})\n",
                frontier.len(),
                bounds_line(&bounds)
            );
            for v in &frontier {
                writeln!(h, "  {v}")?;
            }
            let code = if frontier.is_empty() { FALSE } else { UNDECIDED };
            Ok(Outcome::new(code, h, TreeReport { kind: name, k: *k, depth: *depth, bounds, frontier }))
        }
        KsfCommand::Path { chain, periods, mode } => {
            let mode = mode_of(mode)?;
            let reals: Vec<Real> = path_reals(chain, periods, &mode)?.into_iter().collect();
            let names: Vec<String> = reals.iter().map(Real::to_string).collect();
            Ok(Outcome::new(TRUE, format!("{{{}}}\n", names.join(", ")), PathReport { reals }))
        }
        KsfCommand::Codec(CodecCommand::Encode { x, y, sigma }) => {
            let a = Axiom::new(*x, *y, sigma.clone())?;
            let n = encode(&a)?;
            Ok(Outcome::new(TRUE, format!("{a} = {n}\n"), CodecReport { code: Some(n), axiom: Some(a), error: None }))
        }
        KsfCommand::Codec(CodecCommand::Decode { n }) => match decode(*n) {
            Ok(a) => Ok(Outcome::new(
                TRUE,
                format!("{n} = {a}\n"),
                CodecReport { code: Some(*n), axiom: Some(a), error: None },
            )),
            Err(e @ (CodecError::NotAnAxiom { .. } | CodecError::Zero)) => Ok(Outcome::new(
                FALSE,
                format!("{e}\n"),
                CodecReport { code: Some(*n), axiom: None, error: Some(e.to_string()) },
            )),
            Err(e) => Err(e.into()),
        },
    }
}
