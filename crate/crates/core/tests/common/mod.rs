//! Oracles and generators shared by the integration tests and the
//! acceptance runner. Nothing here calls the searches it is used to check.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use sigma2::formula::{QfFormula, Sigma2Sentence, Term};
use sigma2::ksf::Atom;
use sigma2::ksf::{
    bits, Axiom, BinaryString, Condition, Env, ForcingQf, GenericPattern, Literal, Mode, Real, ToyMachine,
    TuringFunctional,
};
use sigma2::usl::{FiniteUsl, GeneratorValuation};

// ---------------------------------------------------------------- USL side

pub fn term_value(t: &Term, u: &FiniteUsl, env: &BTreeMap<&str, usize>) -> usize {
    match t {
        Term::Zero => 0,
        Term::Var(v) => env[v.as_str()],
        Term::Join(a, b) => u.join(term_value(a, u, env), term_value(b, u, env)),
    }
}

pub fn holds(f: &QfFormula, u: &FiniteUsl, env: &BTreeMap<&str, usize>) -> bool {
    match f {
        QfFormula::Leq(a, b) => u.leq(term_value(a, u, env), term_value(b, u, env)),
        QfFormula::Eq(a, b) => term_value(a, u, env) == term_value(b, u, env),
        QfFormula::Not(g) => !holds(g, u, env),
        QfFormula::And(gs) => gs.iter().all(|g| holds(g, u, env)),
        QfFormula::Or(gs) => gs.iter().any(|g| holds(g, u, env)),
    }
}

/// Every assignment of `vars` into the carrier of `u`.
pub fn assignments<'a>(vars: &[&'a str], size: usize) -> Vec<BTreeMap<&'a str, usize>> {
    let mut out = vec![BTreeMap::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|m| {
                (0..size).map(move |e| {
                    let mut m = m.clone();
                    m.insert(*v, e);
                    m
                })
            })
            .collect();
    }
    out
}

/// Σ₁ or Π₁ truth over a family of finite USLs, by trying every tuple.
pub fn brute_truth(s: &Sigma2Sentence, usls: &[FiniteUsl]) -> bool {
    let vars: Vec<&str> = s.exist_vars.iter().chain(&s.univ_vars).map(String::as_str).collect();
    let existential = !s.exist_vars.is_empty();
    let found =
        usls.iter().any(|u| assignments(&vars, u.size()).iter().any(|env| holds(&s.body, u, env) == existential));
    if existential {
        found
    } else {
        !found
    }
}

fn terms(vars: &[&str]) -> Vec<Term> {
    let mut ts = vec![Term::Zero];
    ts.extend(vars.iter().map(|v| Term::var(v)));
    if vars.len() == 2 {
        ts.push(Term::join(Term::var(vars[0]), Term::var(vars[1])));
    }
    ts
}

/// Bodies of depth at most 3 over `0`, the variables and their join.
pub fn bodies(vars: &[&str]) -> Vec<QfFormula> {
    let ts = terms(vars);
    let mut atoms = Vec::new();
    for (i, s) in ts.iter().enumerate() {
        for (j, t) in ts.iter().enumerate() {
            if i != j {
                atoms.push(QfFormula::Leq(s.clone(), t.clone()));
            }
            if i < j {
                atoms.push(QfFormula::Eq(s.clone(), t.clone()));
            }
        }
    }
    let mut out = atoms.clone();
    let mut binary = Vec::new();
    for (i, a) in atoms.iter().enumerate() {
        out.push(QfFormula::negate(a.clone()));
        for b in &atoms[i + 1..] {
            binary.push(QfFormula::And(vec![a.clone(), b.clone()]));
            binary.push(QfFormula::Or(vec![a.clone(), b.clone()]));
        }
    }
    for f in &binary {
        out.push(QfFormula::negate(f.clone()));
    }
    out.extend(binary);
    for a in &atoms {
        for b in &atoms {
            if a != b {
                out.push(QfFormula::And(vec![QfFormula::negate(a.clone()), b.clone()]));
                out.push(QfFormula::Or(vec![QfFormula::negate(a.clone()), b.clone()]));
            }
        }
    }
    out
}

/// All Σ₁ and Π₁ sentences with at most two variables and body depth at
/// most 3 built from the atoms above, deduplicated by their printed form.
pub fn sigma1_pi1_corpus() -> Vec<Sigma2Sentence> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for vars in [vec!["x"], vec!["x", "y"]] {
        let names: Vec<String> = vars.iter().map(|v| v.to_string()).collect();
        for body in bodies(&vars) {
            assert!(body.depth() <= 3);
            for existential in [true, false] {
                let (e, a) = if existential { (names.clone(), vec![]) } else { (vec![], names.clone()) };
                let s = Sigma2Sentence::new(e, a, body.clone()).unwrap();
                if seen.insert(s.to_string()) {
                    out.push(s);
                }
            }
        }
    }
    out
}

pub fn env_of(v: &GeneratorValuation) -> BTreeMap<&str, usize> {
    v.entries().iter().map(|(n, e)| (n.as_str(), *e)).collect()
}

/// `n` end-extends `m` along the shared names of `mv`: the sub-USL of `n`
/// generated by those names is isomorphic to `m` (matching generators) and
/// downward closed in `n`.
pub fn is_end_extension(m: &FiniteUsl, mv: &GeneratorValuation, n: &FiniteUsl, nv: &GeneratorValuation) -> bool {
    let names: Vec<&str> = mv.names().collect();
    let mut image = BTreeMap::new();
    for mask in 0u32..1 << names.len() {
        let pick = |u: &FiniteUsl, v: &GeneratorValuation| {
            (0..names.len()).filter(|i| mask >> i & 1 == 1).fold(0, |acc, i| u.join(acc, v.target(names[i]).unwrap()))
        };
        let (a, b) = (pick(m, mv), pick(n, nv));
        if *image.entry(a).or_insert(b) != b {
            return false;
        }
    }
    let sub: BTreeSet<usize> = image.values().copied().collect();
    image.len() == m.size()
        && sub.len() == m.size()
        && image.iter().all(|(&a, &fa)| image.iter().all(|(&b, &fb)| m.leq(a, b) == n.leq(fa, fb)))
        && n.elements().all(|e| sub.contains(&e) || !sub.iter().any(|&s| n.leq(e, s)))
}

// ---------------------------------------------------------------- forcing side

pub fn ax(x: u64, y: u8, s: &str) -> Axiom {
    Axiom::new(x, y, bits(s)).unwrap()
}

pub fn real(s: &str) -> Real {
    s.parse().unwrap()
}

pub fn qf(s: &str) -> ForcingQf {
    s.parse().unwrap()
}

pub fn random_string(rng: &mut impl Rng, max_len: usize) -> BinaryString {
    let len = rng.gen_range(0..=max_len);
    BinaryString::from_bits((0..len).map(|_| rng.gen_bool(0.5)).collect())
}

pub fn random_real(rng: &mut impl Rng, max_prefix: usize, max_period: usize) -> Real {
    let prefix = random_string(rng, max_prefix);
    let mut period = random_string(rng, max_period);
    if period.is_empty() {
        period = BinaryString::from_bits(vec![rng.gen_bool(0.5)]);
    }
    Real::new(prefix, period).unwrap()
}

/// Marks random tree nodes; the axiom at `ρ` gets as input the number of
/// marked proper prefixes of `ρ`, which is exactly what validity demands.
pub fn random_functional(rng: &mut impl Rng, max_axioms: usize, max_use: usize) -> TuringFunctional {
    let n = rng.gen_range(0..=max_axioms);
    let mut nodes: BTreeMap<BinaryString, u8> = BTreeMap::new();
    for _ in 0..n {
        nodes.insert(random_string(rng, max_use), rng.gen_range(0..=1));
    }
    functional_from_marks(&nodes)
}

pub fn functional_from_marks(nodes: &BTreeMap<BinaryString, u8>) -> TuringFunctional {
    nodes
        .iter()
        .map(|(rho, &y)| {
            let x = nodes.keys().filter(|s| s.is_strict_prefix_of(rho)).count() as u64;
            Axiom::new(x, y, rho.clone()).unwrap()
        })
        .collect()
}

/// Drops axioms a restricted condition may not contain.
pub fn restrict(phi: &TuringFunctional, mode: &Mode) -> TuringFunctional {
    // removing a node can shift the inputs of the nodes above it, so rebuild
    let mut marks: BTreeMap<BinaryString, u8> = phi.iter().map(|a| (a.sigma.clone(), a.y)).collect();
    loop {
        let f = functional_from_marks(&marks);
        let bad = f.iter().find(|a| !mode.admits(a)).map(|a| a.sigma.clone());
        match bad {
            None => return f,
            Some(rho) => {
                marks.remove(&rho);
            }
        }
    }
}

pub fn random_condition(rng: &mut impl Rng, mode: &Mode) -> Condition {
    let phi = restrict(&random_functional(rng, 4, 3), mode);
    let reals: BTreeSet<Real> =
        (0..rng.gen_range(0..=2)).map(|_| random_real(rng, 3, 2)).filter(|r| mode.admits_real(r)).collect();
    Condition::new(phi, reals)
}

/// A random extension of `p`: new marks deeper than every old use, off the
/// frozen reals, plus possibly new reals.
pub fn random_extension(rng: &mut impl Rng, p: &Condition, mode: &Mode) -> Condition {
    let min = p.phi.max_use().map_or(0, |l| l + 1);
    let mut marks: BTreeMap<BinaryString, u8> = p.phi.iter().map(|a| (a.sigma.clone(), a.y)).collect();
    for _ in 0..rng.gen_range(0..=2) {
        let len = rng.gen_range(min..=min + 2);
        let rho = BinaryString::from_bits((0..len).map(|_| rng.gen_bool(0.5)).collect());
        if !p.reals.iter().any(|r| r.has_prefix(&rho)) && !marks.contains_key(&rho) {
            marks.insert(rho, rng.gen_range(0..=1));
        }
    }
    let mut phi = functional_from_marks(&marks);
    // new marks never sit below old ones, so old inputs are unchanged;
    // restricted mode may still reject a new axiom
    if phi.iter().any(|a| !mode.admits(a)) {
        phi = p.phi.clone();
    }
    let mut reals = p.reals.clone();
    if rng.gen_bool(0.3) {
        let r = random_real(rng, 3, 2);
        if mode.admits_real(&r) {
            reals.insert(r);
        }
    }
    Condition::new(phi, reals)
}

fn random_pattern(rng: &mut impl Rng) -> GenericPattern {
    match rng.gen_range(0..3) {
        // membership of a small axiom
        0 => {
            let a = Axiom::new(rng.gen_range(0..=2), rng.gen_range(0..=1), random_string(rng, 3)).unwrap();
            GenericPattern::member(&a).unwrap()
        }
        // a short fully specified prefix of the generic
        1 => {
            let len = rng.gen_range(0..=12);
            GenericPattern::new((0..len).map(|_| Some(rng.gen_bool(0.15))).collect())
        }
        // a few scattered constraints
        _ => {
            let len = rng.gen_range(1..=40);
            GenericPattern::new(
                (0..len)
                    .map(|_| match rng.gen_range(0..6) {
                        0 => Some(true),
                        1 => Some(false),
                        _ => None,
                    })
                    .collect(),
            )
        }
    }
}

pub fn random_literal(rng: &mut impl Rng) -> Literal {
    let atom = match rng.gen_range(0..10) {
        0 => Atom::NumEq(rng.gen_range(0..3), rng.gen_range(0..3)),
        1 => Atom::PrefixOfS { sigma: random_string(rng, 3), param: "S".into() },
        2 => Atom::Halt { e: 0, x: rng.gen_range(0..3), s: rng.gen_range(0..6), y: 1, sigma: random_string(rng, 3) },
        _ => Atom::Generic(random_pattern(rng)),
    };
    Literal { positive: rng.gen_bool(0.5), atom }
}

/// CNF with at most `max_literals` literals in at most three clauses.
pub fn random_qf(rng: &mut impl Rng, max_literals: usize) -> ForcingQf {
    let total = rng.gen_range(1..=max_literals);
    let clauses = rng.gen_range(1..=total.min(3));
    let mut out = vec![Vec::new(); clauses];
    for i in 0..total {
        let c = if i < clauses { i } else { rng.gen_range(0..clauses) };
        out[c].push(random_literal(rng));
    }
    ForcingQf::new(out)
}

/// Environment for random sentences: `S = 1(01)^ω`, and program 0 outputs
/// oracle bit `x` when it is set (so `halt(0, x, s, 1, σ)` needs `σ(x) = 1`).
pub fn test_env() -> Env {
    let machine: ToyMachine = "read r1 r0\njz r1 no\nset r2 1\nout r2\nno: jmp no".parse().unwrap();
    let mut env = Env::with_machine(machine);
    env.params.insert("S".into(), real("1:01"));
    env
}

/// All reals `prefix·period^ω` with `|prefix| <= 3` and `1 <= |period| <= 2`.
pub fn small_reals() -> Vec<Real> {
    let periods: Vec<BinaryString> = BinaryString::all_up_to(2).into_iter().filter(|p| !p.is_empty()).collect();
    let set: BTreeSet<Real> = BinaryString::all_up_to(3)
        .iter()
        .flat_map(|pre| periods.iter().map(move |per| Real::new(pre.clone(), per.clone()).unwrap()))
        .collect();
    set.into_iter().collect()
}

/// Brute-force search for a set of at most two small reals that, with
/// `phi0`, forces `psi`.
pub fn exhaustive_witness(
    phi0: &TuringFunctional,
    psi: &ForcingQf,
    mode: &Mode,
    env: &Env,
    reals: &[Real],
) -> Option<BTreeSet<Real>> {
    let allowed: Vec<&Real> = reals.iter().filter(|r| mode.admits_real(r)).collect();
    let forces = |xs: BTreeSet<Real>| -> Option<BTreeSet<Real>> {
        let c = Condition::new(phi0.clone(), xs.iter().cloned());
        sigma2::ksf::forces_qf(&c, psi, mode, env).unwrap().then_some(xs)
    };
    if let Some(w) = forces(BTreeSet::new()) {
        return Some(w);
    }
    for (i, a) in allowed.iter().enumerate() {
        if let Some(w) = forces(BTreeSet::from([(*a).clone()])) {
            return Some(w);
        }
        for b in &allowed[i + 1..] {
            if let Some(w) = forces(BTreeSet::from([(*a).clone(), (*b).clone()])) {
                return Some(w);
            }
        }
    }
    None
}

/// Every valid functional extending `phi` whose new axioms have uses of
/// length in `min..=max_len`, by trying all markings of that band.
pub fn all_extensions(phi: &TuringFunctional, max_len: usize) -> Vec<TuringFunctional> {
    let min = phi.max_use().map_or(0, |l| l + 1);
    let band: Vec<BinaryString> = (min..=max_len).flat_map(BinaryString::all_of_length).collect();
    let base: BTreeMap<BinaryString, u8> = phi.iter().map(|a| (a.sigma.clone(), a.y)).collect();
    let mut out = Vec::new();
    let total = 3usize.pow(band.len() as u32);
    for mut code in 0..total {
        let mut marks = base.clone();
        for rho in &band {
            match code % 3 {
                0 => {}
                y => {
                    marks.insert(rho.clone(), (y - 1) as u8);
                }
            }
            code /= 3;
        }
        let f = functional_from_marks(&marks);
        assert!(f.validate().is_ok());
        out.push(f);
    }
    out
}

/// `P` or a restricted mode with random short `A` and `B`.
pub fn random_mode(rng: &mut impl Rng) -> Mode {
    if rng.gen_bool(0.5) {
        Mode::P
    } else {
        Mode::Q { a: random_real(rng, 2, 2), b: random_real(rng, 2, 2) }
    }
}
