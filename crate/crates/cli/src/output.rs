use std::fmt::Write;

use serde::Serialize;
use serde_json::Value;
use sigma2::decider::Model;
use sigma2::ksf::Bounds;
use sigma2::usl::FiniteUsl;

pub const TRUE: u8 = 0;
pub const FALSE: u8 = 1;
pub const UNDECIDED: u8 = 2;
pub const ERROR: u8 = 3;
pub const USAGE: u8 = 64;

/// A finished command: the exit code and both renderings of its result.
pub struct Outcome {
    pub code: u8,
    pub human: String,
    pub json: Value,
}

impl Outcome {
    pub fn new(code: u8, human: String, json: impl Serialize) -> Outcome {
        Outcome { code, human, json: serde_json::to_value(json).expect("results serialize") }
    }
}

/// Misuse of the command line that clap cannot catch on its own.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Covering pairs of the order, e.g. `0<1 0<2 1<3 2<3`.
pub fn covers(u: &FiniteUsl) -> String {
    let mut out = Vec::new();
    for a in u.elements() {
        for b in u.elements() {
            if a != b && u.leq(a, b) && !u.elements().any(|c| c != a && c != b && u.leq(a, c) && u.leq(c, b)) {
                out.push(format!("{a}<{b}"));
            }
        }
    }
    if out.is_empty() {
        "-".into()
    } else {
        out.join(" ")
    }
}

/// `size 4; covers 0<1 0<2 1<3 2<3; x=1 y=2`
pub fn model_line(m: &Model) -> String {
    let vals: Vec<String> = m.valuation.entries().iter().map(|(n, e)| format!("{n}={e}")).collect();
    let mut s = format!("size {}; covers {}", m.usl.size(), covers(&m.usl));
    if !vals.is_empty() {
        write!(s, "; {}", vals.join(" ")).unwrap();
    }
    s
}

pub fn bounds_line(b: &Bounds) -> String {
    format!(
        "max_new_axioms={} max_use_len={} max_reals={} max_steps={} max_input={} oracle_len={} max_instances={}",
        b.max_new_axioms, b.max_use_len, b.max_reals, b.max_steps, b.max_input, b.oracle_len, b.max_instances
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use sigma2::usl::brute_force_usls;

    #[test]
    fn covers_of_small_lattices() {
        let mut lines: Vec<String> = brute_force_usls(3).iter().map(covers).collect();
        lines.sort();
        assert_eq!(lines, ["-", "0<1", "0<1 1<2"]);
    }
}
