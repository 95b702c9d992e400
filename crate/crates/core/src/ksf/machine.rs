//! The universal predicate `{e}_s^σ(x)↓ = y`, behind a small trait, and a
//! toy register machine implementing it.
//!
//! Toy programs use registers `r0`..`r7`; `r0` holds the input and
//! everything else starts at 0. Each executed instruction costs one step.
//!
//! ```text
//! set r n      r := n
//! mov r q      r := q
//! add r q      r := r + q
//! inc r        r := r + 1
//! dec r        r := r - 1 (stops at 0)
//! read r q     r := oracle bit at position q (diverges if unavailable)
//! jz r label   jump if r = 0
//! jmp label
//! out r        halt with output r
//! ```
//!
//! Labels are written `name:`, `#` starts a comment, and running off the
//! end halts with output `r0`. Several programs in one text are separated
//! by lines consisting of `---`; the first is program 0.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::{BinaryString, KsfError, Real};

/// Deterministic step-bounded oracle computation. Reads of unavailable
/// oracle bits (`tape` returns `None`) make the run diverge at this bound.
pub trait Evaluator: Send + Sync {
    fn eval(&self, e: u64, x: u64, s: u64, tape: &dyn Fn(u64) -> Option<bool>) -> Option<u64>;

    /// Runs on a finite oracle string: positions past its end are unavailable.
    fn eval_on(&self, e: u64, x: u64, s: u64, oracle: &BinaryString) -> Option<u64> {
        self.eval(e, x, s, &|n| usize::try_from(n).ok().and_then(|n| oracle.get(n)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Instr {
    Set(usize, u64),
    Mov(usize, usize),
    Add(usize, usize),
    Inc(usize),
    Dec(usize),
    Read(usize, usize),
    Jz(usize, usize),
    Jmp(usize),
    Out(usize),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ToyMachine {
    programs: Vec<Vec<Instr>>,
    source: String,
}

const REGISTERS: usize = 8;

impl ToyMachine {
    pub fn program_count(&self) -> usize {
        self.programs.len()
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

fn parse_program(text: &str, first_line: usize) -> Result<Vec<Instr>, KsfError> {
    let err = |line: usize, msg: &str| KsfError::Program(format!("line {}: {msg}", line + 1));
    // first pass: labels
    let mut labels = HashMap::new();
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = first_line + i;
        let mut rest = raw.split('#').next().unwrap_or("").trim();
        while let Some((label, after)) = rest.split_once(':') {
            let label = label.trim();
            if label.is_empty() || !label.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(err(line_no, "bad label"));
            }
            if labels.insert(label.to_string(), lines.len()).is_some() {
                return Err(err(line_no, &format!("label {label} defined twice")));
            }
            rest = after.trim();
        }
        if !rest.is_empty() {
            lines.push((line_no, rest));
        }
    }
    let reg = |line: usize, t: &str| -> Result<usize, KsfError> {
        t.strip_prefix('r')
            .and_then(|n| n.parse::<usize>().ok())
            .filter(|&n| n < REGISTERS)
            .ok_or_else(|| err(line, &format!("expected a register r0..r7, got {t:?}")))
    };
    let target = |line: usize, t: &str| -> Result<usize, KsfError> {
        labels.get(t).copied().ok_or_else(|| err(line, &format!("unknown label {t:?}")))
    };
    lines
        .into_iter()
        .map(|(line, text)| {
            let words: Vec<&str> = text.split_whitespace().collect();
            let arity = |n: usize| {
                if words.len() == n + 1 {
                    Ok(())
                } else {
                    Err(err(line, &format!("{} takes {n} operands", words[0])))
                }
            };
            Ok(match words[0] {
                "set" => {
                    arity(2)?;
                    let n = words[2].parse().map_err(|_| err(line, "expected a number"))?;
                    Instr::Set(reg(line, words[1])?, n)
                }
                "mov" => {
                    arity(2)?;
                    Instr::Mov(reg(line, words[1])?, reg(line, words[2])?)
                }
                "add" => {
                    arity(2)?;
                    Instr::Add(reg(line, words[1])?, reg(line, words[2])?)
                }
                "read" => {
                    arity(2)?;
                    Instr::Read(reg(line, words[1])?, reg(line, words[2])?)
                }
                "jz" => {
                    arity(2)?;
                    Instr::Jz(reg(line, words[1])?, target(line, words[2])?)
                }
                "inc" => {
                    arity(1)?;
                    Instr::Inc(reg(line, words[1])?)
                }
                "dec" => {
                    arity(1)?;
                    Instr::Dec(reg(line, words[1])?)
                }
                "out" => {
                    arity(1)?;
                    Instr::Out(reg(line, words[1])?)
                }
                "jmp" => {
                    arity(1)?;
                    Instr::Jmp(target(line, words[1])?)
                }
                other => return Err(err(line, &format!("unknown instruction {other:?}"))),
            })
        })
        .collect()
}

impl FromStr for ToyMachine {
    type Err = KsfError;
    fn from_str(text: &str) -> Result<Self, KsfError> {
        let mut programs = Vec::new();
        let mut chunk = String::new();
        let mut start = 0;
        for (i, line) in text.lines().enumerate() {
            if line.trim() == "---" {
                programs.push(parse_program(&chunk, start)?);
                chunk.clear();
                start = i + 1;
            } else {
                chunk.push_str(line);
                chunk.push('\n');
            }
        }
        programs.push(parse_program(&chunk, start)?);
        Ok(ToyMachine { programs, source: text.to_string() })
    }
}

impl Evaluator for ToyMachine {
    fn eval(&self, e: u64, x: u64, s: u64, tape: &dyn Fn(u64) -> Option<bool>) -> Option<u64> {
        let prog = self.programs.get(usize::try_from(e).ok()?)?;
        let mut r = [0u64; REGISTERS];
        r[0] = x;
        let mut pc = 0;
        for _ in 0..s {
            let Some(&instr) = prog.get(pc) else {
                return Some(r[0]);
            };
            pc += 1;
            match instr {
                Instr::Set(d, n) => r[d] = n,
                Instr::Mov(d, a) => r[d] = r[a],
                Instr::Add(d, a) => r[d] = r[d].saturating_add(r[a]),
                Instr::Inc(d) => r[d] = r[d].saturating_add(1),
                Instr::Dec(d) => r[d] = r[d].saturating_sub(1),
                Instr::Read(d, a) => r[d] = tape(r[a])? as u64,
                Instr::Jz(a, t) => {
                    if r[a] == 0 {
                        pc = t;
                    }
                }
                Instr::Jmp(t) => pc = t,
                Instr::Out(a) => return Some(r[a]),
            }
        }
        // out of steps; noticing the end of the program costs a step too
        None
    }
}

/// Parameter reals named in `pre(...)` atoms, and the machine behind
/// `halt(...)` atoms and split searches.
#[derive(Clone)]
pub struct Env {
    pub params: BTreeMap<String, Real>,
    pub evaluator: Arc<dyn Evaluator>,
}

impl Env {
    pub fn new(params: BTreeMap<String, Real>, evaluator: Arc<dyn Evaluator>) -> Self {
        Env { params, evaluator }
    }

    pub fn with_machine(machine: ToyMachine) -> Self {
        Env { params: BTreeMap::new(), evaluator: Arc::new(machine) }
    }

    pub fn param(&self, name: &str) -> Result<&Real, KsfError> {
        self.params.get(name).ok_or_else(|| KsfError::UnknownParam(name.to_string()))
    }
}

impl Default for Env {
    fn default() -> Self {
        Env::with_machine(ToyMachine::default())
    }
}

impl fmt::Debug for Env {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Env").field("params", &self.params).finish_non_exhaustive()
    }
}
