//! A desk-scale model of forcing with Turing functionals: finite use-monotone
//! functionals, conditions with eventually periodic reals, the
//! quantifier-free forcing relation, split search and bounded trees of
//! essential string vectors.

pub mod codec;
mod condition;
mod essential;
mod forcing;
mod functional;
mod language;
mod machine;
mod real;
mod split;
mod string;
pub mod verify;

pub use codec::CodecError;
pub use condition::{extends, membership_q, Condition, Mode};
pub use essential::{
    essential_up_to, path_reals, tree_frontier, ConjunctFamily, EssentialityVerdict, Instance, Refutation,
    StringVector, Target,
};
pub use forcing::{decide_qf_forcing, forces_qf, generic_oracle, BitStatus, GenericOracle};
pub use functional::{Axiom, FunctionalViolation, Oracle, TuringFunctional};
pub use language::{Atom, ForcingQf, GenericPattern, Literal};
pub use machine::{Env, Evaluator, ToyMachine};
pub use real::Real;
pub use split::{find_split, local_computation, Bounds, Split};
pub use string::{bits, BadBits, BinaryString};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KsfError {
    #[error("axiom output {0} is not a bit")]
    BadOutput(u64),
    #[error("a real needs a nonempty period")]
    EmptyPeriod,
    #[error("not a real (expected prefix:period): {0:?}")]
    BadReal(String),
    #[error("the same real is listed twice")]
    DuplicateReal,
    #[error("condition is not in the restricted forcing for the given A and B")]
    NotInMode,
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("invalid functional: {0}")]
    InvalidFunctional(#[from] FunctionalViolation),
    #[error("unknown parameter real {0:?}")]
    UnknownParam(String),
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("program error: {0}")]
    Program(String),
    #[error("string vector components must have equal lengths")]
    UnequalLengths,
    #[error("not a chain: {0}")]
    NotAChain(String),
    #[error("malformed target: {0}")]
    MalformedTarget(String),
}
