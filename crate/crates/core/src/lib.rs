//! Deciding the two-quantifier theory of the degree structures as upper
//! semilattices, plus a small executable model of forcing with Turing functionals.

pub mod decider;
pub mod formula;
pub mod ksf;
pub mod usl;
