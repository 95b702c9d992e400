//! Bijective numbering of axioms.
//!
//! `strcode(σ)` is the binary value of `1σ`, minus one, so strings are
//! numbered shortest first and then lexicographically. With the Cantor
//! pairing `⟨a, b⟩ = (a+b)(a+b+1)/2 + b`,
//!
//! ```text
//! code⟨x, y, σ⟩ = ⟨⟨x, y⟩, strcode(σ)⟩ + 1
//! ```
//!
//! Every positive natural decodes to a triple; it is an axiom code exactly
//! when the middle component is 0 or 1. For example `code⟨0,1,"1"⟩ = 13`
//! and 16 is the smallest number that is not an axiom code.

use thiserror::Error;

use super::{Axiom, BinaryString};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("{n} is not an axiom code (its output component is {y})")]
    NotAnAxiom { n: u64, y: u64 },
    #[error("0 is not a code")]
    Zero,
    #[error("code does not fit in 64 bits")]
    Overflow,
}

pub fn strcode(s: &BinaryString) -> Result<u64, CodecError> {
    if s.len() >= 64 {
        return Err(CodecError::Overflow);
    }
    let value = s.bits().iter().fold(0u64, |acc, &b| acc << 1 | b as u64);
    Ok((1u64 << s.len()) - 1 + value)
}

pub fn strdecode(c: u64) -> BinaryString {
    let v = c + 1;
    let len = 63 - v.leading_zeros() as usize;
    BinaryString::from_bits((0..len).rev().map(|i| v >> i & 1 == 1).collect())
}

pub fn cantor(a: u64, b: u64) -> Result<u64, CodecError> {
    let s = a.checked_add(b).ok_or(CodecError::Overflow)?;
    let t = (s as u128) * (s as u128 + 1) / 2 + b as u128;
    u64::try_from(t).map_err(|_| CodecError::Overflow)
}

pub fn uncantor(z: u64) -> (u64, u64) {
    // w = largest integer with w(w+1)/2 <= z
    let mut w = (((8 * z as u128 + 1).isqrt() - 1) / 2) as u64;
    while (w as u128) * (w as u128 + 1) / 2 > z as u128 {
        w -= 1;
    }
    let b = z - (w as u128 * (w as u128 + 1) / 2) as u64;
    (w - b, b)
}

pub fn encode(a: &Axiom) -> Result<u64, CodecError> {
    let inner = cantor(cantor(a.x, a.y as u64)?, strcode(&a.sigma)?)?;
    inner.checked_add(1).ok_or(CodecError::Overflow)
}

pub fn decode(n: u64) -> Result<Axiom, CodecError> {
    if n == 0 {
        return Err(CodecError::Zero);
    }
    let (pair, s) = uncantor(n - 1);
    let (x, y) = uncantor(pair);
    if y > 1 {
        return Err(CodecError::NotAnAxiom { n, y });
    }
    Ok(Axiom { x, y: y as u8, sigma: strdecode(s) })
}
