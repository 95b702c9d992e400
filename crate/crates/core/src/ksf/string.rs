use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A finite binary string. Orders lexicographically, prefixes first.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryString(Vec<bool>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a binary string: {0:?}")]
pub struct BadBits(pub String);

impl BinaryString {
    pub fn empty() -> Self {
        BinaryString(Vec::new())
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BinaryString(bits)
    }

    /// `bit` repeated `n` times.
    pub fn repeat(bit: bool, n: usize) -> Self {
        BinaryString(vec![bit; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.0.get(i).copied()
    }

    pub fn is_prefix_of(&self, other: &BinaryString) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn is_strict_prefix_of(&self, other: &BinaryString) -> bool {
        self.len() < other.len() && self.is_prefix_of(other)
    }

    pub fn compatible(&self, other: &BinaryString) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    pub fn child(&self, bit: bool) -> BinaryString {
        let mut bits = self.0.clone();
        bits.push(bit);
        BinaryString(bits)
    }

    pub fn prefix(&self, len: usize) -> BinaryString {
        BinaryString(self.0[..len.min(self.len())].to_vec())
    }

    /// Every string of length `len`, in lexicographic order.
    pub fn all_of_length(len: usize) -> Vec<BinaryString> {
        (0u64..1 << len).map(|v| BinaryString((0..len).map(|i| v >> (len - 1 - i) & 1 == 1).collect())).collect()
    }

    /// Every string of length at most `len`, shortest first.
    pub fn all_up_to(len: usize) -> Vec<BinaryString> {
        (0..=len).flat_map(BinaryString::all_of_length).collect()
    }
}

impl FromStr for BinaryString {
    type Err = BadBits;
    fn from_str(s: &str) -> Result<Self, BadBits> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(BadBits(s.to_string())),
            })
            .collect::<Result<_, _>>()
            .map(BinaryString)
    }
}

impl fmt::Display for BinaryString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl Serialize for BinaryString {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BinaryString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand for string literals in code and tests; panics on bad input.
pub fn bits(s: &str) -> BinaryString {
    s.parse().expect("binary string literal")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefixes_and_compatibility() {
        assert!(bits("").is_prefix_of(&bits("01")));
        assert!(bits("01").is_strict_prefix_of(&bits("011")));
        assert!(!bits("01").is_strict_prefix_of(&bits("01")));
        assert!(bits("011").compatible(&bits("01")));
        assert!(!bits("00").compatible(&bits("01")));
    }

    #[test]
    fn enumeration_and_parsing() {
        assert_eq!(BinaryString::all_of_length(2), vec![bits("00"), bits("01"), bits("10"), bits("11")]);
        assert_eq!(BinaryString::all_up_to(2).len(), 7);
        assert!("012".parse::<BinaryString>().is_err());
        assert_eq!(serde_json::to_string(&bits("101")).unwrap(), "\"101\"");
    }
}
