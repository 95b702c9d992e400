use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{BinaryString, KsfError};

/// The eventually periodic sequence `prefix · period^ω`.
///
/// Stored in a normal form (primitive period, shortest prefix), so equal
/// sequences compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawReal")]
pub struct Real {
    prefix: BinaryString,
    period: BinaryString,
}

#[derive(Deserialize)]
struct RawReal {
    prefix: BinaryString,
    period: BinaryString,
}

impl TryFrom<RawReal> for Real {
    type Error = KsfError;
    fn try_from(r: RawReal) -> Result<Self, KsfError> {
        Real::new(r.prefix, r.period)
    }
}

impl Real {
    pub fn new(prefix: BinaryString, period: BinaryString) -> Result<Real, KsfError> {
        if period.is_empty() {
            return Err(KsfError::EmptyPeriod);
        }
        let mut period = period.bits().to_vec();
        let n = period.len();
        if let Some(p) = (1..n).find(|&p| n.is_multiple_of(p) && (p..n).all(|i| period[i] == period[i - p])) {
            period.truncate(p);
        }
        let mut prefix = prefix.bits().to_vec();
        while prefix.last() == period.last() && !prefix.is_empty() {
            prefix.pop();
            period.rotate_right(1);
        }
        Ok(Real { prefix: BinaryString::from_bits(prefix), period: BinaryString::from_bits(period) })
    }

    /// `τ · bit^ω`.
    pub fn extending(tau: &BinaryString, bit: bool) -> Real {
        Real::new(tau.clone(), BinaryString::repeat(bit, 1)).expect("nonempty period")
    }

    pub fn prefix(&self) -> &BinaryString {
        &self.prefix
    }

    pub fn period(&self) -> &BinaryString {
        &self.period
    }

    pub fn bit(&self, n: u64) -> bool {
        let p = self.prefix.len() as u64;
        if n < p {
            self.prefix.bits()[n as usize]
        } else {
            self.period.bits()[((n - p) % self.period.len() as u64) as usize]
        }
    }

    pub fn initial(&self, len: usize) -> BinaryString {
        BinaryString::from_bits((0..len as u64).map(|i| self.bit(i)).collect())
    }

    pub fn has_prefix(&self, sigma: &BinaryString) -> bool {
        sigma.bits().iter().enumerate().all(|(i, &b)| self.bit(i as u64) == b)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.prefix, self.period)
    }
}

/// `prefix:period`, e.g. `01:1` for `011111...`.
impl FromStr for Real {
    type Err = KsfError;
    fn from_str(s: &str) -> Result<Self, KsfError> {
        let (pre, per) = s.split_once(':').ok_or_else(|| KsfError::BadReal(s.to_string()))?;
        let parse = |t: &str| t.parse::<BinaryString>().map_err(|_| KsfError::BadReal(s.to_string()));
        Real::new(parse(pre)?, parse(per)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ksf::bits;

    fn real(s: &str) -> Real {
        s.parse().unwrap()
    }

    #[test]
    fn normal_form_identifies_equal_sequences() {
        assert_eq!(real("1:1"), real(":1"));
        assert_eq!(real(":0101"), real(":01"));
        assert_eq!(real("0:10"), real(":01"));
        assert_eq!(real("11:011"), real("1:101"));
        assert_ne!(real(":01"), real(":10"));
        assert_eq!(real("0110:0").prefix(), &bits("011"));
    }

    #[test]
    fn bits_and_prefixes() {
        let r = real("01:10");
        assert_eq!(r.initial(7), bits("0110101"));
        assert!(r.has_prefix(&bits("01101")));
        assert!(!r.has_prefix(&bits("011011")));
        assert!(Real::new(bits("0"), bits("")).is_err());
        assert!("01".parse::<Real>().is_err());
    }

    #[test]
    fn normalization_preserves_the_sequence() {
        for pre in BinaryString::all_up_to(3) {
            for per in BinaryString::all_up_to(3).into_iter().filter(|p| !p.is_empty()) {
                let r = Real::new(pre.clone(), per.clone()).unwrap();
                let naive: Vec<bool> = (0..20)
                    .map(|i| if i < pre.len() { pre.bits()[i] } else { per.bits()[(i - pre.len()) % per.len()] })
                    .collect();
                assert_eq!(r.initial(20).bits(), &naive[..]);
            }
        }
    }
}
