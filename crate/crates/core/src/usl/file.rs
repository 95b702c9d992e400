//! JSON file format for a USL with an optional named valuation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Element, FiniteUsl, GeneratorValuation, UslError};

/// `{"size": n, "leq": [[...]], "join": [[...]], "valuation": {"x": i}}`;
/// `join` may be omitted, in which case it is derived from `leq`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UslFile {
    pub size: usize,
    pub leq: Vec<Vec<bool>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub join: Option<Vec<Vec<Element>>>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Element>,
}

impl UslFile {
    pub fn from_usl(u: &FiniteUsl, v: Option<&GeneratorValuation>) -> Self {
        UslFile {
            size: u.size(),
            leq: u.leq_matrix().to_vec(),
            join: Some(u.join_table().to_vec()),
            valuation: v.map(|v| v.entries().iter().cloned().collect()).unwrap_or_default(),
        }
    }

    /// Validates the tables and valuation targets. The valuation is
    /// returned in name order.
    pub fn to_usl(&self) -> Result<(FiniteUsl, GeneratorValuation), UslError> {
        if self.leq.len() != self.size {
            return Err(UslError::Shape(format!("size is {} but leq has {} rows", self.size, self.leq.len())));
        }
        let u = match &self.join {
            Some(join) => FiniteUsl::from_tables(self.leq.clone(), join.clone())?,
            None => FiniteUsl::from_leq(self.leq.clone())?,
        };
        let v = GeneratorValuation::new(self.valuation.iter().map(|(k, &t)| (k.clone(), t)).collect())?;
        v.check_targets(&u)?;
        Ok((u, v))
    }
}
