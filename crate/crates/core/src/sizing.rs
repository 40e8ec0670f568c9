//! Analytic witness-size models for the three schemes.
//!
//! - verkle: `2 K B + C * 48 + 200`, one key and one value per proven key,
//!   `C` intermediate commitments and one multiproof;
//! - snark-merkle: `S K (192 + 2 B)`, one proof plus key and value per
//!   branch, with `S = 2` when both pre- and post-state are proven;
//! - naive-merkle: `K B (k - 1) ceil(log_k N)`, see
//!   [`crate::merkle::naive_witness_size`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::merkle::naive_witness_size;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "verkle")]
    Verkle,
    #[serde(rename = "merkle-naive")]
    NaiveMerkle,
    #[serde(rename = "merkle-snark")]
    SnarkMerkle,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Verkle, Scheme::NaiveMerkle, Scheme::SnarkMerkle];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Verkle => "verkle",
            Scheme::NaiveMerkle => "merkle-naive",
            Scheme::SnarkMerkle => "merkle-snark",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown scheme {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeModel {
    pub scheme: Scheme,
    /// Proven keys per block.
    pub keys: u64,
    pub leaf_bytes: u64,
    pub commitment_bytes: u64,
    pub multiproof_bytes: u64,
    pub proof_bytes: u64,
    /// Intermediate commitments (verkle).
    pub commitments: u64,
    /// Tree arity (naive-merkle).
    pub arity: u64,
    /// Leaves in the tree (naive-merkle).
    pub leaf_count: u64,
    /// Count pre- and post-state branches (snark-merkle).
    pub pre_post: bool,
}

impl SizeModel {
    fn base(scheme: Scheme, keys: u64) -> Self {
        SizeModel {
            scheme,
            keys,
            leaf_bytes: 32,
            commitment_bytes: 48,
            multiproof_bytes: 200,
            proof_bytes: 192,
            commitments: 0,
            arity: 2,
            leaf_count: 1,
            pre_post: true,
        }
    }

    pub fn verkle(keys: u64, commitments: u64) -> Self {
        SizeModel { commitments, ..Self::base(Scheme::Verkle, keys) }
    }

    pub fn snark_merkle(keys: u64) -> Self {
        Self::base(Scheme::SnarkMerkle, keys)
    }

    pub fn naive_merkle(keys: u64, arity: u64, leaf_count: u64) -> Self {
        SizeModel { arity, leaf_count, ..Self::base(Scheme::NaiveMerkle, keys) }
    }

    pub fn with_pre_post(mut self, on: bool) -> Self {
        self.pre_post = on;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeEstimate {
    pub total: u64,
    pub components: Vec<(String, u64)>,
}

fn positive(name: &str, v: u64) -> Result<u64> {
    if v == 0 {
        return Err(Error::InvalidParameter(format!("{name} must be positive")));
    }
    Ok(v)
}

fn mul(values: &[u64]) -> Result<u64> {
    values
        .iter()
        .try_fold(1u64, |acc, v| acc.checked_mul(*v))
        .ok_or_else(|| Error::InvalidParameter("size estimate overflows u64".into()))
}

pub fn estimate(model: &SizeModel) -> Result<SizeEstimate> {
    let components: Vec<(&str, u64)> = match model.scheme {
        Scheme::Verkle => vec![
            ("leaves", mul(&[2, model.keys, positive("leaf_bytes", model.leaf_bytes)?])?),
            ("commitments", mul(&[model.commitments, positive("commitment_bytes", model.commitment_bytes)?])?),
            ("multiproof", positive("multiproof_bytes", model.multiproof_bytes)?),
        ],
        Scheme::SnarkMerkle => {
            let branches = mul(&[model.keys, if model.pre_post { 2 } else { 1 }])?;
            vec![
                ("proofs", mul(&[branches, positive("proof_bytes", model.proof_bytes)?])?),
                ("leaves", mul(&[branches, 2, positive("leaf_bytes", model.leaf_bytes)?])?),
            ]
        }
        Scheme::NaiveMerkle => vec![(
            "siblings",
            naive_witness_size(model.keys, positive("leaf_bytes", model.leaf_bytes)?, model.arity, model.leaf_count)?,
        )],
    };
    let total = components
        .iter()
        .try_fold(0u64, |acc, (_, v)| acc.checked_add(*v))
        .ok_or_else(|| Error::InvalidParameter("size estimate overflows u64".into()))?;
    Ok(SizeEstimate { total, components: components.into_iter().map(|(k, v)| (k.to_string(), v)).collect() })
}
