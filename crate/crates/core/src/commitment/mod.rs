//! Pedersen vector commitments over a 256-point evaluation domain, with
//! inner-product-argument openings and an aggregated multi-point proof.
//!
//! A vector `v` is committed as `sum v_i * G_i`, where the bases `G_i` and
//! the auxiliary point `Q` are hash-to-curve outputs derived from a public
//! seed. `v_i` is read as the evaluation at `w^i` of a polynomial of degree
//! below the domain size, so an opening at a domain point reveals one slot
//! of the vector.

mod ipa;
mod multiproof;

use std::fmt;
use std::sync::OnceLock;

use pasta_curves::pallas;

use crate::algebra::{
    hash_to_curve_points, EvaluationDomain, FieldElement, FixedBaseTable, GroupElement, Polynomial,
    GROUP_ELEMENT_BYTES,
};
use crate::{Error, Result};

pub use ipa::{open, verify_open, OpeningProof};
pub use multiproof::{multiprove, verify_multiproof, MultiProof, ProverOpening, VerifierOpening};
pub(crate) use multiproof::{multiprove_with, verify_claims, OpeningClaim};

/// Width of a Verkle node and of the default commitment key.
pub const DOMAIN_SIZE: usize = 256;

/// Seed of the default commitment key.
pub const DEFAULT_SEED: &[u8] = b"stateless-witness/pedersen/v1";

pub struct CommitmentKey {
    seed: Vec<u8>,
    domain: EvaluationDomain,
    bases: Vec<pallas::Affine>,
    q: pallas::Affine,
    table: OnceLock<FixedBaseTable>,
}

impl CommitmentKey {
    /// Derives `size` bases and `Q` from `seed`. Regenerating from the same
    /// seed yields bit-identical points.
    pub fn new(seed: &[u8], size: usize) -> Result<Self> {
        let domain = EvaluationDomain::new(size)?;
        let label = format!("stateless-witness-pedersen-{}", hex(seed));
        let mut points = hash_to_curve_points(&label, 0, size + 1);
        let q = points.pop().expect("size + 1 points");
        Ok(CommitmentKey { seed: seed.to_vec(), domain, bases: points, q, table: OnceLock::new() })
    }

    /// Process-wide key for [`DEFAULT_SEED`] and [`DOMAIN_SIZE`].
    pub fn shared() -> &'static CommitmentKey {
        static KEY: OnceLock<CommitmentKey> = OnceLock::new();
        KEY.get_or_init(|| CommitmentKey::new(DEFAULT_SEED, DOMAIN_SIZE).expect("valid default key"))
    }

    pub fn seed(&self) -> &[u8] {
        &self.seed
    }

    pub fn size(&self) -> usize {
        self.bases.len()
    }

    pub fn domain(&self) -> &EvaluationDomain {
        &self.domain
    }

    pub fn bases(&self) -> Vec<GroupElement> {
        self.bases.iter().map(|b| GroupElement((*b).into())).collect()
    }

    pub fn q(&self) -> GroupElement {
        GroupElement(self.q.into())
    }

    pub(crate) fn affine_bases(&self) -> &[pallas::Affine] {
        &self.bases
    }

    pub(crate) fn affine_q(&self) -> pallas::Affine {
        self.q
    }

    fn table(&self) -> &FixedBaseTable {
        self.table.get_or_init(|| FixedBaseTable::new(&self.bases))
    }

    /// `sum evaluations[i] * G_i`.
    pub fn commit(&self, poly: &Polynomial) -> Result<Commitment> {
        if poly.len() != self.size() {
            return Err(Error::LengthMismatch { expected: self.size(), actual: poly.len() });
        }
        Ok(Commitment::from_point(self.commit_raw(poly.evaluations())))
    }

    pub(crate) fn commit_raw(&self, evals: &[FieldElement]) -> GroupElement {
        self.commit_sparse(evals.iter().enumerate().map(|(i, v)| (i, v)))
    }

    /// Commitment to the vector that is zero outside the listed slots.
    pub(crate) fn commit_sparse<'a>(&self, slots: impl IntoIterator<Item = (usize, &'a FieldElement)>) -> GroupElement {
        let table = self.table();
        debug_assert_eq!(table.len(), self.size());
        GroupElement(table.msm_sparse(slots.into_iter().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (i, &v.0))))
    }
}

impl fmt::Debug for CommitmentKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CommitmentKey")
            .field("seed", &String::from_utf8_lossy(&self.seed))
            .field("size", &self.size())
            .finish()
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// A 48-byte vector commitment. The encoding is cached alongside the point.
#[derive(Clone, Copy)]
pub struct Commitment {
    point: GroupElement,
    bytes: [u8; GROUP_ELEMENT_BYTES],
}

impl Commitment {
    pub const BYTES: usize = GROUP_ELEMENT_BYTES;

    pub fn from_point(point: GroupElement) -> Self {
        Commitment { point, bytes: point.to_bytes() }
    }

    pub fn identity() -> Self {
        Commitment::from_point(GroupElement::identity())
    }

    pub fn point(&self) -> GroupElement {
        self.point
    }

    pub fn to_bytes(&self) -> [u8; GROUP_ELEMENT_BYTES] {
        self.bytes
    }

    pub fn as_bytes(&self) -> &[u8; GROUP_ELEMENT_BYTES] {
        &self.bytes
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let point = GroupElement::from_bytes(bytes)?;
        let mut b = [0u8; GROUP_ELEMENT_BYTES];
        b.copy_from_slice(bytes);
        Ok(Commitment { point, bytes: b })
    }
}

impl PartialEq for Commitment {
    fn eq(&self, other: &Self) -> bool {
        self.bytes == other.bytes
    }
}

impl Eq for Commitment {}

impl std::hash::Hash for Commitment {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.bytes.hash(state)
    }
}

impl fmt::Debug for Commitment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Commitment({})", hex(&self.bytes[..32]))
    }
}

impl std::ops::Add for Commitment {
    type Output = Commitment;
    fn add(self, rhs: Commitment) -> Commitment {
        Commitment::from_point(self.point + rhs.point)
    }
}
