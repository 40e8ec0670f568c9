//! Prime-field, group and polynomial arithmetic.
//!
//! The scalar field is the order of the Pallas curve group, a 255-bit prime
//! `q` with `2^32 | q - 1`, so the 256-point evaluation domain used by the
//! vector commitment is a multiplicative subgroup. Field and curve
//! arithmetic come from `pasta_curves`; everything built on top of them
//! (multi-scalar multiplication, barycentric evaluation, quotients, the
//! Fiat-Shamir transcript) lives here.

mod domain;
mod field;
mod group;
mod msm;
mod polynomial;
mod transcript;

pub use domain::EvaluationDomain;
pub use field::{batch_invert, FieldElement, FIELD_ELEMENT_BYTES};
pub use group::{GroupElement, GROUP_ELEMENT_BYTES};
pub use msm::msm;
pub use polynomial::{lagrange_eval, Polynomial};
pub use transcript::Transcript;

pub(crate) use group::{batch_to_bytes, hash_to_curve_points};
pub(crate) use msm::{msm_affine, msm_projective, FixedBaseTable};

/// Hashes `msg` under `domain` to a uniformly distributed field element.
///
/// `SHA-512(le64(|domain|) || domain || msg)` read as a 512-bit
/// little-endian integer and reduced mod q.
pub fn hash_to_field(domain: &[u8], msg: &[u8]) -> FieldElement {
    use sha2::{Digest, Sha512};
    let mut h = Sha512::new();
    h.update((domain.len() as u64).to_le_bytes());
    h.update(domain);
    h.update(msg);
    let out: [u8; 64] = h.finalize().into();
    FieldElement::from_uniform_bytes(&out)
}
