//! Inner-product argument for `<a, b> = y`, where `a` is the committed
//! evaluation vector and `b` the public Lagrange coefficients of the
//! opening point.
//!
//! Each round splits `a`, `b`, `G` in halves, sends
//! `L = <a_lo, G_hi> + <a_lo, b_hi> Q'` and `R = <a_hi, G_lo> + <a_hi, b_lo> Q'`,
//! draws `x`, and folds `a' = a_lo + x a_hi`, `b' = b_lo + x^-1 b_hi`,
//! `G' = G_lo + x^-1 G_hi`, so that `C' = C + x^-1 L + x R`. The verifier
//! checks the final relation with one multi-scalar multiplication.

use group::Curve;
use pasta_curves::pallas;

use super::{Commitment, CommitmentKey};
use crate::algebra::{
    batch_invert, batch_to_bytes, msm_affine, FieldElement, GroupElement, Polynomial, Transcript,
    FIELD_ELEMENT_BYTES, GROUP_ELEMENT_BYTES,
};
use crate::{parallel, Error, Result};

/// `log2(n)` pairs of cross terms and the final folded scalar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpeningProof {
    pub(crate) left: Vec<GroupElement>,
    pub(crate) right: Vec<GroupElement>,
    pub(crate) final_scalar: FieldElement,
}

impl OpeningProof {
    pub fn rounds(&self) -> usize {
        self.left.len()
    }

    pub fn serialized_len(rounds: usize) -> usize {
        2 * rounds * GROUP_ELEMENT_BYTES + FIELD_ELEMENT_BYTES
    }

    /// `L_1 || R_1 || ... || L_k || R_k || a`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(Self::serialized_len(self.rounds()));
        self.write(&mut out);
        out
    }

    pub(crate) fn write(&self, out: &mut Vec<u8>) {
        let mut pts = Vec::with_capacity(2 * self.rounds());
        for (l, r) in self.left.iter().zip(&self.right) {
            pts.push(*l);
            pts.push(*r);
        }
        for b in batch_to_bytes(&pts) {
            out.extend_from_slice(&b);
        }
        out.extend_from_slice(&self.final_scalar.to_bytes());
    }

    pub fn from_bytes(bytes: &[u8], rounds: usize) -> Result<Self> {
        if bytes.len() != Self::serialized_len(rounds) {
            return Err(Error::LengthMismatch { expected: Self::serialized_len(rounds), actual: bytes.len() });
        }
        let mut left = Vec::with_capacity(rounds);
        let mut right = Vec::with_capacity(rounds);
        for i in 0..rounds {
            let at = 2 * i * GROUP_ELEMENT_BYTES;
            left.push(GroupElement::from_bytes(&bytes[at..at + GROUP_ELEMENT_BYTES])?);
            right.push(GroupElement::from_bytes(&bytes[at + GROUP_ELEMENT_BYTES..at + 2 * GROUP_ELEMENT_BYTES])?);
        }
        let final_scalar = FieldElement::from_bytes(&bytes[2 * rounds * GROUP_ELEMENT_BYTES..])?;
        Ok(OpeningProof { left, right, final_scalar })
    }
}

/// Proves the value of `poly` at `z`. The commitment to `poly` must already
/// have been absorbed into `transcript`.
pub fn open(
    key: &CommitmentKey,
    poly: &Polynomial,
    z: &FieldElement,
    transcript: &mut Transcript,
) -> Result<(FieldElement, OpeningProof)> {
    if poly.len() != key.size() {
        return Err(Error::LengthMismatch { expected: key.size(), actual: poly.len() });
    }
    let y = key.domain().evaluate(poly.evaluations(), z)?;
    let proof = prove(key, poly.evaluations().to_vec(), z, &y, transcript);
    Ok((y, proof))
}

/// Checks that `com` opens to `y` at `z`. `Err` means the proof is
/// malformed for this key; `Ok(false)` means it does not verify.
pub fn verify_open(
    key: &CommitmentKey,
    com: &Commitment,
    z: &FieldElement,
    y: &FieldElement,
    proof: &OpeningProof,
    transcript: &mut Transcript,
) -> Result<bool> {
    verify(key, com.point(), z, y, proof, transcript)
}

fn inner(a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

fn scalars(v: &[FieldElement]) -> Vec<pallas::Scalar> {
    v.iter().map(|x| x.0).collect()
}

pub(crate) fn prove(
    key: &CommitmentKey,
    mut a: Vec<FieldElement>,
    z: &FieldElement,
    y: &FieldElement,
    transcript: &mut Transcript,
) -> OpeningProof {
    let mut b = key.domain().lagrange_coefficients(z);
    transcript.append_field(b"ipa-z", z);
    transcript.append_field(b"ipa-y", y);
    let w = transcript.challenge(b"ipa-w");
    let q = GroupElement(key.affine_q().into()) * w;

    let mut g: Vec<pallas::Affine> = key.affine_bases().to_vec();
    let mut left = Vec::new();
    let mut right = Vec::new();
    while a.len() > 1 {
        let h = a.len() / 2;
        let (a_lo, a_hi) = a.split_at(h);
        let (b_lo, b_hi) = b.split_at(h);
        let (g_lo, g_hi) = g.split_at(h);
        let (l, r) = parallel::join(
            || GroupElement(msm_affine(&scalars(a_lo), g_hi)) + q * inner(a_lo, b_hi),
            || GroupElement(msm_affine(&scalars(a_hi), g_lo)) + q * inner(a_hi, b_lo),
        );
        let enc = batch_to_bytes(&[l, r]);
        transcript.append_point_bytes(b"ipa-L", &enc[0]);
        transcript.append_point_bytes(b"ipa-R", &enc[1]);
        let x = transcript.challenge(b"ipa-x");
        let x_inv = x.inverse().expect("challenge is non-zero");

        let a_next: Vec<_> = a_lo.iter().zip(a_hi).map(|(lo, hi)| *lo + x * *hi).collect();
        let b_next: Vec<_> = b_lo.iter().zip(b_hi).map(|(lo, hi)| *lo + x_inv * *hi).collect();
        let pairs: Vec<(pallas::Affine, pallas::Affine)> = g_lo.iter().copied().zip(g_hi.iter().copied()).collect();
        let folded = parallel::map(&pairs, |(lo, hi)| {
            pallas::Point::from(*lo) + (GroupElement((*hi).into()) * x_inv).0
        });
        let mut g_next = vec![pallas::Affine::default(); h];
        pallas::Point::batch_normalize(&folded, &mut g_next);

        left.push(l);
        right.push(r);
        a = a_next;
        b = b_next;
        g = g_next;
    }
    OpeningProof { left, right, final_scalar: a[0] }
}

/// Folding weights `s_i = prod_k x_k^-bit_k(i)`, round one on the top bit.
pub(crate) fn folding_weights(x_inv: &[FieldElement]) -> Vec<FieldElement> {
    let mut s = vec![FieldElement::ONE];
    for xi in x_inv {
        let mut next = Vec::with_capacity(s.len() * 2);
        for v in &s {
            next.push(*v);
            next.push(*v * *xi);
        }
        s = next;
    }
    s
}

pub(crate) fn verify(
    key: &CommitmentKey,
    com: GroupElement,
    z: &FieldElement,
    y: &FieldElement,
    proof: &OpeningProof,
    transcript: &mut Transcript,
) -> Result<bool> {
    let rounds = key.domain().log_size() as usize;
    if proof.left.len() != rounds || proof.right.len() != rounds {
        return Err(Error::malformed("opening proof", format!("expected {rounds} rounds, got {}", proof.rounds())));
    }
    transcript.append_field(b"ipa-z", z);
    transcript.append_field(b"ipa-y", y);
    let w = transcript.challenge(b"ipa-w");

    let mut xs = Vec::with_capacity(rounds);
    for (l, r) in proof.left.iter().zip(&proof.right) {
        transcript.append_point(b"ipa-L", l);
        transcript.append_point(b"ipa-R", r);
        xs.push(transcript.challenge(b"ipa-x"));
    }
    let mut x_inv = xs.clone();
    batch_invert(&mut x_inv)?;

    let s = folding_weights(&x_inv);
    let b = key.domain().lagrange_coefficients(z);
    let b_final = inner(&s, &b);
    let a = proof.final_scalar;

    // C + y w Q + sum(x^-1 L + x R) - a <s, G> - a b_final w Q == 0
    let mut sc: Vec<pallas::Scalar> = s.iter().map(|si| -(a * *si).0).collect();
    let mut extra: Vec<pallas::Point> = Vec::with_capacity(2 * rounds + 1);
    for k in 0..rounds {
        sc.push(x_inv[k].0);
        extra.push(proof.left[k].0);
        sc.push(xs[k].0);
        extra.push(proof.right[k].0);
    }
    sc.push(pallas::Scalar::from(1));
    extra.push(com.0);
    sc.push((w * (*y - a * b_final)).0);

    let mut extra_affine = vec![pallas::Affine::default(); extra.len()];
    pallas::Point::batch_normalize(&extra, &mut extra_affine);
    let mut bases = key.affine_bases().to_vec();
    bases.extend(extra_affine);
    bases.push(key.affine_q());
    Ok(GroupElement(msm_affine(&sc, &bases)).is_identity())
}
