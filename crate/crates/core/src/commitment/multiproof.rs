//! Aggregation of many openings into one constant-size proof.
//!
//! For claims `f_i(z_i) = y_i` on commitments `C_i`, with `r` and `t` drawn
//! from the transcript:
//!
//! ```text
//! g(X) = sum r^i (f_i(X) - y_i) / (X - z_i)      D = [g]
//! h(X) = sum r^i f_i(X) / (t - z_i)              E = sum r^i / (t - z_i) C_i
//! (h - g)(t) = sum r^i y_i / (t - z_i)
//! ```
//!
//! The proof is `D` plus one IPA opening of `E - D` at `t`. Claims sharing a
//! point are summed before dividing, so the prover performs at most one
//! quotient per distinct point.

use std::collections::HashMap;

use super::ipa::{self, OpeningProof};
use super::{Commitment, CommitmentKey};
use crate::algebra::{
    batch_invert, msm_projective, FieldElement, GroupElement, Polynomial, Transcript, GROUP_ELEMENT_BYTES,
};
use crate::{parallel, Error, Result};

const TAG_EMPTY: u8 = 0;
const TAG_PROOF: u8 = 1;

/// An opening known to the prover: the committed polynomial and its value.
#[derive(Clone, Copy, Debug)]
pub struct ProverOpening<'a> {
    pub commitment: &'a Commitment,
    pub poly: &'a Polynomial,
    pub point: FieldElement,
    pub value: FieldElement,
}

/// An opening as seen by the verifier.
#[derive(Clone, Copy, Debug)]
pub struct VerifierOpening<'a> {
    pub commitment: &'a Commitment,
    pub point: FieldElement,
    pub value: FieldElement,
}

pub(crate) type OpeningClaim<'a> = VerifierOpening<'a>;

/// Aggregated opening proof. Its encoding has the same length for any
/// non-zero number of openings; zero openings use a one-byte sentinel.
///
/// Layout: `0x00` for the empty proof, otherwise
/// `0x01 || rounds (u8) || D (48) || L_1 || R_1 || ... || L_k || R_k || a (32)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiProof {
    inner: Option<(Commitment, OpeningProof)>,
}

impl MultiProof {
    pub fn empty() -> Self {
        MultiProof { inner: None }
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_none()
    }

    /// Encoded length of a non-empty proof over a `2^rounds` domain.
    pub fn proof_len(rounds: usize) -> usize {
        2 + GROUP_ELEMENT_BYTES + OpeningProof::serialized_len(rounds)
    }

    pub fn serialized_len(&self) -> usize {
        match &self.inner {
            None => 1,
            Some((_, p)) => Self::proof_len(p.rounds()),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.serialized_len());
        self.write(&mut out);
        out
    }

    pub(crate) fn write(&self, out: &mut Vec<u8>) {
        match &self.inner {
            None => out.push(TAG_EMPTY),
            Some((d, p)) => {
                out.push(TAG_PROOF);
                out.push(p.rounds() as u8);
                out.extend_from_slice(d.as_bytes());
                p.write(out);
            }
        }
    }

    /// Decodes a proof from the front of `bytes`, returning it with the
    /// number of bytes consumed.
    pub(crate) fn decode_prefix(bytes: &[u8]) -> Result<(Self, usize)> {
        let len = match bytes.first() {
            Some(&TAG_EMPTY) => 1,
            Some(&TAG_PROOF) if bytes.len() >= 2 => Self::proof_len(bytes[1] as usize),
            _ => return Err(Error::InvalidEncoding("unknown multiproof tag or truncated proof")),
        };
        if bytes.len() < len {
            return Err(Error::LengthMismatch { expected: len, actual: bytes.len() });
        }
        Ok((Self::from_bytes(&bytes[..len])?, len))
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        match bytes.first() {
            Some(&TAG_EMPTY) if bytes.len() == 1 => Ok(MultiProof::empty()),
            Some(&TAG_PROOF) if bytes.len() >= 2 => {
                let rounds = bytes[1] as usize;
                if bytes.len() != Self::proof_len(rounds) {
                    return Err(Error::LengthMismatch { expected: Self::proof_len(rounds), actual: bytes.len() });
                }
                let d = Commitment::from_bytes(&bytes[2..2 + GROUP_ELEMENT_BYTES])?;
                let p = OpeningProof::from_bytes(&bytes[2 + GROUP_ELEMENT_BYTES..], rounds)?;
                Ok(MultiProof { inner: Some((d, p)) })
            }
            _ => Err(Error::InvalidEncoding("unknown multiproof tag or truncated proof")),
        }
    }
}

/// Proves every opening with one aggregated argument. The openings (their
/// commitments, points and values) are absorbed into `transcript` here.
pub fn multiprove(key: &CommitmentKey, openings: &[ProverOpening<'_>], transcript: &mut Transcript) -> Result<MultiProof> {
    for o in openings {
        if o.poly.len() != key.size() {
            return Err(Error::LengthMismatch { expected: key.size(), actual: o.poly.len() });
        }
    }
    let claims: Vec<OpeningClaim<'_>> = openings
        .iter()
        .map(|o| OpeningClaim { commitment: o.commitment, point: o.point, value: o.value })
        .collect();
    multiprove_with(
        key,
        &claims,
        |i, coeff, acc| {
            for (a, v) in acc.iter_mut().zip(openings[i].poly.evaluations()) {
                *a += coeff * *v;
            }
        },
        transcript,
    )
}

/// Generic prover: `accumulate(i, c, acc)` must add `c * f_i` to `acc`.
pub(crate) fn multiprove_with<F>(
    key: &CommitmentKey,
    claims: &[OpeningClaim<'_>],
    accumulate: F,
    transcript: &mut Transcript,
) -> Result<MultiProof>
where
    F: Fn(usize, FieldElement, &mut [FieldElement]) + Sync,
{
    if claims.is_empty() {
        return Ok(MultiProof::empty());
    }
    let n = key.size();
    let domain = key.domain();
    absorb_claims(claims, transcript);
    let r = transcript.challenge(b"mp-r");
    let powers = powers_of(r, claims.len());

    let groups = group_by_point(claims);
    let accumulated: Vec<(Vec<FieldElement>, FieldElement)> = parallel::map(&groups.members, |members| {
        let mut acc = vec![FieldElement::ZERO; n];
        let mut acc_y = FieldElement::ZERO;
        for &i in members {
            accumulate(i, powers[i], &mut acc);
            acc_y += powers[i] * claims[i].value;
        }
        (acc, acc_y)
    });

    let quotients: Vec<Vec<FieldElement>> = parallel::map_range(groups.points.len(), |g| {
        let (acc, acc_y) = &accumulated[g];
        domain.quotient(acc, &groups.points[g], acc_y).expect("domain-sized vectors")
    });
    let mut g_poly = vec![FieldElement::ZERO; n];
    for q in &quotients {
        for (a, v) in g_poly.iter_mut().zip(q) {
            *a += *v;
        }
    }
    let d = Commitment::from_point(key.commit_raw(&g_poly));
    transcript.append_point_bytes(b"mp-D", d.as_bytes());
    let t = transcript.challenge(b"mp-t");

    let mut inv: Vec<FieldElement> = groups.points.iter().map(|z| t - *z).collect();
    batch_invert(&mut inv)?;
    let mut h_poly = vec![FieldElement::ZERO; n];
    let mut y_agg = FieldElement::ZERO;
    for ((acc, acc_y), c) in accumulated.iter().zip(&inv) {
        for (a, v) in h_poly.iter_mut().zip(acc) {
            *a += *c * *v;
        }
        y_agg += *c * *acc_y;
    }
    let e = key.commit_raw(&h_poly);
    let combined = Commitment::from_point(e - d.point());
    transcript.append_point_bytes(b"mp-C", combined.as_bytes());

    let diff: Vec<FieldElement> = h_poly.iter().zip(&g_poly).map(|(h, g)| *h - *g).collect();
    let opening = ipa::prove(key, diff, &t, &y_agg, transcript);
    Ok(MultiProof { inner: Some((d, opening)) })
}

/// Verifies an aggregated proof for `coms[i]` opening to `points[i] = (z_i, y_i)`.
pub fn verify_multiproof(
    key: &CommitmentKey,
    coms: &[Commitment],
    points: &[(FieldElement, FieldElement)],
    proof: &MultiProof,
    transcript: &mut Transcript,
) -> Result<bool> {
    if coms.len() != points.len() {
        return Err(Error::LengthMismatch { expected: coms.len(), actual: points.len() });
    }
    let claims: Vec<OpeningClaim<'_>> = coms
        .iter()
        .zip(points)
        .map(|(c, (z, y))| OpeningClaim { commitment: c, point: *z, value: *y })
        .collect();
    verify_claims(key, &claims, proof, transcript)
}

pub(crate) fn verify_claims(
    key: &CommitmentKey,
    claims: &[OpeningClaim<'_>],
    proof: &MultiProof,
    transcript: &mut Transcript,
) -> Result<bool> {
    let (d, opening) = match (&proof.inner, claims.is_empty()) {
        (None, true) => return Ok(true),
        (None, false) | (Some(_), true) => return Ok(false),
        (Some(inner), false) => inner,
    };
    absorb_claims(claims, transcript);
    let r = transcript.challenge(b"mp-r");
    transcript.append_point_bytes(b"mp-D", d.as_bytes());
    let t = transcript.challenge(b"mp-t");

    let groups = group_by_point(claims);
    let mut inv: Vec<FieldElement> = groups.points.iter().map(|z| t - *z).collect();
    if batch_invert(&mut inv).is_err() {
        return Ok(false);
    }

    let powers = powers_of(r, claims.len());
    let mut y_agg = FieldElement::ZERO;
    let mut index: HashMap<[u8; GROUP_ELEMENT_BYTES], usize> = HashMap::new();
    let mut scalars = Vec::new();
    let mut points = Vec::new();
    for (g, members) in groups.members.iter().enumerate() {
        for &i in members {
            let c = powers[i] * inv[g];
            y_agg += c * claims[i].value;
            let com = claims[i].commitment;
            let slot = *index.entry(*com.as_bytes()).or_insert_with(|| {
                scalars.push(FieldElement::ZERO);
                points.push(com.point().0);
                points.len() - 1
            });
            scalars[slot] += c;
        }
    }
    let raw: Vec<_> = scalars.iter().map(|s| s.0).collect();
    let e = GroupElement(msm_projective(&raw, &points));
    let combined = Commitment::from_point(e - d.point());
    transcript.append_point_bytes(b"mp-C", combined.as_bytes());
    ipa::verify(key, combined.point(), &t, &y_agg, opening, transcript)
}

fn absorb_claims(claims: &[OpeningClaim<'_>], transcript: &mut Transcript) {
    transcript.append_u64(b"mp-count", claims.len() as u64);
    for c in claims {
        transcript.append_point_bytes(b"mp-C_i", c.commitment.as_bytes());
        transcript.append_field(b"mp-z_i", &c.point);
        transcript.append_field(b"mp-y_i", &c.value);
    }
}

fn powers_of(r: FieldElement, n: usize) -> Vec<FieldElement> {
    let mut out = Vec::with_capacity(n);
    let mut acc = FieldElement::ONE;
    for _ in 0..n {
        out.push(acc);
        acc *= r;
    }
    out
}

struct PointGroups {
    points: Vec<FieldElement>,
    members: Vec<Vec<usize>>,
}

fn group_by_point(claims: &[OpeningClaim<'_>]) -> PointGroups {
    let mut index: HashMap<[u8; 32], usize> = HashMap::new();
    let mut groups = PointGroups { points: Vec::new(), members: Vec::new() };
    for (i, c) in claims.iter().enumerate() {
        let g = *index.entry(c.point.to_bytes()).or_insert_with(|| {
            groups.points.push(c.point);
            groups.members.push(Vec::new());
            groups.points.len() - 1
        });
        groups.members[g].push(i);
    }
    groups
}
