use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use ff::PrimeField;
use group::{Curve, Group, GroupEncoding};
use pasta_curves::arithmetic::CurveExt;
use pasta_curves::pallas;

use super::field::{FieldElement, Scalar};
use crate::{parallel, Error, Result};

/// Serialized size of a group element.
///
/// The Pallas compressed encoding is 32 bytes; it is followed by 16 zero
/// bytes so that commitments occupy 48 bytes on the wire. Decoding rejects
/// any non-zero padding byte, which keeps the encoding canonical.
pub const GROUP_ELEMENT_BYTES: usize = 48;
const COMPRESSED_BYTES: usize = 32;

/// Point of the prime-order Pallas group.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct GroupElement(pub(crate) pallas::Point);

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement(pallas::Point::identity())
    }

    pub fn generator() -> Self {
        GroupElement(pallas::Point::generator())
    }

    pub fn is_identity(&self) -> bool {
        bool::from(self.0.is_identity())
    }

    pub fn double(&self) -> Self {
        GroupElement(self.0.double())
    }

    /// Nothing-up-my-sleeve point: hash-to-curve of `msg` under `domain`.
    pub fn hash_to_group(domain: &str, msg: &[u8]) -> Self {
        GroupElement(pallas::Point::hash_to_curve(domain)(msg))
    }

    pub fn to_bytes(&self) -> [u8; GROUP_ELEMENT_BYTES] {
        let mut out = [0u8; GROUP_ELEMENT_BYTES];
        out[..COMPRESSED_BYTES].copy_from_slice(&self.0.to_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != GROUP_ELEMENT_BYTES {
            return Err(Error::LengthMismatch { expected: GROUP_ELEMENT_BYTES, actual: bytes.len() });
        }
        if bytes[COMPRESSED_BYTES..].iter().any(|&b| b != 0) {
            return Err(Error::InvalidEncoding("non-zero group element padding"));
        }
        let mut repr = [0u8; COMPRESSED_BYTES];
        repr.copy_from_slice(&bytes[..COMPRESSED_BYTES]);
        Option::from(pallas::Point::from_bytes(&repr))
            .map(GroupElement)
            .ok_or(Error::InvalidEncoding("not a point on the curve"))
    }

    #[cfg(test)]
    pub(crate) fn to_affine(self) -> pallas::Affine {
        self.0.to_affine()
    }
}

/// Serializes many points with a single shared inversion.
pub(crate) fn batch_to_bytes(points: &[GroupElement]) -> Vec<[u8; GROUP_ELEMENT_BYTES]> {
    let proj: Vec<pallas::Point> = points.iter().map(|p| p.0).collect();
    let mut affine = vec![pallas::Affine::default(); proj.len()];
    pallas::Point::batch_normalize(&proj, &mut affine);
    affine
        .iter()
        .map(|a| {
            let mut out = [0u8; GROUP_ELEMENT_BYTES];
            out[..COMPRESSED_BYTES].copy_from_slice(&a.to_bytes());
            out
        })
        .collect()
}

/// `count` independent generators `H(domain, le32(offset + i))`.
pub(crate) fn hash_to_curve_points(domain: &str, offset: usize, count: usize) -> Vec<pallas::Affine> {
    let points = parallel::map_range(count, |i| {
        pallas::Point::hash_to_curve(domain)(&((offset + i) as u32).to_le_bytes())
    });
    let mut affine = vec![pallas::Affine::default(); count];
    pallas::Point::batch_normalize(&points, &mut affine);
    affine
}

/// Width-`w` non-adjacent form, least significant digit first.
pub(crate) fn wnaf_digits(scalar: &Scalar, w: u32) -> Vec<i8> {
    let repr = scalar.to_repr();
    let mut k = [0u64; 5];
    for (i, limb) in k.iter_mut().take(4).enumerate() {
        *limb = u64::from_le_bytes(repr[i * 8..i * 8 + 8].try_into().unwrap());
    }
    let width = 1i64 << w;
    let mut out = Vec::with_capacity(258);
    while k.iter().any(|&l| l != 0) {
        let mut d = 0i64;
        if k[0] & 1 == 1 {
            d = (k[0] & (width as u64 - 1)) as i64;
            if d >= width / 2 {
                d -= width;
            }
            if d >= 0 {
                sub_small(&mut k, d as u64);
            } else {
                add_small(&mut k, (-d) as u64);
            }
        }
        out.push(d as i8);
        for i in 0..5 {
            k[i] >>= 1;
            if i < 4 {
                k[i] |= k[i + 1] << 63;
            }
        }
    }
    out
}

fn sub_small(k: &mut [u64; 5], v: u64) {
    let (r, mut borrow) = k[0].overflowing_sub(v);
    k[0] = r;
    for limb in k.iter_mut().skip(1) {
        if !borrow {
            break;
        }
        let (r, b) = limb.overflowing_sub(1);
        *limb = r;
        borrow = b;
    }
}

fn add_small(k: &mut [u64; 5], v: u64) {
    let (r, mut carry) = k[0].overflowing_add(v);
    k[0] = r;
    for limb in k.iter_mut().skip(1) {
        if !carry {
            break;
        }
        let (r, c) = limb.overflowing_add(1);
        *limb = r;
        carry = c;
    }
}

const WNAF_WIDTH: u32 = 5;

/// Odd multiples `P, 3P, ..., (2^(w-1) - 1)P`.
pub(crate) fn odd_multiples(p: &pallas::Point) -> Vec<pallas::Point> {
    let n = 1usize << (WNAF_WIDTH - 2);
    let double = p.double();
    let mut table = Vec::with_capacity(n);
    table.push(*p);
    for i in 1..n {
        let next = table[i - 1] + double;
        table.push(next);
    }
    table
}

/// Variable-time interleaved wNAF evaluation of `sum k_i * P_i`.
pub(crate) fn straus(scalars: &[Scalar], points: &[pallas::Point]) -> pallas::Point {
    let digits: Vec<Vec<i8>> = scalars.iter().map(|s| wnaf_digits(s, WNAF_WIDTH)).collect();
    let tables: Vec<Vec<pallas::Point>> = points.iter().map(odd_multiples).collect();
    let len = digits.iter().map(Vec::len).max().unwrap_or(0);
    let mut acc = pallas::Point::identity();
    for i in (0..len).rev() {
        acc = acc.double();
        for (d, t) in digits.iter().zip(&tables) {
            match d.get(i).copied().unwrap_or(0) {
                0 => {}
                v if v > 0 => acc += t[(v as usize - 1) / 2],
                v => acc -= t[((-v) as usize - 1) / 2],
            }
        }
    }
    acc
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElement(")?;
        for b in &self.0.to_bytes() {
            write!(f, "{b:02x}")?;
        }
        write!(f, ")")
    }
}

impl Add for GroupElement {
    type Output = GroupElement;
    fn add(self, rhs: GroupElement) -> GroupElement {
        GroupElement(self.0 + rhs.0)
    }
}

impl AddAssign for GroupElement {
    fn add_assign(&mut self, rhs: GroupElement) {
        self.0 += rhs.0;
    }
}

impl Sub for GroupElement {
    type Output = GroupElement;
    fn sub(self, rhs: GroupElement) -> GroupElement {
        GroupElement(self.0 - rhs.0)
    }
}

impl SubAssign for GroupElement {
    fn sub_assign(&mut self, rhs: GroupElement) {
        self.0 -= rhs.0;
    }
}

impl Neg for GroupElement {
    type Output = GroupElement;
    fn neg(self) -> GroupElement {
        GroupElement(-self.0)
    }
}

impl Mul<FieldElement> for GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: FieldElement) -> GroupElement {
        GroupElement(straus(&[rhs.0], &[self.0]))
    }
}

impl Sum for GroupElement {
    fn sum<I: Iterator<Item = GroupElement>>(iter: I) -> Self {
        iter.fold(GroupElement::identity(), |a, b| a + b)
    }
}
