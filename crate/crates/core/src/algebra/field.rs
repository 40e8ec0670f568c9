use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use ff::{Field, FromUniformBytes, PrimeField};
use pasta_curves::pallas;
use rand::RngCore;

use crate::{Error, Result};

pub(crate) type Scalar = pallas::Scalar;

pub const FIELD_ELEMENT_BYTES: usize = 32;

/// Element of the scalar field of the Pallas group, always in canonical form.
#[derive(Clone, Copy, PartialEq, Eq, Default)]
pub struct FieldElement(pub(crate) Scalar);

impl FieldElement {
    pub const ZERO: Self = FieldElement(Scalar::ZERO);
    pub const ONE: Self = FieldElement(Scalar::ONE);

    pub fn from_u64(v: u64) -> Self {
        FieldElement(Scalar::from(v))
    }

    /// Decodes a 32-byte little-endian canonical encoding.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let repr: [u8; 32] = bytes
            .try_into()
            .map_err(|_| Error::LengthMismatch { expected: 32, actual: bytes.len() })?;
        Option::from(Scalar::from_repr(repr))
            .map(FieldElement)
            .ok_or(Error::InvalidEncoding("non-canonical field element"))
    }

    pub fn to_bytes(&self) -> [u8; 32] {
        self.0.to_repr()
    }

    /// Reduces a 512-bit little-endian integer mod q.
    pub fn from_uniform_bytes(bytes: &[u8; 64]) -> Self {
        FieldElement(Scalar::from_uniform_bytes(bytes))
    }

    pub fn random(rng: &mut impl RngCore) -> Self {
        FieldElement(Scalar::random(rng))
    }

    pub fn is_zero(&self) -> bool {
        bool::from(self.0.is_zero())
    }

    pub fn inverse(&self) -> Result<Self> {
        Option::from(self.0.invert()).map(FieldElement).ok_or(Error::ZeroInversion)
    }

    pub fn square(&self) -> Self {
        FieldElement(self.0.square())
    }

    pub fn pow(&self, exp: u64) -> Self {
        FieldElement(self.0.pow_vartime([exp]))
    }

    /// A primitive `2^k`-th root of unity, `k <= 32`.
    pub fn root_of_unity(log_order: u32) -> Result<Self> {
        if log_order > Scalar::S {
            return Err(Error::InvalidParameter(format!(
                "field has no root of unity of order 2^{log_order}"
            )));
        }
        let mut w = Scalar::ROOT_OF_UNITY;
        for _ in log_order..Scalar::S {
            w = w.square();
        }
        Ok(FieldElement(w))
    }
}

/// Inverts every element in place with one field inversion.
pub fn batch_invert(values: &mut [FieldElement]) -> Result<()> {
    let mut prefix = Vec::with_capacity(values.len());
    let mut acc = Scalar::ONE;
    for v in values.iter() {
        if v.is_zero() {
            return Err(Error::ZeroInversion);
        }
        prefix.push(acc);
        acc *= v.0;
    }
    let mut inv = Option::<Scalar>::from(acc.invert()).ok_or(Error::ZeroInversion)?;
    for (v, p) in values.iter_mut().zip(prefix).rev() {
        let next = inv * v.0;
        v.0 = inv * p;
        inv = next;
    }
    Ok(())
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bytes = self.to_bytes();
        write!(f, "0x")?;
        for b in bytes.iter().rev() {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.to_bytes().hash(state)
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let (a, b) = (self.to_bytes(), other.to_bytes());
        a.iter().rev().cmp(b.iter().rev())
    }
}

impl From<u64> for FieldElement {
    fn from(v: u64) -> Self {
        FieldElement::from_u64(v)
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $atr:ident, $af:ident, $op:tt) => {
        impl $tr for FieldElement {
            type Output = FieldElement;
            fn $f(self, rhs: FieldElement) -> FieldElement {
                FieldElement(self.0 $op rhs.0)
            }
        }
        impl<'a> $tr<&'a FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $f(self, rhs: &'a FieldElement) -> FieldElement {
                FieldElement(self.0 $op rhs.0)
            }
        }
        impl $atr for FieldElement {
            fn $af(&mut self, rhs: FieldElement) {
                self.0 = self.0 $op rhs.0;
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign, +);
binop!(Sub, sub, SubAssign, sub_assign, -);
binop!(Mul, mul, MulAssign, mul_assign, *);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement(-self.0)
    }
}

impl Sum for FieldElement {
    fn sum<I: Iterator<Item = FieldElement>>(iter: I) -> Self {
        iter.fold(FieldElement::ZERO, |a, b| a + b)
    }
}

impl<'a> Sum<&'a FieldElement> for FieldElement {
    fn sum<I: Iterator<Item = &'a FieldElement>>(iter: I) -> Self {
        iter.fold(FieldElement::ZERO, |a, b| a + b)
    }
}

impl Product for FieldElement {
    fn product<I: Iterator<Item = FieldElement>>(iter: I) -> Self {
        iter.fold(FieldElement::ONE, |a, b| a * b)
    }
}
