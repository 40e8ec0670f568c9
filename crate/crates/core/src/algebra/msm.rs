use ff::PrimeField;
use group::{Curve, Group};
use pasta_curves::pallas;

use super::field::{FieldElement, Scalar};
use super::group::{straus, GroupElement};
use crate::{parallel, Error, Result};

const STRAUS_THRESHOLD: usize = 16;

/// Multi-scalar multiplication `sum scalars[i] * bases[i]`.
pub fn msm(scalars: &[FieldElement], bases: &[GroupElement]) -> Result<GroupElement> {
    if scalars.len() != bases.len() {
        return Err(Error::LengthMismatch { expected: bases.len(), actual: scalars.len() });
    }
    let s: Vec<Scalar> = scalars.iter().map(|x| x.0).collect();
    let p: Vec<pallas::Point> = bases.iter().map(|x| x.0).collect();
    Ok(GroupElement(msm_projective(&s, &p)))
}

pub(crate) fn msm_projective(scalars: &[Scalar], points: &[pallas::Point]) -> pallas::Point {
    debug_assert_eq!(scalars.len(), points.len());
    if points.len() < STRAUS_THRESHOLD {
        return straus(scalars, points);
    }
    let mut affine = vec![pallas::Affine::default(); points.len()];
    pallas::Point::batch_normalize(points, &mut affine);
    msm_affine(scalars, &affine)
}

/// Signed-digit bucket method over affine bases.
pub(crate) fn msm_affine(scalars: &[Scalar], bases: &[pallas::Affine]) -> pallas::Point {
    debug_assert_eq!(scalars.len(), bases.len());
    let n = scalars.len();
    if n == 0 {
        return pallas::Point::identity();
    }
    if n < STRAUS_THRESHOLD {
        let proj: Vec<pallas::Point> = bases.iter().map(|b| (*b).into()).collect();
        return straus(scalars, &proj);
    }
    let c = window_bits(n);
    let windows = 256usize.div_ceil(c) + 1;
    let digits: Vec<Vec<i32>> = parallel::map(scalars, |s| signed_digits(&s.to_repr(), c, windows));

    let sums = parallel::map_range(windows, |w| {
        let mut buckets = vec![pallas::Point::identity(); 1 << (c - 1)];
        for (d, base) in digits.iter().zip(bases) {
            match d[w] {
                0 => {}
                v if v > 0 => buckets[v as usize - 1] += base,
                v => buckets[(-v) as usize - 1] -= base,
            }
        }
        let mut running = pallas::Point::identity();
        let mut acc = pallas::Point::identity();
        for b in buckets.iter().rev() {
            running += b;
            acc += running;
        }
        acc
    });

    let mut result = pallas::Point::identity();
    for s in sums.iter().rev() {
        for _ in 0..c {
            result = result.double();
        }
        result += s;
    }
    result
}

fn window_bits(n: usize) -> usize {
    let log = usize::BITS - n.leading_zeros();
    ((log as usize * 69) / 100 + 2).clamp(3, 16)
}

/// Base-`2^c` digits in `[-2^(c-1), 2^(c-1))` of a little-endian integer.
fn signed_digits(repr: &[u8; 32], c: usize, windows: usize) -> Vec<i32> {
    let mut out = Vec::with_capacity(windows);
    let mut carry = 0i64;
    let half = 1i64 << (c - 1);
    let full = 1i64 << c;
    for w in 0..windows {
        let raw = extract_bits(repr, w * c, c) as i64 + carry;
        if raw >= half {
            out.push((raw - full) as i32);
            carry = 1;
        } else {
            out.push(raw as i32);
            carry = 0;
        }
    }
    debug_assert_eq!(carry, 0);
    out
}

fn extract_bits(repr: &[u8; 32], start: usize, len: usize) -> u64 {
    let mut v = 0u64;
    for i in 0..len {
        let bit = start + i;
        if bit >= 256 {
            break;
        }
        v |= (((repr[bit / 8] >> (bit % 8)) & 1) as u64) << i;
    }
    v
}

const FIXED_WINDOW: usize = 8;
const FIXED_WINDOWS: usize = 256 / FIXED_WINDOW + 1;
const FIXED_ENTRIES: usize = 1 << (FIXED_WINDOW - 1);

/// Precomputed multiples `k * 2^(8j) * B` for a fixed list of bases, so that
/// a scalar multiplication of a base costs at most 33 mixed additions.
pub(crate) struct FixedBaseTable {
    points: Vec<pallas::Affine>,
    bases: usize,
}

impl FixedBaseTable {
    pub(crate) fn new(bases: &[pallas::Affine]) -> Self {
        let per_base = FIXED_WINDOWS * FIXED_ENTRIES;
        let mut points = vec![pallas::Affine::default(); bases.len() * per_base];
        parallel::for_each_chunk_mut(&mut points, per_base, |offset, chunk| {
            let base = bases[offset / per_base];
            let mut proj = Vec::with_capacity(per_base);
            let mut cur: pallas::Point = base.into();
            for _ in 0..FIXED_WINDOWS {
                let mut e = cur;
                proj.push(e);
                for _ in 1..FIXED_ENTRIES {
                    e += cur;
                    proj.push(e);
                }
                cur = e.double();
            }
            pallas::Point::batch_normalize(&proj, chunk);
        });
        FixedBaseTable { points, bases: bases.len() }
    }

    pub(crate) fn len(&self) -> usize {
        self.bases
    }

    /// `sum scalar * B[index]` over the given terms.
    pub(crate) fn msm_sparse<'a>(&self, terms: impl IntoIterator<Item = (usize, &'a Scalar)>) -> pallas::Point {
        let mut acc = pallas::Point::identity();
        for (index, s) in terms {
            assert!(index < self.bases, "fixed-base index out of range");
            let digits = signed_digits(&s.to_repr(), FIXED_WINDOW, FIXED_WINDOWS);
            let row = &self.points[index * FIXED_WINDOWS * FIXED_ENTRIES..];
            for (j, d) in digits.into_iter().enumerate() {
                match d {
                    0 => {}
                    v if v > 0 => acc += row[j * FIXED_ENTRIES + v as usize - 1],
                    v => acc -= row[j * FIXED_ENTRIES + (-v) as usize - 1],
                }
            }
        }
        acc
    }
}
