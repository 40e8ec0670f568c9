use std::collections::HashMap;

use super::field::{batch_invert, FieldElement};
use crate::{Error, Result};

/// Multiplicative subgroup `{w^0, ..., w^(n-1)}` of the scalar field, with
/// the data needed for barycentric evaluation and in-domain quotients.
///
/// With `A(X) = X^n - 1` the vanishing polynomial, `A'(w^i) = n / w^i`, so
/// the barycentric weight `1 / A'(w^i)` is `w^i / n`.
#[derive(Clone, Debug)]
pub struct EvaluationDomain {
    points: Vec<FieldElement>,
    inv_points: Vec<FieldElement>,
    size_inv: FieldElement,
    /// `1 / (w^k - 1)` for `k != 0`; entry 0 is unused.
    inv_diff_one: Vec<FieldElement>,
    index: HashMap<[u8; 32], usize>,
}

impl EvaluationDomain {
    /// Domain of size `n`, which must be a power of two no larger than 2^32.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("domain size {n} is not a power of two")));
        }
        let omega = FieldElement::root_of_unity(n.trailing_zeros())?;
        let mut points = Vec::with_capacity(n);
        let mut x = FieldElement::ONE;
        for _ in 0..n {
            points.push(x);
            x *= omega;
        }
        let mut inv_points = points.clone();
        batch_invert(&mut inv_points)?;
        let size_inv = FieldElement::from_u64(n as u64).inverse()?;
        let mut inv_diff_one: Vec<FieldElement> = points.iter().skip(1).map(|p| *p - FieldElement::ONE).collect();
        batch_invert(&mut inv_diff_one)?;
        inv_diff_one.insert(0, FieldElement::ZERO);
        let index = points.iter().enumerate().map(|(i, p)| (p.to_bytes(), i)).collect();
        Ok(EvaluationDomain { points, inv_points, size_inv, inv_diff_one, index })
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn log_size(&self) -> u32 {
        self.points.len().trailing_zeros()
    }

    pub fn point(&self, i: usize) -> FieldElement {
        self.points[i]
    }

    pub fn points(&self) -> &[FieldElement] {
        &self.points
    }

    /// Position of `z` in the domain, if it is a domain point.
    pub fn index_of(&self, z: &FieldElement) -> Option<usize> {
        self.index.get(&z.to_bytes()).copied()
    }

    /// `A(z) = z^n - 1`.
    pub fn vanishing(&self, z: &FieldElement) -> FieldElement {
        z.pow(self.size() as u64) - FieldElement::ONE
    }

    /// Lagrange basis values `L_i(z)` for every `i`.
    pub fn lagrange_coefficients(&self, z: &FieldElement) -> Vec<FieldElement> {
        let n = self.size();
        if let Some(m) = self.index_of(z) {
            let mut out = vec![FieldElement::ZERO; n];
            out[m] = FieldElement::ONE;
            return out;
        }
        let mut denoms: Vec<FieldElement> = self.points.iter().map(|x| *z - *x).collect();
        batch_invert(&mut denoms).expect("z is outside the domain");
        let scale = self.vanishing(z) * self.size_inv;
        denoms
            .iter()
            .zip(&self.points)
            .map(|(d, x)| scale * *x * *d)
            .collect()
    }

    /// Evaluates the interpolant of `evals` at `z` (barycentric form).
    pub fn evaluate(&self, evals: &[FieldElement], z: &FieldElement) -> Result<FieldElement> {
        if evals.len() != self.size() {
            return Err(Error::LengthMismatch { expected: self.size(), actual: evals.len() });
        }
        if let Some(m) = self.index_of(z) {
            return Ok(evals[m]);
        }
        let coeffs = self.lagrange_coefficients(z);
        Ok(evals.iter().zip(&coeffs).map(|(f, l)| *f * *l).sum())
    }

    /// Evaluations over the domain of `(f(X) - y) / (X - z)`.
    ///
    /// For `z = w^m` the quotient at `w^m` is the derivative
    /// `q_m = -(1 / w^m) * sum_{j != m} w^j q_j`, obtained from
    /// `sum_j L_j'(w^m) = 0` and `A'(w^m) / A'(w^j) = w^j / w^m`.
    pub fn quotient(&self, evals: &[FieldElement], z: &FieldElement, y: &FieldElement) -> Result<Vec<FieldElement>> {
        let n = self.size();
        if evals.len() != n {
            return Err(Error::LengthMismatch { expected: n, actual: evals.len() });
        }
        match self.index_of(z) {
            Some(m) => Ok(self.quotient_in_domain(evals, m, y)),
            None => {
                let mut denoms: Vec<FieldElement> = self.points.iter().map(|x| *x - *z).collect();
                batch_invert(&mut denoms)?;
                Ok(evals.iter().zip(&denoms).map(|(f, d)| (*f - *y) * *d).collect())
            }
        }
    }

    pub(crate) fn quotient_in_domain(&self, evals: &[FieldElement], m: usize, y: &FieldElement) -> Vec<FieldElement> {
        let n = self.size();
        let mut q = vec![FieldElement::ZERO; n];
        let mut acc = FieldElement::ZERO;
        for j in (0..n).filter(|&j| j != m) {
            // 1 / (w^j - w^m) = w^-m / (w^(j-m) - 1)
            let qj = (evals[j] - *y) * self.inv_points[m] * self.inv_diff_one[(j + n - m) % n];
            q[j] = qj;
            acc += self.points[j] * qj;
        }
        q[m] = -(acc * self.inv_points[m]);
        q
    }
}
