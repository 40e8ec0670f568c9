use std::ops::{Add, Sub};

use super::domain::EvaluationDomain;
use super::field::FieldElement;
use crate::{Error, Result};

/// Polynomial of degree `< n` held by its values on an n-point domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    evaluations: Vec<FieldElement>,
}

impl Polynomial {
    pub fn from_evaluations(domain: &EvaluationDomain, evaluations: Vec<FieldElement>) -> Result<Self> {
        if evaluations.len() != domain.size() {
            return Err(Error::LengthMismatch { expected: domain.size(), actual: evaluations.len() });
        }
        Ok(Polynomial { evaluations })
    }

    pub fn zero(domain: &EvaluationDomain) -> Self {
        Polynomial { evaluations: vec![FieldElement::ZERO; domain.size()] }
    }

    /// Evaluates coefficient form (lowest degree first) over the domain.
    pub fn from_coefficients(domain: &EvaluationDomain, coeffs: &[FieldElement]) -> Result<Self> {
        if coeffs.len() > domain.size() {
            return Err(Error::InvalidParameter(format!(
                "degree {} does not fit a domain of size {}",
                coeffs.len() - 1,
                domain.size()
            )));
        }
        let evaluations = domain
            .points()
            .iter()
            .map(|x| coeffs.iter().rev().fold(FieldElement::ZERO, |acc, c| acc * *x + *c))
            .collect();
        Ok(Polynomial { evaluations })
    }

    /// Inverse DFT: `c_k = (1/n) sum_i f_i w^(-ik)`.
    pub fn to_coefficients(&self, domain: &EvaluationDomain) -> Result<Vec<FieldElement>> {
        let n = domain.size();
        if self.evaluations.len() != n {
            return Err(Error::LengthMismatch { expected: n, actual: self.evaluations.len() });
        }
        let n_inv = FieldElement::from_u64(n as u64).inverse()?;
        Ok((0..n)
            .map(|k| {
                let sum: FieldElement = self
                    .evaluations
                    .iter()
                    .enumerate()
                    .map(|(i, f)| *f * domain.point((n - (i * k) % n) % n))
                    .sum();
                sum * n_inv
            })
            .collect())
    }

    pub fn evaluations(&self) -> &[FieldElement] {
        &self.evaluations
    }

    pub fn into_evaluations(self) -> Vec<FieldElement> {
        self.evaluations
    }

    pub fn len(&self) -> usize {
        self.evaluations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.evaluations.is_empty()
    }

    pub fn scale(&self, factor: FieldElement) -> Self {
        Polynomial { evaluations: self.evaluations.iter().map(|v| *v * factor).collect() }
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.len(), rhs.len(), "polynomials over different domains");
        Polynomial {
            evaluations: self.evaluations.iter().zip(&rhs.evaluations).map(|(a, b)| *a + *b).collect(),
        }
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.len(), rhs.len(), "polynomials over different domains");
        Polynomial {
            evaluations: self.evaluations.iter().zip(&rhs.evaluations).map(|(a, b)| *a - *b).collect(),
        }
    }
}

/// Value at `z` of the polynomial interpolating `poly` over `domain`.
pub fn lagrange_eval(domain: &EvaluationDomain, poly: &Polynomial, z: &FieldElement) -> Result<FieldElement> {
    domain.evaluate(poly.evaluations(), z)
}
