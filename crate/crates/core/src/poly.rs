use std::fmt;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;

/// Univariate polynomial, `coeffs[d]` being the coefficient of `x^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Polynomial<S> {
    pub fn new(coeffs: Vec<S>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyPolynomial);
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, d: usize) -> S {
        self.coeffs.get(d).cloned().unwrap_or_else(S::zero)
    }

    /// Highest index with a nonzero coefficient; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn has_nonnegative_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative_value())
    }

    /// The polynomial with every coefficient replaced by its absolute value.
    pub fn abs_coeffs(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| if c.is_negative_value() { -c.clone() } else { c.clone() }).collect() }
    }

    pub fn map<T: Scalar>(&self, f: impl FnMut(&S) -> T) -> Polynomial<T> {
        Polynomial { coeffs: self.coeffs.iter().map(f).collect() }
    }

    /// Horner evaluation at a scalar.
    pub fn eval(&self, x: &S) -> S {
        self.coeffs.iter().rev().fold(S::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    /// `Σ_d coeffs[d] · A^d` by Horner's scheme on matrices.
    pub fn eval_matrix(&self, a: &DenseMatrix<S>) -> DenseMatrix<S> {
        let top = self.coeffs.len() - 1;
        let mut acc = DenseMatrix::zeros(a.order()).expect("order is positive");
        acc.add_scaled_identity(&self.coeffs[top]);
        for c in self.coeffs[..top].iter().rev() {
            acc = acc.mul(a).expect("same order");
            acc.add_scaled_identity(c);
        }
        acc
    }

    /// Comma-separated coefficients, constant term first.
    pub fn parse(text: &str) -> Result<Self> {
        let coeffs = text
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(S::parse_literal)
            .collect::<Result<Vec<_>>>()?;
        Self::new(coeffs)
    }
}

pub fn poly_eval_matrix<S: Scalar>(p: &Polynomial<S>, a: &DenseMatrix<S>) -> DenseMatrix<S> {
    p.eval_matrix(a)
}

impl<S: Scalar> fmt::Display for Polynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(Scalar::canonical).collect();
        f.write_str(&parts.join(","))
    }
}

impl<S: Scalar> Serialize for Polynomial<S> {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        let parts: Vec<String> = self.coeffs.iter().map(Scalar::canonical).collect();
        parts.serialize(s)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for Polynomial<S> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let parts = Vec::<String>::deserialize(d)?;
        let coeffs = parts
            .iter()
            .map(|x| S::parse_literal(x))
            .collect::<Result<Vec<_>>>()
            .map_err(de::Error::custom)?;
        Self::new(coeffs).map_err(de::Error::custom)
    }
}
