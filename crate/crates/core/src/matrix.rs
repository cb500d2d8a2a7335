//! Dense square matrices over a [`Scalar`].
//!
//! Storage is row-major and 0-based; everything that leaves this module
//! as a report (entry locations, CSV rows) is 1-based.

use std::fmt;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<S> {
    order: usize,
    entries: Vec<S>,
}

/// An entry value together with its 1-based location.
#[derive(Clone, Debug, PartialEq)]
pub struct EntryRef<S> {
    pub value: S,
    pub row: usize,
    pub col: usize,
}

impl<S: Scalar> DenseMatrix<S> {
    pub fn zeros(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::EmptyMatrix);
        }
        Ok(Self { order, entries: vec![S::zero(); order * order] })
    }

    pub fn identity(order: usize) -> Result<Self> {
        let mut m = Self::zeros(order)?;
        for i in 0..order {
            m.entries[i * order + i] = S::one();
        }
        Ok(m)
    }

    /// Builds a matrix from an entry function of 0-based `(row, col)`.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> S) -> Result<Self> {
        if order == 0 {
            return Err(Error::EmptyMatrix);
        }
        let entries = (0..order * order).map(|i| f(i / order, i % order)).collect();
        Ok(Self { order, entries })
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let order = rows.len();
        if order == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut entries = Vec::with_capacity(order * order);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != order {
                return Err(Error::NotSquare { row: i + 1, len: row.len(), order });
            }
            entries.extend(row);
        }
        Ok(Self { order, entries })
    }

    /// The cyclic shift `P` with `P[i][i+1 mod order] = 1`, so that
    /// `P^j` has its ones at `(i, i+j mod order)`.
    pub fn cyclic_shift(order: usize) -> Result<Self> {
        Self::from_fn(order, |i, j| if (i + 1) % order == j { S::one() } else { S::zero() })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// 0-based access.
    pub fn get(&self, row: usize, col: usize) -> &S {
        &self.entries[row * self.order + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: S) {
        self.entries[row * self.order + col] = value;
    }

    pub fn entries(&self) -> &[S] {
        &self.entries
    }

    pub fn rows(&self) -> impl Iterator<Item = &[S]> {
        self.entries.chunks(self.order)
    }

    pub fn map<T: Scalar>(&self, f: impl FnMut(&S) -> T) -> DenseMatrix<T> {
        DenseMatrix { order: self.order, entries: self.entries.iter().map(f).collect() }
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.first_negative().is_none()
    }

    /// 1-based location of the first negative entry in row-major order.
    pub fn first_negative(&self) -> Option<(usize, usize)> {
        self.entries
            .iter()
            .position(|x| x.is_negative_value())
            .map(|i| (i / self.order + 1, i % self.order + 1))
    }

    pub fn ensure_nonnegative(&self) -> Result<()> {
        match self.first_negative() {
            Some((row, col)) => Err(Error::NegativeEntry { row, col }),
            None => Ok(()),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.order != other.order {
            return Err(Error::OrderMismatch { left: self.order, right: other.order });
        }
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.order;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = S::zero();
                for k in 0..n {
                    let a = &self.entries[i * n + k];
                    if a.is_zero() {
                        continue;
                    }
                    acc = acc + a.clone() * other.entries[k * n + j].clone();
                }
                out.push(acc);
            }
        }
        Self { order: n, entries: out }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.order != other.order {
            return Err(Error::OrderMismatch { left: self.order, right: other.order });
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.clone() + b.clone()).collect();
        Ok(Self { order: self.order, entries })
    }

    /// `A^j` by repeated squaring, with `A^0 = I`.
    pub fn pow(&self, mut j: u32) -> Self {
        let mut result = Self::identity(self.order).expect("order is positive");
        let mut base = self.clone();
        while j > 0 {
            if j & 1 == 1 {
                result = result.mul_unchecked(&base);
            }
            j >>= 1;
            if j > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        result
    }

    pub(crate) fn add_scaled_identity(&mut self, c: &S) {
        for i in 0..self.order {
            let e = &mut self.entries[i * self.order + i];
            *e = e.clone() + c.clone();
        }
    }

    /// Smallest entry and its first 1-based location in row-major order.
    pub fn min_entry(&self) -> EntryRef<S> {
        let mut best = 0;
        for (i, x) in self.entries.iter().enumerate().skip(1) {
            if *x < self.entries[best] {
                best = i;
            }
        }
        EntryRef {
            value: self.entries[best].clone(),
            row: best / self.order + 1,
            col: best % self.order + 1,
        }
    }

    /// `n` lines of `n` comma-separated literals.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(Scalar::canonical).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let rows = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.split(',').map(S::parse_literal).collect::<Result<Vec<S>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(rows)
    }
}

pub fn mat_mul<S: Scalar>(a: &DenseMatrix<S>, b: &DenseMatrix<S>) -> Result<DenseMatrix<S>> {
    a.mul(b)
}

pub fn mat_pow<S: Scalar>(a: &DenseMatrix<S>, j: u32) -> DenseMatrix<S> {
    a.pow(j)
}

pub fn min_entry<S: Scalar>(a: &DenseMatrix<S>) -> EntryRef<S> {
    a.min_entry()
}

impl<S: Scalar> fmt::Display for DenseMatrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(Scalar::canonical).collect();
            writeln!(f, "[{}]", line.join(", "))?;
        }
        Ok(())
    }
}

impl<S: Scalar> Serialize for DenseMatrix<S> {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        let rows: Vec<Vec<String>> = self.rows().map(|r| r.iter().map(Scalar::canonical).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for DenseMatrix<S> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|x| S::parse_literal(x)).collect::<Result<Vec<S>>>())
            .collect::<Result<Vec<_>>>()
            .map_err(de::Error::custom)?;
        Self::from_rows(parsed).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(rows: &[&[i64]]) -> DenseMatrix<Rational> {
        DenseMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Rational::from_int(x)).collect()).collect())
            .unwrap()
    }

    #[test]
    fn products() {
        let i2 = DenseMatrix::<Rational>::identity(2).unwrap();
        assert_eq!(mat_mul(&i2, &i2).unwrap(), i2);
        let shift = q(&[&[0, 1], &[0, 0]]);
        assert_eq!(mat_mul(&shift, &shift).unwrap(), q(&[&[0, 0], &[0, 0]]));
        let ones = q(&[&[1, 1], &[1, 1]]);
        assert_eq!(mat_mul(&ones, &ones).unwrap(), q(&[&[2, 2], &[2, 2]]));
    }

    #[test]
    fn order_mismatch_is_an_error() {
        let a = DenseMatrix::<Rational>::identity(2).unwrap();
        let b = DenseMatrix::<Rational>::identity(3).unwrap();
        assert_eq!(a.mul(&b), Err(Error::OrderMismatch { left: 2, right: 3 }));
    }

    #[test]
    fn powers() {
        let p = DenseMatrix::<Rational>::cyclic_shift(3).unwrap();
        assert_eq!(mat_pow(&p, 0), DenseMatrix::identity(3).unwrap());
        assert_eq!(mat_pow(&p, 3), DenseMatrix::identity(3).unwrap());
        assert_eq!(mat_pow(&q(&[&[2]]), 5), q(&[&[32]]));
    }

    #[test]
    fn min_entry_scans_row_major() {
        let m = min_entry(&DenseMatrix::<Rational>::identity(2).unwrap());
        assert_eq!((m.value, m.row, m.col), (Rational::from_int(0), 1, 2));
        let m = min_entry(&q(&[&[-1, 3], &[2, 0]]));
        assert_eq!((m.value, m.row, m.col), (Rational::from_int(-1), 1, 1));
        let m = min_entry(&q(&[&[5]]));
        assert_eq!((m.value, m.row, m.col), (Rational::from_int(5), 1, 1));
    }

    #[test]
    fn csv_round_trip() {
        let text = "1/2, 0\n3, 0.25\n";
        let m = DenseMatrix::<Rational>::parse_csv(text).unwrap();
        assert_eq!(m.to_csv(), "1/2,0\n3,1/4\n");
        let f = DenseMatrix::<f64>::parse_csv(text).unwrap();
        assert_eq!(*f.get(1, 1), 0.25);
        assert!(matches!(
            DenseMatrix::<Rational>::parse_csv("1,2\n3\n"),
            Err(Error::NotSquare { row: 2, len: 1, order: 2 })
        ));
    }

    #[test]
    fn zero_order_rejected() {
        assert_eq!(DenseMatrix::<f64>::zeros(0), Err(Error::EmptyMatrix));
    }
}
