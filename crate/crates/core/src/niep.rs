//! Necessary conditions for a complex list to be the spectrum of a
//! nonnegative matrix: nonnegative power sums and the JLL inequalities
//! `s_k^m ≤ n^{m-1} s_{km}`.
//!
//! Spectra are numeric, so everything here is `f64` with an explicit
//! relative tolerance.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::matrix::DenseMatrix;
use crate::poly::Polynomial;
use crate::scalar::Scalar;

pub const DEFAULT_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumList {
    values: Vec<Complex64>,
}

impl SpectrumList {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("spectrum list must be non-empty"));
        }
        Ok(Self { values })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Whether non-real values pair up with their conjugates (up to `tol`).
    pub fn is_conjugation_closed(&self, tol: f64) -> bool {
        let mut used = vec![false; self.values.len()];
        for (i, z) in self.values.iter().enumerate() {
            if used[i] || z.im.abs() <= tol * z.norm().max(1.0) {
                continue;
            }
            let partner = (0..self.values.len())
                .find(|&j| j != i && !used[j] && (self.values[j] - z.conj()).norm() <= tol * z.norm().max(1.0));
            match partner {
                Some(j) => {
                    used[i] = true;
                    used[j] = true;
                }
                None => return false,
            }
        }
        true
    }

    /// Comma-separated entries `a`, `bi` or `a+bi`.
    pub fn parse(text: &str) -> Result<Self> {
        Self::new(text.split(',').map(str::trim).filter(|s| !s.is_empty()).map(parse_complex).collect::<Result<_>>()?)
    }
}

impl fmt::Display for SpectrumList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(format_complex).collect();
        f.write_str(&parts.join(","))
    }
}

pub fn format_complex(z: &Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

pub fn parse_complex(input: &str) -> Result<Complex64> {
    let err = || Error::Parse { what: "complex number", input: input.to_string() };
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| err());
    };
    // Split at the last sign that is not leading and not part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse::<f64>().map_err(|_| err())?,
    };
    let re = re.parse::<f64>().map_err(|_| err())?;
    Ok(Complex64::new(re, im))
}

/// `s_k(Λ) = Σ λ_i^k`.
pub fn power_sum(list: &SpectrumList, k: u32) -> Complex64 {
    list.values.iter().map(|z| z.powu(k)).sum()
}

/// `Σ |λ_i|^k`, the natural scale for the rounding error in `s_k`.
fn power_sum_scale(list: &SpectrumList, k: u32) -> f64 {
    list.values.iter().map(|z| z.norm().powi(k as i32)).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JllRow {
    pub k: u32,
    pub m: u32,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: u32,
    pub s_k: f64,
    pub nonnegative: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JllReport {
    pub n: usize,
    pub conjugation_closed: bool,
    /// Every power sum used was real up to tolerance.
    pub real_power_sums: bool,
    pub traces: Vec<TraceRow>,
    pub rows: Vec<JllRow>,
    pub all_hold: bool,
}

impl JllReport {
    pub fn row(&self, k: u32, m: u32) -> Option<&JllRow> {
        self.rows.iter().find(|r| r.k == k && r.m == m)
    }

    /// `k,m,lhs,rhs,holds` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,m,lhs,rhs,holds\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{:e},{:e},{}\n", r.k, r.m, r.lhs, r.rhs, r.holds));
        }
        out
    }
}

/// Evaluates `s_k ≥ 0` and `s_k^m ≤ n^{m-1} s_{km}` for `k ≤ k_max`,
/// `m ≤ m_max`, with relative tolerance `tol`. A power sum with a
/// non-negligible imaginary part makes the list non-realizable outright.
pub fn jll_check(list: &SpectrumList, k_max: u32, m_max: u32, tol: f64) -> JllReport {
    let n = list.len();
    let top = k_max.saturating_mul(m_max).max(k_max);
    let sums: Vec<Complex64> = (0..=top).map(|k| power_sum(list, k)).collect();
    let scales: Vec<f64> = (0..=top).map(|k| power_sum_scale(list, k)).collect();
    let real_at = |k: u32| sums[k as usize].im.abs() <= tol * scales[k as usize].max(1.0);
    let mut real_power_sums = true;

    let mut traces = Vec::new();
    for k in 1..=k_max {
        let is_real = real_at(k);
        real_power_sums &= is_real;
        let s = sums[k as usize].re;
        traces.push(TraceRow { k, s_k: s, nonnegative: is_real && s >= -tol * scales[k as usize].max(1.0) });
    }

    let mut rows = Vec::new();
    for k in 1..=k_max {
        for m in 1..=m_max {
            let km = k * m;
            let is_real = real_at(k) && real_at(km);
            real_power_sums &= is_real;
            let lhs = sums[k as usize].re.powi(m as i32);
            let weight = (n as f64).powi(m as i32 - 1);
            let rhs = weight * sums[km as usize].re;
            let scale = scales[k as usize].powi(m as i32).max(weight * scales[km as usize]).max(1.0);
            rows.push(JllRow { k, m, lhs, rhs, holds: is_real && lhs <= rhs + tol * scale });
        }
    }
    let all_hold = real_power_sums && traces.iter().all(|t| t.nonnegative) && rows.iter().all(|r| r.holds);
    JllReport { n, conjugation_closed: list.is_conjugation_closed(tol), real_power_sums, traces, rows, all_hold }
}

/// `p(Λ) = (p(λ_1), …, p(λ_n))`.
pub fn transform_list<S: Scalar>(p: &Polynomial<S>, list: &SpectrumList) -> SpectrumList {
    let coeffs: Vec<f64> = p.coeffs().iter().map(Scalar::to_f64).collect();
    let values = list
        .values
        .iter()
        .map(|z| coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c))
        .collect();
    SpectrumList { values }
}

/// Eigenvalues of a real matrix as an unordered list.
pub fn spectrum_of<S: Scalar>(a: &DenseMatrix<S>) -> SpectrumList {
    let n = a.order();
    let m = DMatrix::from_fn(n, n, |i, j| a.get(i, j).to_f64());
    let values = m.complex_eigenvalues().iter().copied().collect();
    SpectrumList { values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::make_p_a;
    use crate::scalar::Rational;
    use num_traits::One;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn power_sums() {
        let l = SpectrumList::from_real(&[1.0, -1.0]).unwrap();
        assert_eq!(power_sum(&l, 1), c(0.0, 0.0));
        assert_eq!(power_sum(&l, 2), c(2.0, 0.0));
        let l = SpectrumList::parse("1, i, -i").unwrap();
        let s2 = power_sum(&l, 2);
        assert!((s2 - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn jll_examples() {
        let bad = jll_check(&SpectrumList::parse("1,i,-i").unwrap(), 4, 4, DEFAULT_TOLERANCE);
        let row = bad.row(1, 2).unwrap();
        assert!(!row.holds);
        assert_eq!((row.lhs, row.rhs), (1.0, -3.0));
        assert!(bad.conjugation_closed);
        assert!(!bad.all_hold);

        let eq = jll_check(&SpectrumList::from_real(&[1.0, 1.0]).unwrap(), 4, 4, DEFAULT_TOLERANCE);
        let row = eq.row(1, 2).unwrap();
        assert_eq!((row.lhs, row.rhs, row.holds), (4.0, 4.0, true));
        assert!(eq.all_hold);
    }

    #[test]
    fn non_real_power_sums_are_reported() {
        let r = jll_check(&SpectrumList::parse("1+i").unwrap(), 2, 2, DEFAULT_TOLERANCE);
        assert!(!r.real_power_sums);
        assert!(!r.conjugation_closed);
        assert!(!r.all_hold);
    }

    #[test]
    fn transforms() {
        let l = SpectrumList::from_real(&[1.0, -1.0]).unwrap();
        let x = Polynomial::new(vec![Rational::from_int(0), Rational::one()]).unwrap();
        assert_eq!(transform_list(&x, &l), l);
        let sq = Polynomial::new(vec![0.0, 0.0, 1.0]).unwrap();
        assert_eq!(transform_list(&sq, &l), SpectrumList::from_real(&[1.0, 1.0]).unwrap());
        let p = make_p_a(2, &Rational::one()).unwrap();
        let out = transform_list(&p, &SpectrumList::from_real(&[2.0, 0.0]).unwrap());
        assert_eq!(out, SpectrumList::from_real(&[23.0, 1.0]).unwrap());
        let constant = Polynomial::new(vec![3.5]).unwrap();
        assert_eq!(transform_list(&constant, &l), SpectrumList::from_real(&[3.5, 3.5]).unwrap());
    }

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("1+2i").unwrap(), c(1.0, 2.0));
        assert_eq!(parse_complex("1 - 2i").unwrap(), c(1.0, -2.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("2.5i").unwrap(), c(0.0, 2.5));
        assert_eq!(parse_complex("-3").unwrap(), c(-3.0, 0.0));
        assert_eq!(parse_complex("1e-3+1e2i").unwrap(), c(1e-3, 100.0));
        assert!(parse_complex("x").is_err());
        let l = SpectrumList::parse("1,1+2i,1-2i").unwrap();
        assert_eq!(SpectrumList::parse(&l.to_string()).unwrap(), l);
        assert!(SpectrumList::parse("").is_err());
    }

    #[test]
    fn spectrum_of_cycle_is_roots_of_unity() {
        let p = DenseMatrix::<f64>::cyclic_shift(3).unwrap();
        let s = spectrum_of(&p);
        for k in 1..=6u32 {
            let expected = if k % 3 == 0 { 3.0 } else { 0.0 };
            assert!((power_sum(&s, k) - c(expected, 0.0)).norm() < 1e-12);
        }
        assert!(jll_check(&s, 4, 4, DEFAULT_TOLERANCE).all_hold);
    }
}
