//! Witness matrices for `p ∉ P_m`.
//!
//! A witness is only ever reported after exact re-evaluation over the
//! rationals. The floating search is a heuristic; when it finds nothing the
//! result says nothing about membership.

use std::ops::RangeInclusive;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construct::make_p_a;
use crate::error::{invalid, Error, Result};
use crate::matrix::DenseMatrix;
use crate::poly::Polynomial;
use crate::scalar::{rationalize, serde_rational, Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessMethod {
    StructuredCycle,
    Search,
    Sample,
    Supplied,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub poly: Polynomial<Rational>,
    pub m: usize,
    pub matrix: DenseMatrix<Rational>,
    /// 1-based `(row, col)`.
    pub entry: (usize, usize),
    #[serde(with = "serde_rational")]
    pub value: Rational,
    pub method: WitnessMethod,
}

impl WitnessReport {
    /// Re-evaluates `poly(matrix)` exactly and confirms the stored entry.
    pub fn recheck(&self) -> bool {
        let (r, c) = self.entry;
        self.matrix.order() == self.m
            && self.matrix.is_nonnegative()
            && r >= 1
            && c >= 1
            && r <= self.m
            && c <= self.m
            && self.value < Rational::zero()
            && *self.poly.eval_matrix(&self.matrix).get(r - 1, c - 1) == self.value
    }
}

/// Evaluates `p(A)` exactly and reports its smallest entry if negative.
pub fn verify_witness(
    poly: &Polynomial<Rational>,
    matrix: &DenseMatrix<Rational>,
    method: WitnessMethod,
) -> Result<Option<WitnessReport>> {
    matrix.ensure_nonnegative()?;
    let min = poly.eval_matrix(matrix).min_entry();
    if min.value >= Rational::zero() {
        return Ok(None);
    }
    Ok(Some(WitnessReport {
        poly: poly.clone(),
        m: matrix.order(),
        matrix: matrix.clone(),
        entry: (min.row, min.col),
        value: min.value,
        method,
    }))
}

/// `A = t·P` with `P` the cyclic shift on `n+1` vertices. Powers of `P`
/// cycle with period `n+1`, and `n` is the only degree of `p_a` in `0..=2n`
/// congruent to `n` mod `n+1`, so entry `(1, n+1)` of `p_a(A)` is `-a t^n`.
pub fn cycle_witness(n: usize, a: &Rational, t: &Rational) -> Result<WitnessReport> {
    if *t <= Rational::zero() {
        return Err(invalid("t must be positive"));
    }
    let poly = make_p_a(n, a)?;
    let matrix = DenseMatrix::<Rational>::cyclic_shift(n + 1)?.scale(t);
    let expected = -(a * num_traits::pow(t.clone(), n));
    let actual = poly.eval_matrix(&matrix).get(0, n).clone();
    if actual != expected {
        return Err(Error::Internal(format!("cycle witness evaluated to {actual}, expected {expected}")));
    }
    Ok(WitnessReport { poly, m: n + 1, matrix, entry: (1, n + 1), value: actual, method: WitnessMethod::StructuredCycle })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub starts: usize,
    pub iterations: usize,
    pub seed: u64,
    /// Initial entry scales are `2^e` for `e` in this range, cycled by start index.
    pub scale_exponents: RangeInclusive<i32>,
    /// Denominator cap when rationalizing a floating candidate.
    pub max_denominator: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { starts: 64, iterations: 200, seed: 0, scale_exponents: -4..=4, max_denominator: 1_000_000 }
    }
}

/// Multi-start projected coordinate descent on `min_ij p(A)_ij / |p|(A)_ij`
/// over `A ≥ 0`. Starts run in parallel; the verified witness from the
/// lowest start index is returned.
pub fn search_witness(p: &Polynomial<Rational>, m: usize, config: &SearchConfig) -> Result<Option<WitnessReport>> {
    if m == 0 {
        return Err(Error::EmptyMatrix);
    }
    if config.scale_exponents.is_empty() {
        return Err(invalid("scale sweep is empty"));
    }
    // Nonnegative coefficients map A ≥ 0 to p(A) ≥ 0.
    if p.has_nonnegative_coeffs() {
        return Ok(None);
    }
    let signed = p.map(Scalar::to_f64);
    let absolute = p.abs_coeffs().map(Scalar::to_f64);
    let found = (0..config.starts)
        .into_par_iter()
        .map(|start| run_start(p, &signed, &absolute, m, config, start))
        .find_first(|w| w.is_some())
        .flatten();
    Ok(found)
}

fn objective(signed: &Polynomial<f64>, absolute: &Polynomial<f64>, a: &DenseMatrix<f64>) -> f64 {
    let value = signed.eval_matrix(a);
    let scale = absolute.eval_matrix(a);
    value
        .entries()
        .iter()
        .zip(scale.entries())
        .map(|(v, s)| if *s > 0.0 { v / s } else { 0.0 })
        .fold(f64::INFINITY, f64::min)
}

fn run_start(
    exact: &Polynomial<Rational>,
    signed: &Polynomial<f64>,
    absolute: &Polynomial<f64>,
    m: usize,
    config: &SearchConfig,
    start: usize,
) -> Option<WitnessReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(start as u64);
    let exps: Vec<i32> = config.scale_exponents.clone().collect();
    let scale = 2f64.powi(exps[start % exps.len()]);
    let density = rng.random_range(0.25..=1.0);
    let mut a = DenseMatrix::from_fn(m, |_, _| if rng.random_bool(density) { scale * rng.random::<f64>() } else { 0.0 })
        .expect("m > 0");
    let mut best = objective(signed, absolute, &a);
    let mut step = 0.5;

    let confirm = |a: &DenseMatrix<f64>| -> Option<WitnessReport> {
        let candidate = a.map(|x| rationalize(x.max(0.0), config.max_denominator));
        verify_witness(exact, &candidate, WitnessMethod::Search).ok().flatten()
    };

    for _ in 0..config.iterations {
        if best < 0.0 {
            if let Some(w) = confirm(&a) {
                return Some(w);
            }
        }
        let mut improved = false;
        for idx in 0..m * m {
            let (i, j) = (idx / m, idx % m);
            let x = *a.get(i, j);
            let delta = step * scale;
            let candidates = [0.0, x * (1.0 + step), x * (1.0 - step), x + delta, (x - delta).max(0.0)];
            let mut best_x = x;
            for &c in &candidates {
                if c == best_x {
                    continue;
                }
                a.set(i, j, c);
                let f = objective(signed, absolute, &a);
                if f < best - 1e-15 {
                    best = f;
                    best_x = c;
                    improved = true;
                }
            }
            a.set(i, j, best_x);
        }
        if !improved {
            step *= 0.5;
            if step < 1e-7 {
                break;
            }
        }
    }
    if best < 0.0 {
        confirm(&a)
    } else {
        None
    }
}

/// `A = t·C` with `C` the cyclic shift on `n` vertices: `A^n = t^n I`, so
/// the diagonal of `p_a(A)` is `1 - a t^n + t^{2n}`, negative at `t = 1`
/// once `a > 2`.
pub fn diagonal_cycle_witness(n: usize, a: &Rational) -> Result<Option<WitnessReport>> {
    let poly = make_p_a(n, a)?;
    let matrix = DenseMatrix::<Rational>::cyclic_shift(n)?;
    verify_witness(&poly, &matrix, WitnessMethod::StructuredCycle)
}
