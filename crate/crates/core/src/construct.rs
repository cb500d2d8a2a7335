//! The `p_a` / `f_a` polynomial families and their certified caps on `a²`.
//!
//! `a` is only ever compared through `a²` so that caps like `4/μ` stay
//! exact even though `2/√μ` is irrational.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::matrix::DenseMatrix;
use crate::poly::Polynomial;
use crate::scalar::{serde_rational, serde_rational_opt, Rational, Scalar};

/// `1 + x + … + x^{n-1} - a x^n + x^{n+1} + … + x^{2n}`.
pub fn make_p_a<S: Scalar>(n: usize, a: &S) -> Result<Polynomial<S>> {
    if n < 2 {
        return Err(invalid(format!("p_a needs n >= 2, got {n}")));
    }
    if *a <= S::zero() {
        return Err(invalid("a must be positive"));
    }
    let mut coeffs = vec![S::one(); 2 * n + 1];
    coeffs[n] = -a.clone();
    Polynomial::new(coeffs)
}

/// `Σ_{i≠n} d_i x^i - a x^n` where `d` has length `2n + 1`; `d[n]` is ignored.
pub fn make_f_a<S: Scalar>(d: &[S], a: &S) -> Result<Polynomial<S>> {
    let n = weights_order(d)?;
    if *a <= S::zero() {
        return Err(invalid("a must be positive"));
    }
    let mut coeffs = d.to_vec();
    coeffs[n] = -a.clone();
    Polynomial::new(coeffs)
}

/// Validates a weight vector `d_0..d_{2n}` and returns `n`.
pub fn weights_order<S: Scalar>(d: &[S]) -> Result<usize> {
    if d.len() < 5 || d.len().is_multiple_of(2) {
        return Err(invalid(format!("weight vector must have odd length 2n+1 with n >= 2, got {}", d.len())));
    }
    let n = d.len() / 2;
    if let Some(i) = (0..d.len()).find(|&i| i != n && d[i] <= S::zero()) {
        return Err(invalid(format!("weight d_{i} must be positive")));
    }
    Ok(n)
}

pub fn unit_weights(n: usize) -> Vec<Rational> {
    vec![Rational::one(); 2 * n + 1]
}

/// Pre-image bound `μ(n,k) = (n-k+1) Π_{j=1}^{k-1} (n-j)` for `k < n`,
/// and `μ(n,n) = 1` for the diagonal row.
pub fn mu(n: usize, k: usize) -> Result<u128> {
    if n < 2 {
        return Err(invalid(format!("mu needs n >= 2, got {n}")));
    }
    if k == 0 || k > n {
        return Err(invalid(format!("k must lie in 1..={n}, got {k}")));
    }
    if k == n {
        return Ok(1);
    }
    let overflow = || invalid(format!("mu({n},{k}) overflows u128"));
    (1..k).try_fold((n - k + 1) as u128, |acc, j| acc.checked_mul((n - j) as u128).ok_or_else(overflow))
}

/// Cap on `a²` from row `k`: `4 d_{n-k} d_{n+k} / bound`.
fn row_cap(d: &[Rational], n: usize, k: usize, bound: u128) -> Rational {
    Rational::from_int(4) * &d[n - k] * &d[n + k] / Rational::from_integer(bound.into())
}

/// `min_{1≤k≤n} 4 d_{n-k} d_{n+k} / μ(n,k)`; `a` is admissible iff `a² ≤` this.
pub fn safe_a_squared(d: &[Rational]) -> Result<Rational> {
    Ok(bound_table(d, None)?.safe_a_sq)
}

/// [`safe_a_squared`] with unit weights, i.e. the cap for `p_a`.
pub fn safe_a_squared_unit(n: usize) -> Result<Rational> {
    safe_a_squared(&unit_weights(n))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub k: usize,
    pub mu: u128,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub nu: Option<u128>,
    #[serde(with = "serde_rational")]
    pub cap_sq: Rational,
    #[serde(with = "serde_rational_opt", skip_serializing_if = "Option::is_none", default)]
    pub nu_cap_sq: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundTable {
    pub n: usize,
    pub rows: Vec<BoundRow>,
    #[serde(with = "serde_rational")]
    pub safe_a_sq: Rational,
    /// Minimum over rows of the ν-based caps, when ν was supplied.
    #[serde(with = "serde_rational_opt", skip_serializing_if = "Option::is_none", default)]
    pub nu_safe_a_sq: Option<Rational>,
}

impl BoundTable {
    /// The sharpest certified cap available in this table.
    pub fn best_cap(&self) -> &Rational {
        self.nu_safe_a_sq.as_ref().unwrap_or(&self.safe_a_sq)
    }

    /// Recomputes the table from its own `n`, `mu` and `nu` columns with
    /// unit weights and checks every stored value.
    pub fn recheck_unit(&self) -> bool {
        let nu: Option<Vec<u128>> = self.rows.iter().filter(|r| r.k < self.n).map(|r| r.nu).collect();
        let has_nu = self.rows.iter().any(|r| r.nu.is_some());
        let fresh = bound_table(&unit_weights(self.n), if has_nu { nu.as_deref() } else { None });
        matches!(fresh, Ok(t) if t == *self)
    }
}

/// Per-k table of μ, optional exact ν, and the resulting caps on `a²`.
///
/// `nu_values[k-1]` is ν(n,k) for `k = 1..n-1`. The diagonal row `k = n`
/// always uses `μ(n,n) = 1`. The ν column yields valid caps because the
/// weight `1/ν` per pre-image is all the ψ-budget argument needs.
pub fn bound_table(d: &[Rational], nu_values: Option<&[u128]>) -> Result<BoundTable> {
    let n = weights_order(d)?;
    if let Some(nu) = nu_values {
        if nu.len() != n - 1 {
            return Err(invalid(format!("expected {} nu values (k = 1..{}), got {}", n - 1, n - 1, nu.len())));
        }
    }
    let mut rows = Vec::with_capacity(n);
    for k in 1..=n {
        let m = mu(n, k)?;
        let nu = nu_values.and_then(|v| v.get(k - 1).copied());
        let cap_sq = row_cap(d, n, k, m);
        // An empty class (ν = 0) constrains nothing; bound it by 1 like the diagonal row.
        let nu_cap_sq = nu_values.map(|_| row_cap(d, n, k, nu.unwrap_or(m).max(1)));
        rows.push(BoundRow { k, mu: m, nu, cap_sq, nu_cap_sq });
    }
    let safe_a_sq = rows.iter().map(|r| &r.cap_sq).min().cloned().ok_or(Error::Internal("empty table".into()))?;
    let nu_safe_a_sq = nu_values.and_then(|_| rows.iter().filter_map(|r| r.nu_cap_sq.as_ref()).min().cloned());
    Ok(BoundTable { n, rows, safe_a_sq, nu_safe_a_sq })
}

/// `f_a` with `a = √a_sq`, evaluated exactly on rational matrices.
///
/// Entry `(i,j)` of `f_a(A)` is `Q_ij - a B_ij` with `Q` the part without the
/// degree-`n` term and `B = A^n ≥ 0`, so it is nonnegative iff `Q_ij ≥ 0` and
/// `Q_ij² ≥ a_sq B_ij²`.
#[derive(Clone, Debug, PartialEq)]
pub struct SurdFamily {
    weights: Vec<Rational>,
    n: usize,
    a_sq: Rational,
}

impl SurdFamily {
    pub fn new(weights: Vec<Rational>, a_sq: Rational) -> Result<Self> {
        let n = weights_order(&weights)?;
        if !a_sq.is_positive() {
            return Err(invalid("a^2 must be positive"));
        }
        Ok(Self { weights, n, a_sq })
    }

    pub fn p_a(n: usize, a_sq: Rational) -> Result<Self> {
        Self::new(unit_weights(n), a_sq)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a_sq(&self) -> &Rational {
        &self.a_sq
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    /// Returns `(Q, B)` with `f_a(A) = Q - √a_sq · B`.
    pub fn split(&self, a: &DenseMatrix<Rational>) -> (DenseMatrix<Rational>, DenseMatrix<Rational>) {
        let mut rest = self.weights.clone();
        rest[self.n] = Rational::zero();
        let q = Polynomial::new(rest).expect("non-empty").eval_matrix(a);
        let b = a.pow(self.n as u32);
        (q, b)
    }

    /// First (1-based, row-major) entry of `f_a(A)` that is strictly negative.
    pub fn first_negative_entry(&self, a: &DenseMatrix<Rational>) -> Result<Option<(usize, usize)>> {
        a.ensure_nonnegative()?;
        let (q, b) = self.split(a);
        let order = a.order();
        for i in 0..order {
            for j in 0..order {
                if !surd_entry_nonnegative(q.get(i, j), &self.a_sq, b.get(i, j)) {
                    return Ok(Some((i + 1, j + 1)));
                }
            }
        }
        Ok(None)
    }
}

/// `q - √a_sq · b ≥ 0` for `b ≥ 0`, decided exactly.
pub fn surd_entry_nonnegative(q: &Rational, a_sq: &Rational, b: &Rational) -> bool {
    !q.is_negative() && q * q >= a_sq * b * b
}
