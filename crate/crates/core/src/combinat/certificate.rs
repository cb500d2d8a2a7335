//! Exhaustive check of the decomposition of entry (1,2) of `p_a(A)`.
//!
//! Every `m ∈ M_n` falls in exactly one class `M_{n,k}` by its minimal cycle
//! length `k`. Cutting out the first `k`-cycle `z` gives `m = u z v`,
//! `φ(m) = u z² v`, `ψ(m) = u v`, and the group
//! `ψ(m)/μ - a m + φ(m) = uv (1/μ - a z + z²)` is nonnegative once
//! `a² ≤ 4/μ`. The group weights only add up if `φ` is injective on each
//! class and no `ψ`-image has more than `μ(n,k)` pre-images; both are
//! checked here by enumeration.

use std::collections::{HashMap, HashSet};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::enumerate::{checked_count, for_each_in_range, par_fold};
use super::path::{first_cycle_of_length, min_cycle_length, phi_vertices, psi_vertices, rank_of, segment_value, Vertex};
use crate::construct::{mu, surd_entry_nonnegative};
use crate::error::{invalid, Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::{serde_rational, Rational, Scalar};

#[derive(Clone, Debug, Default)]
struct ClassTally {
    count: u128,
    phi_images: HashSet<u128>,
    phi_collision: bool,
    psi_images: HashMap<u128, u64>,
}

impl ClassTally {
    fn merge(mut self, mut other: Self) -> Self {
        self.count += other.count;
        self.phi_collision |= other.phi_collision;
        if self.phi_images.len() < other.phi_images.len() {
            std::mem::swap(&mut self.phi_images, &mut other.phi_images);
        }
        for r in other.phi_images {
            if !self.phi_images.insert(r) {
                self.phi_collision = true;
            }
        }
        if self.psi_images.len() < other.psi_images.len() {
            std::mem::swap(&mut self.psi_images, &mut other.psi_images);
        }
        for (r, c) in other.psi_images {
            *self.psi_images.entry(r).or_default() += c;
        }
        self
    }

    fn max_preimage(&self) -> u128 {
        self.psi_images.values().copied().max().unwrap_or(0) as u128
    }
}

#[derive(Clone, Copy)]
struct Track {
    phi: bool,
    psi: bool,
}

#[derive(Debug, Default)]
struct Tally {
    classes: Vec<ClassTally>,
    /// First path violating `1 ≤ l(m) ≤ n-1`, if any.
    anomaly: Option<Vec<Vertex>>,
}

fn interior_rank(n: usize, it: impl Iterator<Item = Vertex>, total: usize) -> u128 {
    rank_of(n, it.skip(1).take(total - 2))
}

fn classify(n: usize, track: Track, cap: u128) -> Result<Vec<ClassTally>> {
    let tally = par_fold(
        n,
        n,
        cap,
        || Tally { classes: vec![ClassTally::default(); n - 1], anomaly: None },
        |acc, v| {
            let k = match min_cycle_length(v, n) {
                Some(k) if k < n => k,
                _ => {
                    acc.anomaly.get_or_insert_with(|| v.to_vec());
                    return;
                }
            };
            let cyc = first_cycle_of_length(v, k);
            let class = &mut acc.classes[k - 1];
            class.count += 1;
            if track.phi {
                let r = interior_rank(n, phi_vertices(v, cyc), v.len() + k);
                if !class.phi_images.insert(r) {
                    class.phi_collision = true;
                }
            }
            if track.psi {
                let r = interior_rank(n, psi_vertices(v, cyc), v.len() - k);
                *class.psi_images.entry(r).or_default() += 1;
            }
        },
        |a, b| Tally {
            classes: a.classes.into_iter().zip(b.classes).map(|(x, y)| x.merge(y)).collect(),
            anomaly: a.anomaly.or(b.anomaly),
        },
    )?;
    if let Some(v) = tally.anomaly {
        return Err(Error::Internal(format!("path {v:?} has no cycle of length below {n}")));
    }
    Ok(tally.classes)
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(invalid(format!("n must be at least 2, got {n}")));
    }
    Ok(())
}

/// `|M_{n,k}|` for `k = 1..n-1`.
pub fn partition_stats(n: usize, cap: u128) -> Result<Vec<(usize, u128)>> {
    check_n(n)?;
    let classes = classify(n, Track { phi: false, psi: false }, cap)?;
    Ok(classes.iter().enumerate().map(|(i, c)| (i + 1, c.count)).collect())
}

/// Exact maximum pre-image size ν(n,k) of `ψ_k` for `k = 1..n-1`.
pub fn nu_table(n: usize, cap: u128) -> Result<Vec<u128>> {
    check_n(n)?;
    let classes = classify(n, Track { phi: false, psi: true }, cap)?;
    Ok(classes.iter().map(ClassTally::max_preimage).collect())
}

pub fn exact_nu(n: usize, k: usize, cap: u128) -> Result<u128> {
    check_n(n)?;
    if k == 0 || k >= n {
        return Err(invalid(format!("k must lie in 1..={}, got {k}", n - 1)));
    }
    Ok(nu_table(n, cap)?[k - 1])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateRow {
    pub k: usize,
    pub count: u128,
    pub phi_injective: bool,
    pub nu: u128,
    pub mu: u128,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub n: usize,
    #[serde(with = "serde_rational")]
    pub a_sq: Rational,
    pub per_k: Vec<CertificateRow>,
    pub verdict: bool,
}

impl CertificateReport {
    pub fn total_count(&self) -> u128 {
        self.per_k.iter().map(|r| r.count).sum()
    }

    /// Recomputes the verdict from the stored rows alone.
    pub fn verdict_from_rows(&self) -> bool {
        let partition = crate::combinat::path_count(self.n, self.n) == Some(self.total_count());
        let rows_ok = self.per_k.iter().enumerate().all(|(i, r)| {
            r.k == i + 1 && mu(self.n, r.k).ok() == Some(r.mu) && r.phi_injective && r.nu <= r.mu
        });
        partition && rows_ok && self.per_k.len() + 1 == self.n && a_sq_within_mu_caps(self.n, &self.a_sq)
    }
}

/// `0 < a² ≤ 4/μ(n,k)` for every `k = 1..n` (the `k = n` row is the
/// diagonal condition `a ≤ 2`).
pub fn a_sq_within_mu_caps(n: usize, a_sq: &Rational) -> bool {
    a_sq.is_positive()
        && (1..=n).all(|k| match mu(n, k) {
            Ok(m) => a_sq * Rational::from_integer(m.into()) <= Rational::from_int(4),
            Err(_) => false,
        })
}

/// Enumerates `M_n`, partitions it by minimal cycle length, and checks
/// φ-injectivity, `ν ≤ μ` and the cap on `a²` for every class.
pub fn build_certificate(n: usize, a_sq: &Rational, cap: u128) -> Result<CertificateReport> {
    check_n(n)?;
    if !a_sq.is_positive() {
        return Err(invalid("a^2 must be positive"));
    }
    let classes = classify(n, Track { phi: true, psi: true }, cap)?;
    let mut per_k = Vec::with_capacity(n - 1);
    for (i, c) in classes.iter().enumerate() {
        let k = i + 1;
        per_k.push(CertificateRow {
            k,
            count: c.count,
            phi_injective: !c.phi_collision,
            nu: c.max_preimage(),
            mu: mu(n, k)?,
        });
    }
    let mut report = CertificateReport { n, a_sq: a_sq.clone(), per_k, verdict: false };
    report.verdict = report.verdict_from_rows();
    Ok(report)
}

/// Outcome of [`numeric_decomposition_check`] on one matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionCheck {
    /// Σ over `M_n` of monomial values equals `(A^n)_{1,2}`.
    pub expansion_ok: bool,
    /// No ψ-image is consumed by more than μ(n,k) monomials.
    pub psi_budget_ok: bool,
    /// No φ-image is produced twice within a class.
    pub phi_once_ok: bool,
    /// `value(φ(m)) · value(ψ(m)) = value(m)²` for every `m`.
    pub value_identity_ok: bool,
    /// Every group `uv (1/μ - a z + z²)` is nonnegative.
    pub termwise_ok: bool,
    /// `Σ_m [ψ(m)/μ + φ(m)]`.
    pub covered: Rational,
    /// `Σ_{j≠n} (A^j)_{1,2}`, the positive part of the entry.
    pub available: Rational,
    /// `(p_a(A))_{1,2} ≥ 0` decided exactly with `a = √a_sq`.
    pub entry_nonnegative: bool,
}

impl DecompositionCheck {
    pub fn passed(&self) -> bool {
        self.expansion_ok
            && self.psi_budget_ok
            && self.phi_once_ok
            && self.value_identity_ok
            && self.termwise_ok
            && self.covered <= self.available
            && self.entry_nonnegative
    }
}

/// Checks, in exact arithmetic on a concrete nonnegative `A`, that the
/// negative part `-a (A^n)_{1,2}` of entry (1,2) of `p_a(A)` is absorbed
/// by the φ/ψ groups, with `a = √a_sq`.
pub fn numeric_decomposition_check(n: usize, a_sq: &Rational, a: &DenseMatrix<Rational>, cap: u128) -> Result<DecompositionCheck> {
    check_n(n)?;
    if a.order() != n {
        return Err(Error::OrderMismatch { left: a.order(), right: n });
    }
    a.ensure_nonnegative()?;
    let count = checked_count(n, n, cap)?;

    let mus: Vec<Rational> = (1..n).map(|k| mu(n, k).map(|m| Rational::from_integer(m.into()))).collect::<Result<_>>()?;
    let mut classes = vec![ClassTally::default(); n - 1];
    let mut monomial_sum = Rational::zero();
    let mut covered = Rational::zero();
    let mut value_identity_ok = true;
    let mut termwise_ok = true;
    let mut anomaly = false;

    for_each_in_range(n, n, 0..count, |v| {
        let Some(k) = min_cycle_length(v, n).filter(|&k| k < n) else {
            anomaly = true;
            return;
        };
        let cyc = first_cycle_of_length(v, k);
        let (p, end) = (cyc.start, cyc.start + cyc.length);
        let u = segment_value(&v[..=p], a);
        let z = segment_value(&v[p..=end], a);
        let w = segment_value(&v[end..], a);
        let m_val = segment_value(v, a);
        let phi: Vec<Vertex> = phi_vertices(v, cyc).collect();
        let psi: Vec<Vertex> = psi_vertices(v, cyc).collect();
        let phi_val = segment_value(&phi, a);
        let psi_val = segment_value(&psi, a);

        value_identity_ok &= &phi_val * &psi_val == &m_val * &m_val
            && m_val == &u * &z * &w
            && psi_val == &u * &w;

        // 1/μ - a z + z² ≥ 0 with z ≥ 0 ⇔ (1/μ + z²)² ≥ a² z².
        let inv_mu = mus[k - 1].recip();
        let lhs = &inv_mu + &z * &z;
        termwise_ok &= &lhs * &lhs >= a_sq * &z * &z;

        covered += &psi_val * &inv_mu + &phi_val;
        monomial_sum += m_val;

        let class = &mut classes[k - 1];
        if !class.phi_images.insert(interior_rank(n, phi.iter().copied(), phi.len())) {
            class.phi_collision = true;
        }
        *class.psi_images.entry(interior_rank(n, psi.iter().copied(), psi.len())).or_default() += 1;
    });
    if anomaly {
        return Err(Error::Internal(format!("a path of length {n} has no short cycle")));
    }

    let psi_budget_ok = classes.iter().enumerate().all(|(i, c)| c.max_preimage() <= mu(n, i + 1).unwrap_or(0));
    let phi_once_ok = classes.iter().all(|c| !c.phi_collision);

    let mut available = Rational::zero();
    let mut power = a.clone();
    let mut b12 = Rational::zero();
    for j in 1..=2 * n {
        if j > 1 {
            power = power.mul(a)?;
        }
        if j == n {
            b12 = power.get(0, 1).clone();
        } else {
            available += power.get(0, 1);
        }
    }

    Ok(DecompositionCheck {
        expansion_ok: monomial_sum == b12,
        psi_budget_ok,
        phi_once_ok,
        value_identity_ok,
        termwise_ok,
        entry_nonnegative: surd_entry_nonnegative(&available, a_sq, &b12),
        covered,
        available,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::{enumerate_monomials, DEFAULT_ENUMERATION_CAP as CAP};
    use crate::construct::safe_a_squared_unit;
    use crate::scalar::rational_from_ratio as q;

    /// Independent oracle: classify by scanning all vertex pairs and
    /// locate cycles with fresh loops.
    fn oracle_classes(n: usize) -> Vec<Vec<Vec<Vertex>>> {
        let mut out = vec![Vec::new(); n - 1];
        for m in enumerate_monomials(n, n, CAP).unwrap() {
            let v = m.vertices();
            let mut best = usize::MAX;
            for p in 0..v.len() {
                for r in p + 1..v.len() {
                    if v[p] == v[r] {
                        best = best.min(r - p);
                    }
                }
            }
            out[best - 1].push(v.to_vec());
        }
        out
    }

    fn oracle_psi(v: &[Vertex], k: usize) -> Vec<Vertex> {
        let p = (0..v.len()).find(|&p| p + k < v.len() && v[p] == v[p + k]).unwrap();
        let mut out = v[..p].to_vec();
        out.extend_from_slice(&v[p + k..]);
        out
    }

    fn oracle_nu(n: usize) -> Vec<u128> {
        oracle_classes(n)
            .iter()
            .enumerate()
            .map(|(i, class)| {
                let mut counts: HashMap<Vec<Vertex>, u128> = HashMap::new();
                for v in class {
                    *counts.entry(oracle_psi(v, i + 1)).or_default() += 1;
                }
                counts.values().copied().max().unwrap_or(0)
            })
            .collect()
    }

    #[test]
    fn partition_small_cases() {
        assert_eq!(partition_stats(2, CAP).unwrap(), vec![(1, 2)]);
        assert_eq!(partition_stats(3, CAP).unwrap(), vec![(1, 6), (2, 3)]);
        let l2: Vec<Vec<Vertex>> = oracle_classes(3).remove(1);
        assert_eq!(l2, vec![vec![1, 2, 1, 2], vec![1, 2, 3, 2], vec![1, 3, 1, 2]]);
    }

    #[test]
    fn partition_matches_oracle() {
        for n in 2..=5 {
            let stats = partition_stats(n, CAP).unwrap();
            let oracle: Vec<(usize, u128)> =
                oracle_classes(n).iter().enumerate().map(|(i, c)| (i + 1, c.len() as u128)).collect();
            assert_eq!(stats, oracle, "n = {n}");
            assert_eq!(stats.iter().map(|s| s.1).sum::<u128>(), (n as u128).pow(n as u32 - 1));
        }
    }

    #[test]
    fn nu_matches_oracle_and_mu() {
        assert_eq!(nu_table(2, CAP).unwrap(), vec![2]);
        // M_{3,2} = {1212, 1232, 1312}: all three delete down to 1→2.
        assert_eq!(nu_table(3, CAP).unwrap(), vec![3, 3]);
        for n in 2..=5 {
            let nu = nu_table(n, CAP).unwrap();
            assert_eq!(nu, oracle_nu(n), "n = {n}");
            for (i, &v) in nu.iter().enumerate() {
                assert!(v <= mu(n, i + 1).unwrap());
            }
        }
        assert_eq!(exact_nu(3, 2, CAP).unwrap(), 3);
        assert!(exact_nu(3, 3, CAP).is_err());
    }

    #[test]
    fn certificate_verdicts() {
        let two = build_certificate(2, &q(2, 1), CAP).unwrap();
        assert!(two.verdict);
        assert_eq!(two.per_k, vec![CertificateRow { k: 1, count: 2, phi_injective: true, nu: 2, mu: 2 }]);
        assert!(build_certificate(3, &q(1, 1), CAP).unwrap().verdict);
        assert!(!build_certificate(3, &q(100, 1), CAP).unwrap().verdict);
        assert!(!build_certificate(3, &q(101, 100), CAP).unwrap().verdict);
        assert!(build_certificate(3, &q(0, 1), CAP).is_err());
    }

    #[test]
    fn certificate_json_shape() {
        let r = build_certificate(2, &q(2, 1), CAP).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(json, r#"{"n":2,"a_sq":"2","per_k":[{"k":1,"count":2,"phi_injective":true,"nu":2,"mu":2}],"verdict":true}"#);
        let back: CertificateReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn decomposition_on_zero_and_ones() {
        let zero = DenseMatrix::<Rational>::zeros(3).unwrap();
        let c = numeric_decomposition_check(3, &q(1, 1), &zero, CAP).unwrap();
        assert!(c.passed());
        assert_eq!(c.available, Rational::zero());

        let ones = DenseMatrix::from_fn(2, |_, _| Rational::from_int(1)).unwrap();
        let c = numeric_decomposition_check(2, &safe_a_squared_unit(2).unwrap(), &ones, CAP).unwrap();
        assert!(c.passed(), "{c:?}");
        // J^j = 2^{j-1} J, every monomial is 1: available = 1 + 4 + 8, covered = 2·(1/2 + 1).
        assert_eq!(c.available, q(13, 1));
        assert_eq!(c.covered, q(3, 1));
    }

    #[test]
    fn decomposition_rejects_bad_input() {
        let neg = DenseMatrix::from_fn(2, |i, j| Rational::from_int(if i == j { -1 } else { 0 })).unwrap();
        assert!(matches!(numeric_decomposition_check(2, &q(1, 1), &neg, CAP), Err(Error::NegativeEntry { .. })));
        let wrong = DenseMatrix::<Rational>::zeros(3).unwrap();
        assert!(numeric_decomposition_check(2, &q(1, 1), &wrong, CAP).is_err());
    }

    #[test]
    fn termwise_fails_beyond_discriminant() {
        // Loop weight z = 3/4 with a = 3/2: 1/2 - 9/8 + 9/16 < 0.
        let a = DenseMatrix::from_fn(2, |i, j| if i == j { q(3, 4) } else { q(1, 1) }).unwrap();
        let c = numeric_decomposition_check(2, &q(9, 4), &a, CAP).unwrap();
        assert!(!c.termwise_ok);
        assert!(!c.passed());
        let c_ok = numeric_decomposition_check(2, &q(2, 1), &a, CAP).unwrap();
        assert!(c_ok.termwise_ok);
        assert!(c_ok.passed());
    }
}
