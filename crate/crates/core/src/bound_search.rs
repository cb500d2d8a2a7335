//! Brackets `a*(n) = sup{a > 0 : p_a ∈ P_n}` between a certified lower end
//! and a witnessed upper end.
//!
//! `a_lo` only moves on certificates. `a_hi` only moves on exact
//! witnesses. A search that finds nothing raises an empirical probe floor
//! so bisection keeps making progress, but never touches `a_lo`.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinat::{nu_table, path_count};
use crate::construct::{bound_table, make_f_a, make_p_a, unit_weights, SurdFamily};
use crate::error::{invalid, Error, Result};
use crate::falsify::{diagonal_cycle_witness, search_witness, verify_witness, SearchConfig, WitnessMethod, WitnessReport};
use crate::matrix::DenseMatrix;
use crate::poly::Polynomial;
use crate::scalar::{approximate, format_rational, rational_from_ratio, serde_rational, sqrt_floor, Rational, Scalar};

/// Something whose nonnegativity on a given rational matrix can be decided exactly.
pub trait ExactProbe: Sync {
    /// 1-based location of the first negative entry of the image of `a`.
    fn first_negative_entry(&self, a: &DenseMatrix<Rational>) -> Result<Option<(usize, usize)>>;

    /// Turns a failing matrix into a rational witness report.
    fn witness(&self, a: &DenseMatrix<Rational>) -> Result<Option<WitnessReport>>;
}

impl ExactProbe for Polynomial<Rational> {
    fn first_negative_entry(&self, a: &DenseMatrix<Rational>) -> Result<Option<(usize, usize)>> {
        a.ensure_nonnegative()?;
        Ok(self.eval_matrix(a).first_negative())
    }

    fn witness(&self, a: &DenseMatrix<Rational>) -> Result<Option<WitnessReport>> {
        verify_witness(self, a, WitnessMethod::Sample)
    }
}

impl ExactProbe for SurdFamily {
    fn first_negative_entry(&self, a: &DenseMatrix<Rational>) -> Result<Option<(usize, usize)>> {
        SurdFamily::first_negative_entry(self, a)
    }

    /// Entry `Q - √a_sq · B < 0` also fails for any rational `a' ≤ √a_sq`
    /// with `a' B > Q`; such an `a'` gives a fully rational witness.
    fn witness(&self, a: &DenseMatrix<Rational>) -> Result<Option<WitnessReport>> {
        let Some((r, c)) = self.first_negative_entry(a)? else {
            return Ok(None);
        };
        let (q, b) = self.split(a);
        let (q, b) = (q.get(r - 1, c - 1), b.get(r - 1, c - 1));
        let mut den = 1u64 << 10;
        for _ in 0..5 {
            let lower = sqrt_floor(self.a_sq(), den);
            if lower.is_positive() && &lower * b > *q {
                let poly = make_f_a(self.weights(), &lower)?;
                return verify_witness(&poly, a, WitnessMethod::Sample);
            }
            den = den.saturating_mul(1 << 10);
        }
        Ok(None)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleReport {
    pub trials: usize,
    pub passes: usize,
    /// First failing trial (by index), converted into an exact witness.
    pub witness: Option<WitnessReport>,
}

/// Random nonnegative rational matrix with entries `k/16 · 2^scale_exp`,
/// `k ∈ 1..=64`, and roughly 30% zeros.
pub fn random_nonnegative_matrix(rng: &mut impl Rng, n: usize, scale_exp: i32) -> DenseMatrix<Rational> {
    let scale = if scale_exp >= 0 {
        rational_from_ratio(1 << scale_exp, 1)
    } else {
        rational_from_ratio(1, 1 << (-scale_exp))
    };
    DenseMatrix::from_fn(n, |_, _| {
        if rng.random_bool(0.3) {
            Rational::zero()
        } else {
            rational_from_ratio(rng.random_range(1..=64), 16) * &scale
        }
    })
    .expect("n > 0")
}

/// The matrix for trial `index`: its own RNG stream and a scale exponent
/// cycling through `-4..=4`.
pub fn sample_matrix(n: usize, seed: u64, index: usize) -> DenseMatrix<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    random_nonnegative_matrix(&mut rng, n, (index % 9) as i32 - 4)
}

/// Evaluates `probe` on `trials` random nonnegative rational matrices of
/// order `n`. Passing samples are evidence, never proof.
pub fn membership_sample(probe: &impl ExactProbe, n: usize, trials: usize, seed: u64) -> Result<SampleReport> {
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    let outcomes: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|i| probe.first_negative_entry(&sample_matrix(n, seed, i)).map(|neg| neg.is_none()))
        .collect::<Result<_>>()?;
    let passes = outcomes.iter().filter(|&&ok| ok).count();
    let witness = match outcomes.iter().position(|&ok| !ok) {
        Some(i) => probe.witness(&sample_matrix(n, seed, i))?,
        None => None,
    };
    Ok(SampleReport { trials, passes, witness })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BracketConfig {
    pub search: SearchConfig,
    pub max_steps: usize,
    #[serde(with = "serde_rational")]
    pub tolerance: Rational,
    /// Denominator cap for bisection candidates.
    pub candidate_max_den: u64,
    /// `a_lo` is the largest multiple of `1/lo_denominator` within the cap.
    pub lo_denominator: u64,
    /// ν is only computed when `n^{n-1}` stays within this.
    pub nu_cap: u128,
}

impl Default for BracketConfig {
    fn default() -> Self {
        Self {
            search: SearchConfig::default(),
            max_steps: 32,
            tolerance: rational_from_ratio(1, 1000),
            candidate_max_den: 10_000,
            lo_denominator: 1_000_000,
            nu_cap: 10_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepOutcome {
    Witness,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BisectionStep {
    #[serde(with = "serde_rational")]
    pub candidate: Rational,
    pub outcome: StepOutcome,
    #[serde(with = "serde_rational")]
    pub a_hi: Rational,
    #[serde(with = "serde_rational")]
    pub probe_lo: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundEstimate {
    pub n: usize,
    #[serde(with = "serde_rational")]
    pub a_lo: Rational,
    #[serde(with = "serde_rational")]
    pub a_hi: Rational,
    #[serde(with = "serde_rational")]
    pub gap: Rational,
    pub lo_provenance: String,
    pub hi_provenance: String,
    pub witness: Option<WitnessReport>,
    /// Certified cap on `a²` behind `a_lo`.
    #[serde(with = "serde_rational")]
    pub lo_cap_sq: Rational,
    /// Largest candidate where the search found nothing. Not a certificate.
    #[serde(with = "serde_rational")]
    pub probe_lo: Rational,
    pub steps: Vec<BisectionStep>,
}

impl BoundEstimate {
    /// Re-derives the stored claims: `a_lo² ≤ cap`, `a_lo ≤ a_hi`, and the
    /// witness is an exact counterexample for `p_{a_hi}` at order `n`.
    pub fn recheck(&self) -> bool {
        let witness_ok = match &self.witness {
            Some(w) => w.m == self.n && make_p_a(self.n, &self.a_hi).ok().as_ref() == Some(&w.poly) && w.recheck(),
            None => false,
        };
        &self.a_lo * &self.a_lo <= self.lo_cap_sq && self.a_lo <= self.a_hi && self.gap == &self.a_hi - &self.a_lo && witness_ok
    }
}

/// Certified cap on `a²` for `p_a` at order `n`: the ν-sharpened cap when
/// `n^{n-1}` is within `nu_cap`, the μ cap otherwise.
pub fn certified_cap(n: usize, nu_cap: u128) -> Result<(Rational, String)> {
    let weights = unit_weights(n);
    let feasible = path_count(n, n).is_some_and(|c| c <= nu_cap);
    if feasible {
        let nu = nu_table(n, nu_cap)?;
        let table = bound_table(&weights, Some(&nu))?;
        let cap = table.best_cap().clone();
        let nu_text: Vec<String> = nu.iter().map(u128::to_string).collect();
        return Ok((cap.clone(), format!("certificate with exact nu = [{}]: a^2 <= {}", nu_text.join(", "), format_rational(&cap))));
    }
    let table = bound_table(&weights, None)?;
    let cap = table.safe_a_sq;
    Ok((cap.clone(), format!("certificate with mu bound: a^2 <= {}", format_rational(&cap))))
}

pub fn bracket_optimal_a(n: usize, config: &BracketConfig) -> Result<BoundEstimate> {
    if n < 2 {
        return Err(invalid(format!("n must be at least 2, got {n}")));
    }
    if !config.tolerance.is_positive() {
        return Err(invalid("tolerance must be positive"));
    }
    let (lo_cap_sq, lo_provenance) = certified_cap(n, config.nu_cap)?;
    let a_lo = sqrt_floor(&lo_cap_sq, config.lo_denominator);

    let start = Rational::from_int(n as i64 + 1);
    let mut witness = diagonal_cycle_witness(n, &start)?
        .ok_or_else(|| Error::Internal(format!("n-cycle does not witness a = {start}")))?;
    let mut a_hi = start.clone();
    let mut probe_lo = a_lo.clone();
    let mut steps = Vec::new();
    let mut found = 0usize;

    while steps.len() < config.max_steps && &a_hi - &probe_lo > config.tolerance {
        let mid = (&probe_lo + &a_hi) / Rational::from_int(2);
        let mut candidate = approximate(&mid, config.candidate_max_den);
        if candidate <= probe_lo || candidate >= a_hi {
            candidate = mid;
        }
        let poly = make_p_a(n, &candidate)?;
        let search = SearchConfig { seed: config.search.seed.wrapping_add(steps.len() as u64), ..config.search.clone() };
        let structured = diagonal_cycle_witness(n, &candidate)?;
        let found_witness = match structured {
            Some(w) => Some(w),
            None => search_witness(&poly, n, &search)?,
        };
        let outcome = match found_witness {
            Some(w) => {
                witness = w;
                a_hi = candidate.clone();
                found += 1;
                StepOutcome::Witness
            }
            None => {
                probe_lo = candidate.clone();
                StepOutcome::Inconclusive
            }
        };
        steps.push(BisectionStep { candidate, outcome, a_hi: a_hi.clone(), probe_lo: probe_lo.clone() });
    }

    let finish = if &a_hi - &probe_lo <= config.tolerance { "converged" } else { "budget exhausted" };
    let hi_provenance = format!(
        "n-cycle witness at a = {}; {} of {} bisection steps found witnesses ({finish})",
        format_rational(&start),
        found,
        steps.len()
    );
    Ok(BoundEstimate {
        n,
        gap: &a_hi - &a_lo,
        a_lo,
        a_hi,
        lo_provenance,
        hi_provenance,
        witness: Some(witness),
        lo_cap_sq,
        probe_lo,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::safe_a_squared_unit;
    use crate::scalar::rational_from_ratio as q;

    #[test]
    fn nonnegative_coefficients_always_pass() {
        let p = Polynomial::new(vec![q(1, 1), q(2, 1), q(0, 1), q(1, 3)]).unwrap();
        let r = membership_sample(&p, 3, 50, 1).unwrap();
        assert_eq!((r.passes, r.witness), (50, None));
    }

    #[test]
    fn x_squared_minus_one_fails_at_order_one() {
        let p = Polynomial::new(vec![q(-1, 1), q(0, 1), q(1, 1)]).unwrap();
        let r = membership_sample(&p, 1, 20, 3).unwrap();
        assert!(r.passes < 20);
        assert!(r.witness.unwrap().recheck());
    }

    #[test]
    fn surd_probe_passes_at_cap_and_yields_rational_witness_beyond() {
        let at_cap = SurdFamily::p_a(2, safe_a_squared_unit(2).unwrap()).unwrap();
        assert_eq!(membership_sample(&at_cap, 2, 60, 5).unwrap().passes, 60);

        let swap = DenseMatrix::<Rational>::cyclic_shift(2).unwrap();
        let beyond = SurdFamily::p_a(2, q(5, 1)).unwrap();
        let w = ExactProbe::witness(&beyond, &swap).unwrap().unwrap();
        assert!(w.recheck());
        assert!(w.poly.coeffs()[2] > q(-3, 1));
    }

    #[test]
    fn sampling_is_reproducible() {
        assert_eq!(sample_matrix(3, 9, 4), sample_matrix(3, 9, 4));
        assert_ne!(sample_matrix(3, 9, 4), sample_matrix(3, 9, 5));
    }

    #[test]
    fn certified_cap_uses_nu_when_feasible() {
        let (cap, prov) = certified_cap(3, 1000).unwrap();
        assert_eq!(cap, q(4, 3));
        assert!(prov.contains("nu"));
        let (cap, _) = certified_cap(3, 1).unwrap();
        assert_eq!(cap, q(1, 1));
    }

    #[test]
    fn bracket_small_budget() {
        let cfg = BracketConfig {
            max_steps: 3,
            search: SearchConfig { starts: 8, iterations: 30, ..SearchConfig::default() },
            ..BracketConfig::default()
        };
        let est = bracket_optimal_a(2, &cfg).unwrap();
        assert!(est.recheck());
        assert!(est.a_lo <= est.a_hi);
        assert_eq!(est.lo_cap_sq, q(2, 1));
        let mut prev_hi = q(3, 1);
        let mut prev_lo = est.a_lo.clone();
        for s in &est.steps {
            assert!(s.a_hi <= prev_hi && s.probe_lo >= prev_lo);
            prev_hi = s.a_hi.clone();
            prev_lo = s.probe_lo.clone();
        }
        assert!(bracket_optimal_a(1, &cfg).is_err());
    }
}
