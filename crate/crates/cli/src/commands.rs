use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context};
use clap::{Args, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use nnpoly_core::bound_search::{bracket_optimal_a, membership_sample, BracketConfig};
use nnpoly_core::combinat::{build_certificate, enumerate_monomials, nu_table, partition_stats};
use nnpoly_core::construct::{bound_table, mu, unit_weights, SurdFamily};
use nnpoly_core::falsify::{cycle_witness, search_witness, verify_witness, SearchConfig, WitnessMethod};
use nnpoly_core::niep::{jll_check, spectrum_of, transform_list, SpectrumList};
use nnpoly_core::scalar::{format_rational, parse_rational};
use nnpoly_core::{BoundEstimate, BoundTable, CertificateReport, DenseMatrix, Polynomial, Rational, WitnessReport};

const DEFAULT_CAP: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// Exit 0: computation succeeded with a positive verdict.
    Verified,
    /// Exit 2: a falsification or failed check was shown.
    Falsified,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 64)]
    pub starts: usize,
    #[arg(long, default_value_t = 200)]
    pub iterations: usize,
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        SearchConfig { starts: self.starts, iterations: self.iterations, seed: self.seed, ..SearchConfig::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Per-k table of mu, optional exact nu, and certified caps on a^2.
    Bound {
        #[arg(long)]
        n: usize,
        /// Weights d_0,...,d_2n for f_a (default: all ones, i.e. p_a).
        #[arg(long)]
        weights: Option<String>,
        /// Add the exact nu column computed by enumeration.
        #[arg(long)]
        with_nu: bool,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Exhaustively verify the decomposition certifying p_a in P_n.
    Certify {
        #[arg(long)]
        n: usize,
        /// a^2 as an exact rational.
        #[arg(long, conflicts_with = "a")]
        a_sq: Option<String>,
        /// a as an exact rational (squared internally).
        #[arg(long)]
        a: Option<String>,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// List path monomials 1 -> ... -> 2 of length j (default n).
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        j: Option<usize>,
        /// Report |M_{n,k}| by minimal cycle length instead of listing paths.
        #[arg(long)]
        partition: bool,
        /// Maximum number of paths to list.
        #[arg(long, default_value_t = 1000)]
        limit: usize,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Exact maximal psi pre-image sizes nu(n,k).
    Nu {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Search for (or check) a witness matrix showing p is not in P_m.
    Falsify {
        /// Coefficients, constant term first.
        #[arg(long)]
        coeffs: String,
        #[arg(long)]
        m: usize,
        /// Check this matrix (CSV) instead of searching.
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[command(flatten)]
        #[serde(flatten)]
        search: SearchArgs,
    },
    /// The cyclic-shift witness showing p_a is not in P_{n+1}.
    WitnessCycle {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        a: String,
        #[arg(long, default_value = "1")]
        t: String,
    },
    /// Bracket the largest admissible a for p_a in P_n.
    SearchA {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 32)]
        steps: usize,
        #[arg(long, default_value = "1/1000")]
        tolerance: String,
        #[command(flatten)]
        #[serde(flatten)]
        search: SearchArgs,
    },
    /// Power-sum and JLL necessary conditions for a spectrum.
    Jll {
        /// Comma-separated entries like "1,i,-i" or "2,1+0.5i,1-0.5i".
        #[arg(long, required_unless_present = "matrix")]
        spectrum: Option<String>,
        /// Use the eigenvalues of this CSV matrix.
        #[arg(long, conflicts_with = "spectrum")]
        matrix: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        k_max: u32,
        #[arg(long, default_value_t = 4)]
        m_max: u32,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Apply a polynomial elementwise to a spectrum.
    Transform {
        #[arg(long)]
        coeffs: String,
        #[arg(long)]
        spectrum: String,
    },
    /// Sample random nonnegative rational matrices (evidence only, never proof).
    Sample {
        /// Coefficients, constant term first.
        #[arg(long, required_unless_present = "a_sq")]
        coeffs: Option<String>,
        /// Sample p_a with a = sqrt(a_sq) exactly, using --n.
        #[arg(long, requires = "n", conflicts_with = "coeffs")]
        a_sq: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        /// Matrix order (defaults to --n).
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Re-run a saved JSON report from its embedded config and re-verify it.
    Recheck {
        #[arg(long)]
        input: PathBuf,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Bound { .. } => "bound",
            Command::Certify { .. } => "certify",
            Command::Enumerate { .. } => "enumerate",
            Command::Nu { .. } => "nu",
            Command::Falsify { .. } => "falsify",
            Command::WitnessCycle { .. } => "witness-cycle",
            Command::SearchA { .. } => "search-a",
            Command::Jll { .. } => "jll",
            Command::Transform { .. } => "transform",
            Command::Sample { .. } => "sample",
            Command::Recheck { .. } => "recheck",
        }
    }
}

pub struct Outcome {
    pub report: Value,
    pub human: String,
    pub csv: Option<String>,
    pub status: Status,
}

impl Outcome {
    fn new(report: impl Serialize, human: String, status: Status) -> anyhow::Result<Self> {
        Ok(Self { report: serde_json::to_value(report)?, human, csv: None, status })
    }

    fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    pub fn envelope(&self, command: &Command) -> anyhow::Result<Value> {
        Ok(json!({ "config": command, "report": self.report }))
    }
}

fn rational(text: &str, what: &str) -> anyhow::Result<Rational> {
    parse_rational(text).with_context(|| format!("--{what} must be an exact rational like 3/2, 2 or 0.25"))
}

fn polynomial(text: &str) -> anyhow::Result<Polynomial<Rational>> {
    Polynomial::parse(text).context("--coeffs must be comma-separated rationals, constant term first")
}

fn read_matrix(path: &Path) -> anyhow::Result<DenseMatrix<Rational>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    DenseMatrix::parse_csv(&text).with_context(|| format!("parsing matrix CSV {}", path.display()))
}

fn witness_human(w: &WitnessReport) -> String {
    format!(
        "p = [{}] is not in P_{}: entry ({}, {}) of p(A) is {} for\n{}",
        w.poly,
        w.m,
        w.entry.0,
        w.entry.1,
        format_rational(&w.value),
        w.matrix
    )
}

pub fn execute(command: &Command) -> anyhow::Result<Outcome> {
    match command {
        Command::Bound { n, weights, with_nu, cap } => {
            let d = match weights {
                Some(w) => Polynomial::<Rational>::parse(w).context("--weights must be comma-separated rationals")?.coeffs().to_vec(),
                None => unit_weights(*n),
            };
            ensure!(d.len() == 2 * n + 1, "--weights needs 2n+1 = {} entries, got {}", 2 * n + 1, d.len());
            let nu = if *with_nu { Some(nu_table(*n, *cap as u128)?) } else { None };
            let table = bound_table(&d, nu.as_deref())?;
            let mut human = format!("n = {n}\n  k        mu        nu   cap on a^2\n");
            for r in &table.rows {
                let nu = r.nu.map_or("-".to_string(), |v| v.to_string());
                human.push_str(&format!("{:>3} {:>9} {:>9}   {}\n", r.k, r.mu, nu, format_rational(&r.cap_sq)));
            }
            human.push_str(&format!("safe a^2 <= {}\n", format_rational(&table.safe_a_sq)));
            if let Some(s) = &table.nu_safe_a_sq {
                human.push_str(&format!("nu-sharpened a^2 <= {}\n", format_rational(s)));
            }
            Outcome::new(&table, human, Status::Verified)
        }
        Command::Certify { n, a_sq, a, cap } => {
            let a_sq = match (a_sq, a) {
                (Some(s), _) => rational(s, "a-sq")?,
                (None, Some(a)) => {
                    let a = rational(a, "a")?;
                    &a * &a
                }
                (None, None) => bail!("certify needs --a-sq or --a"),
            };
            let report = build_certificate(*n, &a_sq, *cap as u128)?;
            let mut human = format!("n = {n}, a^2 = {}\n  k     |M_nk|  phi 1-1    nu    mu\n", format_rational(&a_sq));
            for r in &report.per_k {
                human.push_str(&format!("{:>3} {:>10} {:>8} {:>5} {:>5}\n", r.k, r.count, r.phi_injective, r.nu, r.mu));
            }
            human.push_str(if report.verdict { "verdict: certified\n" } else { "verdict: not certified\n" });
            let status = if report.verdict { Status::Verified } else { Status::Falsified };
            Outcome::new(&report, human, status)
        }
        Command::Enumerate { n, j, partition, limit, cap } => {
            let cap = *cap as u128;
            if *partition {
                let stats = partition_stats(*n, cap)?;
                let rows: Vec<Value> = stats.iter().map(|(k, c)| json!({ "k": k, "count": c })).collect();
                let total: u128 = stats.iter().map(|s| s.1).sum();
                let human = stats.iter().map(|(k, c)| format!("k = {k}: {c}\n")).collect::<String>() + &format!("total: {total}\n");
                let csv = "k,count\n".to_string() + &stats.iter().map(|(k, c)| format!("{k},{c}\n")).collect::<String>();
                return Ok(Outcome::new(json!({ "n": n, "total": total, "partition": rows }), human, Status::Verified)?.with_csv(csv));
            }
            let j = j.unwrap_or(*n);
            let total = nnpoly_core::combinat::path_count(*n, j).unwrap_or(u128::MAX);
            let paths: Vec<String> = enumerate_monomials(*n, j, cap)?
                .take(*limit)
                .map(|m| m.vertices().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
                .collect();
            let human = paths.iter().map(|p| format!("{}\n", p.replace(',', " -> "))).collect::<String>()
                + &format!("{} of {total} paths shown\n", paths.len());
            let csv = paths.iter().map(|p| format!("{p}\n")).collect::<String>();
            Ok(Outcome::new(json!({ "n": n, "j": j, "total": total, "paths": paths }), human, Status::Verified)?.with_csv(csv))
        }
        Command::Nu { n, k, cap } => {
            let nu = nu_table(*n, *cap as u128)?;
            let ks: Vec<usize> = match k {
                Some(k) => {
                    ensure!(*k >= 1 && *k < *n, "--k must lie in 1..={}", n - 1);
                    vec![*k]
                }
                None => (1..*n).collect(),
            };
            let rows = ks.iter().map(|&k| Ok(json!({ "k": k, "nu": nu[k - 1], "mu": mu(*n, k)? }))).collect::<anyhow::Result<Vec<_>>>()?;
            let human = ks
                .iter()
                .map(|&k| format!("nu({n},{k}) = {} <= mu = {}\n", nu[k - 1], mu(*n, k).unwrap_or(0)))
                .collect::<String>();
            let csv = "k,nu,mu\n".to_string()
                + &ks.iter().map(|&k| format!("{k},{},{}\n", nu[k - 1], mu(*n, k).unwrap_or(0))).collect::<String>();
            Ok(Outcome::new(json!({ "n": n, "rows": rows }), human, Status::Verified)?.with_csv(csv))
        }
        Command::Falsify { coeffs, m, matrix, search } => {
            let p = polynomial(coeffs)?;
            let witness = match matrix {
                Some(path) => {
                    let a = read_matrix(path)?;
                    ensure!(a.order() == *m, "matrix has order {}, expected --m {m}", a.order());
                    verify_witness(&p, &a, WitnessMethod::Supplied)?
                }
                None => search_witness(&p, *m, &search.config())?,
            };
            let (human, status, csv) = match &witness {
                Some(w) => (witness_human(w), Status::Falsified, Some(w.matrix.to_csv())),
                None => (format!("no witness found at order {m} (inconclusive: this does not prove membership)\n"), Status::Verified, None),
            };
            let report = json!({ "poly": p, "m": m, "conclusive": witness.is_some(), "witness": witness });
            let mut out = Outcome::new(report, human, status)?;
            out.csv = csv;
            Ok(out)
        }
        Command::WitnessCycle { n, a, t } => {
            let w = cycle_witness(*n, &rational(a, "a")?, &rational(t, "t")?)?;
            let csv = w.matrix.to_csv();
            Ok(Outcome::new(&w, witness_human(&w), Status::Falsified)?.with_csv(csv))
        }
        Command::SearchA { n, steps, tolerance, search } => {
            let config = BracketConfig {
                search: search.config(),
                max_steps: *steps,
                tolerance: rational(tolerance, "tolerance")?,
                ..BracketConfig::default()
            };
            let est = bracket_optimal_a(*n, &config)?;
            let human = format!(
                "n = {n}\na_lo = {} (~{:.6}): {}\na_hi = {} (~{:.6}): {}\nsearch found nothing up to {} (not a certificate)\n",
                format_rational(&est.a_lo),
                nnpoly_core::Scalar::to_f64(&est.a_lo),
                est.lo_provenance,
                format_rational(&est.a_hi),
                nnpoly_core::Scalar::to_f64(&est.a_hi),
                est.hi_provenance,
                format_rational(&est.probe_lo),
            );
            Outcome::new(&est, human, Status::Verified)
        }
        Command::Jll { spectrum, matrix, k_max, m_max, tol } => {
            let list = match (spectrum, matrix) {
                (Some(s), _) => SpectrumList::parse(s)?,
                (None, Some(path)) => spectrum_of(&read_matrix(path)?),
                (None, None) => bail!("jll needs --spectrum or --matrix"),
            };
            let report = jll_check(&list, *k_max, *m_max, *tol);
            let failed: Vec<String> = report.rows.iter().filter(|r| !r.holds).map(|r| format!("(k={}, m={})", r.k, r.m)).collect();
            let human = if report.all_hold {
                format!("spectrum [{list}]: all conditions hold\n")
            } else {
                format!("spectrum [{list}]: fails at {}\n", if failed.is_empty() { "a power-sum condition".into() } else { failed.join(", ") })
            };
            let status = if report.all_hold { Status::Verified } else { Status::Falsified };
            let csv = report.to_csv();
            Ok(Outcome::new(json!({ "spectrum": list.to_string(), "jll": report }), human, status)?.with_csv(csv))
        }
        Command::Transform { coeffs, spectrum } => {
            let p = polynomial(coeffs)?;
            let list = SpectrumList::parse(spectrum)?;
            let out = transform_list(&p, &list);
            let csv = format!("{out}\n");
            Ok(Outcome::new(json!({ "input": list.to_string(), "output": out.to_string() }), format!("{out}\n"), Status::Verified)?
                .with_csv(csv))
        }
        Command::Sample { coeffs, a_sq, n, m, trials, seed } => {
            let report = match (coeffs, a_sq) {
                (Some(c), _) => {
                    let order = m.or(*n).context("sample needs --m (or --n)")?;
                    membership_sample(&polynomial(c)?, order, *trials, *seed)?
                }
                (None, Some(s)) => {
                    let n = n.context("--a-sq needs --n")?;
                    let family = SurdFamily::p_a(n, rational(s, "a-sq")?)?;
                    membership_sample(&family, m.unwrap_or(n), *trials, *seed)?
                }
                (None, None) => bail!("sample needs --coeffs or --a-sq"),
            };
            let human = format!("{} of {} samples stayed nonnegative (evidence, not proof)\n", report.passes, report.trials)
                + &report.witness.as_ref().map(witness_human).unwrap_or_default();
            let status = if report.passes == report.trials { Status::Verified } else { Status::Falsified };
            Outcome::new(&report, human, status)
        }
        Command::Recheck { input } => recheck(input),
    }
}

/// Re-runs the embedded config, requires a byte-identical report, and
/// independently re-verifies any witness or certificate it carries.
fn recheck(input: &Path) -> anyhow::Result<Outcome> {
    let text = std::fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let envelope: Value = serde_json::from_str(&text).context("report is not JSON")?;
    let config: Command = serde_json::from_value(envelope["config"].clone()).context("report has no valid config")?;
    ensure!(!matches!(config, Command::Recheck { .. }), "cannot recheck a recheck report");
    let stored = &envelope["report"];
    let fresh = execute(&config)?;
    let reproduced = &fresh.report == stored;

    let reverified = match &config {
        Command::WitnessCycle { .. } => serde_json::from_value::<WitnessReport>(stored.clone())?.recheck(),
        Command::Falsify { .. } => match &stored["witness"] {
            Value::Null => true,
            w => serde_json::from_value::<WitnessReport>(w.clone())?.recheck(),
        },
        Command::Sample { .. } => match &stored["witness"] {
            Value::Null => true,
            w => serde_json::from_value::<WitnessReport>(w.clone())?.recheck(),
        },
        Command::SearchA { .. } => serde_json::from_value::<BoundEstimate>(stored.clone())?.recheck(),
        Command::Certify { .. } => {
            let r: CertificateReport = serde_json::from_value(stored.clone())?;
            r.verdict_from_rows() == r.verdict
        }
        Command::Bound { weights: None, .. } => serde_json::from_value::<BoundTable>(stored.clone())?.recheck_unit(),
        _ => true,
    };
    let ok = reproduced && reverified;
    let human = format!(
        "{}: reproduced = {reproduced}, re-verified = {reverified}\n",
        config.name()
    );
    Outcome::new(
        json!({ "input": input, "command": config.name(), "reproduced": reproduced, "reverified": reverified }),
        human,
        if ok { Status::Verified } else { Status::Falsified },
    )
}
