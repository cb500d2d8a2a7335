//! Polynomials that map entrywise-nonnegative matrices to entrywise-nonnegative
//! matrices.
//!
//! The crate builds the polynomial family
//! `p_a(x) = 1 + x + … + x^{n-1} - a x^n + x^{n+1} + … + x^{2n}`, certifies
//! `p_a ∈ P_n` by exhaustively checking the path-monomial decomposition of
//! `p_a(A)`, exhibits exact witness matrices showing `p_a ∉ P_{n+1}`, and
//! brackets the largest admissible `a`.

pub mod bound_search;
pub mod combinat;
pub mod construct;
pub mod error;
pub mod falsify;
pub mod matrix;
pub mod niep;
pub mod poly;
pub mod scalar;

pub use bound_search::{bracket_optimal_a, membership_sample, BoundEstimate, BracketConfig, ExactProbe, SampleReport};
pub use combinat::{
    build_certificate, enumerate_monomials, exact_nu, numeric_decomposition_check, nu_table, partition_stats,
    CertificateReport, CycleLocation, PathMonomial, DEFAULT_ENUMERATION_CAP,
};
pub use construct::{bound_table, make_f_a, make_p_a, mu, safe_a_squared, safe_a_squared_unit, BoundTable, SurdFamily};
pub use error::{Error, Result};
pub use falsify::{cycle_witness, search_witness, SearchConfig, WitnessMethod, WitnessReport};
pub use matrix::{mat_mul, mat_pow, min_entry, DenseMatrix};
pub use niep::{jll_check, power_sum, transform_list, JllReport, SpectrumList};
pub use poly::{poly_eval_matrix, Polynomial};
pub use scalar::{Rational, Scalar};
