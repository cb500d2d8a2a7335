//! Path monomials, minimal cycles, the φ/ψ maps and the exhaustive
//! certificate built on them.

mod certificate;
mod enumerate;
mod path;

pub use certificate::{
    a_sq_within_mu_caps, build_certificate, exact_nu, numeric_decomposition_check, nu_table, partition_stats,
    CertificateReport, CertificateRow, DecompositionCheck,
};
pub use enumerate::{enumerate_monomials, path_count, Monomials, DEFAULT_ENUMERATION_CAP};
pub use path::{CycleLocation, PathMonomial, Vertex};
