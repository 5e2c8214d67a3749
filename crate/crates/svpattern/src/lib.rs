//! Decide whether a zero-nonzero pattern forces every real matrix realizing
//! it to have all-distinct singular values.
//!
//! The crate provides:
//!
//! - [`pattern`]: the 0/1 [`pattern::Pattern`] type, its text format, and
//!   structural operations (direct sums, superpatterns, permutations);
//! - [`term_rank`]: bipartite matching, term-rank, minimum line covers,
//!   standard form, and alternating paths;
//! - [`structure`]: digraph/bigraph extraction and the combinatorial
//!   recognizers, including rectangular Fiedler graphs;
//! - [`linalg`]: dense SVD/eigendecomposition, rank and nullspace machinery,
//!   and seeded random realizations;
//! - [`ssvp`]: the Strong Singular Value Property as an explicit linear
//!   system, with tangent/normal space bases;
//! - [`witness`]: constructors that produce matrices with prescribed patterns
//!   and a verified multiple singular value;
//! - [`classifier`]: the top-level decision procedure returning a verdict
//!   with a certificate or a witness;
//! - [`cli`]: the command-line front end.

pub mod classifier;
pub mod cli;
pub mod linalg;
pub mod pattern;
pub mod ssvp;
pub mod structure;
pub mod term_rank;
pub mod witness;

pub use classifier::{classify, Classification, Verdict};
pub use linalg::{DenseMatrix, SvdResult, Tolerances};
pub use pattern::{parse_pattern, Pattern, PatternPermutation};
pub use ssvp::{ssvp_check, SsvpReport};
pub use structure::{recognize_fiedler, FiedlerCertificate};
pub use term_rank::{max_matching, term_rank, Matching};
pub use witness::Witness;
