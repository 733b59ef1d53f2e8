//! Approximate greatest common right divisors of differential polynomials.
//!
//! Operators live in `R[t][D]` with `D t = t D + 1`. The numeric pipeline
//! builds the differential Sylvester matrix of a pair, inflates it to a real
//! block-Toeplitz matrix, reads the GCRD degree off its singular values and
//! recovers a divisor from a structured left null vector. An exact rational
//! Euclidean GCRD is provided as a reference.

pub mod bench;
pub mod error;
pub mod fft;
pub mod gcrd;
pub mod nearest;
pub mod ore;
pub mod parse;
pub mod poly;
pub mod rank;
pub mod scalar;
pub mod svd;
pub mod sylvester;

pub use error::{Error, Result};
pub use gcrd::{numeric_gcrd, ContentRemoval, GcrdOptions, GcrdOutcome, OutcomeKind};
pub use nearest::{nearest_with_gcrd, ReconstructionMode};
pub use ore::DiffPoly;
pub use poly::Poly;
pub use rank::{deflated_rank, RankReport};
pub use scalar::Scalar;
pub use sylvester::{build_sylvester, inflate, InflatedMatrix, SylvesterMatrix};
