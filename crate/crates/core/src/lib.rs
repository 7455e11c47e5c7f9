//! Exact construction and verification of k-projective sequences.
//!
//! Scalars live in a cyclotomic field; sequences are lazy, memoized specs;
//! generating functions are truncated power series with explicit order.

pub mod analysis;
pub mod error;
pub mod generators;
pub mod levels;
pub mod limits;
pub mod linalg;
pub mod matrix;
pub mod pade;
pub mod poly;
pub mod scalar;
pub mod seq;
pub mod series;

pub use error::{Error, Result};
pub use levels::{LevelTable, Tail};
pub use linalg::{PolyMatrix, ScalarMatrix};
pub use poly::Poly;
pub use scalar::{Scalar, ScalarError};
pub use series::{TruncatedSeries, Valuation};
