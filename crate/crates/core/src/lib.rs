//! Simulation and analysis of quantum query algorithms over `±1`-valued
//! oracles.
//!
//! The crate is organized bottom-up:
//!
//! - [`oracle`]: functions `{1..N} -> {-1,+1}`, candidate families, characters.
//! - [`simulator`]: state-vector execution of `k`-query algorithms in the
//!   bit-flip and phase pictures, projective measurement, success matrices.
//! - [`poly`]: amplitudes as multilinear polynomials in `F(1), .., F(N)`,
//!   Parseval, and the equal-coefficient lower bound on `sum_F |Q(F)|^2`.
//! - [`bounds`]: exact counting bounds `D p <= M(N, k)` and the sorting
//!   corollary.
//! - [`reference`]: constructions that meet the bound with equality.
//! - [`optimizer`]: numerical search for the best worst-case success.
//! - [`cli`]: the `qql` command-line front end.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod optimizer;
pub mod oracle;
pub mod poly;
pub mod random;
pub mod reference;
pub mod report;
pub mod simulator;

pub use error::{Error, Result};
