//! Decide whether a squared centered Gaussian vector is infinitely divisible,
//! certify when its covariance is (up to a diagonal scaling and a signature)
//! the Green function of a transient Markov chain, build that chain, and
//! check the certificates against Monte-Carlo estimates.
//!
//! ```
//! use idgauss::{criteria, green, zoo, Tolerances};
//!
//! let grid = zoo::GridSpec1D::new(vec![1.0, 2.0, 3.0]).unwrap();
//! let g = zoo::brownian_cov(&grid).unwrap();
//! let tol = Tolerances::default();
//! assert_eq!(criteria::classify_green(&g, &tol).unwrap().label(), "green");
//!
//! let dec = green::decompose(&g, &tol).unwrap();
//! assert!(dec.reconstruction_error < 1e-12);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod criteria;
pub mod error;
pub mod green;
pub mod matrix;
pub mod oracle;
pub mod sweep;
pub mod zoo;

pub use error::{DecomposeError, LinalgError, SimError, ZooError};
pub use matrix::{Matrix, Tolerances};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
