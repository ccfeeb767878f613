//! CUR and Nyström low-rank approximation under volume sampling.
//!
//! The crate provides
//!
//! * dense linear-algebra kernels ([`linalg`]) and subset combinatorics
//!   ([`subsets`]),
//! * compound matrices and elementary symmetric polynomials of squared
//!   singular values ([`compound`]),
//! * the bordered-Gramian determinant identities ([`bordered`]) and the
//!   deterministic local error bounds built on them ([`local_bounds`]),
//! * CUR factors, the block error decomposition and the Nyström special
//!   case ([`cur`]),
//! * the volume-sampling distribution over `(I, J)` pairs, exact samplers,
//!   exact and Monte-Carlo expected errors, and the closed-form bounds they
//!   are compared against ([`volume_sampling`]),
//! * seeded generators and text formats used by the command-line tool
//!   ([`generate`], [`io`]), and the randomized identity suite ([`suite`]).

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bordered;
pub mod compound;
pub mod cur;
pub mod error;
pub mod generate;
pub mod io;
pub mod linalg;
pub mod local_bounds;
pub mod subsets;
pub mod suite;
pub mod volume_sampling;

pub use error::{Error, Result};
pub use linalg::{Matrix, SvdResult};
pub use subsets::IndexSet;
