//! Positive-order basis-function interpolation and smoothing of scattered data.
//!
//! The crate covers total-degree polynomial frames and unisolvency, closed-form
//! radial basis functions, the minimal-seminorm interpolant, the Exact
//! smoother, the grid-based Approximate smoother whose linear system does not
//! grow with the number of data points, and a small study harness for
//! measuring convergence orders and data densities.
//!
//! It is `no_std` (with `alloc`); file formats and the command line live in
//! the companion `rbfsmooth` crate.
#![cfg_attr(not(any(feature = "std", test)), no_std)]
// index loops mirror the matrix formulas; negated comparisons reject NaN
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod approx;
pub mod assembly;
pub mod error;
pub mod exact;
pub mod kernels;
pub mod linalg;
pub mod model;
pub mod points;
pub mod polyspace;
pub mod random;
pub mod study;

pub use error::{Error, Result};
pub use kernels::{KernelFamily, KernelSpec, OrderPrediction};
pub use model::{FittedModel, ModelKind};
pub use points::Points;
pub use polyspace::{MultiIndex, PolyFrame, UnisolventFrame};
