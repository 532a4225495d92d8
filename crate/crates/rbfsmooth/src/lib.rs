//! Scattered-data interpolation and smoothing with radial basis functions.
//!
//! This crate re-exports the numerical core ([`rbfsmooth_core`]) and adds
//! the text file formats used by the `rbfsmooth` command-line tool.

pub use rbfsmooth_core::*;

pub mod io;
