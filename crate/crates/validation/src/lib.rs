//! Acceptance suite for `rbfsmooth-core`; the checks live in
//! `tests/acceptance.rs` and run with `cargo test -p rbfsmooth-validation`.
