//! Independent oracles and fixture generators for the clarity test suites.
//!
//! Nothing in here depends on `clarity-core`: every routine is a slow,
//! straight-line recomputation meant to be compared against the real
//! implementation.

pub mod auc;
pub mod connectivity;
pub mod qpp;
pub mod synthetic;
