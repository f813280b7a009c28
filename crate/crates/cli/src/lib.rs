//! Library surface of the `cdf` binary, exposed for integration tests.

pub mod commands;
pub mod openml;
