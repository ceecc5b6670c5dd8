// `!(x > 0.0)` is used on purpose so NaN lands on the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod cli;
pub mod error;
pub mod hamiltonian;
pub mod linalg;
pub mod optimize;
pub mod signaling;
pub mod states;

pub use error::{Error, Result};
