// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

// Links the system LAPACK that `linalg` calls into.
extern crate lapack_src;

pub mod cli;
pub mod correlation;
pub mod error;
pub mod fermion;
pub mod linalg;
pub mod meanfield;
pub mod model;
pub mod oracle;
pub mod phases;
pub mod validation;

pub use error::{Error, Result};
