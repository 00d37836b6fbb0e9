#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bessel;
pub mod error;
pub mod green;
pub mod impermeable;
pub mod grid;
pub mod inflow;
pub mod limit_profile;
pub mod model;
pub mod operator;
pub mod oracle;
mod quadrature;
pub mod rate_study;
pub mod stats;

pub use error::{Error, Result};
