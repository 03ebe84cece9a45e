//! Exact construction of planar point sets with many unit distances from CM
//! number fields.

pub mod arith;
pub mod construct;
pub mod error;
pub mod gscalc;
pub mod ideals;
pub mod numberfield;
pub mod unitdist;

pub use error::{Error, ErrorFamily, Result};
