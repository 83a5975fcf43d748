//! Arithmetic in Carlitz cyclotomic function fields.
//!
//! The crate builds, checks, and evaluates the objects that connect Coleman
//! functions on cyclotomic curves to Anderson Hecke characters, Sinha
//! t-modules, and special values of Goss L-series: exact arithmetic in
//! K = k(zeta_f), certified series arithmetic at the infinite place, and the
//! Euler products that tie them together.

pub mod cyclotomic;
pub mod error;
pub mod estar;
pub mod factor;
pub mod field;
pub mod fq;
pub mod infinite;
pub mod laurent;
pub mod poly;

pub use error::{Error, Result};
