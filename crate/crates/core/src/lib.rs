//! Finite-state information content of strings and reals.
//!
//! The crate computes how many input symbols a deterministic finite-state
//! transducer needs to print a given string ([`infocontent`]), or to print
//! some string whose base-b value lies strictly within δ of a real number
//! ([`precision`]). Normalizing those costs by the precision and taking the
//! minimum over a family of transducers gives upper-bound estimates of the
//! finite-state dimension of points, sequences and finite sets
//! ([`dimension`]), and, with values read through a separator enumerator
//! instead of plain base-b digits, of the enumerator-relative dimension
//! ([`separator`]).
//!
//! All decisions use exact rational arithmetic; no floating point enters a
//! comparison.

pub mod digits;
pub mod dimension;
pub mod error;
pub mod fst;
pub mod infocontent;
pub mod precision;
pub mod separator;

pub use digits::{Base, DigitStream, RealSpec};
pub use error::{Error, Result};
pub use fst::Fst;
pub use infocontent::{CostResult, Status};
