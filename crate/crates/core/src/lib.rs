//! Finite fields equipped with additive characters: exact character values,
//! symmetric character sums over polynomial roots, exponential sums and the
//! Weil bound, normalized counting measures, Fourier transforms over `F_p^n`,
//! equidistribution sweeps over primes, and lattice bases in number fields.

pub mod arith;
pub mod character;
pub mod dfi;
pub mod error;
pub mod expsum;
pub mod field;
pub mod measure;
pub mod mpoly;
pub mod numfield;
pub mod parse;
pub mod points;
pub mod stats;
pub mod term;
pub mod upoly;

pub use error::{Error, Result};
