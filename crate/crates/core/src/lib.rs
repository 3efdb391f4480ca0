//! Coarse-grained and rotating-wave Markovian master equations for a V-type
//! three-level system in an Ohmic bath, with the exact reference dynamics and
//! the optimization of the coarse-graining time.

pub mod analysis;
pub mod bath;
pub mod config;
pub mod dephasing;
pub mod driver;
pub mod error;
pub mod exact3;
pub mod lindblad;
pub mod output;
pub mod quad;
pub mod rates;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
