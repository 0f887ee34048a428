//! Numerics on symmetric Siegel domains: Jordan triple calculus, Cayley
//! transforms, Cauchy–Szegő/Poisson/Schwarz kernels, boundary measures of
//! positive pluriharmonic functions and Clark measures.

pub mod clark;
pub mod error;
pub mod geometry;
pub mod jordan;
pub mod kernels;
pub mod measures;
pub mod nevanlinna;
pub mod quadrature;
pub mod pluriharmonic;
pub mod restricted;
pub mod worked;

pub use error::{Error, Result};
pub use jordan::{Element, Kind, Operator, System, C64};
