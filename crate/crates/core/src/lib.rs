//! Exact fractional-polynomial families, their precedence order, and
//! multiple ergodic averages of fractional polynomial flows on tori.

pub mod averages;
pub mod error;
pub mod exec;
pub mod fpoly;
pub mod interval;
pub mod linalg;
pub mod order;
pub mod quadrature;
pub mod rational;
pub mod torus;

pub use error::{Error, Result};
pub use exec::Exec;
