//! Construction, verification, numerical solving and classification of
//! solutions (g, f) of
//!
//! ```text
//! g(x σ(y)) = g(x) g(y) − f(x) f(y) + α f(x σ(y))
//! ```
//!
//! on semigroups with an involutive automorphism σ.

pub mod analysis;
pub mod cyclotomic;
pub mod error;
pub mod families;
pub mod field;
pub mod functions;
pub mod io;
pub mod linalg;
pub mod scalar;
pub mod semigroup;
pub mod solver;
pub mod suite;
mod transcendental;

pub use error::{Error, Result};
