//! Closed-form bound states, normalization constants and Crum-Darboux chains
//! of the deformed Hulthén potential `-v e^{-r} / (1 - q e^{-r})` on
//! `[ln q, ∞)`, together with independent numerical oracles.

pub mod darboux;
pub mod error;
pub mod exppoly;
pub mod hulthen;
pub mod identities;
pub mod oracle;
mod poly;
pub mod scalar;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
pub use exppoly::{ExpPoly, ExpPolyJson, Term};
pub use scalar::{Rational, Scalar};
