//! Spectral simulation and dimension-estimate toolkit for the
//! Navier–Stokes–Voight system on the periodic square.

pub mod bounds;
pub mod dynamics;
pub mod error;
pub mod harness;
pub mod lab;
pub mod spectral;
pub mod tangent;

pub use error::{Error, Result};
