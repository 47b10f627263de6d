//! Fusion frames, operator-valued frames, fusion frame duality and
//! `(m, R)`-Bessel fusion multipliers on `C^n`.

pub mod duality;
pub mod error;
pub mod frames;
pub mod fusion;
pub mod instance;
pub mod multipliers;
pub mod numerics;
pub mod ovf;
pub mod suite;

pub use error::{Error, Result};
