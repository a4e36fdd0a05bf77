//! Numerical laboratory for radial quasilinear wave equations.
//!
//! The crate is organised bottom-up: radial grids and transforms, spectral
//! calculus, space-time norms, an inequality harness, multiplier identities,
//! a leapfrog wave solver, the Picard iteration, and experiment drivers.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod calculus;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod fd;
pub mod flags;
pub mod inequality;
pub mod iteration;
pub mod multiplier;
pub mod norms;
pub mod radial;
pub mod solver;
pub mod serde_ext;
pub mod special;

pub use error::{Error, Result};
pub use flags::{Flag, Flags};
pub use radial::{RadialGrid, RadialProfile, SpectralProfile};
