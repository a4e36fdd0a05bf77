//! Radial grids, sampled profiles and the radial Fourier transform.

mod grid;
pub mod io;
mod profile;
mod transform;

pub use grid::RadialGrid;
pub use profile::{RadialProfile, DECAY_TOLERANCE, SUPPORT_FRACTION};
pub use transform::{
    forward_transform, integrate_weighted, inverse_transform, lp_norm, radial_derivative,
    SpectralProfile,
};
