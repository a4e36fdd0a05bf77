use crate::error::{Error, Result};
use crate::flags::{Flag, Flags};

use super::RadialGrid;

/// Relative size below which a profile counts as vanished.
pub const DECAY_TOLERANCE: f64 = 1e-12;
/// Largest admissible support radius as a fraction of `r_max`.
pub const SUPPORT_FRACTION: f64 = 0.9;

/// Radial function sampled on every node of a [`RadialGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    grid: RadialGrid,
    values: Vec<f64>,
    flags: Flags,
}

impl RadialProfile {
    /// Builds a data profile; rejects profiles that do not decay inside `0.9 * r_max`.
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        let profile = Self::with_tail(grid, values)?;
        if profile.flags.contains(Flag::TailBeyondSupport) {
            return Err(Error::validation(format!(
                "profile does not decay below {DECAY_TOLERANCE:e} of its maximum inside r = {}",
                SUPPORT_FRACTION * grid.r_max()
            )));
        }
        Ok(profile)
    }

    /// Samples `f` on the grid as a data profile.
    pub fn from_fn(grid: RadialGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.nodes().into_iter().map(f).collect())
    }

    /// Builds a profile without enforcing decay; a slow tail is only flagged.
    pub fn with_tail(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::validation(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::validation(format!("non-finite sample at node {i}")));
        }
        Ok(Self::from_parts(grid, values))
    }

    pub(crate) fn from_parts(grid: RadialGrid, values: Vec<f64>) -> Self {
        let mut profile = Self { grid, values, flags: Flags::new() };
        if profile.support_radius() > SUPPORT_FRACTION * grid.r_max() {
            profile.flags.insert(Flag::TailBeyondSupport);
        }
        profile
    }

    pub fn zeros(grid: RadialGrid) -> Self {
        Self { grid, values: vec![0.0; grid.len()], flags: Flags::new() }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn flags(&self) -> &Flags {
        &self.flags
    }

    pub(crate) fn add_flag(&mut self, flag: Flag) {
        self.flags.insert(flag);
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest node radius where `|f|` exceeds the decay tolerance relative to its maximum.
    pub fn support_radius(&self) -> f64 {
        let cut = DECAY_TOLERANCE * self.max_abs();
        self.values
            .iter()
            .rposition(|v| v.abs() > cut)
            .map_or(0.0, |i| self.grid.r(i))
    }

    /// Pointwise map producing a profile on the same grid.
    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| f(self.grid.r(i), v))
            .collect();
        Self::from_parts(self.grid, values)
    }

    /// Pointwise combination with another profile on the same grid.
    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::validation("profiles live on different grids"));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(i, (&a, &b))| f(self.grid.r(i), a, b))
            .collect();
        Ok(Self::from_parts(self.grid, values))
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|_, v| c * v)
    }
}
