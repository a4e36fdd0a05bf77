use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::sphere_area;

/// Uniform radial grid `r_i = i * dr`, `i = 0..=num_points`, for odd dimension `n >= 3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    n: usize,
    r_max: f64,
    num_points: usize,
}

impl RadialGrid {
    pub fn new(n: usize, r_max: f64, num_points: usize) -> Result<Self> {
        if n < 3 || n.is_multiple_of(2) {
            return Err(Error::validation(format!(
                "dimension must be odd and at least 3, got {n}"
            )));
        }
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::validation(format!("r_max must be positive, got {r_max}")));
        }
        if num_points < 8 {
            return Err(Error::validation(format!(
                "num_points must be at least 8, got {num_points}"
            )));
        }
        Ok(Self { n, r_max, num_points })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    /// Number of stored nodes, `num_points + 1`.
    pub fn len(&self) -> usize {
        self.num_points + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dr(&self) -> f64 {
        self.r_max / self.num_points as f64
    }

    pub fn r(&self, i: usize) -> f64 {
        i as f64 * self.dr()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.r(i)).collect()
    }

    pub fn drho(&self) -> f64 {
        PI / self.r_max
    }

    /// Dual frequency `rho_k = k * pi / r_max`.
    pub fn rho(&self, k: usize) -> f64 {
        k as f64 * self.drho()
    }

    pub fn rho_max(&self) -> f64 {
        self.rho(self.num_points)
    }

    pub fn sphere_area(&self) -> f64 {
        sphere_area(self.n)
    }

    /// Trapezoid weight of node `i` (without the spacing factor).
    pub fn trapezoid_weight(&self, i: usize) -> f64 {
        if i == 0 || i == self.num_points {
            0.5
        } else {
            1.0
        }
    }

    /// Same dimension and radius with a different resolution.
    pub fn with_points(&self, num_points: usize) -> Result<Self> {
        Self::new(self.n, self.r_max, num_points)
    }
}

impl Default for RadialGrid {
    fn default() -> Self {
        Self { n: 3, r_max: 64.0, num_points: 4096 }
    }
}
