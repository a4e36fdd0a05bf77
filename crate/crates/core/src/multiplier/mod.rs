//! Radial Morawetz multipliers `f(r) X`, their sign conditions, and a
//! finite-difference check of the divergence identity they satisfy.

mod identity;
mod sign;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use identity::{identity_ladder, identity_residual, observed_orders, ResidualReport, ResidualWindow};
pub use sign::{sign_condition_report, SignReport};

/// Multiplier family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum MultiplierFamily {
    /// `f = (r / (R + r))^mu`, `0 < mu < 1`.
    Power { mu: f64 },
    /// `f = r / (R + r)`.
    Ratio,
    /// `f = 1`.
    Unit,
}

/// Multiplier profile `f(r)` with scale `R`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplierSpec {
    pub family: MultiplierFamily,
    pub radius: f64,
    pub dim: usize,
}

impl MultiplierSpec {
    pub fn new(family: MultiplierFamily, radius: f64, dim: usize) -> Result<Self> {
        if dim < 3 || dim.is_multiple_of(2) {
            return Err(Error::validation(format!("dimension must be odd and at least 3, got {dim}")));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::validation(format!("radius must be positive, got {radius}")));
        }
        if let MultiplierFamily::Power { mu } = family {
            if !(mu > 0.0 && mu < 1.0) {
                return Err(Error::validation(format!("power exponent must lie in (0, 1), got {mu}")));
            }
        }
        Ok(Self { family, radius, dim })
    }

    pub fn power(mu: f64, radius: f64, dim: usize) -> Result<Self> {
        Self::new(MultiplierFamily::Power { mu }, radius, dim)
    }

    pub fn ratio(radius: f64, dim: usize) -> Result<Self> {
        Self::new(MultiplierFamily::Ratio, radius, dim)
    }

    pub fn unit(dim: usize) -> Result<Self> {
        Self::new(MultiplierFamily::Unit, 1.0, dim)
    }

    /// Exponent of the family; the ratio family is `1`, the unit family `0`.
    pub fn exponent(&self) -> f64 {
        match self.family {
            MultiplierFamily::Power { mu } => mu,
            MultiplierFamily::Ratio => 1.0,
            MultiplierFamily::Unit => 0.0,
        }
    }

    fn x(&self, r: f64) -> f64 {
        self.radius / (self.radius + r)
    }

    pub fn f(&self, r: f64) -> f64 {
        let mu = self.exponent();
        if mu == 0.0 {
            1.0
        } else {
            (r / (self.radius + r)).powf(mu)
        }
    }

    /// `f'(r) = mu R r^(mu-1) / (R + r)^(mu+1)`.
    pub fn df(&self, r: f64) -> f64 {
        let mu = self.exponent();
        if mu == 0.0 {
            return 0.0;
        }
        mu * self.radius * r.powf(mu - 1.0) / (self.radius + r).powf(mu + 1.0)
    }

    /// `f(r) / r`.
    pub fn f_over_r(&self, r: f64) -> f64 {
        self.f(r) / r
    }

    /// `d/dr (f / r) = -(f/r - f') / r`.
    pub fn d_f_over_r(&self, r: f64) -> f64 {
        -self.gap(r) / r
    }

    /// `f/r - f' = r^(mu-1) (R + r)^(-mu) (1 - mu R / (R + r))`, nonnegative.
    pub fn gap(&self, r: f64) -> f64 {
        let mu = self.exponent();
        r.powf(mu - 1.0) / (self.radius + r).powf(mu) * (1.0 - mu * self.x(r))
    }

    /// Closed form of `-Laplacian(f / r)`.
    pub fn neg_laplacian_f_over_r(&self, r: f64) -> f64 {
        let mu = self.exponent();
        let n = self.dim as f64;
        let big_r = self.radius;
        let x = self.x(r);
        r.powf(mu - 3.0) / (big_r + r).powf(mu) * (n - 3.0 + mu * x) * (1.0 - mu * x)
            + mu * big_r * r.powf(mu - 2.0) / (big_r + r).powf(mu + 2.0)
    }

    /// Lower bound `(1-mu) mu R^2 r^(mu-3) / (R+r)^(mu+2) + mu R r^(mu-2) / (R+r)^(mu+2)`.
    pub fn neg_laplacian_lower_bound(&self, r: f64) -> f64 {
        let mu = self.exponent();
        let big_r = self.radius;
        let d = (big_r + r).powf(mu + 2.0);
        (1.0 - mu) * mu * big_r * big_r * r.powf(mu - 3.0) / d + mu * big_r * r.powf(mu - 2.0) / d
    }

    /// Bulk density `Q0 = f' (u_t^2 + u_r^2) / 2 - (n-1)/4 Laplacian(f/r) u^2`.
    pub fn q0_density(&self, r: f64, u: f64, ut: f64, ur: f64) -> f64 {
        let n = self.dim as f64;
        0.5 * self.df(r) * (ut * ut + ur * ur) + 0.25 * (n - 1.0) * self.neg_laplacian_f_over_r(r) * u * u
    }

    /// Constant `c` with `Q0 >= c |(du, u/r)|^2 / (R^mu r^(1-mu))` on `r <= R` (power family).
    pub fn q0_lower_constant(&self) -> Option<f64> {
        match self.family {
            MultiplierFamily::Power { mu } => {
                let n = self.dim as f64;
                let a = mu * 2f64.powf(-mu - 2.0);
                let b = (n - 1.0) * (1.0 - mu) * mu * 2f64.powf(-mu - 4.0);
                Some(a.min(b))
            }
            _ => None,
        }
    }
}
