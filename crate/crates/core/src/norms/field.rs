use crate::calculus::fractional_spectrum;
use crate::error::{Error, Result};
use crate::radial::{forward_transform, inverse_transform, radial_derivative, RadialGrid, RadialProfile};

/// Radial solution sampled at stored times, with its time derivative.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceTimeField {
    grid: RadialGrid,
    times: Vec<f64>,
    u: Vec<Vec<f64>>,
    ut: Vec<Vec<f64>>,
}

impl SpaceTimeField {
    pub fn new(grid: RadialGrid, times: Vec<f64>, u: Vec<Vec<f64>>, ut: Vec<Vec<f64>>) -> Result<Self> {
        if times.is_empty() || u.len() != times.len() || ut.len() != times.len() {
            return Err(Error::validation("time stack lengths disagree"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || times[0] < 0.0 {
            return Err(Error::validation("stored times must be nonnegative and increasing"));
        }
        if u.iter().chain(&ut).any(|s| s.len() != grid.len()) {
            return Err(Error::validation("slice length does not match the grid"));
        }
        if u.iter().chain(&ut).flatten().any(|v| !v.is_finite()) {
            return Err(Error::numerical("field contains non-finite values"));
        }
        Ok(Self { grid, times, u, ut })
    }

    /// Samples analytic `u(t, r)` and `u_t(t, r)`.
    pub fn sample(
        grid: RadialGrid,
        times: Vec<f64>,
        u: impl Fn(f64, f64) -> f64,
        ut: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let nodes = grid.nodes();
        let us = times.iter().map(|&t| nodes.iter().map(|&r| u(t, r)).collect()).collect();
        let uts = times.iter().map(|&t| nodes.iter().map(|&r| ut(t, r)).collect()).collect();
        Self::new(grid, times, us, uts)
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("nonempty")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn u(&self, m: usize) -> &[f64] {
        &self.u[m]
    }

    pub fn ut(&self, m: usize) -> &[f64] {
        &self.ut[m]
    }

    pub fn u_profile(&self, m: usize) -> RadialProfile {
        RadialProfile::from_parts(self.grid, self.u[m].clone())
    }

    pub fn ut_profile(&self, m: usize) -> RadialProfile {
        RadialProfile::from_parts(self.grid, self.ut[m].clone())
    }

    /// Pointwise difference of two fields on the same grid and times.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid || self.times != other.times {
            return Err(Error::validation("fields are sampled differently"));
        }
        let sub = |a: &Vec<Vec<f64>>, b: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p - q).collect())
                .collect()
        };
        Ok(Self {
            grid: self.grid,
            times: self.times.clone(),
            u: sub(&self.u, &other.u),
            ut: sub(&self.ut, &other.ut),
        })
    }

    /// Applies `D^theta` to `u` and `u_t` slice by slice.
    pub fn fractional(&self, theta: f64) -> Result<Self> {
        let n = self.grid.dim() as f64;
        if !(theta > -n) {
            return Err(Error::validation(format!("theta = {theta} is not admissible")));
        }
        let apply = |slices: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            slices
                .iter()
                .map(|s| {
                    let p = RadialProfile::from_parts(self.grid, s.clone());
                    inverse_transform(&fractional_spectrum(&forward_transform(&p), theta)).into_values()
                })
                .collect()
        };
        Ok(Self {
            grid: self.grid,
            times: self.times.clone(),
            u: apply(&self.u),
            ut: apply(&self.ut),
        })
    }

    /// Spectral radial derivative of every stored slice of `u`.
    pub fn radial_gradient(&self) -> Vec<Vec<f64>> {
        self.u
            .iter()
            .map(|s| radial_derivative(&RadialProfile::from_parts(self.grid, s.clone())).into_values())
            .collect()
    }

    /// Pointwise squared magnitude of the selected component.
    pub fn density(&self, component: Component) -> Density {
        let sq = |x: f64| x * x;
        let values: Vec<Vec<f64>> = match component {
            Component::Value => self.u.iter().map(|s| s.iter().map(|&v| sq(v)).collect()).collect(),
            Component::Velocity => self.ut.iter().map(|s| s.iter().map(|&v| sq(v)).collect()).collect(),
            Component::Gradient | Component::TildeGradient => {
                let ur = self.radial_gradient();
                let tilde = component == Component::TildeGradient;
                (0..self.len())
                    .map(|m| {
                        (0..self.grid.len())
                            .map(|i| {
                                let mut d = sq(self.ut[m][i]) + sq(ur[m][i]);
                                if tilde && i > 0 {
                                    d += sq(self.u[m][i] / self.grid.r(i));
                                }
                                d
                            })
                            .collect()
                    })
                    .collect()
            }
        };
        Density { grid: self.grid, times: self.times.clone(), values }
    }
}

/// Which pointwise quantity a space-time norm measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Component {
    /// `u` itself.
    Value,
    /// `u_t`.
    Velocity,
    /// `(u_t, grad u)`.
    Gradient,
    /// `(u_t, grad u, u / r)`.
    TildeGradient,
}

/// Pointwise squared magnitude `|w(t, r)|^2` on a space-time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Density {
    grid: RadialGrid,
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl Density {
    pub fn new(grid: RadialGrid, times: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != times.len() || values.iter().any(|s| s.len() != grid.len()) {
            return Err(Error::validation("density shape does not match grid and times"));
        }
        if values.iter().flatten().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::numerical("density must be finite and nonnegative"));
        }
        Ok(Self { grid, times, values })
    }

    /// Squares a signed scalar field.
    pub fn from_scalar(grid: RadialGrid, times: Vec<f64>, values: &[Vec<f64>]) -> Result<Self> {
        let sq = values.iter().map(|s| s.iter().map(|v| v * v).collect()).collect();
        Self::new(grid, times, sq)
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("nonempty")
    }

    /// Pointwise sum of two densities.
    pub fn add(&self, other: &Density) -> Result<Density> {
        if self.grid != other.grid || self.times != other.times {
            return Err(Error::validation("densities are sampled differently"));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        Ok(Density { grid: self.grid, times: self.times.clone(), values })
    }
}
