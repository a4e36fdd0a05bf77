//! Second-order leapfrog solver for `(-d_t^2 + (1 + g) Lap) u = F` in radial symmetry.
//!
//! Dimension three evolves `v = r u` with `v(0) = 0`; higher odd dimensions evolve `u`
//! with a flux-form Laplacian whose origin row uses `Lap u(0) = n u_rr(0)`. The outer
//! node is a homogeneous Dirichlet boundary.

mod energy;
mod leapfrog;
mod nonlinear;
mod source;

pub use energy::{energy_drift_check, EnergyCheck};
pub use leapfrog::Leapfrog;
pub use nonlinear::{solve_nonlinear, BlowupReason, NonlinearRun, Nonlinearity, ScalarFn};
pub use source::{FieldSource, SampledField};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::SpaceTimeField;
use crate::radial::{RadialGrid, RadialProfile};

/// Time-stepping options.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Courant number relative to the fastest admissible wave speed.
    pub cfl: f64,
    /// Store every `stride`-th step (the final step is always stored).
    pub stride: usize,
    /// Hyperbolicity margin: `delta0 < 1 + g < 1 / delta0`.
    pub delta0: f64,
    /// Relative amplitude near the outer boundary that aborts the run.
    pub boundary_tolerance: f64,
    /// Fixed bound on `1 + g` used for the time step; sampled from the coefficient when absent.
    #[serde(default)]
    pub speed_bound: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { cfl: 0.9, stride: 1, delta0: 0.5, boundary_tolerance: 1e-6, speed_bound: None }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 0.9) {
            return Err(Error::validation(format!("cfl = {} must lie in (0, 0.9]", self.cfl)));
        }
        if self.stride == 0 {
            return Err(Error::validation("stride must be positive"));
        }
        if !(self.delta0 > 0.0 && self.delta0 < 1.0) {
            return Err(Error::validation("delta0 must lie in (0, 1)"));
        }
        if self.speed_bound.is_some_and(|c| !(c >= 1.0 && c.is_finite())) {
            return Err(Error::validation("speed bound must be finite and at least 1"));
        }
        Ok(())
    }

    /// Step count and step size reaching `t_final` exactly under the CFL bound for speed^2 `c_max`.
    ///
    /// In dimension three the bound is `cfl dr / sqrt(c_max)`; higher dimensions use the
    /// stiffer origin row of the stencil.
    pub fn time_step(&self, grid: &RadialGrid, t_final: f64, c_max: f64) -> (usize, f64) {
        let dt_max = self.cfl * 2.0 / (c_max * leapfrog::operator_bound(grid)).sqrt();
        let steps = ((t_final / dt_max).ceil() as usize).max(1);
        (steps, t_final / steps as f64)
    }
}

/// Output of a linear solve.
#[derive(Clone, Debug)]
pub struct Solution {
    pub field: SpaceTimeField,
    pub dt: f64,
    pub steps: usize,
    /// Discrete energy at half steps `t_{m+1/2}`.
    pub energy: Vec<f64>,
    /// Leapfrog state after the final step, for continuation or time reversal.
    pub final_state: Leapfrog,
}

impl Solution {
    /// `max |E - E_0| / E_0` over the run.
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.energy[0];
        self.energy.iter().fold(0.0f64, |m, e| m.max((e - e0).abs())) / e0.abs().max(f64::MIN_POSITIVE)
    }
}

fn coefficient_samples(grid: &RadialGrid, coeff: &dyn FieldSource, t: f64, dt: f64, out: &mut [f64]) {
    let nodes = grid.nodes();
    let mut lo = vec![0.0; grid.len()];
    coeff.fill(t - 0.5 * dt, &nodes, &mut lo);
    coeff.fill(t + 0.5 * dt, &nodes, out);
    for (o, l) in out.iter_mut().zip(&lo) {
        *o = 1.0 + 0.5 * (*o + l);
    }
}

/// Solves the linear problem with data `(u0, u1)`, coefficient `g(t, r)` and forcing `F(t, r)`.
pub fn solve_linear(
    u0: &RadialProfile,
    u1: &RadialProfile,
    coeff: &dyn FieldSource,
    forcing: &dyn FieldSource,
    t_final: f64,
    cfg: &SolverConfig,
) -> Result<Solution> {
    cfg.validate()?;
    let grid = *u0.grid();
    if u1.grid() != &grid {
        return Err(Error::validation("data live on different grids"));
    }
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::validation("final time must be positive"));
    }
    let nodes = grid.nodes();
    let c_max = match cfg.speed_bound {
        Some(c) => c,
        None => {
            let mut c_max: f64 = 1.0;
            let mut buf = vec![0.0; grid.len()];
            for k in 0..=8 {
                coeff.fill(t_final * k as f64 / 8.0, &nodes, &mut buf);
                c_max = buf.iter().fold(c_max, |m, g| m.max(1.0 + g));
            }
            c_max
        }
    };
    let (steps, dt) = cfg.time_step(&grid, t_final, c_max);
    let mut c = vec![0.0; grid.len()];
    let mut f = vec![0.0; grid.len()];
    coefficient_samples(&grid, coeff, 0.0, dt, &mut c);
    forcing.fill(0.0, &nodes, &mut f);
    let mut lf = Leapfrog::start(u0, u1, dt, &c, &f)?;
    run_linear(&mut lf, coeff, forcing, steps, cfg, (u0.values().to_vec(), u1.values().to_vec()))
}

/// Continues a leapfrog state for `steps` further steps.
pub fn continue_linear(
    state: &Leapfrog,
    coeff: &dyn FieldSource,
    forcing: &dyn FieldSource,
    steps: usize,
    cfg: &SolverConfig,
) -> Result<Solution> {
    cfg.validate()?;
    let mut lf = state.clone();
    let start = (lf.previous_u(), lf.velocity_estimate());
    run_linear(&mut lf, coeff, forcing, steps, cfg, start)
}

fn run_linear(
    lf: &mut Leapfrog,
    coeff: &dyn FieldSource,
    forcing: &dyn FieldSource,
    steps: usize,
    cfg: &SolverConfig,
    start: (Vec<f64>, Vec<f64>),
) -> Result<Solution> {
    let grid = *lf.grid();
    let nodes = grid.nodes();
    let dt = lf.dt();
    let t0 = lf.time() - dt;
    let mut c = vec![0.0; grid.len()];
    let mut f = vec![0.0; grid.len()];
    let mut times = vec![t0];
    let mut us = vec![start.0];
    let mut uts = vec![start.1];
    let mut half = vec![0.0; grid.len()];
    static_coefficient(coeff, t0 + 0.5 * dt, &nodes, &mut half);
    let mut energy = vec![lf.staggered_energy(&half)];
    for m in 1..=steps {
        let t = lf.time();
        coefficient_samples(&grid, coeff, t, dt, &mut c);
        check_hyperbolic(&c, cfg.delta0, t)?;
        if lf.courant_sq(&c) > 1.0 {
            return Err(Error::numerical(format!("CFL condition violated at t = {t}")));
        }
        forcing.fill(t, &nodes, &mut f);
        let older = lf.previous_u();
        let current = lf.current_u();
        lf.step(&c, &f);
        if lf.has_non_finite() {
            return Err(Error::numerical(format!("non-finite values at t = {t}")));
        }
        if lf.touches_boundary(cfg.boundary_tolerance) {
            return Err(Error::BoundaryReached { time: t });
        }
        static_coefficient(coeff, t + 0.5 * dt, &nodes, &mut half);
        energy.push(lf.staggered_energy(&half));
        if m % cfg.stride == 0 || m == steps {
            let newer = lf.current_u();
            times.push(t);
            uts.push(newer.iter().zip(&older).map(|(a, b)| (a - b) / (2.0 * dt)).collect());
            us.push(current);
        }
    }
    let field = SpaceTimeField::new(grid, times, us, uts)?;
    Ok(Solution { field, dt, steps, energy, final_state: lf.clone() })
}

/// Largest relative residual of the leapfrog update over the stored levels of `field`.
///
/// The field must be stored at every step. Each interior residual of
/// `(w^{m+1} - 2 w^m + w^{m-1}) / dt^2 - (1 + g) L w^m + F` is scaled by the largest
/// acceleration magnitude of its step; the Taylor first step is skipped.
pub fn discrete_residual(field: &SpaceTimeField, coeff: &dyn FieldSource, forcing: &dyn FieldSource) -> Result<f64> {
    let times = field.times();
    if times.len() < 3 {
        return Err(Error::validation("residual needs at least three stored levels"));
    }
    let dt = times[1] - times[0];
    if times.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt) {
        return Err(Error::validation("residual needs a uniformly stored field"));
    }
    let grid = *field.grid();
    let nodes = grid.nodes();
    let mut c = vec![0.0; grid.len()];
    let mut f = vec![0.0; grid.len()];
    let mut worst: f64 = 0.0;
    for m in 1..times.len() - 1 {
        let t = times[m];
        coefficient_samples(&grid, coeff, t, dt, &mut c);
        forcing.fill(t, &nodes, &mut f);
        let lf = Leapfrog::from_levels(grid, dt, t, field.u(m - 1), field.u(m))?;
        worst = worst.max(lf.step_residual(field.u(m + 1), &c, &f));
    }
    Ok(worst)
}

fn static_coefficient(coeff: &dyn FieldSource, t: f64, nodes: &[f64], out: &mut [f64]) {
    coeff.fill(t, nodes, out);
    for v in out.iter_mut() {
        *v += 1.0;
    }
}

fn check_hyperbolic(c: &[f64], delta0: f64, t: f64) -> Result<()> {
    let (lo, hi) = c.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if !(lo > delta0 && hi < 1.0 / delta0) {
        return Err(Error::numerical(format!(
            "hyperbolicity lost at t = {t}: 1 + g ranges over [{lo}, {hi}]"
        )));
    }
    Ok(())
}
