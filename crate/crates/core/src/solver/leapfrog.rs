use crate::error::{Error, Result};
use crate::radial::{RadialGrid, RadialProfile};

/// Two consecutive time levels of the evolved variable.
///
/// The evolved variable is `r u` in dimension three and `u` otherwise.
#[derive(Clone, Debug)]
pub struct Leapfrog {
    grid: RadialGrid,
    dt: f64,
    time: f64,
    prev: Vec<f64>,
    cur: Vec<f64>,
    /// Finite-volume cell measure of each node.
    mass: Vec<f64>,
    /// Flux weight between nodes `i` and `i + 1`.
    flux: Vec<f64>,
}

impl Leapfrog {
    /// Starts from data `(u0, u1)` with a Taylor first step using speed^2 `c` and forcing `f` at `t = 0`.
    pub fn start(u0: &RadialProfile, u1: &RadialProfile, dt: f64, c: &[f64], f: &[f64]) -> Result<Self> {
        let grid = *u0.grid();
        if !(dt > 0.0) {
            return Err(Error::validation("time step must be positive"));
        }
        let (mass, flux) = weights(&grid);
        let w0 = to_evolved(&grid, u0.values());
        let w1 = to_evolved(&grid, u1.values());
        let mut s = Self { grid, dt, time: 0.0, prev: w0.clone(), cur: w0, mass, flux };
        let acc = s.acceleration(c, f);
        let next: Vec<f64> = (0..s.cur.len())
            .map(|i| s.cur[i] + dt * w1[i] + 0.5 * dt * dt * acc[i])
            .collect();
        s.cur = next;
        s.time = dt;
        s.pin_boundary();
        Ok(s)
    }

    /// Builds a state from two consecutive levels of `u`, the later one at time `t`.
    pub fn from_levels(grid: RadialGrid, dt: f64, t: f64, previous: &[f64], current: &[f64]) -> Result<Self> {
        if previous.len() != grid.len() || current.len() != grid.len() {
            return Err(Error::validation("level length does not match grid"));
        }
        let (mass, flux) = weights(&grid);
        Ok(Self {
            grid,
            dt,
            time: t,
            prev: to_evolved(&grid, previous),
            cur: to_evolved(&grid, current),
            mass,
            flux,
        })
    }

    /// Time-reversed state: the two levels are swapped and the clock restarts at `dt`.
    pub fn reversed(&self) -> Self {
        let mut s = self.clone();
        std::mem::swap(&mut s.prev, &mut s.cur);
        s.time = self.dt;
        s
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Time of the current level.
    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn current_u(&self) -> Vec<f64> {
        to_physical(&self.grid, &self.cur)
    }

    pub fn previous_u(&self) -> Vec<f64> {
        to_physical(&self.grid, &self.prev)
    }

    /// One-sided velocity `(u^m - u^{m-1}) / dt`.
    pub fn velocity_estimate(&self) -> Vec<f64> {
        let a = self.current_u();
        let b = self.previous_u();
        a.iter().zip(&b).map(|(x, y)| (x - y) / self.dt).collect()
    }

    /// Advances by one step with speed^2 `c` and forcing `f` sampled at the current time.
    pub fn step(&mut self, c: &[f64], f: &[f64]) {
        let acc = self.acceleration(c, f);
        let dt2 = self.dt * self.dt;
        let next: Vec<f64> = (0..self.cur.len())
            .map(|i| 2.0 * self.cur[i] - self.prev[i] + dt2 * acc[i])
            .collect();
        self.prev = std::mem::replace(&mut self.cur, next);
        self.time += self.dt;
        self.pin_boundary();
    }

    /// Largest interior residual of the update to `next`, relative to the largest acceleration.
    pub fn step_residual(&self, next: &[f64], c: &[f64], f: &[f64]) -> f64 {
        let acc = self.acceleration(c, f);
        let w = to_evolved(&self.grid, next);
        let dt2 = self.dt * self.dt;
        let lo = if self.grid.dim() == 3 { 1 } else { 0 };
        let hi = w.len() - 1;
        let scale = acc[lo..hi].iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let worst = (lo..hi).fold(0.0f64, |m, i| {
            m.max(((w[i] - 2.0 * self.cur[i] + self.prev[i]) / dt2 - acc[i]).abs())
        });
        if scale > 0.0 {
            worst / scale
        } else {
            worst
        }
    }

    /// Largest `c dt^2 lambda / 4` with `lambda` the operator bound; the scheme is stable below one.
    pub fn courant_sq(&self, c: &[f64]) -> f64 {
        c.iter().fold(0.0f64, |m, v| m.max(*v)) * self.dt * self.dt * operator_bound(&self.grid) / 4.0
    }

    pub fn has_non_finite(&self) -> bool {
        self.cur.iter().any(|v| !v.is_finite())
    }

    /// Whether the evolved variable near the outer node exceeds `tol` times its maximum.
    pub fn touches_boundary(&self, tol: f64) -> bool {
        let n = self.cur.len();
        let peak = self.cur.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let edge = self.cur[n - 9..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        peak > 0.0 && edge > tol * peak
    }

    /// Discrete energy between the two stored levels, conserved for static `c` and zero forcing.
    pub fn staggered_energy(&self, c: &[f64]) -> f64 {
        let dt = self.dt;
        let dr = self.grid.dr();
        let kinetic: f64 = (0..self.cur.len())
            .map(|i| {
                let d = (self.cur[i] - self.prev[i]) / dt;
                self.mass[i] * d * d / c[i]
            })
            .sum();
        let potential: f64 = (0..self.cur.len() - 1)
            .map(|i| {
                self.flux[i] * (self.cur[i + 1] - self.cur[i]) * (self.prev[i + 1] - self.prev[i]) / dr
            })
            .sum();
        0.5 * self.grid.sphere_area() * (kinetic + potential)
    }

    fn acceleration(&self, c: &[f64], f: &[f64]) -> Vec<f64> {
        let g = &self.grid;
        let dr = g.dr();
        let w = &self.cur;
        let n = w.len();
        let mut acc = vec![0.0; n];
        if g.dim() == 3 {
            for i in 1..n - 1 {
                let lap = (w[i + 1] - 2.0 * w[i] + w[i - 1]) / (dr * dr);
                acc[i] = c[i] * lap - g.r(i) * f[i];
            }
        } else {
            acc[0] = c[0] * 2.0 * g.dim() as f64 * (w[1] - w[0]) / (dr * dr) - f[0];
            for i in 1..n - 1 {
                let div = self.flux[i] * (w[i + 1] - w[i]) - self.flux[i - 1] * (w[i] - w[i - 1]);
                acc[i] = c[i] * div / (self.mass[i] * dr) - f[i];
            }
        }
        acc
    }

    fn pin_boundary(&mut self) {
        let n = self.cur.len();
        self.cur[n - 1] = 0.0;
        if self.grid.dim() == 3 {
            self.cur[0] = 0.0;
        }
    }
}

/// Gershgorin bound on the spectral radius of the discrete Laplacian, symmetrised by the mass weights.
pub(crate) fn operator_bound(grid: &RadialGrid) -> f64 {
    let dr = grid.dr();
    if grid.dim() == 3 {
        return 4.0 / (dr * dr);
    }
    let (mass, flux) = weights(grid);
    let n = mass.len() - 1;
    let off = |i: usize| flux[i] / (dr * (mass[i] * mass[i + 1]).sqrt());
    let mut bound = 0.0f64;
    for i in 0..n {
        let left = if i == 0 { 0.0 } else { flux[i - 1] };
        let mut row = (left + flux[i]) / (mass[i] * dr);
        if i > 0 {
            row += off(i - 1);
        }
        if i + 1 < n {
            row += off(i);
        }
        bound = bound.max(row);
    }
    bound
}

fn weights(grid: &RadialGrid) -> (Vec<f64>, Vec<f64>) {
    let dr = grid.dr();
    let n = grid.dim() as i32;
    let len = grid.len();
    if grid.dim() == 3 {
        let mut mass = vec![dr; len];
        mass[0] = 0.0;
        mass[len - 1] = 0.0;
        return (mass, vec![1.0; len - 1]);
    }
    let flux: Vec<f64> = (0..len - 1).map(|i| ((i as f64 + 0.5) * dr).powi(n - 1)).collect();
    let cell = |i: usize| ((i as f64 + 0.5) * dr).powi(n) / n as f64;
    let mut mass: Vec<f64> = (0..len).map(|i| if i == 0 { cell(0) } else { cell(i) - cell(i - 1) }).collect();
    mass[len - 1] = 0.0;
    (mass, flux)
}

fn to_evolved(grid: &RadialGrid, u: &[f64]) -> Vec<f64> {
    if grid.dim() == 3 {
        u.iter().enumerate().map(|(i, v)| grid.r(i) * v).collect()
    } else {
        u.to_vec()
    }
}

fn to_physical(grid: &RadialGrid, w: &[f64]) -> Vec<f64> {
    if grid.dim() != 3 {
        return w.to_vec();
    }
    let dr = grid.dr();
    let mut u: Vec<f64> = w.iter().enumerate().map(|(i, v)| if i == 0 { 0.0 } else { v / grid.r(i) }).collect();
    u[0] = (8.0 * w[1] - w[2]) / (6.0 * dr);
    u
}
