use serde::{Deserialize, Serialize};

use super::{Leapfrog, SolverConfig};
use crate::error::{Error, Result};
use crate::fd;
use crate::norms::SpaceTimeField;
use crate::radial::RadialProfile;

/// Scalar function of the solution value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarFn {
    Zero,
    Constant { value: f64 },
    Linear { k: f64 },
    Quadratic { k: f64 },
    Sine { k: f64 },
    /// `sum_j coeffs[j] u^j`.
    Poly { coeffs: Vec<f64> },
}

impl ScalarFn {
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Constant { value } => *value,
            Self::Linear { k } => k * u,
            Self::Quadratic { k } => k * u * u,
            Self::Sine { k } => k * u.sin(),
            Self::Poly { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c),
        }
    }

    /// First derivative.
    pub fn derivative(&self, u: f64) -> f64 {
        match self {
            Self::Zero | Self::Constant { .. } => 0.0,
            Self::Linear { k } => *k,
            Self::Quadratic { k } => 2.0 * k * u,
            Self::Sine { k } => k * u.cos(),
            Self::Poly { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (j, c)| acc * u + j as f64 * c),
        }
    }

    /// Second derivative.
    pub fn second_derivative(&self, u: f64) -> f64 {
        match self {
            Self::Zero | Self::Constant { .. } | Self::Linear { .. } => 0.0,
            Self::Quadratic { k } => 2.0 * k,
            Self::Sine { k } => -k * u.sin(),
            Self::Poly { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(2)
                .rev()
                .fold(0.0, |acc, (j, c)| acc * u + (j * (j - 1)) as f64 * c),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Zero => true,
            Self::Constant { value } => *value == 0.0,
            Self::Linear { k } | Self::Quadratic { k } | Self::Sine { k } => *k == 0.0,
            Self::Poly { coeffs } => coeffs.iter().all(|c| *c == 0.0),
        }
    }
}

/// Quasilinear structure: `g(u)` in the principal part and `F = a(u) u_t^2 + b(u) |u_r|^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Nonlinearity {
    pub g: ScalarFn,
    pub a: ScalarFn,
    pub b: ScalarFn,
}

impl Nonlinearity {
    pub fn new(g: ScalarFn, a: ScalarFn, b: ScalarFn) -> Result<Self> {
        if g.eval(0.0) != 0.0 {
            return Err(Error::validation("metric perturbation must vanish at u = 0"));
        }
        Ok(Self { g, a, b })
    }

    /// The linear problem: `g = a = b = 0`.
    pub fn free() -> Self {
        Self { g: ScalarFn::Zero, a: ScalarFn::Zero, b: ScalarFn::Zero }
    }

    pub fn is_free(&self) -> bool {
        self.g.is_zero() && self.a.is_zero() && self.b.is_zero()
    }

    pub fn forcing(&self, u: f64, ut: f64, ur: f64) -> f64 {
        self.a.eval(u) * ut * ut + self.b.eval(u) * ur * ur
    }
}

/// Why a nonlinear run stopped early.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlowupReason {
    Amplitude,
    Hyperbolicity,
    NonFinite,
}

/// Output of a nonlinear run up to the cap or the first blow-up signal.
#[derive(Clone, Debug)]
pub struct NonlinearRun {
    pub field: SpaceTimeField,
    pub dt: f64,
    /// Time of the first blow-up signal, if any.
    pub blowup: Option<(f64, BlowupReason)>,
    pub peak_amplitude: f64,
}

/// Evolves the quasilinear equation until `t_cap` or until `max |u| > u_clip` or hyperbolicity fails.
pub fn solve_nonlinear(
    u0: &RadialProfile,
    u1: &RadialProfile,
    nl: &Nonlinearity,
    t_cap: f64,
    u_clip: f64,
    cfg: &SolverConfig,
) -> Result<NonlinearRun> {
    cfg.validate()?;
    let grid = *u0.grid();
    if u1.grid() != &grid {
        return Err(Error::validation("data live on different grids"));
    }
    if !(t_cap > 0.0 && u_clip > 0.0) {
        return Err(Error::validation("time cap and clip level must be positive"));
    }
    let (steps, dt) = cfg.time_step(&grid, t_cap, 1.0 / cfg.delta0);
    let dr = grid.dr();
    let len = grid.len();
    let eval = |u: &[f64], ut: &[f64], c: &mut [f64], f: &mut [f64]| -> Option<BlowupReason> {
        let ur = fd::derivative2(u, dr);
        let mut peak = 0.0f64;
        for i in 0..len {
            if !u[i].is_finite() || !ut[i].is_finite() {
                return Some(BlowupReason::NonFinite);
            }
            peak = peak.max(u[i].abs());
            c[i] = 1.0 + nl.g.eval(u[i]);
            f[i] = nl.forcing(u[i], ut[i], if i == 0 { 0.0 } else { ur[i] });
            if !(c[i] > cfg.delta0 && c[i] < 1.0 / cfg.delta0) {
                return Some(BlowupReason::Hyperbolicity);
            }
        }
        (peak > u_clip).then_some(BlowupReason::Amplitude)
    };
    let mut c = vec![0.0; len];
    let mut f = vec![0.0; len];
    let peak0 = u0.max_abs();
    if let Some(reason) = eval(u0.values(), u1.values(), &mut c, &mut f) {
        let field = SpaceTimeField::new(grid, vec![0.0], vec![u0.values().to_vec()], vec![u1.values().to_vec()])?;
        return Ok(NonlinearRun { field, dt, blowup: Some((0.0, reason)), peak_amplitude: peak0 });
    }
    let mut lf = Leapfrog::start(u0, u1, dt, &c, &f)?;
    let mut u_older: Vec<f64> = lf.current_u().iter().zip(u1.values()).map(|(a, b)| a - 2.0 * dt * b).collect();
    let mut times = vec![0.0];
    let mut us = vec![u0.values().to_vec()];
    let mut uts = vec![u1.values().to_vec()];
    let mut peak = peak0;
    let mut blowup = None;
    let mut pending: Option<(f64, Vec<f64>)> = None;
    for m in 1..=steps {
        let t = lf.time();
        let u_prev = lf.previous_u();
        let u = lf.current_u();
        let ut: Vec<f64> = (0..len)
            .map(|i| (3.0 * u[i] - 4.0 * u_prev[i] + u_older[i]) / (2.0 * dt))
            .collect();
        if let Some((ts, us_m)) = pending.take() {
            times.push(ts);
            uts.push(u.iter().zip(&u_older).map(|(a, b)| (a - b) / (2.0 * dt)).collect());
            us.push(us_m);
        }
        if let Some(reason) = eval(&u, &ut, &mut c, &mut f) {
            blowup = Some((t, reason));
            break;
        }
        peak = peak.max(u.iter().fold(0.0f64, |a, v| a.max(v.abs())));
        lf.step(&c, &f);
        if lf.touches_boundary(cfg.boundary_tolerance) {
            return Err(Error::BoundaryReached { time: t });
        }
        if m % cfg.stride == 0 || m == steps {
            pending = Some((t, u.clone()));
        }
        u_older = u_prev;
    }
    if let Some((ts, us_m)) = pending {
        let newer = lf.current_u();
        times.push(ts);
        uts.push(newer.iter().zip(&u_older).map(|(a, b)| (a - b) / (2.0 * dt)).collect());
        us.push(us_m);
    }
    let field = SpaceTimeField::new(grid, times, us, uts)?;
    Ok(NonlinearRun { field, dt, blowup, peak_amplitude: peak })
}
