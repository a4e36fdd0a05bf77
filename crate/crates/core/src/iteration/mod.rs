//! Mollified data sequences and the Picard iteration for the quasilinear problem,
//! with uniform-bound and contraction diagnostics.
//!
//! Iterate `k >= 3` solves `(-d_t^2 + (1 + g(u_{k-1})) Lap) u_k = F(u_{k-1})` with data
//! mollified at level `k`, starting from `u_2 = 0`.

mod report;

pub use report::{
    convergence_report, uniform_bound_report, ConvergenceReport, DifferenceRow, UniformBoundReport,
    UniformBoundRow, Verdict,
};

use serde::{Deserialize, Serialize};

use crate::calculus::DyadicCutoff;
use crate::error::{Error, Result};
use crate::flags::{Flag, Flags};
use crate::norms::{sobolev_norm, Component, SpaceTimeField};
use crate::radial::{forward_transform, inverse_transform, RadialGrid, RadialProfile};
use crate::solver::{discrete_residual, solve_linear, FieldSource, Nonlinearity, SampledField, SolverConfig};

/// Smallest admissible mollification level.
pub const MIN_LEVEL: u32 = 3;

/// Smooths data by the spectral multiplier `psi(2^-k rho)`, equal to one below `2^k`.
pub fn mollify_data(u0: &RadialProfile, u1: &RadialProfile, level: u32) -> Result<(RadialProfile, RadialProfile)> {
    if level < MIN_LEVEL {
        return Err(Error::validation(format!("mollification level {level} must be at least {MIN_LEVEL}")));
    }
    if u0.grid() != u1.grid() {
        return Err(Error::validation("data live on different grids"));
    }
    let scale = 2f64.powi(-(level as i32));
    let smooth = |p: &RadialProfile| inverse_transform(&forward_transform(p).map(|rho| DyadicCutoff::psi(scale * rho)));
    Ok((smooth(u0), smooth(u1)))
}

/// `||(grad u0, u1)||_{H^theta}` for radial data.
pub fn data_norm(u0: &RadialProfile, u1: &RadialProfile, theta: f64) -> Result<f64> {
    Ok((sobolev_norm(u0, theta + 1.0)?.powi(2) + sobolev_norm(u1, theta)?.powi(2)).sqrt())
}

/// Parameters of a Picard run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IterationConfig {
    /// Data regularity `s`.
    pub s: f64,
    /// Convergence regularity; defaults to `s - 1`.
    #[serde(default)]
    pub s0: Option<f64>,
    /// Local energy weight exponent.
    pub mu: f64,
    /// Threshold for `T^mu sup r^(1-mu) |d g(u_prev)|`.
    pub smallness: f64,
    /// Stop at the first stage failing the smallness check; otherwise only flag it.
    pub enforce_smallness: bool,
    /// Amplitude guard as a multiple of `sup |u0| + T sup |u1|`.
    pub clip_factor: f64,
    pub solver: SolverConfig,
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self {
            s: 1.8,
            s0: None,
            mu: 0.25,
            smallness: 0.5,
            enforce_smallness: true,
            clip_factor: 10.0,
            solver: SolverConfig::default(),
        }
    }
}

impl IterationConfig {
    pub fn s0(&self) -> f64 {
        self.s0.unwrap_or(self.s - 1.0)
    }

    fn validate(&self) -> Result<()> {
        let s0 = self.s0();
        if !(self.s > 1.5 && self.s.is_finite()) {
            return Err(Error::validation(format!("s = {} must exceed 3/2", self.s)));
        }
        if !(s0 >= 2.0 - self.s - 1e-12 && s0 <= self.s - 1.0 + 1e-12) {
            return Err(Error::validation(format!("s0 = {s0} must lie in [2 - s, s - 1]")));
        }
        if !(self.mu > 0.0 && self.mu <= 0.5) {
            return Err(Error::validation("mu must lie in (0, 1/2]"));
        }
        if !(self.smallness > 0.0 && self.clip_factor > 0.0) {
            return Err(Error::validation("smallness threshold and clip factor must be positive"));
        }
        Ok(())
    }
}

/// One Picard iterate.
#[derive(Clone, Debug)]
pub struct Iterate {
    /// Iterate index `k >= 3`, also its mollification level.
    pub k: u32,
    pub data: (RadialProfile, RadialProfile),
    pub field: SpaceTimeField,
    /// `T^mu sup r^(1-mu) |d g|` of the previous iterate that fed this solve.
    pub smallness: f64,
    /// Largest relative residual of the discrete update.
    pub residual: f64,
    pub peak_amplitude: f64,
}

/// Why a run stopped before producing every requested iterate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum StopReason {
    Smallness { value: f64, threshold: f64 },
    Amplitude { peak: f64, clip: f64 },
}

/// Stage at which a run was truncated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    /// Index of the iterate that was not produced.
    pub k: u32,
    #[serde(flatten)]
    pub reason: StopReason,
}

/// Output of `picard_iterate`.
#[derive(Clone, Debug)]
pub struct IterationRun {
    pub grid: RadialGrid,
    pub t_final: f64,
    pub s: f64,
    pub s0: f64,
    pub mu: f64,
    pub nonlinearity: Nonlinearity,
    pub iterates: Vec<Iterate>,
    /// Size of the data, `||(grad u0, u1)||_{H^(s-1)}`.
    pub data_size: f64,
    pub truncated: Option<StageReport>,
    pub flags: Flags,
}

/// Coefficient and forcing of the next iterate, sampled from the previous one.
struct Sources {
    coeff: SampledField,
    forcing: SampledField,
    smallness: f64,
}

fn sources(field: &SpaceTimeField, nl: &Nonlinearity, t_final: f64, mu: f64) -> Result<Sources> {
    let grid = field.grid();
    let times = field.times();
    let dt = times[1] - times[0];
    let ur = field.radial_gradient();
    let mut coeff = Vec::with_capacity(times.len());
    let mut forcing = Vec::with_capacity(times.len());
    let mut worst: f64 = 0.0;
    for m in 0..times.len() {
        let (u, ut) = (field.u(m), field.ut(m));
        coeff.push(u.iter().map(|&v| nl.g.eval(v)).collect());
        forcing.push((0..grid.len()).map(|i| nl.forcing(u[i], ut[i], ur[m][i])).collect());
        for i in 1..grid.len() {
            let grad = ut[i].hypot(ur[m][i]);
            worst = worst.max(grid.r(i).powf(1.0 - mu) * nl.g.derivative(u[i]).abs() * grad);
        }
    }
    Ok(Sources {
        coeff: SampledField::new(0.0, dt, coeff)?,
        forcing: SampledField::new(0.0, dt, forcing)?,
        smallness: t_final.powf(mu) * worst,
    })
}

/// Runs `count` Picard iterates on `[0, t_final]`.
///
/// Every iterate is stored at every step on a common time grid fixed by the hyperbolicity
/// margin, so that iterates can be differenced node by node.
pub fn picard_iterate(
    u0: &RadialProfile,
    u1: &RadialProfile,
    nl: &Nonlinearity,
    t_final: f64,
    count: usize,
    cfg: &IterationConfig,
) -> Result<IterationRun> {
    cfg.validate()?;
    if count == 0 {
        return Err(Error::validation("at least one iterate is required"));
    }
    let grid = *u0.grid();
    let mut solver = cfg.solver.clone();
    solver.stride = 1;
    solver.speed_bound = Some(1.0 / solver.delta0);
    let clip = cfg.clip_factor * (u0.max_abs() + t_final * u1.max_abs()).max(f64::MIN_POSITIVE);
    let mut run = IterationRun {
        grid,
        t_final,
        s: cfg.s,
        s0: cfg.s0(),
        mu: cfg.mu,
        nonlinearity: nl.clone(),
        iterates: Vec::with_capacity(count),
        data_size: data_norm(u0, u1, cfg.s - 1.0)?,
        truncated: None,
        flags: Flags::new(),
    };
    let zero = |_: f64, _: f64| 0.0;
    let mut previous: Option<Sources> = None;
    for k in MIN_LEVEL..MIN_LEVEL + count as u32 {
        let smallness = previous.as_ref().map_or(0.0, |p| p.smallness);
        if smallness >= cfg.smallness {
            run.flags.insert(Flag::SmallnessViolated);
            if cfg.enforce_smallness {
                run.truncated = Some(StageReport {
                    k,
                    reason: StopReason::Smallness { value: smallness, threshold: cfg.smallness },
                });
                break;
            }
        }
        let data = mollify_data(u0, u1, k)?;
        let (coeff, forcing): (&dyn FieldSource, &dyn FieldSource) = match &previous {
            Some(p) => (&p.coeff, &p.forcing),
            None => (&zero, &zero),
        };
        let solution = solve_linear(&data.0, &data.1, coeff, forcing, t_final, &solver)?;
        let field = solution.field;
        let residual = if field.len() >= 3 { discrete_residual(&field, coeff, forcing)? } else { 0.0 };
        let peak = (0..field.len()).flat_map(|m| field.u(m).iter()).fold(0.0f64, |a, v| a.max(v.abs()));
        if peak > clip {
            run.flags.insert(Flag::BlowupSignal);
            run.truncated = Some(StageReport { k, reason: StopReason::Amplitude { peak, clip } });
            break;
        }
        previous = Some(sources(&field, nl, t_final, cfg.mu)?);
        run.iterates.push(Iterate { k, data, field, smallness, residual, peak_amplitude: peak });
    }
    Ok(run)
}

impl IterationRun {
    /// `||D^(s0-1) d(u_{k+1} - u_k)||_{X_T}` for consecutive stored iterates.
    pub fn difference_norms(&self) -> Result<Vec<f64>> {
        self.iterates
            .windows(2)
            .map(|w| {
                let diff = w[1].field.difference(&w[0].field)?;
                crate::norms::xt_norm(&diff.fractional(self.s0 - 1.0)?.density(Component::Gradient), self.mu)
            })
            .collect()
    }
}
