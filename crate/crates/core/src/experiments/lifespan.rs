use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::DataSpec;
use crate::error::{Error, Result};
use crate::flags::{Flag, Flags};
use crate::iteration::data_norm;
use crate::radial::RadialGrid;
use crate::solver::{solve_nonlinear, BlowupReason, Nonlinearity, SolverConfig};

/// Grid ladder, caps and tolerances of a lifespan measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LifespanConfig {
    pub n: usize,
    pub r_max: f64,
    /// Point counts from coarse to fine.
    pub ladder: Vec<usize>,
    pub t_cap: f64,
    /// Amplitude guard as a multiple of `sup |u0| + sup |u1|`.
    pub clip_factor: f64,
    /// Largest relative change of the blow-up time between the two finest rungs.
    pub gap_tolerance: f64,
    /// Regularity of the data size `||(grad u0, u1)||_{H^(s-1)}`.
    pub s: f64,
    pub solver: SolverConfig,
}

impl Default for LifespanConfig {
    fn default() -> Self {
        Self {
            n: 3,
            r_max: 40.0,
            ladder: vec![1024, 2048],
            t_cap: 1000.0,
            clip_factor: 10.0,
            gap_tolerance: 0.05,
            s: 1.8,
            solver: SolverConfig { stride: 1 << 30, ..SolverConfig::default() },
        }
    }
}

impl LifespanConfig {
    fn validate(&self) -> Result<()> {
        if self.ladder.len() < 2 || self.ladder.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::validation("grid ladder needs at least two increasing point counts"));
        }
        if !(self.t_cap > 0.0 && self.clip_factor > 0.0 && self.gap_tolerance > 0.0) {
            return Err(Error::validation("time cap, clip factor and gap tolerance must be positive"));
        }
        Ok(())
    }
}

/// How a single rung ended.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum RungOutcome {
    Blowup { reason: BlowupReason },
    /// No signal before the time cap.
    TimeCap,
    /// The solution reached the outer boundary first.
    Boundary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderRung {
    pub points: usize,
    /// Last healthy time, or the censoring time.
    pub t_star: f64,
    pub outcome: RungOutcome,
}

/// Blow-up time of one data set measured on a grid ladder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LifespanMeasurement {
    pub data: DataSpec,
    /// `||(grad u0, u1)||_{H^(s-1)}` on the finest grid.
    pub data_size: f64,
    /// Value on the finest rung; a lower bound when censored.
    pub t_star: f64,
    pub censored: bool,
    pub confirmed: bool,
    /// Relative change of `t_star` between the two finest rungs.
    pub refinement_gap: Option<f64>,
    pub rungs: Vec<LadderRung>,
    pub flags: Flags,
}

fn measure_rung(data: &DataSpec, nl: &Nonlinearity, cfg: &LifespanConfig, points: usize) -> Result<(LadderRung, f64)> {
    let grid = RadialGrid::new(cfg.n, cfg.r_max, points)?;
    let (u0, u1) = data.profiles(grid)?;
    let size = data_norm(&u0, &u1, cfg.s - 1.0)?;
    let clip = cfg.clip_factor * (u0.max_abs() + u1.max_abs()).max(f64::MIN_POSITIVE);
    let rung = match solve_nonlinear(&u0, &u1, nl, cfg.t_cap, clip, &cfg.solver) {
        Ok(run) => match run.blowup {
            Some((t, reason)) => LadderRung { points, t_star: (t - run.dt).max(0.0), outcome: RungOutcome::Blowup { reason } },
            None => LadderRung { points, t_star: cfg.t_cap, outcome: RungOutcome::TimeCap },
        },
        Err(Error::BoundaryReached { time }) => LadderRung { points, t_star: time, outcome: RungOutcome::Boundary },
        Err(e) => return Err(e),
    };
    Ok((rung, size))
}

/// Runs the nonlinear solve on every rung of the ladder until a blow-up signal.
///
/// The measurement is confirmed when the two finest rungs both blow up and agree within
/// the gap tolerance.
pub fn measure_lifespan(data: &DataSpec, nl: &Nonlinearity, cfg: &LifespanConfig) -> Result<LifespanMeasurement> {
    cfg.validate()?;
    let mut rungs = Vec::with_capacity(cfg.ladder.len());
    let mut data_size = 0.0;
    for &points in &cfg.ladder {
        let (rung, size) = measure_rung(data, nl, cfg, points)?;
        rungs.push(rung);
        data_size = size;
    }
    let fine = &rungs[rungs.len() - 1];
    let coarse = &rungs[rungs.len() - 2];
    let blew = |r: &LadderRung| matches!(r.outcome, RungOutcome::Blowup { .. });
    let censored = !blew(fine);
    let refinement_gap = (blew(fine) && blew(coarse) && fine.t_star > 0.0)
        .then(|| (fine.t_star - coarse.t_star).abs() / fine.t_star);
    let confirmed = refinement_gap.is_some_and(|g| g <= cfg.gap_tolerance);
    let mut flags = Flags::new();
    if censored {
        flags.insert(Flag::Censored);
    } else {
        flags.insert(Flag::BlowupSignal);
        if !confirmed {
            flags.insert(Flag::Unconfirmed);
        }
    }
    Ok(LifespanMeasurement {
        data: data.clone(),
        data_size,
        t_star: fine.t_star,
        censored,
        confirmed,
        refinement_gap,
        rungs,
        flags,
    })
}

/// Measures every data set in parallel; results keep the input order.
pub fn lifespan_sweep(data: &[DataSpec], nl: &Nonlinearity, cfg: &LifespanConfig) -> Result<Vec<LifespanMeasurement>> {
    data.par_iter().map(|d| measure_lifespan(d, nl, cfg)).collect()
}

/// Candidate lifespan law.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawKind {
    /// `ln T = slope / eps + intercept`.
    Exponential,
    /// `ln T = slope ln eps + intercept`, so `T ~ eps^slope`.
    Power,
}

/// Least-squares fit of one law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawFit {
    pub law: LawKind,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

impl LawFit {
    /// Decay exponent `p` of `T ~ eps^-p` for the power law.
    pub fn power_exponent(&self) -> f64 {
        -self.slope
    }
}

/// Fits `law` to `(eps, T)` pairs with positive entries.
pub fn fit_law(points: &[(f64, f64)], law: LawKind) -> Result<LawFit> {
    if points.len() < 2 {
        return Err(Error::validation("a fit needs at least two points"));
    }
    if points.iter().any(|(e, t)| !(*e > 0.0 && *t > 0.0 && e.is_finite() && t.is_finite())) {
        return Err(Error::validation("fit points must be positive and finite"));
    }
    let xy: Vec<(f64, f64)> = points
        .iter()
        .map(|&(e, t)| match law {
            LawKind::Exponential => (1.0 / e, t.ln()),
            LawKind::Power => (e.ln(), t.ln()),
        })
        .collect();
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::validation("fit needs at least two distinct amplitudes"));
    }
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = xy.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let resid: f64 = xy.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - resid / syy } else { 1.0 };
    Ok(LawFit { law, slope, intercept, r_squared, points: xy.len() })
}

/// Abscissa used for lifespan fits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitVariable {
    /// Data amplitude.
    #[default]
    Amplitude,
    /// `||(grad u0, u1)||_{H^(s-1)}`.
    DataSize,
}

/// Both law fits over the confirmed measurements of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LifespanFit {
    pub variable: FitVariable,
    pub exponential: LawFit,
    pub power: LawFit,
    /// Law with the larger coefficient of determination.
    pub preferred: LawKind,
    /// Measurements left out because they were censored or unconfirmed.
    pub excluded: usize,
}

/// Minimum number of confirmed points for a sweep fit.
pub const MIN_CONFIRMED: usize = 5;

pub fn lifespan_sweep_fit(measurements: &[LifespanMeasurement], variable: FitVariable) -> Result<LifespanFit> {
    let points: Vec<(f64, f64)> = measurements
        .iter()
        .filter(|m| m.confirmed)
        .map(|m| {
            let x = match variable {
                FitVariable::Amplitude => m.data.amplitude.abs(),
                FitVariable::DataSize => m.data_size,
            };
            (x, m.t_star)
        })
        .collect();
    if points.len() < MIN_CONFIRMED {
        return Err(Error::validation(format!(
            "{} confirmed measurements, at least {MIN_CONFIRMED} are needed for a fit",
            points.len()
        )));
    }
    let exponential = fit_law(&points, LawKind::Exponential)?;
    let power = fit_law(&points, LawKind::Power)?;
    let preferred = if exponential.r_squared >= power.r_squared { LawKind::Exponential } else { LawKind::Power };
    Ok(LifespanFit { variable, exponential, power, preferred, excluded: measurements.len() - points.len() })
}
