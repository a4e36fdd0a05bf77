use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inequality::{FamilyKind, TestFamily};
use crate::iteration::data_norm;
use crate::norms::{xt_dual_upper, xt_norm, Component, Density};
use crate::radial::{RadialGrid, RadialProfile};
use crate::solver::{solve_linear, SolverConfig};

/// Time-dependent metric perturbation `g(t, r)` with closed-form gradient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoefficientSpec {
    Zero,
    /// `A e^(-r^2 / w^2)`.
    Bump { amplitude: f64, width: f64 },
    /// `A e^(-(r - v t)^2 / w^2)`.
    Pulse { amplitude: f64, width: f64, speed: f64 },
    /// `A e^(-r^2 / w^2) cos(omega t)`.
    Breather { amplitude: f64, width: f64, omega: f64 },
}

impl CoefficientSpec {
    pub fn value(&self, t: f64, r: f64) -> f64 {
        match *self {
            Self::Zero => 0.0,
            Self::Bump { amplitude, width } => amplitude * (-(r / width).powi(2)).exp(),
            Self::Pulse { amplitude, width, speed } => amplitude * (-((r - speed * t) / width).powi(2)).exp(),
            Self::Breather { amplitude, width, omega } => amplitude * (-(r / width).powi(2)).exp() * (omega * t).cos(),
        }
    }

    /// `(g_t, g_r)`.
    pub fn gradient(&self, t: f64, r: f64) -> (f64, f64) {
        match *self {
            Self::Zero => (0.0, 0.0),
            Self::Bump { amplitude, width } => {
                let e = amplitude * (-(r / width).powi(2)).exp();
                (0.0, -2.0 * r / (width * width) * e)
            }
            Self::Pulse { amplitude, width, speed } => {
                let x = r - speed * t;
                let d = -2.0 * x / (width * width) * amplitude * (-(x / width).powi(2)).exp();
                (-speed * d, d)
            }
            Self::Breather { amplitude, width, omega } => {
                let e = amplitude * (-(r / width).powi(2)).exp();
                (-omega * e * (omega * t).sin(), -2.0 * r / (width * width) * e * (omega * t).cos())
            }
        }
    }

    /// `T^mu sup_{t <= T, r} r^(1-mu) |d g|` sampled on the grid nodes and `samples + 1` times.
    pub fn smallness(&self, grid: &RadialGrid, t_final: f64, mu: f64, samples: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..=samples {
            let t = t_final * k as f64 / samples as f64;
            for i in 1..grid.len() {
                let r = grid.r(i);
                let (gt, gr) = self.gradient(t, r);
                worst = worst.max(r.powf(1.0 - mu) * gt.hypot(gr));
            }
        }
        t_final.powf(mu) * worst
    }
}

/// Forcing `F(t, r)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ForcingSpec {
    #[default]
    Zero,
    /// `A e^(-r^2 / w^2) cos(omega t)`.
    Breather { amplitude: f64, width: f64, omega: f64 },
}

impl ForcingSpec {
    pub fn value(&self, t: f64, r: f64) -> f64 {
        match *self {
            Self::Zero => 0.0,
            Self::Breather { amplitude, width, omega } => amplitude * (-(r / width).powi(2)).exp() * (omega * t).cos(),
        }
    }
}

/// Grid, norm and smallness parameters of a local energy sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KssConfig {
    pub n: usize,
    pub r_max: f64,
    pub points: usize,
    pub mu: f64,
    /// Regularities, each in `[0, 1]`.
    pub thetas: Vec<f64>,
    /// Threshold for `T^mu sup r^(1-mu) |d g|`.
    pub smallness: f64,
    pub solver: SolverConfig,
}

impl Default for KssConfig {
    fn default() -> Self {
        Self {
            n: 3,
            r_max: 32.0,
            points: 1024,
            mu: 0.25,
            thetas: vec![0.0, 0.5, 1.0],
            smallness: 0.5,
            solver: SolverConfig::default(),
        }
    }
}

impl KssConfig {
    pub fn grid(&self) -> Result<RadialGrid> {
        RadialGrid::new(self.n, self.r_max, self.points)
    }

    fn validate(&self) -> Result<()> {
        if self.thetas.is_empty() || self.thetas.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(Error::validation("regularities must lie in [0, 1]"));
        }
        if !(self.mu > 0.0 && self.mu <= 0.5) {
            return Err(Error::validation(format!("mu = {} must lie in (0, 1/2]", self.mu)));
        }
        if !(self.smallness > 0.0) {
            return Err(Error::validation("smallness threshold must be positive"));
        }
        Ok(())
    }
}

/// Reproducible family of `(u0, u1)` pairs drawn from the mixed test family.
pub fn kss_data_family(grid: RadialGrid, count: usize, seed: u64) -> Result<Vec<(RadialProfile, RadialProfile)>> {
    let family = TestFamily::new(FamilyKind::Mixed, 2 * count, seed);
    (0..count)
        .map(|i| {
            let u0 = family.member(2 * i).profile(grid)?;
            let u1 = family.member(2 * i + 1).profile(grid)?.scaled(0.5);
            Ok((u0, u1))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KssRow {
    pub data: usize,
    pub coefficient: usize,
    pub t_final: f64,
    pub theta: f64,
    /// `||d~ D^theta u||_{X_T}`.
    pub solution_norm: f64,
    pub data_norm: f64,
    /// Upper bound of `||D^theta F||_{X_T^*}`.
    pub forcing_norm: f64,
    pub ratio: f64,
}

/// A coefficient and horizon left out because the smallness check failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KssSkip {
    pub coefficient: usize,
    pub t_final: f64,
    pub smallness: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KssSummary {
    pub theta: f64,
    pub max_ratio: f64,
    pub min_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KssTable {
    pub rows: Vec<KssRow>,
    pub skipped: Vec<KssSkip>,
    /// Rows with vanishing data and forcing that were left out.
    pub excluded: usize,
    pub summary: Vec<KssSummary>,
}

impl KssTable {
    /// `max / min` of every ratio in the table.
    pub fn spread(&self) -> f64 {
        let (lo, hi) = self
            .rows
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r.ratio), hi.max(r.ratio)));
        hi / lo
    }
}

const SMALLNESS_SAMPLES: usize = 32;

/// Measures `||d~ D^theta u||_{X_T} / (||(grad u0, u1)||_{H^theta} + ||D^theta F||_{X_T^*})`
/// over data, coefficients, horizons and regularities.
pub fn kss_constant_sweep(
    data: &[(RadialProfile, RadialProfile)],
    coefficients: &[CoefficientSpec],
    forcing: &ForcingSpec,
    horizons: &[f64],
    cfg: &KssConfig,
) -> Result<KssTable> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    if data.iter().any(|(a, b)| a.grid() != &grid || b.grid() != &grid) {
        return Err(Error::validation("data do not live on the configured grid"));
    }
    let mut skipped = Vec::new();
    let mut jobs = Vec::new();
    for (c, coeff) in coefficients.iter().enumerate() {
        for &t in horizons {
            if !(t > 0.0) {
                return Err(Error::validation("horizons must be positive"));
            }
            let smallness = coeff.smallness(&grid, t, cfg.mu, SMALLNESS_SAMPLES);
            if smallness > cfg.smallness {
                skipped.push(KssSkip { coefficient: c, t_final: t, smallness });
                continue;
            }
            jobs.extend((0..data.len()).map(|d| (d, c, t)));
        }
    }
    let results: Vec<Result<Vec<Option<KssRow>>>> = jobs
        .par_iter()
        .map(|&(d, c, t)| {
            let coeff = &coefficients[c];
            let g = |s: f64, r: f64| coeff.value(s, r);
            let f = |s: f64, r: f64| forcing.value(s, r);
            let (u0, u1) = &data[d];
            let sol = solve_linear(u0, u1, &g, &f, t, &cfg.solver)?;
            let nodes = grid.nodes();
            let times = sol.field.times().to_vec();
            let forcing_values: Vec<Vec<f64>> =
                times.iter().map(|&s| nodes.iter().map(|&r| forcing.value(s, r)).collect()).collect();
            cfg.thetas
                .iter()
                .map(|&theta| {
                    let lifted = sol.field.fractional(theta)?;
                    let solution_norm = xt_norm(&lifted.density(Component::TildeGradient), cfg.mu)?;
                    let dn = data_norm(u0, u1, theta)?;
                    let forcing_norm = if matches!(forcing, ForcingSpec::Zero) {
                        0.0
                    } else {
                        let lifted_f: Vec<Vec<f64>> = forcing_values
                            .iter()
                            .map(|s| {
                                crate::calculus::fractional_derivative(&RadialProfile::from_parts(grid, s.clone()), theta)
                                    .map(|p| p.into_values())
                            })
                            .collect::<Result<_>>()?;
                        xt_dual_upper(&Density::from_scalar(grid, times.clone(), &lifted_f)?, cfg.mu)?.value
                    };
                    let denom = dn + forcing_norm;
                    Ok((denom > 0.0).then(|| KssRow {
                        data: d,
                        coefficient: c,
                        t_final: t,
                        theta,
                        solution_norm,
                        data_norm: dn,
                        forcing_norm,
                        ratio: solution_norm / denom,
                    }))
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::new();
    let mut excluded = 0;
    for r in results {
        for row in r? {
            match row {
                Some(row) => rows.push(row),
                None => excluded += 1,
            }
        }
    }
    let summary = cfg
        .thetas
        .iter()
        .map(|&theta| {
            let (lo, hi) = rows
                .iter()
                .filter(|r| r.theta == theta)
                .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r.ratio), hi.max(r.ratio)));
            KssSummary { theta, max_ratio: hi, min_ratio: lo }
        })
        .collect();
    Ok(KssTable { rows, skipped, excluded, summary })
}
