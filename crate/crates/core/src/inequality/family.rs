use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::{RadialGrid, RadialProfile};

/// Analytic radial test function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Member {
    /// `e^(-(r-c)^2 / 2w^2) + e^(-(r+c)^2 / 2w^2)`.
    Bump { center: f64, width: f64 },
    /// `sin(k r) e^(-s^2 r^2 / 2) / (k r)`.
    Packet { frequency: f64, sigma: f64 },
    /// `e^(-(l r)^2 / 2)`.
    Scaled { lambda: f64 },
    /// Signed sum of bumps `(amplitude, center, width)`.
    Sum { terms: Vec<(f64, f64, f64)> },
    /// `(r^2 + core^2)^(-exponent/2) e^(-r^2 / 2 taper^2)`.
    Taper { exponent: f64, core: f64, taper: f64 },
}

fn bump(r: f64, c: f64, w: f64) -> f64 {
    let s = 2.0 * w * w;
    (-(r - c).powi(2) / s).exp() + (-(r + c).powi(2) / s).exp()
}

impl Member {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Self::Bump { center, width } => bump(r, *center, *width),
            Self::Packet { frequency, sigma } => {
                let x = frequency * r;
                let sinc = if x.abs() < 1e-8 { 1.0 - x * x / 6.0 } else { x.sin() / x };
                sinc * (-0.5 * (sigma * r).powi(2)).exp()
            }
            Self::Scaled { lambda } => (-0.5 * (lambda * r).powi(2)).exp(),
            Self::Sum { terms } => terms.iter().map(|(a, c, w)| a * bump(r, *c, *w)).sum(),
            Self::Taper { exponent, core, taper } => {
                (r * r + core * core).powf(-0.5 * exponent) * (-0.5 * (r / taper).powi(2)).exp()
            }
        }
    }

    pub fn profile(&self, grid: RadialGrid) -> Result<RadialProfile> {
        RadialProfile::from_fn(grid, |r| self.eval(r))
    }
}

/// Generator of a test family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    GaussianBumps,
    DyadicPackets,
    ScalingOrbit { lambdas: Vec<f64> },
    RandomSmooth,
    /// Cycles through bumps, packets and random sums.
    Mixed,
}

/// Reproducible family: member `i` depends only on `(seed, i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFamily {
    pub kind: FamilyKind,
    pub count: usize,
    pub seed: u64,
}

impl TestFamily {
    pub fn new(kind: FamilyKind, count: usize, seed: u64) -> Self {
        Self { kind, count, seed }
    }

    pub fn len(&self) -> usize {
        match &self.kind {
            FamilyKind::ScalingOrbit { lambdas } => lambdas.len().min(self.count),
            _ => self.count,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn member(&self, i: usize) -> Member {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(i as u64);
        match &self.kind {
            FamilyKind::GaussianBumps => random_bump(&mut rng),
            FamilyKind::DyadicPackets => random_packet(&mut rng),
            FamilyKind::ScalingOrbit { lambdas } => Member::Scaled { lambda: lambdas[i] },
            FamilyKind::RandomSmooth => random_sum(&mut rng),
            FamilyKind::Mixed => match i % 3 {
                0 => random_bump(&mut rng),
                1 => random_packet(&mut rng),
                _ => random_sum(&mut rng),
            },
        }
    }

    pub fn members(&self) -> Vec<Member> {
        (0..self.len()).map(|i| self.member(i)).collect()
    }

    /// Checks that every member is resolved on `grid`.
    pub fn validate(&self, grid: &RadialGrid) -> Result<()> {
        if let FamilyKind::ScalingOrbit { lambdas } = &self.kind {
            if lambdas.iter().any(|l| !(*l > 0.0)) {
                return Err(Error::validation("scaling factors must be positive"));
            }
        }
        if grid.r_max() < 24.0 || grid.dr() > 0.05 {
            return Err(Error::validation("test families need r_max >= 24 and dr <= 0.05"));
        }
        Ok(())
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn random_bump(rng: &mut ChaCha8Rng) -> Member {
    Member::Bump { center: rng.gen_range(0.0..6.0), width: log_uniform(rng, 0.25, 3.0) }
}

fn random_packet(rng: &mut ChaCha8Rng) -> Member {
    Member::Packet { frequency: log_uniform(rng, 0.5, 8.0), sigma: log_uniform(rng, 0.3, 1.5) }
}

fn random_sum(rng: &mut ChaCha8Rng) -> Member {
    let k = rng.gen_range(2..=5);
    let terms = (0..k)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0.0..6.0), log_uniform(rng, 0.3, 2.0)))
        .collect();
    Member::Sum { terms }
}
