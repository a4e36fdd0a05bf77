use serde::{Deserialize, Serialize};

use super::FieldSource;
use crate::error::{Error, Result};
use crate::fd;
use crate::norms::SpaceTimeField;

/// Slack factor multiplying `(dt^2 + dr^2) max E` in the energy inequality check.
pub const ENERGY_SLACK_FACTOR: f64 = 10.0;

/// Comparison of `|dE/dt|` against `int |F| |u_t| + (2 / delta0) int |dg| e0` on stored levels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyCheck {
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    pub rate: Vec<f64>,
    pub bound: Vec<f64>,
    /// `max (|dE/dt| - bound)` over interior times.
    pub worst_excess: f64,
    pub slack: f64,
    pub passed: bool,
}

/// Checks the energy inequality on the uniformly spaced prefix of the stored times.
pub fn energy_drift_check(
    field: &SpaceTimeField,
    coeff: &dyn FieldSource,
    forcing: &dyn FieldSource,
    delta0: f64,
) -> Result<EnergyCheck> {
    let all = field.times();
    if all.len() < 3 {
        return Err(Error::validation("energy check needs at least three stored times"));
    }
    let dt = all[1] - all[0];
    let uniform = 1 + all.windows(2).take_while(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt.max(1.0)).count();
    if uniform < 3 {
        return Err(Error::validation("energy check needs three uniformly spaced stored times"));
    }
    let times = all[..uniform].to_vec();
    let grid = *field.grid();
    let nodes = grid.nodes();
    let dr = grid.dr();
    let area = grid.sphere_area();
    let vol: Vec<f64> = (0..grid.len())
        .map(|i| grid.trapezoid_weight(i) * dr * grid.r(i).powi(grid.dim() as i32 - 1))
        .collect();
    let len = grid.len();
    let (mut g, mut gt, mut gr, mut f) = (vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len]);
    let (mut gp, mut gm) = (vec![0.0; len], vec![0.0; len]);
    let mut energy = Vec::with_capacity(times.len());
    let mut bound = Vec::with_capacity(times.len());
    for (m, &t) in times.iter().enumerate() {
        let u = field.u(m);
        let ut = field.ut(m);
        let ur = fd::derivative2(u, dr);
        coeff.fill(t, &nodes, &mut g);
        let h = 1e-5 * (1.0 + t.abs());
        coeff.fill(t + h, &nodes, &mut gp);
        coeff.fill(t - h, &nodes, &mut gm);
        for i in 0..len {
            gt[i] = (gp[i] - gm[i]) / (2.0 * h);
        }
        radial_slope(&nodes, coeff, t, &mut gr, &mut gp, &mut gm);
        forcing.fill(t, &nodes, &mut f);
        let (mut e, mut b) = (0.0, 0.0);
        for i in 0..len {
            let e0 = 0.5 * (ut[i] * ut[i] + (1.0 + g[i]) * ur[i] * ur[i]);
            let dg = gt[i].hypot(gr[i]);
            e += vol[i] * e0;
            b += vol[i] * (f[i].abs() * ut[i].abs() + 2.0 / delta0 * dg * e0);
        }
        energy.push(area * e);
        bound.push(area * b);
    }
    let mut rate = vec![0.0; times.len()];
    for m in 1..times.len() - 1 {
        rate[m] = (energy[m + 1] - energy[m - 1]) / (2.0 * dt);
    }
    let worst_excess = (1..times.len() - 1)
        .map(|m| rate[m].abs() - bound[m])
        .fold(f64::NEG_INFINITY, f64::max);
    let e_max = energy.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let slack = ENERGY_SLACK_FACTOR * (dt * dt + dr * dr) * e_max;
    Ok(EnergyCheck { times, energy, rate, bound, worst_excess, slack, passed: worst_excess <= slack })
}

fn radial_slope(nodes: &[f64], coeff: &dyn FieldSource, t: f64, out: &mut [f64], p: &mut [f64], m: &mut [f64]) {
    let h = 1e-5;
    let shifted: Vec<f64> = nodes.iter().map(|r| r + h).collect();
    coeff.fill(t, &shifted, p);
    let shifted: Vec<f64> = nodes.iter().map(|r| (r - h).abs()).collect();
    coeff.fill(t, &shifted, m);
    for i in 0..out.len() {
        out[i] = (p[i] - m[i]) / (2.0 * h);
    }
}
