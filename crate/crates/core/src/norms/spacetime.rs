use serde::{Deserialize, Serialize};

use crate::calculus::{lp_spectrum, DyadicCutoff};
use crate::error::{Error, Result};
use crate::radial::{forward_transform, inverse_transform, RadialGrid, RadialProfile};

use super::{dyadic_norms, Density};

/// Trapezoid weights for a (possibly non-uniform) time grid.
pub fn time_weights(times: &[f64]) -> Vec<f64> {
    let mut w = vec![0.0; times.len()];
    for k in 1..times.len() {
        let h = times[k] - times[k - 1];
        w[k - 1] += 0.5 * h;
        w[k] += 0.5 * h;
    }
    w
}

/// `|S^(n-1)| int d(r) weight(r) r^(n-1) dr` over nodes `lo..hi` (origin node excluded).
fn spatial_integral(
    grid: &RadialGrid,
    d: &[f64],
    range: std::ops::Range<usize>,
    weight: impl Fn(f64) -> f64,
) -> f64 {
    let n = grid.dim() as i32;
    let mut sum = 0.0;
    for i in range.start.max(1)..range.end {
        let r = grid.r(i);
        sum += grid.trapezoid_weight(i) * d[i] * weight(r) * r.powi(n - 1);
    }
    sum * grid.dr() * grid.sphere_area()
}

fn full(grid: &RadialGrid) -> std::ops::Range<usize> {
    0..grid.len()
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu > 0.0 && mu <= 0.5) {
        return Err(Error::validation(format!("mu = {mu} must lie in (0, 1/2]")));
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) {
        return Err(Error::validation("final time must be positive"));
    }
    Ok(())
}

fn sup_energy(d: &Density) -> f64 {
    let g = d.grid();
    d.values()
        .iter()
        .map(|s| spatial_integral(g, s, full(g), |_| 1.0))
        .fold(0.0, f64::max)
        .sqrt()
}

fn spacetime_integral(d: &Density, weight: impl Fn(f64) -> f64 + Copy) -> f64 {
    let g = d.grid();
    time_weights(d.times())
        .iter()
        .zip(d.values())
        .map(|(w, s)| w * spatial_integral(g, s, full(g), weight))
        .sum()
}

/// `||w||_{L^inf L^2} + T^(-mu/2) ||r^(-(1-mu)/2) w||_{L^2_{t,x}}` for the density `|w|^2`.
pub fn xt_norm(d: &Density, mu: f64) -> Result<f64> {
    check_mu(mu)?;
    let t = d.final_time();
    check_time(t)?;
    let weighted = spacetime_integral(d, |r| r.powf(mu - 1.0));
    Ok(sup_energy(d) + t.powf(-0.5 * mu) * weighted.sqrt())
}

/// Four-term local energy norm of the density `|du|^2`.
pub fn le_norm(d: &Density, mu: f64, mu1: f64) -> Result<f64> {
    check_mu(mu)?;
    if !(mu1 > 0.0) {
        return Err(Error::validation(format!("mu1 = {mu1} must be positive")));
    }
    let t = d.final_time();
    check_time(t)?;
    let jt = (2.0 + t * t).sqrt();
    let bracket = |r: f64| 2.0 + r * r;
    let a = spacetime_integral(d, |r| r.powf(mu - 1.0) * bracket(r).powf(-0.5 * (mu + mu1)));
    let b = spacetime_integral(d, |r| r.powf(mu - 1.0));
    let c = spacetime_integral(d, |r| r.powf(mu - 1.0) * bracket(r).powf(-0.5 * mu));
    Ok(sup_energy(d) + a.sqrt() + jt.powf(-0.5 * mu) * b.sqrt() + (c / jt.ln()).sqrt())
}

/// Dyadic local energy functional: near-origin weighted piece, worst dyadic shell, energy.
pub fn kss_x1_norm(tilde: &Density, grad: &Density, mu: f64) -> Result<f64> {
    check_mu(mu)?;
    check_time(tilde.final_time())?;
    let g = *tilde.grid();
    let tw = time_weights(tilde.times());
    let shell = |lo: f64, hi: f64, weight: &dyn Fn(f64) -> f64| -> f64 {
        let i0 = (lo / g.dr()).ceil() as usize;
        let i1 = ((hi / g.dr()).floor() as usize + 1).min(g.len());
        tw.iter()
            .zip(tilde.values())
            .map(|(w, s)| w * spatial_integral(&g, s, i0..i1, weight))
            .sum()
    };
    let near = shell(0.0, 1.0, &|r: f64| r.powf(mu - 1.0));
    let mut worst: f64 = 0.0;
    let mut radius = 1.0;
    while 0.5 * radius < g.r_max() {
        worst = worst.max(shell(0.5 * radius, radius, &|r: f64| 1.0 / r));
        radius *= 2.0;
    }
    Ok((near + worst + sup_energy(grad).powi(2)).sqrt())
}

/// Upper bound for the dual norm from radial threshold splittings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualBound {
    /// Smallest cost over all thresholds.
    pub value: f64,
    /// Threshold radius: the forcing beyond it is charged to `L^1 L^2`.
    pub r_star: f64,
    /// Cost with everything in `L^1_t L^2_x`.
    pub energy_only: f64,
    /// Cost with everything in the weighted `L^2_{t,x}` piece.
    pub weighted_only: f64,
}

/// Dual-norm upper bound for the density `|F|^2`.
///
/// Every split `F = F 1_{r > R} + F 1_{r <= R}` costs
/// `||F 1_{r>R}||_{L^1 L^2} + T^(mu/2) ||r^((1-mu)/2) F 1_{r<=R}||_{L^2}`; the minimum over node
/// thresholds, including both pure splittings, is returned.
pub fn xt_dual_upper(d: &Density, mu: f64) -> Result<DualBound> {
    check_mu(mu)?;
    let t = d.final_time();
    check_time(t)?;
    let g = *d.grid();
    let n = g.dim() as i32;
    let tw = time_weights(d.times());
    let scale = g.dr() * g.sphere_area();
    // Prefix sums over nodes of the plain and weighted squared densities.
    let mut plain: Vec<Vec<f64>> = Vec::with_capacity(d.times().len());
    let mut weighted: Vec<Vec<f64>> = Vec::with_capacity(d.times().len());
    for s in d.values() {
        let mut p = vec![0.0; g.len() + 1];
        let mut q = vec![0.0; g.len() + 1];
        for i in 0..g.len() {
            let r = g.r(i);
            let base = if i == 0 { 0.0 } else { g.trapezoid_weight(i) * s[i] * r.powi(n - 1) * scale };
            p[i + 1] = p[i] + base;
            q[i + 1] = q[i] + base * r.powf(1.0 - mu);
        }
        plain.push(p);
        weighted.push(q);
    }
    let len = g.len();
    let cost = |cut: usize| -> f64 {
        let mut far = 0.0;
        let mut near = 0.0;
        for m in 0..tw.len() {
            far += tw[m] * (plain[m][len] - plain[m][cut]).max(0.0).sqrt();
            near += tw[m] * weighted[m][cut];
        }
        far + t.powf(0.5 * mu) * near.max(0.0).sqrt()
    };
    let mut best = (f64::INFINITY, 0);
    for cut in 0..=len {
        let c = cost(cut);
        if c < best.0 {
            best = (c, cut);
        }
    }
    Ok(DualBound {
        value: best.0,
        r_star: if best.1 == 0 { 0.0 } else { g.r(best.1 - 1) },
        energy_only: cost(0),
        weighted_only: cost(len),
    })
}

/// Besov-type local energy norm
/// `||w||_{L^inf B^0_{2,q}} + T^(-mu/2) || r^(-(1-mu)/2) P_j w ||_{l^q_j L^2_{t,x}}`
/// for a vector field given component by component as time stacks.
pub fn xt_besov_norm(
    grid: &RadialGrid,
    times: &[f64],
    components: &[Vec<Vec<f64>>],
    mu: f64,
    q: f64,
) -> Result<f64> {
    check_mu(mu)?;
    let t = *times.last().ok_or_else(|| Error::validation("empty time grid"))?;
    check_time(t)?;
    if !(q >= 1.0) {
        return Err(Error::validation("q must be >= 1"));
    }
    let (j_min, j_max) = DyadicCutoff::band(grid);
    let nj = (j_max - j_min + 1) as usize;
    let tw = time_weights(times);
    let mut sup_term: f64 = 0.0;
    let mut weighted = vec![0.0; nj];
    for (m, w) in tw.iter().enumerate() {
        let mut energy = vec![0.0; nj];
        for comp in components {
            let p = RadialProfile::from_parts(*grid, comp[m].clone());
            let spec = forward_transform(&p);
            for (idx, (_, v)) in dyadic_norms(&spec).into_iter().enumerate() {
                energy[idx] += v * v;
            }
            if *w > 0.0 {
                for (idx, j) in (j_min..=j_max).enumerate() {
                    let piece = inverse_transform(&lp_spectrum(&spec, j));
                    let sq: Vec<f64> = piece.values().iter().map(|v| v * v).collect();
                    weighted[idx] += w * spatial_integral(grid, &sq, 0..grid.len(), |r| r.powf(mu - 1.0));
                }
            }
        }
        let slice = super::lq_sum(energy.iter().map(|e| e.sqrt()), q);
        sup_term = sup_term.max(slice);
    }
    let local = super::lq_sum(weighted.iter().map(|e| e.sqrt()), q);
    Ok(sup_term + t.powf(-0.5 * mu) * local)
}
