use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{data_norm, IterationRun};
use crate::calculus::fractional_spectrum;
use crate::error::{Error, Result};
use crate::flags::{Flag, Flags};
use crate::norms::{besov_norm, dyadic_norms, xt_besov_norm, xt_norm, Component};
use crate::radial::{forward_transform, RadialProfile};

/// Relative size below which an iterate difference counts as converged.
const NEGLIGIBLE: f64 = 1e-12;

/// Number of stored times probed per iterate for the embedding constant.
const EMBEDDING_SAMPLES: usize = 8;

/// One entry of the uniform-bound table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformBoundRow {
    pub k: u32,
    pub theta: f64,
    /// The Besov variant with `l^1` over dyadic pieces.
    pub besov: bool,
    pub norm: f64,
    pub data_norm: f64,
    pub ratio: f64,
    /// Ratio exceeds twice the running maximum of earlier iterates.
    pub jump: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformBoundReport {
    pub rows: Vec<UniformBoundRow>,
    /// Largest ratio over all rows.
    pub max_ratio: f64,
    /// Iterates with at least one jump.
    pub jumps: Vec<u32>,
    /// Largest `||u||_inf / ||u||_{B^{3/2}_{2,1}}` over probed slices (dimension three only).
    pub embedding_constant: Option<f64>,
}

/// Regularity grid `{s0 - 1} U [0, s - 1]` with five points on the interval.
pub fn theta_grid(s: f64, s0: f64) -> Vec<f64> {
    let mut grid: Vec<f64> = (0..5).map(|i| (s - 1.0) * i as f64 / 4.0).collect();
    if !grid.iter().any(|t| (t - (s0 - 1.0)).abs() < 1e-12) {
        grid.push(s0 - 1.0);
    }
    grid.sort_by(f64::total_cmp);
    grid
}

fn besov_data_norm(u0: &RadialProfile, u1: &RadialProfile) -> f64 {
    let a = dyadic_norms(&fractional_spectrum(&forward_transform(u0), 1.5));
    let b = dyadic_norms(&fractional_spectrum(&forward_transform(u1), 0.5));
    a.iter().zip(&b).map(|((_, x), (_, y))| x.hypot(*y)).sum()
}

/// Tabulates `||d D^theta u_k||_{X_T} / ||(grad u0^(k), u1^(k))||_{H^theta}` over iterates and a regularity grid.
pub fn uniform_bound_report(run: &IterationRun) -> Result<UniformBoundReport> {
    let thetas = theta_grid(run.s, run.s0);
    let besov = run.grid.dim() == 3;
    let mut jobs: Vec<(f64, bool)> = thetas.iter().map(|&t| (t, false)).collect();
    if besov {
        jobs.push((0.5, true));
    }
    let mut rows = Vec::new();
    let mut running = vec![0.0f64; jobs.len()];
    let mut jumps = Vec::new();
    let mut embedding: Option<f64> = None;
    for it in &run.iterates {
        let measured: Vec<Result<(f64, f64)>> = jobs
            .par_iter()
            .map(|&(theta, is_besov)| {
                let lifted = it.field.fractional(theta)?;
                if is_besov {
                    let comps = [lifted.radial_gradient(), (0..lifted.len()).map(|m| lifted.ut(m).to_vec()).collect()];
                    let norm = xt_besov_norm(&run.grid, lifted.times(), &comps, run.mu, 1.0)?;
                    Ok((norm, besov_data_norm(&it.data.0, &it.data.1)))
                } else {
                    let norm = xt_norm(&lifted.density(Component::Gradient), run.mu)?;
                    Ok((norm, data_norm(&it.data.0, &it.data.1, theta)?))
                }
            })
            .collect();
        let mut jumped = false;
        for (idx, res) in measured.into_iter().enumerate() {
            let (norm, dn) = res?;
            let ratio = if dn > 0.0 { norm / dn } else { 0.0 };
            let jump = running[idx] > 0.0 && ratio > 2.0 * running[idx];
            jumped |= jump;
            running[idx] = running[idx].max(ratio);
            rows.push(UniformBoundRow { k: it.k, theta: jobs[idx].0, besov: jobs[idx].1, norm, data_norm: dn, ratio, jump });
        }
        if jumped {
            jumps.push(it.k);
        }
        if besov {
            let len = it.field.len();
            let step = (len / EMBEDDING_SAMPLES).max(1);
            for m in (0..len).step_by(step) {
                let p = it.field.u_profile(m);
                let b = besov_norm(&p, 1.5, 1.0)?;
                if b > 0.0 {
                    let c = p.max_abs() / b;
                    embedding = Some(embedding.map_or(c, |e: f64| e.max(c)));
                }
            }
        }
    }
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(UniformBoundReport { rows, max_ratio, jumps, embedding_constant: embedding })
}

/// Difference norm between iterates `k - 1` and `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DifferenceRow {
    pub k: u32,
    pub value: f64,
    /// `value / previous value`, absent for the first row.
    pub ratio: Option<f64>,
    pub partial_sum: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Convergent,
    Inconclusive,
    Divergent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub rows: Vec<DifferenceRow>,
    /// `exp` of the least-squares slope of `log value` against `k`.
    pub fit_ratio: Option<f64>,
    /// Two-standard-error band of the fitted ratio.
    pub fit_band: Option<(f64, f64)>,
    pub max_successive_ratio: Option<f64>,
    pub verdict: Verdict,
    /// Geometric tail `value_last q / (1 - q)` bounding the distance of the last iterate to the limit.
    pub limit_distance: Option<f64>,
    pub t_final: f64,
    pub data_size: f64,
    pub flags: Flags,
}

/// Fits the decay of successive difference norms.
pub fn convergence_report(run: &IterationRun) -> Result<ConvergenceReport> {
    if run.iterates.len() < 4 {
        return Err(Error::validation("convergence report needs at least four iterates"));
    }
    let values = run.difference_norms()?;
    let scale = values.iter().copied().fold(0.0, f64::max).max(run.data_size);
    let mut rows = Vec::with_capacity(values.len());
    let mut sum = 0.0;
    for (i, &v) in values.iter().enumerate() {
        sum += v;
        let ratio = (i > 0 && values[i - 1] > 0.0).then(|| v / values[i - 1]);
        rows.push(DifferenceRow { k: run.iterates[i + 1].k, value: v, ratio, partial_sum: sum });
    }
    let floor = NEGLIGIBLE * scale;
    let points: Vec<(f64, f64)> = rows.iter().filter(|r| r.value > floor).map(|r| (r.k as f64, r.value.ln())).collect();
    let fit = if points.len() >= 2 { Some(log_linear_fit(&points)) } else { None };
    let fit_ratio = fit.map(|(slope, _)| slope.exp());
    let fit_band = fit.map(|(slope, se)| ((slope - 2.0 * se).exp(), (slope + 2.0 * se).exp()));
    let max_successive_ratio = rows.iter().filter(|r| r.value > floor).filter_map(|r| r.ratio).reduce(f64::max);
    let last = values[values.len() - 1];
    let mut flags = Flags::new();
    let verdict = if last <= floor {
        Verdict::Convergent
    } else {
        match (fit_ratio, fit_band) {
            (Some(q), _) if q >= 1.0 => Verdict::Divergent,
            (Some(_), Some((_, hi))) if hi < 1.0 => Verdict::Convergent,
            _ => Verdict::Inconclusive,
        }
    };
    if verdict == Verdict::Divergent {
        flags.insert(Flag::NonContraction);
    }
    let limit_distance = match (verdict, fit_ratio) {
        (Verdict::Convergent, _) if last <= floor => Some(last),
        (Verdict::Convergent, Some(q)) => Some(last * q / (1.0 - q)),
        _ => None,
    };
    Ok(ConvergenceReport {
        rows,
        fit_ratio,
        fit_band,
        max_successive_ratio,
        verdict,
        limit_distance,
        t_final: run.t_final,
        data_size: run.data_size,
        flags,
    })
}

/// Least-squares slope and its standard error.
fn log_linear_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    if points.len() < 3 {
        return (slope, 0.0);
    }
    let resid: f64 = points.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    (slope, (resid / (n - 2.0) / sxx).sqrt())
}
