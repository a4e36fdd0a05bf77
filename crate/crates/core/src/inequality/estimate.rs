use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ChainFunction, InequalityCase, Member, Ratio, TestFamily};
use crate::calculus::WeightSpec;
use crate::error::Result;
use crate::radial::{RadialGrid, RadialProfile};

/// Ratio of one family member.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemberRatio {
    pub index: usize,
    pub member: Member,
    pub ratio: Ratio,
}

/// Evaluates the case on every member, in parallel.
pub fn evaluate_family(case: &InequalityCase, family: &TestFamily, grid: &RadialGrid) -> Result<Vec<MemberRatio>> {
    family.validate(grid)?;
    (0..family.len())
        .into_par_iter()
        .map(|index| {
            let member = family.member(index);
            let ratio = case.ratio(&member.profile(*grid)?)?;
            Ok(MemberRatio { index, member, ratio })
        })
        .collect()
}

/// Common starting bumps `(centre, width)` of the refinement.
const REFINEMENT_STARTS: [(f64, f64); 4] = [(0.0, 0.3), (0.0, 1.5), (3.0, 0.3), (3.0, 1.5)];

/// Empirical constant: a lower bound on the best constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub case: InequalityCase,
    /// `max(family_max, refined)`.
    pub constant: f64,
    pub argmax: Member,
    pub family_max: f64,
    pub family_min: f64,
    pub members: usize,
    pub violations: usize,
    pub undefined: usize,
    pub refinement_evaluations: usize,
    pub table: Vec<MemberRatio>,
}

/// Maximises the ratio over the family, then refines by coordinate ascent over bump centre and width
/// from fixed starts and from the best bump member.
pub fn estimate_best_constant(
    case: &InequalityCase,
    family: &TestFamily,
    grid: &RadialGrid,
) -> Result<ConstantEstimate> {
    case.require_admissible()?;
    let table = evaluate_family(case, family, grid)?;
    let violations = table.iter().filter(|m| m.ratio == Ratio::Violation).count();
    let undefined = table.iter().filter(|m| m.ratio == Ratio::Undefined).count();
    let finite: Vec<(&MemberRatio, f64)> = table.iter().filter_map(|m| m.ratio.value().map(|v| (m, v))).collect();
    let family_min = finite.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
    let (mut argmax, family_max) = finite
        .iter()
        .fold((Member::Bump { center: 0.0, width: 1.0 }, f64::NEG_INFINITY), |acc, (m, v)| {
            if *v > acc.1 {
                (m.member.clone(), *v)
            } else {
                acc
            }
        });
    let mut starts: Vec<(f64, f64)> = REFINEMENT_STARTS.to_vec();
    if let Some((m, _)) = finite
        .iter()
        .filter(|(m, _)| matches!(m.member, Member::Bump { .. }))
        .max_by(|a, b| a.1.total_cmp(&b.1))
    {
        if let Member::Bump { center, width } = m.member {
            starts.push((center, width));
        }
    }
    let mut constant = family_max;
    let mut evaluations = 0;
    for (c, w) in starts {
        let (best, value, evals) = ascend(case, grid, c, w)?;
        evaluations += evals;
        if value > constant {
            constant = value;
            argmax = best;
        }
    }
    Ok(ConstantEstimate {
        case: case.clone(),
        constant,
        argmax,
        family_max,
        family_min,
        members: table.len(),
        violations,
        undefined,
        refinement_evaluations: evaluations,
        table,
    })
}

fn ascend(case: &InequalityCase, grid: &RadialGrid, c0: f64, w0: f64) -> Result<(Member, f64, usize)> {
    let w_lo = (4.0 * grid.dr()).max(0.1).ln();
    let w_hi = 4f64.ln();
    let eval = |c: f64, lw: f64| -> Result<f64> {
        let m = Member::Bump { center: c, width: lw.exp() };
        Ok(case.ratio(&m.profile(*grid)?)?.value().unwrap_or(f64::NEG_INFINITY))
    };
    let mut x = [c0.clamp(0.0, 8.0), w0.ln().clamp(w_lo, w_hi)];
    let bounds = [(0.0, 8.0), (w_lo, w_hi)];
    let mut best = eval(x[0], x[1])?;
    let mut evals = 1;
    let mut step = [0.5, 0.5];
    while step[0] > 1e-3 && evals < 120 {
        let mut improved = false;
        for k in 0..2 {
            for dir in [1.0, -1.0] {
                let mut y = x;
                y[k] = (y[k] + dir * step[k]).clamp(bounds[k].0, bounds[k].1);
                if y == x {
                    continue;
                }
                let v = eval(y[0], y[1])?;
                evals += 1;
                if v > best {
                    best = v;
                    x = y;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step = [0.5 * step[0], 0.5 * step[1]];
        }
    }
    Ok((Member::Bump { center: x[0], width: x[1].exp() }, best, evals))
}

/// Base profile of a scaling orbit `f(lambda r)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepBase {
    /// `e^(-r^2/2)`.
    Gaussian,
    /// `(1 - r^2/n) e^(-r^2/2)`, which has zero mean.
    MeanZero,
}

impl SweepBase {
    pub fn eval(&self, n: usize, r: f64) -> f64 {
        let g = (-0.5 * r * r).exp();
        match self {
            Self::Gaussian => g,
            Self::MeanZero => (1.0 - r * r / n as f64) * g,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub ratio: Ratio,
}

/// Ratio along a scaling orbit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub case: InequalityCase,
    pub admissible: bool,
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of `ln ratio` against `ln lambda`.
    pub slope: Option<f64>,
    /// Slope signed so that positive means growth along the list order.
    pub growth_exponent: Option<f64>,
    /// Largest ratio over the ratio at the first listed `lambda`.
    pub growth_factor: Option<f64>,
}

/// Evaluates the case along `f(lambda r)` for each listed `lambda`.
pub fn boundary_violation_sweep(
    case: &InequalityCase,
    base: SweepBase,
    lambdas: &[f64],
    grid: &RadialGrid,
) -> Result<SweepReport> {
    let n = grid.dim();
    let rows: Vec<SweepRow> = lambdas
        .par_iter()
        .map(|&lambda| {
            let f = RadialProfile::from_fn(*grid, |r| base.eval(n, lambda * r))?;
            Ok(SweepRow { lambda, ratio: case.ratio(&f)? })
        })
        .collect::<Result<_>>()?;
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|row| row.ratio.value().filter(|v| *v > 0.0).map(|v| (row.lambda.ln(), v.ln())))
        .collect();
    let slope = (pts.len() >= 2).then(|| {
        let m = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
        let (mx, my) = (sx / m, sy / m);
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    });
    let direction = match (lambdas.first(), lambdas.last()) {
        (Some(a), Some(b)) if b < a => -1.0,
        _ => 1.0,
    };
    let growth_factor = rows.first().and_then(|r0| r0.ratio.value()).map(|v0| {
        rows.iter().filter_map(|r| r.ratio.value()).fold(f64::NEG_INFINITY, f64::max) / v0
    });
    Ok(SweepReport {
        case: case.clone(),
        admissible: case.admissible(),
        rows,
        slope,
        growth_exponent: slope.map(|s| s * direction),
        growth_factor,
    })
}

/// Chain-rule ratio for a single profile.
pub fn check_chain_rule(
    u: &RadialProfile,
    function: ChainFunction,
    theta: f64,
    w1: WeightSpec,
    w2: WeightSpec,
) -> Result<Ratio> {
    InequalityCase::ChainRule { n: u.grid().dim(), theta, function, w1, w2 }.ratio(u)
}
