use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::calculus::{apply_weight, fractional_derivative, WeightSpec};
use crate::error::{Error, Result};
use crate::norms::{besov_norm, dyadic_pieces, sobolev_norm};
use crate::radial::{integrate_weighted, lp_norm, RadialProfile};

/// Nonlinearity of the chain-rule case with its derivative modulus `G` and bound `mu(tau)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainFunction {
    /// `F(u) = u^2`, `G(u) = 2 |u|`, `mu = 1`.
    Square,
    /// `F(u) = sin u`, `G(u) = 1`, `mu = 1/2`.
    Sine,
}

impl ChainFunction {
    pub fn apply(&self, u: f64) -> f64 {
        match self {
            Self::Square => u * u,
            Self::Sine => u.sin(),
        }
    }

    pub fn modulus(&self, u: f64) -> f64 {
        match self {
            Self::Square => 2.0 * u.abs(),
            Self::Sine => 1.0,
        }
    }

    /// Constant `mu` with `|F'(t v + (1 - t) w)| <= mu (G(v) + G(w))`.
    pub fn mu_bound(&self) -> f64 {
        match self {
            Self::Square => 1.0,
            Self::Sine => 0.5,
        }
    }
}

/// A weighted Sobolev-type inequality `LHS(f) <= C RHS(f)` for radial `f`.
///
/// Lebesgue exponents may be infinite and serialize as `"inf"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum InequalityCase {
    /// `sup r^(n/2 - s) |u|` against `B^(1/2)_(2,1)` at `s = 1/2` and `H^s` otherwise.
    Trace { n: usize, s: f64 },
    /// `||r^(n(1/2 - 1/p) - s) u||_(L^p_r L^2_w)` against `H^s`.
    TraceLp {
        n: usize,
        s: f64,
        #[serde(with = "crate::serde_ext::extended_float")]
        p: f64,
    },
    /// `||r^(n(1/2 - 1/p) - alpha + beta) u||_(L^p_r L^2_w)` against `||r^beta D^alpha u||_2`;
    /// at `p = inf` the left side is the square sum over dyadic pieces of the weighted supremum.
    WeightedTrace {
        n: usize,
        alpha: f64,
        beta: f64,
        #[serde(with = "crate::serde_ext::extended_float")]
        p: f64,
    },
    /// `||r^(beta - alpha) u||_2` against `||r^beta D^alpha u||_2`.
    SteinWeiss { n: usize, alpha: f64, beta: f64 },
    /// `||r^(-alpha - s) <r>^(alpha - beta) u||_2` against `||r^(-alpha) <r>^(alpha - beta) D^s u||_2`.
    WeightedHardy { n: usize, s: f64, alpha: f64, beta: f64 },
    /// Weighted square function `||w P_j f||_(l^2 L^2)` against `||w f||_2`.
    LpSquare { n: usize, weight: WeightSpec },
    /// `||w1 w2 2^(j theta) P_j F(u)||_(l^2 L^2)` against `||w1 2^(j theta) P_j u||_(l^2 L^2) ||w2 G(u)||_inf`.
    ChainRule { n: usize, theta: f64, function: ChainFunction, w1: WeightSpec, w2: WeightSpec },
    /// `||r^(-alpha + (n-1)(1/2 - 1/p)) <r>^(alpha - beta) u||_(L^p_r L^2_w)`
    /// against `||r^(-alpha) <r>^(alpha - beta) D^(1/2 - 1/p) u||_2`.
    WeightedTraceRadial {
        n: usize,
        alpha: f64,
        beta: f64,
        #[serde(with = "crate::serde_ext::extended_float")]
        p: f64,
    },
    /// Product case `||r^((1-mu)/2) D^theta (u u)||_2`
    /// against `||r^(-(1-mu)/2) D^theta u||_2 ||u||_(H^((n-2)/2 + mu))`.
    Leibniz { n: usize, mu: f64, theta: f64 },
}

/// Outcome of one ratio evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Ratio {
    Finite(f64),
    /// Right side vanishes while the left side does not.
    Violation,
    /// Both sides vanish.
    Undefined,
}

impl Ratio {
    pub fn from_sides(lhs: f64, rhs: f64) -> Result<Self> {
        if !(lhs.is_finite() && rhs.is_finite()) {
            return Err(Error::numerical(format!("non-finite sides {lhs} / {rhs}")));
        }
        Ok(if rhs > 0.0 {
            Ratio::Finite(lhs / rhs)
        } else if lhs > 0.0 {
            Ratio::Violation
        } else {
            Ratio::Undefined
        })
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Ratio::Finite(v) => Some(*v),
            _ => None,
        }
    }
}

/// Weighted `L^2` norm; weights too singular for the origin are cut off at the first node.
fn weighted_l2(f: &RadialProfile, a: f64, b: f64) -> Result<f64> {
    let n = f.grid().dim() as f64;
    if 2.0 * a > -n {
        return Ok(integrate_weighted(f, 2.0 * a, 2.0 * b)?.sqrt());
    }
    let g = f.grid();
    let w = WeightSpec::new(a, b);
    let sum: f64 = (1..g.len())
        .map(|i| {
            let r = g.r(i);
            g.trapezoid_weight(i) * (w.value(r) * f.values()[i]).powi(2) * r.powf(n - 1.0)
        })
        .sum();
    Ok((sum * g.dr() * g.sphere_area()).sqrt())
}

fn weighted_lp(f: &RadialProfile, a: f64, b: f64, p: f64) -> Result<f64> {
    lp_norm(&apply_weight(f, &WeightSpec::new(a, b)), p)
}

fn weighted_sup(f: &RadialProfile, w: &WeightSpec) -> f64 {
    apply_weight(f, w).max_abs()
}

fn square_sum(f: &RadialProfile, w: &WeightSpec, theta: f64) -> Result<f64> {
    let mut sum = 0.0;
    for (j, piece) in dyadic_pieces(f) {
        let v = weighted_l2(&piece, w.a, w.b)?;
        sum += (2f64.powf(j as f64 * theta) * v).powi(2);
    }
    Ok(sum.sqrt())
}

impl InequalityCase {
    pub fn id(&self) -> &'static str {
        match self {
            Self::Trace { .. } => "trace",
            Self::TraceLp { .. } => "trace_lp",
            Self::WeightedTrace { .. } => "weighted_trace",
            Self::SteinWeiss { .. } => "stein_weiss",
            Self::WeightedHardy { .. } => "weighted_hardy",
            Self::LpSquare { .. } => "lp_square",
            Self::ChainRule { .. } => "chain_rule",
            Self::WeightedTraceRadial { .. } => "weighted_trace_radial",
            Self::Leibniz { .. } => "leibniz",
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            Self::Trace { n, .. }
            | Self::TraceLp { n, .. }
            | Self::WeightedTrace { n, .. }
            | Self::SteinWeiss { n, .. }
            | Self::WeightedHardy { n, .. }
            | Self::LpSquare { n, .. }
            | Self::ChainRule { n, .. }
            | Self::WeightedTraceRadial { n, .. }
            | Self::Leibniz { n, .. } => n,
        }
    }

    /// Numeric parameters keyed by name, for reports.
    pub fn params(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: f64| {
            m.insert(k.to_string(), v);
        };
        put("n", self.dim() as f64);
        match *self {
            Self::Trace { s, .. } => put("s", s),
            Self::TraceLp { s, p, .. } => {
                put("s", s);
                put("p", p);
            }
            Self::WeightedTrace { alpha, beta, p, .. } | Self::WeightedTraceRadial { alpha, beta, p, .. } => {
                put("alpha", alpha);
                put("beta", beta);
                put("p", p);
            }
            Self::SteinWeiss { alpha, beta, .. } => {
                put("alpha", alpha);
                put("beta", beta);
            }
            Self::WeightedHardy { s, alpha, beta, .. } => {
                put("s", s);
                put("alpha", alpha);
                put("beta", beta);
            }
            Self::LpSquare { weight, .. } => {
                put("a", weight.a);
                put("b", weight.b);
            }
            Self::ChainRule { theta, w1, w2, .. } => {
                put("theta", theta);
                put("w1_a", w1.a);
                put("w1_b", w1.b);
                put("w2_a", w2.a);
                put("w2_b", w2.b);
            }
            Self::Leibniz { mu, theta, .. } => {
                put("mu", mu);
                put("theta", theta);
            }
        }
        m
    }

    /// Reason the parameters fall outside the admissible window, if they do.
    pub fn window_violation(&self) -> Option<String> {
        let nf = self.dim() as f64;
        let half = 0.5 * nf;
        let fail = |ok: bool, what: &str| (!ok).then(|| format!("{}: {what}", self.id()));
        match *self {
            Self::Trace { s, .. } => fail((0.5..half).contains(&s), "requires 1/2 <= s < n/2"),
            Self::TraceLp { s, p, .. } => fail(
                (2.0..f64::INFINITY).contains(&p) && s >= 0.5 - 1.0 / p && s < half,
                "requires 2 <= p < inf and 1/2 - 1/p <= s < n/2",
            ),
            Self::WeightedTrace { alpha, beta, p, .. } => fail(
                p >= 2.0 && alpha > 0.5 - 1.0 / p && alpha < half && beta > alpha - half && beta < half,
                "requires p >= 2, 1/2 - 1/p < alpha < n/2, alpha - n/2 < beta < n/2",
            ),
            Self::SteinWeiss { alpha, beta, .. } => fail(
                alpha > 0.0 && alpha < nf && beta > alpha - half && beta < half,
                "requires 0 < alpha < n and alpha - n/2 < beta < n/2",
            ),
            Self::WeightedHardy { s, alpha, beta, .. } => fail(
                s >= 0.0 && alpha >= 0.0 && alpha <= beta && beta < half - s,
                "requires s >= 0 and 0 <= alpha <= beta < n/2 - s",
            ),
            Self::LpSquare { n, weight } => fail(weight.powi(2.0).is_ap(n, 2.0), "requires w^2 in A_2"),
            Self::ChainRule { n, theta, w1, w2, .. } => fail(
                theta > 0.0
                    && theta < 1.0
                    && w1.powi(2.0).is_ap(n, 2.0)
                    && w1.mul(&w2).powi(2.0).is_ap(n, 2.0)
                    && w2.powi(-1.0).is_ap(n, 1.0),
                "requires 0 < theta < 1, w1^2 and (w1 w2)^2 in A_2, 1/w2 in A_1",
            ),
            Self::WeightedTraceRadial { alpha, beta, p, .. } => fail(
                (2.0..f64::INFINITY).contains(&p) && alpha >= 0.0 && alpha <= beta && beta <= 0.5 * (nf - 1.0),
                "requires 2 <= p < inf and 0 <= alpha <= beta <= (n-1)/2",
            ),
            Self::Leibniz { n, mu, theta } => fail(
                n >= 3 && mu > 0.0 && mu < 1.0 && theta.abs() <= 0.5 * (nf - 2.0) + mu,
                "requires n >= 3, 0 < mu < 1, |theta| <= (n-2)/2 + mu",
            ),
        }
    }

    pub fn admissible(&self) -> bool {
        self.window_violation().is_none()
    }

    /// Errors with a window error unless the case is admissible.
    pub fn require_admissible(&self) -> Result<()> {
        match self.window_violation() {
            Some(msg) => Err(Error::window(msg)),
            None => Ok(()),
        }
    }

    /// Left and right sides evaluated on `f`.
    pub fn sides(&self, f: &RadialProfile) -> Result<(f64, f64)> {
        let nf = f.grid().dim() as f64;
        if f.grid().dim() != self.dim() {
            return Err(Error::validation(format!(
                "case is posed in dimension {} but the profile lives in dimension {}",
                self.dim(),
                f.grid().dim()
            )));
        }
        let half = 0.5 * nf;
        Ok(match *self {
            Self::Trace { s, .. } => {
                let lhs = weighted_lp(f, half - s, 0.0, f64::INFINITY)?;
                let rhs = if s == 0.5 { besov_norm(f, 0.5, 1.0)? } else { sobolev_norm(f, s)? };
                (lhs, rhs)
            }
            Self::TraceLp { s, p, .. } => (weighted_lp(f, nf * (0.5 - 1.0 / p) - s, 0.0, p)?, sobolev_norm(f, s)?),
            Self::WeightedTrace { alpha, beta, p, .. } => {
                let lhs = if p.is_infinite() {
                    let w = WeightSpec::power(half - alpha + beta);
                    let area = f.grid().sphere_area();
                    dyadic_pieces(f)
                        .iter()
                        .map(|(_, piece)| area * weighted_sup(piece, &w).powi(2))
                        .sum::<f64>()
                        .sqrt()
                } else {
                    weighted_lp(f, nf * (0.5 - 1.0 / p) - alpha + beta, 0.0, p)?
                };
                (lhs, weighted_l2(&fractional_derivative(f, alpha)?, beta, 0.0)?)
            }
            Self::SteinWeiss { alpha, beta, .. } => {
                (weighted_l2(f, beta - alpha, 0.0)?, weighted_l2(&fractional_derivative(f, alpha)?, beta, 0.0)?)
            }
            Self::WeightedHardy { s, alpha, beta, .. } => (
                weighted_l2(f, -alpha - s, alpha - beta)?,
                weighted_l2(&fractional_derivative(f, s)?, -alpha, alpha - beta)?,
            ),
            Self::LpSquare { weight, .. } => (square_sum(f, &weight, 0.0)?, weighted_l2(f, weight.a, weight.b)?),
            Self::ChainRule { theta, function, w1, w2, .. } => {
                let image = f.map(|_, u| function.apply(u));
                let lhs = square_sum(&image, &w1.mul(&w2), theta)?;
                let modulus = f.map(|_, u| function.modulus(u));
                (lhs, square_sum(f, &w1, theta)? * weighted_sup(&modulus, &w2))
            }
            Self::WeightedTraceRadial { alpha, beta, p, .. } => (
                weighted_lp(f, -alpha + (nf - 1.0) * (0.5 - 1.0 / p), alpha - beta, p)?,
                weighted_l2(&fractional_derivative(f, 0.5 - 1.0 / p)?, -alpha, alpha - beta)?,
            ),
            Self::Leibniz { mu, theta, .. } => {
                let product = f.map(|_, u| u * u);
                let lhs = weighted_l2(&fractional_derivative(&product, theta)?, 0.5 * (1.0 - mu), 0.0)?;
                let rhs = weighted_l2(&fractional_derivative(f, theta)?, -0.5 * (1.0 - mu), 0.0)?
                    * sobolev_norm(f, 0.5 * (nf - 2.0) + mu)?;
                (lhs, rhs)
            }
        })
    }

    pub fn ratio(&self, f: &RadialProfile) -> Result<Ratio> {
        let (lhs, rhs) = self.sides(f)?;
        Ratio::from_sides(lhs, rhs)
    }
}
