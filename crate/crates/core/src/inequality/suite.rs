use serde::{Deserialize, Serialize};

use crate::calculus::WeightSpec;
use crate::error::{Error, Result};

use super::{ChainFunction, InequalityCase, SweepBase};

/// Representative admissible cases covering every case kind in dimension `n`.
pub fn standard_cases(n: usize) -> Vec<InequalityCase> {
    let w1 = WeightSpec::power(-0.5);
    vec![
        InequalityCase::Trace { n, s: 0.5 },
        InequalityCase::Trace { n, s: 1.0 },
        InequalityCase::TraceLp { n, s: 0.75, p: 4.0 },
        InequalityCase::WeightedTrace { n, alpha: 1.0, beta: 0.5, p: f64::INFINITY },
        InequalityCase::WeightedTrace { n, alpha: 0.75, beta: 0.25, p: 4.0 },
        InequalityCase::SteinWeiss { n, alpha: 1.0, beta: 0.0 },
        InequalityCase::SteinWeiss { n, alpha: 0.7, beta: 0.2 },
        InequalityCase::WeightedHardy { n, s: 0.5, alpha: 0.2, beta: 0.4 },
        InequalityCase::WeightedHardy { n, s: 1.0, alpha: 0.0, beta: 0.0 },
        InequalityCase::LpSquare { n, weight: WeightSpec::new(-0.5, 0.3) },
        InequalityCase::ChainRule { n, theta: 0.5, function: ChainFunction::Sine, w1, w2: WeightSpec::UNIT },
        InequalityCase::ChainRule { n, theta: 0.5, function: ChainFunction::Square, w1, w2: WeightSpec::UNIT },
        InequalityCase::WeightedTraceRadial { n, alpha: 0.2, beta: 0.5, p: 4.0 },
        InequalityCase::Leibniz { n, mu: 0.5, theta: 1.0 },
    ]
}

/// A scaling-orbit sweep `f(lambda r)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub case: InequalityCase,
    pub base: SweepBase,
    pub lambdas: Vec<f64>,
}

/// Spreading orbit `lambda = 2^(-k/2)`, `k = 0..8`.
pub fn spreading_orbit() -> Vec<f64> {
    (0..8).map(|k| 2f64.powf(-0.5 * k as f64)).collect()
}

/// Cases just outside a window whose violated constraint is visible along a scaling orbit,
/// followed by one admissible control.
///
/// Only the inhomogeneous weights `<r>^b` break scale invariance, so pure power cases are absent.
pub fn boundary_plans(n: usize) -> Vec<SweepPlan> {
    let half = 0.5 * n as f64;
    let radial = 0.5 * (n as f64 - 1.0);
    let plan = |case| SweepPlan { case, base: SweepBase::Gaussian, lambdas: spreading_orbit() };
    vec![
        plan(InequalityCase::WeightedHardy { n, s: 0.5, alpha: 0.0, beta: half }),
        plan(InequalityCase::WeightedHardy { n, s: 0.5, alpha: 0.0, beta: half - 0.3 }),
        plan(InequalityCase::WeightedHardy { n, s: 1.0, alpha: 0.0, beta: half }),
        plan(InequalityCase::WeightedTraceRadial { n, alpha: 1.0, beta: radial + 1.5, p: 8.0 }),
        plan(InequalityCase::WeightedTraceRadial { n, alpha: 1.0, beta: radial + 2.0, p: 4.0 }),
        plan(InequalityCase::WeightedHardy { n, s: 0.5, alpha: 0.2, beta: 0.4 }),
    ]
}

fn number(params: &[(String, String)], key: &str) -> Result<f64> {
    let raw = params
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.trim())
        .ok_or_else(|| Error::validation(format!("missing parameter '{key}'")))?;
    raw.parse().map_err(|_| Error::validation(format!("parameter '{key}': cannot parse '{raw}'")))
}

fn weight(params: &[(String, String)], prefix: &str) -> Result<WeightSpec> {
    let get = |k: &str| -> Result<f64> {
        let key = format!("{prefix}{k}");
        if params.iter().any(|(p, _)| *p == key) {
            number(params, &key)
        } else {
            Ok(0.0)
        }
    };
    Ok(WeightSpec::new(get("a")?, get("b")?))
}

impl InequalityCase {
    /// Builds a case from its id and `key=value` parameters, as listed by [`InequalityCase::params`].
    ///
    /// Weights default to one; `function` selects `square` or `sine` for the chain rule; `p` accepts `inf`.
    pub fn from_params(id: &str, n: usize, params: &[(String, String)]) -> Result<Self> {
        let known: &[&str] = match id {
            "trace" => &["s"],
            "trace_lp" => &["s", "p"],
            "weighted_trace" | "weighted_trace_radial" => &["alpha", "beta", "p"],
            "stein_weiss" => &["alpha", "beta"],
            "weighted_hardy" => &["s", "alpha", "beta"],
            "lp_square" => &["a", "b"],
            "chain_rule" => &["theta", "function", "w1_a", "w1_b", "w2_a", "w2_b"],
            "leibniz" => &["mu", "theta"],
            other => return Err(Error::validation(format!("unknown inequality case '{other}'"))),
        };
        if let Some((k, _)) = params.iter().find(|(k, _)| !known.contains(&k.as_str())) {
            return Err(Error::validation(format!("case {id} has no parameter '{k}'")));
        }
        let x = |k: &str| number(params, k);
        Ok(match id {
            "trace" => Self::Trace { n, s: x("s")? },
            "trace_lp" => Self::TraceLp { n, s: x("s")?, p: x("p")? },
            "weighted_trace" => Self::WeightedTrace { n, alpha: x("alpha")?, beta: x("beta")?, p: x("p")? },
            "weighted_trace_radial" => {
                Self::WeightedTraceRadial { n, alpha: x("alpha")?, beta: x("beta")?, p: x("p")? }
            }
            "stein_weiss" => Self::SteinWeiss { n, alpha: x("alpha")?, beta: x("beta")? },
            "weighted_hardy" => Self::WeightedHardy { n, s: x("s")?, alpha: x("alpha")?, beta: x("beta")? },
            "lp_square" => Self::LpSquare { n, weight: weight(params, "")? },
            "chain_rule" => {
                let function = match params.iter().find(|(k, _)| k == "function").map(|(_, v)| v.trim()) {
                    None | Some("sine") => ChainFunction::Sine,
                    Some("square") => ChainFunction::Square,
                    Some(other) => return Err(Error::validation(format!("unknown chain function '{other}'"))),
                };
                Self::ChainRule { n, theta: x("theta")?, function, w1: weight(params, "w1_")?, w2: weight(params, "w2_")? }
            }
            _ => Self::Leibniz { n, mu: x("mu")?, theta: x("theta")? },
        })
    }
}
