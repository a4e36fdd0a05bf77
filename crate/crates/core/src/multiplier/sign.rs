use serde::{Deserialize, Serialize};

use super::{MultiplierFamily, MultiplierSpec};

/// Violations of the multiplier sign conditions on a sampled radius set.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SignReport {
    pub samples: usize,
    pub violations: usize,
    /// Most negative relative margin over all checked inequalities.
    pub worst_margin: f64,
    /// Names of the inequalities that failed at least once.
    pub failed: Vec<String>,
}

impl SignReport {
    fn record(&mut self, name: &str, lhs: f64, rhs: f64) {
        let scale = lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
        let margin = (lhs - rhs) / scale;
        self.worst_margin = self.worst_margin.min(margin);
        if margin < -1e-12 || !margin.is_finite() {
            self.violations += 1;
            if !self.failed.iter().any(|f| f == name) {
                self.failed.push(name.to_owned());
            }
        }
    }
}

/// Checks every sign condition of the multiplier at the given radii.
///
/// Checked: `f' >= 0`, `(2f - r f')/r >= f/r >= f'`, `d/dr(f/r) <= 0`,
/// `-Laplacian(f/r) >= lower bound >= 0`; for the ratio family on `R/2 <= r <= R` also
/// `f'/2 >= 1/(8R)` and `(n-1)/4 (-Laplacian(f/r)) >= (n-1)/(32 R^2 r)`.
pub fn sign_condition_report(spec: &MultiplierSpec, radii: &[f64]) -> SignReport {
    let mut rep = SignReport { worst_margin: 0.0, ..Default::default() };
    let n = spec.dim as f64;
    let big_r = spec.radius;
    for &r in radii {
        rep.samples += 1;
        let f = spec.f(r);
        let df = spec.df(r);
        let f_r = f / r;
        rep.record("f' >= 0", df, 0.0);
        rep.record("f/r >= f'", f_r, df);
        rep.record("(2f - r f')/r >= f/r", (2.0 * f - r * df) / r, f_r);
        rep.record("d/dr(f/r) <= 0", 0.0, spec.d_f_over_r(r));
        let lap = spec.neg_laplacian_f_over_r(r);
        let low = spec.neg_laplacian_lower_bound(r);
        rep.record("-lap(f/r) >= bound", lap, low);
        rep.record("bound >= 0", low, 0.0);
        if spec.family == MultiplierFamily::Ratio && r >= 0.5 * big_r && r <= big_r {
            rep.record("f'/2 >= 1/(8R)", 0.5 * df, 1.0 / (8.0 * big_r));
            rep.record(
                "(n-1)/4 (-lap(f/r)) >= (n-1)/(32 R^2 r)",
                0.25 * (n - 1.0) * lap,
                (n - 1.0) / (32.0 * big_r * big_r * r),
            );
        }
    }
    rep
}
