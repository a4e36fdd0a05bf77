//! Spectral calculus on radial profiles: fractional derivatives, dyadic
//! projections, power weights and the radial Morawetz vector field.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd::derivative6_even;
use crate::flags::Flag;
use crate::radial::{forward_transform, inverse_transform, RadialGrid, RadialProfile, SpectralProfile};
use crate::special::smooth_step;

/// Smooth dyadic partition of unity on `(0, inf)`.
///
/// `psi` equals 1 on `[0, 1]` and 0 on `[2, inf)`; `phi(x) = psi(x) - psi(2x)` is supported
/// in `[1/2, 2]`, so the dyadic pieces telescope to 1.
#[derive(Clone, Copy, Debug, Default)]
pub struct DyadicCutoff;

impl DyadicCutoff {
    pub fn psi(x: f64) -> f64 {
        1.0 - smooth_step(x - 1.0)
    }

    pub fn phi(x: f64) -> f64 {
        Self::psi(x) - Self::psi(2.0 * x)
    }

    /// Dyadic indices `j_min..=j_max` whose pieces cover every nonzero grid frequency.
    pub fn band(grid: &RadialGrid) -> (i32, i32) {
        let j_min = grid.drho().log2().floor() as i32 - 1;
        let j_max = grid.rho_max().log2().ceil() as i32;
        (j_min, j_max)
    }
}

/// Power weight `r^a <r>^b` with `<r> = sqrt(2 + r^2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub a: f64,
    pub b: f64,
}

impl WeightSpec {
    pub const UNIT: WeightSpec = WeightSpec { a: 0.0, b: 0.0 };

    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    pub fn power(a: f64) -> Self {
        Self { a, b: 0.0 }
    }

    /// Weight `r^(-1 + 2 d1) <r>^(-2 d1 - 2 d2)`.
    pub fn from_deltas(d1: f64, d2: f64) -> Self {
        Self { a: -1.0 + 2.0 * d1, b: -2.0 * d1 - 2.0 * d2 }
    }

    pub fn value(&self, r: f64) -> f64 {
        r.powf(self.a) * (2.0 + r * r).powf(0.5 * self.b)
    }

    pub fn powi(&self, k: f64) -> Self {
        Self { a: k * self.a, b: k * self.b }
    }

    pub fn mul(&self, other: &WeightSpec) -> Self {
        Self { a: self.a + other.a, b: self.b + other.b }
    }

    /// Muckenhoupt `A_p` membership in dimension `n` (`p = 1` gives `A_1`).
    ///
    /// The weight behaves like `r^a` near the origin and `r^(a+b)` at infinity; each power must lie
    /// in `(-n, n(p-1))`, closed at the top when `p = 1`.
    pub fn is_ap(&self, n: usize, p: f64) -> bool {
        let n = n as f64;
        let ok = |e: f64| {
            if p == 1.0 {
                e > -n && e <= 0.0
            } else {
                e > -n && e < n * (p - 1.0)
            }
        };
        ok(self.a) && ok(self.a + self.b)
    }

    /// The sufficient window `0 <= 1 - 2 d1 <= 1 + 2 d2 < n` for all `A_p`, `p >= 1`.
    pub fn in_universal_window(&self, n: usize) -> bool {
        let d1 = 0.5 * (self.a + 1.0);
        let d2 = -0.5 * self.b - d1;
        let lo = 1.0 - 2.0 * d1;
        let hi = 1.0 + 2.0 * d2;
        lo >= -1e-14 && lo <= hi + 1e-14 && hi < n as f64
    }
}

/// Fractional derivative `D^theta f`, the multiplier `rho^theta`.
pub fn fractional_derivative(profile: &RadialProfile, theta: f64) -> Result<RadialProfile> {
    let n = profile.grid().dim() as f64;
    if !(theta > -n) {
        return Err(Error::validation(format!(
            "D^theta with theta = {theta} is not locally integrable in dimension {n}"
        )));
    }
    if theta == 0.0 {
        return Ok(profile.clone());
    }
    let s = forward_transform(profile);
    Ok(inverse_transform(&s.map(|rho| rho.powf(theta))))
}

/// Applies `rho^theta` to an existing spectrum.
pub fn fractional_spectrum(spectrum: &SpectralProfile, theta: f64) -> SpectralProfile {
    if theta == 0.0 {
        spectrum.clone()
    } else {
        spectrum.map(|rho| rho.powf(theta))
    }
}

/// Littlewood-Paley piece `P_j f = phi(2^-j D) f`.
pub fn lp_project(profile: &RadialProfile, j: i32) -> RadialProfile {
    let s = forward_transform(profile);
    inverse_transform(&lp_spectrum(&s, j))
}

pub fn lp_spectrum(spectrum: &SpectralProfile, j: i32) -> SpectralProfile {
    let scale = 2f64.powi(-j);
    spectrum.map(|rho| DyadicCutoff::phi(scale * rho))
}

/// `X u = u_r + (n-1)/(2r) u`, with `u_r` from a sixth-order stencil; zero at the origin.
pub fn x_multiplier_apply(profile: &RadialProfile) -> RadialProfile {
    let g = *profile.grid();
    let u = profile.values();
    let du = derivative6_even(u, g.dr());
    let c = 0.5 * (g.dim() as f64 - 1.0);
    let values = (0..g.len())
        .map(|i| if i == 0 { 0.0 } else { du[i] + c * u[i] / g.r(i) })
        .collect();
    RadialProfile::from_parts(g, values)
}

/// Multiplies by `r^a <r>^b`; the origin node is zeroed and flagged when the weight is singular.
pub fn apply_weight(profile: &RadialProfile, weight: &WeightSpec) -> RadialProfile {
    let singular = weight.a < 0.0;
    let mut out = profile.map(|r, v| if r == 0.0 && singular { 0.0 } else { weight.value(r) * v });
    if singular {
        out.add_flag(Flag::OriginExcluded);
    }
    out
}
