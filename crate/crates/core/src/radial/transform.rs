use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::flags::{Flag, Flags};
use crate::special::{reduced_spherical_bessel, zeta};

use super::{RadialGrid, RadialProfile};

/// Relative spectral energy in the top tenth of the band that triggers a resolution warning.
const RESOLUTION_TOLERANCE: f64 = 1e-10;

type PlanCache = Mutex<HashMap<usize, Arc<dyn Fft<f64>>>>;

fn plan(len: usize) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<PlanCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(len)
        .or_insert_with(|| FftPlanner::new().plan_fft_forward(len))
        .clone()
}

/// Type-I sine transform `X_k = sum_{i=1}^{N-1} x_i sin(pi i k / N)` on `N + 1` slots.
fn dst1(x: &[f64]) -> Vec<f64> {
    let n = x.len() - 1;
    let mut buf = vec![Complex::new(0.0, 0.0); 2 * n];
    for i in 1..n {
        buf[i].re = x[i];
        buf[2 * n - i].re = -x[i];
    }
    plan(2 * n).process(&mut buf);
    let mut out = vec![0.0; n + 1];
    for k in 1..n {
        out[k] = -0.5 * buf[k].im;
    }
    out
}

/// Type-I cosine transform with trapezoid end weights on `N + 1` slots.
fn dct1(x: &[f64]) -> Vec<f64> {
    let n = x.len() - 1;
    let mut buf = vec![Complex::new(0.0, 0.0); 2 * n];
    buf[0].re = x[0];
    buf[n].re = x[n];
    for i in 1..n {
        buf[i].re = x[i];
        buf[2 * n - i].re = x[i];
    }
    plan(2 * n).process(&mut buf);
    buf[..=n].iter().map(|c| 0.5 * c.re).collect()
}

/// Radial Fourier transform sampled at `rho_k = k * pi / r_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralProfile {
    grid: RadialGrid,
    values: Vec<f64>,
    flags: Flags,
}

impl SpectralProfile {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::validation(format!(
                "expected {} spectral samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self::from_parts(grid, values))
    }

    fn from_parts(grid: RadialGrid, values: Vec<f64>) -> Self {
        let mut s = Self { grid, values, flags: Flags::new() };
        if s.band_edge_fraction() > RESOLUTION_TOLERANCE {
            s.flags.insert(Flag::ResolutionWarning);
        }
        s
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn flags(&self) -> &Flags {
        &self.flags
    }

    /// Applies a radial Fourier multiplier `m(rho)`.
    pub fn map(&self, m: impl Fn(f64) -> f64) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, &v)| if v == 0.0 { 0.0 } else { m(self.grid.rho(k)) * v })
            .collect();
        Self::from_parts(self.grid, values)
    }

    /// Fraction of `int |f^|^2 rho^(n-1)` carried by the top tenth of the band.
    pub fn band_edge_fraction(&self) -> f64 {
        let n = self.grid.dim() as i32;
        let len = self.values.len();
        let start = len - len / 10;
        let mut total = 0.0;
        let mut edge = 0.0;
        for (k, v) in self.values.iter().enumerate() {
            let e = v * v * self.grid.rho(k).powi(n - 1);
            total += e;
            if k >= start {
                edge += e;
            }
        }
        if total > 0.0 {
            edge / total
        } else {
            0.0
        }
    }

    /// `(2 pi)^-n |S^(n-1)| int |f^|^2 rho^(2s + n - 1) d rho`, the squared homogeneous Sobolev norm.
    ///
    /// The origin is handled with the zeta-function endpoint correction for the power `rho^e`,
    /// `e = 2s + n - 1`, which keeps the quadrature accurate for negative `s`.
    pub fn sobolev_sq(&self, s: f64) -> f64 {
        let g = &self.grid;
        let e = 2.0 * s + g.dim() as f64 - 1.0;
        let mut sum = 0.0;
        for (k, v) in self.values.iter().enumerate().skip(1) {
            sum += g.trapezoid_weight(k) * v * v * g.rho(k).powf(e);
        }
        let h0 = self.values[0] * self.values[0];
        let corrected = sum * g.drho() - zeta(-e) * g.drho().powf(e + 1.0) * h0;
        corrected * g.sphere_area() / (2.0 * PI).powi(g.dim() as i32)
    }

    /// `(2 pi)^-n |S^(n-1)| int |m(rho) f^|^2 rho^(n-1) d rho`.
    pub fn weighted_energy(&self, m2: impl Fn(f64) -> f64) -> f64 {
        let g = &self.grid;
        let n = g.dim() as i32;
        let mut sum = 0.0;
        for (k, v) in self.values.iter().enumerate().skip(1) {
            let rho = g.rho(k);
            sum += g.trapezoid_weight(k) * v * v * m2(rho) * rho.powi(n - 1);
        }
        sum * g.drho() * g.sphere_area() / (2.0 * PI).powi(n)
    }
}

fn kernel_constant(n: usize) -> f64 {
    2f64.powf((n as f64 + 1.0) / 2.0) * PI.powf((n as f64 - 1.0) / 2.0)
}

/// Forward radial Fourier transform.
///
/// Dimension three uses a fast sine transform of `r f`; higher odd dimensions use
/// trapezoid quadrature of the reduced spherical Bessel kernel.
pub fn forward_transform(profile: &RadialProfile) -> SpectralProfile {
    let g = *profile.grid();
    let f = profile.values();
    let n = g.dim();
    let dr = g.dr();
    let values = if n == 3 {
        let v: Vec<f64> = f.iter().enumerate().map(|(i, &x)| g.r(i) * x).collect();
        let s = dst1(&v);
        let mut out = vec![0.0; g.len()];
        out[0] = 4.0 * PI * dr * (1..g.len()).map(|i| g.trapezoid_weight(i) * g.r(i) * v[i]).sum::<f64>();
        for k in 1..g.num_points() {
            out[k] = 4.0 * PI * dr * s[k] / g.rho(k);
        }
        out
    } else {
        let m = (n - 3) / 2;
        let c = kernel_constant(n) * dr;
        let weighted: Vec<f64> = (0..g.len())
            .map(|i| g.trapezoid_weight(i) * f[i] * g.r(i).powi(n as i32 - 1))
            .collect();
        (0..g.len())
            .into_par_iter()
            .map(|k| {
                let rho = g.rho(k);
                c * weighted
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(i, w)| w * reduced_spherical_bessel(m, g.r(i) * rho))
                    .sum::<f64>()
            })
            .collect()
    };
    SpectralProfile::from_parts(g, values)
}

/// Inverse radial Fourier transform; the outer node is pinned to zero.
pub fn inverse_transform(spectrum: &SpectralProfile) -> RadialProfile {
    let g = *spectrum.grid();
    let h = spectrum.values();
    let n = g.dim();
    let drho = g.drho();
    let mut values = if n == 3 {
        let w: Vec<f64> = h.iter().enumerate().map(|(k, &x)| g.rho(k) * x).collect();
        let s = dst1(&w);
        let mut out = vec![0.0; g.len()];
        out[0] = drho / (2.0 * PI * PI)
            * (1..g.len()).map(|k| g.trapezoid_weight(k) * g.rho(k) * w[k]).sum::<f64>();
        for i in 1..g.num_points() {
            out[i] = drho * s[i] / (2.0 * PI * PI * g.r(i));
        }
        out
    } else {
        let m = (n - 3) / 2;
        let c = kernel_constant(n) * drho / (2.0 * PI).powi(n as i32);
        let weighted: Vec<f64> = (0..g.len())
            .map(|k| g.trapezoid_weight(k) * h[k] * g.rho(k).powi(n as i32 - 1))
            .collect();
        (0..g.len())
            .into_par_iter()
            .map(|i| {
                let r = g.r(i);
                c * weighted
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, w)| w * reduced_spherical_bessel(m, r * g.rho(k)))
                    .sum::<f64>()
            })
            .collect()
    };
    values[g.num_points()] = 0.0;
    let mut profile = RadialProfile::from_parts(g, values);
    if spectrum.flags().contains(Flag::ResolutionWarning) {
        profile.add_flag(Flag::ResolutionWarning);
    }
    profile
}

/// Spectral radial derivative `d f / d r`; vanishes at the origin.
pub fn radial_derivative(profile: &RadialProfile) -> RadialProfile {
    let spectrum = forward_transform(profile);
    radial_derivative_of(&spectrum, profile)
}

pub(crate) fn radial_derivative_of(spectrum: &SpectralProfile, profile: &RadialProfile) -> RadialProfile {
    let g = *spectrum.grid();
    let h = spectrum.values();
    let n = g.dim();
    let drho = g.drho();
    let mut values = vec![0.0; g.len()];
    if n == 3 {
        let w: Vec<f64> = h.iter().enumerate().map(|(k, &x)| g.rho(k) * g.rho(k) * x).collect();
        let c = dct1(&w);
        let f = inverse_transform(spectrum);
        for i in 1..g.len() {
            let dv = drho * c[i] / (2.0 * PI * PI);
            values[i] = (dv - f.values()[i]) / g.r(i);
        }
    } else {
        let m = (n - 1) / 2;
        let c = -kernel_constant(n) * drho / (2.0 * PI).powi(n as i32);
        let weighted: Vec<f64> = (0..g.len())
            .map(|k| g.trapezoid_weight(k) * h[k] * g.rho(k).powi(n as i32 + 1))
            .collect();
        values
            .par_iter_mut()
            .enumerate()
            .skip(1)
            .for_each(|(i, out)| {
                let r = g.r(i);
                *out = c * r
                    * weighted
                        .iter()
                        .enumerate()
                        .skip(1)
                        .map(|(k, w)| w * reduced_spherical_bessel(m, r * g.rho(k)))
                        .sum::<f64>();
            });
    }
    let mut out = RadialProfile::from_parts(g, values);
    if profile.flags().contains(Flag::ResolutionWarning) {
        out.add_flag(Flag::ResolutionWarning);
    }
    out
}

/// `|S^(n-1)| int |f|^2 r^a <r>^b r^(n-1) dr` with `<r> = sqrt(2 + r^2)`, by the trapezoid rule.
///
/// The origin contributes its analytic limit; it is dropped when the integrand is singular there.
pub fn integrate_weighted(profile: &RadialProfile, a: f64, b: f64) -> Result<f64> {
    let g = profile.grid();
    let n = g.dim() as f64;
    if !(a > -n) {
        return Err(Error::validation(format!(
            "weight exponent a = {a} is not integrable at the origin in dimension {n}"
        )));
    }
    let f = profile.values();
    let mut sum = 0.0;
    for i in 1..g.len() {
        let r = g.r(i);
        sum += g.trapezoid_weight(i) * f[i] * f[i] * r.powf(a + n - 1.0) * (2.0 + r * r).powf(0.5 * b);
    }
    if a + n - 1.0 == 0.0 {
        sum += 0.5 * f[0] * f[0] * 2f64.powf(0.5 * b);
    }
    Ok(sum * g.dr() * g.sphere_area())
}

/// Mixed norm `L^p_r L^2_omega` of a radial function; `p = inf` gives the weighted supremum.
pub fn lp_norm(profile: &RadialProfile, p: f64) -> Result<f64> {
    let g = profile.grid();
    let f = profile.values();
    let area = g.sphere_area();
    if p.is_infinite() {
        return Ok(area.sqrt() * profile.max_abs());
    }
    if !(p >= 1.0) {
        return Err(Error::validation(format!("Lebesgue exponent must be >= 1, got {p}")));
    }
    let n = g.dim() as i32;
    let mut sum = 0.0;
    for i in 1..g.len() {
        sum += g.trapezoid_weight(i) * f[i].abs().powf(p) * g.r(i).powi(n - 1);
    }
    Ok((sum * g.dr()).powf(1.0 / p) * area.sqrt())
}
