use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd::{derivative2, second_derivative2};
use crate::norms::{time_weights, SpaceTimeField};

use super::MultiplierSpec;

/// Radial interval on which residuals are measured.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualWindow {
    pub r_lo: f64,
    pub r_hi: f64,
}

impl Default for ResidualWindow {
    fn default() -> Self {
        Self { r_lo: 0.5, r_hi: 4.0 }
    }
}

/// Maximum absolute residuals of the building blocks and of the full identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub dr: f64,
    pub dt: f64,
    /// `(name, max |LHS - RHS|)` for each building block, then `flat` and `full`.
    pub blocks: Vec<(String, f64)>,
    /// Largest `|LHS|` of the full identity on the window.
    pub scale: f64,
    /// Relative defect of the space-time integrated identity on the window.
    pub balance_defect: f64,
}

impl ResidualReport {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.blocks.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

type Grid2 = Vec<Vec<f64>>;

fn along_t(a: &Grid2, dt: f64, second: bool) -> Grid2 {
    let (mt, nr) = (a.len(), a[0].len());
    let mut out = vec![vec![0.0; nr]; mt];
    let mut col = vec![0.0; mt];
    for i in 0..nr {
        for m in 0..mt {
            col[m] = a[m][i];
        }
        let d = if second { second_derivative2(&col, dt) } else { derivative2(&col, dt) };
        for m in 0..mt {
            out[m][i] = d[m];
        }
    }
    out
}

fn along_r(a: &Grid2, dr: f64, second: bool) -> Grid2 {
    a.iter()
        .map(|row| if second { second_derivative2(row, dr) } else { derivative2(row, dr) })
        .collect()
}

fn zip2(a: &Grid2, b: &Grid2, f: impl Fn(f64, f64) -> f64) -> Grid2 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| f(*p, *q)).collect())
        .collect()
}

/// Checks the radial Morawetz identity for `f X u` on a sampled field.
///
/// With `X u = u_r + (n-1)/(2r) u` and `div G = r^(1-n) (r^(n-1) G)_r`, the blocks are
///
/// * `tt`:  `u_tt X u = (u_t X u)_t - div(u_t^2 / 2)`
/// * `tr`:  `2 u_tr X u = (u_r X u)_t + (u_t X u)_r - div(u_t u_r) + (n-1) u u_t / (2 r^2)`
/// * `rr`:  `2 u_rr X u = 2 (u_r X u)_r - div(u_r^2) + (n-1) u u_r / r^2`
/// * `lap`: `Lap u X u = div(u_r X u - u_r^2 / 2) + (n-1) u u_r / (2 r^2)`
/// * `flat`: `f X u (-u_tt + Lap u) = (-f u_t X u)_t + div P - Q0` with
///   `P = f((u_t^2 - u_r^2)/2 + u_r X u) - (n-1)/4 u^2 (f/r)_r`
/// * `full`: adds `f g Lap u X u = div(f g P_L) - P_L (f g)_r + f g (n-1) u u_r / (2 r^2)`,
///   `P_L = u_r X u - u_r^2 / 2`.
///
/// Every derivative is a second-order centred difference of the sampled field, so each
/// residual is `O(h^2)` on a fixed window away from the origin.
pub fn identity_residual(
    field: &SpaceTimeField,
    coeff: &dyn Fn(f64, f64) -> f64,
    spec: &MultiplierSpec,
    window: ResidualWindow,
) -> Result<ResidualReport> {
    let grid = *field.grid();
    if spec.dim != grid.dim() {
        return Err(Error::validation("multiplier and field dimensions differ"));
    }
    let times = field.times();
    if times.len() < 7 {
        return Err(Error::validation("need at least seven stored times"));
    }
    let dt = times[1] - times[0];
    if times.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt) {
        return Err(Error::validation("stored times must be uniform"));
    }
    let dr = grid.dr();
    if !(window.r_lo > 0.0 && window.r_lo < window.r_hi && window.r_hi < grid.r_max()) {
        return Err(Error::validation("residual window must lie inside (0, r_max)"));
    }
    let i_lo = (window.r_lo / dr).ceil() as usize;
    let i_hi = (window.r_hi / dr).floor() as usize;
    let base = i_lo.saturating_sub(4).max(1);
    let top = (i_hi + 4).min(grid.num_points());
    if i_hi < i_lo + 2 {
        return Err(Error::validation("residual window holds too few nodes"));
    }
    let radii: Vec<f64> = (base..=top).map(|i| grid.r(i)).collect();
    let mt = times.len();
    let u: Grid2 = (0..mt).map(|m| field.u(m)[base..=top].to_vec()).collect();
    let n = grid.dim() as f64;
    let c = 0.5 * (n - 1.0);

    let ut = along_t(&u, dt, false);
    let utt = along_t(&u, dt, true);
    let ur = along_r(&u, dr, false);
    let urr = along_r(&u, dr, true);
    let utr = along_r(&ut, dr, false);
    let with_r = |a: &Grid2, f: &dyn Fn(f64, f64) -> f64| -> Grid2 {
        a.iter().map(|row| row.iter().zip(&radii).map(|(v, r)| f(*r, *v)).collect()).collect()
    };
    let xu = zip2(&ur, &with_r(&u, &|r, v| c * v / r), |a, b| a + b);
    let div = |g: &Grid2| -> Grid2 {
        let scaled = with_r(g, &|r, v| r.powf(n - 1.0) * v);
        with_r(&along_r(&scaled, dr, false), &|r, v| v / r.powf(n - 1.0))
    };
    let lap = zip2(&urr, &with_r(&ur, &|r, v| (n - 1.0) * v / r), |a, b| a + b);
    let gfield: Grid2 = times.iter().map(|&t| radii.iter().map(|&r| coeff(t, r)).collect()).collect();
    let fvals: Vec<f64> = radii.iter().map(|&r| spec.f(r)).collect();
    let fg: Grid2 = gfield.iter().map(|row| row.iter().zip(&fvals).map(|(g, f)| g * f).collect()).collect();
    let dfg = along_r(&fg, dr, false);

    let mut lhs = std::collections::BTreeMap::new();
    let mut rhs = std::collections::BTreeMap::new();

    // tt block
    lhs.insert("tt", zip2(&utt, &xu, |a, b| a * b));
    {
        let a = along_t(&zip2(&ut, &xu, |a, b| a * b), dt, false);
        let b = div(&zip2(&ut, &ut, |a, b| 0.5 * a * b));
        rhs.insert("tt", zip2(&a, &b, |x, y| x - y));
    }
    // tr block
    lhs.insert("tr", zip2(&utr, &xu, |a, b| 2.0 * a * b));
    {
        let a = along_t(&zip2(&ur, &xu, |a, b| a * b), dt, false);
        let b = along_r(&zip2(&ut, &xu, |a, b| a * b), dr, false);
        let d = div(&zip2(&ut, &ur, |a, b| a * b));
        let e = with_r(&zip2(&u, &ut, |a, b| a * b), &|r, v| (n - 1.0) * v / (2.0 * r * r));
        let ab = zip2(&a, &b, |x, y| x + y);
        let de = zip2(&e, &d, |x, y| x - y);
        rhs.insert("tr", zip2(&ab, &de, |x, y| x + y));
    }
    // rr block
    lhs.insert("rr", zip2(&urr, &xu, |a, b| 2.0 * a * b));
    {
        let a = along_r(&zip2(&ur, &xu, |a, b| 2.0 * a * b), dr, false);
        let d = div(&zip2(&ur, &ur, |a, b| a * b));
        let e = with_r(&zip2(&u, &ur, |a, b| a * b), &|r, v| (n - 1.0) * v / (r * r));
        let ad = zip2(&a, &d, |x, y| x - y);
        rhs.insert("rr", zip2(&ad, &e, |x, y| x + y));
    }
    // Laplacian block
    let pl = zip2(&ur, &xu, |a, b| a * b - 0.5 * a * a);
    let ql = with_r(&zip2(&u, &ur, |a, b| a * b), &|r, v| (n - 1.0) * v / (2.0 * r * r));
    lhs.insert("lap", zip2(&lap, &xu, |a, b| a * b));
    rhs.insert("lap", zip2(&div(&pl), &ql, |x, y| x + y));

    // flat and full identities
    let fxu = with_r(&xu, &|r, v| spec.f(r) * v);
    let p0 = zip2(&fxu, &ut, |a, b| -a * b);
    let pr_flat: Grid2 = (0..mt)
        .map(|m| {
            (0..radii.len())
                .map(|i| {
                    let r = radii[i];
                    let (a, b) = (ut[m][i], ur[m][i]);
                    spec.f(r) * (0.5 * (a * a - b * b) + b * xu[m][i])
                        - 0.25 * (n - 1.0) * u[m][i] * u[m][i] * spec.d_f_over_r(r)
                })
                .collect()
        })
        .collect();
    let q0: Grid2 = (0..mt)
        .map(|m| (0..radii.len()).map(|i| spec.q0_density(radii[i], u[m][i], ut[m][i], ur[m][i])).collect())
        .collect();
    let wave_flat = zip2(&lap, &utt, |l, a| l - a);
    lhs.insert("flat", zip2(&fxu, &wave_flat, |a, b| a * b));
    let flat_rhs = {
        let a = along_t(&p0, dt, false);
        let b = div(&pr_flat);
        let ab = zip2(&a, &b, |x, y| x + y);
        zip2(&ab, &q0, |x, y| x - y)
    };
    rhs.insert("flat", flat_rhs.clone());
    let glap = zip2(&gfield, &lap, |g, l| g * l);
    let wave_full = zip2(&wave_flat, &glap, |a, b| a + b);
    lhs.insert("full", zip2(&fxu, &wave_full, |a, b| a * b));
    let pert_flux = zip2(&fg, &pl, |a, b| a * b);
    let pert_bulk = {
        let a = zip2(&pl, &dfg, |p, d| -p * d);
        let b = zip2(&fg, &ql, |p, q| p * q);
        zip2(&a, &b, |x, y| x + y)
    };
    {
        let d = div(&pert_flux);
        let a = zip2(&flat_rhs, &d, |x, y| x + y);
        rhs.insert("full", zip2(&a, &pert_bulk, |x, y| x + y));
    }

    let mlo = 2;
    let mhi = mt - 3;
    let ilo = i_lo - base;
    let ihi = i_hi - base;
    let max_over = |a: &Grid2| -> f64 {
        let mut m = 0.0f64;
        for row in &a[mlo..=mhi] {
            for v in &row[ilo..=ihi] {
                m = m.max(v.abs());
            }
        }
        m
    };
    let order = ["tt", "tr", "rr", "lap", "flat", "full"];
    let blocks = order
        .iter()
        .map(|name| (name.to_string(), max_over(&zip2(&lhs[name], &rhs[name], |a, b| a - b))))
        .collect();
    let scale = max_over(&lhs["full"]);

    // Space-time integrated identity: bulk integral against boundary fluxes.
    let pr_total = zip2(&pr_flat, &pert_flux, |a, b| a + b);
    let bulk_src = zip2(&q0, &pert_bulk, |q, p| q - p);
    let tw = time_weights(&times[mlo..=mhi]);
    let rw = time_weights(&radii[ilo..=ihi]);
    let vol = |i: usize| radii[i].powf(n - 1.0);
    let mut lhs_int = 0.0;
    let mut lhs_abs = 0.0;
    let mut bulk = 0.0;
    for (a, m) in (mlo..=mhi).enumerate() {
        for (b, i) in (ilo..=ihi).enumerate() {
            let w = tw[a] * rw[b] * vol(i);
            lhs_int += w * lhs["full"][m][i];
            lhs_abs += w * lhs["full"][m][i].abs();
            bulk += w * bulk_src[m][i];
        }
    }
    let mut time_flux = 0.0;
    for (b, i) in (ilo..=ihi).enumerate() {
        time_flux += rw[b] * vol(i) * (p0[mhi][i] - p0[mlo][i]);
    }
    let mut space_flux = 0.0;
    for (a, m) in (mlo..=mhi).enumerate() {
        space_flux += tw[a]
            * (radii[ihi].powf(n - 1.0) * pr_total[m][ihi] - radii[ilo].powf(n - 1.0) * pr_total[m][ilo]);
    }
    let defect = (lhs_int - (time_flux + space_flux - bulk)).abs() / lhs_abs.max(f64::MIN_POSITIVE);

    Ok(ResidualReport { dr, dt, blocks, scale, balance_defect: defect })
}

/// Observed orders `log2(res_k / res_{k+1}) / log2(h_k / h_{k+1})` per block along a ladder.
pub fn observed_orders(ladder: &[ResidualReport]) -> Vec<(String, Vec<f64>)> {
    let Some(first) = ladder.first() else { return Vec::new() };
    first
        .blocks
        .iter()
        .map(|(name, _)| {
            let orders = ladder
                .windows(2)
                .map(|w| {
                    let a = w[0].get(name).unwrap_or(f64::NAN);
                    let b = w[1].get(name).unwrap_or(f64::NAN);
                    (a / b).ln() / (w[0].dr / w[1].dr).ln()
                })
                .collect();
            (name.clone(), orders)
        })
        .collect()
}

fn probe_field(t: f64, r: f64) -> f64 {
    (-(r - 2.0 - 0.3 * t).powi(2)).exp() * (1.0 + 0.3 * (2.0 * t).sin()) + 0.2 * (-r * r / 4.0).exp() * t.cos()
}

fn probe_coefficient(t: f64, r: f64) -> f64 {
    0.2 * (-(r - 2.0).powi(2)).exp() * (1.0 + 0.5 * t.cos())
}

/// Residual reports of a smooth probe field and coefficient on `[0, 6] x [0, 1]`,
/// one per mesh width `h` (used for both `dr` and `dt`).
pub fn identity_ladder(spec: &MultiplierSpec, widths: &[f64], window: ResidualWindow) -> Result<Vec<ResidualReport>> {
    const R_MAX: f64 = 6.0;
    if widths.len() < 2 || widths.iter().any(|h| !(*h > 0.0 && *h <= 0.1)) {
        return Err(Error::validation("ladder needs at least two mesh widths in (0, 0.1]"));
    }
    widths
        .iter()
        .map(|&h| {
            let grid = crate::radial::RadialGrid::new(spec.dim, R_MAX, (R_MAX / h).round() as usize)?;
            let steps = (1.0 / h).round() as usize;
            let times = (0..=steps).map(|k| k as f64 / steps as f64).collect();
            let field = SpaceTimeField::sample(grid, times, probe_field, |_, _| 0.0)?;
            identity_residual(&field, &probe_coefficient, spec, window)
        })
        .collect()
}
