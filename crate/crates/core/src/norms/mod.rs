//! Fractional Sobolev and Besov norms of profiles, and the space-time norms
//! used for local energy estimates.

mod field;
mod spacetime;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::calculus::{lp_spectrum, DyadicCutoff};
use crate::error::{Error, Result};
use crate::flags::{Flag, Flags};
use crate::radial::{forward_transform, RadialProfile, SpectralProfile};

pub use field::{Component, Density, SpaceTimeField};
pub use spacetime::{
    kss_x1_norm, le_norm, time_weights, xt_besov_norm, xt_dual_upper, xt_norm, DualBound,
};

/// Serializable record of a norm evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub norm_id: String,
    pub params: BTreeMap<String, f64>,
    pub value: f64,
    pub flags: Flags,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_estimate: Option<f64>,
}

impl NormReport {
    pub fn new(norm_id: &str, params: &[(&str, f64)], value: f64) -> Self {
        Self {
            norm_id: norm_id.to_owned(),
            params: params.iter().map(|(k, v)| ((*k).to_owned(), *v)).collect(),
            value,
            flags: Flags::new(),
            tail_estimate: None,
        }
    }
}

fn check_sobolev_index(n: usize, s: f64) -> Result<()> {
    if !(s > -(n as f64) / 2.0) {
        return Err(Error::validation(format!(
            "homogeneous index s = {s} is not admissible in dimension {n}"
        )));
    }
    Ok(())
}

/// Homogeneous Sobolev norm `||D^s f||_{L^2}` by Plancherel.
pub fn sobolev_norm(profile: &RadialProfile, s: f64) -> Result<f64> {
    check_sobolev_index(profile.grid().dim(), s)?;
    Ok(forward_transform(profile).sobolev_sq(s).sqrt())
}

/// `||P_j f||_{L^2}` for every dyadic index of the resolvable band.
pub fn dyadic_norms(spectrum: &SpectralProfile) -> Vec<(i32, f64)> {
    let (j_min, j_max) = DyadicCutoff::band(spectrum.grid());
    (j_min..=j_max)
        .map(|j| {
            let scale = 2f64.powi(-j);
            let e = spectrum.weighted_energy(|rho| DyadicCutoff::phi(scale * rho).powi(2));
            (j, e.sqrt())
        })
        .collect()
}

fn lq_sum(terms: impl Iterator<Item = f64>, q: f64) -> f64 {
    if q.is_infinite() {
        terms.fold(0.0, f64::max)
    } else {
        terms.map(|t| t.powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// Homogeneous Besov norm `|| 2^{js} ||P_j f||_{L^2} ||_{l^q_j}` over the resolvable band.
pub fn besov_norm(profile: &RadialProfile, s: f64, q: f64) -> Result<f64> {
    Ok(besov_report(profile, s, q)?.value)
}

/// Besov norm with a tail estimate: the share of the sum carried by the two edge dyadics.
pub fn besov_report(profile: &RadialProfile, s: f64, q: f64) -> Result<NormReport> {
    check_sobolev_index(profile.grid().dim(), s)?;
    if !(q >= 1.0) {
        return Err(Error::validation(format!("Besov summability q = {q} must be >= 1")));
    }
    let spectrum = forward_transform(profile);
    let pieces: Vec<f64> = dyadic_norms(&spectrum)
        .into_iter()
        .map(|(j, v)| 2f64.powf(j as f64 * s) * v)
        .collect();
    let value = lq_sum(pieces.iter().copied(), q);
    let edge = lq_sum([pieces[0], pieces[pieces.len() - 1]].into_iter(), q);
    let mut report = NormReport::new("besov", &[("s", s), ("q", q)], value);
    let tail = if value > 0.0 { edge / value } else { 0.0 };
    report.tail_estimate = Some(tail);
    if tail > 1e-6 {
        report.flags.insert(Flag::BandTruncated);
    }
    report.flags.merge(spectrum.flags());
    Ok(report)
}

/// Dyadic pieces `P_j f` of a profile as physical-space profiles.
pub fn dyadic_pieces(profile: &RadialProfile) -> Vec<(i32, RadialProfile)> {
    let spectrum = forward_transform(profile);
    let (j_min, j_max) = DyadicCutoff::band(profile.grid());
    (j_min..=j_max)
        .map(|j| (j, crate::radial::inverse_transform(&lp_spectrum(&spectrum, j))))
        .collect()
}
