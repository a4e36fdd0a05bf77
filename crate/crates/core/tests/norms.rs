#![allow(clippy::needless_range_loop)]

mod common;

use proptest::prelude::*;
use rwl_core::norms::{
    besov_norm, besov_report, dyadic_norms, le_norm, sobolev_norm, time_weights, xt_dual_upper, xt_norm,
    Component, Density, NormReport, SpaceTimeField,
};
use rwl_core::radial::{forward_transform, integrate_weighted};
use rwl_core::{RadialGrid, RadialProfile};

fn packet(grid: RadialGrid, rho0: f64, sigma: f64) -> RadialProfile {
    RadialProfile::from_fn(grid, move |r| {
        let env = (-0.5 * sigma * sigma * r * r).exp();
        if r == 0.0 { rho0 * env } else { (rho0 * r).sin() / r * env }
    })
    .unwrap()
}

#[test]
fn sobolev_zero_is_l2() {
    let grid = RadialGrid::default();
    let f = RadialProfile::from_fn(grid, common::bump(2.0, 0.5)).unwrap();
    let l2 = integrate_weighted(&f, 0.0, 0.0).unwrap().sqrt();
    assert!((sobolev_norm(&f, 0.0).unwrap() - l2).abs() < 1e-12 * l2);
    assert!(sobolev_norm(&f, -1.5).unwrap_err().is_validation());
}

#[test]
fn single_dyadic_packet_has_small_leakage() {
    let grid = RadialGrid::default();
    for j0 in [1, 3, 5] {
        let rho0 = 2f64.powi(j0);
        let f = packet(grid, rho0, rho0 / 12.0);
        let spec = forward_transform(&f);
        let dominant = dyadic_norms(&spec).into_iter().find(|(j, _)| *j == j0).unwrap().1;
        for s in [0.0, 0.5, 1.5] {
            let full = besov_norm(&f, s, 1.0).unwrap();
            let single = 2f64.powf(j0 as f64 * s) * dominant;
            assert!((full - single).abs() <= 0.05 * full, "j0={j0} s={s}: {full} vs {single}");
        }
    }
}

#[test]
fn besov_two_two_is_equivalent_to_sobolev() {
    let grid = RadialGrid::default();
    for (c, w) in [(0.0, 0.3), (2.0, 1.0), (5.0, 2.0)] {
        let f = RadialProfile::from_fn(grid, common::bump(c, w)).unwrap();
        for s in [0.0, 0.5, 1.0] {
            let ratio = besov_norm(&f, s, 2.0).unwrap() / sobolev_norm(&f, s).unwrap();
            assert!((0.5f64.sqrt() - 1e-9..=1.0 + 1e-9).contains(&ratio), "ratio {ratio}");
        }
    }
}

#[test]
fn besov_report_carries_tail_estimate() {
    let f = RadialProfile::from_fn(RadialGrid::default(), common::bump(0.0, 1.0)).unwrap();
    let report = besov_report(&f, 0.5, 1.0).unwrap();
    assert!(report.tail_estimate.unwrap() < 1e-6);
    let json = serde_json::to_string(&report).unwrap();
    let back: NormReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, report);
    assert!(json.contains("\"norm_id\":\"besov\""));
}

fn stationary(grid: RadialGrid, t: f64, m: usize) -> (SpaceTimeField, RadialProfile) {
    let u0 = RadialProfile::from_fn(grid, common::bump(1.0, 0.7)).unwrap();
    let times: Vec<f64> = (0..=m).map(|k| t * k as f64 / m as f64).collect();
    let f = common::bump(1.0, 0.7);
    (SpaceTimeField::sample(grid, times, |_, r| f(r), |_, _| 0.0).unwrap(), u0)
}

#[test]
fn xt_norm_of_stationary_field_has_closed_form() {
    let grid = RadialGrid::new(3, 32.0, 2048).unwrap();
    let (field, u0) = stationary(grid, 2.0, 8);
    let mu = 0.3;
    let value = xt_norm(&field.density(Component::Value), mu).unwrap();
    let l2 = integrate_weighted(&u0, 0.0, 0.0).unwrap().sqrt();
    let w = integrate_weighted(&u0, mu - 1.0, 0.0).unwrap();
    let expected = l2 + 2f64.powf(-0.5 * mu) * (2.0 * w).sqrt();
    assert!((value - expected).abs() < 1e-12 * expected);
    assert!(xt_norm(&field.density(Component::Value), 0.7).unwrap_err().is_validation());
}

#[test]
fn le_norm_dominates_its_energy_term() {
    let grid = RadialGrid::new(3, 32.0, 2048).unwrap();
    let (field, _) = stationary(grid, 1.0, 4);
    let d = field.density(Component::Gradient);
    let le = le_norm(&d, 0.25, 0.1).unwrap();
    let energy = d.values()[0]
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, v)| grid.trapezoid_weight(i) * v * grid.r(i).powi(2))
        .sum::<f64>()
        * grid.dr()
        * 4.0
        * std::f64::consts::PI;
    assert!(le > energy.sqrt());
    assert!(le_norm(&d, 0.25, 0.0).is_err());
}

#[test]
fn trapezoid_time_weights_sum_to_length() {
    let w = time_weights(&[0.0, 0.1, 0.4, 1.0]);
    assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn dual_bound_satisfies_the_pairing_inequality(
        a in 0.2f64..2.0, c in 0.0f64..6.0, w in 0.3f64..1.5, mu in 0.05f64..0.5, t in 0.3f64..3.0, seed in 0u64..1000
    ) {
        let grid = RadialGrid::new(3, 32.0, 512).unwrap();
        let times: Vec<f64> = (0..=6).map(|k| t * k as f64 / 6.0).collect();
        let phase = seed as f64 * 0.1;
        let bf = common::bump(c, w);
        let forcing: Vec<Vec<f64>> = times
            .iter()
            .map(|&s| grid.nodes().iter().map(|&r| a * bf(r) * (s + phase).cos()).collect())
            .collect();
        let bu = common::bump(0.5 * c, 1.0);
        let field = SpaceTimeField::sample(grid, times.clone(), |s, r| bu(r - 0.3 * s) * (1.0 + s), |_, _| 0.0).unwrap();
        let density_f = Density::from_scalar(grid, times.clone(), &forcing).unwrap();
        let bound = xt_dual_upper(&density_f, mu).unwrap();
        prop_assert!(bound.value <= bound.energy_only + 1e-12);
        prop_assert!(bound.value <= bound.weighted_only + 1e-12);
        let xu = xt_norm(&field.density(Component::Value), mu).unwrap();
        let tw = time_weights(&times);
        let mut pairing = 0.0;
        for (m, wt) in tw.iter().enumerate() {
            let mut s = 0.0;
            for i in 1..grid.len() {
                s += grid.trapezoid_weight(i) * forcing[m][i] * field.u(m)[i] * grid.r(i).powi(2);
            }
            pairing += wt * s * grid.dr() * 4.0 * std::f64::consts::PI;
        }
        prop_assert!(pairing.abs() <= bound.value * xu * (1.0 + 1e-12));
    }
}
