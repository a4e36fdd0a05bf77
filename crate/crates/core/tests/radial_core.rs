mod common;

use std::f64::consts::PI;
use std::time::Instant;

use proptest::prelude::*;
use rwl_core::radial::io::{read_binary, read_profile_csv, write_binary, write_profile_csv};
use rwl_core::radial::{forward_transform, integrate_weighted, inverse_transform, lp_norm};
use rwl_core::{Flag, RadialGrid, RadialProfile};

fn gaussian(grid: RadialGrid) -> RadialProfile {
    RadialProfile::from_fn(grid, |r| (-0.5 * r * r).exp()).unwrap()
}

#[test]
fn gaussian_matches_quadrature_oracle_in_three_dimensions() {
    let grid = RadialGrid::default();
    let spec = forward_transform(&gaussian(grid));
    let mut ours = Vec::new();
    let mut oracle = Vec::new();
    let mut closed = Vec::new();
    for k in 0..grid.len() {
        let rho = grid.rho(k);
        if rho > 10.0 {
            break;
        }
        ours.push(spec.values()[k]);
        let q = if k == 0 {
            4.0 * PI * common::integrate(|r| r * r * (-0.5 * r * r).exp(), 0.0, 14.0, 200)
        } else {
            4.0 * PI / rho * common::integrate(|r| r * (r * rho).sin() * (-0.5 * r * r).exp(), 0.0, 14.0, 400)
        };
        oracle.push(q);
        closed.push((2.0 * PI).powf(1.5) * (-0.5 * rho * rho).exp());
    }
    assert!(common::max_rel_err(&ours, &oracle) < 1e-8);
    assert!(common::max_rel_err(&ours, &closed) < 1e-8);
}

#[test]
fn gaussian_in_five_dimensions_matches_closed_form() {
    let grid = RadialGrid::new(5, 24.0, 768).unwrap();
    let spec = forward_transform(&gaussian(grid));
    let (ours, closed): (Vec<f64>, Vec<f64>) = (0..grid.len())
        .filter(|&k| grid.rho(k) <= 10.0)
        .map(|k| (spec.values()[k], (2.0 * PI).powf(2.5) * (-0.5 * grid.rho(k).powi(2)).exp()))
        .unzip();
    assert!(common::max_rel_err(&ours, &closed) < 1e-8);
}

#[test]
fn round_trip_is_exact_for_band_limited_profiles() {
    for grid in [RadialGrid::default(), RadialGrid::new(5, 24.0, 768).unwrap()] {
        let f = RadialProfile::from_fn(grid, |r| (-0.5 * r * r).exp() * (1.0 + 0.3 * r * r)).unwrap();
        let back = inverse_transform(&forward_transform(&f));
        let err = common::max_rel_err(back.values(), f.values());
        assert!(err < 1e-10, "dimension {}: round trip error {err}", grid.dim());
    }
}

#[test]
fn parseval_holds_to_machine_precision() {
    let grid = RadialGrid::default();
    let f = RadialProfile::from_fn(grid, common::bump(3.0, 0.7)).unwrap();
    let physical = integrate_weighted(&f, 0.0, 0.0).unwrap();
    let spectral = forward_transform(&f).sobolev_sq(0.0);
    assert!((physical - spectral).abs() <= 1e-12 * physical);
}

#[test]
fn weighted_integral_matches_adaptive_oracle() {
    let grid = RadialGrid::default();
    let bump = |r: f64| if r < 1.0 { (-1.0 / (1.0 - r * r)).exp() } else { 0.0 };
    let f = RadialProfile::from_fn(grid, bump).unwrap();
    for &(a, b) in &[(0.0, 0.0), (2.0, 0.0), (1.0, -1.0), (0.0, 3.0)] {
        let ours = integrate_weighted(&f, a, b).unwrap();
        let oracle = 4.0
            * PI
            * common::integrate(
                |r| bump(r).powi(2) * r.powf(a + 2.0) * (2.0 + r * r).powf(0.5 * b),
                0.0,
                1.0,
                400,
            );
        assert!((ours - oracle).abs() <= 1e-6 * oracle, "a={a} b={b}: {ours} vs {oracle}");
    }
}

#[test]
fn weighted_integral_rejects_non_integrable_power() {
    let f = gaussian(RadialGrid::default());
    assert!(integrate_weighted(&f, -3.0, 0.0).unwrap_err().is_validation());
    assert!(integrate_weighted(&f, -2.5, 0.0).is_ok());
}

#[test]
fn constructors_reject_bad_input() {
    assert!(RadialGrid::new(4, 64.0, 4096).unwrap_err().is_validation());
    assert!(RadialGrid::new(3, -1.0, 4096).unwrap_err().is_validation());
    let grid = RadialGrid::default();
    assert!(RadialProfile::from_fn(grid, |r| 1.0 / (1.0 + r)).unwrap_err().is_validation());
    assert!(RadialProfile::new(grid, vec![0.0; 10]).is_err());
    let tail = RadialProfile::with_tail(grid, grid.nodes().iter().map(|r| 1.0 / (1.0 + r)).collect()).unwrap();
    assert!(tail.flags().contains(Flag::TailBeyondSupport));
}

#[test]
fn resolution_warning_for_band_edge_content() {
    let grid = RadialGrid::new(3, 16.0, 256).unwrap();
    let rho0 = 0.95 * grid.rho_max();
    let packet = RadialProfile::from_fn(grid, |r| {
        let env = (-r * r / 8.0).exp();
        if r == 0.0 { rho0 * env } else { (rho0 * r).sin() / r * env }
    })
    .unwrap();
    assert!(forward_transform(&packet).flags().contains(Flag::ResolutionWarning));
    assert!(!forward_transform(&gaussian(grid)).flags().contains(Flag::ResolutionWarning));
}

#[test]
fn transform_runs_fast_at_default_resolution() {
    let f = gaussian(RadialGrid::default());
    forward_transform(&f);
    let start = Instant::now();
    let back = inverse_transform(&forward_transform(&f));
    assert!(start.elapsed().as_secs_f64() < 1.0);
    assert_eq!(back.values().len(), 4097);
}

#[test]
fn lp_norm_at_two_equals_l2() {
    let f = RadialProfile::from_fn(RadialGrid::default(), common::bump(2.0, 1.0)).unwrap();
    let l2 = integrate_weighted(&f, 0.0, 0.0).unwrap().sqrt();
    assert!((lp_norm(&f, 2.0).unwrap() - l2).abs() < 1e-12 * l2);
    let sup = lp_norm(&f, f64::INFINITY).unwrap();
    assert!((sup - (4.0 * PI).sqrt() * f.max_abs()).abs() < 1e-12);
}

#[test]
fn csv_and_binary_round_trip() {
    let grid = RadialGrid::new(3, 16.0, 64).unwrap();
    let f = gaussian(grid);
    let mut buf = Vec::new();
    write_profile_csv(&f, &mut buf).unwrap();
    assert!(String::from_utf8_lossy(&buf).starts_with("r,value\n"));
    let back = read_profile_csv(grid, buf.as_slice()).unwrap();
    assert_eq!(back.values(), f.values());

    let mut bin = Vec::new();
    write_binary(&grid, &[f.values(), f.values()], &mut bin).unwrap();
    assert_eq!(&bin[..4], b"RWL1");
    let (g2, slices) = read_binary(bin.as_slice()).unwrap();
    assert_eq!(g2, grid);
    assert_eq!(slices.len(), 2);
    assert_eq!(slices[1], f.values());
    bin[0] = b'X';
    assert!(read_binary(bin.as_slice()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transform_is_linear_and_isometric(
        c1 in 0.0f64..6.0, w1 in 0.4f64..2.0, c2 in 0.0f64..6.0, w2 in 0.4f64..2.0, a in -3.0f64..3.0
    ) {
        let grid = RadialGrid::new(3, 32.0, 1024).unwrap();
        let f = RadialProfile::from_fn(grid, common::bump(c1, w1)).unwrap();
        let g = RadialProfile::from_fn(grid, common::bump(c2, w2)).unwrap();
        let h = f.zip_map(&g, |_, x, y| x + a * y).unwrap();
        let (sf, sg, sh) = (forward_transform(&f), forward_transform(&g), forward_transform(&h));
        for k in 0..grid.len() {
            let lin = sf.values()[k] + a * sg.values()[k];
            prop_assert!((sh.values()[k] - lin).abs() <= 1e-12 * (1.0 + lin.abs()) * 100.0);
        }
        let phys = integrate_weighted(&h, 0.0, 0.0).unwrap();
        prop_assert!((sh.sobolev_sq(0.0) - phys).abs() <= 1e-11 * phys);
    }
}
