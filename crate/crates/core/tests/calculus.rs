mod common;

use proptest::prelude::*;
use rwl_core::calculus::{
    apply_weight, fractional_derivative, lp_project, x_multiplier_apply, DyadicCutoff, WeightSpec,
};
use rwl_core::norms::sobolev_norm;
use rwl_core::radial::radial_derivative;
use rwl_core::{Flag, RadialGrid, RadialProfile};

fn fd4_neg_laplacian(f: &dyn Fn(f64) -> f64, r: f64, h: f64, n: f64) -> f64 {
    let d1 = (-f(r + 2.0 * h) + 8.0 * f(r + h) - 8.0 * f(r - h) + f(r - 2.0 * h)) / (12.0 * h);
    let d2 = (-f(r + 2.0 * h) + 16.0 * f(r + h) - 30.0 * f(r) + 16.0 * f(r - h) - f(r - 2.0 * h)) / (12.0 * h * h);
    -(d2 + (n - 1.0) / r * d1)
}

#[test]
fn second_order_derivative_is_negative_laplacian() {
    for grid in [RadialGrid::default(), RadialGrid::new(5, 24.0, 768).unwrap()] {
        let n = grid.dim() as f64;
        let f = |r: f64| (-0.5 * r * r).exp();
        let prof = RadialProfile::from_fn(grid, f).unwrap();
        let d2 = fractional_derivative(&prof, 2.0).unwrap();
        let h = grid.dr();
        let mut err: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 4..grid.len() / 3 {
            let r = grid.r(i);
            let oracle = fd4_neg_laplacian(&f, r, h, n);
            err = err.max((d2.values()[i] - oracle).abs());
            scale = scale.max(oracle.abs());
        }
        assert!(err < 1e-6 * scale, "dimension {}: {}", grid.dim(), err / scale);
    }
}

#[test]
fn fractional_derivatives_compose() {
    let grid = RadialGrid::default();
    let f = RadialProfile::from_fn(grid, common::bump(2.0, 0.8)).unwrap();
    let half = fractional_derivative(&fractional_derivative(&f, 0.5).unwrap(), 0.5).unwrap();
    let one = fractional_derivative(&f, 1.0).unwrap();
    assert!(common::max_rel_err(half.values(), one.values()) < 1e-10);
    assert!(fractional_derivative(&f, -3.0).unwrap_err().is_validation());
}

#[test]
fn dyadic_pieces_sum_to_identity() {
    let grid = RadialGrid::default();
    let f = RadialProfile::from_fn(grid, common::bump(1.5, 0.5)).unwrap();
    let (j_min, j_max) = DyadicCutoff::band(&grid);
    let mut sum = vec![0.0; grid.len()];
    for j in j_min..=j_max {
        for (s, v) in sum.iter_mut().zip(lp_project(&f, j).values()) {
            *s += v;
        }
    }
    assert!(common::max_rel_err(&sum, f.values()) < 1e-10);
}

#[test]
fn cutoff_is_a_partition_of_unity() {
    for k in 1..2000 {
        let x = 1e-3 * k as f64 * 7.0;
        let total: f64 = (-12..12).map(|j| DyadicCutoff::phi(2f64.powi(-j) * x)).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }
    assert_eq!(DyadicCutoff::phi(0.49), 0.0);
    assert_eq!(DyadicCutoff::phi(2.01), 0.0);
}

#[test]
fn multipliers_commute() {
    let grid = RadialGrid::default();
    let f = RadialProfile::from_fn(grid, common::bump(0.0, 0.6)).unwrap();
    for j in [-2, 0, 2, 4] {
        let a = fractional_derivative(&lp_project(&f, j), 0.7).unwrap();
        let b = lp_project(&fractional_derivative(&f, 0.7).unwrap(), j);
        let scale = f.max_abs();
        let err = a.values().iter().zip(b.values()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(err < 1e-10 * scale);
    }
}

#[test]
fn x_multiplier_on_gaussian_matches_closed_form() {
    let grid = RadialGrid::default();
    let u = RadialProfile::from_fn(grid, |r| (-r * r).exp()).unwrap();
    let xu = x_multiplier_apply(&u);
    for i in 1..grid.len() {
        let r = grid.r(i);
        let exact = (-2.0 * r + 1.0 / r) * (-r * r).exp();
        assert!((xu.values()[i] - exact).abs() < 1e-8 * (1.0 + exact.abs()));
    }
}

#[test]
fn x_multiplier_annihilates_the_critical_power() {
    let grid = RadialGrid::default();
    let values: Vec<f64> = grid.nodes().iter().map(|&r| if r > 0.0 { 1.0 / r } else { 0.0 }).collect();
    let u = RadialProfile::with_tail(grid, values).unwrap();
    let xu = x_multiplier_apply(&u);
    for i in 32..grid.len() - 8 {
        let r = grid.r(i);
        assert!(xu.values()[i].abs() * r * r < 1e-6, "r = {r}");
    }
}

#[test]
fn spectral_radial_derivative_matches_closed_form() {
    for grid in [RadialGrid::default(), RadialGrid::new(5, 24.0, 768).unwrap()] {
        let u = RadialProfile::from_fn(grid, |r| (-r * r).exp()).unwrap();
        let du = radial_derivative(&u);
        let exact: Vec<f64> = grid.nodes().iter().map(|&r| -2.0 * r * (-r * r).exp()).collect();
        assert!(common::max_rel_err(du.values(), &exact) < 1e-9);
    }
}

#[test]
fn weights_and_muckenhoupt_classes() {
    let grid = RadialGrid::default();
    let u = RadialProfile::from_fn(grid, |r| (-r * r).exp()).unwrap();
    let w = apply_weight(&u, &WeightSpec::power(-0.5));
    assert!(w.flags().contains(Flag::OriginExcluded));
    assert_eq!(w.values()[0], 0.0);
    assert!((w.values()[10] - grid.r(10).powf(-0.5) * u.values()[10]).abs() < 1e-15);
    for &beta in &[-1.4, -0.5, 0.0, 1.0, 1.49] {
        assert!(WeightSpec::power(2.0 * beta).is_ap(3, 2.0));
    }
    for &beta in &[-1.5, -2.0, 1.5, 3.0] {
        assert!(!WeightSpec::power(2.0 * beta).is_ap(3, 2.0));
    }
    let window_weight = WeightSpec::from_deltas(0.25, 0.5);
    assert!(window_weight.in_universal_window(3));
    for p in [1.0, 1.5, 2.0, 4.0] {
        assert!(window_weight.is_ap(3, p));
    }
    assert!(!WeightSpec::from_deltas(0.25, 1.5).in_universal_window(3));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sobolev_norm_rescales(lambda in 0.6f64..1.8, theta in -1.0f64..1.4, w in 0.6f64..1.2) {
        let grid = RadialGrid::new(3, 128.0, 4096).unwrap();
        let f = RadialProfile::from_fn(grid, common::bump(1.0, w)).unwrap();
        let base = common::bump(1.0, w);
        let f_l = RadialProfile::from_fn(grid, move |r| base(lambda * r)).unwrap();
        let lhs = sobolev_norm(&f_l, theta).unwrap();
        let rhs = lambda.powf(theta - 1.5) * sobolev_norm(&f, theta).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-6 * rhs);
    }
}
