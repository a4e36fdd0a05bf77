use proptest::prelude::*;
use rwl_core::calculus::DyadicCutoff;
use rwl_core::iteration::{
    convergence_report, data_norm, mollify_data, picard_iterate, uniform_bound_report, IterationConfig, StopReason,
    Verdict,
};
use rwl_core::norms::sobolev_norm;
use rwl_core::radial::{forward_transform, inverse_transform};
use rwl_core::solver::{solve_linear, Nonlinearity, ScalarFn, SolverConfig};
use rwl_core::{Flag, RadialGrid, RadialProfile, SpectralProfile};

fn small_grid() -> RadialGrid {
    RadialGrid::new(3, 32.0, 1024).unwrap()
}

fn gaussian(grid: RadialGrid, amp: f64) -> RadialProfile {
    RadialProfile::from_fn(grid, |r| amp * (-r * r).exp()).unwrap()
}

fn quadratic_model(kappa: f64, a: f64) -> Nonlinearity {
    Nonlinearity::new(ScalarFn::Linear { k: kappa }, ScalarFn::Constant { value: a }, ScalarFn::Zero).unwrap()
}

fn relaxed() -> IterationConfig {
    IterationConfig { enforce_smallness: false, ..IterationConfig::default() }
}

fn sub(a: &RadialProfile, b: &RadialProfile) -> RadialProfile {
    a.zip_map(b, |_, x, y| x - y).unwrap()
}

#[test]
fn mollification_is_identity_on_low_band() {
    let grid = RadialGrid::new(3, 64.0, 4096).unwrap();
    for level in 3..7u32 {
        let top = 2f64.powi(level as i32 - 2);
        let spec: Vec<f64> = (0..grid.len()).map(|k| {
            let rho = grid.rho(k);
            (-0.1 * rho * rho).exp() * DyadicCutoff::psi(rho / top)
        }).collect();
        let u0 = inverse_transform(&SpectralProfile::new(grid, spec).unwrap());
        let u1 = u0.scaled(-0.5);
        let (m0, m1) = mollify_data(&u0, &u1, level).unwrap();
        let scale = u0.max_abs();
        assert!(sub(&m0, &u0).max_abs() <= 1e-10 * scale);
        assert!(sub(&m1, &u1).max_abs() <= 1e-10 * scale);
    }
}

#[test]
fn mollification_error_decays_at_the_regularity_gap() {
    let grid = RadialGrid::new(3, 64.0, 4096).unwrap();
    let u = RadialProfile::from_fn(grid, |r| (-r).exp()).unwrap();
    let zero = RadialProfile::zeros(grid);
    let (s, s_low) = (2.0, 1.0);
    let top = sobolev_norm(&u, s).unwrap();
    let mut scaled = Vec::new();
    for level in 3..7u32 {
        let (m, _) = mollify_data(&u, &zero, level).unwrap();
        let gap = sobolev_norm(&sub(&m, &u), s_low).unwrap();
        let c = gap * 2f64.powf((s - s_low) * level as f64) / top;
        // The multiplier 1 - psi vanishes below 2^k, so the constant is at most one.
        assert!(c <= 1.0 + 1e-9, "level {level}: constant {c}");
        scaled.push(c);
    }
    assert!(scaled.iter().all(|c| *c > 0.0), "{scaled:?}");
}

#[test]
fn mollification_does_not_increase_data_norms() {
    let grid = RadialGrid::new(3, 64.0, 4096).unwrap();
    let u0 = RadialProfile::from_fn(grid, |r| (-r).exp() * (1.0 + r)).unwrap();
    let u1 = RadialProfile::from_fn(grid, |r| (-r * r).exp() * (2.0 * r).cos()).unwrap();
    for level in 3..7u32 {
        let (m0, m1) = mollify_data(&u0, &u1, level).unwrap();
        for theta in [0.0, 0.4, 0.8] {
            let before = data_norm(&u0, &u1, theta).unwrap();
            let after = data_norm(&m0, &m1, theta).unwrap();
            assert!(after <= 1.05 * before, "level {level} theta {theta}");
        }
    }
}

#[test]
fn mollification_of_zero_is_zero_and_low_levels_are_rejected() {
    let grid = small_grid();
    let z = RadialProfile::zeros(grid);
    let (a, b) = mollify_data(&z, &z, 4).unwrap();
    assert_eq!(a.max_abs(), 0.0);
    assert_eq!(b.max_abs(), 0.0);
    assert!(mollify_data(&z, &z, 2).unwrap_err().is_validation());
}

#[test]
fn zero_data_give_zero_iterates() {
    let grid = small_grid();
    let z = RadialProfile::zeros(grid);
    let run = picard_iterate(&z, &z, &quadratic_model(1.0, 1.0), 1.0, 4, &IterationConfig::default()).unwrap();
    assert_eq!(run.iterates.len(), 4);
    for it in &run.iterates {
        assert!((0..it.field.len()).all(|m| it.field.u(m).iter().all(|v| *v == 0.0)));
    }
    assert_eq!(convergence_report(&run).unwrap().verdict, Verdict::Convergent);
}

#[test]
fn free_iteration_reproduces_the_linear_solution() {
    let grid = small_grid();
    let u0 = gaussian(grid, 0.5);
    let u1 = RadialProfile::from_fn(grid, |r| r * r * (-r * r).exp()).unwrap();
    let run = picard_iterate(&u0, &u1, &Nonlinearity::free(), 1.0, 5, &IterationConfig::default()).unwrap();
    let cfg = SolverConfig { speed_bound: Some(2.0), ..SolverConfig::default() };
    let zero = |_: f64, _: f64| 0.0;
    for it in &run.iterates {
        let linear = solve_linear(&it.data.0, &it.data.1, &zero, &zero, 1.0, &cfg).unwrap();
        let diff = it.field.difference(&linear.field).unwrap();
        let worst = (0..diff.len()).map(|m| diff.u(m).iter().fold(0.0f64, |a, v| a.max(v.abs()))).fold(0.0, f64::max);
        assert!(worst < 1e-12, "iterate {}: {worst}", it.k);
    }
    let bounds = uniform_bound_report(&run).unwrap();
    // Gaussian data are unchanged by mollification from level four on.
    let first: Vec<f64> = bounds.rows.iter().filter(|r| r.k == 4).map(|r| r.ratio).collect();
    for k in 5..8 {
        let later: Vec<f64> = bounds.rows.iter().filter(|r| r.k == k).map(|r| r.ratio).collect();
        for (a, b) in first.iter().zip(&later) {
            assert!((a - b).abs() <= 1e-8 * a, "k {k}: {a} vs {b}");
        }
    }
    assert!(bounds.jumps.is_empty());
    assert_eq!(convergence_report(&run).unwrap().verdict, Verdict::Convergent);
}

#[test]
fn free_differences_are_mollification_differences() {
    let grid = RadialGrid::new(3, 32.0, 2048).unwrap();
    let u0 = RadialProfile::from_fn(grid, |r| 0.3 * (-r).exp()).unwrap();
    let u1 = RadialProfile::zeros(grid);
    let cfg = IterationConfig::default();
    let run = picard_iterate(&u0, &u1, &Nonlinearity::free(), 0.5, 5, &cfg).unwrap();
    let diffs = run.difference_norms().unwrap();
    for (w, d) in run.iterates.windows(2).zip(&diffs) {
        let data_gap = data_norm(&sub(&w[1].data.0, &w[0].data.0), &sub(&w[1].data.1, &w[0].data.1), run.s0 - 1.0).unwrap();
        assert!(data_gap > 0.0);
        assert!(*d <= 3.0 * data_gap, "k {}: {d} vs data gap {data_gap}", w[1].k);
    }
    let report = convergence_report(&run).unwrap();
    assert_eq!(report.verdict, Verdict::Convergent);
    assert!(report.rows.windows(2).all(|r| r[1].partial_sum >= r[0].partial_sum));
}

#[test]
fn small_data_contract_geometrically() {
    let grid = small_grid();
    let u0 = gaussian(grid, 0.3);
    let u1 = RadialProfile::zeros(grid);
    let nl = quadratic_model(0.2, 3.0);
    let run = picard_iterate(&u0, &u1, &nl, 0.5, 8, &IterationConfig::default()).unwrap();
    assert!(run.truncated.is_none());
    let report = convergence_report(&run).unwrap();
    assert!(report.rows.len() >= 6);
    assert!(report.fit_ratio.unwrap() <= 0.6, "{report:?}");
    assert!(report.max_successive_ratio.unwrap() <= 0.6);
    assert_eq!(report.verdict, Verdict::Convergent);
    let distance = report.limit_distance.unwrap();
    assert!(distance < report.rows.last().unwrap().value);
}

#[test]
fn contraction_ratio_shrinks_with_the_horizon() {
    let grid = small_grid();
    let u0 = gaussian(grid, 0.3);
    let u1 = RadialProfile::zeros(grid);
    let nl = quadratic_model(0.2, 3.0);
    let ratios: Vec<f64> = [0.25, 0.5, 1.0, 2.0]
        .iter()
        .map(|&t| {
            let run = picard_iterate(&u0, &u1, &nl, t, 6, &relaxed()).unwrap();
            convergence_report(&run).unwrap().fit_ratio.unwrap()
        })
        .collect();
    assert!(ratios.windows(2).all(|w| w[0] < w[1]), "{ratios:?}");
}

#[test]
fn oversized_horizon_does_not_contract() {
    let grid = small_grid();
    let u0 = gaussian(grid, 0.3);
    let u1 = RadialProfile::zeros(grid);
    let nl = quadratic_model(0.2, 3.0);
    let run = picard_iterate(&u0, &u1, &nl, 8.0, 8, &relaxed()).unwrap();
    assert!(run.flags.contains(Flag::SmallnessViolated));
    let report = convergence_report(&run).unwrap();
    assert_eq!(report.verdict, Verdict::Divergent);
    assert!(report.flags.contains(Flag::NonContraction));
    assert_eq!(report.t_final, 8.0);
    assert!(report.data_size > 0.0);
    assert!(report.limit_distance.is_none());

    let strict = IterationConfig { smallness: 0.3, ..IterationConfig::default() };
    let truncated = picard_iterate(&u0, &u1, &nl, 8.0, 8, &strict).unwrap();
    let stage = truncated.truncated.expect("stage report");
    assert_eq!(truncated.iterates.len() as u32, stage.k - 3);
    match stage.reason {
        StopReason::Smallness { value, threshold } => assert!(value >= threshold),
        other => panic!("unexpected stop {other:?}"),
    }
}

#[test]
fn amplitude_guard_truncates_runaway_iterates() {
    let grid = small_grid();
    let u0 = gaussian(grid, 0.5);
    let u1 = RadialProfile::zeros(grid);
    let run = picard_iterate(&u0, &u1, &quadratic_model(0.2, 2.0), 6.0, 8, &relaxed()).unwrap();
    assert!(run.flags.contains(Flag::BlowupSignal));
    assert!(matches!(run.truncated.unwrap().reason, StopReason::Amplitude { .. }));
}

#[test]
fn lost_hyperbolicity_is_propagated() {
    let grid = small_grid();
    let u0 = gaussian(grid, 0.6);
    let u1 = RadialProfile::zeros(grid);
    let err = picard_iterate(&u0, &u1, &quadratic_model(0.3, 4.0), 3.0, 8, &relaxed()).unwrap_err();
    assert!(!err.is_validation(), "{err}");
}

#[test]
fn iterates_satisfy_their_discrete_equations() {
    let grid = small_grid();
    let u0 = gaussian(grid, 0.3);
    let u1 = RadialProfile::from_fn(grid, |r| 0.2 * (-r * r).exp()).unwrap();
    for n in [3usize, 5] {
        let g = RadialGrid::new(n, 32.0, 1024).unwrap();
        let d0 = RadialProfile::new(g, u0.values().to_vec()).unwrap();
        let d1 = RadialProfile::new(g, u1.values().to_vec()).unwrap();
        let run = picard_iterate(&d0, &d1, &quadratic_model(0.2, 1.0), 1.0, 4, &IterationConfig::default()).unwrap();
        for it in &run.iterates {
            assert!(it.residual < 1e-9, "n {n} k {}: {}", it.k, it.residual);
        }
    }
}

#[test]
fn uniform_bounds_and_embedding_constant() {
    let grid = small_grid();
    let u0 = gaussian(grid, 0.3);
    let u1 = RadialProfile::zeros(grid);
    let run = picard_iterate(&u0, &u1, &quadratic_model(0.2, 3.0), 1.0, 6, &IterationConfig::default()).unwrap();
    let report = uniform_bound_report(&run).unwrap();
    assert!(report.jumps.is_empty());
    assert!(report.max_ratio.is_finite() && report.max_ratio < 10.0);
    assert!(report.rows.iter().any(|r| r.besov && (r.theta - 0.5).abs() < 1e-12));
    assert!(report.rows.iter().any(|r| (r.theta - (run.s0 - 1.0)).abs() < 1e-12));
    let c = report.embedding_constant.unwrap();
    assert!(c > 0.0 && c < 1.0, "embedding constant {c}");

    let single = picard_iterate(&u0, &u1, &quadratic_model(0.2, 3.0), 1.0, 1, &IterationConfig::default()).unwrap();
    let one = uniform_bound_report(&single).unwrap();
    assert!(one.rows.iter().all(|r| r.k == 3));
    assert!(one.jumps.is_empty());
    assert!(convergence_report(&single).unwrap_err().is_validation());
}

#[test]
fn configuration_windows_are_checked() {
    let grid = small_grid();
    let u0 = gaussian(grid, 0.1);
    let z = RadialProfile::zeros(grid);
    let nl = quadratic_model(0.2, 1.0);
    let bad_s0 = IterationConfig { s0: Some(0.1), ..IterationConfig::default() };
    assert!(picard_iterate(&u0, &z, &nl, 1.0, 2, &bad_s0).unwrap_err().is_validation());
    let bad_s = IterationConfig { s: 1.4, ..IterationConfig::default() };
    assert!(picard_iterate(&u0, &z, &nl, 1.0, 2, &bad_s).unwrap_err().is_validation());
    assert!(picard_iterate(&u0, &z, &nl, 1.0, 0, &IterationConfig::default()).unwrap_err().is_validation());
    assert!(Nonlinearity::new(ScalarFn::Constant { value: 1.0 }, ScalarFn::Zero, ScalarFn::Zero).is_err());
    assert!(Nonlinearity::new(ScalarFn::Poly { coeffs: vec![0.5, 1.0] }, ScalarFn::Zero, ScalarFn::Zero).is_err());
}

#[test]
fn mollified_spectrum_matches_cutoff() {
    let grid = small_grid();
    let u = gaussian(grid, 1.0);
    let (m, _) = mollify_data(&u, &u, 3).unwrap();
    let a = forward_transform(&u);
    let b = forward_transform(&m);
    for k in 0..grid.len() {
        let expect = a.values()[k] * DyadicCutoff::psi(grid.rho(k) / 8.0);
        assert!((b.values()[k] - expect).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn polynomial_derivatives_match_differences(c in prop::collection::vec(-2.0f64..2.0, 1..5), u in -1.5f64..1.5) {
        let f = ScalarFn::Poly { coeffs: c };
        let h = 1e-5;
        let d1 = (f.eval(u + h) - f.eval(u - h)) / (2.0 * h);
        let d2 = (f.derivative(u + h) - f.derivative(u - h)) / (2.0 * h);
        prop_assert!((f.derivative(u) - d1).abs() < 1e-6);
        prop_assert!((f.second_derivative(u) - d2).abs() < 1e-6);
    }

    #[test]
    fn builtin_derivatives_match_differences(k in -2.0f64..2.0, u in -1.5f64..1.5, which in 0usize..4) {
        let f = match which {
            0 => ScalarFn::Linear { k },
            1 => ScalarFn::Quadratic { k },
            2 => ScalarFn::Sine { k },
            _ => ScalarFn::Constant { value: k },
        };
        let h = 1e-5;
        prop_assert!((f.derivative(u) - (f.eval(u + h) - f.eval(u - h)) / (2.0 * h)).abs() < 1e-6);
        prop_assert!((f.second_derivative(u) - (f.derivative(u + h) - f.derivative(u - h)) / (2.0 * h)).abs() < 1e-6);
    }
}
