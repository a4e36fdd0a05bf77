use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rwl_core::multiplier::{
    identity_residual, observed_orders, sign_condition_report, MultiplierSpec, ResidualReport, ResidualWindow,
};
use rwl_core::norms::SpaceTimeField;
use rwl_core::RadialGrid;

fn manufactured(t: f64, r: f64) -> f64 {
    (-(r - 2.0 - 0.3 * t).powi(2)).exp() * (1.0 + 0.3 * (2.0 * t).sin()) + 0.2 * (-r * r / 4.0).exp() * t.cos()
}

fn coefficient(t: f64, r: f64) -> f64 {
    0.2 * (-(r - 2.0).powi(2)).exp() * (1.0 + 0.5 * t.cos())
}

fn ladder(spec: &MultiplierSpec, dim: usize) -> Vec<ResidualReport> {
    [0.04f64, 0.02, 0.01]
        .iter()
        .map(|&h| {
            let grid = RadialGrid::new(dim, 6.0, (6.0 / h).round() as usize).unwrap();
            let steps = (1.0 / h).round() as usize;
            let times = (0..=steps).map(|k| k as f64 * h).collect();
            let field = SpaceTimeField::sample(grid, times, manufactured, |_, _| 0.0).unwrap();
            identity_residual(&field, &coefficient, spec, ResidualWindow { r_lo: 0.5, r_hi: 4.0 }).unwrap()
        })
        .collect()
}

#[test]
fn identity_residuals_converge_at_second_order() {
    for (spec, dim) in [
        (MultiplierSpec::power(0.4, 1.0, 3).unwrap(), 3),
        (MultiplierSpec::ratio(2.0, 3).unwrap(), 3),
        (MultiplierSpec::unit(3).unwrap(), 3),
        (MultiplierSpec::power(0.7, 0.5, 5).unwrap(), 5),
    ] {
        let reports = ladder(&spec, dim);
        for (name, orders) in observed_orders(&reports) {
            for (k, p) in orders.iter().enumerate() {
                let ratio = 2f64.powf(*p);
                println!("{:?} {name} level {k}: ratio {ratio:.3} order {p:.3}", spec.family);
                assert!(*p >= 1.9, "{name}: observed order {p}");
                assert!((3.6..=4.4).contains(&ratio), "{name}: refinement ratio {ratio}");
            }
        }
        let defects: Vec<f64> = reports.iter().map(|r| r.balance_defect).collect();
        assert!(defects[2] < defects[0] / 8.0, "balance defects {defects:?}");
    }
}

#[test]
fn identity_rejects_bad_windows() {
    let grid = RadialGrid::new(3, 6.0, 150).unwrap();
    let times = (0..=10).map(|k| k as f64 * 0.04).collect();
    let field = SpaceTimeField::sample(grid, times, manufactured, |_, _| 0.0).unwrap();
    let spec = MultiplierSpec::unit(3).unwrap();
    let bad = ResidualWindow { r_lo: 0.0, r_hi: 4.0 };
    assert!(identity_residual(&field, &coefficient, &spec, bad).unwrap_err().is_validation());
    let wrong_dim = MultiplierSpec::unit(5).unwrap();
    assert!(identity_residual(&field, &coefficient, &wrong_dim, ResidualWindow::default()).is_err());
}

fn log_radii(big_r: f64) -> Vec<f64> {
    (0..=1200).map(|k| big_r * 10f64.powf(-6.0 + 12.0 * k as f64 / 1200.0)).collect()
}

#[test]
fn sign_conditions_hold_over_twelve_decades() {
    for dim in [3, 5, 7] {
        for k in 1..=9 {
            let mu = 0.1 * k as f64;
            for big_r in [1e-2, 1.0, 1e2] {
                let spec = MultiplierSpec::power(mu, big_r, dim).unwrap();
                let rep = sign_condition_report(&spec, &log_radii(big_r));
                assert_eq!(rep.violations, 0, "mu={mu} R={big_r}: {:?}", rep.failed);
            }
        }
        for big_r in [1e-2, 1.0, 1e2] {
            let spec = MultiplierSpec::ratio(big_r, dim).unwrap();
            let mut radii = log_radii(big_r);
            radii.extend((0..=200).map(|k| big_r * (0.5 + 0.5 * k as f64 / 200.0)));
            assert_eq!(sign_condition_report(&spec, &radii).violations, 0);
        }
    }
}

#[test]
fn closed_forms_match_finite_differences() {
    let spec = MultiplierSpec::power(0.35, 1.7, 5).unwrap();
    let h = 1e-4;
    for &r in &[0.05, 0.3, 1.0, 4.0, 30.0] {
        let df = (spec.f(r + h) - spec.f(r - h)) / (2.0 * h);
        assert!((df - spec.df(r)).abs() < 1e-6 * spec.df(r).abs().max(1e-3));
        let g = |s: f64| spec.f_over_r(s);
        let d1 = (g(r + h) - g(r - h)) / (2.0 * h);
        let d2 = (g(r + h) - 2.0 * g(r) + g(r - h)) / (h * h);
        let neg_lap = -(d2 + 4.0 / r * d1);
        let closed = spec.neg_laplacian_f_over_r(r);
        assert!((neg_lap - closed).abs() < 1e-4 * closed.abs(), "r={r}: {neg_lap} vs {closed}");
    }
}

#[test]
fn bulk_density_is_nonnegative_and_coercive() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..100 {
        let mu = rng.gen_range(0.05..0.95);
        let big_r = 10f64.powf(rng.gen_range(-2.0..2.0));
        let spec = MultiplierSpec::power(mu, big_r, 3).unwrap();
        let c = spec.q0_lower_constant().unwrap();
        for _ in 0..50 {
            let r = big_r * 10f64.powf(rng.gen_range(-4.0..0.0));
            let (u, ut, ur) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let q0 = spec.q0_density(r, u, ut, ur);
            assert!(q0 >= -1e-12);
            let tilde = ut * ut + ur * ur + (u / r).powi(2);
            assert!(q0 >= (1.0 - 1e-12) * c * tilde / (big_r.powf(mu) * r.powf(1.0 - mu)));
        }
    }
}

#[test]
fn multiplier_constructors_validate() {
    assert!(MultiplierSpec::power(1.2, 1.0, 3).is_err());
    assert!(MultiplierSpec::power(0.5, -1.0, 3).is_err());
    assert!(MultiplierSpec::ratio(1.0, 4).is_err());
}
