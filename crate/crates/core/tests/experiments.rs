use proptest::prelude::*;
use rwl_core::experiments::*;
use rwl_core::{Error, Flag, RadialProfile};

fn gaussian(amp: f64) -> DataSpec {
    DataSpec::new(DataShape::Gaussian { width: 1.0 }, amp)
}

fn ut_squared() -> rwl_core::solver::Nonlinearity {
    parse_nonlinearity("a=const:-1").unwrap()
}

#[test]
fn exact_exponential_law_is_recovered() {
    let pts: Vec<(f64, f64)> = (1..=8).map(|i| 0.2 * i as f64).map(|e| (e, (2.0 / e).exp())).collect();
    let fit = fit_law(&pts, LawKind::Exponential).unwrap();
    assert!((fit.slope - 2.0).abs() < 1e-6);
    assert!(fit.intercept.abs() < 1e-6);
    assert!((fit.r_squared - 1.0).abs() < 1e-12);
}

#[test]
fn exact_power_law_is_recovered() {
    let pts: Vec<(f64, f64)> = (1..=6).map(|i| i as f64).map(|e| (e, 3.0 * e.powf(-1.7))).collect();
    let fit = fit_law(&pts, LawKind::Power).unwrap();
    assert!((fit.power_exponent() - 1.7).abs() < 1e-9);
    assert!((fit.intercept - 3f64.ln()).abs() < 1e-9);
}

#[test]
fn fit_rejects_degenerate_input() {
    assert!(fit_law(&[(1.0, 1.0)], LawKind::Power).is_err());
    assert!(fit_law(&[(1.0, 1.0), (1.0, 2.0)], LawKind::Power).is_err());
    assert!(fit_law(&[(1.0, 1.0), (-1.0, 2.0)], LawKind::Exponential).is_err());
}

#[test]
fn empty_confirmed_set_is_an_error() {
    let err = lifespan_sweep_fit(&[], FitVariable::Amplitude).unwrap_err();
    assert!(err.is_validation());
}

#[test]
fn linear_waves_are_censored_at_the_time_cap() {
    let cfg = LifespanConfig { t_cap: 10.0, ladder: vec![256, 512], ..LifespanConfig::default() };
    let m = measure_lifespan(&gaussian(1.0), &parse_nonlinearity("").unwrap(), &cfg).unwrap();
    assert!(m.censored && !m.confirmed);
    assert_eq!(m.t_star, 10.0);
    assert!(m.flags.contains(Flag::Censored));
    assert!(m.rungs.iter().all(|r| r.outcome == RungOutcome::TimeCap));
}

#[test]
fn boundary_contact_censors_the_measurement() {
    let cfg = LifespanConfig { r_max: 10.0, t_cap: 100.0, ladder: vec![128, 256], ..LifespanConfig::default() };
    let m = measure_lifespan(&gaussian(1.0), &parse_nonlinearity("").unwrap(), &cfg).unwrap();
    assert!(m.censored);
    assert!(m.t_star < 10.0);
    assert!(m.rungs.iter().all(|r| r.outcome == RungOutcome::Boundary));
}

#[test]
fn ut_squared_model_blows_up_with_confirmed_time() {
    let m = measure_lifespan(&gaussian(5.0), &ut_squared(), &LifespanConfig::default()).unwrap();
    assert!(m.confirmed, "{m:?}");
    assert!(m.t_star > 1.0 && m.t_star < 50.0);
    assert!(m.refinement_gap.unwrap() <= 0.05);
    assert!(m.flags.contains(Flag::BlowupSignal));
    assert!(m.data_size > 0.0);
}

#[test]
fn doubling_the_clip_moves_the_time_within_the_refinement_gap() {
    for amp in [4.0, 5.0, 8.0] {
        let base = measure_lifespan(&gaussian(amp), &ut_squared(), &LifespanConfig::default()).unwrap();
        let cfg = LifespanConfig { clip_factor: 20.0, ..LifespanConfig::default() };
        let doubled = measure_lifespan(&gaussian(amp), &ut_squared(), &cfg).unwrap();
        assert!(base.confirmed && doubled.confirmed);
        let change = (doubled.t_star - base.t_star).abs() / base.t_star;
        assert!(change <= base.refinement_gap.unwrap() + 1e-12, "amp {amp}: {change}");
    }
}

#[test]
fn sweep_keeps_order_and_lifespan_decreases_with_amplitude() {
    let data: Vec<DataSpec> = [3.2, 4.0, 4.8, 5.6, 6.4, 7.2, 8.0].into_iter().map(gaussian).collect();
    let ms = lifespan_sweep(&data, &ut_squared(), &LifespanConfig::default()).unwrap();
    for (m, d) in ms.iter().zip(&data) {
        assert_eq!(&m.data, d);
    }
    let confirmed: Vec<f64> = ms.iter().filter(|m| m.confirmed).map(|m| m.t_star).collect();
    assert!(confirmed.len() >= 6);
    assert!(confirmed.windows(2).all(|w| w[1] <= w[0]), "{confirmed:?}");
    let fit = lifespan_sweep_fit(&ms, FitVariable::Amplitude).unwrap();
    assert_eq!(fit.excluded, ms.len() - confirmed.len());
    assert!(fit.exponential.slope > 0.0);
}

#[test]
fn lifespan_config_is_validated() {
    let bad = LifespanConfig { ladder: vec![512], ..LifespanConfig::default() };
    assert!(measure_lifespan(&gaussian(5.0), &ut_squared(), &bad).unwrap_err().is_validation());
    let bad = LifespanConfig { ladder: vec![512, 256], ..LifespanConfig::default() };
    assert!(measure_lifespan(&gaussian(5.0), &ut_squared(), &bad).unwrap_err().is_validation());
    let bad = LifespanConfig { t_cap: 0.0, ..LifespanConfig::default() };
    assert!(measure_lifespan(&gaussian(5.0), &ut_squared(), &bad).unwrap_err().is_validation());
}

#[test]
fn data_and_nonlinearity_strings_parse() {
    let d: DataSpec = "bump:amp=2,radius=3,slot=velocity".parse().unwrap();
    assert_eq!(d.shape, DataShape::Bump { radius: 3.0 });
    assert_eq!(d.amplitude, 2.0);
    assert_eq!(d.slot, DataSlot::Velocity);
    assert!("cube:amp=1".parse::<DataSpec>().is_err());
    assert!("gaussian:amp".parse::<DataSpec>().is_err());
    assert!("gaussian:width=-1".parse::<DataSpec>().is_err());
    let nl = parse_nonlinearity("g=linear:0.2; a=poly:1/0/2 ;b=zero").unwrap();
    assert!(!nl.is_free());
    assert!(parse_nonlinearity("").unwrap().is_free());
    assert!(parse_nonlinearity("h=zero").is_err());
    assert!(parse_nonlinearity("g=linear:x").is_err());
}

proptest! {
    #[test]
    fn data_spec_display_round_trips(amp in -10.0f64..10.0, scale in 0.1f64..5.0, bump: bool, vel: bool) {
        let shape = if bump { DataShape::Bump { radius: scale } } else { DataShape::Gaussian { width: scale } };
        let slot = if vel { DataSlot::Velocity } else { DataSlot::Position };
        let d = DataSpec { shape, amplitude: amp, slot };
        prop_assert_eq!(d.to_string().parse::<DataSpec>().unwrap(), d);
    }

    #[test]
    fn run_id_depends_only_on_command_and_config(x in -1e6f64..1e6, k in 0u32..100) {
        let cfg = serde_json::json!({ "x": x, "k": k });
        prop_assert_eq!(run_id("solve", &cfg), run_id("solve", &cfg.clone()));
        prop_assert_ne!(run_id("solve", &cfg), run_id("iterate", &cfg));
        prop_assert_eq!(run_id("solve", &cfg).len(), 16);
    }
}

#[test]
fn run_record_round_trips_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let mut rec = RunRecord::new("lifespan", &LifespanConfig::default()).unwrap();
    rec.add_output("table", "lifespan.csv");
    rec.add_metric("t_star", 6.75, "table").unwrap();
    assert!(rec.add_metric("c", 1.0, "missing").unwrap_err().is_validation());
    assert!(rec.add_metric("nan", f64::NAN, "table").is_err());
    let path = rec.store(dir.path()).unwrap();
    assert_eq!(path, dir.path().join(&rec.run_id).join(MANIFEST));
    assert_eq!(RunRecord::load(&path).unwrap(), rec);
    let again = RunRecord::new("lifespan", &LifespanConfig::default()).unwrap();
    assert_eq!(again.run_id, rec.run_id);
}

fn small_kss() -> KssConfig {
    KssConfig { points: 512, ..KssConfig::default() }
}

#[test]
fn free_wave_constant_is_stable_across_horizons() {
    let cfg = KssConfig { thetas: vec![0.0], ..small_kss() };
    let data = kss_data_family(cfg.grid().unwrap(), 4, 3).unwrap();
    let table = kss_constant_sweep(&data, &[CoefficientSpec::Zero], &ForcingSpec::Zero, &[0.25, 0.5, 1.0], &cfg).unwrap();
    assert_eq!(table.rows.len(), 12);
    for d in 0..4 {
        let ratios: Vec<f64> = table.rows.iter().filter(|r| r.data == d).map(|r| r.ratio).collect();
        let hi = ratios.iter().cloned().fold(0.0, f64::max);
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(hi / lo <= 2.0, "data {d}: {ratios:?}");
    }
}

#[test]
fn top_regularity_stays_within_three_of_bottom() {
    let cfg = small_kss();
    let data = kss_data_family(cfg.grid().unwrap(), 3, 11).unwrap();
    let coeffs = [CoefficientSpec::Bump { amplitude: 0.2, width: 2.0 }];
    let table = kss_constant_sweep(&data, &coeffs, &ForcingSpec::Zero, &[0.5], &cfg).unwrap();
    for d in 0..3 {
        let at = |theta: f64| table.rows.iter().find(|r| r.data == d && r.theta == theta).unwrap().ratio;
        let q = at(1.0) / at(0.0);
        assert!((1.0 / 3.0..=3.0).contains(&q), "data {d}: {q}");
    }
    assert_eq!(table.summary.len(), 3);
}

#[test]
fn vanishing_data_and_forcing_rows_are_excluded() {
    let cfg = small_kss();
    let z = RadialProfile::zeros(cfg.grid().unwrap());
    let table = kss_constant_sweep(&[(z.clone(), z)], &[CoefficientSpec::Zero], &ForcingSpec::Zero, &[0.5], &cfg).unwrap();
    assert!(table.rows.is_empty());
    assert_eq!(table.excluded, 3);
}

#[test]
fn forcing_alone_gives_finite_ratios() {
    let cfg = KssConfig { thetas: vec![0.0, 1.0], ..small_kss() };
    let z = RadialProfile::zeros(cfg.grid().unwrap());
    let forcing = ForcingSpec::Breather { amplitude: 1.0, width: 1.0, omega: 2.0 };
    let table = kss_constant_sweep(&[(z.clone(), z)], &[CoefficientSpec::Zero], &forcing, &[0.5], &cfg).unwrap();
    assert_eq!(table.rows.len(), 2);
    assert!(table.rows.iter().all(|r| r.data_norm == 0.0 && r.forcing_norm > 0.0 && r.ratio.is_finite() && r.ratio > 0.0));
}

#[test]
fn large_coefficients_are_skipped() {
    let cfg = small_kss();
    let data = kss_data_family(cfg.grid().unwrap(), 1, 0).unwrap();
    let coeffs = [CoefficientSpec::Zero, CoefficientSpec::Pulse { amplitude: 5.0, width: 0.5, speed: 0.5 }];
    let table = kss_constant_sweep(&data, &coeffs, &ForcingSpec::Zero, &[0.5, 1.0], &cfg).unwrap();
    assert_eq!(table.skipped.len(), 2);
    assert!(table.skipped.iter().all(|s| s.coefficient == 1 && s.smallness > cfg.smallness));
    assert!(table.rows.iter().all(|r| r.coefficient == 0));
}

#[test]
fn coefficient_gradients_match_finite_differences() {
    let specs = [
        CoefficientSpec::Bump { amplitude: 0.3, width: 1.5 },
        CoefficientSpec::Pulse { amplitude: 0.3, width: 1.0, speed: 0.7 },
        CoefficientSpec::Breather { amplitude: 0.3, width: 1.0, omega: 2.0 },
    ];
    let h = 1e-6;
    for c in &specs {
        for (t, r) in [(0.3, 0.5), (1.0, 2.0), (0.7, 1.1)] {
            let (gt, gr) = c.gradient(t, r);
            let ft = (c.value(t + h, r) - c.value(t - h, r)) / (2.0 * h);
            let fr = (c.value(t, r + h) - c.value(t, r - h)) / (2.0 * h);
            assert!((gt - ft).abs() < 1e-8 && (gr - fr).abs() < 1e-8, "{c:?}");
        }
    }
}

#[test]
fn kss_config_is_validated() {
    let cfg = KssConfig { thetas: vec![1.5], ..small_kss() };
    let data = kss_data_family(cfg.grid().unwrap(), 1, 0).unwrap();
    let err = kss_constant_sweep(&data, &[CoefficientSpec::Zero], &ForcingSpec::Zero, &[0.5], &cfg).unwrap_err();
    assert!(matches!(err, Error::Validation(_)));
    let err = kss_constant_sweep(&data, &[CoefficientSpec::Zero], &ForcingSpec::Zero, &[-1.0], &small_kss()).unwrap_err();
    assert!(err.is_validation());
}
