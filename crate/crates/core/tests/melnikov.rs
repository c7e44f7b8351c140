use num_complex::Complex64;
use splitmel::melnikov::*;
use splitmel::separatrix::{preset_orbit, shoot_separatrix, ShootOpts};
use splitmel::system::{refine_saddle, FourierVectorField, TOL_EQ};
use splitmel::{Error, PlanarSystem, PresetKind, PresetParams};
use std::f64::consts::PI;

fn series(kind: PresetKind, beta: f64, delta: f64, omega: f64) -> MelnikovSeries {
    let sys = PlanarSystem::preset(kind, PresetParams { beta, delta, omega }).unwrap();
    let o = preset_orbit(&sys, 1).unwrap();
    melnikov_series(&o, &sys, TOL_COEFF).unwrap()
}

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

#[test]
fn duffing1_coefficients() {
    let s = series(PresetKind::Duffing1, 1.0, 1.0, 1.0);
    let m1 = 2f64.sqrt() / 2.0 * PI * sech(PI / 2.0);
    assert!((s.coeff(0) - Complex64::from(-4.0 / 3.0)).norm() < 1e-9);
    assert!((s.coeff(1) - Complex64::new(0.0, -m1)).norm() < 1e-9);
    assert!((s.coeff(-1) - Complex64::new(0.0, m1)).norm() < 1e-9);
    assert!((m1 - 0.88530).abs() < 1e-4);
    // Maximum of M over θ.
    let max = (0..100_000)
        .map(|k| eval_melnikov(&s, 2.0 * PI * k as f64 / 1e5))
        .fold(f64::MIN, f64::max);
    assert!((max - (-4.0 / 3.0 + 2f64.sqrt() * PI * sech(PI / 2.0))).abs() < 1e-8);
    assert!((max - 0.43720).abs() < 2e-4);
    let s0 = series(PresetKind::Duffing1, 0.0, 1.0, 1.0);
    assert!((s0.coeff(0) - Complex64::from(-4.0 / 3.0)).norm() < 1e-9);
}

#[test]
fn duffing2_coefficients() {
    let s = series(PresetKind::Duffing2, 1.0, 0.0, 1.0);
    let m1 = 2f64.sqrt() / 2.0 * PI / (PI / 2f64.sqrt()).sinh();
    assert!((s.coeff(1) - Complex64::from(m1)).norm() < 1e-9);
    assert!((m1 - 0.4875774).abs() < 1e-7);
    let s = series(PresetKind::Duffing2, 0.0, 1.0, 1.0);
    assert!((s.coeff(0) - Complex64::from(-2.0 * 2f64.sqrt() / 3.0)).norm() < 1e-9);
    assert!(s.coeff(1).norm() < 1e-12);
    let s = series(PresetKind::Duffing2, 1.0, 1.0, 1.0);
    assert!((eval_melnikov(&s, PI / 2.0) + 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-9);
    assert!((eval_melnikov(&s, PI / 2.0) + 0.94281).abs() < 1e-5);
}

#[test]
fn unforced_series_vanishes() {
    let sys = PlanarSystem::preset(
        PresetKind::Duffing1,
        PresetParams {
            beta: 1.0,
            delta: 0.0,
            omega: 1.0,
        },
    )
    .unwrap()
    .with_forcing(FourierVectorField::zero());
    let o = splitmel::separatrix::closed_form_orbit("duffing1", 1).unwrap();
    let s = melnikov_series(&o, &sys, TOL_COEFF).unwrap();
    assert!(s.coeffs.iter().all(|c| c.norm() == 0.0));
    assert_eq!(eval_melnikov(&s, 1.3), 0.0);
    assert!(matches!(
        simple_zeros(&s, TOL_SIMPLE),
        Err(Error::ConstantSeries)
    ));
    assert_eq!(
        certify_nonintegrability(&s, TOL_CERT).verdict,
        Verdict::Inconclusive
    );
}

#[test]
fn certificates() {
    let c = certify_nonintegrability(&series(PresetKind::Duffing1, 1.0, 0.0, 1.0), TOL_CERT);
    assert_eq!((c.verdict, c.witness), (Verdict::NonIntegrable, 1));
    assert!(c.margin > 0.0);
    let c = certify_nonintegrability(&series(PresetKind::Duffing1, 0.0, 1.0, 1.0), TOL_CERT);
    assert_eq!(c.verdict, Verdict::Inconclusive);
    assert!(c.margin <= 0.0);
    let c = certify_nonintegrability(&series(PresetKind::Duffing1, 1e-9, 0.0, 1.0), TOL_CERT);
    assert_eq!(c.verdict, Verdict::Inconclusive);
}

#[test]
fn zeros_and_thresholds() {
    let s = series(PresetKind::Duffing1, 1.0, 0.0, 1.0);
    let z = simple_zeros(&s, TOL_SIMPLE).unwrap();
    assert_eq!(z.len(), 2);
    assert!(z.iter().all(|z| z.simple && z.theta.sin().abs() < 1e-9));
    assert_eq!(zero_existence_ratio(&s).unwrap(), 0.0);

    let t = 2.0 / (3.0 * PI) * (PI / 2f64.sqrt()).sinh();
    let below = series(PresetKind::Duffing2, 0.99 * t, 1.0, 1.0);
    assert!(simple_zeros(&below, TOL_SIMPLE).unwrap().is_empty());
    assert!(zero_existence_ratio(&below).unwrap() > 1.0);
    let above = series(PresetKind::Duffing2, 1.01 * t, 1.0, 1.0);
    assert_eq!(simple_zeros(&above, TOL_SIMPLE).unwrap().len(), 2);
    let at = series(PresetKind::Duffing2, t, 1.0, 1.0);
    assert!((zero_existence_ratio(&at).unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(
        zero_existence_ratio(&series(PresetKind::Duffing2, 0.0, 1.0, 1.0)).unwrap(),
        f64::INFINITY
    );

    for (beta, delta) in [(0.3, 1.0), (2.0, 1.0), (0.7, 0.2), (0.1, 0.5)] {
        let s = series(PresetKind::Duffing1, beta, delta, 1.3);
        let has = !simple_zeros(&s, TOL_SIMPLE).unwrap().is_empty();
        assert_eq!(has, zero_existence_ratio(&s).unwrap() < 1.0);
    }
}

#[test]
fn linearity_in_beta() {
    let a = series(PresetKind::Duffing2, 0.8, 0.0, 1.0).coeff(1);
    let b = series(PresetKind::Duffing2, 1.6, 0.0, 1.0).coeff(1);
    assert!((b - 2.0 * a).norm() <= 1e-12 * b.norm());
}

#[test]
fn shot_orbit_reproduces_coefficients() {
    for (kind, from, to) in [
        (PresetKind::Duffing1, [0.0, 0.0], [0.0, 0.0]),
        (PresetKind::Duffing2, [-1.0, 0.0], [1.0, 0.0]),
    ] {
        let sys = PlanarSystem::preset(
            kind,
            PresetParams {
                beta: 1.0,
                delta: 1.0,
                omega: 1.0,
            },
        )
        .unwrap();
        let a = refine_saddle(&sys, from, TOL_EQ).unwrap();
        let b = refine_saddle(&sys, to, TOL_EQ).unwrap();
        let shot = shoot_separatrix(&sys, &a, &b, &ShootOpts::default()).unwrap();
        let closed = preset_orbit(&sys, 1).unwrap();
        for j in 0..=1 {
            let (x, _) = melnikov_coefficient(&shot, &sys, j, TOL_COEFF).unwrap();
            let (y, _) = melnikov_coefficient(&closed, &sys, j, TOL_COEFF).unwrap();
            assert!(
                (x.norm() - y.norm()).abs() < 1e-6,
                "{kind:?} j={j}: {x} vs {y}"
            );
        }
    }
}

#[test]
fn json_roundtrip_and_schema_errors() {
    let s = series(PresetKind::Duffing1, 1.0, 0.5, 2.0);
    let back = series_from_json(&series_to_json(&s)).unwrap();
    for k in 0..50 {
        let t = 0.13 * k as f64;
        assert!((eval_melnikov(&s, t) - eval_melnikov(&back, t)).abs() <= 1e-12);
    }
    assert!(matches!(series_from_json("{}"), Err(Error::Schema(_))));
}
