use num_complex::Complex64;
use proptest::prelude::*;
use splitmel::fourier::fourier_coefficients;
use splitmel::melnikov::{melnikov_series, MelnikovSeries, TOL_COEFF};
use splitmel::poly::Poly2;
use splitmel::separatrix::{closed_form_orbit, shoot_separatrix, ShootOpts};
use splitmel::system::{
    refine_saddle, FourierVectorField, Hamiltonian, PerturbationTerm, Phase, TOL_EQ,
};
use splitmel::{PlanarSystem, PresetKind, PresetParams};

fn poly() -> impl Strategy<Value = Poly2<f64>> {
    prop::collection::vec(((0u32..3, 0u32..3), -2.0f64..2.0), 1..5).prop_map(Poly2::from_terms)
}

fn term() -> impl Strategy<Value = PerturbationTerm> {
    (1usize..3, 0u32..4, prop::bool::ANY, poly()).prop_map(|(component, harmonic, sin, poly)| {
        PerturbationTerm {
            component,
            harmonic,
            phase: if sin && harmonic > 0 {
                Phase::Sin
            } else {
                Phase::Cos
            },
            poly,
        }
    })
}

fn field() -> impl Strategy<Value = FourierVectorField> {
    prop::collection::vec(term(), 1..5).prop_map(|t| FourierVectorField::from_terms(&t).unwrap())
}

fn series_value(s: &MelnikovSeries, theta: f64) -> Complex64 {
    let n = s.n as i32;
    (-n..=n)
        .map(|j| s.coeff(j) * Complex64::from_polar(1.0, j as f64 * theta))
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn derivative_matches_central_difference(p in poly(), x in -1.5f64..1.5, y in -1.5f64..1.5) {
        let h = 1e-5;
        for var in 0..2 {
            let d = p.deriv(var).eval([x, y]);
            let (a, b) = if var == 0 { ([x - h, y], [x + h, y]) } else { ([x, y - h], [x, y + h]) };
            let fd = (p.eval(b) - p.eval(a)) / (2.0 * h);
            prop_assert!((d - fd).abs() <= 1e-6 * (1.0 + d.abs()));
        }
    }

    #[test]
    fn fourier_roundtrip(g in field(), x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let n = g.n();
        let c = fourier_coefficients(|t| g.eval([x, y], t), n);
        let scale = 1.0 + (0..=n as i32).map(|j| { let h = g.eval_hat(j, [x, y]); h[0].norm() + h[1].norm() }).fold(0.0, f64::max);
        for j in -(n as i32)..=n as i32 {
            let h = g.eval_hat(j, [x, y]);
            let k = (j + n as i32) as usize;
            prop_assert!((c[k][0] - h[0]).norm() <= 1e-12 * scale && (c[k][1] - h[1]).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn synthesized_field_is_real(g in field(), x in -2.0f64..2.0, y in -2.0f64..2.0, theta in 0.0f64..6.3) {
        let n = g.n() as i32;
        let mut s = [Complex64::from(0.0); 2];
        for j in -n..=n {
            let h = g.eval_hat(j, [x, y]);
            let e = Complex64::from_polar(1.0, j as f64 * theta);
            s[0] += h[0] * e;
            s[1] += h[1] * e;
        }
        let real = g.eval([x, y], theta);
        prop_assert!(s[0].im.abs() <= 1e-12 * (1.0 + s[0].norm()) && s[1].im.abs() <= 1e-12 * (1.0 + s[1].norm()));
        prop_assert!((s[0].re - real[0]).abs() <= 1e-12 * (1.0 + real[0].abs()));
    }

    #[test]
    fn saddle_refinement_invariants(dx in -0.2f64..0.2, dy in -0.2f64..0.2, c in 0.5f64..2.0) {
        let h = Poly2::from_terms([((0, 2), 0.5), ((2, 0), -0.5), ((4, 0), 0.25 * c)]);
        let sys = PlanarSystem::new(h, FourierVectorField::zero(), 1.0).unwrap();
        let s = refine_saddle(&sys, [dx, dy], TOL_EQ).unwrap();
        let f = sys.ham.field(s.x);
        prop_assert!(f[0].hypot(f[1]) <= TOL_EQ);
        let a = s.a_matrix();
        let av = [a[0][0] * s.v_u[0] + a[0][1] * s.v_u[1], a[1][0] * s.v_u[0] + a[1][1] * s.v_u[1]];
        prop_assert!((av[0] - s.lambda * s.v_u[0]).hypot(av[1] - s.lambda * s.v_u[1]) <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn melnikov_function_is_real(g in field()) {
        let base = PlanarSystem::preset(PresetKind::Duffing1, PresetParams { beta: 0.0, delta: 0.0, omega: 1.3 }).unwrap();
        let sys = base.with_forcing(g);
        let o = closed_form_orbit("duffing1", 1).unwrap();
        let s = melnikov_series(&o, &sys, TOL_COEFF).unwrap();
        for k in 0..64 {
            let v = series_value(&s, 2.0 * std::f64::consts::PI * k as f64 / 64.0);
            prop_assert!(v.im.abs() <= 1e-10);
        }
    }

    #[test]
    fn phase_covariance(g in field()) {
        let base = PlanarSystem::preset(PresetKind::Duffing2, PresetParams { beta: 0.0, delta: 0.0, omega: 0.8 }).unwrap();
        let sys = base.with_forcing(g);
        let o = closed_form_orbit("duffing2", 1).unwrap();
        let tau = 0.37;
        let s = melnikov_series(&o, &sys, TOL_COEFF).unwrap();
        let shifted = melnikov_series(&o.shifted(tau), &sys, TOL_COEFF).unwrap();
        let rotated = s.rotated(tau);
        for j in -(s.n as i32)..=s.n as i32 {
            prop_assert!((shifted.coeff(j).norm() - s.coeff(j).norm()).abs() <= 1e-10);
            prop_assert!((shifted.coeff(j) - rotated.coeff(j)).norm() <= 1e-9);
        }
    }

    #[test]
    fn melnikov_is_deterministic(g in field()) {
        let base = PlanarSystem::preset(PresetKind::Duffing1, PresetParams { beta: 0.0, delta: 0.0, omega: 1.0 }).unwrap();
        let sys = base.with_forcing(g);
        let o = closed_form_orbit("duffing1", 1).unwrap();
        prop_assert_eq!(melnikov_series(&o, &sys, TOL_COEFF).unwrap(), melnikov_series(&o, &sys, TOL_COEFF).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    #[test]
    fn numeric_orbits_conserve_energy(c in 0.5f64..2.0) {
        let h = Poly2::from_terms([((0, 2), 0.5), ((2, 0), -0.5), ((4, 0), 0.25 * c)]);
        let sys = PlanarSystem::new(h.clone(), FourierVectorField::zero(), 1.0).unwrap();
        let s = refine_saddle(&sys, [0.0, 0.0], TOL_EQ).unwrap();
        let o = shoot_separatrix(&sys, &s, &s, &ShootOpts::default()).unwrap();
        let ham = Hamiltonian::new(h);
        let max = (0..1000).map(|k| (ham.value(o.x(-25.0 + 0.05 * k as f64)) - o.energy).abs()).fold(0.0, f64::max);
        prop_assert!(max <= 1e-8);
    }
}
