use num_complex::Complex64;
use splitmel::fourier::{extended_field, fourier_coefficients, real_form, ExtendedState};
use splitmel::ode::{integrate_to, OdeOpts};
use splitmel::system::{hamiltonian_field, parse_system, refine_saddle, TOL_EQ};
use splitmel::{Error, PlanarSystem, PresetKind, PresetParams};

fn preset(kind: PresetKind, beta: f64, delta: f64) -> PlanarSystem {
    PlanarSystem::preset(
        kind,
        PresetParams {
            beta,
            delta,
            omega: 1.0,
        },
    )
    .unwrap()
}

#[test]
fn duffing1_forcing_coefficients() {
    let sys = preset(PresetKind::Duffing1, 1.0, 0.0);
    assert_eq!(sys.g.n(), 1);
    for j in [-1, 1] {
        let g = sys.g.eval_hat(j, [0.3, -0.2]);
        assert!(g[0].norm() < 1e-15 && (g[1] - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }
    let g0 = sys.g.eval_hat(0, [0.3, -0.2]);
    assert!(g0[0].norm() + g0[1].norm() < 1e-15);
}

#[test]
fn documents() {
    let sys =
        parse_system(r#"{"hamiltonian":[[0,2,0.5],[2,0,-0.5]],"perturbation":[],"omega":2.0}"#)
            .unwrap();
    assert_eq!(sys.g.n(), 0);
    assert!(sys.g.is_zero());
    let e =
        parse_system(r#"{"hamiltonian":[[0,2,0.5]],"perturbation":[],"omega":-1.0}"#).unwrap_err();
    assert!(matches!(e, Error::Schema(_)) && e.is_config());
    let p =
        parse_system(r#"{"preset":"duffing2","params":{"beta":1,"delta":0.5,"omega":2}}"#).unwrap();
    assert_eq!(
        p,
        PlanarSystem::preset(
            PresetKind::Duffing2,
            PresetParams {
                beta: 1.0,
                delta: 0.5,
                omega: 2.0
            }
        )
        .unwrap()
    );
    assert!(matches!(
        parse_system(r#"{"preset":"nosuch","params":{"beta":1,"delta":0,"omega":1}}"#),
        Err(Error::UnknownPreset(_))
    ));
}

#[test]
fn hamiltonian_fields() {
    let d1 = preset(PresetKind::Duffing1, 1.0, 0.0);
    assert_eq!(hamiltonian_field(&d1, [0.0, 0.0]), [0.0, 0.0]);
    assert_eq!(hamiltonian_field(&d1, [1.0, 1.0]), [1.0, 0.0]);
    let d2 = preset(PresetKind::Duffing2, 1.0, 0.0);
    assert_eq!(hamiltonian_field(&d2, [1.0, 0.0]), [0.0, 0.0]);
}

#[test]
fn saddle_refinement() {
    let d1 = preset(PresetKind::Duffing1, 1.0, 0.0);
    let s = refine_saddle(&d1, [0.1, 0.1], TOL_EQ).unwrap();
    assert!(s.x[0].abs() < 1e-12 && s.x[1].abs() < 1e-12);
    assert!((s.lambda - 1.0).abs() < 1e-14);
    let d2 = preset(PresetKind::Duffing2, 1.0, 0.0);
    let s = refine_saddle(&d2, [0.9, 0.0], TOL_EQ).unwrap();
    assert!((s.x[0] - 1.0).abs() < 1e-12 && s.x[1].abs() < 1e-12);
    assert!((s.lambda - 2f64.sqrt()).abs() < 1e-11);
    for v in [s.v_u, s.v_s] {
        assert!((v[0].hypot(v[1]) - 1.0).abs() < 1e-15);
    }
    assert!(matches!(
        refine_saddle(&d2, [0.1, 0.0], TOL_EQ),
        Err(Error::NotASaddle(_))
    ));
}

#[test]
fn fourier_extraction_examples() {
    let c = fourier_coefficients(|_| [0.7, -1.1], 2);
    assert!(
        (c[2][0] - Complex64::from(0.7)).norm() < 1e-15
            && (c[2][1] - Complex64::from(-1.1)).norm() < 1e-15
    );
    for (k, v) in c.iter().enumerate() {
        if k != 2 {
            assert!(v[0].norm() + v[1].norm() < 1e-15);
        }
    }
    let c = fourier_coefficients(
        |t| [(2.0 * t).sin() + 0.3 * t.cos(), 1.0 - (2.0 * t).cos()],
        2,
    );
    for j in 0..=2 {
        for comp in 0..2 {
            assert!((c[2 - j][comp] - c[2 + j][comp].conj()).norm() < 1e-14);
        }
    }
    let zero = real_form(&[[Complex64::from(0.0); 2]; 3]).unwrap();
    assert_eq!(
        (zero.a0, zero.a[0], zero.b[0]),
        ([0.0; 2], [0.0; 2], [0.0; 2])
    );
    let bad = [
        [Complex64::from(0.0), Complex64::new(0.0, 1.0)],
        [Complex64::from(0.0); 2],
        [Complex64::from(0.0); 2],
    ];
    assert!(matches!(real_form(&bad), Err(Error::RealityViolation(_))));
}

#[test]
fn extended_field_examples() {
    let sys = preset(PresetKind::Duffing1, 1.0, 0.4);
    let s = ExtendedState {
        x: [0.3, -0.7],
        eps: 0.0,
        u: vec![0.0],
        v: vec![0.0],
    };
    assert_eq!(
        extended_field(&sys, &s).unwrap().x,
        hamiltonian_field(&sys, s.x)
    );
    let s = ExtendedState {
        x: [1.0, 0.0],
        eps: 0.1,
        u: vec![0.1],
        v: vec![0.0],
    };
    let d = extended_field(&sys, &s).unwrap();
    assert!((d.x[1] - 0.1).abs() < 1e-15 && d.eps == 0.0);
    let bad = ExtendedState {
        x: [1.0, 0.0],
        eps: 0.1,
        u: vec![],
        v: vec![],
    };
    assert!(extended_field(&sys, &bad).is_err());
}

#[test]
fn extended_flow_preserves_rotors_and_reproduces_forced_system() {
    let sys = preset(PresetKind::Duffing1, 1.0, 0.3);
    let eps = 0.05;
    let opts = OdeOpts {
        rtol: 1e-12,
        atol: 1e-14,
        ..OdeOpts::default()
    };
    let ext = |_: f64, y: &[f64; 5]| {
        let d = extended_field(&sys, &ExtendedState::from_slice(y).unwrap()).unwrap();
        let v = d.to_vec();
        [v[0], v[1], v[2], v[3], v[4]]
    };
    let s0 = ExtendedState::on_slice([0.4, 0.1], eps, 1, sys.omega, 0.0).to_vec();
    let y0 = [s0[0], s0[1], s0[2], s0[3], s0[4]];
    let long = integrate_to(
        ext,
        0.0,
        [0.0, 0.0, eps, eps, 0.0],
        200.0 * std::f64::consts::PI,
        &opts,
    )
    .unwrap();
    assert!((long[3].hypot(long[4]) - eps).abs() < 1e-10);
    let y = integrate_to(ext, 0.0, y0, 10.0, &opts).unwrap();
    let forced = |t: f64, x: &[f64; 2]| {
        let f = sys.ham.field(*x);
        let g = sys.g.eval(*x, sys.omega * t);
        [f[0] + eps * g[0], f[1] + eps * g[1]]
    };
    let x = integrate_to(forced, 0.0, [0.4, 0.1], 10.0, &opts).unwrap();
    assert!((x[0] - y[0]).abs() < 1e-8 && (x[1] - y[1]).abs() < 1e-8);
}
