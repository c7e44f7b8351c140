use splitmel::melnikov::{melnikov_series, simple_zeros, TOL_COEFF, TOL_SIMPLE};
use splitmel::separatrix::{preset_orbit, Orbit};
use splitmel::splitting::*;
use splitmel::{PlanarSystem, PresetKind, PresetParams};
use std::f64::consts::PI;

fn setup(kind: PresetKind, beta: f64) -> (PlanarSystem, Orbit) {
    let sys = PlanarSystem::preset(
        kind,
        PresetParams {
            beta,
            delta: 0.0,
            omega: 1.0,
        },
    )
    .unwrap();
    let o = preset_orbit(&sys, 1).unwrap();
    (sys, o)
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn dist_to_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let l2 = ab[0] * ab[0] + ab[1] * ab[1];
    let s = if l2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / l2).clamp(0.0, 1.0)
    };
    dist(p, [a[0] + s * ab[0], a[1] + s * ab[1]])
}

#[test]
fn unperturbed_strobe_conserves_energy() {
    let (sys, o) = setup(PresetKind::Duffing1, 1.0);
    let map = StrobeMap::new(&sys, 0.0, 0.3, &o);
    for x in [[0.5, 0.2], [1.2, -0.4], [-0.8, 0.1]] {
        let y = map.strobe(x).unwrap();
        assert!((sys.ham.value(y) - sys.ham.value(x)).abs() < 1e-10);
    }
    assert_eq!(map.strobe([0.0, 0.0]).unwrap(), [0.0, 0.0]);
}

#[test]
fn perturbed_image_moves_by_order_eps() {
    let (sys, o) = setup(PresetKind::Duffing1, 1.0);
    let x = [2f64.sqrt(), 0.0];
    let y0 = StrobeMap::new(&sys, 0.0, 0.0, &o).strobe(x).unwrap();
    let y1 = StrobeMap::new(&sys, 1e-3, 0.0, &o).strobe(x).unwrap();
    let y2 = StrobeMap::new(&sys, 1e-4, 0.0, &o).strobe(x).unwrap();
    // Independent DOP853 oracle; the orbit passes the saddle, which amplifies
    // the first-order displacement by roughly e^{2π − 3}.
    assert!((dist(y0, y1) - 0.027630105192199425).abs() < 1e-8);
    let ratio = dist(y0, y1) / dist(y0, y2);
    assert!((ratio - 10.0).abs() < 0.1, "{ratio}");
}

#[test]
fn strobe_inverse_roundtrip() {
    let (sys, o) = setup(PresetKind::Duffing2, 1.0);
    let map = StrobeMap::new(&sys, 1e-2, 1.0, &o);
    let x = [0.3, 0.5];
    let back = map.inverse(map.strobe(x).unwrap()).unwrap();
    assert!(dist(back, x) < 1e-9);
}

#[test]
fn escape_is_reported() {
    let (sys, o) = setup(PresetKind::Duffing1, 1.0);
    let mut map = StrobeMap::new(&sys, 0.0, 0.0, &o);
    map.bbox = 1.0;
    assert!(matches!(
        map.strobe([1.5, 0.0]),
        Err(splitmel::Error::Escape(_))
    ));
}

#[test]
fn periodic_saddles() {
    let (sys, o) = setup(PresetKind::Duffing2, 1.0);
    let map = StrobeMap::new(&sys, 0.0, 0.0, &o);
    let p = periodic_saddle(&map, [-1.0 + 1e-7, 1e-7]).unwrap();
    assert!(dist(p.x, [-1.0, 0.0]) < 1e-12);
    let e = (2.0 * PI * 2f64.sqrt()).exp();
    assert!((p.multipliers[0] / e - 1.0).abs() < 1e-8);
    assert!((p.multipliers[1] * e - 1.0).abs() < 1e-8);

    let (sys, o) = setup(PresetKind::Duffing1, 1.0);
    let map = StrobeMap::new(&sys, 1e-3, 0.7, &o);
    let p = periodic_saddle(&map, linear_response(&map, [0.0, 0.0])).unwrap();
    let r = dist(p.x, [0.0, 0.0]);
    assert!(r > 1e-5 && r < 1e-2, "{r}");
    assert!(dist(map.strobe(p.x).unwrap(), p.x) < 1e-10);
}

#[test]
fn unperturbed_trace_lies_on_separatrix() {
    let (sys, o) = setup(PresetKind::Duffing1, 1.0);
    let map = StrobeMap::new(&sys, 0.0, 0.0, &o);
    let fixed = periodic_saddle(&map, [0.0, 0.0]).unwrap();
    let opts = TraceOpts::default();
    let tr = manifold_trace(&map, &fixed, ManifoldSide::Unstable, 1.0, 2.0, &opts).unwrap();
    assert!(*tr.arclength.last().unwrap() >= 2.0);
    for w in tr.points.windows(2) {
        assert!(dist(w[0], w[1]) <= opts.ds_max * (1.0 + 1e-12));
    }
    for p in &tr.points {
        assert!(sys.ham.value(*p).abs() < 1e-6);
    }
    // Forward images of the early part stay on the polyline.
    let early = tr.arclength.iter().position(|&s| s > 3e-3).unwrap();
    for p in tr.points[..early].iter() {
        let q = map.strobe(*p).unwrap();
        let d = tr
            .points
            .windows(2)
            .map(|w| dist_to_segment(q, w[0], w[1]))
            .fold(f64::INFINITY, f64::min);
        assert!(d < 1e-6, "{d}");
    }
}

#[test]
fn unperturbed_heteroclinic_trace_matches_closed_form() {
    let (sys, o) = setup(PresetKind::Duffing2, 1.0);
    let map = StrobeMap::new(&sys, 0.0, 0.0, &o);
    let fixed = periodic_saddle(&map, [-1.0, 0.0]).unwrap();
    let dir = fixed.v_u[1].signum();
    let tr = manifold_trace(
        &map,
        &fixed,
        ManifoldSide::Unstable,
        dir,
        1.5,
        &TraceOpts::default(),
    )
    .unwrap();
    for p in &tr.points {
        // Upper branch: x₂ = (1 − x₁²)/√2.
        assert!(
            (p[1] - (1.0 - p[0] * p[0]) / 2f64.sqrt()).abs() < 1e-6,
            "{p:?}"
        );
    }
}

#[test]
fn zero_eps_profile_vanishes() {
    let (sys, o) = setup(PresetKind::Duffing1, 1.0);
    let s = melnikov_series(&o, &sys, TOL_COEFF).unwrap();
    let p =
        splitting_profile(&sys, &o, &s, 0.0, &theta_grid(4), &SplittingOpts::default()).unwrap();
    for q in &p {
        assert!(q.d.abs() < 1e-9 && q.d_scaled == 0.0);
    }
}

#[test]
fn sign_changes_follow_melnikov_zeros() {
    let (sys, o) = setup(PresetKind::Duffing2, 1.0);
    let s = melnikov_series(&o, &sys, TOL_COEFF).unwrap();
    let n = 16;
    let thetas: Vec<f64> = (0..n)
        .map(|k| 2.0 * PI * (k as f64 + 0.5) / n as f64)
        .collect();
    let p = splitting_profile(&sys, &o, &s, 1e-3, &thetas, &SplittingOpts::default()).unwrap();
    let zeros = simple_zeros(&s, TOL_SIMPLE).unwrap();
    let mut changes = 0;
    for k in 0..n {
        let (a, b) = (&p[k], &p[(k + 1) % n]);
        if a.d.signum() != b.d.signum() {
            changes += 1;
            let hi = if k + 1 == n {
                b.theta + 2.0 * PI
            } else {
                b.theta
            };
            assert!(zeros.iter().any(|z| {
                let t = if z.theta < a.theta {
                    z.theta + 2.0 * PI
                } else {
                    z.theta
                };
                t >= a.theta && t <= hi
            }));
        }
    }
    assert_eq!(changes, zeros.len());
}

#[test]
fn profile_csv_layout() {
    let row = SplitPoint {
        theta: 0.5,
        d: 1e-3,
        d_scaled: 1.25,
        m_theta: 1.0,
        abs_err: 0.25,
    };
    assert_eq!(
        profile_csv(&[row]),
        "theta,d,d_scaled,M_theta,abs_err\n0.5,0.001,1.25,1,0.25\n"
    );
}
