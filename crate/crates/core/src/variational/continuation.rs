//! Monodromy of the forced variational equation by analytic continuation of
//! its fundamental matrix around a saddle in complex time.
//!
//! The loop is `t₀ → t₀ + iσP` with `P = 2π/λ`, `σ = +1` at the source
//! (`z₋ = e^{λt}` turns once counterclockwise) and `σ = −1` at the target.
//! Along the loop the fundamental matrix is kept in the reduction frame
//! `Ψ = [[X, XY], [0, e^{iℓωt}]]`, whose only multivalued pieces are `χ`
//! and `Y`. Their increments are loop integrals of periodic or smooth
//! integrands. The result is then expressed in the Levinson frame
//! `Ψ̃ = [[Z, p_F − Zc], [0, e^{iℓωt}]]`, where `p_F` is the forced solution
//! asymptotic to `c e^{iℓωt}` at the saddle.

use super::asymptotics::{along_complex, along_real, x_matrix, xi_limit, ReductionFrame, Side};
use super::connection::{connection_matrices, to_mat, Connection, ConnectionOpts};
use super::monodromy::c_vector;
use crate::error::{Error, Result};
use crate::ode::{self, OdeOpts};
use crate::quad::CompositeGl;
use crate::separatrix::Orbit;
use crate::system::{Hamiltonian, PlanarSystem};
use nalgebra::{Matrix2, Matrix3, Vector2};
use num_complex::Complex64;
use std::f64::consts::PI;

type C = Complex64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContinuationOpts {
    /// `Re t₀ = delay ∓ t0_lambda/λ` unless `t0` is given.
    pub t0_lambda: f64,
    /// Absolute real part of the loop start.
    pub t0: Option<f64>,
    /// Trapezoid nodes for the Fourier coefficients of `χ'` on the loop.
    pub trapezoid_nodes: usize,
    pub gl_panels: usize,
    pub gl_order: usize,
    /// The forced solution starts from its Frobenius expansion at `∓t_frobenius_lambda/λ`.
    pub t_frobenius_lambda: f64,
    pub connection: ConnectionOpts,
}

impl Default for ContinuationOpts {
    fn default() -> Self {
        ContinuationOpts {
            t0_lambda: 8.0,
            t0: None,
            trapezoid_nodes: 256,
            gl_panels: 32,
            gl_order: 16,
            t_frobenius_lambda: 12.0,
            connection: ConnectionOpts::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuationResult {
    pub side: Side,
    pub t0: f64,
    /// Increment of `χ` around the loop.
    pub delta_chi: Complex64,
    /// Corner `e^{−2πσℓω/λ}`.
    pub kappa: f64,
    /// Monodromy in the minus-end Levinson frame (the frame of the closed forms).
    pub matrix: Matrix3<Complex64>,
    /// Monodromy in the Levinson frame of the loop's own end.
    pub local: Matrix3<Complex64>,
    /// `[[B⁻¹KB, (κ−1)c − B⁻¹(K−id)Bc], [0, κ]]` with `K = [[1, Δχ], [0, 1]]`:
    /// what the local monodromy must equal given `Δχ`.
    pub predicted: Matrix3<Complex64>,
}

fn block(tl: Matrix2<C>, tr: Vector2<C>, br: C) -> Matrix3<C> {
    let mut m = Matrix3::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&tl);
    m.fixed_view_mut::<2, 1>(0, 2).copy_from(&tr);
    m[(2, 2)] = br;
    m
}

fn cplx(m: &Matrix2<f64>) -> Matrix2<C> {
    m.map(C::from)
}

/// `J D³H(x)[v]`, the derivative of `J D²H` along `v`.
fn a_dir(ham: &Hamiltonian, x: [f64; 2], v: [C; 2]) -> Matrix2<C> {
    let d3 = ham.third(x);
    let h = |i: usize, j: usize| v[0] * d3[i][j][0] + v[1] * d3[i][j][1];
    Matrix2::new(h(1, 0), h(1, 1), -h(0, 0), -h(0, 1))
}

/// `J D⁴H(x)[v, w]`.
fn a_dir2(ham: &Hamiltonian, x: [f64; 2], v: [C; 2], w: [C; 2]) -> Matrix2<C> {
    let h = |i: usize, j: usize| {
        let mut s = C::from(0.0);
        for k in 0..2 {
            for l in 0..2 {
                let mut e = [0u32; 2];
                for idx in [i, j, k, l] {
                    e[idx] += 1;
                }
                s += v[k] * w[l] * ham.partial(e[0], e[1]).eval(x);
            }
        }
        s
    };
    Matrix2::new(h(1, 0), h(1, 1), -h(0, 0), -h(0, 1))
}

/// `Dĝ_ℓ(x)[v]` and `D²ĝ_ℓ(x)[v, v]`.
fn g_dirs(sys: &PlanarSystem, ell: i32, x: [f64; 2], v: [C; 2]) -> (Vector2<C>, Vector2<C>) {
    let Some(hat) = sys.g.hat(ell) else {
        return (Vector2::zeros(), Vector2::zeros());
    };
    let xc = [C::from(x[0]), C::from(x[1])];
    let mut d1 = Vector2::zeros();
    let mut d2 = Vector2::zeros();
    for c in 0..2 {
        for k in 0..2 {
            let pk = hat[c].deriv(k);
            d1[c] += v[k] * pk.eval(xc);
            for l in 0..2 {
                d2[c] += v[k] * v[l] * pk.deriv(l).eval(xc);
            }
        }
    }
    (d1, d2)
}

/// Forced solution `p_F` of `p' = J D²H(x^h)p + ĝ_ℓ(x^h)e^{iℓωt}` with
/// `p_F ~ c e^{iℓωt}` at the given end, evaluated at each requested time.
pub fn forced_solution(
    orbit: &Orbit,
    sys: &PlanarSystem,
    ell: i32,
    side: Side,
    t_frobenius_lambda: f64,
    times: &[f64],
) -> Result<Vec<Vector2<Complex64>>> {
    let ham = orbit.hamiltonian();
    let (saddle, lam) = match side {
        Side::Minus => (&orbit.source, orbit.lambda_minus()),
        Side::Plus => (&orbit.target, orbit.lambda_plus()),
    };
    // z = e^{νt} → 0 at this end; x^h = x± + a₁z + a₂z² + O(z³).
    let nu = -side.sign() * lam;
    let xi = xi_limit(orbit, side);
    let x0 = saddle.x;
    let a0 = cplx(&to_mat(saddle.a_matrix()));
    let id = Matrix2::<C>::identity();
    let a1 = [C::from(xi[0] / nu), C::from(xi[1] / nu)];
    let a1v = Vector2::new(a1[0], a1[1]);
    let q = a_dir(ham, x0, a1) * a1v * C::from(0.5);
    let a2v = (id * C::from(2.0 * nu) - a0)
        .try_inverse()
        .expect("2ν is not an eigenvalue")
        * q;
    let a2 = [a2v[0], a2v[1]];
    let big_a1 = a_dir(ham, x0, a1);
    let big_a2 = a_dir(ham, x0, a2) + a_dir2(ham, x0, a1, a1) * C::from(0.5);
    let g = sys.g.eval_hat(ell, x0);
    let g0 = Vector2::new(g[0], g[1]);
    let (g1, g11) = g_dirs(sys, ell, x0, a1);
    let (ga2, _) = g_dirs(sys, ell, x0, a2);
    let g2 = ga2 + g11 * C::from(0.5);
    let iw = C::new(0.0, ell as f64 * sys.omega);
    let solve = |k: f64, rhs: Vector2<C>| -> Vector2<C> {
        (id * (iw + C::from(k * nu)) - a0)
            .try_inverse()
            .expect("nonresonant Frobenius exponents")
            * rhs
    };
    let c0 = solve(0.0, g0);
    let c1 = solve(1.0, big_a1 * c0 + g1);
    let c2 = solve(2.0, big_a1 * c1 + big_a2 * c0 + g2);

    let t_f = orbit.delay() + side.sign() * t_frobenius_lambda / lam;
    let z = (nu * t_f).exp();
    let p0 = (c0 + c1 * C::from(z) + c2 * C::from(z * z))
        * C::from_polar(1.0, ell as f64 * sys.omega * t_f);
    let w = ell as f64 * sys.omega;
    let rhs = |t: f64, y: &[f64; 4]| {
        let x = orbit.x(t);
        let a = ham.field_jac(x);
        let g = sys.g.eval_hat(ell, x);
        let ph = C::from_polar(1.0, w * t);
        let p = [C::new(y[0], y[1]), C::new(y[2], y[3])];
        let d0 = p[0] * a[0][0] + p[1] * a[0][1] + g[0] * ph;
        let d1 = p[0] * a[1][0] + p[1] * a[1][1] + g[1] * ph;
        [d0.re, d0.im, d1.re, d1.im]
    };
    let opts = OdeOpts {
        rtol: 1e-13,
        atol: 1e-300,
        h_max: 0.1,
        ..OdeOpts::default()
    };
    times
        .iter()
        .map(|&t| {
            let y =
                ode::integrate_to(rhs, t_f, [p0[0].re, p0[0].im, p0[1].re, p0[1].im], t, &opts)?;
            Ok(Vector2::new(C::new(y[0], y[1]), C::new(y[2], y[3])))
        })
        .collect()
}

/// `Ψ̃(t)` of one end at a real time.
fn levinson_psi(z: Matrix2<f64>, p: Vector2<C>, c: Vector2<C>, phase: C) -> Matrix3<C> {
    let zc = cplx(&z);
    block(zc, p - zc * c, phase)
}

fn pole(t: C, what: &str) -> Error {
    Error::PoleOnPath(format!("{} + {}i ({what})", t.re, t.im))
}

/// Numerical monodromy around the saddle at `side`.
pub fn monodromy_via_continuation(
    sys: &PlanarSystem,
    orbit: &Orbit,
    ell: i32,
    side: Side,
    opts: &ContinuationOpts,
) -> Result<ContinuationResult> {
    if !orbit.is_closed_form() {
        return Err(Error::NotClosedForm);
    }
    if ell == 0 {
        return Err(Error::InvalidArgument(
            "the harmonic must be nonzero".into(),
        ));
    }
    let frame = ReductionFrame::new(orbit)?;
    let conn = connection_matrices(orbit, &opts.connection)?;
    let mode = frame.mode;
    let lam = match side {
        Side::Minus => orbit.lambda_minus(),
        Side::Plus => orbit.lambda_plus(),
    };
    let sigma = -side.sign();
    let t0 = opts
        .t0
        .unwrap_or(orbit.delay() + side.sign() * opts.t0_lambda / lam);
    frame.check_branch(t0, side)?;
    let period = 2.0 * PI / lam;
    let w = ell as f64 * sys.omega;
    let isg = C::new(0.0, sigma);

    // Fourier coefficients of s ↦ χ'(t₀ + iσs), period P.
    let n = opts.trapezoid_nodes.max(8);
    let mut vals = Vec::with_capacity(n);
    for k in 0..n {
        let t = C::new(t0, sigma * period * k as f64 / n as f64);
        let a = along_complex(orbit, mode, t)?;
        if !a.dchi.is_finite() || a.r.norm() < 1e-14 {
            return Err(pole(t, "zero of the reduction coordinate"));
        }
        vals.push(a.dchi);
    }
    let half = n as i64 / 2;
    let modes: Vec<(i64, C)> = (-half + 1..half)
        .map(|m| {
            let s: C = vals
                .iter()
                .enumerate()
                .map(|(k, v)| v * C::from_polar(1.0, -2.0 * PI * (m * k as i64) as f64 / n as f64))
                .sum();
            (m, s / n as f64)
        })
        .collect();
    let c_mean = modes
        .iter()
        .find(|(m, _)| *m == 0)
        .map(|p| p.1)
        .unwrap_or_default();
    let delta_chi = isg * c_mean * period;

    let (chi0, y0) = frame.chi_and_y(orbit, sys, ell, t0, side)?;
    let chi_at = |s: f64| -> C {
        let mut acc = c_mean * s;
        for &(m, cm) in &modes {
            if m != 0 {
                let iml = C::new(0.0, m as f64 * lam);
                acc += cm * ((iml * s).exp() - 1.0) / iml;
            }
        }
        C::from(chi0) + isg * acc
    };

    let gl = CompositeGl::new(0.0, period, opts.gl_panels, opts.gl_order);
    let mut dy = Vector2::<C>::zeros();
    for (&s, &wt) in gl.nodes().iter().zip(gl.weights()) {
        let t = C::new(t0, sigma * s);
        let a = along_complex(orbit, mode, t)?;
        let big = a.x[0].norm().max(a.x[1].norm());
        if !(big <= 1e6) || a.r.norm() < 1e-14 {
            return Err(pole(t, "singularity of the orbit"));
        }
        let xm = x_matrix(mode, &a, chi_at(s));
        let g = sys.g.eval_hat(ell, a.x);
        let ph = (C::new(0.0, w) * t).exp();
        let y1 = (xm[1][1] * g[0] - xm[0][1] * g[1]) * ph;
        let y2 = (xm[0][0] * g[1] - xm[1][0] * g[0]) * ph;
        dy += Vector2::new(y1, y2) * (isg * wt);
    }
    if !(dy[0].is_finite() && dy[1].is_finite() && delta_chi.is_finite()) {
        return Err(pole(C::new(t0, 0.0), "non-finite loop integral"));
    }

    let kappa = (-sigma * w * period).exp();
    let kc = C::from(kappa);
    let one = C::from(1.0);
    let k_mat = Matrix2::new(one, delta_chi, C::from(0.0), one);
    let y0v = Vector2::new(y0[0], y0[1]);
    let m_psi = block(
        k_mat,
        (k_mat - Matrix2::identity() * kc) * y0v + k_mat * dy,
        kc,
    );

    // Ψ̃ = ΨC with C = [[B, y_p − Bc], [0, 1]], y_p = X(t_ref)⁻¹p_F(t_ref).
    let c = c_vector(
        match side {
            Side::Minus => &orbit.source,
            Side::Plus => &orbit.target,
        },
        sys,
        ell,
    );
    let b = cplx(conn.b_local(side));
    let t_ref = frame.t_ref(side);
    let t_g = conn.t_gauge;
    let p = forced_solution(
        orbit,
        sys,
        ell,
        side,
        opts.t_frobenius_lambda,
        &[t_ref, t_g],
    )?;
    let x_ref = cplx(&to_mat(x_matrix(
        mode,
        &along_real(orbit, mode, t_ref),
        0.0,
    )));
    let y_p = x_ref.try_inverse().expect("det X = 1") * p[0];
    let c_mat = block(b, y_p - b * c, one);
    let local = c_mat
        .try_inverse()
        .ok_or(Error::IllConditioned(f64::INFINITY))?
        * m_psi
        * c_mat;

    let b_inv = b
        .try_inverse()
        .ok_or(Error::IllConditioned(f64::INFINITY))?;
    let predicted = block(
        b_inv * k_mat * b,
        c * (kc - one) - b_inv * (k_mat - Matrix2::identity()) * b * c,
        kc,
    );

    let matrix = match side {
        Side::Minus => local,
        Side::Plus => {
            let c0 = transport(orbit, sys, ell, &conn, opts.t_frobenius_lambda, p[1])?;
            c0.try_inverse()
                .ok_or(Error::IllConditioned(f64::INFINITY))?
                * local
                * c0
        }
    };
    Ok(ContinuationResult {
        side,
        t0,
        delta_chi,
        kappa,
        matrix,
        local,
        predicted,
    })
}

/// `C₀ = Ψ̃₊(t_g)⁻¹Ψ̃₋(t_g)`.
fn transport(
    orbit: &Orbit,
    sys: &PlanarSystem,
    ell: i32,
    conn: &Connection,
    t_frobenius_lambda: f64,
    p_plus: Vector2<C>,
) -> Result<Matrix3<C>> {
    let t_g = conn.t_gauge;
    let phase = C::from_polar(1.0, ell as f64 * sys.omega * t_g);
    let p_minus = forced_solution(orbit, sys, ell, Side::Minus, t_frobenius_lambda, &[t_g])?[0];
    let psi_m = levinson_psi(
        conn.z_matrix(orbit, Side::Minus, t_g)?,
        p_minus,
        c_vector(&orbit.source, sys, ell),
        phase,
    );
    let psi_p = levinson_psi(
        conn.z_matrix(orbit, Side::Plus, t_g)?,
        p_plus,
        c_vector(&orbit.target, sys, ell),
        phase,
    );
    Ok(psi_p
        .try_inverse()
        .ok_or(Error::IllConditioned(f64::INFINITY))?
        * psi_m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::separatrix::preset_orbit;
    use crate::system::{PresetKind, PresetParams};

    fn duffing1() -> (PlanarSystem, Orbit) {
        let sys = PlanarSystem::preset(
            PresetKind::Duffing1,
            PresetParams {
                beta: 1.0,
                delta: 0.0,
                omega: 1.0,
            },
        )
        .unwrap();
        let o = preset_orbit(&sys, 1).unwrap();
        (sys, o)
    }

    #[test]
    fn duffing1_loop_increment() {
        let (sys, o) = duffing1();
        let r = monodromy_via_continuation(&sys, &o, 1, Side::Minus, &ContinuationOpts::default())
            .unwrap();
        assert!(
            (r.delta_chi - C::new(0.0, 1.5 * PI)).norm() < 1e-8,
            "{}",
            r.delta_chi
        );
        assert!(
            (r.local - r.predicted).norm() < 1e-6,
            "{}\n{}",
            r.local,
            r.predicted
        );
        let r10 = monodromy_via_continuation(
            &sys,
            &o,
            1,
            Side::Minus,
            &ContinuationOpts {
                t0_lambda: 10.0,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((r10.matrix - r.matrix).norm() < 1e-6);
    }
}
