//! Fourier extraction of the forcing and the autonomous extended field.
//!
//! The extended state `(x, ε, u, v)` carries one rotor `(u_j, v_j)` per
//! harmonic; on the slice `(u_j, v_j) = (ε cos jωt, ε sin jωt)` its flow
//! reproduces the forced system.

use crate::error::{Error, Result};
use crate::poly::{eval_vec, Poly2, VecPoly};
use crate::system::PlanarSystem;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Maximum coefficient-wise deviation from `ĝ_{-j} = conj(ĝ_j)` tolerated.
pub const REALITY_TOL: f64 = 1e-10;

/// Complex coefficients `ĝ_j` for `j = -N..=N` of a θ-periodic evaluator,
/// by the trapezoidal rule on `2N + 2` equispaced nodes.
pub fn fourier_coefficients<F>(g: F, n: usize) -> Vec<[Complex64; 2]>
where
    F: Fn(f64) -> [f64; 2],
{
    let m = 2 * n + 2;
    let samples: Vec<[f64; 2]> = (0..m).map(|k| g(2.0 * PI * k as f64 / m as f64)).collect();
    (-(n as i64)..=n as i64)
        .map(|j| {
            let mut acc = [Complex64::new(0.0, 0.0); 2];
            for (k, s) in samples.iter().enumerate() {
                // Reduce jk mod m before forming the angle to keep it small.
                let r = (j * k as i64).rem_euclid(m as i64);
                let w = Complex64::from_polar(1.0, -2.0 * PI * r as f64 / m as f64);
                acc[0] += w * s[0];
                acc[1] += w * s[1];
            }
            [acc[0] / m as f64, acc[1] / m as f64]
        })
        .collect()
}

/// Real coefficients of `g = a₀ + Σ_{j≥1} (a_j cos jθ + b_j sin jθ)` at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct RealForm {
    pub a0: [f64; 2],
    pub a: Vec<[f64; 2]>,
    pub b: Vec<[f64; 2]>,
}

/// Real form of coefficient values `ĝ_j`, `j = -N..=N`.
pub fn real_form(coeffs: &[[Complex64; 2]]) -> Result<RealForm> {
    if coeffs.len() % 2 != 1 {
        return Err(Error::Schema(
            "coefficient list must have odd length 2N+1".into(),
        ));
    }
    let n = coeffs.len() / 2;
    let g0 = coeffs[n];
    let im0 = g0[0].im.abs().max(g0[1].im.abs());
    if im0 > REALITY_TOL {
        return Err(Error::RealityViolation(format!(
            "ĝ_0 has imaginary part {im0:e}"
        )));
    }
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for j in 1..=n {
        let (p, q) = (coeffs[n + j], coeffs[n - j]);
        let dev = (0..2)
            .map(|c| (q[c] - p[c].conj()).norm())
            .fold(0.0, f64::max);
        if dev > REALITY_TOL {
            return Err(Error::RealityViolation(format!(
                "ĝ_-{j} differs from conj(ĝ_{j}) by {dev:e}"
            )));
        }
        a.push([0, 1].map(|c| (p[c] + q[c]).re));
        b.push([0, 1].map(|c| (Complex64::i() * (p[c] - q[c])).re));
    }
    Ok(RealForm {
        a0: [g0[0].re, g0[1].re],
        a,
        b,
    })
}

/// Real form with polynomial coefficients, plus their Jacobians.
#[derive(Clone, Debug, PartialEq)]
pub struct RealFormPoly {
    pub a0: VecPoly<f64>,
    pub a: Vec<VecPoly<f64>>,
    pub b: Vec<VecPoly<f64>>,
    jac: Vec<[[Poly2<f64>; 2]; 2]>,
}

/// Polynomial real form of `ĝ_j`, `j = -N..=N`; checks reality coefficient-wise.
pub fn real_form_poly(hat: &[VecPoly<Complex64>]) -> Result<RealFormPoly> {
    let n = hat.len() / 2;
    let g0 = &hat[n];
    let im0 = g0[0].im().max_coeff().max(g0[1].im().max_coeff());
    if im0 > REALITY_TOL {
        return Err(Error::RealityViolation(format!(
            "ĝ_0 has imaginary coefficient {im0:e}"
        )));
    }
    let i = Complex64::i();
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for j in 1..=n {
        let (p, q) = (&hat[n + j], &hat[n - j]);
        let dev = p[0].conj().max_diff(&q[0]).max(p[1].conj().max_diff(&q[1]));
        if dev > REALITY_TOL {
            return Err(Error::RealityViolation(format!(
                "ĝ_-{j} differs from conj(ĝ_{j}) by {dev:e}"
            )));
        }
        a.push([0, 1].map(|c| p[c].add(&q[c]).re()));
        b.push([0, 1].map(|c| p[c].add(&q[c].scale(Complex64::from(-1.0))).scale(i).re()));
    }
    let a0 = [g0[0].re(), g0[1].re()];
    let jac = std::iter::once(&a0)
        .chain(a.iter())
        .chain(b.iter())
        .map(|v| [0, 1].map(|c| [v[c].deriv(0), v[c].deriv(1)]))
        .collect();
    Ok(RealFormPoly { a0, a, b, jac })
}

impl RealFormPoly {
    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn eval(&self, x: [f64; 2], theta: f64) -> [f64; 2] {
        let mut out = eval_vec(&self.a0, x);
        for j in 1..=self.n() {
            let (s, c) = (j as f64 * theta).sin_cos();
            let aj = eval_vec(&self.a[j - 1], x);
            let bj = eval_vec(&self.b[j - 1], x);
            out[0] += aj[0] * c + bj[0] * s;
            out[1] += aj[1] * c + bj[1] * s;
        }
        out
    }

    pub fn jac(&self, x: [f64; 2], theta: f64) -> [[f64; 2]; 2] {
        let n = self.n();
        let ev = |m: &[[Poly2<f64>; 2]; 2]| [0, 1].map(|c| [0, 1].map(|v| m[c][v].eval(x)));
        let mut out = ev(&self.jac[0]);
        for j in 1..=n {
            let (s, c) = (j as f64 * theta).sin_cos();
            let da = ev(&self.jac[j]);
            let db = ev(&self.jac[n + j]);
            for r in 0..2 {
                for k in 0..2 {
                    out[r][k] += da[r][k] * c + db[r][k] * s;
                }
            }
        }
        out
    }

    /// `(a₀(x), [a_j(x)], [b_j(x)])` at a point.
    pub fn at(&self, x: [f64; 2]) -> RealForm {
        RealForm {
            a0: eval_vec(&self.a0, x),
            a: self.a.iter().map(|p| eval_vec(p, x)).collect(),
            b: self.b.iter().map(|p| eval_vec(p, x)).collect(),
        }
    }
}

/// State of the autonomous extended system.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedState {
    pub x: [f64; 2],
    pub eps: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl ExtendedState {
    /// Point on the invariant slice at time `t`.
    pub fn on_slice(x: [f64; 2], eps: f64, n: usize, omega: f64, t: f64) -> Self {
        let (u, v) = (1..=n)
            .map(|j| {
                (
                    eps * (j as f64 * omega * t).cos(),
                    eps * (j as f64 * omega * t).sin(),
                )
            })
            .unzip();
        ExtendedState { x, eps, u, v }
    }

    /// Flattened `(x1, x2, ε, u_1..u_N, v_1..v_N)`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut out = vec![self.x[0], self.x[1], self.eps];
        out.extend_from_slice(&self.u);
        out.extend_from_slice(&self.v);
        out
    }

    pub fn from_slice(s: &[f64]) -> Result<Self> {
        if s.len() < 3 || (s.len() - 3) % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "extended state length {} is not 2N+3",
                s.len()
            )));
        }
        let n = (s.len() - 3) / 2;
        Ok(ExtendedState {
            x: [s[0], s[1]],
            eps: s[2],
            u: s[3..3 + n].to_vec(),
            v: s[3 + n..].to_vec(),
        })
    }
}

/// Time derivative of the extended state.
pub fn extended_field(sys: &PlanarSystem, s: &ExtendedState) -> Result<ExtendedState> {
    let rf = sys.g.real_form();
    let n = rf.n();
    if s.u.len() != n || s.v.len() != n {
        return Err(Error::InvalidArgument(format!(
            "rotor dimension {} does not match N = {n}",
            s.u.len()
        )));
    }
    let mut dx = sys.ham.field(s.x);
    let r = rf.at(s.x);
    for c in 0..2 {
        dx[c] += s.eps * r.a0[c];
        for j in 0..n {
            dx[c] += r.a[j][c] * s.u[j] + r.b[j][c] * s.v[j];
        }
    }
    let w = sys.omega;
    let du = (0..n).map(|j| -((j + 1) as f64) * w * s.v[j]).collect();
    let dv = (0..n).map(|j| (j + 1) as f64 * w * s.u[j]).collect();
    Ok(ExtendedState {
        x: dx,
        eps: 0.0,
        u: du,
        v: dv,
    })
}
