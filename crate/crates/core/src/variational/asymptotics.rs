//! Reduction-of-order frame `X(t) = [f, χ f + e/r]` along the orbit and the
//! limits `ξ±`, `χ±` of its columns.
//!
//! Here `f = ẋ^h`, `r = D_{x2}H(x^h)` and `e = e₂` (the default mode), or
//! `r = D_{x1}H(x^h)` and `e = e₁` when `D²_{x2}H` vanishes at a saddle.
//! `χ` is a primitive of `D²_{x_p}H / r²`, where `p` is the pivot coordinate
//! of the mode.

use crate::error::{Error, Result};
use crate::ode::{self, OdeOpts};
use crate::poly::Scalar;
use crate::quad;
use crate::separatrix::Orbit;
use num_complex::Complex64;

/// Which coordinate the second column of `X` is built on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionMode {
    /// `r = D_{x2}H`, `e = e₂`.
    X2,
    /// `r = D_{x1}H`, `e = e₁` (coordinate swap).
    X1,
}

impl ReductionMode {
    pub fn pivot(self) -> usize {
        match self {
            ReductionMode::X2 => 1,
            ReductionMode::X1 => 0,
        }
    }

    pub fn unit(self) -> [f64; 2] {
        match self {
            ReductionMode::X2 => [0.0, 1.0],
            ReductionMode::X1 => [1.0, 0.0],
        }
    }

    /// Limit of `r e^{±λt}` in terms of the velocity limit `ξ`.
    pub fn rho(self, xi: [f64; 2]) -> f64 {
        match self {
            ReductionMode::X2 => xi[0],
            ReductionMode::X1 => -xi[1],
        }
    }

    /// Limit of the second column of `X` scaled by `e^{∓λt}`.
    pub fn w(self, xi: [f64; 2], chi: f64) -> [f64; 2] {
        let e = self.unit();
        let rho = self.rho(xi);
        [chi * xi[0] + e[0] / rho, chi * xi[1] + e[1] / rho]
    }
}

/// End of the orbit: `Minus` is `t → −∞`, `Plus` is `t → +∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Minus => -1.0,
            Side::Plus => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Minus => "minus",
            Side::Plus => "plus",
        }
    }
}

/// Picks the reduction mode from the Hessians at both saddles.
pub fn reduction_mode(orbit: &Orbit) -> Result<ReductionMode> {
    let (hm, hp) = (orbit.source.hessian, orbit.target.hessian);
    if hm[1][1] != 0.0 && hp[1][1] != 0.0 {
        Ok(ReductionMode::X2)
    } else if hm[0][0] != 0.0 && hp[0][0] != 0.0 {
        Ok(ReductionMode::X1)
    } else {
        let x = if hm[1][1] == 0.0 && hm[0][0] == 0.0 {
            orbit.source.x
        } else {
            orbit.target.x
        };
        Err(Error::DegenerateHessian(x))
    }
}

/// Quantities along the orbit needed by the frame, at real or complex time.
pub(crate) struct Along<X> {
    pub x: [X; 2],
    pub f: [X; 2],
    pub r: X,
    /// `D²_{x_p}H / r²`.
    pub dchi: X,
}

pub(crate) fn along_real(orbit: &Orbit, mode: ReductionMode, t: f64) -> Along<f64> {
    let x = orbit.x(t);
    let ham = orbit.hamiltonian();
    let g = ham.grad(x);
    let h = ham.hess(x);
    let p = mode.pivot();
    let r = g[p];
    Along {
        x,
        f: [g[1], -g[0]],
        r,
        dchi: h[p][p] / (r * r),
    }
}

pub(crate) fn along_complex(
    orbit: &Orbit,
    mode: ReductionMode,
    t: Complex64,
) -> Result<Along<Complex64>> {
    let x = orbit.x_complex(t)?;
    let ham = orbit.hamiltonian();
    let g = ham.grad(x);
    let h = ham.hess(x);
    let p = mode.pivot();
    let r = g[p];
    Ok(Along {
        x,
        f: [g[1], -g[0]],
        r,
        dchi: h[p][p] / (r * r),
    })
}

/// `X(t)` from its pieces.
pub(crate) fn x_matrix<X: Scalar + std::ops::Div<Output = X>>(
    mode: ReductionMode,
    a: &Along<X>,
    chi: X,
) -> [[X; 2]; 2] {
    let e = mode.unit();
    let u = [
        chi * a.f[0] + X::from(e[0]) / a.r,
        chi * a.f[1] + X::from(e[1]) / a.r,
    ];
    [[a.f[0], u[0]], [a.f[1], u[1]]]
}

/// `ξ±`, `χ±` and the reduction mode.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitAsymptotics {
    pub xi_plus: [f64; 2],
    pub xi_minus: [f64; 2],
    pub chi_plus: f64,
    pub chi_minus: f64,
    pub mode: ReductionMode,
}

impl OrbitAsymptotics {
    pub fn xi(&self, side: Side) -> [f64; 2] {
        match side {
            Side::Minus => self.xi_minus,
            Side::Plus => self.xi_plus,
        }
    }

    pub fn chi(&self, side: Side) -> f64 {
        match side {
            Side::Minus => self.chi_minus,
            Side::Plus => self.chi_plus,
        }
    }
}

/// Two-stage Richardson extrapolation of `φ(T) = L + a e^{−κT} + b e^{−2κT} + …`
/// from samples at `T, T + Δ, T + 2Δ`.
fn richardson(phi: [f64; 3], kappa: f64, delta: f64) -> f64 {
    let r = (-kappa * delta).exp();
    let psi0 = (phi[1] - r * phi[0]) / (1.0 - r);
    let psi1 = (phi[2] - r * phi[1]) / (1.0 - r);
    (psi1 - r * r * psi0) / (1.0 - r * r)
}

/// `ξ_side = lim J DH(x^h(t)) e^{±λt}` by extrapolation over the tail.
pub fn xi_limit(orbit: &Orbit, side: Side) -> [f64; 2] {
    let (lam, s) = match side {
        Side::Minus => (orbit.lambda_minus(), -1.0),
        Side::Plus => (orbit.lambda_plus(), 1.0),
    };
    let (ta, d) = (8.0 / lam, 1.0 / lam);
    let t0 = orbit.delay();
    let samples: Vec<[f64; 2]> = (0..3)
        .map(|k| {
            let tk = ta + k as f64 * d;
            let f = orbit.hamiltonian().field(orbit.x(t0 + s * tk));
            let e = (lam * tk).exp();
            [f[0] * e, f[1] * e]
        })
        .collect();
    // The time origin of the orbit enters ξ as e^{±λ·delay}.
    let scale = (s * lam * t0).exp();
    [0, 1].map(|c| richardson([samples[0][c], samples[1][c], samples[2][c]], lam, d) * scale)
}

/// `χ±` from `ξ±`: `χ± = ±D²_{x_p}H(x±) / (2λ± ρ±²)`, with `ρ` the limit of
/// `r e^{±λt}`.
pub fn chi_closed_form(orbit: &Orbit, mode: ReductionMode, side: Side, xi: [f64; 2]) -> f64 {
    let (saddle, s) = match side {
        Side::Minus => (&orbit.source, -1.0),
        Side::Plus => (&orbit.target, 1.0),
    };
    let p = mode.pivot();
    let rho = mode.rho(xi);
    s * saddle.hessian[p][p] / (2.0 * saddle.lambda * rho * rho)
}

/// Limit of `χ(t) e^{∓2λt}` from tail-segment quadrature of `χ'`,
/// extrapolated in the segment position.
pub fn chi_limit_numeric(orbit: &Orbit, mode: ReductionMode, side: Side) -> Result<f64> {
    let (lam, s) = match side {
        Side::Minus => (orbit.lambda_minus(), -1.0),
        Side::Plus => (orbit.lambda_plus(), 1.0),
    };
    let (ta, d) = (8.0 / lam, 1.0 / lam);
    let t0 = orbit.delay();
    let dchi = |t: f64| Complex64::from(along_real(orbit, mode, t).dchi);
    let mut r = [0.0; 3];
    for (k, rk) in r.iter_mut().enumerate() {
        let a = ta + k as f64 * d;
        let (lo, hi) = (t0 + s * a, t0 + s * (a + d));
        let (lo, hi, sg) = if lo < hi {
            (lo, hi, 1.0)
        } else {
            (hi, lo, -1.0)
        };
        let rough = crate::quad::gk15(&dchi, lo, hi).0.re.abs();
        let (v, _) = quad::adaptive(&dchi, lo, hi, 1e-13 * rough, 4, 2000)?;
        let growth = (2.0 * lam * (a + d)).exp() - (2.0 * lam * a).exp();
        *rk = sg * v.re / growth;
    }
    // A shifted orbit rescales the limit by e^{∓2λ·delay}.
    Ok(richardson(r, lam, d) * (-2.0 * s * lam * t0).exp())
}

/// `ξ±` numerically and `χ±` from the closed form.
pub fn orbit_asymptotics(orbit: &Orbit) -> Result<OrbitAsymptotics> {
    let mode = reduction_mode(orbit)?;
    let xi_plus = xi_limit(orbit, Side::Plus);
    let xi_minus = xi_limit(orbit, Side::Minus);
    for (xi, side) in [(xi_plus, Side::Plus), (xi_minus, Side::Minus)] {
        if mode.rho(xi) == 0.0 {
            return Err(Error::DegenerateHessian(match side {
                Side::Minus => orbit.source.x,
                Side::Plus => orbit.target.x,
            }));
        }
    }
    Ok(OrbitAsymptotics {
        xi_plus,
        xi_minus,
        chi_plus: chi_closed_form(orbit, mode, Side::Plus, xi_plus),
        chi_minus: chi_closed_form(orbit, mode, Side::Minus, xi_minus),
        mode,
    })
}

/// Zeros of `r(x^h(t))` on the real line and the per-branch reference
/// points where `χ` is normalized to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ReductionFrame {
    pub mode: ReductionMode,
    /// Real zeros of `r` along the orbit, ascending.
    pub zeros: Vec<f64>,
    pub t_ref_minus: f64,
    pub t_ref_plus: f64,
}

impl ReductionFrame {
    pub fn new(orbit: &Orbit) -> Result<Self> {
        let mode = reduction_mode(orbit)?;
        let lam = orbit.lambda_minus().min(orbit.lambda_plus());
        let t0 = orbit.delay();
        let span = 30.0 / lam;
        let n = 6000;
        let h = 2.0 * span / n as f64;
        let r = |t: f64| along_real(orbit, mode, t).r;
        let mut zeros: Vec<f64> = Vec::new();
        let mut prev = r(t0 - span);
        for k in 1..=n {
            let t = t0 - span + h * k as f64;
            let cur = r(t);
            if cur == 0.0 {
                zeros.push(t);
            } else if prev != 0.0 && prev * cur < 0.0 {
                let (mut a, mut b) = (t - h, t);
                let mut fa = prev;
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if m <= a || m >= b {
                        break;
                    }
                    let fm = r(m);
                    if fm == 0.0 {
                        a = m;
                        b = m;
                        break;
                    }
                    if fa * fm < 0.0 {
                        b = m;
                    } else {
                        a = m;
                        fa = fm;
                    }
                }
                zeros.push(0.5 * (a + b));
            }
            prev = cur;
        }
        let (t_ref_minus, t_ref_plus) = match (zeros.first(), zeros.last()) {
            (Some(&lo), Some(&hi)) => (
                lo - 1.0 / orbit.lambda_minus(),
                hi + 1.0 / orbit.lambda_plus(),
            ),
            _ => (t0, t0),
        };
        Ok(ReductionFrame {
            mode,
            zeros,
            t_ref_minus,
            t_ref_plus,
        })
    }

    pub fn t_ref(&self, side: Side) -> f64 {
        match side {
            Side::Minus => self.t_ref_minus,
            Side::Plus => self.t_ref_plus,
        }
    }

    /// Fails unless `t` lies strictly beyond every zero of `r` on the branch side.
    pub fn check_branch(&self, t: f64, side: Side) -> Result<()> {
        match (side, self.zeros.first(), self.zeros.last()) {
            (Side::Minus, Some(&lo), _) if t >= lo => Err(Error::PoleCrossing { t, boundary: lo }),
            (Side::Plus, _, Some(&hi)) if t <= hi => Err(Error::PoleCrossing { t, boundary: hi }),
            _ => Ok(()),
        }
    }

    /// `χ(t)` on a branch, normalized by `χ(t_ref) = 0`.
    pub fn chi(&self, orbit: &Orbit, t: f64, side: Side) -> Result<f64> {
        self.check_branch(t, side)?;
        let t_ref = self.t_ref(side);
        if t == t_ref {
            return Ok(0.0);
        }
        let mode = self.mode;
        let dchi = |s: f64| Complex64::from(along_real(orbit, mode, s).dchi);
        let (lo, hi, sg) = if t_ref < t {
            (t_ref, t, 1.0)
        } else {
            (t, t_ref, -1.0)
        };
        let panels = ((hi - lo) * 2.0).ceil().max(1.0) as usize;
        let rough: f64 = (0..panels)
            .map(|k| {
                let a = lo + (hi - lo) * k as f64 / panels as f64;
                let b = lo + (hi - lo) * (k + 1) as f64 / panels as f64;
                quad::gk15(&dchi, a, b).0.re.abs()
            })
            .sum();
        let (v, _) = quad::adaptive(&dchi, lo, hi, 1e-13 * rough + 1e-300, panels, 20_000)?;
        Ok(sg * v.re)
    }

    /// `X(t)` on a branch.
    pub fn x_matrix(&self, orbit: &Orbit, t: f64, side: Side) -> Result<[[f64; 2]; 2]> {
        let chi = self.chi(orbit, t, side)?;
        Ok(x_matrix(self.mode, &along_real(orbit, self.mode, t), chi))
    }

    /// Integrates `(χ, Y)` with `Y' = X⁻¹ ĝ_ℓ(x^h) e^{iℓωt}` along the real
    /// axis from the branch reference point (where both vanish) to `t`.
    pub(crate) fn chi_and_y(
        &self,
        orbit: &Orbit,
        sys: &crate::system::PlanarSystem,
        ell: i32,
        t: f64,
        side: Side,
    ) -> Result<(f64, [Complex64; 2])> {
        self.check_branch(t, side)?;
        let mode = self.mode;
        let w = ell as f64 * sys.omega;
        let rhs = |s: f64, y: &[f64; 5]| {
            let a = along_real(orbit, mode, s);
            let xm = x_matrix(mode, &a, y[0]);
            let g = sys.g.eval_hat(ell, a.x);
            let ph = Complex64::from_polar(1.0, w * s);
            let y1 = (g[0] * xm[1][1] - g[1] * xm[0][1]) * ph;
            let y2 = (g[1] * xm[0][0] - g[0] * xm[1][0]) * ph;
            [a.dchi, y1.re, y1.im, y2.re, y2.im]
        };
        let opts = OdeOpts {
            rtol: 1e-13,
            atol: 1e-300,
            h_max: 0.1,
            ..OdeOpts::default()
        };
        let y = ode::integrate_to(rhs, self.t_ref(side), [0.0; 5], t, &opts)?;
        Ok((
            y[0],
            [Complex64::new(y[1], y[2]), Complex64::new(y[3], y[4])],
        ))
    }
}

/// `X(t)` on the given branch.
pub fn fundamental_x(orbit: &Orbit, t: f64, side: Side) -> Result<[[f64; 2]; 2]> {
    ReductionFrame::new(orbit)?.x_matrix(orbit, t, side)
}
