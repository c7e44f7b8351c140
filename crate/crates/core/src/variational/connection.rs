//! Connection matrices `B±`, `B₀` between the reduction frame `X(t)` and the
//! asymptotic frames `X±(t) = e^{t J D²H(x±)}`.
//!
//! At each end the Levinson frame `Z±(t)` (with `Z±(t) X±(−t) → id` as
//! `t → ±∞`) is assembled from two solutions of the `ξ`-equation: the one
//! decaying at that end is a multiple of `ẋ^h`, and the growing one is
//! integrated outward from the gauge time `t_g`, where it is fixed to be
//! orthogonal to `ẋ^h`, and normalized by its leading coefficient at
//! `±T_match`.

use super::asymptotics::{along_real, x_matrix, xi_limit, ReductionFrame, Side};
use crate::error::{Error, Result};
use crate::ode::{self, OdeOpts};
use crate::separatrix::Orbit;
use nalgebra::Matrix2;

/// Largest accepted condition number of `B₀`.
pub const MAX_COND: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConnectionOpts {
    /// `T_match = t_match_lambda / min λ±`.
    pub t_match_lambda: f64,
    /// Gauge time `t_g` (relative to the orbit's time origin).
    pub t_gauge: f64,
}

impl Default for ConnectionOpts {
    fn default() -> Self {
        ConnectionOpts {
            t_match_lambda: 23.0,
            t_gauge: 0.0,
        }
    }
}

/// Connection data for one orbit.
#[derive(Clone, Debug, PartialEq)]
pub struct Connection {
    /// `X(t)B₋ = Z₋(t)` on the minus branch of `X`.
    pub b_minus: Matrix2<f64>,
    /// `B₋B₀⁻¹`: the plus-end matrix for `X` continued from the minus branch.
    pub b_plus: Matrix2<f64>,
    /// `X(t)B₊ = Z₊(t)` on the plus branch of `X`.
    pub b_plus_local: Matrix2<f64>,
    /// `B₀ = Z₊⁻¹Z₋ = B₊⁻¹B₋`.
    pub b0: Matrix2<f64>,
    /// Eigenbases with `Q₋⁻¹AQ₋ = diag(−λ, λ)`, `Q₊⁻¹AQ₊ = diag(λ, −λ)`.
    pub q_minus: Matrix2<f64>,
    pub q_plus: Matrix2<f64>,
    pub t_match: f64,
    pub t_gauge: f64,
    /// Condition number of `B₀`.
    pub cond: f64,
    /// Growing Levinson solutions at `t_g` and the decaying-column scales.
    grow_minus: [f64; 2],
    grow_plus: [f64; 2],
    s_minus: f64,
    s_plus: f64,
}

pub(crate) fn to_mat(m: [[f64; 2]; 2]) -> Matrix2<f64> {
    Matrix2::new(m[0][0], m[0][1], m[1][0], m[1][1])
}

fn cols(a: [f64; 2], b: [f64; 2]) -> Matrix2<f64> {
    Matrix2::new(a[0], b[0], a[1], b[1])
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// `ξ' = J D²H(x^h(t)) ξ` from `t0` to `t1`.
pub(crate) fn propagate(orbit: &Orbit, t0: f64, y0: [f64; 2], t1: f64) -> Result<[f64; 2]> {
    let ham = orbit.hamiltonian();
    let rhs = |t: f64, y: &[f64; 2]| {
        let a = ham.field_jac(orbit.x(t));
        [
            a[0][0] * y[0] + a[0][1] * y[1],
            a[1][0] * y[0] + a[1][1] * y[1],
        ]
    };
    let opts = OdeOpts {
        rtol: 1e-13,
        atol: 1e-300,
        h_max: 0.25,
        ..OdeOpts::default()
    };
    ode::integrate_to(rhs, t0, y0, t1, &opts)
}

/// Condition number of a real 2×2 matrix in the spectral norm.
pub(crate) fn cond2(m: &Matrix2<f64>) -> f64 {
    let sv = m.singular_values();
    let (hi, lo) = (sv.max(), sv.min());
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// `e^{tA}` for a saddle matrix `A` with eigenbasis `Q` and eigenvalues `(μ₁, μ₂)`.
pub(crate) fn expm(q: &Matrix2<f64>, mu: [f64; 2], t: f64) -> Matrix2<f64> {
    let d = Matrix2::new((mu[0] * t).exp(), 0.0, 0.0, (mu[1] * t).exp());
    q * d * q.try_inverse().expect("eigenbasis is nonsingular")
}

/// Computes `B₋`, `B₊`, `B₀`.
pub fn connection_matrices(orbit: &Orbit, opts: &ConnectionOpts) -> Result<Connection> {
    if !(opts.t_match_lambda > 0.0) || !opts.t_gauge.is_finite() {
        return Err(Error::InvalidArgument(
            "t_match_lambda must be positive and t_gauge finite".into(),
        ));
    }
    let frame = ReductionFrame::new(orbit)?;
    let (lm, lp) = (orbit.lambda_minus(), orbit.lambda_plus());
    let t_match = opts.t_match_lambda / lm.min(lp);
    let t_g = orbit.delay() + opts.t_gauge;
    let (sm, sp) = (&orbit.source, &orbit.target);
    let q_minus = cols(sm.v_s, sm.v_u);
    let q_plus = cols(sp.v_u, sp.v_s);
    let f_g = orbit.hamiltonian().field(orbit.x(t_g));
    let perp = [-f_g[1], f_g[0]];

    // Growing solution at each end, normalized by its leading coefficient.
    let grow = |side: Side| -> Result<[f64; 2]> {
        let (q, lam, t_end) = match side {
            Side::Minus => (&q_minus, lm, t_g - t_match),
            Side::Plus => (&q_plus, lp, t_g + t_match),
        };
        let u = propagate(orbit, t_g, perp, t_end)?;
        let coef = q.try_inverse().expect("eigenbasis is nonsingular")
            * nalgebra::Vector2::new(u[0], u[1]);
        let a = coef[0] * (-lam * t_match).exp() * (-side.sign() * lam * t_g).exp();
        if a == 0.0 || !a.is_finite() {
            return Err(Error::IllConditioned(f64::INFINITY));
        }
        Ok([perp[0] / a, perp[1] / a])
    };
    let grow_minus = grow(Side::Minus)?;
    let grow_plus = grow(Side::Plus)?;

    let xi_m = xi_limit(orbit, Side::Minus);
    let xi_p = xi_limit(orbit, Side::Plus);
    let s_minus = dot(sm.v_u, xi_m) / dot(xi_m, xi_m);
    let s_plus = dot(sp.v_s, xi_p) / dot(xi_p, xi_p);

    let z_minus = cols(grow_minus, [s_minus * f_g[0], s_minus * f_g[1]])
        * q_minus.try_inverse().expect("basis");
    let z_plus =
        cols(grow_plus, [s_plus * f_g[0], s_plus * f_g[1]]) * q_plus.try_inverse().expect("basis");
    let zp_inv = z_plus
        .try_inverse()
        .ok_or(Error::IllConditioned(f64::INFINITY))?;
    let b0 = zp_inv * z_minus;
    let cond = cond2(&b0);
    if !(cond <= MAX_COND) {
        return Err(Error::IllConditioned(cond));
    }

    let mut conn = Connection {
        b_minus: Matrix2::identity(),
        b_plus: Matrix2::identity(),
        b_plus_local: Matrix2::identity(),
        b0,
        q_minus,
        q_plus,
        t_match,
        t_gauge: t_g,
        cond,
        grow_minus,
        grow_plus,
        s_minus,
        s_plus,
    };
    let local = |side: Side, conn: &Connection| -> Result<Matrix2<f64>> {
        let t = frame.t_ref(side);
        let x = to_mat(x_matrix(frame.mode, &along_real(orbit, frame.mode, t), 0.0));
        let z = conn.z_matrix(orbit, side, t)?;
        Ok(x.try_inverse().expect("det X = 1") * z)
    };
    conn.b_minus = local(Side::Minus, &conn)?;
    conn.b_plus_local = local(Side::Plus, &conn)?;
    conn.b_plus = conn.b_minus * b0.try_inverse().expect("checked above");
    Ok(conn)
}

impl Connection {
    /// Columns `(growing, decaying)` of the Levinson frame in the eigenbasis,
    /// `Z±(t) Q±`, at any real `t`.
    pub fn z_columns(&self, orbit: &Orbit, side: Side, t: f64) -> Result<Matrix2<f64>> {
        let (g0, s) = match side {
            Side::Minus => (self.grow_minus, self.s_minus),
            Side::Plus => (self.grow_plus, self.s_plus),
        };
        let g = propagate(orbit, self.t_gauge, g0, t)?;
        let f = orbit.hamiltonian().field(orbit.x(t));
        Ok(cols(g, [s * f[0], s * f[1]]))
    }

    /// Levinson frame `Z±(t)` of the given end.
    pub fn z_matrix(&self, orbit: &Orbit, side: Side, t: f64) -> Result<Matrix2<f64>> {
        let q = self.q(side);
        Ok(self.z_columns(orbit, side, t)? * q.try_inverse().expect("basis"))
    }

    pub fn q(&self, side: Side) -> &Matrix2<f64> {
        match side {
            Side::Minus => &self.q_minus,
            Side::Plus => &self.q_plus,
        }
    }

    /// Eigenvalues of `J D²H(x±)` in the order of the columns of `Q±`.
    fn mu(orbit: &Orbit, side: Side) -> [f64; 2] {
        match side {
            Side::Minus => [-orbit.lambda_minus(), orbit.lambda_minus()],
            Side::Plus => [orbit.lambda_plus(), -orbit.lambda_plus()],
        }
    }

    /// `X±(t) = e^{t J D²H(x±)}`.
    pub fn x_asymptotic(&self, orbit: &Orbit, side: Side, t: f64) -> Matrix2<f64> {
        expm(self.q(side), Self::mu(orbit, side), t)
    }

    /// `‖Z±(t) X±(−t) − id‖_F`, the defining limit of the Levinson frame.
    /// Since `X(t)B± = Z±(t)` identically, this is also the matching residual
    /// `‖X(t)B± X±(−t) − id‖_F`; it is evaluated as
    /// `(Z±Q±) e^{−tΛ} Q±⁻¹` so that no `e^{λ|t|}`-sized entries cancel.
    pub fn levinson_residual(&self, orbit: &Orbit, side: Side, t: f64) -> Result<f64> {
        let zc = self.z_columns(orbit, side, t)?;
        let mu = Self::mu(orbit, side);
        let d = Matrix2::new((-mu[0] * t).exp(), 0.0, 0.0, (-mu[1] * t).exp());
        let q = self.q(side);
        Ok((zc * d * q.try_inverse().expect("basis") - Matrix2::identity()).norm())
    }

    /// `B₋` or the branch-local `B₊`.
    pub fn b_local(&self, side: Side) -> &Matrix2<f64> {
        match side {
            Side::Minus => &self.b_minus,
            Side::Plus => &self.b_plus_local,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::separatrix::closed_form_orbit;

    #[test]
    fn duffing1_connection() {
        let o = closed_form_orbit("duffing1", 1).unwrap();
        let c = connection_matrices(&o, &ConnectionOpts::default()).unwrap();
        assert!((c.b0.determinant() - 1.0).abs() < 1e-9, "{}", c.b0);
        assert!(c.levinson_residual(&o, Side::Minus, -c.t_match).unwrap() < 1e-6);
        assert!(c.levinson_residual(&o, Side::Plus, c.t_match).unwrap() < 1e-6);
        let long = connection_matrices(
            &o,
            &ConnectionOpts {
                t_match_lambda: 23.0 * 1.25,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((long.b0 - c.b0).norm() < 1e-5);
    }

    #[test]
    fn reduction_frame_times_b_is_levinson_frame() {
        let o = closed_form_orbit("duffing2", 1).unwrap();
        let c = connection_matrices(&o, &ConnectionOpts::default()).unwrap();
        let fr = ReductionFrame::new(&o).unwrap();
        for (side, t) in [(Side::Minus, -3.0), (Side::Plus, 2.5)] {
            let x = to_mat(fr.x_matrix(&o, t, side).unwrap());
            let z = c.z_matrix(&o, side, t).unwrap();
            assert!((x * c.b_local(side) - z).norm() < 1e-9 * z.norm());
        }
    }
}
