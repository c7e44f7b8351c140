//! Asymptotic data `(ξ±, χ±, m±, c±, b±, B±, B₀)`, the closed-form
//! monodromy pair around the two saddles and its commutator.

use super::asymptotics::{orbit_asymptotics, ReductionMode, Side};
use super::connection::{connection_matrices, Connection, ConnectionOpts};
use crate::error::{Error, Result};
use crate::melnikov::{self, Verdict};
use crate::separatrix::Orbit;
use crate::system::{PlanarSystem, Saddle};
use nalgebra::{Matrix2, Matrix3, Vector2};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Default threshold on the commutator norm.
pub const TOL_COMMUTATOR: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VariationalOpts {
    pub connection: ConnectionOpts,
    /// Quadrature tolerance for `m₊ = M̂_ℓ`.
    pub tol_coeff: f64,
}

impl Default for VariationalOpts {
    fn default() -> Self {
        VariationalOpts {
            connection: ConnectionOpts::default(),
            tol_coeff: melnikov::TOL_COEFF,
        }
    }
}

/// Everything the closed-form monodromy pair is assembled from.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticData {
    pub ell: i32,
    pub omega: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub mode: ReductionMode,
    pub xi_plus: [f64; 2],
    pub xi_minus: [f64; 2],
    pub chi_plus: f64,
    pub chi_minus: f64,
    pub m_plus: Complex64,
    pub m_minus: Complex64,
    pub c_plus: Vector2<Complex64>,
    pub c_minus: Vector2<Complex64>,
    pub b_plus: Vector2<Complex64>,
    pub b_minus: Vector2<Complex64>,
    pub connection: Connection,
}

impl AsymptoticData {
    /// `B₀ = B₊⁻¹B₋`.
    pub fn b0(&self) -> Matrix2<f64> {
        self.connection.b0
    }

    /// Same data with `m₊` replaced and `b₊` recomputed.
    pub fn with_m_plus(&self, m_plus: Complex64) -> AsymptoticData {
        let mut d = self.clone();
        d.m_plus = m_plus;
        d.b_plus = b_vector(self.mode, self.xi_plus, self.chi_plus, m_plus, self.c_plus);
        d
    }

    /// `e^{−2πℓω/λ₋}` and `e^{2πℓω/λ₊}`.
    pub fn corners(&self) -> (f64, f64) {
        let w = 2.0 * PI * self.ell as f64 * self.omega;
        ((-w / self.lambda_minus).exp(), (w / self.lambda_plus).exp())
    }

    pub fn c(&self, side: Side) -> Vector2<Complex64> {
        match side {
            Side::Minus => self.c_minus,
            Side::Plus => self.c_plus,
        }
    }
}

/// `c± = −(J D²H(x±) + iℓω id) ĝ_ℓ(x±) / (λ±² + ℓ²ω²)`.
pub fn c_vector(saddle: &Saddle, sys: &PlanarSystem, ell: i32) -> Vector2<Complex64> {
    let w = ell as f64 * sys.omega;
    let a = saddle.a_matrix();
    let g = sys.g.eval_hat(ell, saddle.x);
    let den = saddle.lambda * saddle.lambda + w * w;
    let iw = Complex64::new(0.0, w);
    Vector2::new(
        -((g[0] * a[0][0] + g[1] * a[0][1]) + iw * g[0]) / den,
        -((g[0] * a[1][0] + g[1] * a[1][1]) + iw * g[1]) / den,
    )
}

/// `(c₊, c₋)`.
pub fn c_vectors(
    orbit: &Orbit,
    sys: &PlanarSystem,
    ell: i32,
) -> (Vector2<Complex64>, Vector2<Complex64>) {
    (
        c_vector(&orbit.target, sys, ell),
        c_vector(&orbit.source, sys, ell),
    )
}

/// `(m₋, m₊) = (0, M̂_ℓ)`.
pub fn m_values(
    orbit: &Orbit,
    sys: &PlanarSystem,
    ell: i32,
    tol: f64,
) -> Result<(Complex64, Complex64)> {
    if ell == 0 {
        return Err(Error::InvalidArgument(
            "the witness harmonic must be nonzero".into(),
        ));
    }
    if ell.unsigned_abs() as usize > sys.g.n() {
        return Ok((Complex64::from(0.0), Complex64::from(0.0)));
    }
    let (m, _) = melnikov::melnikov_coefficient(orbit, sys, ell, tol)?;
    Ok((Complex64::from(0.0), m))
}

/// `b = −w m − c`, with `w = χξ + e/ρ` the limit of the second column of `X`.
fn b_vector(
    mode: ReductionMode,
    xi: [f64; 2],
    chi: f64,
    m: Complex64,
    c: Vector2<Complex64>,
) -> Vector2<Complex64> {
    let w = mode.w(xi, chi);
    Vector2::new(-m * w[0] - c[0], -m * w[1] - c[1])
}

/// Collects the asymptotic data for harmonic `ell`.
pub fn asymptotic_data(
    orbit: &Orbit,
    sys: &PlanarSystem,
    ell: i32,
    opts: &VariationalOpts,
) -> Result<AsymptoticData> {
    if ell == 0 {
        return Err(Error::InvalidArgument(
            "the witness harmonic must be nonzero".into(),
        ));
    }
    let asym = orbit_asymptotics(orbit)?;
    let connection = connection_matrices(orbit, &opts.connection)?;
    let (c_plus, c_minus) = c_vectors(orbit, sys, ell);
    let (m_minus, m_plus) = m_values(orbit, sys, ell, opts.tol_coeff)?;
    let b_plus = b_vector(asym.mode, asym.xi_plus, asym.chi_plus, m_plus, c_plus);
    let b_minus = b_vector(asym.mode, asym.xi_minus, asym.chi_minus, m_minus, c_minus);
    Ok(AsymptoticData {
        ell,
        omega: sys.omega,
        lambda_plus: orbit.lambda_plus(),
        lambda_minus: orbit.lambda_minus(),
        mode: asym.mode,
        xi_plus: asym.xi_plus,
        xi_minus: asym.xi_minus,
        chi_plus: asym.chi_plus,
        chi_minus: asym.chi_minus,
        m_plus,
        m_minus,
        c_plus,
        c_minus,
        b_plus,
        b_minus,
        connection,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonodromyPair {
    pub m_plus: Matrix3<Complex64>,
    pub m_minus: Matrix3<Complex64>,
    /// `‖M₊M₋ − M₋M₊‖_F`.
    pub commutator_norm: f64,
}

/// `[[id, v], [0, κ]]`.
pub(crate) fn unipotent_block(v: Vector2<Complex64>, kappa: f64) -> Matrix3<Complex64> {
    let mut m = Matrix3::identity();
    m[(0, 2)] = v[0];
    m[(1, 2)] = v[1];
    m[(2, 2)] = Complex64::from(kappa);
    m
}

/// Closed-form `M₋` and `M₊`.
pub fn monodromy_pair(data: &AsymptoticData) -> MonodromyPair {
    let (km, kp) = data.corners();
    let b0_inv = data
        .b0()
        .try_inverse()
        .expect("B₀ is nonsingular")
        .map(Complex64::from);
    let m_minus = unipotent_block(data.c_minus * Complex64::from(km - 1.0), km);
    let top = b0_inv * (data.b_plus + data.c_plus) - data.b_minus;
    let m_plus = unipotent_block(top * Complex64::from(kp - 1.0), kp);
    let commutator_norm = (m_plus * m_minus - m_minus * m_plus).norm();
    MonodromyPair {
        m_plus,
        m_minus,
        commutator_norm,
    }
}

/// `NonIntegrable` iff the commutator norm exceeds `tol`.
pub fn commutator_certificate(pair: &MonodromyPair, tol: f64) -> Verdict {
    if pair.commutator_norm > tol {
        Verdict::NonIntegrable
    } else {
        Verdict::Inconclusive
    }
}

/// JSON form of the monodromy report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonodromyReport {
    pub ell: i32,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    #[serde(rename = "M_plus")]
    pub m_plus: [[[f64; 2]; 3]; 3],
    #[serde(rename = "M_minus")]
    pub m_minus: [[[f64; 2]; 3]; 3],
    pub commutator_norm: f64,
    pub verdict: Verdict,
}

/// Rows of a complex 3×3 matrix as `[re, im]` pairs.
pub fn matrix_entries(m: &Matrix3<Complex64>) -> [[[f64; 2]; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| [m[(i, j)].re, m[(i, j)].im]))
}

impl MonodromyReport {
    pub fn new(data: &AsymptoticData, pair: &MonodromyPair, tol: f64) -> Self {
        MonodromyReport {
            ell: data.ell,
            lambda_plus: data.lambda_plus,
            lambda_minus: data.lambda_minus,
            m_plus: matrix_entries(&pair.m_plus),
            m_minus: matrix_entries(&pair.m_minus),
            commutator_norm: pair.commutator_norm,
            verdict: commutator_certificate(pair, tol),
        }
    }
}
