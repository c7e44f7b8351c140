//! Planar Hamiltonian systems with finite-Fourier periodic forcing.
//!
//! The unperturbed field is `ẋ = J DH(x)` with `J = [[0, 1], [-1, 0]]`, so
//! `J DH = (H_2, -H_1)` where `H_k` is the partial derivative in `x_k`. The
//! forcing is `g(x, θ) = Σ_j ĝ_j(x) e^{ijθ}` with polynomial coefficients.

use crate::error::{Error, Result};
use crate::fourier;
use crate::poly::{eval_vec, Poly2, Scalar, VecPoly};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Default Newton residual for saddle refinement.
pub const TOL_EQ: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 50;

/// Hamiltonian with its derivative polynomials up to third order.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    h: Poly2<f64>,
    d1: [Poly2<f64>; 2],
    d2: [[Poly2<f64>; 2]; 2],
    d3: [[[Poly2<f64>; 2]; 2]; 2],
}

impl Hamiltonian {
    pub fn new(h: Poly2<f64>) -> Self {
        let d1 = [h.deriv(0), h.deriv(1)];
        let d2 = [
            [d1[0].deriv(0), d1[0].deriv(1)],
            [d1[1].deriv(0), d1[1].deriv(1)],
        ];
        let d3 = [0, 1].map(|i| [0, 1].map(|j| [d2[i][j].deriv(0), d2[i][j].deriv(1)]));
        Hamiltonian { h, d1, d2, d3 }
    }

    pub fn poly(&self) -> &Poly2<f64> {
        &self.h
    }

    pub fn value<X: Scalar>(&self, x: [X; 2]) -> X {
        self.h.eval(x)
    }

    /// `DH(x) = (H_1, H_2)`.
    pub fn grad<X: Scalar>(&self, x: [X; 2]) -> [X; 2] {
        [self.d1[0].eval(x), self.d1[1].eval(x)]
    }

    pub fn hess<X: Scalar>(&self, x: [X; 2]) -> [[X; 2]; 2] {
        let h12 = self.d2[0][1].eval(x);
        [[self.d2[0][0].eval(x), h12], [h12, self.d2[1][1].eval(x)]]
    }

    /// Third derivative tensor `D³H(x)[i][j][k]`.
    pub fn third<X: Scalar>(&self, x: [X; 2]) -> [[[X; 2]; 2]; 2] {
        [0, 1].map(|i| [0, 1].map(|j| [0, 1].map(|k| self.d3[i][j][k].eval(x))))
    }

    /// Partial derivative polynomial of arbitrary order, `∂^a_{x1} ∂^b_{x2} H`.
    pub fn partial(&self, a: u32, b: u32) -> Poly2<f64> {
        let mut p = self.h.clone();
        for _ in 0..a {
            p = p.deriv(0);
        }
        for _ in 0..b {
            p = p.deriv(1);
        }
        p
    }

    /// Hamiltonian vector field `J DH(x)`.
    pub fn field<X: Scalar>(&self, x: [X; 2]) -> [X; 2] {
        let g = self.grad(x);
        [g[1], -g[0]]
    }

    /// Jacobian of the field, `J D²H(x)`.
    pub fn field_jac<X: Scalar>(&self, x: [X; 2]) -> [[X; 2]; 2] {
        let h = self.hess(x);
        [[h[1][0], h[1][1]], [-h[0][0], -h[0][1]]]
    }
}

/// Phase of a real forcing term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Cos,
    Sin,
}

/// One real forcing term `poly(x) · cos(jθ)` or `poly(x) · sin(jθ)` in a
/// single component.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationTerm {
    pub component: usize,
    pub harmonic: u32,
    pub phase: Phase,
    pub poly: Poly2<f64>,
}

/// Finite Fourier series in θ with polynomial coefficients in x.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierVectorField {
    n: usize,
    hat: Vec<VecPoly<Complex64>>,
    hat_jac: Vec<[[Poly2<Complex64>; 2]; 2]>,
    real: fourier::RealFormPoly,
}

impl FourierVectorField {
    /// The zero field with cutoff 0.
    pub fn zero() -> Self {
        Self::from_hat(vec![[Poly2::zero(), Poly2::zero()]]).expect("zero field is real")
    }

    /// Builds from complex coefficients `ĝ_j`, indexed `j = -N..=N`
    /// (vector length `2N + 1`). Fails if `ĝ_{-j}` is not the conjugate of
    /// `ĝ_j` to 1e−10 coefficient-wise.
    pub fn from_hat(hat: Vec<VecPoly<Complex64>>) -> Result<Self> {
        if hat.len() % 2 != 1 {
            return Err(Error::Schema(
                "coefficient list must have odd length 2N+1".into(),
            ));
        }
        let n = hat.len() / 2;
        let real = fourier::real_form_poly(&hat)?;
        let hat_jac = hat
            .iter()
            .map(|v| [0, 1].map(|c| [v[c].deriv(0), v[c].deriv(1)]))
            .collect();
        Ok(FourierVectorField {
            n,
            hat,
            hat_jac,
            real,
        })
    }

    /// Builds from real cos/sin terms.
    pub fn from_terms(terms: &[PerturbationTerm]) -> Result<Self> {
        let n = terms.iter().map(|t| t.harmonic as usize).max().unwrap_or(0);
        let mut hat: Vec<VecPoly<Complex64>> = vec![[Poly2::zero(), Poly2::zero()]; 2 * n + 1];
        for t in terms {
            if t.component != 1 && t.component != 2 {
                return Err(Error::Schema(format!(
                    "component must be 1 or 2, got {}",
                    t.component
                )));
            }
            let c = t.component - 1;
            let j = t.harmonic as usize;
            let p = t.poly.to_complex();
            match (t.phase, j) {
                (Phase::Cos, 0) => hat[n][c] = hat[n][c].add(&p),
                (Phase::Sin, 0) => {
                    return Err(Error::Schema(
                        "sin term with harmonic 0 is identically zero".into(),
                    ))
                }
                (Phase::Cos, _) => {
                    let half = p.scale(Complex64::new(0.5, 0.0));
                    hat[n + j][c] = hat[n + j][c].add(&half);
                    hat[n - j][c] = hat[n - j][c].add(&half);
                }
                (Phase::Sin, _) => {
                    hat[n + j][c] = hat[n + j][c].add(&p.scale(Complex64::new(0.0, -0.5)));
                    hat[n - j][c] = hat[n - j][c].add(&p.scale(Complex64::new(0.0, 0.5)));
                }
            }
        }
        Self::from_hat(hat)
    }

    /// Harmonic cutoff `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.hat.iter().all(|v| v[0].is_zero() && v[1].is_zero())
    }

    /// `ĝ_j` as polynomials; `None` when `|j| > N` (the coefficient is zero).
    pub fn hat(&self, j: i32) -> Option<&VecPoly<Complex64>> {
        let idx = j + self.n as i32;
        (idx >= 0 && (idx as usize) < self.hat.len()).then(|| &self.hat[idx as usize])
    }

    pub fn real_form(&self) -> &fourier::RealFormPoly {
        &self.real
    }

    /// `ĝ_j(x)` at a real or complex point; zero for `|j| > N`.
    pub fn eval_hat<X>(&self, j: i32, x: [X; 2]) -> [Complex64; 2]
    where
        X: Scalar + Into<Complex64>,
    {
        let z = [x[0].into(), x[1].into()];
        match self.hat(j) {
            Some(v) => eval_vec(v, z),
            None => [Complex64::from(0.0); 2],
        }
    }

    /// `Dĝ_j(x)[comp][var]`; zero for `|j| > N`.
    pub fn eval_hat_jac<X>(&self, j: i32, x: [X; 2]) -> [[Complex64; 2]; 2]
    where
        X: Scalar + Into<Complex64>,
    {
        let z = [x[0].into(), x[1].into()];
        let idx = j + self.n as i32;
        if idx < 0 || idx as usize >= self.hat.len() {
            return [[Complex64::from(0.0); 2]; 2];
        }
        let m = &self.hat_jac[idx as usize];
        [0, 1].map(|c| [0, 1].map(|v| m[c][v].eval(z)))
    }

    /// Real forcing `g(x, θ)` from the real form.
    pub fn eval(&self, x: [f64; 2], theta: f64) -> [f64; 2] {
        self.real.eval(x, theta)
    }

    /// `D_x g(x, θ)[comp][var]`.
    pub fn jac(&self, x: [f64; 2], theta: f64) -> [[f64; 2]; 2] {
        self.real.jac(x, theta)
    }
}

/// Named built-in systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PresetKind {
    /// `H = x2²/2 − x1²/2 + x1⁴/4`, homoclinic loop to the origin.
    Duffing1,
    /// `H = x2²/2 + x1²/2 − x1⁴/4`, heteroclinic connections between `(±1, 0)`.
    Duffing2,
}

impl PresetKind {
    pub fn name(self) -> &'static str {
        match self {
            PresetKind::Duffing1 => "duffing1",
            PresetKind::Duffing2 => "duffing2",
        }
    }

    pub fn hamiltonian(self) -> Poly2<f64> {
        match self {
            PresetKind::Duffing1 => {
                Poly2::from_terms([((0, 2), 0.5), ((2, 0), -0.5), ((4, 0), 0.25)])
            }
            PresetKind::Duffing2 => {
                Poly2::from_terms([((0, 2), 0.5), ((2, 0), 0.5), ((4, 0), -0.25)])
            }
        }
    }

    /// Forcing `(0, β cos θ − δ x2)`.
    pub fn perturbation(self, beta: f64, delta: f64) -> Vec<PerturbationTerm> {
        vec![
            PerturbationTerm {
                component: 2,
                harmonic: 0,
                phase: Phase::Cos,
                poly: Poly2::from_terms([((0, 1), -delta)]),
            },
            PerturbationTerm {
                component: 2,
                harmonic: 1,
                phase: Phase::Cos,
                poly: Poly2::constant(beta),
            },
        ]
    }
}

impl FromStr for PresetKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "duffing1" => Ok(PresetKind::Duffing1),
            "duffing2" => Ok(PresetKind::Duffing2),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }
}

impl fmt::Display for PresetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Forcing amplitude β, damping δ and frequency ω of a preset.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PresetParams {
    pub beta: f64,
    pub delta: f64,
    pub omega: f64,
}

/// `ẋ = J DH(x) + ε g(x, ωt)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarSystem {
    pub ham: Hamiltonian,
    pub g: FourierVectorField,
    pub omega: f64,
    pub preset: Option<(PresetKind, PresetParams)>,
}

impl PlanarSystem {
    pub fn new(h: Poly2<f64>, g: FourierVectorField, omega: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::Schema(format!(
                "omega must be positive and finite, got {omega}"
            )));
        }
        Ok(PlanarSystem {
            ham: Hamiltonian::new(h),
            g,
            omega,
            preset: None,
        })
    }

    pub fn preset(kind: PresetKind, params: PresetParams) -> Result<Self> {
        for (name, v) in [("beta", params.beta), ("delta", params.delta)] {
            if !v.is_finite() {
                return Err(Error::Schema(format!("{name} must be finite")));
            }
        }
        let g = FourierVectorField::from_terms(&kind.perturbation(params.beta, params.delta))?;
        let mut sys = Self::new(kind.hamiltonian(), g, params.omega)?;
        sys.preset = Some((kind, params));
        Ok(sys)
    }

    /// Same Hamiltonian and frequency with a different forcing.
    pub fn with_forcing(&self, g: FourierVectorField) -> Self {
        PlanarSystem {
            ham: self.ham.clone(),
            g,
            omega: self.omega,
            preset: None,
        }
    }
}

/// `J DH(x)` for the unperturbed system.
pub fn hamiltonian_field(sys: &PlanarSystem, x: [f64; 2]) -> [f64; 2] {
    sys.ham.field(x)
}

/// Hyperbolic equilibrium with its eigen-data.
#[derive(Clone, Debug, PartialEq)]
pub struct Saddle {
    pub x: [f64; 2],
    pub lambda: f64,
    pub v_u: [f64; 2],
    pub v_s: [f64; 2],
    pub hessian: [[f64; 2]; 2],
}

impl Saddle {
    /// `J D²H(x)`.
    pub fn a_matrix(&self) -> [[f64; 2]; 2] {
        let h = self.hessian;
        [[h[1][0], h[1][1]], [-h[0][0], -h[0][1]]]
    }
}

/// Newton refinement of an equilibrium followed by the saddle eigen-decomposition.
pub fn refine_saddle(sys: &PlanarSystem, guess: [f64; 2], tol_eq: f64) -> Result<Saddle> {
    let mut x = guess;
    let mut converged = false;
    for _ in 0..=NEWTON_MAX_ITER {
        let f = sys.ham.field(x);
        if norm2(f) <= tol_eq {
            converged = true;
            break;
        }
        // J DH(x) = 0 is equivalent to DH(x) = 0; Newton on the gradient.
        let g = sys.ham.grad(x);
        let h = sys.ham.hess(x);
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::NoConvergence(format!("singular Hessian at {x:?}")));
        }
        let dx0 = -(h[1][1] * g[0] - h[0][1] * g[1]) / det;
        let dx1 = -(-h[1][0] * g[0] + h[0][0] * g[1]) / det;
        x = [x[0] + dx0, x[1] + dx1];
        if !(x[0].is_finite() && x[1].is_finite()) {
            return Err(Error::NoConvergence("iterate diverged".into()));
        }
    }
    if !converged {
        return Err(Error::NoConvergence(format!(
            "residual above {tol_eq:e} after {NEWTON_MAX_ITER} iterations from {guess:?}"
        )));
    }
    saddle_at(&sys.ham, x)
}

/// Eigen-data at a point already known to be an equilibrium.
pub fn saddle_at(ham: &Hamiltonian, x: [f64; 2]) -> Result<Saddle> {
    let hessian = ham.hess(x);
    let det = hessian[0][0] * hessian[1][1] - hessian[0][1] * hessian[1][0];
    if !(det < 0.0) {
        return Err(Error::NotASaddle(format!("det D²H = {det} ≥ 0 at {x:?}")));
    }
    let lambda = (-det).sqrt();
    let a = [
        [hessian[1][0], hessian[1][1]],
        [-hessian[0][0], -hessian[0][1]],
    ];
    let v_u = eigvec(a, lambda);
    let v_s = eigvec(a, -lambda);
    Ok(Saddle {
        x,
        lambda,
        v_u,
        v_s,
        hessian,
    })
}

/// Unit eigenvector of a trace-free 2×2 matrix for eigenvalue `mu`, with the
/// first nonzero component positive.
fn eigvec(a: [[f64; 2]; 2], mu: f64) -> [f64; 2] {
    // Rows of (A − μI) are orthogonal to the eigenvector; use the longer one.
    let r0 = [a[0][0] - mu, a[0][1]];
    let r1 = [a[1][0], a[1][1] - mu];
    let r = if norm2(r0) >= norm2(r1) { r0 } else { r1 };
    let mut v = [-r[1], r[0]];
    let n = norm2(v);
    v = [v[0] / n, v[1] / n];
    let lead = if v[0].abs() > 1e-14 { v[0] } else { v[1] };
    if lead < 0.0 {
        v = [-v[0], -v[1]];
    }
    v
}

pub(crate) fn norm2(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

// ---------------------------------------------------------------------------
// System-definition documents

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemDoc {
    hamiltonian: Option<Vec<(u32, u32, f64)>>,
    perturbation: Option<Vec<TermDoc>>,
    fourier: Option<Vec<FourierDoc>>,
    omega: Option<f64>,
    preset: Option<String>,
    params: Option<ParamsDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    component: usize,
    harmonic: u32,
    phase: Phase,
    poly: Vec<(u32, u32, f64)>,
}

/// Complex coefficient entry: `poly` monomials are `[i, j, re, im]`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FourierDoc {
    component: usize,
    harmonic: i32,
    poly: Vec<(u32, u32, f64, f64)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsDoc {
    beta: f64,
    delta: f64,
    omega: f64,
}

fn monomials(list: &[(u32, u32, f64)]) -> Result<Poly2<f64>> {
    if list.iter().any(|m| !m.2.is_finite()) {
        return Err(Error::Schema("non-finite coefficient".into()));
    }
    Ok(Poly2::from_terms(list.iter().map(|&(i, j, c)| ((i, j), c))))
}

/// Parses a JSON system definition.
///
/// Keys: `hamiltonian` (list of `[i, j, c]`), `perturbation` (list of
/// `{component, harmonic, phase, poly}`), optional `fourier` (complex
/// coefficients `{component, harmonic, poly: [[i, j, re, im], …]}`),
/// `omega`, and optionally `preset` with `params {beta, delta, omega}`,
/// which overrides the explicit fields.
pub fn parse_system(document: &str) -> Result<PlanarSystem> {
    let doc: SystemDoc =
        serde_json::from_str(document).map_err(|e| Error::Schema(e.to_string()))?;
    if let Some(name) = &doc.preset {
        let kind: PresetKind = name.parse()?;
        let p = doc
            .params
            .ok_or_else(|| Error::Schema("preset requires params {beta, delta, omega}".into()))?;
        return PlanarSystem::preset(
            kind,
            PresetParams {
                beta: p.beta,
                delta: p.delta,
                omega: p.omega,
            },
        );
    }
    if doc.params.is_some() {
        return Err(Error::Schema("params given without preset".into()));
    }
    let h = monomials(
        doc.hamiltonian
            .as_deref()
            .ok_or_else(|| Error::Schema("missing `hamiltonian`".into()))?,
    )?;
    let omega = doc
        .omega
        .ok_or_else(|| Error::Schema("missing `omega`".into()))?;
    let terms = doc
        .perturbation
        .unwrap_or_default()
        .into_iter()
        .map(|t| {
            Ok(PerturbationTerm {
                component: t.component,
                harmonic: t.harmonic,
                phase: t.phase,
                poly: monomials(&t.poly)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut g = FourierVectorField::from_terms(&terms)?;
    if let Some(entries) = doc.fourier {
        g = merge_complex(&g, &entries)?;
    }
    PlanarSystem::new(h, g, omega)
}

fn merge_complex(base: &FourierVectorField, entries: &[FourierDoc]) -> Result<FourierVectorField> {
    let n = entries
        .iter()
        .map(|e| e.harmonic.unsigned_abs() as usize)
        .chain(std::iter::once(base.n()))
        .max()
        .unwrap_or(0);
    let mut hat: Vec<VecPoly<Complex64>> = (-(n as i32)..=n as i32)
        .map(|j| {
            base.hat(j)
                .cloned()
                .unwrap_or([Poly2::zero(), Poly2::zero()])
        })
        .collect();
    for e in entries {
        if e.component != 1 && e.component != 2 {
            return Err(Error::Schema(format!(
                "component must be 1 or 2, got {}",
                e.component
            )));
        }
        if e.poly.iter().any(|m| !(m.2.is_finite() && m.3.is_finite())) {
            return Err(Error::Schema("non-finite coefficient".into()));
        }
        let p = Poly2::from_terms(
            e.poly
                .iter()
                .map(|&(i, j, re, im)| ((i, j), Complex64::new(re, im))),
        );
        let idx = (e.harmonic + n as i32) as usize;
        hat[idx][e.component - 1] = hat[idx][e.component - 1].add(&p);
    }
    FourierVectorField::from_hat(hat)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn duffing(kind: PresetKind, beta: f64, delta: f64) -> PlanarSystem {
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
    fn preset_coefficients() {
        let sys = duffing(PresetKind::Duffing1, 1.0, 0.0);
        assert_eq!(sys.g.n(), 1);
        let g1 = sys.g.eval_hat(1, [0.3, -0.7]);
        let gm1 = sys.g.eval_hat(-1, [0.3, -0.7]);
        assert_eq!(g1, [Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)]);
        assert_eq!(gm1, g1);
        assert_eq!(
            sys.g.eval_hat(0, [0.3, -0.7]),
            [Complex64::new(0.0, 0.0); 2]
        );
    }

    #[test]
    fn field_values() {
        let sys = duffing(PresetKind::Duffing1, 1.0, 0.0);
        assert_eq!(hamiltonian_field(&sys, [0.0, 0.0]), [0.0, 0.0]);
        assert_eq!(hamiltonian_field(&sys, [1.0, 1.0]), [1.0, 0.0]);
        let sys2 = duffing(PresetKind::Duffing2, 1.0, 0.0);
        assert_eq!(hamiltonian_field(&sys2, [1.0, 0.0]), [0.0, 0.0]);
    }

    #[test]
    fn saddles() {
        let sys = duffing(PresetKind::Duffing1, 1.0, 0.0);
        let s = refine_saddle(&sys, [0.1, 0.1], TOL_EQ).unwrap();
        assert!(norm2(s.x) < 1e-12);
        assert!((s.lambda - 1.0).abs() < 1e-14);
        let sys2 = duffing(PresetKind::Duffing2, 1.0, 0.0);
        let s2 = refine_saddle(&sys2, [0.9, 0.0], TOL_EQ).unwrap();
        assert!((s2.x[0] - 1.0).abs() < 1e-12 && s2.x[1].abs() < 1e-12);
        assert!((s2.lambda - 2f64.sqrt()).abs() < 1e-12);
        assert!(matches!(
            refine_saddle(&sys2, [0.1, 0.0], TOL_EQ),
            Err(Error::NotASaddle(_))
        ));
    }

    #[test]
    fn eigenvector_sign_convention() {
        let sys = duffing(PresetKind::Duffing1, 1.0, 0.0);
        let s = refine_saddle(&sys, [0.0, 0.0], TOL_EQ).unwrap();
        let r = 0.5f64.sqrt();
        assert!((s.v_u[0] - r).abs() < 1e-15 && (s.v_u[1] - r).abs() < 1e-15);
        assert!((s.v_s[0] - r).abs() < 1e-15 && (s.v_s[1] + r).abs() < 1e-15);
    }

    #[test]
    fn parse_documents() {
        let sys = parse_system(r#"{"hamiltonian": [[0,2,0.5],[2,0,-0.5],[4,0,0.25]], "perturbation": [], "omega": 1.5}"#)
            .unwrap();
        assert_eq!(sys.g.n(), 0);
        assert!(sys.g.is_zero());
        assert!(matches!(
            parse_system(r#"{"hamiltonian": [[0,2,0.5]], "omega": -1}"#),
            Err(Error::Schema(_))
        ));
        assert!(matches!(
            parse_system(r#"{"preset": "nosuch", "params": {"beta":1,"delta":0,"omega":1}}"#),
            Err(Error::UnknownPreset(_))
        ));
        let p =
            parse_system(r#"{"preset": "duffing2", "params": {"beta":1,"delta":0.5,"omega":2}}"#)
                .unwrap();
        assert_eq!(p.preset.unwrap().0, PresetKind::Duffing2);
        assert_eq!(p.omega, 2.0);
        let bad = r#"{"hamiltonian": [[0,2,0.5]], "omega": 1,
            "fourier": [{"component": 2, "harmonic": 1, "poly": [[0,0,0.5,0.1]]}]}"#;
        assert!(matches!(parse_system(bad), Err(Error::RealityViolation(_))));
        let good = r#"{"hamiltonian": [[0,2,0.5]], "omega": 1,
            "fourier": [{"component": 2, "harmonic": 1, "poly": [[0,0,0.5,0.1]]},
                        {"component": 2, "harmonic": -1, "poly": [[0,0,0.5,-0.1]]}]}"#;
        assert!(parse_system(good).is_ok());
    }
}
