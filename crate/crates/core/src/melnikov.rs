//! Melnikov coefficients `M̂_j = ∫ DH(x^h(t))·ĝ_j(x^h(t)) e^{ijωt} dt`, the
//! trigonometric polynomial `M(θ) = Σ M̂_j e^{ijθ}`, its zeros, and the
//! nonconstancy certificate.

use crate::error::{Error, Result};
use crate::quad;
use crate::separatrix::Orbit;
use crate::system::PlanarSystem;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const TOL_COEFF: f64 = 1e-10;
pub const TOL_CERT: f64 = 1e-8;
pub const TOL_SIMPLE: f64 = 1e-8;

const MAX_PANELS: usize = 20_000;

/// Coefficients `M̂_j`, `j = −N..=N`, with quadrature error estimates.
#[derive(Clone, Debug, PartialEq)]
pub struct MelnikovSeries {
    pub n: usize,
    pub coeffs: Vec<Complex64>,
    pub err: Vec<f64>,
    pub omega: f64,
    pub orbit_id: String,
    pub convention: String,
}

impl MelnikovSeries {
    pub fn coeff(&self, j: i32) -> Complex64 {
        let idx = j + self.n as i32;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            Complex64::from(0.0)
        } else {
            self.coeffs[idx as usize]
        }
    }

    pub fn err(&self, j: i32) -> f64 {
        let idx = j + self.n as i32;
        if idx < 0 || idx as usize >= self.err.len() {
            0.0
        } else {
            self.err[idx as usize]
        }
    }

    /// `Σ_j M̂_j e^{ijθ}` without discarding the imaginary part.
    pub fn eval_complex(&self, theta: f64) -> Complex64 {
        (-(self.n as i32)..=self.n as i32)
            .map(|j| self.coeff(j) * Complex64::from_polar(1.0, j as f64 * theta))
            .sum()
    }

    /// `M'(θ)`.
    pub fn derivative(&self, theta: f64) -> f64 {
        (1..=self.n as i32)
            .map(|j| {
                2.0 * (self.coeff(j)
                    * Complex64::new(0.0, j as f64)
                    * Complex64::from_polar(1.0, j as f64 * theta))
                .re
            })
            .sum()
    }

    fn second_derivative(&self, theta: f64) -> f64 {
        (1..=self.n as i32)
            .map(|j| {
                -2.0 * (j * j) as f64
                    * (self.coeff(j) * Complex64::from_polar(1.0, j as f64 * theta)).re
            })
            .sum()
    }

    /// Largest `|M̂_j|` over `j ≠ 0`.
    pub fn oscillation(&self) -> f64 {
        (1..=self.n as i32)
            .map(|j| self.coeff(j).norm())
            .fold(0.0, f64::max)
    }

    /// Series with every coefficient multiplied by `e^{ijωτ}`.
    pub fn rotated(&self, tau: f64) -> MelnikovSeries {
        let n = self.n as i32;
        let coeffs = (-n..=n)
            .map(|j| self.coeff(j) * Complex64::from_polar(1.0, j as f64 * self.omega * tau))
            .collect();
        MelnikovSeries {
            coeffs,
            ..self.clone()
        }
    }
}

/// `DH(x^h(t))·ĝ_j(x^h(t)) e^{ijωt}`.
fn integrand(orbit: &Orbit, sys: &PlanarSystem, j: i32, t: f64) -> Complex64 {
    let x = orbit.x(t);
    let dh = sys.ham.grad(x);
    let g = sys.g.eval_hat(j, x);
    (g[0] * dh[0] + g[1] * dh[1]) * Complex64::from_polar(1.0, j as f64 * sys.omega * t)
}

/// Cut-off where the integrand envelope falls below `tol/10` (in units of
/// the integral), scanning outward in steps of `2/λ`.
fn cutoff<F: Fn(f64) -> Complex64>(f: &F, sign: f64, lambda: f64, tol: f64) -> f64 {
    let mut t = 20.0 / lambda;
    let envelope = |t: f64| {
        (0..4)
            .map(|k| f(sign * (t - k as f64 * 0.25 / lambda)).norm() * (-(k as f64) * 0.25).exp())
            .fold(0.0, f64::max)
    };
    while envelope(t) / lambda >= tol / 10.0 && t < 400.0 / lambda {
        t += 2.0 / lambda;
    }
    t
}

/// `M̂_j` and an error estimate `≤ tol`.
pub fn melnikov_coefficient(
    orbit: &Orbit,
    sys: &PlanarSystem,
    j: i32,
    tol: f64,
) -> Result<(Complex64, f64)> {
    if j.unsigned_abs() as usize > sys.g.n() {
        return Err(Error::InvalidArgument(format!(
            "harmonic {j} exceeds the cutoff N = {}",
            sys.g.n()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let f = |t: f64| integrand(orbit, sys, j, t);
    let (lm, lp) = (orbit.lambda_minus(), orbit.lambda_plus());
    let t0 = orbit.delay();
    let fc = |t: f64| f(t + t0);
    let tp = cutoff(&fc, 1.0, lp, tol) + t0;
    let tm = cutoff(&fc, -1.0, lm, tol) - t0;
    let n_init = ((tp + tm) / 2.0).ceil().max(1.0) as usize;
    let (body, qerr) = quad::adaptive(&f, -tm, tp, 0.8 * tol, n_init, MAX_PANELS)?;
    let jw = Complex64::new(0.0, j as f64 * sys.omega);
    let (ip, im) = (f(tp), f(-tm));
    let tail = ip / (Complex64::from(lp) - jw) + im / (Complex64::from(lm) + jw);
    let err = qerr + ip.norm() / lp + im.norm() / lm;
    if err > tol {
        return Err(Error::ToleranceNotMet {
            requested: tol,
            estimated: err,
        });
    }
    Ok((body + tail, err))
}

/// All coefficients `j = −N..=N`, computed in parallel and symmetrized so
/// that `M̂_{−j} = conj(M̂_j)`.
pub fn melnikov_series(orbit: &Orbit, sys: &PlanarSystem, tol: f64) -> Result<MelnikovSeries> {
    let n = sys.g.n() as i32;
    let raw: Vec<(Complex64, f64)> = (-n..=n)
        .into_par_iter()
        .map(|j| melnikov_coefficient(orbit, sys, j, tol))
        .collect::<Result<_>>()?;
    let mut coeffs = vec![Complex64::from(0.0); raw.len()];
    let mut err = vec![0.0; raw.len()];
    let c = n as usize;
    coeffs[c] = Complex64::from(raw[c].0.re);
    err[c] = raw[c].1;
    if raw[c].0.im.abs() > 10.0 * tol {
        log::warn!("M̂_0 has imaginary part {:e}", raw[c].0.im);
    }
    for j in 1..=c {
        let (p, q) = (raw[c + j], raw[c - j]);
        let asym = (q.0 - p.0.conj()).norm();
        if asym > 10.0 * tol {
            log::warn!("M̂_-{j} deviates from conj(M̂_{j}) by {asym:e}");
        }
        let m = (p.0 + q.0.conj()) * 0.5;
        let e = p.1.max(q.1);
        coeffs[c + j] = m;
        coeffs[c - j] = m.conj();
        err[c + j] = e;
        err[c - j] = e;
    }
    Ok(MelnikovSeries {
        n: n as usize,
        coeffs,
        err,
        omega: sys.omega,
        orbit_id: orbit.id(),
        convention: orbit.convention(),
    })
}

/// `M(θ)` as a real number.
pub fn eval_melnikov(series: &MelnikovSeries, theta: f64) -> f64 {
    let z = series.eval_complex(theta);
    debug_assert!(
        z.im.abs() <= 1e-12 * (1.0 + series.coeffs.iter().map(|c| c.norm()).sum::<f64>())
    );
    z.re
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    NonIntegrable,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::NonIntegrable => "non-integrable",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub verdict: Verdict,
    /// Harmonic `ℓ ≥ 1` with the largest `|M̂_ℓ|` (1 when `N = 0`).
    pub witness: i32,
    /// Largest `|M̂_j| − err_j − tol_cert` over `j ≠ 0`.
    pub margin: f64,
    pub tol_cert: f64,
}

/// Nonconstancy of `M`: some `|M̂_j|`, `j ≠ 0`, exceeds `tol_cert + err_j`.
pub fn certify_nonintegrability(series: &MelnikovSeries, tol_cert: f64) -> Certificate {
    let n = series.n as i32;
    let mut witness = 1;
    let mut best = f64::NEG_INFINITY;
    let mut margin = -tol_cert;
    for j in 1..=n {
        let a = series.coeff(j).norm();
        if a > best {
            best = a;
            witness = j;
        }
        margin = if j == 1 {
            a - series.err(j) - tol_cert
        } else {
            margin.max(a - series.err(j) - tol_cert)
        };
    }
    let verdict = if margin > 0.0 {
        Verdict::NonIntegrable
    } else {
        Verdict::Inconclusive
    };
    Certificate {
        verdict,
        witness,
        margin,
        tol_cert,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Zero {
    pub theta: f64,
    pub derivative: f64,
    pub simple: bool,
}

/// Zeros of `M` on `[0, 2π)`.
///
/// Sign changes on a grid of `max(64N, 256)` points are bracketed and
/// refined by bisection and Newton; grid-local minima of `|M|` that touch
/// zero are reported as well, so double roots are not missed.
pub fn simple_zeros(series: &MelnikovSeries, tol_simple: f64) -> Result<Vec<Zero>> {
    let scale = series.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if series.oscillation() <= 1e-14 * (1.0 + scale) {
        return Err(Error::ConstantSeries);
    }
    let m = |t: f64| eval_melnikov(series, t);
    let k = (64 * series.n).max(256);
    let h = 2.0 * PI / k as f64;
    let mut vals: Vec<f64> = (0..k).map(|i| m(h * i as f64)).collect();
    vals.push(vals[0]);
    let mut roots: Vec<f64> = Vec::new();
    for i in 0..k {
        let (a, b) = (vals[i], vals[i + 1]);
        if a == 0.0 {
            roots.push(h * i as f64);
        } else if a * b < 0.0 {
            roots.push(refine_root(&m, series, h * i as f64, h * (i + 1) as f64));
        }
    }
    for i in 0..k {
        let prev = vals[(i + k - 1) % k];
        let (cur, next) = (vals[i], vals[i + 1]);
        if cur.abs() <= prev.abs()
            && cur.abs() <= next.abs()
            && prev * cur > 0.0
            && cur * next > 0.0
        {
            // Newton on M' for the extremum, accepted only when M vanishes there.
            let mut t = h * i as f64;
            for _ in 0..50 {
                let d2 = series.second_derivative(t);
                if d2 == 0.0 {
                    break;
                }
                let dt = series.derivative(t) / d2;
                t -= dt.clamp(-h, h);
                if dt.abs() < 1e-15 {
                    break;
                }
            }
            if m(t).abs() <= 1e-10 * (1.0 + scale) {
                roots.push(t);
            }
        }
    }
    let mut out: Vec<Zero> = Vec::new();
    for t in roots {
        let t = t.rem_euclid(2.0 * PI);
        let close = |u: f64| {
            let d = (u - t).abs();
            d.min(2.0 * PI - d) < 1e-9
        };
        if out.iter().any(|z| close(z.theta)) {
            continue;
        }
        let d = series.derivative(t);
        out.push(Zero {
            theta: t,
            derivative: d,
            simple: d.abs() > tol_simple,
        });
    }
    out.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    Ok(out)
}

fn refine_root<F: Fn(f64) -> f64>(m: &F, series: &MelnikovSeries, mut a: f64, mut b: f64) -> f64 {
    let mut fa = m(a);
    for _ in 0..60 {
        let c = 0.5 * (a + b);
        let fc = m(c);
        if fc == 0.0 {
            return c;
        }
        if fa * fc < 0.0 {
            b = c;
        } else {
            a = c;
            fa = fc;
        }
        if b - a < 1e-13 {
            break;
        }
    }
    let mut t = 0.5 * (a + b);
    for _ in 0..3 {
        let d = series.derivative(t);
        if d == 0.0 {
            break;
        }
        let step = m(t) / d;
        if step.abs() > b - a + 1e-12 {
            break;
        }
        t -= step;
    }
    t
}

/// `|M̂₀| / (2|M̂₁|)` for single-harmonic series; zeros exist iff it is < 1.
pub fn zero_existence_ratio(series: &MelnikovSeries) -> Result<f64> {
    let scale = series.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    for j in 2..=series.n as i32 {
        if series.coeff(j).norm() > 1e-14 * (1.0 + scale) {
            return Err(Error::MultiHarmonic(j));
        }
    }
    let m1 = series.coeff(1).norm();
    if m1 == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(series.coeff(0).norm() / (2.0 * m1))
}

#[derive(Serialize, Deserialize)]
struct CoeffEntry {
    j: i32,
    re: f64,
    im: f64,
    err: f64,
}

#[derive(Serialize, Deserialize)]
struct SeriesDoc {
    omega: f64,
    #[serde(rename = "N")]
    n: usize,
    coeffs: Vec<CoeffEntry>,
    convention: String,
    orbit: String,
}

/// JSON `{omega, N, coeffs: [{j, re, im, err}], convention, orbit}`.
pub fn series_to_json(series: &MelnikovSeries) -> String {
    let n = series.n as i32;
    let doc = SeriesDoc {
        omega: series.omega,
        n: series.n,
        coeffs: (-n..=n)
            .map(|j| {
                let c = series.coeff(j);
                CoeffEntry {
                    j,
                    re: c.re,
                    im: c.im,
                    err: series.err(j),
                }
            })
            .collect(),
        convention: series.convention.clone(),
        orbit: series.orbit_id.clone(),
    };
    serde_json::to_string_pretty(&doc).expect("series serializes")
}

pub fn series_from_json(doc: &str) -> Result<MelnikovSeries> {
    let d: SeriesDoc = serde_json::from_str(doc).map_err(|e| Error::Schema(e.to_string()))?;
    let n = d.n as i32;
    let mut coeffs = vec![Complex64::from(0.0); 2 * d.n + 1];
    let mut err = vec![0.0; 2 * d.n + 1];
    for e in &d.coeffs {
        if e.j.abs() > n {
            return Err(Error::Schema(format!(
                "harmonic {} exceeds N = {}",
                e.j, d.n
            )));
        }
        coeffs[(e.j + n) as usize] = Complex64::new(e.re, e.im);
        err[(e.j + n) as usize] = e.err;
    }
    Ok(MelnikovSeries {
        n: d.n,
        coeffs,
        err,
        omega: d.omega,
        orbit_id: d.orbit,
        convention: d.convention,
    })
}
