//! Stroboscopic map of the forced system, its hyperbolic fixed points,
//! one-dimensional invariant manifolds, and the measured splitting of the
//! separatrix compared with the first-order Melnikov prediction.

use crate::error::{Error, Result};
use crate::melnikov::{eval_melnikov, MelnikovSeries};
use crate::numfmt::num;
use crate::ode::{self, OdeOpts};
use crate::separatrix::Orbit;
use crate::system::{norm2, PlanarSystem};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::fmt::Write as _;

pub const DELTA_SEED: f64 = 1e-7;
pub const DS_MAX: f64 = 1e-3;
const NEWTON_MAX_ITER: usize = 50;
/// Smallest seed-parameter gap before point insertion gives up.
const MIN_PARAM_GAP: f64 = 1e-13;

/// Period-`2π/ω` map of `ẋ = J DH(x) + ε g(x, θ₀ + ωt)`.
#[derive(Clone, Debug)]
pub struct StrobeMap {
    pub sys: PlanarSystem,
    pub eps: f64,
    /// Forcing phase at the section.
    pub theta0: f64,
    pub rtol: f64,
    pub atol: f64,
    /// Trajectories leaving `max(|x₁|, |x₂|) ≤ bbox` fail with `Escape`.
    pub bbox: f64,
}

impl StrobeMap {
    /// Map with the default tolerances and a box of three times the orbit's extent.
    pub fn new(sys: &PlanarSystem, eps: f64, theta0: f64, orbit: &Orbit) -> Self {
        StrobeMap {
            sys: sys.clone(),
            eps,
            theta0,
            rtol: 1e-12,
            atol: 1e-14,
            bbox: 3.0 * orbit.extent(),
        }
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.sys.omega
    }

    fn opts(&self) -> OdeOpts {
        OdeOpts {
            rtol: self.rtol,
            atol: self.atol,
            ..OdeOpts::default()
        }
    }

    fn field(&self, t: f64, x: [f64; 2]) -> [f64; 2] {
        let f = self.sys.ham.field(x);
        if self.eps == 0.0 {
            return f;
        }
        let g = self.sys.g.eval(x, self.theta0 + self.sys.omega * t);
        [f[0] + self.eps * g[0], f[1] + self.eps * g[1]]
    }

    fn flow(&self, x: [f64; 2], t0: f64, t1: f64) -> Result<[f64; 2]> {
        let bbox = self.bbox;
        let mut escaped = None;
        let r = ode::integrate(
            |t, y| self.field(t, *y),
            t0,
            x,
            t1,
            &self.opts(),
            |_, y, _| {
                let out = !(y[0].abs() <= bbox && y[1].abs() <= bbox);
                if out {
                    escaped = Some(*y);
                }
                !out
            },
        )?;
        match escaped {
            Some(y) => Err(Error::Escape(y)),
            None => Ok(r.y),
        }
    }

    /// One period forward.
    pub fn strobe(&self, x: [f64; 2]) -> Result<[f64; 2]> {
        self.flow(x, 0.0, self.period())
    }

    /// One period backward, by time-reversed integration.
    pub fn inverse(&self, x: [f64; 2]) -> Result<[f64; 2]> {
        self.flow(x, self.period(), 0.0)
    }

    /// Image and Jacobian of the map from the variational equation.
    pub fn strobe_with_jacobian(&self, x: [f64; 2]) -> Result<([f64; 2], [[f64; 2]; 2])> {
        let rhs = |t: f64, y: &[f64; 6]| {
            let p = [y[0], y[1]];
            let f = self.field(t, p);
            let mut a = self.sys.ham.field_jac(p);
            if self.eps != 0.0 {
                let dg = self.sys.g.jac(p, self.theta0 + self.sys.omega * t);
                for r in 0..2 {
                    for c in 0..2 {
                        a[r][c] += self.eps * dg[r][c];
                    }
                }
            }
            // Columns of the Jacobian stored as (y2, y3) and (y4, y5).
            [
                f[0],
                f[1],
                a[0][0] * y[2] + a[0][1] * y[3],
                a[1][0] * y[2] + a[1][1] * y[3],
                a[0][0] * y[4] + a[0][1] * y[5],
                a[1][0] * y[4] + a[1][1] * y[5],
            ]
        };
        let bbox = self.bbox;
        let mut escaped = None;
        let r = ode::integrate(
            rhs,
            0.0,
            [x[0], x[1], 1.0, 0.0, 0.0, 1.0],
            self.period(),
            &self.opts(),
            |_, y, _| {
                let out = !(y[0].abs() <= bbox && y[1].abs() <= bbox);
                if out {
                    escaped = Some([y[0], y[1]]);
                }
                !out
            },
        )?;
        if let Some(y) = escaped {
            return Err(Error::Escape(y));
        }
        let y = r.y;
        Ok(([y[0], y[1]], [[y[2], y[4]], [y[3], y[5]]]))
    }
}

/// Hyperbolic fixed point of the strobe map.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicSaddle {
    pub x: [f64; 2],
    /// `(unstable, stable)` multipliers.
    pub multipliers: [f64; 2],
    /// Unit eigenvectors for the two multipliers.
    pub v_u: [f64; 2],
    pub v_s: [f64; 2],
}

/// Periodic response of the forced system linearized at the equilibrium
/// `x_eq`, sampled at the section.
pub fn linear_response(map: &StrobeMap, x_eq: [f64; 2]) -> [f64; 2] {
    if map.eps == 0.0 {
        return x_eq;
    }
    let a = map.sys.ham.field_jac(x_eq);
    let n = map.sys.g.n() as i64;
    let k = 4 * n as usize + 4;
    let samples: Vec<[f64; 2]> = (0..k)
        .map(|m| map.sys.g.eval(x_eq, 2.0 * PI * m as f64 / k as f64))
        .collect();
    let mut x = [0.0; 2];
    for j in -n..=n {
        let mut g = [Complex64::from(0.0); 2];
        for (m, s) in samples.iter().enumerate() {
            let e =
                Complex64::from_polar(1.0 / k as f64, -2.0 * PI * (j * m as i64) as f64 / k as f64);
            g[0] += e * s[0];
            g[1] += e * s[1];
        }
        // (ijω − A) y = ĝ_j
        let iw = Complex64::new(0.0, j as f64 * map.sys.omega);
        let m = [
            [iw - a[0][0], Complex64::from(-a[0][1])],
            [Complex64::from(-a[1][0]), iw - a[1][1]],
        ];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let y = [
            (m[1][1] * g[0] - m[0][1] * g[1]) / det,
            (m[0][0] * g[1] - m[1][0] * g[0]) / det,
        ];
        let ph = Complex64::from_polar(1.0, j as f64 * map.theta0);
        x[0] += (y[0] * ph).re;
        x[1] += (y[1] * ph).re;
    }
    [x_eq[0] + map.eps * x[0], x_eq[1] + map.eps * x[1]]
}

/// Newton iteration for a fixed point of the strobe map.
pub fn periodic_saddle(map: &StrobeMap, guess: [f64; 2]) -> Result<PeriodicSaddle> {
    let mut x = guess;
    for _ in 0..NEWTON_MAX_ITER {
        let (px, j) = map.strobe_with_jacobian(x)?;
        let r = [px[0] - x[0], px[1] - x[1]];
        let m = [[j[0][0] - 1.0, j[0][1]], [j[1][0], j[1][1] - 1.0]];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::NoConvergence(
                "singular Newton matrix at the strobe fixed point".into(),
            ));
        }
        let dx = [
            -(m[1][1] * r[0] - m[0][1] * r[1]) / det,
            -(-m[1][0] * r[0] + m[0][0] * r[1]) / det,
        ];
        x = [x[0] + dx[0], x[1] + dx[1]];
        if norm2(dx) <= 1e-14 * (1.0 + norm2(x)) || norm2(r) <= 1e-14 {
            let (_, j) = map.strobe_with_jacobian(x)?;
            return hyperbolic_split(x, j);
        }
    }
    Err(Error::NoConvergence(format!(
        "strobe fixed point from {guess:?}"
    )))
}

fn hyperbolic_split(x: [f64; 2], j: [[f64; 2]; 2]) -> Result<PeriodicSaddle> {
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = tr * tr / 4.0 - det;
    if !(disc > 0.0) {
        return Err(Error::LostHyperbolicity(format!(
            "complex multipliers at {x:?}"
        )));
    }
    let s = disc.sqrt();
    let (mu_u, mu_s) = if tr >= 0.0 {
        (tr / 2.0 + s, det / (tr / 2.0 + s))
    } else {
        (tr / 2.0 - s, det / (tr / 2.0 - s))
    };
    if !(mu_u.abs() > 1.0 && mu_s.abs() < 1.0) {
        return Err(Error::LostHyperbolicity(format!(
            "multipliers {mu_u}, {mu_s} at {x:?}"
        )));
    }
    let eig = |mu: f64| {
        let r0 = [j[0][0] - mu, j[0][1]];
        let r1 = [j[1][0], j[1][1] - mu];
        let r = if norm2(r0) >= norm2(r1) { r0 } else { r1 };
        let n = norm2(r);
        [-r[1] / n, r[0] / n]
    };
    Ok(PeriodicSaddle {
        x,
        multipliers: [mu_u, mu_s],
        v_u: eig(mu_u),
        v_s: eig(mu_s),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ManifoldSide {
    Stable,
    Unstable,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceOpts {
    pub delta_seed: f64,
    pub ds_max: f64,
    /// Initial number of points on the seed segment.
    pub seed_points: usize,
}

impl Default for TraceOpts {
    fn default() -> Self {
        TraceOpts {
            delta_seed: DELTA_SEED,
            ds_max: DS_MAX,
            seed_points: 16,
        }
    }
}

/// Polyline approximation of one branch of an invariant manifold.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldTrace {
    pub anchor: [f64; 2],
    pub side: ManifoldSide,
    pub points: Vec<[f64; 2]>,
    /// Cumulative arclength at each point.
    pub arclength: Vec<f64>,
}

/// Seed of a fundamental domain: `x* + δ μ^u v` for `u ∈ [0, 1]`, where `μ`
/// is the expansion factor of the iterated map along `v`.
struct Seed {
    x: [f64; 2],
    v: [f64; 2],
    delta: f64,
    mu: f64,
}

impl Seed {
    fn point(&self, u: f64) -> [f64; 2] {
        let s = self.delta * self.mu.powf(u);
        [self.x[0] + s * self.v[0], self.x[1] + s * self.v[1]]
    }
}

fn iterate(map: &StrobeMap, side: ManifoldSide, mut x: [f64; 2], n: usize) -> Result<[f64; 2]> {
    for _ in 0..n {
        x = match side {
            ManifoldSide::Unstable => map.strobe(x)?,
            ManifoldSide::Stable => map.inverse(x)?,
        };
    }
    Ok(x)
}

fn seed_for(fixed: &PeriodicSaddle, side: ManifoldSide, direction: f64, delta: f64) -> Seed {
    let (v, mu) = match side {
        ManifoldSide::Unstable => (fixed.v_u, fixed.multipliers[0].abs()),
        ManifoldSide::Stable => (fixed.v_s, 1.0 / fixed.multipliers[1].abs()),
    };
    let d = direction.signum();
    Seed {
        x: fixed.x,
        v: [d * v[0], d * v[1]],
        delta,
        mu,
    }
}

/// Traces the branch of the manifold leaving `fixed` along `direction · v`
/// until its arclength reaches `length`.
pub fn manifold_trace(
    map: &StrobeMap,
    fixed: &PeriodicSaddle,
    side: ManifoldSide,
    direction: f64,
    length: f64,
    opts: &TraceOpts,
) -> Result<ManifoldTrace> {
    let seed = seed_for(fixed, side, direction, opts.delta_seed);
    let mut points = vec![fixed.x];
    let mut arclength = vec![0.0];
    let push = |p: [f64; 2], points: &mut Vec<[f64; 2]>, arclength: &mut Vec<f64>| {
        let last = *points.last().expect("nonempty");
        let s = arclength.last().copied().unwrap_or(0.0) + norm2([p[0] - last[0], p[1] - last[1]]);
        points.push(p);
        arclength.push(s);
    };
    // The segment from the anchor to the seed is straight to O(δ²).
    let steps = (opts.delta_seed / opts.ds_max).ceil().max(1.0) as usize;
    for k in 1..=steps {
        let s = opts.delta_seed * k as f64 / steps as f64;
        push(
            [seed.x[0] + s * seed.v[0], seed.x[1] + s * seed.v[1]],
            &mut points,
            &mut arclength,
        );
    }
    let mut n = 0;
    while *arclength.last().expect("nonempty") < length {
        let arc = refined_arc(map, side, &seed, n, opts)?;
        for p in arc.into_iter().skip(1) {
            push(p, &mut points, &mut arclength);
            if *arclength.last().expect("nonempty") >= length {
                break;
            }
        }
        n += 1;
    }
    Ok(ManifoldTrace {
        anchor: fixed.x,
        side,
        points,
        arclength,
    })
}

/// Image of the seed domain under `n` iterations, with points inserted until
/// consecutive images are at most `ds_max` apart.
fn refined_arc(
    map: &StrobeMap,
    side: ManifoldSide,
    seed: &Seed,
    n: usize,
    opts: &TraceOpts,
) -> Result<Vec<[f64; 2]>> {
    let m = opts.seed_points.max(2);
    let mut us: Vec<f64> = (0..=m).map(|k| k as f64 / m as f64).collect();
    let mut ps: Vec<[f64; 2]> = us
        .iter()
        .map(|&u| iterate(map, side, seed.point(u), n))
        .collect::<Result<_>>()?;
    let mut i = 0;
    while i + 1 < us.len() {
        let gap = norm2([ps[i + 1][0] - ps[i][0], ps[i + 1][1] - ps[i][1]]);
        if gap <= opts.ds_max {
            i += 1;
            continue;
        }
        if us[i + 1] - us[i] < MIN_PARAM_GAP {
            return Err(Error::FoldTooSharp(format!(
                "spacing {gap:e} at {:?} after {n} iterations",
                ps[i]
            )));
        }
        let u = 0.5 * (us[i] + us[i + 1]);
        let p = iterate(map, side, seed.point(u), n)?;
        us.insert(i + 1, u);
        ps.insert(i + 1, p);
    }
    Ok(ps)
}

/// Brent's method on a bracketing interval.
fn brent<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    tol: f64,
) -> Result<f64> {
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 {
            d
        } else {
            tol1 * xm.signum()
        };
        fb = f(b)?;
    }
    Err(Error::NoConvergence("Brent iteration limit".into()))
}

/// Section through `x^h(0)` transversal to the separatrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Section {
    pub point: [f64; 2],
    /// Unit tangent `ẋ^h(0)/|ẋ^h(0)|`.
    pub tangent: [f64; 2],
    /// Unit normal `DH(x^h(0))/|DH(x^h(0))|`.
    pub normal: [f64; 2],
    /// `|DH(x^h(0))|`.
    pub grad_norm: f64,
}

impl Section {
    pub fn at_orbit_origin(orbit: &Orbit) -> Self {
        let point = orbit.x(0.0);
        let g = orbit.hamiltonian().grad(point);
        let n = norm2(g);
        Section {
            point,
            tangent: [g[1] / n, -g[0] / n],
            normal: [g[0] / n, g[1] / n],
            grad_norm: n,
        }
    }

    fn along(&self, p: [f64; 2]) -> f64 {
        (p[0] - self.point[0]) * self.tangent[0] + (p[1] - self.point[1]) * self.tangent[1]
    }

    fn across(&self, p: [f64; 2]) -> f64 {
        (p[0] - self.point[0]) * self.normal[0] + (p[1] - self.point[1]) * self.normal[1]
    }
}

/// Point where the branch of the manifold following the unperturbed orbit
/// first meets the section.
///
/// The seed distance is chosen so that, for the unperturbed orbit, the
/// crossing falls in the middle of the `n`-th image of the seed domain; the
/// crossing is then located by Brent's method in the seed parameter.
pub fn section_crossing(
    map: &StrobeMap,
    fixed: &PeriodicSaddle,
    side: ManifoldSide,
    orbit: &Orbit,
    section: &Section,
    delta_seed: f64,
) -> Result<[f64; 2]> {
    let (lam, xi) = match side {
        ManifoldSide::Unstable => (
            orbit.lambda_minus(),
            crate::variational::xi_limit(orbit, crate::variational::Side::Minus),
        ),
        ManifoldSide::Stable => (
            orbit.lambda_plus(),
            crate::variational::xi_limit(orbit, crate::variational::Side::Plus),
        ),
    };
    // Unperturbed tails: x^h(t) − x₋ ≈ ξ₋e^{λt}/λ and x^h(t) − x₊ ≈ −ξ₊e^{−λt}/λ.
    let (v_ref, dir_sign) = match side {
        ManifoldSide::Unstable => (fixed.v_u, 1.0),
        ManifoldSide::Stable => (fixed.v_s, -1.0),
    };
    let direction = dir_sign * (v_ref[0] * xi[0] + v_ref[1] * xi[1]).signum();
    let xi_n = norm2(xi);
    let period = map.period();
    // Seed at |t| = (n + 1/2)P with the smallest n giving δ ≤ delta_seed.
    let dist = |n: usize| xi_n * (-lam * (n as f64 + 0.5) * period).exp() / lam;
    let mut n = 0;
    while dist(n) > delta_seed {
        n += 1;
    }
    let seed = seed_for(fixed, side, direction, dist(n));
    let phi = |u: f64| -> Result<f64> { Ok(section.along(iterate(map, side, seed.point(u), n)?)) };
    let k = 8;
    let us: Vec<f64> = (0..=k).map(|i| i as f64 / k as f64).collect();
    let vals: Vec<f64> = us.iter().map(|&u| phi(u)).collect::<Result<_>>()?;
    // Closest sign change to the middle of the domain.
    let mut best: Option<usize> = None;
    for i in 0..k {
        if vals[i] == 0.0 || vals[i].signum() != vals[i + 1].signum() {
            let better = best.map_or(true, |b| (us[i] - 0.5).abs() < (us[b] - 0.5).abs());
            if better {
                best = Some(i);
            }
        }
    }
    let i =
        best.ok_or_else(|| Error::NoConnection("manifold does not cross the section".into()))?;
    let u = brent(phi, us[i], us[i + 1], vals[i], vals[i + 1], 1e-14)?;
    iterate(map, side, seed.point(u), n)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplittingOpts {
    pub delta_seed: f64,
    pub rtol: f64,
}

impl Default for SplittingOpts {
    fn default() -> Self {
        SplittingOpts {
            delta_seed: DELTA_SEED,
            rtol: 1e-12,
        }
    }
}

/// One row of a splitting profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitPoint {
    pub theta: f64,
    /// Signed normal distance, unstable minus stable.
    pub d: f64,
    /// `d |DH(x^h(0))| / ε` (zero at `ε = 0`).
    pub d_scaled: f64,
    pub m_theta: f64,
    pub abs_err: f64,
}

/// Measured splitting `d(θ₀)` at each section phase.
pub fn splitting_profile(
    sys: &PlanarSystem,
    orbit: &Orbit,
    series: &MelnikovSeries,
    eps: f64,
    thetas: &[f64],
    opts: &SplittingOpts,
) -> Result<Vec<SplitPoint>> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "ε must be finite and nonnegative, got {eps}"
        )));
    }
    let section = Section::at_orbit_origin(orbit);
    thetas
        .par_iter()
        .map(|&theta| {
            let mut map = StrobeMap::new(sys, eps, theta, orbit);
            map.rtol = opts.rtol;
            let fm = periodic_saddle(&map, linear_response(&map, orbit.source.x))?;
            let fp = if orbit.target.x == orbit.source.x {
                fm.clone()
            } else {
                periodic_saddle(&map, linear_response(&map, orbit.target.x))?
            };
            let pu = section_crossing(
                &map,
                &fm,
                ManifoldSide::Unstable,
                orbit,
                &section,
                opts.delta_seed,
            )?;
            let ps = section_crossing(
                &map,
                &fp,
                ManifoldSide::Stable,
                orbit,
                &section,
                opts.delta_seed,
            )?;
            let d = section.across(pu) - section.across(ps);
            let d_scaled = if eps == 0.0 {
                0.0
            } else {
                d * section.grad_norm / eps
            };
            let m_theta = eval_melnikov(series, theta);
            Ok(SplitPoint {
                theta,
                d,
                d_scaled,
                m_theta,
                abs_err: (d_scaled - m_theta).abs(),
            })
        })
        .collect()
}

/// `θ_k = 2πk/n`.
pub fn theta_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
}

/// `max_θ |d_scaled − M(θ)|`.
pub fn profile_error(profile: &[SplitPoint]) -> f64 {
    profile.iter().map(|p| p.abs_err).fold(0.0, f64::max)
}

/// CSV with columns `theta,d,d_scaled,M_theta,abs_err`.
pub fn profile_csv(profile: &[SplitPoint]) -> String {
    let mut s = String::from("theta,d,d_scaled,M_theta,abs_err\n");
    for p in profile {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            num(p.theta),
            num(p.d),
            num(p.d_scaled),
            num(p.m_theta),
            num(p.abs_err)
        );
    }
    s
}
