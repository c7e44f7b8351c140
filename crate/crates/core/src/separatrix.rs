//! Homoclinic and heteroclinic orbits of the unperturbed system.
//!
//! Closed forms are available for the two Duffing presets; any other system
//! gets a shot orbit stored as a dense grid with quintic Hermite
//! interpolation and linearized tails.

use crate::error::{Error, Result};
use crate::numfmt::num;
use crate::ode::{self, OdeOpts};
use crate::system::{norm2, saddle_at, Hamiltonian, PlanarSystem, PresetKind, Saddle};
use num_complex::Complex64;
use std::fmt::Write as _;
use std::sync::Arc;

/// Energy tolerance for the shooting precondition.
pub const TOL_ENERGY: f64 = 1e-10;
/// Arrival checks start once the trajectory has left this ball around the
/// source, and a distance minimum inside this ball around the target
/// counts as a miss.
const MISS_RADIUS: f64 = 1e-2;

#[derive(Clone, Debug, PartialEq)]
pub enum OrbitKind {
    ClosedForm { preset: PresetKind, branch: i32 },
    Numeric(Arc<NumericOrbit>),
}

/// Dense output of a shot orbit.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericOrbit {
    t: Vec<f64>,
    x: Vec<[f64; 2]>,
    v: Vec<[f64; 2]>,
    a: Vec<[f64; 2]>,
    /// Unstable component of `x(t_0) − x₋` and stable component of `x(t_N) − x₊`.
    tail_minus: [f64; 2],
    tail_plus: [f64; 2],
}

impl NumericOrbit {
    pub fn grid(&self) -> &[f64] {
        &self.t
    }

    pub fn states(&self) -> &[[f64; 2]] {
        &self.x
    }
}

/// A solution of `ẋ = J DH(x)` running from `source` (t → −∞) to `target`
/// (t → +∞).
#[derive(Clone, Debug, PartialEq)]
pub struct Orbit {
    pub source: Saddle,
    pub target: Saddle,
    pub energy: f64,
    pub kind: OrbitKind,
    ham: Hamiltonian,
    /// The orbit is `t ↦ x_base(t − delay)`.
    delay: f64,
}

impl Orbit {
    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.ham
    }

    pub fn lambda_minus(&self) -> f64 {
        self.source.lambda
    }

    pub fn lambda_plus(&self) -> f64 {
        self.target.lambda
    }

    pub fn is_closed_form(&self) -> bool {
        matches!(self.kind, OrbitKind::ClosedForm { .. })
    }

    pub fn delay(&self) -> f64 {
        self.delay
    }

    /// Identifier of the orbit and its time-origin convention.
    pub fn id(&self) -> String {
        match &self.kind {
            OrbitKind::ClosedForm { preset, branch } => {
                format!("{}{}", preset.name(), if *branch > 0 { "+" } else { "-" })
            }
            OrbitKind::Numeric(_) => "numeric".into(),
        }
    }

    /// Phase convention identifier.
    pub fn convention(&self) -> String {
        let base = match self.kind {
            OrbitKind::ClosedForm { .. } => "closed_form",
            OrbitKind::Numeric(_) => "arclength_midpoint",
        };
        if self.delay == 0.0 {
            base.into()
        } else {
            format!("{base}_delay_{}", self.delay)
        }
    }

    /// Same orbit with its time origin moved: `x_new(t) = x(t − tau)`.
    pub fn shifted(&self, tau: f64) -> Orbit {
        Orbit {
            delay: self.delay + tau,
            ..self.clone()
        }
    }

    /// `x^h(t)`.
    pub fn x(&self, t: f64) -> [f64; 2] {
        let s = t - self.delay;
        match &self.kind {
            OrbitKind::ClosedForm { preset, branch } => closed_form_real(*preset, *branch, s),
            OrbitKind::Numeric(n) => self.numeric_x(n, s),
        }
    }

    /// Holomorphic continuation of the orbit to complex time (closed forms only).
    pub fn x_complex(&self, t: Complex64) -> Result<[Complex64; 2]> {
        match &self.kind {
            OrbitKind::ClosedForm { preset, branch } => {
                Ok(closed_form_complex(*preset, *branch, t - self.delay))
            }
            OrbitKind::Numeric(_) => Err(Error::NotClosedForm),
        }
    }

    /// Largest coordinate magnitude reached along the orbit.
    pub fn extent(&self) -> f64 {
        let lam = self.source.lambda.min(self.target.lambda);
        let span = 40.0 / lam;
        (0..=4000)
            .map(|k| {
                let x = self.x(self.delay - span + 2.0 * span * k as f64 / 4000.0);
                x[0].abs().max(x[1].abs())
            })
            .fold(0.0, f64::max)
    }

    fn numeric_x(&self, n: &NumericOrbit, s: f64) -> [f64; 2] {
        let last = n.t.len() - 1;
        if s <= n.t[0] {
            let e = (self.source.lambda * (s - n.t[0])).exp();
            return [
                self.source.x[0] + e * n.tail_minus[0],
                self.source.x[1] + e * n.tail_minus[1],
            ];
        }
        if s >= n.t[last] {
            let e = (-self.target.lambda * (s - n.t[last])).exp();
            return [
                self.target.x[0] + e * n.tail_plus[0],
                self.target.x[1] + e * n.tail_plus[1],
            ];
        }
        let k =
            n.t.partition_point(|&tk| tk <= s)
                .saturating_sub(1)
                .min(last - 1);
        let h = n.t[k + 1] - n.t[k];
        let u = (s - n.t[k]) / h;
        let (u2, u3) = (u * u, u * u * u);
        let (u4, u5) = (u3 * u, u3 * u2);
        let h0 = 1.0 - 10.0 * u3 + 15.0 * u4 - 6.0 * u5;
        let h1 = u - 6.0 * u3 + 8.0 * u4 - 3.0 * u5;
        let h2 = 0.5 * u2 - 1.5 * u3 + 1.5 * u4 - 0.5 * u5;
        let h3 = 0.5 * u3 - u4 + 0.5 * u5;
        let h4 = -4.0 * u3 + 7.0 * u4 - 3.0 * u5;
        let h5 = 10.0 * u3 - 15.0 * u4 + 6.0 * u5;
        [0, 1].map(|c| {
            h0 * n.x[k][c]
                + h * h1 * n.v[k][c]
                + h * h * h2 * n.a[k][c]
                + h * h * h3 * n.a[k + 1][c]
                + h * h4 * n.v[k + 1][c]
                + h5 * n.x[k + 1][c]
        })
    }
}

fn sech(t: f64) -> f64 {
    let e = (-t.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

fn csech(z: Complex64) -> Complex64 {
    // 2e^{-z}/(1 + e^{-2z}), reflected so the exponential never overflows.
    let w = if z.re >= 0.0 { z } else { -z };
    let e = (-w).exp();
    e * 2.0 / (e * e + 1.0)
}

fn ctanh(z: Complex64) -> Complex64 {
    let w = if z.re >= 0.0 { z } else { -z };
    let e = (-2.0 * w).exp();
    let r = (Complex64::from(1.0) - e) / (e + 1.0);
    if z.re >= 0.0 {
        r
    } else {
        -r
    }
}

fn closed_form_real(preset: PresetKind, branch: i32, t: f64) -> [f64; 2] {
    let b = branch as f64;
    let r2 = std::f64::consts::SQRT_2;
    match preset {
        PresetKind::Duffing1 => {
            let s = sech(t);
            [b * r2 * s, -b * r2 * s * t.tanh()]
        }
        PresetKind::Duffing2 => {
            let u = t / r2;
            let s = sech(u);
            [b * u.tanh(), b * s * s / r2]
        }
    }
}

fn closed_form_complex(preset: PresetKind, branch: i32, t: Complex64) -> [Complex64; 2] {
    let b = branch as f64;
    let r2 = std::f64::consts::SQRT_2;
    match preset {
        PresetKind::Duffing1 => {
            let s = csech(t);
            [s * (b * r2), -s * ctanh(t) * (b * r2)]
        }
        PresetKind::Duffing2 => {
            let u = t / r2;
            let s = csech(u);
            [ctanh(u) * b, s * s * (b / r2)]
        }
    }
}

/// Exact separatrix of a preset. `branch = +1` is the right lobe of
/// duffing1 and the lower-to-upper connection `(−1, 0) → (1, 0)` of duffing2.
pub fn closed_form_orbit(preset: &str, branch: i32) -> Result<Orbit> {
    let kind: PresetKind = preset.parse()?;
    closed_form_orbit_of(kind, branch)
}

pub fn closed_form_orbit_of(kind: PresetKind, branch: i32) -> Result<Orbit> {
    if branch != 1 && branch != -1 {
        return Err(Error::InvalidArgument(format!(
            "branch must be +1 or -1, got {branch}"
        )));
    }
    let ham = Hamiltonian::new(kind.hamiltonian());
    let (from, to) = match kind {
        PresetKind::Duffing1 => ([0.0, 0.0], [0.0, 0.0]),
        PresetKind::Duffing2 => ([-(branch as f64), 0.0], [branch as f64, 0.0]),
    };
    let source = saddle_at(&ham, from)?;
    let target = saddle_at(&ham, to)?;
    let energy = ham.value(from);
    Ok(Orbit {
        source,
        target,
        energy,
        kind: OrbitKind::ClosedForm {
            preset: kind,
            branch,
        },
        ham,
        delay: 0.0,
    })
}

/// Orbit of the system's preset, if it has one.
pub fn preset_orbit(sys: &PlanarSystem, branch: i32) -> Result<Orbit> {
    match sys.preset {
        Some((kind, _)) => closed_form_orbit_of(kind, branch),
        None => Err(Error::NotClosedForm),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShootOpts {
    /// Initial displacement along the unstable eigenvector.
    pub delta0: f64,
    /// Arrival radius around the target saddle.
    pub r_stop: f64,
    /// Departure direction: `+1` along `v_u`, `−1` against it.
    pub branch: i32,
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    /// Integration time limit in units of `1/λ₋`.
    pub t_max_lambda: f64,
    pub tol_energy: f64,
}

impl Default for ShootOpts {
    fn default() -> Self {
        ShootOpts {
            delta0: 1e-8,
            r_stop: 1e-6,
            branch: 1,
            rtol: 1e-13,
            atol: 1e-20,
            h_max: 0.05,
            t_max_lambda: 400.0,
            tol_energy: TOL_ENERGY,
        }
    }
}

/// Coefficients of `d` in the basis `(p, q)`.
fn decompose(d: [f64; 2], p: [f64; 2], q: [f64; 2]) -> (f64, f64) {
    let det = p[0] * q[1] - p[1] * q[0];
    (
        (d[0] * q[1] - d[1] * q[0]) / det,
        (p[0] * d[1] - p[1] * d[0]) / det,
    )
}

/// Integrates the unstable manifold of `from` until it reaches `to`.
pub fn shoot_separatrix(
    sys: &PlanarSystem,
    from: &Saddle,
    to: &Saddle,
    opts: &ShootOpts,
) -> Result<Orbit> {
    let ham = &sys.ham;
    let (h_from, h_to) = (ham.value(from.x), ham.value(to.x));
    if (h_from - h_to).abs() > opts.tol_energy {
        return Err(Error::EnergyMismatch {
            from: h_from,
            to: h_to,
        });
    }
    for s in [from, to] {
        let res = norm2(ham.field(s.x));
        if res > 1e-10 {
            return Err(Error::NotASaddle(format!(
                "{:?} is not an equilibrium (|J DH| = {res:e})",
                s.x
            )));
        }
        saddle_at(ham, s.x)?;
        if s.lambda < 1e-6 {
            return Err(Error::LostHyperbolicity(format!(
                "rate {} at {:?}",
                s.lambda, s.x
            )));
        }
    }
    let b = opts.branch.signum() as f64;
    if b == 0.0 {
        return Err(Error::InvalidArgument("branch must be nonzero".into()));
    }
    let x0 = from.x;
    let d0 = [b * opts.delta0 * from.v_u[0], b * opts.delta0 * from.v_u[1]];
    let rhs = |_: f64, y: &[f64; 3]| {
        let f = ham.field([x0[0] + y[0], x0[1] + y[1]]);
        [f[0], f[1], norm2(f)]
    };
    let ode_opts = OdeOpts {
        rtol: opts.rtol,
        atol: opts.atol,
        h_max: opts.h_max,
        h0: Some(opts.h_max.min(0.01 / from.lambda)),
        max_steps: 10_000_000,
    };
    let bound = 1e3 * (1.0 + norm2(from.x) + norm2(to.x));
    let mut grid: Vec<(f64, [f64; 3])> = Vec::new();
    let mut left_start = false;
    let mut prev_dist = f64::INFINITY;
    let mut failure: Option<Error> = None;
    let mut arrived = false;
    let t_max = opts.t_max_lambda / from.lambda;
    let run = ode::integrate(
        rhs,
        0.0,
        [d0[0], d0[1], 0.0],
        t_max,
        &ode_opts,
        |t, y, _| {
            grid.push((t, *y));
            let x = [x0[0] + y[0], x0[1] + y[1]];
            if !(x[0].is_finite() && x[1].is_finite()) || x[0].abs().max(x[1].abs()) > bound {
                failure = Some(Error::NoConnection(format!(
                    "trajectory left the bounding box at t = {t}"
                )));
                return false;
            }
            let dist = norm2([x[0] - to.x[0], x[1] - to.x[1]]);
            if !left_start {
                left_start = norm2([y[0], y[1]]) > MISS_RADIUS;
                prev_dist = dist;
                return true;
            }
            if dist < opts.r_stop {
                arrived = true;
                return false;
            }
            if dist < MISS_RADIUS && dist > prev_dist {
                failure = Some(Error::NoConnection(format!(
                    "closest approach {prev_dist:e} to the target exceeds r_stop"
                )));
                return false;
            }
            prev_dist = dist;
            true
        },
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    if !arrived {
        return Err(Error::NoConnection(format!(
            "target not reached by t = {}",
            run.t
        )));
    }

    // Arclength midpoint of the full separatrix fixes t = 0.
    let (tn, yn) = *grid.last().expect("grid has the arrival point");
    let xn = [x0[0] + yn[0], x0[1] + yn[1]];
    let total = opts.delta0 + yn[2] + norm2([xn[0] - to.x[0], xn[1] - to.x[1]]);
    let s_mid = 0.5 * total - opts.delta0;
    let k = grid
        .partition_point(|(_, y)| y[2] < s_mid)
        .saturating_sub(1);
    let (tk, yk) = grid[k];
    let mut t_mid = tk;
    for _ in 0..8 {
        let y = ode::integrate_to(
            rhs,
            tk,
            yk,
            t_mid,
            &OdeOpts {
                h0: None,
                ..ode_opts
            },
        )?;
        let speed = norm2(ham.field([x0[0] + y[0], x0[1] + y[1]]));
        let dt = (y[2] - s_mid) / speed;
        t_mid -= dt;
        if dt.abs() < 1e-15 * (1.0 + t_mid.abs()) {
            break;
        }
    }

    let mut t = Vec::with_capacity(grid.len());
    let mut x = Vec::with_capacity(grid.len());
    let mut v = Vec::with_capacity(grid.len());
    let mut a = Vec::with_capacity(grid.len());
    for (tk, yk) in &grid {
        let p = [x0[0] + yk[0], x0[1] + yk[1]];
        let f = ham.field(p);
        let j = ham.field_jac(p);
        t.push(tk - t_mid);
        x.push(p);
        v.push(f);
        a.push([
            j[0][0] * f[0] + j[0][1] * f[1],
            j[1][0] * f[0] + j[1][1] * f[1],
        ]);
    }
    let (cu, _) = decompose(d0, from.v_u, from.v_s);
    let tail_minus = [cu * from.v_u[0], cu * from.v_u[1]];
    let (_, cs) = decompose([xn[0] - to.x[0], xn[1] - to.x[1]], to.v_u, to.v_s);
    let tail_plus = [cs * to.v_s[0], cs * to.v_s[1]];
    log::debug!(
        "shot separatrix: {} steps, t ∈ [{}, {}]",
        t.len(),
        -t_mid,
        tn - t_mid
    );
    let numeric = NumericOrbit {
        t,
        x,
        v,
        a,
        tail_minus,
        tail_plus,
    };
    Ok(Orbit {
        source: from.clone(),
        target: to.clone(),
        energy: h_from,
        kind: OrbitKind::Numeric(Arc::new(numeric)),
        ham: ham.clone(),
        delay: 0.0,
    })
}

/// `(x^h(t), J DH(x^h(t)))`.
pub fn orbit_eval(orbit: &Orbit, t: f64) -> ([f64; 2], [f64; 2]) {
    let x = orbit.x(t);
    (x, orbit.ham.field(x))
}

/// CSV with columns `t, x1, x2, dx1, dx2, H_error`.
pub fn orbit_csv(orbit: &Orbit, times: &[f64]) -> String {
    let mut out = String::from("t,x1,x2,dx1,dx2,H_error\n");
    for &t in times {
        let (x, dx) = orbit_eval(orbit, t);
        let herr = orbit.ham.value(x) - orbit.energy;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            num(t),
            num(x[0]),
            num(x[1]),
            num(dx[0]),
            num(dx[1]),
            num(herr)
        );
    }
    out
}
