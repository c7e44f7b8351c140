//! Dormand–Prince 5(4) integrator with step-size control.
//!
//! The state is a fixed-size array. Integration runs forward or backward in
//! time; an observer sees every accepted step and may stop the run early.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const A7: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
/// Difference between the fifth- and fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeOpts {
    pub rtol: f64,
    pub atol: f64,
    /// Largest allowed step magnitude.
    pub h_max: f64,
    /// Initial step magnitude; chosen automatically when `None`.
    pub h0: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOpts {
    fn default() -> Self {
        OdeOpts {
            rtol: 1e-12,
            atol: 1e-14,
            h_max: f64::INFINITY,
            h0: None,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeResult<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub steps: usize,
    /// True when the observer stopped the run before `t_end`.
    pub stopped: bool,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, ks: &[[f64; N]], coef: &[f64]) -> [f64; N] {
    let mut out = *y;
    for (k, &c) in ks.iter().zip(coef) {
        if c != 0.0 {
            for i in 0..N {
                out[i] += h * c * k[i];
            }
        }
    }
    out
}

fn err_norm<const N: usize>(y: &[f64; N], y1: &[f64; N], e: &[f64; N], o: &OdeOpts) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        let sc = o.atol + o.rtol * y[i].abs().max(y1[i].abs());
        s += (e[i] / sc).powi(2);
    }
    (s / N as f64).sqrt()
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end`.
///
/// `observer(t, y, f)` is called at the start and after every accepted step
/// (with `f` the derivative at the new point); returning `false` stops the
/// run at that step.
pub fn integrate<const N: usize, F, O>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &OdeOpts,
    mut observer: O,
) -> Result<OdeResult<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    O: FnMut(f64, &[f64; N], &[f64; N]) -> bool,
{
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    if !observer(t, &y, &k1) {
        return Ok(OdeResult {
            t,
            y,
            steps: 0,
            stopped: true,
        });
    }
    if t_end == t0 {
        return Ok(OdeResult {
            t,
            y,
            steps: 0,
            stopped: false,
        });
    }
    let dir = (t_end - t0).signum();
    let span = (t_end - t0).abs();
    let mut h = opts
        .h0
        .unwrap_or_else(|| initial_step(&mut f, t, &y, &k1, dir, opts))
        .min(opts.h_max)
        .min(span);
    let mut steps = 0usize;
    let mut fac_max = 10.0;
    loop {
        if steps >= opts.max_steps {
            return Err(Error::StepFailure(format!(
                "step limit {} reached at t = {t}",
                opts.max_steps
            )));
        }
        let remaining = (t_end - t) * dir;
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        let hs = h * dir;
        let mut k = [[0.0; N]; 7];
        k[0] = k1;
        k[1] = f(t + C[1] * hs, &axpy(&y, hs, &k[..1], &A2));
        k[2] = f(t + C[2] * hs, &axpy(&y, hs, &k[..2], &A3));
        k[3] = f(t + C[3] * hs, &axpy(&y, hs, &k[..3], &A4));
        k[4] = f(t + C[4] * hs, &axpy(&y, hs, &k[..4], &A5));
        k[5] = f(t + C[5] * hs, &axpy(&y, hs, &k[..5], &A6));
        let y1 = axpy(&y, hs, &k[..6], &A7);
        k[6] = f(t + hs, &y1);
        let mut e = [0.0; N];
        for i in 0..N {
            e[i] = hs * (0..7).map(|s| E[s] * k[s][i]).sum::<f64>();
        }
        let err = err_norm(&y, &y1, &e, opts);
        if !err.is_finite() {
            h *= 0.1;
            fac_max = 1.0;
        } else if err <= 1.0 {
            steps += 1;
            t = if last { t_end } else { t + hs };
            y = y1;
            k1 = k[6];
            if !observer(t, &y, &k1) {
                return Ok(OdeResult {
                    t,
                    y,
                    steps,
                    stopped: true,
                });
            }
            if last {
                return Ok(OdeResult {
                    t,
                    y,
                    steps,
                    stopped: false,
                });
            }
            let fac = if err == 0.0 {
                fac_max
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, fac_max)
            };
            h = (h * fac).min(opts.h_max);
            fac_max = 10.0;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            fac_max = 1.0;
        }
        if h <= 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepFailure(format!(
                "step size underflow at t = {t}"
            )));
        }
    }
}

/// Integrates to `t_end` without observation.
pub fn integrate_to<const N: usize, F>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &OdeOpts,
) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    integrate(f, t0, y0, t_end, opts, |_, _, _| true).map(|r| r.y)
}

fn initial_step<const N: usize, F>(
    f: &mut F,
    t: f64,
    y: &[f64; N],
    f0: &[f64; N],
    dir: f64,
    o: &OdeOpts,
) -> f64
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    // Components that start at zero are scaled like the whole state, or like
    // its rate over unit time when the state is zero.
    let ymax = y
        .iter()
        .chain(f0.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let sc = |i: usize| (o.atol + o.rtol * y[i].abs()).max(o.rtol * ymax);
    let rms = |v: &dyn Fn(usize) -> f64| {
        ((0..N).map(|i| (v(i) / sc(i)).powi(2)).sum::<f64>() / N as f64).sqrt()
    };
    let d0 = rms(&|i| y[i]);
    let d1 = rms(&|i| f0[i]);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let y1: [f64; N] = std::array::from_fn(|i| y[i] + dir * h0 * f0[i]);
    let f1 = f(t + dir * h0, &y1);
    let d2 = rms(&|i| f1[i] - f0[i]) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}
