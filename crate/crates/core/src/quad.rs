//! Quadrature: adaptive Gauss–Kronrod (7, 15) for complex integrands on
//! finite intervals and Gauss–Legendre rules of arbitrary order.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
/// Gauss weights at `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One 15-point Kronrod panel: `(integral, error estimate)`.
pub fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut fv = [(Complex64::from(0.0), Complex64::from(0.0)); 7];
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    let mut abs = [fc.re.abs() * WGK[7], fc.im.abs() * WGK[7]];
    for i in 0..7 {
        let dx = h * XGK[i];
        let (f1, f2) = (f(c - dx), f(c + dx));
        fv[i] = (f1, f2);
        rk += (f1 + f2) * WGK[i];
        if i % 2 == 1 {
            rg += (f1 + f2) * WG[i / 2];
        }
        abs[0] += WGK[i] * (f1.re.abs() + f2.re.abs());
        abs[1] += WGK[i] * (f1.im.abs() + f2.im.abs());
    }
    let mean = rk * 0.5;
    let mut asc = [
        (fc.re - mean.re).abs() * WGK[7],
        (fc.im - mean.im).abs() * WGK[7],
    ];
    for i in 0..7 {
        let (f1, f2) = fv[i];
        asc[0] += WGK[i] * ((f1.re - mean.re).abs() + (f2.re - mean.re).abs());
        asc[1] += WGK[i] * ((f1.im - mean.im).abs() + (f2.im - mean.im).abs());
    }
    let ha = h.abs();
    let diff = (rk - rg) * h;
    let err = rescale(diff.re.abs(), abs[0] * ha, asc[0] * ha)
        + rescale(diff.im.abs(), abs[1] * ha, asc[1] * ha);
    (rk * h, err)
}

/// QUADPACK error rescaling.
fn rescale(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut e = err;
    if resasc != 0.0 && e != 0.0 {
        e = resasc * (200.0 * e / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * resabs);
    }
    e
}

struct Panel {
    a: f64,
    b: f64,
    val: Complex64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err && self.a == o.a
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err).then(o.a.total_cmp(&self.a))
    }
}

/// Adaptive GK15 on `[a, b]` started from `n_init` equal panels, bisecting the
/// worst panel until the summed error estimate is below `tol`.
pub fn adaptive<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    n_init: usize,
    max_panels: usize,
) -> Result<(Complex64, f64)> {
    let n_init = n_init.max(1);
    let mut heap = BinaryHeap::with_capacity(max_panels + 2);
    let w = (b - a) / n_init as f64;
    for k in 0..n_init {
        let lo = a + w * k as f64;
        let hi = if k + 1 == n_init {
            b
        } else {
            a + w * (k + 1) as f64
        };
        let (val, err) = gk15(f, lo, hi);
        heap.push(Panel {
            a: lo,
            b: hi,
            val,
            err,
        });
    }
    loop {
        let (total, err) = sum_panels(&heap);
        if err <= tol {
            return Ok((total, err));
        }
        if heap.len() >= max_panels {
            return Err(Error::ToleranceNotMet {
                requested: tol,
                estimated: err,
            });
        }
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::ToleranceNotMet {
                requested: tol,
                estimated: err,
            });
        }
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (val, err) = gk15(f, lo, hi);
            heap.push(Panel {
                a: lo,
                b: hi,
                val,
                err,
            });
        }
    }
}

fn sum_panels(heap: &BinaryHeap<Panel>) -> (Complex64, f64) {
    // Sum in interval order so the result does not depend on heap layout.
    let mut v: Vec<&Panel> = heap.iter().collect();
    v.sort_by(|p, q| p.a.total_cmp(&q.a));
    v.iter().fold((Complex64::from(0.0), 0.0), |(s, e), p| {
        (s + p.val, e + p.err)
    })
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// `(P_n(z), P_n'(z))`.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
}

/// Composite Gauss–Legendre on `[a, b]` with `panels` equal panels.
pub struct CompositeGl {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl CompositeGl {
    pub fn new(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let c = a + h * (p as f64 + 0.5);
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(c + 0.5 * h * xi);
                weights.push(0.5 * h * wi);
            }
        }
        CompositeGl { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials_exactly() {
        for n in [1, 2, 5, 16] {
            let (x, w) = gauss_legendre(n);
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-14, "n = {n}");
            let deg = 2 * n - 1;
            let m: f64 = x
                .iter()
                .zip(&w)
                .map(|(x, w)| w * x.powi(deg as i32 - 1))
                .sum();
            let exact = if (deg - 1) % 2 == 0 {
                2.0 / deg as f64
            } else {
                0.0
            };
            assert!((m - exact).abs() < 1e-14, "n = {n}");
        }
    }

    #[test]
    fn gk_oscillatory() {
        let f = |t: f64| Complex64::from_polar(1.0, 3.0 * t) / (1.0 + t * t);
        let (v, e) = adaptive(&f, -40.0, 40.0, 1e-12, 40, 2000).unwrap();
        // ∫ e^{3it}/(1+t²) over ℝ is π e^{-3}; the truncation error is ~1/(3·40²).
        assert!((v.re - std::f64::consts::PI * (-3.0f64).exp()).abs() < 1e-3);
        assert!(v.im.abs() < 1e-12 && e <= 1e-12);
    }

    #[test]
    fn gk_smooth_exact() {
        let f = |t: f64| Complex64::new(t.exp(), t.sin());
        let (v, _) = adaptive(&f, 0.0, 1.0, 1e-13, 1, 100).unwrap();
        assert!((v.re - (1f64.exp() - 1.0)).abs() < 1e-14);
        assert!((v.im - (1.0 - 1f64.cos())).abs() < 1e-14);
    }
}
