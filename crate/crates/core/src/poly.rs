//! Sparse bivariate polynomials with exact differentiation.
//!
//! `Poly2<T>` stores `Σ c_ij x1^i x2^j` as a sorted list of exponent pairs.
//! Coefficients are `f64` for Hamiltonians and `Complex64` for Fourier
//! coefficients of the perturbation; either kind can be evaluated at real or
//! complex points.

use num_complex::Complex64;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

/// Scalar field usable as an evaluation point or a coefficient.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + From<f64>
    + PartialEq
    + std::fmt::Debug
    + Send
    + Sync
    + 'static
{
    fn zero() -> Self {
        Self::from(0.0)
    }
    fn one() -> Self {
        Self::from(1.0)
    }
    fn modulus(self) -> f64;
}

impl Scalar for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn modulus(self) -> f64 {
        self.norm()
    }
}

/// Sparse polynomial in two variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly2<T> {
    terms: Vec<((u32, u32), T)>,
}

impl<T: Scalar> Default for Poly2<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Scalar> Poly2<T> {
    pub fn zero() -> Self {
        Poly2 { terms: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::from_terms([((0, 0), c)])
    }

    /// Builds a polynomial, merging repeated exponent pairs by summation and
    /// dropping exact zeros.
    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), T)>>(terms: I) -> Self {
        let mut map: BTreeMap<(u32, u32), T> = BTreeMap::new();
        for (e, c) in terms {
            let slot = map.entry(e).or_insert_with(T::zero);
            *slot = *slot + c;
        }
        Poly2 {
            terms: map.into_iter().filter(|(_, c)| *c != T::zero()).collect(),
        }
    }

    pub fn terms(&self) -> &[((u32, u32), T)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; zero for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|((i, j), _)| i + j)
            .max()
            .unwrap_or(0)
    }

    /// Partial derivative with respect to `x1` (`var = 0`) or `x2` (`var = 1`).
    pub fn deriv(&self, var: usize) -> Self {
        let terms = self.terms.iter().filter_map(|&((i, j), c)| {
            let (k, e) = if var == 0 {
                (i, (i.wrapping_sub(1), j))
            } else {
                (j, (i, j.wrapping_sub(1)))
            };
            (k > 0).then(|| (e, c * T::from(k as f64)))
        });
        Self::from_terms(terms)
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_terms(self.terms.iter().map(|&(e, c)| (e, c * s)))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_terms(self.terms.iter().chain(other.terms.iter()).copied())
    }

    pub fn map_coeffs<U: Scalar>(&self, f: impl Fn(T) -> U) -> Poly2<U> {
        Poly2::from_terms(self.terms.iter().map(|&(e, c)| (e, f(c))))
    }

    /// Largest coefficient modulus.
    pub fn max_coeff(&self) -> f64 {
        self.terms
            .iter()
            .map(|(_, c)| c.modulus())
            .fold(0.0, f64::max)
    }

    /// Evaluates at a point whose scalar type can absorb the coefficients.
    pub fn eval<X>(&self, x: [X; 2]) -> X
    where
        X: Scalar,
        T: Into<X>,
    {
        let mut acc = X::zero();
        for &((i, j), c) in &self.terms {
            acc = acc + c.into() * powu(x[0], i) * powu(x[1], j);
        }
        acc
    }
}

impl Poly2<f64> {
    pub fn to_complex(&self) -> Poly2<Complex64> {
        self.map_coeffs(Complex64::from)
    }
}

impl Poly2<Complex64> {
    pub fn conj(&self) -> Self {
        self.map_coeffs(|c| c.conj())
    }

    pub fn re(&self) -> Poly2<f64> {
        self.map_coeffs(|c| c.re)
    }

    pub fn im(&self) -> Poly2<f64> {
        self.map_coeffs(|c| c.im)
    }

    /// Largest coefficient-wise distance to `other`.
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.add(&other.scale(Complex64::from(-1.0))).max_coeff()
    }
}

fn powu<X: Scalar>(x: X, n: u32) -> X {
    match n {
        0 => X::one(),
        1 => x,
        2 => x * x,
        _ => {
            let mut acc = X::one();
            let mut base = x;
            let mut e = n;
            while e > 0 {
                if e & 1 == 1 {
                    acc = acc * base;
                }
                base = base * base;
                e >>= 1;
            }
            acc
        }
    }
}

/// Pair of polynomials forming a planar vector field component-wise.
pub type VecPoly<T> = [Poly2<T>; 2];

pub fn eval_vec<T, X>(p: &VecPoly<T>, x: [X; 2]) -> [X; 2]
where
    T: Scalar + Into<X>,
    X: Scalar,
{
    [p[0].eval(x), p[1].eval(x)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Poly2<f64> {
        Poly2::from_terms([((0, 2), 0.5), ((2, 0), -0.5), ((4, 0), 0.25), ((1, 1), 0.0)])
    }

    #[test]
    fn zero_terms_dropped_and_duplicates_merged() {
        let p = sample();
        assert_eq!(p.terms().len(), 3);
        let q = Poly2::from_terms([((1, 0), 1.0), ((1, 0), 2.0)]);
        assert_eq!(q.terms(), &[((1, 0), 3.0)]);
        assert!(Poly2::from_terms([((1, 0), 1.0), ((1, 0), -1.0)]).is_zero());
    }

    #[test]
    fn derivatives_of_duffing_energy() {
        let p = sample();
        let d1 = p.deriv(0);
        let d2 = p.deriv(1);
        assert_eq!(d1.eval([2.0, 3.0]), -2.0 + 8.0);
        assert_eq!(d2.eval([2.0, 3.0]), 3.0);
        assert!(p.deriv(0).deriv(0).deriv(0).deriv(0).deriv(0).is_zero());
    }

    #[test]
    fn complex_evaluation_agrees_with_real() {
        let p = sample();
        let z = [Complex64::new(0.3, 0.0), Complex64::new(-1.2, 0.0)];
        let v: Complex64 = p.eval(z);
        assert!((v.re - p.eval([0.3, -1.2])).abs() < 1e-15);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn high_powers() {
        let p = Poly2::from_terms([((7, 3), 1.0)]);
        assert!((p.eval([1.1, 0.9]) - 1.1f64.powi(7) * 0.9f64.powi(3)).abs() < 1e-14);
    }
}
