//! Truncated Taylor series `c_0 + c_1 z + ... + c_{N-1} z^{N-1}`.
//!
//! Every element of a disc space (targets, kernels, orthonormal functions)
//! is stored this way. Products are truncated to the original length.

use std::ops::{Add, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<C64>,
}

impl PowerSeries {
    pub fn zeros(len: usize) -> Self {
        Self {
            coeffs: vec![C64::new(0.0, 0.0); len],
        }
    }

    /// The constant series `value`.
    pub fn constant(len: usize, value: C64) -> Self {
        let mut s = Self::zeros(len);
        if len > 0 {
            s.coeffs[0] = value;
        }
        s
    }

    /// The monomial `z^k`.
    pub fn monomial(len: usize, k: usize) -> Self {
        let mut s = Self::zeros(len);
        if k < len {
            s.coeffs[k] = C64::new(1.0, 0.0);
        }
        s
    }

    /// Builds a series of length `len` from leading coefficients, padding with zeros.
    /// Coefficients beyond `len` are dropped.
    pub fn from_leading(len: usize, leading: &[C64]) -> Self {
        let mut s = Self::zeros(len);
        for (dst, src) in s.coeffs.iter_mut().zip(leading) {
            *dst = *src;
        }
        s
    }

    pub fn from_coeffs(coeffs: Vec<C64>) -> Self {
        Self { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [C64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// Horner evaluation of the truncated series at `z`. No domain check.
    pub fn eval_unchecked(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Evaluates the series at a point of the open unit disc.
    pub fn evaluate(&self, z: C64) -> Result<C64> {
        let modulus = z.norm();
        if !(modulus < 1.0) {
            return Err(Error::OutOfDomain { modulus, bound: 1.0 });
        }
        Ok(self.eval_unchecked(z))
    }

    /// The `m`-th derivative at `z`, by exact termwise differentiation.
    pub fn derivative_at(&self, z: C64, m: usize) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for k in (m..self.coeffs.len()).rev() {
            let falling: f64 = (0..m).map(|j| (k - j) as f64).product();
            acc = acc * z + self.coeffs[k] * falling;
        }
        acc
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&c| c * factor).collect(),
        }
    }

    pub fn scale_in_place(&mut self, factor: C64) {
        for c in &mut self.coeffs {
            *c *= factor;
        }
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: C64, other: &PowerSeries) {
        for (a, &b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += alpha * b;
        }
    }

    /// Multiplies by the linear factor `a0 + a1 z`, truncating.
    pub fn mul_linear(&self, a0: C64, a1: C64) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len());
        let mut prev = C64::new(0.0, 0.0);
        for &c in &self.coeffs {
            out.push(a0 * c + a1 * prev);
            prev = c;
        }
        Self { coeffs: out }
    }

    /// Divides by `1 - c z`, i.e. multiplies by the geometric series of `c z`.
    pub fn div_one_minus(&self, c: C64) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len());
        let mut prev = C64::new(0.0, 0.0);
        for &a in &self.coeffs {
            prev = a + c * prev;
            out.push(prev);
        }
        Self { coeffs: out }
    }

    /// Multiplies by the Blaschke factor `(z - w) / (1 - conj(w) z)`.
    pub fn mul_blaschke_factor(&self, w: C64) -> Self {
        self.mul_linear(-w, C64::new(1.0, 0.0)).div_one_minus(w.conj())
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &PowerSeries) -> Self {
        let n = self.coeffs.len();
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().take(n - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        Self { coeffs: out }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &PowerSeries) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for &PowerSeries {
    type Output = PowerSeries;

    fn add(self, rhs: &PowerSeries) -> PowerSeries {
        let mut out = self.clone();
        out.axpy(C64::new(1.0, 0.0), rhs);
        out
    }
}

impl Sub for &PowerSeries {
    type Output = PowerSeries;

    fn sub(self, rhs: &PowerSeries) -> PowerSeries {
        let mut out = self.clone();
        out.axpy(C64::new(-1.0, 0.0), rhs);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn horner_matches_direct_sum() {
        let s = PowerSeries::from_leading(16, &[c(1.0), c(1.0)]);
        assert_eq!(s.evaluate(c(0.5)).unwrap(), c(1.5));
        assert_eq!(PowerSeries::zeros(16).evaluate(C64::new(0.3, -0.2)).unwrap(), c(0.0));
    }

    #[test]
    fn evaluate_rejects_boundary() {
        let s = PowerSeries::monomial(16, 1);
        assert!(matches!(s.evaluate(c(1.0)), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn geometric_series_via_division() {
        let g = PowerSeries::constant(64, c(1.0)).div_one_minus(c(0.5));
        for (k, v) in g.coeffs().iter().enumerate() {
            assert!((v.re - 0.5f64.powi(k as i32)).abs() < 1e-15);
        }
        // 1/(1 - 0.5 z) at z = 0.5 is 4/3 up to a 0.25^64 tail
        assert!((g.evaluate(c(0.5)).unwrap() - c(4.0 / 3.0)).norm() < 1e-15);
    }

    #[test]
    fn blaschke_factor_vanishes_at_its_zero() {
        let w = C64::new(0.3, -0.4);
        let b = PowerSeries::constant(256, c(1.0)).mul_blaschke_factor(w);
        assert!(b.evaluate(w).unwrap().norm() < 1e-14);
    }

    #[test]
    fn derivative_of_cubic() {
        // f = z^3, f'' = 6z
        let f = PowerSeries::monomial(16, 3);
        let z = C64::new(0.2, 0.1);
        assert!((f.derivative_at(z, 2) - z * 6.0).norm() < 1e-15);
        assert!((f.derivative_at(z, 0) - z * z * z).norm() < 1e-15);
    }

    #[test]
    fn cauchy_product_truncates() {
        let a = PowerSeries::from_leading(4, &[c(1.0), c(1.0)]);
        let sq = a.mul(&a).mul(&a).mul(&a);
        // (1+z)^4 truncated to degree 3: 1 + 4z + 6z^2 + 4z^3
        assert_eq!(sq.coeffs(), &[c(1.0), c(4.0), c(6.0), c(4.0)]);
    }
}
