//! Hardy and weighted Bergman spaces on the unit disc.
//!
//! Both are described by a monomial weight sequence `h_k = ||z^k||^2`, so the
//! inner product of two truncated series is the weighted coefficient sum
//! `sum_k h_k c_k conj(d_k)`. The Hardy boundary integral reduces to this with
//! `h_k = 1`; the weighted Bergman space `A_alpha` uses
//! `h_k = k! Gamma(2+alpha) / Gamma(k+2+alpha)`, normalized so `h_0 = 1`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::series::{PowerSeries, C64};

pub const DEFAULT_TRUNCATION: usize = 512;
pub const DEFAULT_R_MAX: f64 = 0.995;
pub const MIN_TRUNCATION: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpaceKind {
    Hardy,
    WeightedBergman { alpha: f64 },
}

impl SpaceKind {
    pub fn alpha(&self) -> Option<f64> {
        match self {
            SpaceKind::Hardy => None,
            SpaceKind::WeightedBergman { alpha } => Some(*alpha),
        }
    }

    /// Exponent `s` of the closed-form kernel `1 / (1 - conj(w) z)^s`.
    pub fn kernel_exponent(&self) -> f64 {
        match self {
            SpaceKind::Hardy => 1.0,
            SpaceKind::WeightedBergman { alpha } => 2.0 + alpha,
        }
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceKind::Hardy => write!(f, "hardy"),
            SpaceKind::WeightedBergman { alpha } => write!(f, "bergman(alpha={alpha})"),
        }
    }
}

/// A disc RKHS together with its series truncation and parameter bound.
#[derive(Debug, Clone)]
pub struct SpaceSpec {
    kind: SpaceKind,
    truncation: usize,
    r_max: f64,
    // h_0 ..= h_N
    weights: Arc<[f64]>,
}

impl PartialEq for SpaceSpec {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.truncation == other.truncation && self.r_max == other.r_max
    }
}

impl SpaceSpec {
    pub fn new(kind: SpaceKind, truncation: usize, r_max: f64) -> Result<Self> {
        if truncation < MIN_TRUNCATION {
            return Err(Error::InvalidSpace(format!(
                "truncation {truncation} is below the minimum {MIN_TRUNCATION}"
            )));
        }
        if !(r_max > 0.0 && r_max < 1.0) {
            return Err(Error::InvalidSpace(format!("r_max {r_max} must lie in (0, 1)")));
        }
        let weights = match kind {
            SpaceKind::Hardy => vec![1.0; truncation + 1],
            SpaceKind::WeightedBergman { alpha } => {
                if !(alpha > -1.0 && alpha.is_finite()) {
                    return Err(Error::InvalidSpace(format!("alpha {alpha} must exceed -1")));
                }
                bergman_weights(alpha, truncation + 1)
            }
        };
        Ok(Self {
            kind,
            truncation,
            r_max,
            weights: weights.into(),
        })
    }

    pub fn hardy(truncation: usize, r_max: f64) -> Result<Self> {
        Self::new(SpaceKind::Hardy, truncation, r_max)
    }

    pub fn bergman(alpha: f64, truncation: usize, r_max: f64) -> Result<Self> {
        Self::new(SpaceKind::WeightedBergman { alpha }, truncation, r_max)
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn is_hardy(&self) -> bool {
        matches!(self.kind, SpaceKind::Hardy)
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Same space with a different parameter bound.
    pub fn with_r_max(&self, r_max: f64) -> Result<Self> {
        Self::new(self.kind, self.truncation, r_max)
    }

    /// `h_k`, the squared norm of `z^k`, for `0 <= k <= N`.
    pub fn weight(&self, k: usize) -> Result<f64> {
        self.weights.get(k).copied().ok_or(Error::IndexOutOfRange {
            index: k,
            max: self.truncation,
        })
    }

    /// Weights `h_0 .. h_{N-1}` matching the series coefficients.
    pub fn series_weights(&self) -> &[f64] {
        &self.weights[..self.truncation]
    }

    pub fn zeros(&self) -> PowerSeries {
        PowerSeries::zeros(self.truncation)
    }

    pub fn series(&self, leading: &[C64]) -> PowerSeries {
        PowerSeries::from_leading(self.truncation, leading)
    }

    fn check_len(&self, f: &PowerSeries) -> Result<()> {
        if f.len() != self.truncation {
            return Err(Error::LengthMismatch {
                left: f.len(),
                right: self.truncation,
            });
        }
        Ok(())
    }

    /// `<f, g> = sum_k h_k f_k conj(g_k)`.
    pub fn inner_product(&self, f: &PowerSeries, g: &PowerSeries) -> Result<C64> {
        self.check_len(f)?;
        self.check_len(g)?;
        Ok(self.inner_unchecked(f, g))
    }

    pub(crate) fn inner_unchecked(&self, f: &PowerSeries, g: &PowerSeries) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for ((a, b), h) in f.coeffs().iter().zip(g.coeffs()).zip(self.weights.iter()) {
            acc += a * b.conj() * *h;
        }
        acc
    }

    pub fn norm_sq(&self, f: &PowerSeries) -> Result<f64> {
        self.check_len(f)?;
        Ok(self.norm_sq_unchecked(f))
    }

    pub(crate) fn norm_sq_unchecked(&self, f: &PowerSeries) -> f64 {
        f.coeffs()
            .iter()
            .zip(self.weights.iter())
            .map(|(c, h)| c.norm_sqr() * h)
            .sum()
    }

    pub fn norm(&self, f: &PowerSeries) -> Result<f64> {
        self.norm_sq(f).map(f64::sqrt)
    }

    /// Rejects parameters outside the closed disc of radius `r_max`.
    pub fn check_parameter(&self, w: C64) -> Result<()> {
        let modulus = w.norm();
        // points built as r_max * e^{it} may round a few ulps past r_max
        if !(modulus <= self.r_max * (1.0 + 4.0 * f64::EPSILON)) {
            return Err(Error::OutOfDomain {
                modulus,
                bound: self.r_max,
            });
        }
        Ok(())
    }
}

/// `h_0 = 1`, `h_k = h_{k-1} * k / (k + 1 + alpha)`, equivalent to the
/// Gamma-function ratio without forming factorials.
fn bergman_weights(alpha: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    let mut h = 1.0;
    out.push(h);
    for k in 1..count {
        let kf = k as f64;
        h *= kf / (kf + 1.0 + alpha);
        out.push(h);
    }
    out
}

pub fn weight(spec: &SpaceSpec, k: usize) -> Result<f64> {
    spec.weight(k)
}

pub fn inner_product(f: &PowerSeries, g: &PowerSeries, spec: &SpaceSpec) -> Result<C64> {
    spec.inner_product(f, g)
}

pub fn norm(f: &PowerSeries, spec: &SpaceSpec) -> Result<f64> {
    spec.norm(f)
}

pub fn evaluate(f: &PowerSeries, z: C64) -> Result<C64> {
    f.evaluate(z)
}
