//! Gram-Schmidt orthonormalization of normalized multiple kernels,
//! projections, the Hardy Takenaka-Malmquist closed form, and the numerical
//! linear-independence check.

use nalgebra::DMatrix;

use crate::dict::{normalized_kernel, MultipleKernel, ParameterTuple, DEFAULT_MERGE_DELTA};
use crate::error::{Error, Result};
use crate::series::{PowerSeries, C64};
use crate::space::SpaceSpec;

/// Normalization denominators at or below this value signal a numerically
/// violated linear-independence condition.
pub const LIC_FLOOR: f64 = 1e-8;

/// Phase pivot: first coefficient whose modulus exceeds this fraction of the largest one.
const PHASE_PIVOT_REL: f64 = 1e-8;

/// Orthonormal `B_1..B_n` spanning the normalized multiple kernels of a tuple,
/// in order. Row `t` of the coefficient matrix expresses `B_t` over
/// `E~_1..E~_t`.
#[derive(Debug, Clone)]
pub struct OrthoSystem {
    spec: SpaceSpec,
    source: ParameterTuple,
    basis: Vec<PowerSeries>,
    kernels: Vec<MultipleKernel>,
    coeff_rows: Vec<Vec<C64>>,
    denominators: Vec<f64>,
}

impl OrthoSystem {
    pub fn empty(spec: &SpaceSpec) -> Self {
        Self {
            spec: spec.clone(),
            source: ParameterTuple::empty(),
            basis: Vec::new(),
            kernels: Vec::new(),
            coeff_rows: Vec::new(),
            denominators: Vec::new(),
        }
    }

    pub fn spec(&self) -> &SpaceSpec {
        &self.spec
    }

    pub fn source(&self) -> &ParameterTuple {
        &self.source
    }

    pub fn basis(&self) -> &[PowerSeries] {
        &self.basis
    }

    pub fn kernels(&self) -> &[MultipleKernel] {
        &self.kernels
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn denominators(&self) -> &[f64] {
        &self.denominators
    }

    /// Lower-triangular matrix `C` with `B_t = sum_s C[t][s] E~_s`.
    pub fn coeff_matrix(&self) -> DMatrix<C64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |t, s| {
            self.coeff_rows[t].get(s).copied().unwrap_or(C64::new(0.0, 0.0))
        })
    }

    pub fn gram_min_eig(&self) -> f64 {
        min_eigenvalue(&gram_of_kernels(&self.spec, &self.kernels))
    }

    /// Appends an already normalized kernel. Two modified Gram-Schmidt
    /// passes; fails when the normalization denominator is `<= LIC_FLOOR`.
    pub fn push_kernel(&mut self, kernel: MultipleKernel) -> Result<()> {
        let (next, denom, row) = self.orthogonalize(&kernel)?;
        self.source.push(kernel.parameter);
        self.basis.push(next);
        self.kernels.push(kernel);
        self.coeff_rows.push(row);
        self.denominators.push(denom);
        Ok(())
    }

    fn orthogonalize(&self, kernel: &MultipleKernel) -> Result<(PowerSeries, f64, Vec<C64>)> {
        let n = self.len();
        let mut v = kernel.series.clone();
        let mut beta = vec![C64::new(0.0, 0.0); n];
        for _pass in 0..2 {
            for (t, b) in self.basis.iter().enumerate() {
                let c = self.spec.inner_unchecked(&v, b);
                v.axpy(-c, b);
                beta[t] += c;
            }
        }
        let denom = self.spec.norm_sq_unchecked(&v).sqrt();
        if !(denom > LIC_FLOOR) {
            return Err(Error::DegenerateSystem {
                index: n,
                denominator: denom,
            });
        }
        let phase = phase_of_leading(&v);
        let factor = phase.conj() / denom;
        v.scale_in_place(factor);

        // v = E~_new - sum_t beta_t B_t, with B_t = sum_s C[t][s] E~_s
        let mut row = vec![C64::new(0.0, 0.0); n + 1];
        row[n] = factor;
        for (t, bt) in beta.iter().enumerate() {
            for (s, cts) in self.coeff_rows[t].iter().enumerate() {
                row[s] -= bt * cts * factor;
            }
        }
        Ok((v, denom, row))
    }

    /// `(<f, B_t>)_t` and the residual `f - sum_t <f,B_t> B_t`.
    pub fn project(&self, f: &PowerSeries) -> Result<(Vec<C64>, PowerSeries)> {
        if f.len() != self.spec.truncation() {
            return Err(Error::LengthMismatch {
                left: f.len(),
                right: self.spec.truncation(),
            });
        }
        let mut residual = f.clone();
        let mut coeffs = Vec::with_capacity(self.len());
        for b in &self.basis {
            let c = self.spec.inner_unchecked(&residual, b);
            residual.axpy(-c, b);
            coeffs.push(c);
        }
        Ok((coeffs, residual))
    }

    /// Coefficients `c_s` of `sum_t p_t B_t = sum_s c_s K~_s` over the
    /// unnormalized multiple kernels, by back-substitution through `C`.
    pub fn kernel_coefficients(&self, projection: &[C64]) -> Vec<C64> {
        let n = self.len();
        (0..n)
            .map(|s| {
                let acc: C64 = (s..n).map(|t| projection[t] * self.coeff_rows[t][s]).sum();
                acc / self.kernels[s].kernel_norm
            })
            .collect()
    }
}

fn phase_of_leading(v: &PowerSeries) -> C64 {
    let max = v.max_abs();
    v.coeffs()
        .iter()
        .find(|c| c.norm() > PHASE_PIVOT_REL * max)
        .map(|c| c / c.norm())
        .unwrap_or(C64::new(1.0, 0.0))
}

/// Normalized multiple kernels `E~_{a_k}` of a tuple, orders from its multiplicities.
pub fn tuple_kernels(spec: &SpaceSpec, tuple: &ParameterTuple) -> Result<Vec<MultipleKernel>> {
    (0..tuple.len())
        .map(|k| normalized_kernel(spec, tuple.points()[k], tuple.order(k)))
        .collect()
}

pub fn gram_schmidt(spec: &SpaceSpec, tuple: &ParameterTuple) -> Result<OrthoSystem> {
    let mut system = OrthoSystem::empty(spec);
    for kernel in tuple_kernels(spec, tuple)? {
        system.push_kernel(kernel)?;
    }
    Ok(system)
}

pub fn project(f: &PowerSeries, system: &OrthoSystem) -> Result<(Vec<C64>, PowerSeries)> {
    system.project(f)
}

/// Next orthonormal element for a new distinct parameter `b`, with its
/// normalization denominator `sqrt(1 - sum_t |<E~_b, B_t>|^2)`.
/// Parameters within the merge tolerance of an existing one are degenerate.
pub fn extend(system: &OrthoSystem, b: C64) -> Result<(PowerSeries, f64)> {
    if system
        .source()
        .points()
        .iter()
        .any(|&p| (p - b).norm() <= DEFAULT_MERGE_DELTA)
    {
        return Err(Error::DegenerateSystem {
            index: system.len(),
            denominator: 0.0,
        });
    }
    let kernel = normalized_kernel(system.spec(), b, 0)?;
    let (next, denom, _) = system.orthogonalize(&kernel)?;
    Ok((next, denom))
}

/// Like [`extend`] but lets `b` repeat an existing parameter exactly, in
/// which case the next derivative order is used.
pub fn extend_multiple(system: &OrthoSystem, b: C64) -> Result<(PowerSeries, f64)> {
    let order = system.source().points().iter().filter(|&&p| p == b).count();
    let kernel = normalized_kernel(system.spec(), b, order)?;
    let (next, denom, _) = system.orthogonalize(&kernel)?;
    Ok((next, denom))
}

/// Hermitian Gram matrix `G[i][j] = <E~_j, E~_i>`.
pub fn gram_of_kernels(spec: &SpaceSpec, kernels: &[MultipleKernel]) -> DMatrix<C64> {
    let n = kernels.len();
    let mut g = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for i in 0..n {
        for j in 0..=i {
            let v = spec.inner_unchecked(&kernels[j].series, &kernels[i].series);
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    g
}

pub fn gram_matrix(spec: &SpaceSpec, tuple: &ParameterTuple) -> Result<DMatrix<C64>> {
    Ok(gram_of_kernels(spec, &tuple_kernels(spec, tuple)?))
}

fn min_eigenvalue(g: &DMatrix<C64>) -> f64 {
    if g.is_empty() {
        return 1.0;
    }
    g.clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Smallest eigenvalue of the normalized-kernel Gram matrix; positive
/// values certify numerical linear independence.
pub fn lic_check(spec: &SpaceSpec, tuple: &ParameterTuple) -> Result<f64> {
    Ok(min_eigenvalue(&gram_matrix(spec, tuple)?))
}

/// Explicit Takenaka-Malmquist functions
/// `B_k = sqrt(1-|w_k|^2)/(1 - conj(w_k) z) * prod_{l<k} (z - w_l)/(1 - conj(w_l) z)`.
pub fn tm_closed_form(spec: &SpaceSpec, tuple: &ParameterTuple) -> Result<Vec<PowerSeries>> {
    if !spec.is_hardy() {
        return Err(Error::NotHardy);
    }
    if tuple.multiplicities().iter().any(|&m| m > 1) {
        return Err(Error::DegenerateTuple("repeated parameter".into()));
    }
    tuple.check_domain(spec)?;
    let one = C64::new(1.0, 0.0);
    let mut product = PowerSeries::constant(spec.truncation(), one);
    let mut out = Vec::with_capacity(tuple.len());
    for &w in tuple.points() {
        let scale = (1.0 - w.norm_sqr()).sqrt();
        out.push(product.div_one_minus(w.conj()).scale(C64::new(scale, 0.0)));
        product = product.mul_blaschke_factor(w);
    }
    Ok(out)
}
