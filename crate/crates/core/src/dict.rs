//! Parameterized dictionary: reproducing kernels, their derivatives in
//! `conj(w)` (multiple kernels), normalized versions, and the multiplicity
//! bookkeeping for repeated parameters.

use crate::error::{Error, Result};
use crate::series::{PowerSeries, C64};
use crate::space::SpaceSpec;

/// Default distance below which two parameters are treated as one point.
pub const DEFAULT_MERGE_DELTA: f64 = 1e-6;

/// An ordered parameter tuple `(a_1, ..., a_n)` with multiplicities
/// `l(a_k)` = number of occurrences of `a_k` among `a_1..=a_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterTuple {
    points: Vec<C64>,
    multiplicities: Vec<usize>,
}

impl ParameterTuple {
    pub fn new(points: Vec<C64>) -> Self {
        let multiplicities = (0..points.len())
            .map(|k| points[..=k].iter().filter(|&&p| p == points[k]).count())
            .collect();
        Self {
            points,
            multiplicities,
        }
    }

    pub fn empty() -> Self {
        Self::new(Vec::new())
    }

    pub fn from_reals(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    /// Derivative order `l(a_k) - 1` used for the `k`-th multiple kernel.
    pub fn order(&self, k: usize) -> usize {
        self.multiplicities[k] - 1
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max_modulus(&self) -> f64 {
        self.points.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    pub fn push(&mut self, w: C64) {
        let count = self.points.iter().filter(|&&p| p == w).count();
        self.points.push(w);
        self.multiplicities.push(count + 1);
    }

    pub fn with_point(&self, w: C64) -> Self {
        let mut out = self.clone();
        out.push(w);
        out
    }

    pub fn without(&self, index: usize) -> Self {
        let mut pts = self.points.clone();
        pts.remove(index);
        Self::new(pts)
    }

    /// Distinct points paired with their total multiplicity, in order of first occurrence.
    pub fn clusters(&self) -> Vec<(C64, usize)> {
        let mut out: Vec<(C64, usize)> = Vec::new();
        for &p in &self.points {
            match out.iter_mut().find(|(q, _)| *q == p) {
                Some(entry) => entry.1 += 1,
                None => out.push((p, 1)),
            }
        }
        out
    }

    pub fn from_clusters(clusters: &[(C64, usize)]) -> Self {
        let mut pts = Vec::new();
        for &(p, m) in clusters {
            pts.extend(std::iter::repeat_n(p, m));
        }
        Self::new(pts)
    }

    pub fn check_domain(&self, spec: &SpaceSpec) -> Result<()> {
        self.points.iter().try_for_each(|&p| spec.check_parameter(p))
    }
}

/// A (possibly normalized) multiple reproducing kernel
/// `(d/d conj(w))^order K_w`, stored as a truncated series.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipleKernel {
    pub parameter: C64,
    pub order: usize,
    pub series: PowerSeries,
    /// Norm of the unnormalized kernel; `series` has unit norm when normalized.
    pub kernel_norm: f64,
    pub normalized: bool,
}

fn max_order(spec: &SpaceSpec) -> usize {
    spec.truncation() / 2
}

/// Kernel coefficients up to the positive factor `h_m / m!`: entry `m` is 1
/// and `c_{k+1} = c_k (k+1)/(k+1-m) conj(w) h_k / h_{k+1}`.
fn kernel_shape(spec: &SpaceSpec, w: C64, m: usize) -> PowerSeries {
    let n = spec.truncation();
    let h = spec.series_weights();
    let wc = w.conj();
    let mut out = PowerSeries::zeros(n);
    let coeffs = out.coeffs_mut();
    let mut c = C64::new(1.0, 0.0);
    coeffs[m] = c;
    for k in m..n - 1 {
        let ratio = (k + 1) as f64 / (k + 1 - m) as f64 * h[k] / h[k + 1];
        c = c * wc * ratio;
        coeffs[k + 1] = c;
    }
    out
}

fn check_kernel_args(spec: &SpaceSpec, w: C64, m: usize) -> Result<()> {
    spec.check_parameter(w)?;
    let limit = max_order(spec);
    if m >= limit {
        return Err(Error::OrderTooHigh { order: m, limit });
    }
    Ok(())
}

/// `(d/d conj(w))^m K_w` with coefficients `(k)_m conj(w)^{k-m} / h_k`.
pub fn kernel(spec: &SpaceSpec, w: C64, m: usize) -> Result<MultipleKernel> {
    check_kernel_args(spec, w, m)?;
    let shape = kernel_shape(spec, w, m);
    let m_factorial: f64 = (1..=m).map(|j| j as f64).product();
    let scale = m_factorial / spec.weight(m)?;
    let shape_norm = spec.norm_sq_unchecked(&shape).sqrt();
    let kernel_norm = shape_norm * scale;
    if !kernel_norm.is_finite() || kernel_norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(MultipleKernel {
        parameter: w,
        order: m,
        series: shape.scale(C64::new(scale, 0.0)),
        kernel_norm,
        normalized: false,
    })
}

/// Unit-norm version of [`kernel`].
pub fn normalized_kernel(spec: &SpaceSpec, w: C64, m: usize) -> Result<MultipleKernel> {
    check_kernel_args(spec, w, m)?;
    let mut shape = kernel_shape(spec, w, m);
    let shape_norm = spec.norm_sq_unchecked(&shape).sqrt();
    if !shape_norm.is_finite() || shape_norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let m_factorial: f64 = (1..=m).map(|j| j as f64).product();
    let kernel_norm = shape_norm * m_factorial / spec.weight(m)?;
    shape.scale_in_place(C64::new(1.0 / shape_norm, 0.0));
    Ok(MultipleKernel {
        parameter: w,
        order: m,
        series: shape,
        kernel_norm,
        normalized: true,
    })
}

/// Closed-form `<K_v, K_w> = K_v(w) = (1 - conj(v) w)^{-s}` of the untruncated space.
pub fn kernel_inner(spec: &SpaceSpec, v: C64, w: C64) -> Result<C64> {
    spec.check_parameter(v)?;
    spec.check_parameter(w)?;
    Ok(closed_kernel_eval(spec, v, 0, w))
}

/// Closed form of the multiple kernel `(d/d conj(a))^m K_a` at `z`:
/// `(s)^(m) z^m (1 - conj(a) z)^{-s-m}` with the rising factorial `(s)^(m)`.
/// Agrees with the truncated series up to the dropped tail.
pub fn closed_kernel_eval(spec: &SpaceSpec, a: C64, m: usize, z: C64) -> C64 {
    let s = spec.kind().kernel_exponent();
    let rising: f64 = (0..m).map(|j| s + j as f64).product();
    let base = C64::new(1.0, 0.0) - a.conj() * z;
    let zm = z.powu(m as u32);
    let p = -(s + m as f64);
    let power = if s.fract() == 0.0 {
        base.powi(p as i32)
    } else {
        (base.ln() * p).exp()
    };
    zm * power * rising
}

/// Snaps every group of points connected by pairwise distance `<= delta` to
/// the group centroid; multiplicities are recomputed.
pub fn merge_close(tuple: &ParameterTuple, delta: f64) -> ParameterTuple {
    let pts = tuple.points();
    let n = pts.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut merged_any = false;
    for i in 0..n {
        for j in i + 1..n {
            if (pts[i] - pts[j]).norm() <= delta {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[rj.max(ri)] = ri.min(rj);
                }
                if pts[i] != pts[j] {
                    merged_any = true;
                }
            }
        }
    }
    if !merged_any {
        return tuple.clone();
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    let out = (0..n)
        .map(|i| {
            let members: Vec<C64> = (0..n).filter(|&j| roots[j] == roots[i]).map(|j| pts[j]).collect();
            members.iter().sum::<C64>() / members.len() as f64
        })
        .collect();
    ParameterTuple::new(out)
}
