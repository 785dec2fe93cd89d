//! Hardy-space bridge between orthonormal Takenaka-Malmquist combinations
//! and rational functions `p/q` with both degrees at most `n`.

use nalgebra::DMatrix;

use crate::dict::ParameterTuple;
use crate::error::{Error, Result};
use crate::nbest::ApproxResult;
use crate::ortho::tm_closed_form;
use crate::series::{PowerSeries, C64};
use crate::space::SpaceSpec;

/// Resultant magnitude (after max-coefficient normalization) below which
/// two polynomials are treated as sharing a root.
pub const COPRIME_FLOOR: f64 = 1e-10;
/// Half-width of the band around the unit circle where root location is
/// reported as indeterminate.
pub const BOUNDARY_BAND: f64 = 1e-9;
const DEGREE_REL_TOL: f64 = 1e-13;

/// Complex polynomial, coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<C64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<C64>) -> Self {
        Self { coeffs }
    }

    pub fn constant(c: C64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// `prod (z - r_k)` scaled by `lead`.
    pub fn from_roots(lead: C64, roots: &[C64]) -> Self {
        let mut p = Self::constant(lead);
        for &r in roots {
            p = p.mul(&Self::new(vec![-r, C64::new(1.0, 0.0)]));
        }
        p
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs() == 0.0
    }

    /// Numerical degree: highest power whose coefficient is not negligible
    /// relative to the largest one. The zero polynomial has degree 0.
    pub fn degree(&self) -> usize {
        let scale = self.max_abs();
        self.coeffs
            .iter()
            .rposition(|c| c.norm() > DEGREE_REL_TOL * scale)
            .unwrap_or(0)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    fn derivative_eval(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, (k, &c)| acc * z + c * k as f64)
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Polynomial::new(vec![]);
        }
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[C64], i: usize| v.get(i).copied().unwrap_or_default();
        Polynomial::new((0..len).map(|i| get(&self.coeffs, i) + get(&other.coeffs, i)).collect())
    }

    pub fn scale(&self, c: C64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    fn trimmed(&self) -> Vec<C64> {
        self.coeffs[..=self.degree().min(self.coeffs.len().saturating_sub(1))].to_vec()
    }

    /// Roots from the eigenvalues of the companion matrix, each polished by
    /// a few Newton steps.
    pub fn roots(&self) -> Vec<C64> {
        let c = self.trimmed();
        let d = c.len().saturating_sub(1);
        if d == 0 {
            return Vec::new();
        }
        let lead = c[d];
        let mut companion = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
        for i in 1..d {
            companion[(i, i - 1)] = C64::new(1.0, 0.0);
        }
        for i in 0..d {
            companion[(i, d - 1)] = -c[i] / lead;
        }
        let eig = companion.clone().schur().eigenvalues().unwrap_or_else(|| {
            // the complex Schur form is triangular, so this is not expected
            companion.diagonal()
        });
        eig.iter()
            .map(|&r0| {
                let mut r = r0;
                for _ in 0..3 {
                    let dp = self.derivative_eval(r);
                    if dp.norm() == 0.0 {
                        break;
                    }
                    let next = r - self.eval(r) / dp;
                    if !next.is_finite() || self.eval(next).norm() >= self.eval(r).norm() {
                        break;
                    }
                    r = next;
                }
                r
            })
            .collect()
    }

    /// Resultant as the determinant of the Sylvester matrix of the two
    /// polynomials, each first scaled to unit max-coefficient.
    pub fn resultant(&self, other: &Polynomial) -> C64 {
        let a = normalized(&self.trimmed());
        let b = normalized(&other.trimmed());
        let (m, n) = (a.len() - 1, b.len() - 1);
        if m == 0 && n == 0 {
            return C64::new(1.0, 0.0);
        }
        let size = m + n;
        let mut s = DMatrix::from_element(size, size, C64::new(0.0, 0.0));
        // rows hold descending coefficients, shifted
        for i in 0..n {
            for (j, c) in a.iter().rev().enumerate() {
                s[(i, i + j)] = *c;
            }
        }
        for i in 0..m {
            for (j, c) in b.iter().rev().enumerate() {
                s[(n + i, i + j)] = *c;
            }
        }
        s.determinant()
    }
}

fn normalized(c: &[C64]) -> Vec<C64> {
    let scale = c.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return vec![C64::new(0.0, 0.0)];
    }
    c.iter().map(|x| x / scale).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RationalForm {
    pub p: Polynomial,
    pub q: Polynomial,
    pub degree_bound: usize,
}

impl RationalForm {
    pub fn eval(&self, z: C64) -> C64 {
        self.p.eval(z) / self.q.eval(z)
    }
}

/// `sum_k c_k B_k` over the Takenaka-Malmquist functions of distinct `tuple`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeForm {
    pub coefficients: Vec<C64>,
    pub tuple: Vec<C64>,
}

impl BlaschkeForm {
    pub fn new(coefficients: Vec<C64>, tuple: Vec<C64>) -> Result<Self> {
        if coefficients.len() != tuple.len() {
            return Err(Error::LengthMismatch {
                left: coefficients.len(),
                right: tuple.len(),
            });
        }
        if let Some(w) = tuple.iter().find(|w| w.norm() >= 1.0) {
            return Err(Error::OutOfDomain {
                modulus: w.norm(),
                bound: 1.0,
            });
        }
        Ok(Self { coefficients, tuple })
    }

    pub fn n(&self) -> usize {
        self.tuple.len()
    }

    pub fn is_n_degenerate(&self) -> bool {
        self.coefficients.last().is_some_and(|c| *c != C64::new(0.0, 0.0))
    }

    /// Direct pointwise evaluation of `sum_k c_k B_k(z)`.
    pub fn eval(&self, z: C64) -> C64 {
        let one = C64::new(1.0, 0.0);
        let mut prefix = one;
        let mut out = C64::new(0.0, 0.0);
        for (c, &w) in self.coefficients.iter().zip(&self.tuple) {
            let denom = one - w.conj() * z;
            out += c * prefix * (1.0 - w.norm_sqr()).sqrt() / denom;
            prefix *= (z - w) / denom;
        }
        out
    }
}

/// Expands a Blaschke form over a common denominator `prod (1 - conj(w_k) z)`.
pub fn tm_to_rational(form: &BlaschkeForm) -> Result<RationalForm> {
    let n = form.n();
    for i in 0..n {
        if form.tuple[..i].contains(&form.tuple[i]) {
            return Err(Error::DegenerateTuple(format!("parameter {} repeats", form.tuple[i])));
        }
    }
    let one = C64::new(1.0, 0.0);
    let factor = |w: C64| Polynomial::new(vec![one, -w.conj()]);
    let zero_at = |w: C64| Polynomial::new(vec![-w, one]);

    let q = form.tuple.iter().fold(Polynomial::constant(one), |acc, &w| acc.mul(&factor(w)));
    let mut p = Polynomial::new(vec![C64::new(0.0, 0.0)]);
    for (k, (&c, &w)) in form.coefficients.iter().zip(&form.tuple).enumerate() {
        let mut term = Polynomial::constant(c * (1.0 - w.norm_sqr()).sqrt());
        for &wl in &form.tuple[..k] {
            term = term.mul(&zero_at(wl));
        }
        for &wl in &form.tuple[k + 1..] {
            term = term.mul(&factor(wl));
        }
        p = p.add(&term);
    }
    Ok(RationalForm { p, q, degree_bound: n })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroFree {
    Yes,
    No,
    /// Some root lies within the boundary band of the unit circle.
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    pub coprime: bool,
    pub resultant: f64,
    pub zero_free: ZeroFree,
    pub min_root_modulus: Option<f64>,
    pub degree_p: usize,
    pub degree_q: usize,
    pub degrees_ok: bool,
    pub failures: Vec<String>,
}

impl AdmissibilityReport {
    pub fn is_admissible(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks coprimality, absence of denominator zeros in the closed disc, and
/// the degree bounds `deg p, deg q <= n`.
pub fn admissible(form: &RationalForm, n: usize) -> AdmissibilityReport {
    let mut failures = Vec::new();
    let resultant = form.p.resultant(&form.q).norm();
    let coprime = resultant > COPRIME_FLOOR;
    if !coprime {
        failures.push(format!("p and q share a root (|resultant| = {resultant:.3e})"));
    }

    let roots = form.q.roots();
    let min_root_modulus = roots.iter().map(|r| r.norm()).reduce(f64::min);
    let zero_free = if form.q.is_zero() {
        ZeroFree::No
    } else {
        match min_root_modulus {
            None => ZeroFree::Yes,
            Some(m) if m > 1.0 + BOUNDARY_BAND => ZeroFree::Yes,
            Some(m) if m <= 1.0 - BOUNDARY_BAND => ZeroFree::No,
            Some(_) => ZeroFree::Indeterminate,
        }
    };
    match zero_free {
        ZeroFree::Yes => {}
        ZeroFree::No => failures.push("q vanishes in the closed unit disc".into()),
        ZeroFree::Indeterminate => failures.push("q has a root on the unit circle within tolerance".into()),
    }

    let (degree_p, degree_q) = (form.p.degree(), form.q.degree());
    let degrees_ok = degree_p <= n && degree_q <= n;
    if !degrees_ok {
        failures.push(format!("degrees ({degree_p}, {degree_q}) exceed {n}"));
    }
    AdmissibilityReport {
        coprime,
        resultant,
        zero_free,
        min_root_modulus,
        degree_p,
        degree_q,
        degrees_ok,
        failures,
    }
}

/// Series of `prod (z - w_l)/(1 - conj(w_l) z)`, repeated points included.
pub fn blaschke_product(tuple: &ParameterTuple, len: usize) -> PowerSeries {
    tuple
        .points()
        .iter()
        .fold(PowerSeries::constant(len, C64::new(1.0, 0.0)), |acc, &w| acc.mul_blaschke_factor(w))
}

/// Re-expresses a Hardy n-best result with distinct parameters as the
/// Blaschke form `sum_k <f, B_k> B_k` over the explicit TM functions.
pub fn blaschke_form_of(f: &PowerSeries, spec: &SpaceSpec, result: &ApproxResult) -> Result<BlaschkeForm> {
    let tm = tm_closed_form(spec, &result.parameters)?;
    let coefficients = tm
        .iter()
        .map(|b| spec.inner_product(f, b))
        .collect::<Result<Vec<_>>>()?;
    BlaschkeForm::new(coefficients, result.parameters.points().to_vec())
}
