//! Shared helpers and independent reference computations for the
//! integration tests. Nothing here calls into the library's numerics.

#![allow(dead_code)]

use num_complex::Complex64 as C64;
use proptest::prelude::*;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Direct sum `sum_k c_k w^k`.
pub fn poly_eval(coeffs: &[C64], w: C64) -> C64 {
    let mut out = C64::new(0.0, 0.0);
    let mut p = C64::new(1.0, 0.0);
    for &ck in coeffs {
        out += ck * p;
        p *= w;
    }
    out
}

/// `f^{(m)}(w)` by termwise differentiation.
pub fn poly_derivative(coeffs: &[C64], m: usize, w: C64) -> C64 {
    let mut out = C64::new(0.0, 0.0);
    for (k, &ck) in coeffs.iter().enumerate().skip(m) {
        let falling: f64 = (0..m).map(|j| (k - j) as f64).product();
        out += ck * falling * w.powu((k - m) as u32);
    }
    out
}

/// Truncated Cauchy product.
pub fn convolve(a: &[C64], b: &[C64], len: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if *x == C64::new(0.0, 0.0) {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Coefficients of `1/(1 - conj(w) z)`.
pub fn szego(w: C64, len: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(len);
    let mut p = C64::new(1.0, 0.0);
    for _ in 0..len {
        out.push(p);
        p *= w.conj();
    }
    out
}

/// Coefficients of `(z - w)/(1 - conj(w) z)`.
pub fn blaschke_factor(w: C64, len: usize) -> Vec<C64> {
    let mut num = vec![C64::new(0.0, 0.0); len];
    num[0] = -w;
    num[1] = C64::new(1.0, 0.0);
    convolve(&num, &szego(w, len), len)
}

/// Takenaka-Malmquist functions built from scratch.
pub fn tm_reference(points: &[C64], len: usize) -> Vec<Vec<C64>> {
    let mut prefix = vec![C64::new(0.0, 0.0); len];
    prefix[0] = C64::new(1.0, 0.0);
    let mut out = Vec::new();
    for &w in points {
        let k: Vec<C64> = szego(w, len).into_iter().map(|x| x * (1.0 - w.norm_sqr()).sqrt()).collect();
        out.push(convolve(&prefix, &k, len));
        prefix = convolve(&prefix, &blaschke_factor(w, len), len);
    }
    out
}

/// Max coefficient error after aligning `a` to `b` by the unimodular phase of `<a, b>`.
pub fn phase_aligned_error(a: &[C64], b: &[C64]) -> f64 {
    let ip: C64 = a.iter().zip(b).map(|(x, y)| x * y.conj()).sum();
    let phase = if ip.norm() > 0.0 { ip.conj() / ip.norm() } else { C64::new(1.0, 0.0) };
    a.iter().zip(b).map(|(x, y)| (x * phase - y).norm()).fold(0.0, f64::max)
}

/// Bergman/Hardy weights by the Beta-function ratio recurrence, kept separate
/// from the library on purpose.
pub fn weights(alpha: Option<f64>, len: usize) -> Vec<f64> {
    match alpha {
        None => vec![1.0; len],
        Some(a) => {
            let mut h = vec![1.0; len];
            for k in 1..len {
                h[k] = h[k - 1] * k as f64 / (k as f64 + 1.0 + a);
            }
            h
        }
    }
}

pub fn arb_complex(scale: f64) -> impl Strategy<Value = C64> {
    (-scale..scale, -scale..scale).prop_map(|(re, im)| C64::new(re, im))
}

/// Uniform over the disc of radius `r`.
pub fn arb_disc(r: f64) -> impl Strategy<Value = C64> {
    (0.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(move |(u, t)| C64::from_polar(r * u.sqrt(), t))
}

pub fn arb_poly(max_degree: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(arb_complex(1.0), 1..=max_degree + 1)
}

/// `n` points in the disc of radius `r` with pairwise distance at least `sep`,
/// by rejection; `None` if the draw failed.
pub fn separated_points(draws: &[C64], n: usize, sep: f64) -> Option<Vec<C64>> {
    let mut out: Vec<C64> = Vec::new();
    for &p in draws {
        if out.iter().all(|q| (q - p).norm() >= sep) {
            out.push(p);
            if out.len() == n {
                return Some(out);
            }
        }
    }
    None
}
