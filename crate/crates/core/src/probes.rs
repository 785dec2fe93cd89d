//! Numerical probes of the boundary conditions behind interior attainment:
//! decay of normalized-kernel inner products toward the circle, decay of
//! target projections, and the vanishing of the next orthonormal
//! coefficient when one parameter runs to the boundary.

use crate::dict::{normalized_kernel, ParameterTuple};
use crate::error::{Error, Result};
use crate::nbest::ApproxResult;
use crate::ortho::{extend, gram_schmidt};
use crate::series::{PowerSeries, C64};
use crate::space::SpaceSpec;

/// Points approaching the circle along a fixed direction with strictly
/// increasing moduli, all inside the parameter domain.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySequence {
    points: Vec<C64>,
    theta: f64,
}

impl BoundarySequence {
    /// Radii `1 - 2^{-j}` for `j = 0, 1, ...` while below `r_max`, closed by `r_max` itself.
    pub fn radial(theta: f64, r_max: f64) -> Result<Self> {
        if !(r_max > 0.0 && r_max < 1.0) {
            return Err(Error::InvalidConfig(format!("r_max {r_max} must lie in (0, 1)")));
        }
        let mut radii = Vec::new();
        for j in 0..60 {
            let r = 1.0 - 0.5f64.powi(j);
            if r >= r_max {
                break;
            }
            radii.push(r);
        }
        radii.push(r_max);
        Self::from_radii(theta, &radii)
    }

    pub fn from_radii(theta: f64, radii: &[f64]) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidConfig("boundary sequence needs at least one radius".into()));
        }
        if radii.iter().any(|&r| !(0.0..1.0).contains(&r)) || radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig(
                "radii must be strictly increasing within [0, 1)".into(),
            ));
        }
        Ok(Self {
            points: radii.iter().map(|&r| C64::from_polar(r, theta)).collect(),
            theta,
        })
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn radii(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.norm()).collect()
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `|<E~_z, E~_{w_j}>|` along the sequence.
pub fn dbvc_probe(spec: &SpaceSpec, z: C64, seq: &BoundarySequence) -> Result<Vec<f64>> {
    let ez = normalized_kernel(spec, z, 0)?;
    seq.points()
        .iter()
        .map(|&w| {
            let ew = normalized_kernel(spec, w, 0)?;
            Ok(spec.inner_unchecked(&ez.series, &ew.series).norm())
        })
        .collect()
}

/// `|<f, E~_{w_j}>|` along the sequence.
pub fn bvc_probe(f: &PowerSeries, spec: &SpaceSpec, seq: &BoundarySequence) -> Result<Vec<f64>> {
    spec.norm_sq(f)?;
    seq.points()
        .iter()
        .map(|&w| {
            let ew = normalized_kernel(spec, w, 0)?;
            Ok(spec.inner_unchecked(f, &ew.series).norm())
        })
        .collect()
}

/// `|<h, B^{w_j}>|` where `B^{w_j}` extends the orthonormal system of
/// `fixed` by `w_j`. Degenerate extensions yield `None`.
pub fn vanishing_probe(
    h: &PowerSeries,
    spec: &SpaceSpec,
    fixed: &ParameterTuple,
    seq: &BoundarySequence,
) -> Result<Vec<Option<f64>>> {
    spec.norm_sq(h)?;
    let system = gram_schmidt(spec, fixed)?;
    seq.points()
        .iter()
        .map(|&w| match extend(&system, w) {
            Ok((next, _)) => Ok(Some(spec.inner_unchecked(h, &next).norm())),
            Err(Error::DegenerateSystem { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect()
}

/// Distance from the largest parameter modulus to `r_max`.
pub fn interior_margin(result: &ApproxResult) -> f64 {
    (result.r_max - result.parameters.max_modulus()).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nbest::Diagnostics;

    fn hardy() -> SpaceSpec {
        SpaceSpec::hardy(512, 0.95).unwrap()
    }

    #[test]
    fn radial_sequence_is_clipped() {
        let seq = BoundarySequence::radial(0.3, 0.95).unwrap();
        let r = seq.radii();
        assert_eq!(r.len(), 6);
        assert!((r[0]).abs() < 1e-15 && (r[4] - 0.9375).abs() < 1e-15);
        assert!((r[5] - 0.95).abs() < 1e-15);
        assert!(BoundarySequence::from_radii(0.0, &[0.5, 0.5]).is_err());
        assert!(BoundarySequence::from_radii(0.0, &[1.0]).is_err());
    }

    #[test]
    fn dbvc_examples() {
        let spec = hardy();
        let seq = BoundarySequence::from_radii(0.7, &[0.0, 0.9]).unwrap();
        let v = dbvc_probe(&spec, C64::new(0.0, 0.0), &seq).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-14);
        assert!((v[1] - 0.19f64.sqrt()).abs() < 1e-12);

        let berg = SpaceSpec::bergman(0.0, 512, 0.95).unwrap();
        let v = dbvc_probe(&berg, C64::new(0.0, 0.0), &seq).unwrap();
        assert!((v[1] - 0.19).abs() < 1e-12);
    }

    #[test]
    fn bvc_examples() {
        let spec = hardy();
        let seq = BoundarySequence::radial(1.2, 0.95).unwrap();
        let one = bvc_probe(&PowerSeries::constant(512, C64::new(1.0, 0.0)), &spec, &seq).unwrap();
        let z = bvc_probe(&PowerSeries::monomial(512, 1), &spec, &seq).unwrap();
        for (r, (a, b)) in seq.radii().iter().zip(one.iter().zip(&z)) {
            assert!((a - (1.0 - r * r).sqrt()).abs() < 1e-12);
            assert!((b - r * (1.0 - r * r).sqrt()).abs() < 1e-12);
        }
        assert!(bvc_probe(&spec.zeros(), &spec, &seq).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn vanishing_examples() {
        let spec = hardy();
        let seq = BoundarySequence::from_radii(0.4, &[0.5, 0.6, 0.75, 0.85, 0.9, 0.95]).unwrap();
        let origin = ParameterTuple::from_reals(&[0.0]);

        let one = PowerSeries::constant(512, C64::new(1.0, 0.0));
        let v = vanishing_probe(&one, &spec, &origin, &seq).unwrap();
        assert!(v.iter().all(|x| x.unwrap() < 1e-14));

        // <z^2, z e_w> = w sqrt(1 - |w|^2), decreasing past 1/sqrt(2)
        let z2 = PowerSeries::monomial(512, 2);
        let v: Vec<f64> = vanishing_probe(&z2, &spec, &origin, &seq).unwrap().into_iter().map(Option::unwrap).collect();
        for (r, x) in seq.radii().iter().zip(&v) {
            assert!((x - r * (1.0 - r * r).sqrt()).abs() < 1e-12);
        }
        assert!(v[2..].windows(2).all(|w| w[1] < w[0]));

        let empty = vanishing_probe(&z2, &spec, &ParameterTuple::empty(), &seq).unwrap();
        let direct = bvc_probe(&z2, &spec, &seq).unwrap();
        for (a, b) in empty.iter().zip(&direct) {
            assert!((a.unwrap() - b).abs() < 1e-14);
        }

        let through_origin = BoundarySequence::from_radii(0.0, &[0.0, 0.5]).unwrap();
        let v = vanishing_probe(&z2, &spec, &origin, &through_origin).unwrap();
        assert!(v[0].is_none() && v[1].is_some());
    }

    #[test]
    fn margin_examples() {
        let spec = hardy();
        let mk = |pts: Vec<C64>| ApproxResult {
            parameters: ParameterTuple::new(pts),
            coefficients: vec![],
            projection: vec![],
            residual_norm: 0.0,
            objective_trace: vec![],
            interior_margin: 0.0,
            gram_min_eig: 1.0,
            r_max: spec.r_max(),
            diagnostics: Diagnostics::default(),
        };
        let r = mk(vec![C64::new(0.3, 0.0), C64::new(0.0, -0.4)]);
        assert!((interior_margin(&r) - 0.55).abs() < 1e-15);
        assert_eq!(interior_margin(&mk(vec![C64::from_polar(0.95, 2.0)])), 0.0);
    }
}
