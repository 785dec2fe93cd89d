//! Target functions: explicit Taylor data, pole/residue rational functions,
//! and a small builtin corpus.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{PowerSeries, C64};
use crate::space::SpaceSpec;

/// Complex numbers travel as `[re, im]` pairs.
pub mod complex_json {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(raw.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Builtin {
    /// `1/(z - 2)`
    F1,
    /// `1/(z^2 - 2z + 2)`, poles `1 +- i`
    F2,
    /// Three Szego kernels at fixed interior points
    F3,
    /// `z`
    F4,
}

impl Builtin {
    pub const ALL: [Builtin; 4] = [Builtin::F1, Builtin::F2, Builtin::F3, Builtin::F4];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::F1 => "f1",
            Builtin::F2 => "f2",
            Builtin::F3 => "f3",
            Builtin::F4 => "f4",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown builtin target `{s}` (expected f1..f4)")))
    }

    /// Parameters and coefficients of `f3 = sum_k c_k / (1 - conj(a_k) z)`.
    pub fn f3_data() -> ([C64; 3], [C64; 3]) {
        (
            [C64::new(0.5, 0.0), C64::new(-0.4, 0.3), C64::new(-0.2, -0.6)],
            [C64::new(1.0, 0.0), C64::new(0.6, -0.2), C64::new(0.0, -0.4)],
        )
    }

    pub fn series(self, len: usize) -> PowerSeries {
        match self {
            Builtin::F1 => rational_series(len, &[C64::new(2.0, 0.0)], &[C64::new(1.0, 0.0)]),
            Builtin::F2 => {
                let r = C64::new(0.0, -0.5); // 1/(2i)
                rational_series(len, &[C64::new(1.0, 1.0), C64::new(1.0, -1.0)], &[r, -r])
            }
            Builtin::F3 => {
                let (a, c) = Self::f3_data();
                let mut out = PowerSeries::zeros(len);
                for (a, c) in a.iter().zip(c) {
                    let mut w = C64::new(1.0, 0.0);
                    for coeff in out.coeffs_mut() {
                        *coeff += c * w;
                        w *= a.conj();
                    }
                }
                out
            }
            Builtin::F4 => PowerSeries::monomial(len, 1),
        }
    }
}

/// Series of `sum_k r_k / (z - p_k)` with `|p_k| > 1`.
pub fn rational_series(len: usize, poles: &[C64], residues: &[C64]) -> PowerSeries {
    let mut out = PowerSeries::zeros(len);
    for (&p, &r) in poles.iter().zip(residues) {
        // r/(z - p) = -(r/p) sum (z/p)^k
        let inv = p.inv();
        let mut term = -r * inv;
        for coeff in out.coeffs_mut() {
            *coeff += term;
            term *= inv;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum TargetSpec {
    Taylor(#[serde(with = "complex_json")] Vec<C64>),
    Rational(RationalTarget),
    Builtin(Builtin),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RationalTarget {
    #[serde(with = "complex_json")]
    pub poles: Vec<C64>,
    #[serde(with = "complex_json")]
    pub residues: Vec<C64>,
}

impl TargetSpec {
    pub fn validate(&self, spec: &SpaceSpec) -> Result<()> {
        match self {
            TargetSpec::Taylor(c) => {
                if c.is_empty() {
                    return Err(Error::InvalidConfig("target.taylor: coefficient list is empty".into()));
                }
                if c.len() > spec.truncation() {
                    return Err(Error::InvalidConfig(format!(
                        "target.taylor: {} coefficients exceed truncation {}",
                        c.len(),
                        spec.truncation()
                    )));
                }
                if let Some(i) = c.iter().position(|x| !x.is_finite()) {
                    return Err(Error::InvalidConfig(format!("target.taylor[{i}] is not finite")));
                }
            }
            TargetSpec::Rational(r) => {
                if r.poles.len() != r.residues.len() {
                    return Err(Error::InvalidConfig(format!(
                        "target.rational: {} poles but {} residues",
                        r.poles.len(),
                        r.residues.len()
                    )));
                }
                if r.poles.is_empty() {
                    return Err(Error::InvalidConfig("target.rational.poles is empty".into()));
                }
                if let Some(i) = r.poles.iter().position(|p| !(p.norm() > 1.0) || !p.is_finite()) {
                    return Err(Error::InvalidConfig(format!(
                        "target.rational.poles[{i}] must lie outside the closed unit disc"
                    )));
                }
                if let Some(i) = r.residues.iter().position(|x| !x.is_finite()) {
                    return Err(Error::InvalidConfig(format!("target.rational.residues[{i}] is not finite")));
                }
            }
            TargetSpec::Builtin(_) => {}
        }
        Ok(())
    }

    /// Coefficient series of length `spec.truncation()`.
    pub fn series(&self, spec: &SpaceSpec) -> Result<PowerSeries> {
        self.validate(spec)?;
        let n = spec.truncation();
        Ok(match self {
            TargetSpec::Taylor(c) => PowerSeries::from_leading(n, c),
            TargetSpec::Rational(r) => rational_series(n, &r.poles, &r.residues),
            TargetSpec::Builtin(b) => b.series(n),
        })
    }
}
