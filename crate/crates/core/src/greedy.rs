//! rho-weak pre-orthogonal adaptive Fourier decomposition (rho-Weak-POAFD).
//!
//! At each step the next parameter `b` is chosen so that the incremental
//! energy `|<f, B^b_{n+1}>|` is at least `rho` times its supremum, where
//! `B^b_{n+1}` is the element added to the current orthonormal system by
//! `E~_b`. The supremum is taken over a polar grid; with `rho = 1` the grid
//! winner is refined locally.

use rayon::prelude::*;

use crate::dict::{normalized_kernel, DEFAULT_MERGE_DELTA};
use crate::error::{Error, Result};
use crate::nbest::{ApproxResult, Diagnostics};
use crate::optim::NelderMead;
use crate::ortho::{extend, OrthoSystem};
use crate::series::{PowerSeries, C64};
use crate::space::SpaceSpec;

/// Gains at points whose relative normalization denominator is below this
/// are reported as zero in grid scans (0/0 near existing parameters).
const FIELD_DENOM_FLOOR: f64 = 1e-5;

/// Relative tolerance under which grid gains count as tied.
const TIE_TOL: f64 = 1e-12;

/// Polar grid `r_i e^{2 pi i j / A}`, enumerated radius-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarGrid {
    radii: Vec<f64>,
    angular: usize,
}

impl PolarGrid {
    /// `radial` Chebyshev-Lobatto radii on `[0, r_max]` by `angular` angles.
    pub fn chebyshev(radial: usize, angular: usize, r_max: f64) -> Result<Self> {
        if radial < 4 || angular < 4 {
            return Err(Error::InvalidConfig(format!(
                "grid counts must be at least 4, got {radial}x{angular}"
            )));
        }
        let radii = (0..radial)
            .map(|i| {
                let t = std::f64::consts::PI * i as f64 / (radial - 1) as f64;
                0.5 * r_max * (1.0 - t.cos())
            })
            .collect();
        Ok(Self { radii, angular })
    }

    pub fn with_radii(radii: Vec<f64>, angular: usize) -> Result<Self> {
        if radii.is_empty() || angular == 0 {
            return Err(Error::EmptyGrid);
        }
        if radii.iter().any(|r| !(*r >= 0.0 && *r < 1.0)) {
            return Err(Error::InvalidConfig("grid radii must lie in [0, 1)".into()));
        }
        Ok(Self { radii, angular })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn angular(&self) -> usize {
        self.angular
    }

    pub fn len(&self) -> usize {
        self.radii.len() * self.angular
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn max_radius(&self) -> f64 {
        self.radii.iter().copied().fold(0.0, f64::max)
    }

    pub fn points(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.len());
        for &r in &self.radii {
            for j in 0..self.angular {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / self.angular as f64;
                out.push(C64::from_polar(r, theta));
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct GreedyConfig {
    pub rho: f64,
    pub grid: PolarGrid,
    pub n_terms: usize,
    pub delta: f64,
    /// Local refinement of the grid winner (only used when `rho == 1`).
    pub refine: bool,
    /// Stop once the residual norm falls below this.
    pub stop_tol: f64,
}

impl GreedyConfig {
    /// Defaults: `rho = 1`, 64 x 128 Chebyshev polar grid on `[0, r_max]`.
    pub fn new(spec: &SpaceSpec, n_terms: usize) -> Self {
        Self {
            rho: 1.0,
            grid: PolarGrid::chebyshev(64, 128, spec.r_max()).expect("default grid is valid"),
            n_terms,
            delta: DEFAULT_MERGE_DELTA,
            refine: true,
            stop_tol: 1e-12,
        }
    }

    pub fn validate(&self, spec: &SpaceSpec) -> Result<()> {
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(Error::InvalidConfig(format!("rho {} must lie in (0, 1]", self.rho)));
        }
        if self.grid.max_radius() > spec.r_max() {
            return Err(Error::InvalidConfig(format!(
                "grid radius {} exceeds r_max {}",
                self.grid.max_radius(),
                spec.r_max()
            )));
        }
        if !(self.delta > 0.0) {
            return Err(Error::InvalidConfig("delta must be positive".into()));
        }
        Ok(())
    }
}

/// `|<f, B^b_{n+1}>|`, computed through [`extend`].
pub fn energy_gain(f_residual: &PowerSeries, system: &OrthoSystem, b: C64) -> Result<f64> {
    let (next, _) = extend(system, b)?;
    Ok(system.spec().inner_product(f_residual, &next)?.norm())
}

/// Pointwise form of the incremental energy for a fixed system and residual:
/// `|g(b)| / sqrt(K(b,b) - sum_t |B_t(b)|^2)` with the truncated-series
/// kernel diagonal, which equals [`energy_gain`] away from the existing
/// parameters.
pub struct GainField<'a> {
    system: &'a OrthoSystem,
    residual: PowerSeries,
    delta: f64,
}

impl<'a> GainField<'a> {
    pub fn new(f: &PowerSeries, system: &'a OrthoSystem, delta: f64) -> Result<Self> {
        let (_, residual) = system.project(f)?;
        Ok(Self {
            system,
            residual,
            delta,
        })
    }

    pub fn residual(&self) -> &PowerSeries {
        &self.residual
    }

    pub fn is_excluded(&self, b: C64) -> bool {
        self.system
            .source()
            .points()
            .iter()
            .any(|&p| (p - b).norm() <= self.delta)
    }

    /// `None` for excluded points (within `delta` of an existing parameter).
    pub fn gain(&self, b: C64) -> Option<f64> {
        if self.is_excluded(b) {
            return None;
        }
        let spec = self.system.spec();
        let r2 = b.norm_sqr();
        let mut kbb = 0.0;
        let mut power = 1.0;
        for h in spec.series_weights() {
            kbb += power / h;
            power *= r2;
        }
        let captured: f64 = self
            .system
            .basis()
            .iter()
            .map(|bt| bt.eval_unchecked(b).norm_sqr())
            .sum();
        let rel = 1.0 - captured / kbb;
        if !(rel > FIELD_DENOM_FLOOR * FIELD_DENOM_FLOOR) {
            return Some(0.0);
        }
        Some(self.residual.eval_unchecked(b).norm() / (kbb * rel).sqrt())
    }
}

/// Outcome of one selection step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub point: C64,
    pub grid_index: usize,
    /// Field value at the selected grid point.
    pub gain: f64,
    /// Largest field value over the admissible grid points.
    pub grid_max: f64,
}

fn select_on_grid(field: &GainField<'_>, grid: &PolarGrid, rho: f64) -> Result<Selection> {
    let points = grid.points();
    let gains: Vec<Option<f64>> = points.par_iter().map(|&b| field.gain(b)).collect();
    let grid_max = gains
        .iter()
        .flatten()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    if grid_max == f64::NEG_INFINITY {
        return Err(Error::EmptyGrid);
    }
    let threshold = if rho >= 1.0 {
        grid_max * (1.0 - TIE_TOL)
    } else {
        rho * grid_max
    };
    let (grid_index, gain) = gains
        .iter()
        .enumerate()
        .find_map(|(i, g)| g.filter(|&g| g >= threshold).map(|g| (i, g)))
        .ok_or(Error::EmptyGrid)?;
    Ok(Selection {
        point: points[grid_index],
        grid_index,
        gain,
        grid_max,
    })
}

/// Grid point whose gain is at least `rho` times the grid maximum: the first
/// such point in radius-major order. With `rho = 1` this is the arg-max with
/// ties going to the smallest radial, then angular index.
pub fn select_next(f: &PowerSeries, system: &OrthoSystem, cfg: &GreedyConfig) -> Result<C64> {
    select_next_detailed(f, system, cfg).map(|s| s.point)
}

pub fn select_next_detailed(f: &PowerSeries, system: &OrthoSystem, cfg: &GreedyConfig) -> Result<Selection> {
    let field = GainField::new(f, system, cfg.delta)?;
    select_on_grid(&field, &cfg.grid, cfg.rho)
}

/// Maximizes the gain field locally from `start`, staying inside
/// `|b| <= r_max` and away from existing parameters.
pub(crate) fn refine_point(field: &GainField<'_>, start: C64, r_max: f64, step: f64) -> (C64, f64) {
    let objective = |p: [f64; 2]| {
        let b = C64::new(p[0], p[1]);
        if b.norm() > r_max {
            return 0.0;
        }
        -field.gain(b).unwrap_or(0.0)
    };
    let nm = NelderMead {
        initial_step: step,
        max_evals: 300,
        xtol: 1e-13,
    };
    let start_value = -objective([start.re, start.im]);
    let (p, v) = nm.minimize(objective, [start.re, start.im]);
    if -v > start_value {
        (C64::new(p[0], p[1]), -v)
    } else {
        (start, start_value)
    }
}

pub(crate) fn refinement_step(grid: &PolarGrid) -> f64 {
    let radial = grid.radii().len().max(2) as f64;
    (grid.max_radius() / radial).max(1e-4)
}

/// Runs `n_terms` selection steps (fewer if the residual vanishes first).
pub fn poafd(f: &PowerSeries, spec: &SpaceSpec, cfg: &GreedyConfig) -> Result<ApproxResult> {
    poafd_steps(f, spec, cfg, true)
}

pub(crate) fn poafd_steps(
    f: &PowerSeries,
    spec: &SpaceSpec,
    cfg: &GreedyConfig,
    stop_early: bool,
) -> Result<ApproxResult> {
    cfg.validate(spec)?;
    if cfg.n_terms == 0 {
        return Err(Error::InvalidConfig("n_terms must be at least 1".into()));
    }
    let mut system = OrthoSystem::empty(spec);
    let mut residual_norm = spec.norm(f)?;
    let mut trace = vec![residual_norm];
    let mut diagnostics = Diagnostics::default();
    let step = refinement_step(&cfg.grid);

    for _ in 0..cfg.n_terms {
        if stop_early && residual_norm < cfg.stop_tol {
            break;
        }
        let field = GainField::new(f, &system, cfg.delta)?;
        let selection = select_on_grid(&field, &cfg.grid, cfg.rho)?;
        let mut point = selection.point;
        let mut gain = energy_gain(field.residual(), &system, point)?;
        if cfg.refine && cfg.rho >= 1.0 {
            let (refined, _) = refine_point(&field, point, spec.r_max(), step);
            if refined != point {
                if let Ok(g) = energy_gain(field.residual(), &system, refined) {
                    if g > gain {
                        point = refined;
                        gain = g;
                    }
                }
            }
        }
        system.push_kernel(normalized_kernel(spec, point, 0)?)?;
        let (_, residual) = system.project(f)?;
        residual_norm = spec.norm(&residual)?;
        trace.push(residual_norm);
        diagnostics.gains.push(gain);
        diagnostics.grid_max_gains.push(selection.grid_max);
    }
    diagnostics.effective_n = system.len();
    ApproxResult::from_system(f, &system, trace, diagnostics)
}
