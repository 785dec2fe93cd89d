//! Simultaneous n-best kernel approximation.
//!
//! Minimizes `A(f; a) = ||f - sum_t <f, B_t> B_t||` over parameter tuples
//! `a` in the closed disc of radius `r_max`, where `B_1..B_n` orthonormalize
//! the normalized multiple kernels of `a`. The problem is non-convex, so
//! [`solve`] runs cyclic coordinate descent from several starts and keeps
//! the best; [`brute_force`] is an exhaustive grid oracle for small `n`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dict::{closed_kernel_eval, merge_close, normalized_kernel, ParameterTuple, DEFAULT_MERGE_DELTA};
use crate::error::{Error, Result};
use crate::greedy::{poafd_steps, GreedyConfig, PolarGrid};
use crate::optim::NelderMead;
use crate::ortho::{extend_multiple, gram_schmidt, tuple_kernels, OrthoSystem};
use crate::series::{PowerSeries, C64};
use crate::space::SpaceSpec;

/// Per-run bookkeeping that does not belong to the approximation itself.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    /// Selected incremental energies (greedy runs).
    pub gains: Vec<f64>,
    /// Grid maxima the selections were certified against (greedy runs).
    pub grid_max_gains: Vec<f64>,
    /// Final objective of every start (n-best runs), in start order.
    pub start_objectives: Vec<f64>,
    pub best_start: Option<usize>,
    /// Number of kernels actually used after merging and degeneracy recovery.
    pub effective_n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxResult {
    pub parameters: ParameterTuple,
    /// Coefficients over the unnormalized multiple kernels `K~_{a_k}`.
    pub coefficients: Vec<C64>,
    /// `<f, B_t>` over the orthonormal system.
    pub projection: Vec<C64>,
    pub residual_norm: f64,
    pub objective_trace: Vec<f64>,
    pub interior_margin: f64,
    pub gram_min_eig: f64,
    pub r_max: f64,
    pub diagnostics: Diagnostics,
}

impl ApproxResult {
    pub fn from_system(
        f: &PowerSeries,
        system: &OrthoSystem,
        objective_trace: Vec<f64>,
        mut diagnostics: Diagnostics,
    ) -> Result<Self> {
        let spec = system.spec();
        let (projection, residual) = system.project(f)?;
        let coefficients = system.kernel_coefficients(&projection);
        let parameters = system.source().clone();
        diagnostics.effective_n = system.len();
        Ok(Self {
            interior_margin: (spec.r_max() - parameters.max_modulus()).max(0.0),
            gram_min_eig: system.gram_min_eig(),
            r_max: spec.r_max(),
            residual_norm: spec.norm(&residual)?,
            parameters,
            coefficients,
            projection,
            objective_trace,
            diagnostics,
        })
    }

    /// `||sum_t <f,B_t> B_t||^2`.
    pub fn projection_energy(&self) -> f64 {
        self.projection.iter().map(|c| c.norm_sqr()).sum()
    }
}

#[derive(Debug, Clone)]
pub struct NBestConfig {
    pub n: usize,
    pub starts: usize,
    pub grid: PolarGrid,
    /// Stop cycling once a full cycle lowers the squared objective by less than this.
    pub tol_obj: f64,
    pub max_cycles: usize,
    pub fd_step: f64,
    pub delta: f64,
    pub seed: u64,
    /// Iteration cap of the joint refinement pass.
    pub max_refine_iters: usize,
    /// Additional caller-supplied starting tuples.
    pub extra_starts: Vec<ParameterTuple>,
}

impl NBestConfig {
    pub fn new(spec: &SpaceSpec, n: usize) -> Self {
        Self {
            n,
            starts: 8,
            grid: PolarGrid::chebyshev(64, 128, spec.r_max()).expect("default grid is valid"),
            tol_obj: 1e-12,
            max_cycles: 50,
            fd_step: 1e-7,
            delta: DEFAULT_MERGE_DELTA,
            seed: 0,
            max_refine_iters: 100,
            extra_starts: Vec::new(),
        }
    }

    pub fn validate(&self, spec: &SpaceSpec) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("n must be at least 1".into()));
        }
        if !(self.tol_obj > 0.0) {
            return Err(Error::InvalidConfig("tol_obj must be positive".into()));
        }
        if !(self.fd_step > 1e-9 && self.fd_step < 1e-3) {
            return Err(Error::InvalidConfig(format!(
                "fd_step {} must lie in (1e-9, 1e-3)",
                self.fd_step
            )));
        }
        if !(self.delta > 0.0) {
            return Err(Error::InvalidConfig("delta must be positive".into()));
        }
        if self.grid.max_radius() > spec.r_max() {
            return Err(Error::InvalidConfig("grid exceeds r_max".into()));
        }
        Ok(())
    }

    fn greedy(&self, spec: &SpaceSpec) -> GreedyConfig {
        GreedyConfig {
            grid: self.grid.clone(),
            n_terms: self.n,
            delta: self.delta,
            ..GreedyConfig::new(spec, self.n)
        }
    }
}

/// `A(f; a)`, the norm of the residual after projecting onto the multiple
/// kernels of `tuple`. The tuple is used as given (apply [`merge_close`] first).
pub fn objective(f: &PowerSeries, spec: &SpaceSpec, tuple: &ParameterTuple) -> Result<f64> {
    tuple.check_domain(spec)?;
    let system = gram_schmidt(spec, tuple)?;
    let (_, residual) = system.project(f)?;
    spec.norm(&residual)
}

/// Central-difference gradient of `A(f; a)^2` with respect to
/// `(Re a_1, Im a_1, ..., Re a_n, Im a_n)`.
pub fn objective_gradient(f: &PowerSeries, spec: &SpaceSpec, tuple: &ParameterTuple, h: f64) -> Result<Vec<f64>> {
    let mut grad = Vec::with_capacity(2 * tuple.len());
    for k in 0..tuple.len() {
        for dir in [C64::new(h, 0.0), C64::new(0.0, h)] {
            let shifted = |sign: f64| {
                let mut pts = tuple.points().to_vec();
                pts[k] += dir * sign;
                objective(f, spec, &ParameterTuple::new(pts)).map(|v| v * v)
            };
            grad.push((shifted(1.0)? - shifted(-1.0)?) / (2.0 * h));
        }
    }
    Ok(grad)
}

/// Merges close points, then orthonormalizes while skipping kernels whose
/// normalization denominator is degenerate (reducing the effective `n`).
fn build_system(spec: &SpaceSpec, tuple: &ParameterTuple, delta: f64) -> Result<OrthoSystem> {
    let merged = merge_close(tuple, delta);
    let mut system = OrthoSystem::empty(spec);
    for (k, &p) in merged.points().iter().enumerate() {
        let order = merged.order(k);
        // a skipped lower order would leave a gap; drop the rest of that cluster
        let have = system.source().points().iter().filter(|&&q| q == p).count();
        if have != order {
            continue;
        }
        let kernel = normalized_kernel(spec, p, order)?;
        match system.push_kernel(kernel) {
            Ok(()) | Err(Error::DegenerateSystem { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(system)
}

struct Evaluation {
    system: OrthoSystem,
    residual: PowerSeries,
    value: f64,
}

fn evaluate(f: &PowerSeries, spec: &SpaceSpec, tuple: &ParameterTuple, delta: f64) -> Result<Evaluation> {
    let system = build_system(spec, tuple, delta)?;
    let (_, residual) = system.project(f)?;
    let value = spec.norm_sq_unchecked(&residual).sqrt();
    Ok(Evaluation {
        system,
        residual,
        value,
    })
}

/// Approximation by a given tuple after merging, with degenerate kernels dropped.
#[derive(Debug, Clone)]
pub struct TupleEvaluation {
    pub approx: ApproxResult,
    pub residual: PowerSeries,
}

pub fn evaluate_tuple(f: &PowerSeries, spec: &SpaceSpec, tuple: &ParameterTuple) -> Result<TupleEvaluation> {
    tuple.check_domain(spec)?;
    let ev = evaluate(f, spec, tuple, DEFAULT_MERGE_DELTA)?;
    let approx = ApproxResult::from_system(f, &ev.system, vec![ev.value], Diagnostics::default())?;
    Ok(TupleEvaluation {
        approx,
        residual: ev.residual,
    })
}

/// Exhaustive minimum of `A(f; .)` over all `n`-multisets of grid points
/// (repeated points become multiplicities). Distinct-point multisets are
/// ranked through the precomputed kernel Gram matrix; the best few and all
/// multisets with repetition are evaluated exactly.
pub fn brute_force(f: &PowerSeries, spec: &SpaceSpec, n: usize, grid: &PolarGrid) -> Result<ApproxResult> {
    if n == 0 || n > 3 {
        return Err(Error::InvalidConfig(format!("brute force supports 1 <= n <= 3, got {n}")));
    }
    let budget: u128 = 10_000_000;
    let required = (grid.len() as u128).pow(n as u32);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let mut points: Vec<C64> = Vec::new();
    for p in grid.points() {
        if !points.contains(&p) {
            points.push(p);
        }
    }
    for &p in &points {
        spec.check_parameter(p)?;
    }
    let m = points.len();
    let kernels: Vec<PowerSeries> = points
        .par_iter()
        .map(|&p| normalized_kernel(spec, p, 0).map(|k| k.series))
        .collect::<Result<_>>()?;
    let beta: Vec<C64> = kernels.iter().map(|e| spec.inner_unchecked(f, e)).collect();
    // gram[i][j] = <E~_j, E~_i>, lower triangle
    let gram: Vec<Vec<C64>> = (0..m)
        .into_par_iter()
        .map(|i| (0..i).map(|j| spec.inner_unchecked(&kernels[j], &kernels[i])).collect())
        .collect();
    let g = |i: usize, j: usize| -> C64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Greater => gram[i][j],
            std::cmp::Ordering::Less => gram[j][i].conj(),
            std::cmp::Ordering::Equal => C64::new(1.0, 0.0),
        }
    };
    let energy = |idx: &[usize]| -> f64 {
        // beta^H G^{-1} beta through a Cholesky factorization
        let k = idx.len();
        let mat = DMatrix::from_fn(k, k, |r, c| g(idx[c], idx[r]));
        let rhs = DVector::from_fn(k, |r, _| beta[idx[r]]);
        match mat.cholesky() {
            Some(ch) => {
                let sol = ch.solve(&rhs);
                rhs.iter().zip(sol.iter()).map(|(b, s)| (b.conj() * s).re).sum()
            }
            None => f64::NEG_INFINITY,
        }
    };

    let mut distinct: Vec<(f64, Vec<usize>)> = match n {
        1 => (0..m).map(|i| (energy(&[i]), vec![i])).collect(),
        2 => (0..m)
            .into_par_iter()
            .flat_map_iter(|i| (0..i).map(move |j| vec![j, i]))
            .map(|idx| (energy(&idx), idx))
            .collect(),
        _ => (0..m)
            .into_par_iter()
            .flat_map_iter(|i| (0..i).flat_map(move |j| (0..j).map(move |l| vec![l, j, i])))
            .map(|idx| (energy(&idx), idx))
            .collect(),
    };
    distinct.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    distinct.truncate(16);

    let mut candidates: Vec<Vec<usize>> = distinct.into_iter().map(|(_, idx)| idx).collect();
    match n {
        2 => candidates.extend((0..m).map(|i| vec![i, i])),
        3 => {
            for i in 0..m {
                candidates.push(vec![i, i, i]);
                for j in 0..m {
                    if j != i {
                        candidates.push(vec![i, i, j]);
                    }
                }
            }
        }
        _ => {}
    }

    let scored: Vec<(f64, usize)> = candidates
        .par_iter()
        .enumerate()
        .map(|(ci, idx)| {
            let tuple = ParameterTuple::new(idx.iter().map(|&i| points[i]).collect());
            let value = gram_schmidt(spec, &tuple)
                .and_then(|s| s.project(f))
                .map(|(_, r)| spec.norm_sq_unchecked(&r).sqrt())
                .unwrap_or(f64::INFINITY);
            (value, ci)
        })
        .collect();
    let (best_value, best) = scored
        .iter()
        .copied()
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .ok_or(Error::EmptyGrid)?;
    if !best_value.is_finite() {
        return Err(Error::DegenerateSystem {
            index: n - 1,
            denominator: 0.0,
        });
    }
    let tuple = ParameterTuple::new(candidates[best].iter().map(|&i| points[i]).collect());
    let system = gram_schmidt(spec, &tuple)?;
    ApproxResult::from_system(f, &system, vec![best_value], Diagnostics::default())
}

/// Closed-form evaluation of the incremental gain for a fixed system, used to
/// rank candidate positions of one coordinate. Exact objectives are always
/// recomputed on the series before a move is accepted.
struct CoordinateField<'a> {
    spec: &'a SpaceSpec,
    f: &'a PowerSeries,
    system: &'a OrthoSystem,
    coeff: DMatrix<C64>,
    projection: Vec<C64>,
    delta: f64,
}

impl<'a> CoordinateField<'a> {
    fn new(spec: &'a SpaceSpec, f: &'a PowerSeries, system: &'a OrthoSystem, delta: f64) -> Result<Self> {
        let (projection, _) = system.project(f)?;
        Ok(Self {
            spec,
            f,
            system,
            coeff: system.coeff_matrix(),
            projection,
            delta,
        })
    }

    fn excluded(&self, b: C64) -> bool {
        self.system
            .source()
            .points()
            .iter()
            .any(|&p| (p - b).norm() <= self.delta)
    }

    fn gain_with(&self, b: C64, fb: C64) -> f64 {
        if self.excluded(b) {
            return 0.0;
        }
        let kernels = self.system.kernels();
        let e: Vec<C64> = kernels
            .iter()
            .map(|k| closed_kernel_eval(self.spec, k.parameter, k.order, b) / k.kernel_norm)
            .collect();
        let mut g = fb;
        let mut captured = 0.0;
        for t in 0..kernels.len() {
            let bt: C64 = (0..=t).map(|s| self.coeff[(t, s)] * e[s]).sum();
            g -= self.projection[t] * bt;
            captured += bt.norm_sqr();
        }
        let s = self.spec.kind().kernel_exponent();
        let kbb = (1.0 - b.norm_sqr()).powf(-s);
        let rel = 1.0 - captured / kbb;
        if !(rel > 1e-10) {
            return 0.0;
        }
        g.norm() / (kbb * rel).sqrt()
    }

    fn gain(&self, b: C64) -> f64 {
        self.gain_with(b, self.f.eval_unchecked(b))
    }
}

fn clamp_to_disc(b: C64, r_max: f64) -> C64 {
    let r = b.norm();
    if r > r_max {
        b * (r_max / r)
    } else {
        b
    }
}

struct Descent<'a> {
    f: &'a PowerSeries,
    spec: &'a SpaceSpec,
    cfg: &'a NBestConfig,
    grid_points: &'a [C64],
    grid_values: &'a [C64],
    refine_step: f64,
}

impl Descent<'_> {
    fn eval(&self, points: &[C64]) -> Option<Evaluation> {
        evaluate(self.f, self.spec, &ParameterTuple::new(points.to_vec()), self.cfg.delta).ok()
    }

    /// Re-optimizes coordinate `k` with the others fixed. Returns the new
    /// points and objective if the objective strictly decreased.
    fn coordinate_step(&self, points: &[C64], k: usize, current: f64) -> Option<(Vec<C64>, f64)> {
        let others: Vec<C64> = points.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &p)| p).collect();
        let base = build_system(self.spec, &ParameterTuple::new(others.clone()), self.cfg.delta).ok()?;
        let field = CoordinateField::new(self.spec, self.f, &base, self.cfg.delta).ok()?;

        let (best_idx, _) = self
            .grid_points
            .par_iter()
            .zip(self.grid_values.par_iter())
            .enumerate()
            .map(|(i, (&b, &fb))| (i, field.gain_with(b, fb)))
            .reduce(|| (usize::MAX, -1.0), |a, b| if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a });

        let mut candidates: Vec<C64> = Vec::new();
        let r_max = self.spec.r_max();
        let nm = NelderMead {
            initial_step: self.refine_step,
            max_evals: 200,
            xtol: 1e-12,
        };
        let mut starts = vec![points[k]];
        if best_idx != usize::MAX {
            starts.push(self.grid_points[best_idx]);
        }
        for start in starts {
            let (p, _) = nm.minimize(
                |x| {
                    let b = C64::new(x[0], x[1]);
                    if b.norm() > r_max {
                        return 0.0;
                    }
                    -field.gain(b)
                },
                [start.re, start.im],
            );
            candidates.push(clamp_to_disc(C64::new(p[0], p[1]), r_max));
            candidates.push(start);
        }
        // snapping onto another parameter raises its multiplicity
        for &(p, _) in base.source().clusters().iter() {
            if extend_multiple(&base, p).is_ok() {
                candidates.push(p);
            }
        }

        let mut best: Option<(Vec<C64>, f64)> = None;
        for b in candidates {
            if b == points[k] {
                continue;
            }
            let mut trial = points.to_vec();
            trial[k] = b;
            if let Some(ev) = self.eval(&trial) {
                let threshold = best.as_ref().map_or(current, |(_, v)| *v);
                if ev.value < threshold {
                    best = Some((trial, ev.value));
                }
            }
        }
        best
    }

    /// Weighted, real-split residual vector `sqrt(h_k) r_k` whose Euclidean
    /// norm is the space norm of the residual.
    fn residual_vector(&self, clusters: &[(C64, usize)]) -> Option<(Vec<f64>, f64)> {
        let tuple = ParameterTuple::from_clusters(clusters);
        let ev = self.eval(tuple.points())?;
        let mut out = Vec::with_capacity(2 * self.spec.truncation());
        for (c, h) in ev.residual.coeffs().iter().zip(self.spec.series_weights()) {
            let s = h.sqrt();
            out.push(c.re * s);
            out.push(c.im * s);
        }
        Some((out, ev.value))
    }

    fn merge_clusters(&self, clusters: Vec<(C64, usize)>) -> Vec<(C64, usize)> {
        let tuple = merge_close(&ParameterTuple::from_clusters(&clusters), self.cfg.delta);
        tuple.clusters()
    }

    /// Levenberg-Marquardt on the cluster centers (multiplicities fixed),
    /// finite-difference Jacobian of the residual vector, projected onto the
    /// disc and merged after every step. Only decreasing steps are taken.
    fn joint_refine(&self, points: Vec<C64>, value: f64, trace: &mut Vec<f64>) -> (Vec<C64>, f64) {
        let r_max = self.spec.r_max();
        let h = self.cfg.fd_step;
        let mut clusters = merge_close(&ParameterTuple::new(points.clone()), self.cfg.delta).clusters();
        let Some((mut r0, mut current)) = self.residual_vector(&clusters) else {
            return (points, value);
        };
        if current > value {
            return (points, value);
        }
        let mut lambda = 1e-3;
        for _ in 0..self.cfg.max_refine_iters {
            if current == 0.0 {
                break;
            }
            let dim = 2 * clusters.len();
            let columns: Vec<Option<Vec<f64>>> = (0..dim)
                .into_par_iter()
                .map(|j| {
                    let dir = if j % 2 == 0 { C64::new(h, 0.0) } else { C64::new(0.0, h) };
                    let shift = |sign: f64| {
                        let mut cl = clusters.clone();
                        cl[j / 2].0 += dir * sign;
                        cl
                    };
                    let (plus, _) = self.residual_vector(&shift(1.0))?;
                    let (minus, _) = self.residual_vector(&shift(-1.0))?;
                    Some(plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * h)).collect())
                })
                .collect();
            let Some(columns) = columns.into_iter().collect::<Option<Vec<_>>>() else {
                break;
            };
            let jtj = DMatrix::from_fn(dim, dim, |a, b| columns[a].iter().zip(&columns[b]).map(|(x, y)| x * y).sum::<f64>());
            let jtr = DVector::from_fn(dim, |a, _| columns[a].iter().zip(&r0).map(|(x, y)| x * y).sum::<f64>());
            let mut improved = false;
            while lambda < 1e12 {
                let mut lhs = jtj.clone();
                for d in 0..dim {
                    lhs[(d, d)] += lambda * (jtj[(d, d)] + 1e-14);
                }
                let Some(step) = lhs.cholesky().map(|c| c.solve(&(-&jtr))) else {
                    lambda *= 10.0;
                    continue;
                };
                let moved: Vec<(C64, usize)> = clusters
                    .iter()
                    .enumerate()
                    .map(|(i, &(c, m))| (clamp_to_disc(c + C64::new(step[2 * i], step[2 * i + 1]), r_max), m))
                    .collect();
                let moved = self.merge_clusters(moved);
                match self.residual_vector(&moved) {
                    Some((r, v)) if v < current => {
                        clusters = moved;
                        r0 = r;
                        let rel_gain = (current - v) / current;
                        current = v;
                        trace.push(v);
                        lambda = (lambda / 3.0).max(1e-12);
                        improved = rel_gain > 1e-14;
                        break;
                    }
                    _ => lambda *= 4.0,
                }
            }
            if !improved {
                break;
            }
        }
        (ParameterTuple::from_clusters(&clusters).points().to_vec(), current)
    }
}

/// Cyclic coordinate descent from `tuple0`, followed by a joint refinement
/// pass. The objective trace is non-increasing.
pub fn cyclic_descent(f: &PowerSeries, spec: &SpaceSpec, tuple0: &ParameterTuple, cfg: &NBestConfig) -> Result<ApproxResult> {
    cfg.validate(spec)?;
    let grid_points = cfg.grid.points();
    let grid_values: Vec<C64> = grid_points.par_iter().map(|&b| f.eval_unchecked(b)).collect();
    descend(f, spec, tuple0, cfg, &grid_points, &grid_values)
}

fn descend(
    f: &PowerSeries,
    spec: &SpaceSpec,
    tuple0: &ParameterTuple,
    cfg: &NBestConfig,
    grid_points: &[C64],
    grid_values: &[C64],
) -> Result<ApproxResult> {
    tuple0.check_domain(spec)?;
    let descent = Descent {
        f,
        spec,
        cfg,
        grid_points,
        grid_values,
        refine_step: crate::greedy::refinement_step(&cfg.grid),
    };
    let mut points = merge_close(tuple0, cfg.delta).points().to_vec();
    if gram_schmidt(spec, &ParameterTuple::new(points.clone())).is_err() {
        points = perturb_coincident(&points, 10.0 * cfg.delta, spec.r_max());
    }
    let mut value = evaluate(f, spec, &ParameterTuple::new(points.clone()), cfg.delta)?.value;
    let mut trace = vec![value];

    for _ in 0..cfg.max_cycles {
        let before = value;
        for k in 0..points.len() {
            if let Some((p, v)) = descent.coordinate_step(&points, k, value) {
                points = p;
                value = v;
            }
        }
        trace.push(value);
        if before * before - value * value < cfg.tol_obj {
            break;
        }
    }

    let (points, _) = descent.joint_refine(points, value, &mut trace);
    let ev = evaluate(f, spec, &ParameterTuple::new(points), cfg.delta)?;
    ApproxResult::from_system(f, &ev.system, trace, Diagnostics::default())
}

/// Spreads exactly coincident points on a small circle of radius `eps`.
fn perturb_coincident(points: &[C64], eps: f64, r_max: f64) -> Vec<C64> {
    let mut out = points.to_vec();
    for k in 0..out.len() {
        let dup = points[..k].iter().filter(|&&p| p == points[k]).count();
        if dup > 0 {
            let theta = 2.0 * std::f64::consts::PI * dup as f64 / points.len() as f64;
            out[k] = clamp_to_disc(points[k] + C64::from_polar(eps, theta), r_max);
        }
    }
    out
}

/// Multi-start n-best driver. Start 0 is the greedy tuple, start 1 places all
/// parameters at the origin (Taylor start), then caller-supplied starts, then
/// seeded random tuples until `starts` is reached. Returns the best
/// descent result; ties go to the lower start index.
pub fn solve(f: &PowerSeries, spec: &SpaceSpec, cfg: &NBestConfig) -> Result<ApproxResult> {
    cfg.validate(spec)?;
    if spec.norm(f)? == 0.0 {
        return Err(Error::ZeroTarget);
    }
    for t in &cfg.extra_starts {
        if t.len() != cfg.n {
            return Err(Error::InvalidConfig(format!(
                "extra start has {} parameters, expected {}",
                t.len(),
                cfg.n
            )));
        }
    }

    let mut start_tuples = Vec::new();
    start_tuples.push(poafd_steps(f, spec, &cfg.greedy(spec), false)?.parameters);
    if cfg.starts >= 2 {
        start_tuples.push(ParameterTuple::new(vec![C64::new(0.0, 0.0); cfg.n]));
    }
    start_tuples.extend(cfg.extra_starts.iter().cloned());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    while start_tuples.len() < cfg.starts {
        let pts = (0..cfg.n)
            .map(|_| {
                let r = spec.r_max() * rng.random::<f64>().sqrt();
                let theta = 2.0 * std::f64::consts::PI * rng.random::<f64>();
                C64::from_polar(r, theta)
            })
            .collect();
        start_tuples.push(ParameterTuple::new(pts));
    }

    let grid_points = cfg.grid.points();
    let grid_values: Vec<C64> = grid_points.par_iter().map(|&b| f.eval_unchecked(b)).collect();
    let results: Vec<Result<ApproxResult>> = start_tuples
        .par_iter()
        .map(|t| descend(f, spec, t, cfg, &grid_points, &grid_values))
        .collect();

    let start_objectives: Vec<f64> = results
        .iter()
        .map(|r| r.as_ref().map_or(f64::INFINITY, |r| r.residual_norm))
        .collect();
    let best = start_objectives
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::InvalidConfig("no starts".into()))?;
    let mut results = results;
    let mut out = results.swap_remove(best)?;
    out.diagnostics.start_objectives = start_objectives;
    out.diagnostics.best_start = Some(best);
    Ok(out)
}

/// Kernel tuple helper for building test targets: `sum_k c_k E~_{a_k}`.
pub fn kernel_combination(spec: &SpaceSpec, points: &[C64], coeffs: &[C64]) -> Result<PowerSeries> {
    let tuple = ParameterTuple::new(points.to_vec());
    let kernels = tuple_kernels(spec, &tuple)?;
    let mut out = spec.zeros();
    for (k, c) in kernels.iter().zip(coeffs) {
        out.axpy(*c, &k.series);
    }
    Ok(out)
}
