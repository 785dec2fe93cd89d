//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails, except those listed in
//! `KNOWN_UNATTAINABLE`, which are still run and reported as FAIL.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rkhs_nbest::dict::{kernel, normalized_kernel, ParameterTuple};
use rkhs_nbest::greedy::PolarGrid;
use rkhs_nbest::nbest::{brute_force, solve, ApproxResult, NBestConfig};
use rkhs_nbest::ortho::{gram_schmidt, lic_check};
use rkhs_nbest::probes::{dbvc_probe, BoundarySequence};
use rkhs_nbest::rational::{admissible, blaschke_form_of, tm_to_rational};
use rkhs_nbest::targets::Builtin;
use rkhs_nbest::{PowerSeries, SpaceSpec};

/// Criteria that cannot hold for any implementation; see the project notes.
/// Along 16 directions the largest `|<E_z, E_w>|` at `|w| = 0.95` is at
/// least `sqrt(1 - 0.95^2) = 0.312` (Hardy) and `1 - 0.95^2 = 0.0975`
/// (Bergman, alpha = 0) for every fixed `z`, both above 0.05.
const KNOWN_UNATTAINABLE: &[&str] = &["7a"];

const N: usize = 512;

type Criterion = (&'static str, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn disc(rng: &mut ChaCha8Rng, r: f64) -> C64 {
    C64::from_polar(r * rng.random::<f64>().sqrt(), std::f64::consts::TAU * rng.random::<f64>())
}

fn separated(rng: &mut ChaCha8Rng, n: usize, r: f64, sep: f64) -> Vec<C64> {
    loop {
        let draws: Vec<C64> = (0..64).map(|_| disc(rng, r)).collect();
        if let Some(p) = separated_points(&draws, n, sep) {
            return p;
        }
    }
}

fn spaces(r_max: f64) -> Vec<(&'static str, SpaceSpec)> {
    vec![
        ("hardy", SpaceSpec::hardy(N, r_max).unwrap()),
        ("bergman(0)", SpaceSpec::bergman(0.0, N, r_max).unwrap()),
        ("bergman(1)", SpaceSpec::bergman(1.0, N, r_max).unwrap()),
    ]
}

/// Targets that are exact m-kernel expansions with m < n are excluded from
/// the interior-attainment claims: f1 = -k_{1/2}/2 and f3 (three Szego
/// kernels) in Hardy, f2 (Szego kernels at (1 +- i)/2) in Hardy, and
/// f4 = z, the order-1 kernel at the origin, in every space.
fn kernel_expansion_order(space: &str, target: Builtin) -> Option<usize> {
    match (space, target) {
        ("hardy", Builtin::F1) => Some(1),
        ("hardy", Builtin::F2) => Some(2),
        ("hardy", Builtin::F3) => Some(3),
        (_, Builtin::F4) => Some(2),
        _ => None,
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let spec = SpaceSpec::hardy(N, 0.95).unwrap();
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = r.random_range(2..=6);
        let pts = separated(&mut r, n, 0.9, 0.05);
        let sys = gram_schmidt(&spec, &ParameterTuple::new(pts.clone())).unwrap();
        for (b, t) in sys.basis().iter().zip(tm_reference(&pts, N)) {
            worst = worst.max(phase_aligned_error(b.coeffs(), &t));
        }
    }
    let t = start.elapsed();
    outcome(
        worst <= 1e-9 && t < Duration::from_secs(10),
        format!("max coefficient error {worst:.2e} over 50 tuples (<= 1e-9), {:.2} s (< 10 s)", t.as_secs_f64()),
    )
}

fn criterion_2() -> Outcome {
    let mut r = rng(2);
    let (mut worst0, mut worst_m) = (0.0f64, 0.0f64);
    for i in 0..100 {
        let spec = if i % 2 == 0 {
            SpaceSpec::hardy(N, 0.95).unwrap()
        } else {
            SpaceSpec::bergman(r.random_range(-0.5..2.0), N, 0.95).unwrap()
        };
        let deg = r.random_range(0..=20);
        let f: Vec<C64> = (0..=deg).map(|_| disc(&mut r, 1.0)).collect();
        let fs = PowerSeries::from_leading(N, &f);
        let w = disc(&mut r, 0.95);
        let v = spec.inner_product(&fs, &kernel(&spec, w, 0).unwrap().series).unwrap();
        worst0 = worst0.max((v - poly_eval(&f, w)).norm());
        for m in 1..=3 {
            let v = spec.inner_product(&fs, &kernel(&spec, w, m).unwrap().series).unwrap();
            worst_m = worst_m.max((v - poly_derivative(&f, m, w)).norm());
        }
    }
    outcome(
        worst0 <= 1e-10 && worst_m <= 1e-6,
        format!("max |<f,K_w> - f(w)| = {worst0:.2e} (<= 1e-10), derivatives m<=3: {worst_m:.2e} (<= 1e-6)"),
    )
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let spec = SpaceSpec::hardy(N, rkhs_nbest::space::DEFAULT_R_MAX).unwrap();
    let z = PowerSeries::monomial(N, 1);
    let res = solve(&z, &spec, &NBestConfig::new(&spec, 1)).unwrap();
    let t = start.elapsed();
    // residual^2 = 1 - (1 - r^2) r^2, scanned over [0, r_max]
    let steps = 1_000_000;
    let (r_best, e_best) = (0..=steps)
        .map(|i| {
            let r = spec.r_max() * i as f64 / steps as f64;
            (r, (1.0 - r * r) * r * r)
        })
        .fold((0.0, -1.0), |a, b| if b.1 > a.1 { b } else { a });
    let oracle = (1.0 - e_best).sqrt();
    let modulus = res.parameters.points()[0].norm();
    let ok = (res.residual_norm - oracle).abs() <= 1e-6
        && (res.residual_norm - 3f64.sqrt() / 2.0).abs() <= 1e-6
        && (modulus - r_best).abs() <= 1e-3
        && t < Duration::from_secs(5);
    outcome(
        ok,
        format!(
            "objective {:.12} (scan oracle {oracle:.12}), |a1| = {modulus:.6} (scan {r_best:.6}), {:.2} s (< 5 s)",
            res.residual_norm,
            t.as_secs_f64()
        ),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut r = rng(4);
    let mut worst = 0.0f64;
    let mut count = 0;
    for (_, spec) in spaces(rkhs_nbest::space::DEFAULT_R_MAX) {
        for _ in 0..20 {
            let n = r.random_range(1..=3);
            let pts = separated(&mut r, n, 0.8, 0.2);
            let mut f = spec.zeros();
            for &p in &pts {
                let c = C64::from_polar(r.random_range(0.2..1.0), std::f64::consts::TAU * r.random::<f64>());
                f.axpy(c, &normalized_kernel(&spec, p, 0).unwrap().series);
            }
            let mut cfg = NBestConfig::new(&spec, n);
            cfg.seed = count;
            let res = solve(&f, &spec, &cfg).unwrap();
            worst = worst.max(res.residual_norm);
            count += 1;
        }
    }
    let t = start.elapsed();
    outcome(
        worst <= 1e-8 && t < Duration::from_secs(120),
        format!("max residual {worst:.2e} over {count} targets in 3 spaces (<= 1e-8), {:.1} s (< 120 s)", t.as_secs_f64()),
    )
}

fn criterion_5() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    let mut worst_gap = f64::NEG_INFINITY;
    for (name, spec) in spaces(rkhs_nbest::space::DEFAULT_R_MAX) {
        let grid = PolarGrid::chebyshev(24, 48, spec.r_max()).unwrap();
        for target in Builtin::ALL {
            let f = target.series(N);
            for n in 1..=2 {
                let brute = brute_force(&f, &spec, n, &grid).unwrap();
                let best = solve(&f, &spec, &NBestConfig::new(&spec, n)).unwrap();
                let gap = best.residual_norm - brute.residual_norm;
                worst_gap = worst_gap.max(gap);
                if gap > 1e-10 {
                    ok = false;
                    lines.push(format!("{name} {} n={n}: solve {:.3e} > grid {:.3e}", target.name(), best.residual_norm, brute.residual_norm));
                }
            }
        }
    }
    outcome(
        ok,
        format!("24 cases, max (solve - grid) = {worst_gap:.2e} (<= 1e-10 slack) {}", lines.join("; ")),
    )
}

fn criterion_6() -> Outcome {
    let spec = SpaceSpec::bergman(0.0, N, rkhs_nbest::space::DEFAULT_R_MAX).unwrap();
    let f = Builtin::F1.series(N);
    let mut values = Vec::new();
    let mut prev: Option<ApproxResult> = None;
    for n in 1..=5 {
        let mut cfg = NBestConfig::new(&spec, n);
        if let Some(p) = &prev {
            // nesting start: previous optimum with its first point repeated
            let mut pts = p.parameters.points().to_vec();
            while pts.len() < n {
                pts.push(pts[0]);
            }
            cfg.extra_starts.push(ParameterTuple::new(pts));
        }
        let res = solve(&f, &spec, &cfg).unwrap();
        values.push(res.residual_norm);
        prev = Some(res);
    }
    let non_increasing = values.windows(2).all(|w| w[1] <= w[0] + 1e-10);
    let strict = values[..3].windows(2).all(|w| w[1] < w[0] - 1e-10);
    outcome(
        non_increasing && strict,
        format!(
            "f1 in bergman(0), n=1..5: [{}]",
            values.iter().map(|v| format!("{v:.3e}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn criterion_7a() -> Outcome {
    let mut worst = 0.0f64;
    for spec in [SpaceSpec::hardy(N, 0.95).unwrap(), SpaceSpec::bergman(0.0, N, 0.95).unwrap()] {
        for d in 0..16 {
            let seq = BoundarySequence::radial(std::f64::consts::TAU * d as f64 / 16.0, 0.95).unwrap();
            let v = dbvc_probe(&spec, C64::new(0.0, 0.0), &seq).unwrap();
            worst = worst.max(*v.last().unwrap());
        }
    }
    outcome(worst < 0.05, format!("largest end value at radius 0.95 is {worst:.4} (< 0.05 required)"))
}

fn criterion_7b() -> Outcome {
    let mut r = rng(7);
    let mut worst = f64::INFINITY;
    for i in 0..100 {
        let spec = if i % 2 == 0 {
            SpaceSpec::hardy(N, 0.95).unwrap()
        } else {
            SpaceSpec::bergman(0.0, N, 0.95).unwrap()
        };
        let n = r.random_range(1..=6);
        let pts = separated(&mut r, n, 0.8, 0.2);
        worst = worst.min(lic_check(&spec, &ParameterTuple::new(pts)).unwrap());
    }
    outcome(worst > 1e-6, format!("smallest Gram eigenvalue over 100 tuples {worst:.3e} (> 1e-6)"))
}

fn criterion_7c() -> Outcome {
    let spec = SpaceSpec::hardy(N, 0.95).unwrap();
    let v = lic_check(&spec, &ParameterTuple::from_reals(&[0.0, 0.5])).unwrap();
    let expected = 1.0 - 0.75f64.sqrt();
    outcome(
        (v - expected).abs() <= 1e-9,
        format!("lic(0, 0.5) = {v:.15} vs 1 - sqrt(0.75) = {expected:.15}"),
    )
}

fn criterion_8() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut cases = 0;
    let mut where_worst = String::new();
    for (name, spec) in spaces(rkhs_nbest::space::DEFAULT_R_MAX) {
        for target in Builtin::ALL {
            let f = target.series(N);
            for n in 1..=3 {
                if kernel_expansion_order(name, target).is_some_and(|m| m < n) {
                    continue;
                }
                let res = solve(&f, &spec, &NBestConfig::new(&spec, n)).unwrap();
                cases += 1;
                if res.interior_margin < worst {
                    worst = res.interior_margin;
                    where_worst = format!("{name} {} n={n}", target.name());
                }
            }
        }
    }
    outcome(
        worst > 0.01,
        format!("{cases} corpus solves, smallest interior margin {worst:.4} ({where_worst}) (> 0.01)"),
    )
}

fn criterion_9() -> Outcome {
    let spec = SpaceSpec::hardy(N, rkhs_nbest::space::DEFAULT_R_MAX).unwrap();
    let mut r = rng(9);
    let mut ok = true;
    let mut notes = Vec::new();
    for target in [Builtin::F2, Builtin::F3] {
        let f = target.series(N);
        let res = solve(&f, &spec, &NBestConfig::new(&spec, 2)).unwrap();
        let form = match blaschke_form_of(&f, &spec, &res) {
            Ok(form) => form,
            Err(e) => {
                ok = false;
                notes.push(format!("{}: {e}", target.name()));
                continue;
            }
        };
        let rational = tm_to_rational(&form).unwrap();
        let report = admissible(&rational, 2);
        let mut worst = 0.0f64;
        for _ in 0..64 {
            let z = disc(&mut r, 0.95);
            // kernel form: sum_k c_k / (1 - conj(a_k) z)
            let kernel_form: C64 = res
                .coefficients
                .iter()
                .zip(res.parameters.points())
                .map(|(c, a)| c / (C64::new(1.0, 0.0) - a.conj() * z))
                .sum();
            worst = worst.max((rational.eval(z) - kernel_form).norm());
        }
        ok &= report.is_admissible() && worst <= 1e-8;
        notes.push(format!(
            "{}: admissible={} max |p/q - kernel form| = {worst:.2e}",
            target.name(),
            report.is_admissible()
        ));
    }
    outcome(ok, notes.join("; "))
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("run{run}.json"));
        let code = rkhs_nbest::cli::run([
            "rkhs-nbest",
            "--space",
            "bergman",
            "--alpha",
            "0.5",
            "nbest",
            "--n",
            "3",
            "--builtin",
            "f3",
            "--seed",
            "1234",
            "--output",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        files.push(std::fs::read(out).unwrap());
    }
    outcome(
        files[0] == files[1],
        format!("two seeded runs, {} and {} bytes, identical = {}", files[0].len(), files[1].len(), files[0] == files[1]),
    )
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("1", "TM oracle equivalence", criterion_1),
        ("2", "reproducing property", criterion_2),
        ("3", "closed-form n=1 optimum", criterion_3),
        ("4", "exact recovery", criterion_4),
        ("5", "oracle dominance", criterion_5),
        ("6", "monotonicity in n", criterion_6),
        ("7a", "DBVC end values", criterion_7a),
        ("7b", "LIC on separated tuples", criterion_7b),
        ("7c", "LIC closed form", criterion_7c),
        ("8", "interior attainment", criterion_8),
        ("9", "rational-form consistency", criterion_9),
        ("10", "determinism", criterion_10),
    ];
    let mut unexpected = Vec::new();
    for (id, name, run) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let known = KNOWN_UNATTAINABLE.contains(&id);
        let tag = match (result.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known unattainable)",
            (false, false) => "FAIL",
        };
        println!(
            "criterion {id:>3} [{tag}] {name}: {} [{:.1} s]",
            result.detail,
            start.elapsed().as_secs_f64()
        );
        if !result.pass && !known {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: all attainable criteria pass");
    } else {
        println!("acceptance: failing criteria {unexpected:?}");
        std::process::exit(1);
    }
}
