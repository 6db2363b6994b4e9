//! End-to-end acceptance suite. Runs without the libtest harness so that
//! every criterion prints exactly one PASS/FAIL line.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use rankone::bounds::{
    a1_series, bounds_for_model, expectation_tag_prefix, form_dimension_sandwich, gautschi, half_binomial_sandwich,
    io_jacobian_det, io_map, log_covering_constant, moment_to_tail, projection_moment, tail_to_expectation, tail_to_min,
    tail_to_moment, Kind,
};
use rankone::cli::run_with;
use rankone::experiments::{
    complex_and_real_norms, reproduce_lemma21, tail_empirical_vs_bound, verify_bounds, ExperimentConfig, Status,
    TailModel,
};
use rankone::harmonic::{cos_harmonic, harmonic_basis, harmonic_dimension, l2_sphere_inner};
use rankone::model::ModelSpec;
use rankone::random::{kostlan_form, uniform_sphere, SeedSpec};
use rankone::special::sphere_area;
use rankone::spectral::{ratio, MaximizerConfig, Target};
use rankone::{Field, Tensor};

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn identity_ratios() -> Outcome {
    let start = Instant::now();
    let cfg = MaximizerConfig::with_seed(1);
    let mut worst: f64 = 0.0;
    for n in 2..=10usize {
        let t = Tensor::identity(n).map_err(|e| e.to_string())?;
        let r = ratio(Target::Tensor(&t), &cfg).map_err(|e| e.to_string())?;
        let want = 1.0 / (n as f64).sqrt();
        worst = worst.max((r - want).abs());
        ensure((r - want).abs() <= 1e-9, || format!("n={n}: ratio {r} vs {want}"))?;
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed < 1.0, || format!("took {elapsed:.3} s"))?;
    Ok(format!("max error {worst:.1e}, {elapsed:.3} s"))
}

fn rank_one_fixture() -> Outcome {
    let shapes: [&[usize]; 10] = [
        &[2, 2],
        &[3, 4],
        &[4, 4],
        &[2, 2, 2],
        &[3, 2, 4],
        &[4, 4, 4],
        &[2, 3, 2, 3],
        &[4, 2, 3, 4],
        &[3, 3, 3, 3],
        &[4, 4, 4, 4],
    ];
    let seeds = SeedSpec::new(2);
    let mut worst: f64 = 0.0;
    for i in 0..50u64 {
        let shape = shapes[i as usize % shapes.len()].to_vec();
        let field = if i % 2 == 0 { Field::Real } else { Field::Complex };
        let model = ModelSpec::RankOne { shape: shape.clone(), field };
        let sample = model.sample(&mut seeds.rng(i, "rank-one")).map_err(|e| e.to_string())?;
        let r = ratio(sample.target(), &MaximizerConfig::with_seed(seeds.derive(i, "maximizer"))).map_err(|e| e.to_string())?;
        worst = worst.max((r - 1.0).abs());
        ensure((r - 1.0).abs() <= 1e-9, || format!("{shape:?} {field}: ratio {r}"))?;
    }
    Ok(format!("50 tensors, max |ratio - 1| = {worst:.1e}"))
}

fn lower_bound_settings() -> Vec<ModelSpec> {
    let mut v = vec![
        ModelSpec::GaussianTensor { shape: vec![2, 2, 2], field: Field::Real },
        ModelSpec::GaussianTensor { shape: vec![3, 3, 3], field: Field::Real },
    ];
    for field in [Field::Real, Field::Complex] {
        for d in 3..=8 {
            v.push(ModelSpec::Kostlan { d, n: 2, field });
        }
    }
    for d in 3..=6 {
        for n in 2..=3 {
            v.push(ModelSpec::Harmonic { d, n });
        }
    }
    for field in [Field::Real, Field::Complex] {
        v.push(ModelSpec::KostlanMulti { ds: vec![2, 3], ns: vec![2, 2], field });
    }
    v
}

fn lower_bounds() -> Outcome {
    let settings = lower_bound_settings();
    let mut recertified = 0;
    let mut tightest = f64::INFINITY;
    for (i, model) in settings.iter().enumerate() {
        let cfg = ExperimentConfig::new(500, 3000 + i as u64);
        let report = verify_bounds(model, &cfg).map_err(|e| e.to_string())?;
        for c in report.checks.iter().filter(|c| c.name.contains("lower-bound")) {
            ensure(c.pass, || format!("{}: {} lhs={} rhs={}", model.describe(), c.name, c.lhs, c.rhs))?;
        }
        let stats = report.stats.as_ref().expect("verify reports stats");
        recertified += stats.records.iter().filter(|r| r.recertified).count();
        let lower = report.bounds.as_ref().expect("verify reports bounds").lower;
        tightest = tightest.min(stats.min - lower);
    }
    Ok(format!(
        "{} settings x 500 samples, {recertified} recertified, smallest min - lower = {tightest:.3e}",
        settings.len()
    ))
}

fn expectation_settings() -> Vec<ModelSpec> {
    let mut v = Vec::new();
    for d in [10, 12, 14, 16] {
        v.push(ModelSpec::Kostlan { d, n: 2, field: Field::Real });
    }
    v.push(ModelSpec::Kostlan { d: 10, n: 2, field: Field::Complex });
    v.push(ModelSpec::Kostlan { d: 6, n: 3, field: Field::Real });
    v.push(ModelSpec::GaussianTensor { shape: vec![3, 3, 3], field: Field::Real });
    v.push(ModelSpec::GaussianTensor { shape: vec![5, 5, 5], field: Field::Real });
    for n in [2, 3] {
        for d in [4, 6, 8, 10, 12, 14] {
            v.push(ModelSpec::Harmonic { d, n });
        }
    }
    v
}

fn expectation_bounds() -> Outcome {
    let mut asserted = Vec::new();
    let mut vacuous = Vec::new();
    for (i, model) in expectation_settings().iter().enumerate() {
        let prefix = expectation_tag_prefix(model).unwrap_or("gaussian-tensor-expectation");
        let bounds = bounds_for_model(model).map_err(|e| e.to_string())?;
        let informative = bounds
            .components
            .iter()
            .any(|c| c.kind == Kind::Expectation && c.tag.starts_with(prefix) && !c.vacuous);
        if !informative {
            vacuous.push(model.describe());
            continue;
        }
        let report = verify_bounds(model, &ExperimentConfig::new(300, 4000 + i as u64)).map_err(|e| e.to_string())?;
        let checks: Vec<_> = report.checks.iter().filter(|c| c.name.starts_with("empirical-mean-vs-")).collect();
        ensure(checks.iter().any(|c| c.status != Status::Vacuous), || format!("{}: no asserted check", model.describe()))?;
        for c in checks {
            ensure(c.pass, || format!("{}: {} mean={} bound={}", model.describe(), c.name, c.lhs, c.rhs))?;
        }
        asserted.push(model.describe());
    }
    ensure(!asserted.is_empty(), || "no setting has a bound below 1".into())?;
    Ok(format!(
        "{} asserted [{}]; {} vacuous, reported only [{}]",
        asserted.len(),
        asserted.join("; "),
        vacuous.len(),
        vacuous.join("; ")
    ))
}

fn projection_law() -> Outcome {
    let t_grid: Vec<f64> = (1..=9).map(|i| f64::from(i) / 10.0).collect();
    let mut summary = Vec::new();
    for (j, (big_n, k)) in [(10usize, 3usize), (50, 7)].into_iter().enumerate() {
        for field in [Field::Real, Field::Complex] {
            let m2 = projection_moment(big_n, k, 2.0, field).map_err(|e| e.to_string())?.powi(2);
            let want = k as f64 / big_n as f64;
            ensure(rel(m2, want) <= 1e-12, || format!("N={big_n} k={k} {field}: second moment {m2} vs {want}"))?;
            let model = TailModel::Projection { big_n, k, field };
            let cfg = ExperimentConfig::new(100_000, 5000 + 2 * j as u64 + u64::from(field == Field::Complex));
            let report = tail_empirical_vs_bound(&model, &t_grid, &cfg).map_err(|e| e.to_string())?;
            let failures = report.failures();
            ensure(failures.is_empty(), || {
                let f = failures[0];
                format!("N={big_n} k={k} {field}: {} lhs={} rhs={}", f.name, f.lhs, f.rhs)
            })?;
            let worst_moment = report
                .checks
                .iter()
                .filter(|c| c.name.starts_with("moment-"))
                .map(|c| c.lhs)
                .fold(0.0, f64::max);
            let asserted = report.checks.iter().filter(|c| c.name.starts_with("survival") && c.status == Status::Pass).count();
            summary.push(format!("N={big_n} k={k} {field}: moment err {worst_moment:.2e}, survival asserted at {asserted}/9 t, vacuous elsewhere"));
        }
    }
    Ok(summary.join("; "))
}

fn lemma_constant() -> Outcome {
    for (d, n) in [(1u32, 3u32), (2, 3), (3, 2), (2, 4), (4, 3)] {
        let report = reproduce_lemma21(d, n, 6).map_err(|e| e.to_string())?;
        let failures = report.failures();
        ensure(failures.is_empty(), || format!("d={d} n={n}: {} = {}", failures[0].name, failures[0].lhs))?;
    }
    for d in 1..=12u32 {
        let h = cos_harmonic(d).map_err(|e| e.to_string())?;
        let got = h.bw_inner(&h).map_err(|e| e.to_string())?.re;
        let want = 2f64.powi(d as i32 - 1);
        ensure(rel(got, want) <= 1e-12, || format!("cos harmonic d={d}: {got} vs {want}"))?;
    }
    Ok("5 (d, n) cases x 20 pairs, cos harmonic d = 1..12".into())
}

fn zonal_harmonics() -> Outcome {
    let seeds = SeedSpec::new(7);
    let mut worst_repro: f64 = 0.0;
    let mut worst_pole: f64 = 0.0;
    for d in 1..=5u32 {
        for n in 2..=4u32 {
            let basis = harmonic_basis(d, n).map_err(|e| e.to_string())?;
            let tag = format!("zonal-{d}-{n}");
            let x: Vec<f64> = uniform_sphere(n as usize, Field::Real, &mut seeds.rng(0, &tag))
                .map_err(|e| e.to_string())?
                .iter()
                .map(|z| z.re)
                .collect();
            let zonal = basis.zonal(&x).map_err(|e| e.to_string())?;
            let expected = harmonic_dimension(d, n).map_err(|e| e.to_string())? as f64 / sphere_area(n);
            let at_pole = zonal.evaluate_real(&x).map_err(|e| e.to_string())?.re;
            worst_pole = worst_pole.max(rel(at_pole, expected));
            ensure(rel(at_pole, expected) <= 1e-8, || format!("d={d} n={n}: Z_x(x)={at_pole} vs {expected}"))?;
            for i in 1..=5u64 {
                let mut rng = seeds.rng(i, &tag);
                let c: Vec<f64> = (0..basis.dimension()).map(|_| rng.sample(StandardNormal)).collect();
                let h = basis.combination(&c).map_err(|e| e.to_string())?;
                let value = h.evaluate_real(&x).map_err(|e| e.to_string())?.re;
                let pairing = l2_sphere_inner(&h, &zonal).map_err(|e| e.to_string())?;
                worst_repro = worst_repro.max((value - pairing).abs());
                ensure((value - pairing).abs() <= 1e-8, || format!("d={d} n={n}: h(x)={value} vs <h,Z_x>={pairing}"))?;
            }
        }
    }
    Ok(format!("reproducing error {worst_repro:.1e}, pole value rel error {worst_pole:.1e}"))
}

/// Gram-determinant volume factor of one chart block by central differences.
fn fd_block_volume(z: &[f64]) -> f64 {
    let m = z.len();
    let h = 1e-6;
    let mut jac = DMatrix::<f64>::zeros(m + 1, m);
    for j in 0..m {
        let (mut zp, mut zm) = (z.to_vec(), z.to_vec());
        zp[j] += h;
        zm[j] -= h;
        let (fp, fm) = (io_map(&[zp]).remove(0), io_map(&[zm]).remove(0));
        for i in 0..=m {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    (jac.transpose() * &jac).determinant().sqrt()
}

fn jacobian() -> Outcome {
    let seeds = SeedSpec::new(8);
    let mut worst: f64 = 0.0;
    for i in 0..20u64 {
        let mut rng = seeds.rng(i, "jacobian");
        let blocks = rng.gen_range(1..=3);
        let zs: Vec<Vec<f64>> = (0..blocks)
            .map(|_| {
                let nk = rng.gen_range(2..=4usize);
                (0..nk - 1).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
            })
            .collect();
        let fd: f64 = zs.iter().map(|z| fd_block_volume(z)).product();
        let exact = io_jacobian_det(&zs);
        worst = worst.max(rel(exact, fd));
        ensure(rel(exact, fd) <= 1e-5, || format!("point {i}: {exact} vs finite difference {fd}"))?;
    }
    let origin = io_jacobian_det(&[vec![0.0], vec![0.0, 0.0], vec![0.0; 3]]);
    ensure(origin == 1.0, || format!("value at origin {origin}"))?;
    Ok(format!("20 points, max rel error {worst:.1e}, origin exact"))
}

fn sandwiches() -> Outcome {
    let within = |(lo, mid, hi): (f64, f64, f64)| lo <= mid * (1.0 + 1e-12) && mid <= hi * (1.0 + 1e-12);
    let mut points = 0;
    for n in 2..=8u32 {
        let start = (n * n).div_ceil(4).max(2);
        for d in start..=200 {
            let s = form_dimension_sandwich(d, n).map_err(|e| e.to_string())?;
            ensure(within(s), || format!("form dimension d={d} n={n}: {s:?}"))?;
            let s = half_binomial_sandwich(d, n).map_err(|e| e.to_string())?;
            ensure(within(s), || format!("half binomial d={d} n={n}: {s:?}"))?;
            points += 1;
        }
    }
    for d in 1..=200u32 {
        let (lo, mid, hi) = gautschi(d).map_err(|e| e.to_string())?;
        ensure(lo <= mid + 1e-12 && mid <= hi + 1e-12, || format!("Gautschi d={d}: {lo} {mid} {hi}"))?;
    }
    Ok(format!("{points} grid points, Gautschi d = 1..200"))
}

fn complex_vs_real() -> Outcome {
    let seeds = SeedSpec::new(10);
    let cfg = ExperimentConfig::new(20, 10);
    let mut worst = f64::NEG_INFINITY;
    for (d, n) in [(3u32, 2usize), (4, 2), (3, 3)] {
        for i in 0..20u64 {
            let f = kostlan_form(d, n, Field::Real, &mut seeds.rng(i, &format!("kostlan-{d}-{n}"))).map_err(|e| e.to_string())?;
            let (complex, real) = complex_and_real_norms(&f, &cfg, i).map_err(|e| e.to_string())?;
            let gap = complex - 2f64.powf(f64::from(d) / 2.0) * real;
            worst = worst.max(gap);
            ensure(gap <= 1e-6, || format!("d={d} n={n} sample {i}: complex {complex}, real {real}"))?;
            ensure(complex >= real - 1e-9, || format!("d={d} n={n} sample {i}: complex {complex} below real {real}"))?;
        }
    }
    Ok(format!("60 forms, max complex - 2^(d/2) real = {worst:.3e}"))
}

fn covering_constant() -> Outcome {
    let c = log_covering_constant(3.0, &[2, 2, 2]).map_err(|e| e.to_string())?;
    ensure((c.ln_c - 18.592).abs() <= 1e-3, || format!("ln C = {}", c.ln_c))?;
    let seeds = SeedSpec::new(11);
    for i in 0..100u64 {
        let mut rng = seeds.rng(i, "covering");
        let l: f64 = rng.gen_range(1.0..20.0);
        let blocks = rng.gen_range(1..=6);
        let ns: Vec<usize> = (0..blocks).map(|_| rng.gen_range(2..=30)).collect();
        let s = log_covering_constant(l, &ns).map_err(|e| e.to_string())?;
        let slack = 1e-12 * s.ln_c.abs().max(1.0);
        ensure(s.lower <= s.ln_c + slack && s.ln_c <= s.upper + slack, || format!("L={l} ns={ns:?}: {s:?}"))?;
    }
    Ok(format!("ln C(3, 3; 2, 2, 2) = {:.6}, sandwich on 100 inputs", c.ln_c))
}

fn subgaussian_constants() -> Outcome {
    let a1 = a1_series();
    ensure((a1 - 2.62509).abs() <= 1e-4, || format!("series = {a1}"))?;
    let e = std::f64::consts::E;
    let hand = [
        ("moment to tail at t = sqrt 6", moment_to_tail(1.0, 6f64.sqrt()), 3.0 / e),
        ("moment to tail at t = 3", moment_to_tail(1.0, 3.0), 0.669_390_480_445_289_5),
        ("tail to moment at l = 1", tail_to_moment(1.0, 1.0, 1.0).map_err(|e| e.to_string())?, 2.667_527_699_688_595),
        ("tail to moment at l = 4", tail_to_moment(1.0, 1.0, 4.0).map_err(|e| e.to_string())?, 5.335_055_399_377_19),
        ("tail to expectation", tail_to_expectation(1.0, 1.0).map_err(|e| e.to_string())?, 2.0 * 2f64.sqrt()),
        ("tail to minimum", tail_to_min(1.0, 1.0).map_err(|e| e.to_string())?, 1.0),
    ];
    for (name, got, want) in hand {
        ensure(rel(got, want) <= 1e-12, || format!("{name}: {got} vs {want}"))?;
    }
    Ok(format!("series = {a1:.6}, {} conversions at C = e, K = 1", hand.len()))
}

fn determinism() -> Outcome {
    let run = |workers: &str, rest: &[&str]| {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = ["rankone", "--workers", workers, "verify"].into_iter().chain(rest.iter().copied());
        let code = run_with(argv, &mut out, &mut err);
        (code, out)
    };
    let cases: [&[&str]; 4] = [
        &["--model", "gaussian-tensor", "--shape", "3,3,3", "--samples", "200", "--seed", "13"],
        &["--model", "kostlan", "--d", "5", "--n", "3", "--field", "complex", "--samples", "200", "--seed", "13", "--format", "csv"],
        &["--model", "harmonic", "--d", "6", "--n", "3", "--samples", "200", "--seed", "13"],
        &["--model", "kostlan-multi", "--ds", "2,3", "--ns", "2,2", "--samples", "200", "--seed", "13"],
    ];
    for args in cases {
        let (c1, one) = run("1", args);
        let (c8, eight) = run("8", args);
        ensure(c1 != 2 && c8 != 2, || format!("{args:?}: exit codes {c1} and {c8}"))?;
        ensure(c1 == c8 && one == eight, || format!("{args:?}: reports differ between 1 and 8 workers"))?;
    }
    Ok(format!("{} verify runs byte-identical across 1 and 8 workers", cases.len()))
}

fn main() {
    let criteria: [Criterion; 13] = [
        (1, "identity ratios", identity_ratios),
        (2, "rank-one fixture", rank_one_fixture),
        (3, "deterministic lower bounds", lower_bounds),
        (4, "expectation upper bounds", expectation_bounds),
        (5, "projection law", projection_law),
        (6, "harmonic inner product constant", lemma_constant),
        (7, "zonal harmonics", zonal_harmonics),
        (8, "chart Jacobian", jacobian),
        (9, "asymptotic sandwiches", sandwiches),
        (10, "complex vs real uniform norm", complex_vs_real),
        (11, "covering constant", covering_constant),
        (12, "subgaussian constants", subgaussian_constants),
        (13, "determinism across workers", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == &i.to_string()) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {i}: PASS {name} ({secs:.2} s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {i}: FAIL {name} ({secs:.2} s): {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
