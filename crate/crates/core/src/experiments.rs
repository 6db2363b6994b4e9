//! Monte Carlo harness: ratio distributions, sandwich verification, tail
//! comparisons, the harmonic product identity, the large-degree trend, and
//! deterministic report export.
//!
//! Every sample `i` is drawn from its own seeded stream and every
//! maximization uses a seed derived from `i`, so reports do not depend on
//! the number of worker threads.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bounds::{
    bounds_for_model, bounds_symmetric, bounds_symmetric_large_d, expectation_tag_prefix, projection_moment,
    projection_tail_bound, tail_bound_model, BoundSet, Kind,
};
use crate::error::{Error, Result};
use crate::harmonic::{cos_harmonic, harmonic_basis, harmonic_dimension, l2_sphere_inner, lemma21_constant};
use crate::model::{ModelSpec, Sample};
use crate::polynomial::HomogPoly;
use crate::random::{projection_ratio_sample, uniform_sphere, Projection, SeedSpec};
use crate::special::sphere_area;
use crate::spectral::{brute_force_uniform_norm, uniform_norm, MaximizerConfig};
use crate::stats::{ks_two_sample, mean, proportion_se, quantile_sorted, standard_error};
use crate::tensor::Field;

/// Numerical slack for deterministic lower-bound checks.
pub const LOWER_SLACK: f64 = 1e-9;
/// Standard errors allowed above a probabilistic upper bound.
pub const SE_SLACK: f64 = 3.0;
/// Samples used for the complex-versus-real norm comparison.
pub const COMPLEX_REAL_SUBSAMPLE: usize = 20;
/// Slack in the complex-versus-real norm comparison.
pub const COMPLEX_REAL_SLACK: f64 = 1e-6;
/// Draws used for the direct-versus-explicit projection KS test.
pub const KS_DRAWS: usize = 2000;

const QUANTILES: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    pub samples: usize,
    pub seed: u64,
    /// Per-sample maximizer settings; its `seed` is replaced by a derived one.
    pub maximizer: MaximizerConfig,
}

impl ExperimentConfig {
    pub fn new(samples: usize, seed: u64) -> Self {
        ExperimentConfig { samples, seed, maximizer: MaximizerConfig::default() }
    }

    pub fn with_starts(mut self, starts: usize) -> Self {
        self.maximizer.starts = starts;
        self
    }

    fn seeds(&self) -> SeedSpec {
        SeedSpec::new(self.seed)
    }

    fn maximizer_for(&self, index: u64, tag: &str, starts_factor: usize) -> MaximizerConfig {
        MaximizerConfig {
            seed: self.seeds().derive(index, tag),
            starts: self.maximizer.starts * starts_factor,
            ..self.maximizer
        }
    }

    fn metadata(&self, experiment: &str) -> ReportConfig {
        ReportConfig {
            experiment: experiment.to_string(),
            seed: self.seed,
            samples: self.samples as u64,
            starts: self.maximizer.starts as u64,
            max_iters: self.maximizer.max_iters as u64,
            tol: self.maximizer.tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub experiment: String,
    pub seed: u64,
    pub samples: u64,
    pub starts: u64,
    pub max_iters: u64,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub index: u64,
    pub ratio: f64,
    pub converged: bool,
    /// The ratio was raised by a re-run with more starts or the grid oracle.
    pub recertified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileValue {
    pub q: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioStats {
    pub model: String,
    pub sample_count: u64,
    pub records: Vec<SampleRecord>,
    pub min: f64,
    pub mean: f64,
    pub max: f64,
    pub quantiles: Vec<QuantileValue>,
    pub mean_se: f64,
}

impl RatioStats {
    fn from_records(model: &str, records: Vec<SampleRecord>) -> RatioStats {
        let ratios: Vec<f64> = records.iter().map(|r| r.ratio).collect();
        let mut sorted = ratios.clone();
        sorted.sort_by(f64::total_cmp);
        RatioStats {
            model: model.to_string(),
            sample_count: records.len() as u64,
            min: sorted[0],
            mean: mean(&ratios),
            max: sorted[sorted.len() - 1],
            quantiles: QUANTILES
                .iter()
                .map(|&q| QuantileValue { q, value: quantile_sorted(&sorted, q) })
                .collect(),
            mean_se: standard_error(&ratios),
            records,
        }
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.ratio).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The bound is at least 1 and was reported but not asserted.
    Vacuous,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Vacuous => "vacuous",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// `>=` or `<=`: the check is `lhs >= rhs - slack` or `lhs <= rhs + slack`.
    pub relation: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
    pub status: Status,
    pub tag: String,
}

impl Check {
    fn new(name: String, relation: &str, lhs: f64, rhs: f64, slack: f64, tag: &str) -> Check {
        let ok = match relation {
            ">=" => lhs >= rhs - slack,
            _ => lhs <= rhs + slack,
        };
        Check {
            name,
            relation: relation.to_string(),
            lhs,
            rhs,
            slack,
            pass: ok,
            status: if ok { Status::Pass } else { Status::Fail },
            tag: tag.to_string(),
        }
    }

    pub fn at_least(name: impl Into<String>, lhs: f64, rhs: f64, slack: f64, tag: &str) -> Check {
        Check::new(name.into(), ">=", lhs, rhs, slack, tag)
    }

    pub fn at_most(name: impl Into<String>, lhs: f64, rhs: f64, slack: f64, tag: &str) -> Check {
        Check::new(name.into(), "<=", lhs, rhs, slack, tag)
    }

    /// Marks the check as reported-only when the bound it compares against
    /// carries no information.
    fn vacuous_if(mut self, vacuous: bool) -> Check {
        if vacuous {
            self.pass = true;
            self.status = Status::Vacuous;
        }
        self
    }
}

/// One row of a tabulated experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub label: String,
    pub values: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub config: ReportConfig,
    pub model: String,
    pub bounds: Option<BoundSet>,
    pub stats: Option<RatioStats>,
    pub rows: Vec<Row>,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

fn draw(model: &ModelSpec, seeds: &SeedSpec, index: u64) -> Result<Sample> {
    model.sample(&mut seeds.rng(index, "sample"))
}

fn sample_ratio(sample: &Sample, mcfg: &MaximizerConfig) -> Result<(f64, bool)> {
    let target = sample.target();
    let res = uniform_norm(target, mcfg)?;
    Ok((res.value / target.norm(), res.converged))
}

/// Draws `cfg.samples` instances of `model` and estimates each ratio.
pub fn estimate_ratio_distribution(model: &ModelSpec, cfg: &ExperimentConfig) -> Result<RatioStats> {
    if cfg.samples == 0 {
        return Err(Error::Usage("need at least one sample".into()));
    }
    model.validate()?;
    let seeds = cfg.seeds();
    let records = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|i| {
            let sample = draw(model, &seeds, i)?;
            let (ratio, converged) = sample_ratio(&sample, &cfg.maximizer_for(i, "maximizer", 1))?;
            Ok(SampleRecord { index: i, ratio, converged, recertified: false })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RatioStats::from_records(&model.describe(), records))
}

/// Re-estimates a sample's ratio with four times the starts and, when the
/// grid fits the budget, the grid oracle; returns the best value found.
fn recertify(model: &ModelSpec, cfg: &ExperimentConfig, index: u64) -> Result<f64> {
    let sample = draw(model, &cfg.seeds(), index)?;
    let (mut best, _) = sample_ratio(&sample, &cfg.maximizer_for(index, "recertify", 4))?;
    let target = sample.target();
    for res in [64usize, 32, 16, 8] {
        match brute_force_uniform_norm(target, res) {
            Ok(v) => {
                best = best.max(v / target.norm());
                break;
            }
            Err(Error::Budget(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(best)
}

/// Complex and real uniform norms of a real form: the complex side with the
/// configured starts, the real side with four times as many.
pub fn complex_and_real_norms(f: &HomogPoly, cfg: &ExperimentConfig, index: u64) -> Result<(f64, f64)> {
    if f.field() != Field::Real {
        return Err(Error::UnsupportedField("expected a real form".into()));
    }
    let complex = uniform_norm(crate::spectral::Target::Poly(&f.complexified()), &cfg.maximizer_for(index, "complex-side", 1))?;
    let real = uniform_norm(crate::spectral::Target::Poly(f), &cfg.maximizer_for(index, "real-side", 4))?;
    Ok((complex.value, real.value))
}

/// Checks the sampled ratios against the bound set of the model's space.
pub fn verify_bounds(model: &ModelSpec, cfg: &ExperimentConfig) -> Result<VerificationReport> {
    let bounds = bounds_for_model(model)?;
    let mut stats = estimate_ratio_distribution(model, cfg)?;
    let lower = bounds.lower;
    let lower_tag = bounds.provenance[0].clone();

    let violators: Vec<u64> = stats
        .records
        .iter()
        .filter(|r| r.ratio < lower - LOWER_SLACK)
        .map(|r| r.index)
        .collect();
    let raised: Vec<(u64, f64)> = violators
        .par_iter()
        .map(|&i| recertify(model, cfg, i).map(|v| (i, v)))
        .collect::<Result<Vec<_>>>()?;
    if !raised.is_empty() {
        let mut records = stats.records.clone();
        for (i, v) in raised {
            let r = &mut records[i as usize];
            if v > r.ratio {
                r.ratio = v;
                r.recertified = true;
            }
        }
        stats = RatioStats::from_records(&stats.model, records);
    }

    let mut checks = Vec::new();
    let below = stats.records.iter().filter(|r| r.ratio < lower - LOWER_SLACK).count();
    checks.push(Check::at_most("samples-below-lower-bound", below as f64, 0.0, 0.0, &lower_tag));
    checks.push(Check::at_least("empirical-min-vs-lower-bound", stats.min, lower, LOWER_SLACK, &lower_tag));
    checks.push(Check::at_most("empirical-max-vs-one", stats.max, 1.0, LOWER_SLACK, "norm-ratio-at-most-one"));

    let fixture = match model {
        ModelSpec::RankOne { .. } => Some((1.0, "rank-one-exact".to_string())),
        ModelSpec::Identity { .. } => bounds
            .components
            .iter()
            .find(|c| c.kind == Kind::Exact)
            .map(|c| (c.value, c.tag.clone())),
        _ => None,
    };
    if let Some((exact, tag)) = fixture {
        checks.push(Check::at_most("fixture-max-vs-exact", stats.max, exact, LOWER_SLACK, &tag));
        checks.push(Check::at_least("fixture-min-vs-exact", stats.min, exact, LOWER_SLACK, &tag));
    }

    if let Some(prefix) = expectation_tag_prefix(model) {
        for c in bounds.components.iter().filter(|c| c.kind == Kind::Expectation && c.tag.starts_with(prefix)) {
            checks.push(
                Check::at_most(
                    format!("empirical-mean-vs-{}", c.tag),
                    stats.mean,
                    c.value,
                    SE_SLACK * stats.mean_se,
                    &c.tag,
                )
                .vacuous_if(c.vacuous),
            );
        }
    }

    let degree = match model {
        ModelSpec::Kostlan { d, field: Field::Real, .. } | ModelSpec::Harmonic { d, .. } => Some(*d),
        _ => None,
    };
    if let Some(d) = degree {
        let count = cfg.samples.min(COMPLEX_REAL_SUBSAMPLE) as u64;
        let seeds = cfg.seeds();
        let gaps = (0..count)
            .into_par_iter()
            .map(|i| {
                let Sample::Poly(f) = draw(model, &seeds, i)? else {
                    unreachable!("symmetric models sample forms")
                };
                let (c, r) = complex_and_real_norms(&f, cfg, i)?;
                Ok(c - 2f64.powf(f64::from(d) / 2.0) * r)
            })
            .collect::<Result<Vec<f64>>>()?;
        let worst = gaps.into_iter().fold(f64::NEG_INFINITY, f64::max);
        checks.push(Check::at_most(
            "complex-minus-scaled-real-norm",
            worst,
            0.0,
            COMPLEX_REAL_SLACK,
            "complex-real-norm",
        ));
    }

    Ok(VerificationReport {
        config: cfg.metadata("verify"),
        model: model.describe(),
        bounds: Some(bounds),
        stats: Some(stats),
        rows: Vec::new(),
        checks,
    })
}

/// What the tail experiment samples.
#[derive(Debug, Clone, PartialEq)]
pub enum TailModel {
    /// `‖Pr‖/‖r‖` for a rank-`k` projection of a Gaussian vector in `K^N`.
    Projection { big_n: usize, k: usize, field: Field },
    /// `‖X‖_∞/‖X‖` for a random element of the model.
    Model(ModelSpec),
}

impl TailModel {
    fn describe(&self) -> String {
        match self {
            TailModel::Projection { big_n, k, field } => format!("projection N={big_n} k={k} {field}"),
            TailModel::Model(m) => m.describe(),
        }
    }
}

/// Empirical survival function against the tail bound at each `t`.
pub fn tail_empirical_vs_bound(model: &TailModel, t_grid: &[f64], cfg: &ExperimentConfig) -> Result<VerificationReport> {
    if t_grid.is_empty() {
        return Err(Error::Usage("the t grid must be nonempty".into()));
    }
    if cfg.samples < 100 {
        return Err(Error::Usage(format!("tail experiments need at least 100 samples, got {}", cfg.samples)));
    }
    let seeds = cfg.seeds();
    let mut checks = Vec::new();
    let mut stats = None;
    let values: Vec<f64> = match model {
        TailModel::Projection { big_n, k, field } => {
            let scale = field.k() as usize;
            let (rn, rk) = (scale * big_n, scale * k);
            let draws = (0..cfg.samples as u64)
                .into_par_iter()
                .map(|i| projection_ratio_sample(rn, rk, &mut seeds.rng(i, "projection")))
                .collect::<Result<Vec<f64>>>()?;
            for l in [2u32, 4, 6] {
                let lf = f64::from(l);
                let empirical = mean(&draws.iter().map(|r| r.powi(l as i32)).collect::<Vec<_>>());
                let exact = projection_moment(*big_n, *k, lf, *field)?.powf(lf);
                checks.push(Check::at_most(
                    format!("moment-relative-error-l{l}"),
                    (empirical - exact).abs() / exact,
                    0.02,
                    0.0,
                    "projection-moment",
                ));
            }
            let explicit = Projection::random(rn, rk, &mut seeds.rng(0, "projection-frame"))?;
            let m = KS_DRAWS.min(cfg.samples);
            let direct: Vec<f64> = draws[..m].to_vec();
            let framed: Vec<f64> = (0..m as u64).map(|i| explicit.sample(&mut seeds.rng(i, "projection-explicit"))).collect();
            let ks = ks_two_sample(&direct, &framed)?;
            checks.push(Check::at_least("direct-vs-explicit-ks-p-value", ks.p_value, 0.01, 0.0, "projection-law"));
            draws
        }
        TailModel::Model(spec) => {
            let s = estimate_ratio_distribution(spec, cfg)?;
            let v = s.ratios();
            stats = Some(s);
            v
        }
    };
    let n = values.len();
    let mut rows = Vec::new();
    for &t in t_grid {
        let bound = match model {
            TailModel::Projection { big_n, k, field } => projection_tail_bound(*big_n, *k, t, *field)?,
            TailModel::Model(spec) => tail_bound_model(spec, t)?,
        };
        let p = values.iter().filter(|&&v| v >= t).count() as f64 / n as f64;
        let se = proportion_se(p, n);
        let tag = match model {
            TailModel::Projection { .. } => "projection-tail",
            TailModel::Model(_) => "model-tail",
        };
        checks.push(
            Check::at_most(format!("survival-at-t={t}"), p, bound.clipped, SE_SLACK * se, tag)
                .vacuous_if(bound.raw >= 1.0),
        );
        rows.push(Row {
            label: format!("t={t}"),
            values: vec![
                ("t".into(), t),
                ("empirical".into(), p),
                ("standard_error".into(), se),
                ("bound_raw".into(), bound.raw),
                ("bound_clipped".into(), bound.clipped),
            ],
        });
    }
    Ok(VerificationReport {
        config: cfg.metadata("tail"),
        model: model.describe(),
        bounds: None,
        stats,
        rows,
        checks,
    })
}

/// Pairs of random harmonic forms used by [`reproduce_lemma21`].
pub const LEMMA_PAIRS: usize = 20;

/// Compares the Bombieri–Weyl product with the scaled `L²(S^{n−1})` product
/// on random harmonic pairs, and the zonal norm with `D/|S^{n−1}|`.
pub fn reproduce_lemma21(d: u32, n: u32, seed: u64) -> Result<VerificationReport> {
    if d > 8 || !(2..=5).contains(&n) {
        return Err(Error::Domain(format!("exact quadrature path needs d ≤ 8 and 2 ≤ n ≤ 5, got d={d}, n={n}")));
    }
    let basis = harmonic_basis(d, n)?;
    let constant = lemma21_constant(d, n);
    let seeds = SeedSpec::new(seed);
    let dim = basis.dimension();
    let mut worst: f64 = 0.0;
    for i in 0..LEMMA_PAIRS as u64 {
        let mut rng = seeds.rng(i, "lemma-pair");
        let mut gauss = || (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect::<Vec<f64>>();
        let h = basis.combination(&gauss())?;
        let g = basis.combination(&gauss())?;
        let bw = h.bw_inner(&g)?.re;
        let l2 = l2_sphere_inner(&h, &g)?;
        worst = worst.max((bw - constant * l2).abs() / (h.bw_norm() * g.bw_norm()));
    }
    let mut checks = vec![Check::at_most("bw-vs-scaled-l2-relative-error", worst, 1e-8, 0.0, "lemma-l2-constant")];

    let x = uniform_sphere(n as usize, Field::Real, &mut seeds.rng(0, "lemma-pole"))?;
    let pole: Vec<f64> = x.iter().map(|z| z.re).collect();
    let zonal = basis.zonal(&pole)?;
    let expected = harmonic_dimension(d, n)? as f64 / sphere_area(n);
    let z2 = l2_sphere_inner(&zonal, &zonal)?;
    checks.push(Check::at_most("zonal-l2-norm-relative-error", (z2 - expected).abs() / expected, 1e-8, 0.0, "zonal-norm"));
    let at_pole = zonal.evaluate_real(&pole)?.re;
    checks.push(Check::at_most("zonal-at-pole-relative-error", (at_pole - expected).abs() / expected, 1e-8, 0.0, "zonal-norm"));

    let mut rows = vec![Row {
        label: format!("d={d} n={n}"),
        values: vec![
            ("constant".into(), constant),
            ("dimension".into(), dim as f64),
            ("zonal_l2_norm_sq".into(), z2),
            ("expected_zonal_l2_norm_sq".into(), expected),
        ],
    }];
    if n == 2 {
        let h = cos_harmonic(d)?;
        let norm_sq = h.bw_inner(&h)?.re;
        let want = 2f64.powi(d as i32 - 1);
        checks.push(Check::at_most("cos-harmonic-norm-relative-error", (norm_sq - want).abs() / want, 1e-12, 0.0, "lemma-l2-constant"));
        rows.push(Row { label: "cos-harmonic".into(), values: vec![("bw_norm_sq".into(), norm_sq), ("expected".into(), want)] });
    }
    let cfg = ExperimentConfig::new(LEMMA_PAIRS, seed);
    Ok(VerificationReport {
        config: cfg.metadata("lemma21"),
        model: format!("harmonic d={d} n={n} real"),
        bounds: None,
        stats: None,
        rows,
        checks,
    })
}

/// Large-degree sandwich against empirical minima of real harmonic and
/// Kostlan samples over an increasing degree grid.
pub fn trend_large_d(n: u32, d_grid: &[u32], cfg: &ExperimentConfig) -> Result<VerificationReport> {
    if d_grid.is_empty() || d_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Usage("the degree grid must be nonempty and strictly increasing".into()));
    }
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let mut crossover = None;
    let mut previous_upper = None;
    for &d in d_grid {
        let large = bounds_symmetric_large_d(d, n, Field::Real)?;
        let full = bounds_symmetric(d, n, Field::Real)?;
        let general = full.component("sym-lower-general").expect("present for d ≥ 3").value;
        let integral = full.component("sym-lower-integral").expect("present for d ≥ 3").value;
        let sub = ExperimentConfig { seed: cfg.seeds().derive(u64::from(d), "trend"), ..*cfg };
        let harmonic = estimate_ratio_distribution(&ModelSpec::Harmonic { d, n }, &sub)?;
        let kostlan = estimate_ratio_distribution(&ModelSpec::Kostlan { d, n, field: Field::Real }, &sub)?;
        checks.push(Check::at_least(format!("harmonic-min-vs-large-d-lower-d={d}"), harmonic.min, large.lower, LOWER_SLACK, "large-d-lower"));
        checks.push(Check::at_least(format!("kostlan-min-vs-large-d-lower-d={d}"), kostlan.min, large.lower, LOWER_SLACK, "large-d-lower"));
        if let Some(prev) = previous_upper {
            checks.push(Check::at_most(format!("large-d-upper-decreasing-d={d}"), large.upper, prev, 0.0, "large-d-upper"));
        }
        previous_upper = Some(large.upper);
        if crossover.is_none() && large.lower > general {
            crossover = Some(d);
        }
        rows.push(Row {
            label: format!("d={d}"),
            values: vec![
                ("d".into(), f64::from(d)),
                ("large_d_lower".into(), large.lower),
                ("large_d_upper".into(), large.upper),
                ("integral_lower".into(), integral),
                ("general_lower".into(), general),
                ("harmonic_min".into(), harmonic.min),
                ("harmonic_mean".into(), harmonic.mean),
                ("kostlan_min".into(), kostlan.min),
                ("kostlan_mean".into(), kostlan.mean),
            ],
        });
    }
    rows.push(Row {
        label: "crossover".into(),
        values: match crossover {
            Some(d) => vec![("found".into(), 1.0), ("d".into(), f64::from(d))],
            None => vec![("found".into(), 0.0)],
        },
    });
    Ok(VerificationReport {
        config: cfg.metadata("trend"),
        model: format!("large-degree trend n={n} real"),
        bounds: None,
        stats: None,
        rows,
        checks,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::Usage(format!("unknown format `{other}` (expected json|csv)"))),
        }
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |out: &mut String, k: usize| out.push_str(&"  ".repeat(k));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(num) => {
            if let Some(u) = num.as_u64() {
                write!(out, "{u}").unwrap();
            } else if let Some(i) = num.as_i64() {
                write!(out, "{i}").unwrap();
            } else {
                write!(out, "{:.12e}", num.as_f64().unwrap_or(f64::NAN)).unwrap();
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("strings serialize")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                pad(out, indent + 1);
                write_value(out, item, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                pad(out, indent + 1);
                out.push_str(&serde_json::to_string(k).expect("keys serialize"));
                out.push_str(": ");
                write_value(out, item, indent + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

/// Pretty JSON with sorted keys and every float written as `%.12e`.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub const CSV_HEADER: &str = "section,name,relation,lhs,rhs,slack,status,tag";

/// CSV with a `#` metadata line, a header, then one line per check, per
/// sample record and per table cell.
pub fn to_csv(report: &VerificationReport) -> String {
    let c = &report.config;
    let mut out = format!(
        "# experiment={} model={} seed={} samples={} starts={} max_iters={} tol={:.12e}\n{CSV_HEADER}\n",
        c.experiment,
        csv_field(&report.model),
        c.seed,
        c.samples,
        c.starts,
        c.max_iters,
        c.tol
    );
    for ch in &report.checks {
        writeln!(
            out,
            "check,{},{},{:.12e},{:.12e},{:.12e},{},{}",
            csv_field(&ch.name),
            ch.relation,
            ch.lhs,
            ch.rhs,
            ch.slack,
            ch.status.name(),
            csv_field(&ch.tag)
        )
        .unwrap();
    }
    if let Some(stats) = &report.stats {
        for r in &stats.records {
            let status = match (r.converged, r.recertified) {
                (_, true) => "recertified",
                (true, false) => "converged",
                (false, false) => "not-converged",
            };
            writeln!(out, "sample,{},ratio,{:.12e},,,{status},", r.index, r.ratio).unwrap();
        }
    }
    for row in &report.rows {
        for (k, v) in &row.values {
            writeln!(out, "row,{},{},{:.12e},,,,", csv_field(&row.label), csv_field(k), v).unwrap();
        }
    }
    out
}

pub fn render_report(report: &VerificationReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => to_json(report),
        ReportFormat::Csv => Ok(to_csv(report)),
    }
}

pub fn export_report(report: &VerificationReport, path: &Path, format: ReportFormat) -> Result<()> {
    std::fs::write(path, render_report(report, format)?).map_err(|e| Error::io(path, e))
}

pub fn parse_report_json(text: &str) -> Result<VerificationReport> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}
