//! Closed-form bounds on the best rank-one approximation ratio, the
//! subgaussian tail machinery behind the probabilistic upper bounds, and the
//! large-degree asymptotics.
//!
//! Every formula is evaluated as a natural logarithm and exponentiated only
//! at the end, so binomials far beyond `f64` range are fine. Each value is
//! reported as a [`Component`] carrying a short descriptive tag; a
//! [`BoundSet`] picks the sharpest lower and upper component.

use std::f64::consts::{LN_10, LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::special::{ln_factorial, ln_form_dimension, ln_gamma, ln_half_binomial};
use crate::tensor::Field;

const LN_3: f64 = 1.098_612_288_668_109_8;

fn ln_2sqrt6() -> f64 {
    LN_2 + 0.5 * 6f64.ln()
}

fn ln_2sqrt3() -> f64 {
    LN_2 + 0.5 * 3f64.ln()
}

/// What a component bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    /// A lower bound on the ratio of the space.
    Lower,
    /// An upper bound on the ratio of the space.
    Upper,
    /// An upper bound on the expected ratio of a random element, hence also
    /// on the ratio of the space.
    Expectation,
    /// The exact value.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub tag: String,
    pub kind: Kind,
    pub value: f64,
    pub ln_value: f64,
    pub log10: f64,
    /// Upper-type component that is at least 1 and therefore says nothing.
    pub vacuous: bool,
}

impl Component {
    pub fn from_ln(tag: &str, kind: Kind, ln_value: f64) -> Component {
        Component {
            tag: tag.to_string(),
            kind,
            value: ln_value.exp(),
            ln_value,
            log10: ln_value / LN_10,
            vacuous: kind != Kind::Lower && kind != Kind::Exact && ln_value >= 0.0,
        }
    }

    fn bounds_below(&self) -> bool {
        matches!(self.kind, Kind::Lower | Kind::Exact)
    }

    fn bounds_above(&self) -> bool {
        self.kind != Kind::Lower
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Problem {
    General { shape: Vec<usize> },
    Symmetric { d: u32, n: u32 },
    PartiallySymmetric { ds: Vec<u32>, ns: Vec<u32> },
}

impl std::fmt::Display for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join("x");
        match self {
            Problem::General { shape } => {
                let s = shape.iter().map(usize::to_string).collect::<Vec<_>>().join("x");
                write!(f, "general({s})")
            }
            Problem::Symmetric { d, n } => write!(f, "sym(d={d},n={n})"),
            Problem::PartiallySymmetric { ds, ns } => write!(f, "partial(ds={},ns={})", join(ds), join(ns)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSet {
    pub problem: Problem,
    pub field: Field,
    /// The largest lower component.
    pub lower: f64,
    /// The `*-headline` component when the space has one, otherwise the
    /// smallest upper component.
    pub upper: f64,
    pub lower_log10: f64,
    pub upper_log10: f64,
    /// Tags of the components attaining `lower` and `upper`, in that order.
    pub provenance: Vec<String>,
    /// `upper ≥ 1`.
    pub vacuous: bool,
    /// The smallest upper-type component, which may come from a sharper
    /// constant than the headline.
    pub sharpest_upper: f64,
    pub sharpest_upper_tag: String,
    pub components: Vec<Component>,
}

impl BoundSet {
    fn assemble(problem: Problem, field: Field, components: Vec<Component>) -> BoundSet {
        let best_lower = components
            .iter()
            .filter(|c| c.bounds_below())
            .max_by(|a, b| a.ln_value.total_cmp(&b.ln_value))
            .expect("every bound set has a lower component");
        let sharpest = components
            .iter()
            .filter(|c| c.bounds_above())
            .min_by(|a, b| a.ln_value.total_cmp(&b.ln_value))
            .expect("every bound set has an upper component");
        let upper = components
            .iter()
            .find(|c| c.kind == Kind::Upper && c.tag.ends_with("-headline"))
            .unwrap_or(sharpest);
        BoundSet {
            problem,
            field,
            lower: best_lower.value,
            upper: upper.value,
            lower_log10: best_lower.log10,
            upper_log10: upper.log10,
            provenance: vec![best_lower.tag.clone(), upper.tag.clone()],
            vacuous: upper.ln_value >= 0.0,
            sharpest_upper: sharpest.value,
            sharpest_upper_tag: sharpest.tag.clone(),
            components: components.clone(),
        }
    }

    pub fn component(&self, tag: &str) -> Option<&Component> {
        self.components.iter().find(|c| c.tag == tag)
    }
}

fn check_shape(shape: &[usize]) -> Result<()> {
    if shape.is_empty() || shape.contains(&0) {
        return Err(Error::Shape(format!("invalid tensor shape {shape:?}")));
    }
    Ok(())
}

/// `ln min_i ∏_{j≠i} n_j`: drop the largest mode.
fn ln_min_partial_product(shape: &[usize]) -> f64 {
    let logs: Vec<f64> = shape.iter().map(|&n| (n as f64).ln()).collect();
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    logs.iter().sum::<f64>() - max
}

/// `1 / √(min_i ∏_{j≠i} n_j)`.
pub fn lower_bound_general(shape: &[usize], _field: Field) -> Result<f64> {
    check_shape(shape)?;
    Ok((-0.5 * ln_min_partial_product(shape)).exp())
}

fn require_general_upper(shape: &[usize]) -> Result<()> {
    check_shape(shape)?;
    if shape.len() < 3 {
        return Err(Error::Domain(format!(
            "probabilistic upper bounds need order d ≥ 3, got shape {shape:?}"
        )));
    }
    if shape.iter().any(|&n| n < 2) {
        return Err(Error::Domain(format!("probabilistic upper bounds need all n_j ≥ 2, got {shape:?}")));
    }
    Ok(())
}

/// `9 (1 + 1/ln d + 2/(d + Σ n_j)) √(d ln d) / √(min_i ∏_{j≠i} n_j)`: a bound on
/// the expected ratio of a Gaussian tensor.
pub fn expectation_bound_general(shape: &[usize], _field: Field) -> Result<f64> {
    require_general_upper(shape)?;
    let d = shape.len() as f64;
    let sum: f64 = shape.iter().map(|&n| n as f64).sum();
    let ln_d = d.ln();
    Ok((9f64.ln() + (1.0 + 1.0 / ln_d + 2.0 / (d + sum)).ln() + 0.5 * (d * ln_d).ln()
        - 0.5 * ln_min_partial_product(shape))
    .exp())
}

/// All upper and expectation components for general tensors of order ≥ 3.
pub fn upper_bound_general(shape: &[usize], field: Field) -> Result<Vec<Component>> {
    require_general_upper(shape)?;
    let d = shape.len() as f64;
    let k = f64::from(field.k());
    let ln_d = d.ln();
    let sum: f64 = shape.iter().map(|&n| n as f64).sum();
    let base = 0.5 * (d * ln_d).ln() - 0.5 * ln_min_partial_product(shape);
    let tail = model_tail_constants(&ModelSpec::GaussianTensor { shape: shape.to_vec(), field })?;
    Ok(vec![
        Component::from_ln("general-headline", Kind::Upper, 10f64.ln() + base),
        Component::from_ln(
            "gaussian-tensor-expectation",
            Kind::Expectation,
            expectation_bound_general(shape, field)?.ln(),
        ),
        Component::from_ln(
            "gaussian-tensor-expectation-sharp",
            Kind::Expectation,
            ln_2sqrt6() + 0.5 * (k - 1.0) + (1.0 + 1.0 / ln_d + 2.0 / (d + k * sum)).ln() + base,
        ),
        Component::from_ln("gaussian-tensor-expectation-exact", Kind::Expectation, tail.ln_expectation_bound()?),
        Component::from_ln(
            "gaussian-tensor-min",
            Kind::Upper,
            ln_2sqrt3() + 0.5 * (k - 1.0) + 0.5 * (1.0 + 2.0 / ln_d).ln() + base,
        ),
        Component::from_ln("gaussian-tensor-min-exact", Kind::Upper, tail.ln_min_bound()),
    ])
}

/// Bounds for `K^{n_1} ⊗ ⋯ ⊗ K^{n_d}`.
///
/// Modes of size 1 are dropped first. Orders 0 and 1 have ratio 1, order 2
/// (matrices) has the exact value `1/√min(n_1, n_2)`.
pub fn bounds_general(shape: &[usize], field: Field) -> Result<BoundSet> {
    check_shape(shape)?;
    let problem = Problem::General { shape: shape.to_vec() };
    let core: Vec<usize> = shape.iter().copied().filter(|&n| n > 1).collect();
    let components = match core.len() {
        0 | 1 => vec![Component::from_ln("vector-exact", Kind::Exact, 0.0)],
        2 => {
            let m = core[0].min(core[1]) as f64;
            vec![Component::from_ln("matrix-exact", Kind::Exact, -0.5 * m.ln())]
        }
        _ => {
            let mut v = vec![Component::from_ln(
                "general-lower",
                Kind::Lower,
                -0.5 * ln_min_partial_product(&core),
            )];
            v.extend(upper_bound_general(&core, field)?);
            v
        }
    };
    Ok(BoundSet::assemble(problem, field, components))
}

fn ln_sym_lower_integral(d: u32, n: u32, field: Field) -> f64 {
    let b = -0.5 * ln_form_dimension(d, n);
    match field {
        Field::Real => b - 0.5 * f64::from(d) * LN_2,
        Field::Complex => b,
    }
}

/// `ln(2^{-d/2} binom(d + n/2 - 1, d)^{-1/2})`.
fn ln_harmonic_scale(d: u32, n: u32) -> f64 {
    -0.5 * f64::from(d) * LN_2 - 0.5 * ln_half_binomial(d, n)
}

/// Bounds for `Sym^d(K^n)`; `d = 2` returns the exact value `1/√n`.
pub fn bounds_symmetric(d: u32, n: u32, field: Field) -> Result<BoundSet> {
    if d < 2 {
        return Err(Error::Domain(format!("symmetric bounds need d ≥ 2, got d={d}")));
    }
    if n < 2 {
        return Err(Error::Domain(format!("symmetric bounds need n ≥ 2, got n={n}")));
    }
    let problem = Problem::Symmetric { d, n };
    if d == 2 {
        let c = Component::from_ln("sym2-exact", Kind::Exact, -0.5 * f64::from(n).ln());
        return Ok(BoundSet::assemble(problem, field, vec![c]));
    }
    let (df, nf) = (f64::from(d), f64::from(n));
    let k = f64::from(field.k());
    let ln_d = df.ln();
    let ln_b = ln_form_dimension(d, n);
    let root = 0.5 * (nf * ln_d).ln();
    let mut v = vec![
        Component::from_ln("sym-lower-integral", Kind::Lower, ln_sym_lower_integral(d, n, field)),
        Component::from_ln("sym-lower-general", Kind::Lower, -0.5 * (df - 1.0) * nf.ln()),
        Component::from_ln(
            "sym-headline",
            Kind::Upper,
            match field {
                Field::Real => 6f64.ln() + root + ln_harmonic_scale(d, n),
                Field::Complex => 10f64.ln() + root - 0.5 * ln_b,
            },
        ),
        Component::from_ln(
            "sym-factorial",
            Kind::Upper,
            6f64.ln() + (1.0 + 1.0 / ln_d).ln() + 0.5 * (ln_factorial(u64::from(d)) + ln_d.ln())
                - 0.5 * (df - 1.0) * nf.ln(),
        ),
        Component::from_ln(
            "kostlan-expectation",
            Kind::Expectation,
            9f64.ln() + (1.0 + 1.0 / ln_d + 1.0 / (1.0 + nf)).ln() + root - 0.5 * ln_b,
        ),
        Component::from_ln(
            "kostlan-expectation-sharp",
            Kind::Expectation,
            ln_2sqrt6() + 0.5 * (k - 1.0) + (1.0 + 1.0 / ln_d + 1.0 / (1.0 + nf)).ln() + root - 0.5 * ln_b,
        ),
        Component::from_ln(
            "kostlan-min",
            Kind::Upper,
            ln_2sqrt3() + 0.5 * (k - 1.0) + 0.5 * (1.0 + 2.0 / ln_d).ln() + root - 0.5 * ln_b,
        ),
    ];
    let kostlan = model_tail_constants(&ModelSpec::Kostlan { d, n, field })?;
    v.push(Component::from_ln("kostlan-expectation-exact", Kind::Expectation, kostlan.ln_expectation_bound()?));
    v.push(Component::from_ln("kostlan-min-exact", Kind::Upper, kostlan.ln_min_bound()));
    if field == Field::Real {
        let h = ln_harmonic_scale(d, n);
        v.push(Component::from_ln(
            "harmonic-expectation",
            Kind::Expectation,
            ln_2sqrt6() + (1.0 + 1.0 / ln_d + 1.0 / (nf + 1.0)).ln() + root + h,
        ));
        v.push(Component::from_ln(
            "harmonic-min",
            Kind::Upper,
            ln_2sqrt3() + 0.5 * (1.0 + 2.0 / ln_d).ln() + root + h,
        ));
        let harmonic = model_tail_constants(&ModelSpec::Harmonic { d, n })?;
        v.push(Component::from_ln(
            "harmonic-expectation-exact",
            Kind::Expectation,
            harmonic.ln_expectation_bound()?,
        ));
        v.push(Component::from_ln("harmonic-min-exact", Kind::Upper, harmonic.ln_min_bound()));
    }
    Ok(BoundSet::assemble(problem, field, v))
}

fn large_d_components(d: u32, n: u32, field: Field) -> Result<(Component, Component)> {
    if d < 3 || n < 2 {
        return Err(Error::Domain(format!("large-degree bounds need d ≥ 3 and n ≥ 2, got d={d}, n={n}")));
    }
    let (df, nf) = (f64::from(d), f64::from(n));
    if 4.0 * df < nf * nf {
        return Err(Error::Domain(format!("large-degree bounds need d ≥ n²/4, got d={d}, n={n}")));
    }
    let ln_d = df.ln();
    let shrink = (1.0 - nf * nf / (4.0 * df)).ln();
    let ln_lower_core = 0.5 * (ln_factorial(u64::from(n) - 1) - (nf - 1.0) * ln_d);
    let (lower, upper) = match field {
        Field::Real => (
            ln_lower_core - 0.5 * df * LN_2 + shrink,
            9f64.ln()
                + 0.5 * (ln_gamma(nf / 2.0 + 1.0) + ln_d.ln() - df * LN_2 - (nf / 2.0 - 1.0) * ln_d)
                + (1.0 + 1.0 / (4.0 * df)).ln(),
        ),
        Field::Complex => (
            ln_lower_core + shrink,
            10f64.ln() + 0.5 * (ln_factorial(u64::from(n)) + ln_d.ln() - (nf - 1.0) * ln_d),
        ),
    };
    Ok((
        Component::from_ln("large-d-lower", Kind::Lower, lower),
        Component::from_ln("large-d-upper", Kind::Upper, upper),
    ))
}

/// Explicit large-degree sandwich for `Sym^d(K^n)`, valid for `d ≥ n²/4`.
pub fn bounds_symmetric_large_d(d: u32, n: u32, field: Field) -> Result<BoundSet> {
    let (lower, upper) = large_d_components(d, n, field)?;
    debug_assert!(large_d_encloses(d, n, field)?);
    Ok(BoundSet::assemble(Problem::Symmetric { d, n }, field, vec![lower, upper]))
}

/// Whether the large-degree sandwich is weaker on both sides than the
/// binomial bounds: its lower bound sits below the integral lower bound and
/// its upper bound above the headline upper bound.
pub fn large_d_encloses(d: u32, n: u32, field: Field) -> Result<bool> {
    let (lower, upper) = large_d_components(d, n, field)?;
    let full = bounds_symmetric(d, n, field)?;
    let integral = full.component("sym-lower-integral").expect("present for d ≥ 3");
    let headline = full.component("sym-headline").expect("present for d ≥ 3");
    let slack = 1e-12;
    Ok(lower.ln_value <= integral.ln_value + slack && upper.ln_value >= headline.ln_value - slack)
}

fn check_blocks(ds: &[u32], ns: &[u32]) -> Result<()> {
    if ds.is_empty() || ds.len() != ns.len() {
        return Err(Error::Dimension(format!(
            "need matching nonempty degree and dimension lists, got {ds:?} and {ns:?}"
        )));
    }
    if ds.contains(&0) || ns.iter().any(|&n| n < 2) {
        return Err(Error::Domain(format!("need all d_j ≥ 1 and n_j ≥ 2, got {ds:?} and {ns:?}")));
    }
    Ok(())
}

/// The two lower bounds for `⊗_j Sym^{d_j}(K^{n_j})`, valid for all
/// `d_j ≥ 1`.
pub fn lower_bounds_partially_symmetric(ds: &[u32], ns: &[u32], field: Field) -> Result<Vec<Component>> {
    check_blocks(ds, ns)?;
    let sum_d: f64 = ds.iter().map(|&d| f64::from(d)).sum();
    let ln_prod_b: f64 = ds.iter().zip(ns).map(|(&d, &n)| ln_form_dimension(d, n)).sum();
    let integral = match field {
        Field::Real => -0.5 * sum_d * LN_2 - 0.5 * ln_prod_b,
        Field::Complex => -0.5 * ln_prod_b,
    };
    let max_n = ns.iter().copied().max().unwrap_or(2);
    let ln_pow: f64 = ds.iter().zip(ns).map(|(&d, &n)| f64::from(d) * f64::from(n).ln()).sum();
    Ok(vec![
        Component::from_ln("partial-lower-integral", Kind::Lower, integral),
        Component::from_ln("partial-lower-general", Kind::Lower, 0.5 * (f64::from(max_n).ln() - ln_pow)),
    ])
}

/// Bounds for `⊗_j Sym^{d_j}(K^{n_j})` with all `d_j ≥ 2` and `max d_j ≥ 3`.
pub fn bounds_partially_symmetric(ds: &[u32], ns: &[u32], field: Field) -> Result<BoundSet> {
    check_blocks(ds, ns)?;
    if ds.iter().any(|&d| d < 2) {
        return Err(Error::Domain(format!("need all d_j ≥ 2, got {ds:?}")));
    }
    let max_d = *ds.iter().max().expect("nonempty");
    if max_d < 3 {
        return Err(Error::Domain(format!("need max d_j ≥ 3, got {ds:?}")));
    }
    let m = ds.len() as f64;
    let k = f64::from(field.k());
    let ln_md = (m * f64::from(max_d)).ln();
    let sum_n: f64 = ns.iter().map(|&n| f64::from(n)).sum();
    let sum_d: f64 = ds.iter().map(|&d| f64::from(d)).sum();
    let ln_prod_b: f64 = ds.iter().zip(ns).map(|(&d, &n)| ln_form_dimension(d, n)).sum();
    let ln_prod_h: f64 = ds.iter().zip(ns).map(|(&d, &n)| ln_half_binomial(d, n)).sum();
    let root = 0.5 * (sum_n * ln_md).ln();
    let harmonic_scale = -0.5 * sum_d * LN_2 - 0.5 * ln_prod_h;

    let mut v = lower_bounds_partially_symmetric(ds, ns, field)?;
    v.push(Component::from_ln(
        "partial-headline",
        Kind::Upper,
        match field {
            Field::Real => 6f64.ln() + root + harmonic_scale,
            Field::Complex => 10f64.ln() + root - 0.5 * ln_prod_b,
        },
    ));
    v.push(Component::from_ln(
        "kostlan-multi-min",
        Kind::Upper,
        ln_2sqrt3() + 0.5 * (k - 1.0) + 0.5 * (1.0 + 2.0 / ln_md).ln() + root - 0.5 * ln_prod_b,
    ));
    let kostlan = model_tail_constants(&ModelSpec::KostlanMulti { ds: ds.to_vec(), ns: ns.to_vec(), field })?;
    v.push(Component::from_ln("kostlan-multi-min-exact", Kind::Upper, kostlan.ln_min_bound()));
    if field == Field::Real {
        v.push(Component::from_ln(
            "multi-harmonic-min",
            Kind::Upper,
            ln_2sqrt3() + 0.5 * (1.0 + 2.0 / ln_md).ln() + root + harmonic_scale,
        ));
        let harmonic = model_tail_constants(&ModelSpec::MultiHarmonic { ds: ds.to_vec(), ns: ns.to_vec() })?;
        v.push(Component::from_ln("multi-harmonic-min-exact", Kind::Upper, harmonic.ln_min_bound()));
    }
    Ok(BoundSet::assemble(
        Problem::PartiallySymmetric { ds: ds.to_vec(), ns: ns.to_vec() },
        field,
        v,
    ))
}

/// Bounds for the space a model samples from.
///
/// Degree-0 and degree-1 forms, and blocks with `n_j = 1` or `d_j = 0`,
/// only contribute scalars or vectors whose ratio is 1. Multi-homogeneous
/// spaces outside the probabilistic range keep their lower bounds and get
/// the trivial upper bound 1.
pub fn bounds_for_model(model: &ModelSpec) -> Result<BoundSet> {
    model.validate()?;
    let field = model.field();
    match model {
        ModelSpec::GaussianTensor { shape, .. } | ModelSpec::RankOne { shape, .. } => bounds_general(shape, field),
        ModelSpec::Identity { n } => bounds_general(&[*n, *n], field),
        ModelSpec::Kostlan { d, n, .. } | ModelSpec::Harmonic { d, n } => {
            if *d >= 2 && *n >= 2 {
                bounds_symmetric(*d, *n, field)
            } else {
                let mut set = bounds_general(&[*n as usize], field)?;
                set.problem = Problem::Symmetric { d: *d, n: *n };
                Ok(set)
            }
        }
        ModelSpec::KostlanMulti { ds, ns, .. } | ModelSpec::MultiHarmonic { ds, ns } => {
            let problem = Problem::PartiallySymmetric { ds: ds.clone(), ns: ns.clone() };
            let (kd, kn): (Vec<u32>, Vec<u32>) =
                ds.iter().zip(ns).filter(|(&d, &n)| d >= 1 && n >= 2).map(|(&d, &n)| (d, n)).unzip();
            if kd.is_empty() {
                let c = Component::from_ln("vector-exact", Kind::Exact, 0.0);
                return Ok(BoundSet::assemble(problem, field, vec![c]));
            }
            let mut set = if kd.iter().all(|&d| d >= 2) && kd.iter().any(|&d| d >= 3) {
                bounds_partially_symmetric(&kd, &kn, field)?
            } else {
                let mut v = lower_bounds_partially_symmetric(&kd, &kn, field)?;
                v.push(Component::from_ln("trivial-upper", Kind::Upper, 0.0));
                BoundSet::assemble(problem.clone(), field, v)
            };
            set.problem = problem;
            Ok(set)
        }
    }
}

/// Tag prefix of the expectation bounds that apply to samples of `model`.
pub fn expectation_tag_prefix(model: &ModelSpec) -> Option<&'static str> {
    match model {
        ModelSpec::GaussianTensor { .. } => Some("gaussian-tensor-expectation"),
        ModelSpec::Kostlan { .. } => Some("kostlan-expectation"),
        ModelSpec::Harmonic { .. } => Some("harmonic-expectation"),
        _ => None,
    }
}

/// `ln C(L, d; n_1, …, n_d)` together with its elementary sandwich.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoveringConstant {
    pub ln_c: f64,
    pub lower: f64,
    pub upper: f64,
}

/// `ln C = (2 + ln dL) Σ n_k − ½ Σ ln(n_k − 1) − d ln(dL)` with `d = ns.len()`.
pub fn log_covering_constant(l: f64, ns: &[usize]) -> Result<CoveringConstant> {
    if !(l >= 1.0) || !l.is_finite() {
        return Err(Error::Domain(format!("the Lipschitz factor must satisfy L ≥ 1, got {l}")));
    }
    if ns.is_empty() || ns.iter().any(|&n| n < 2) {
        return Err(Error::Domain(format!("need at least one sphere and all n_k ≥ 2, got {ns:?}")));
    }
    let d = ns.len() as f64;
    let a = (d * l).ln();
    let sum: f64 = ns.iter().map(|&n| n as f64).sum();
    let half_logs: f64 = ns.iter().map(|&n| 0.5 * (n as f64 - 1.0).ln()).sum();
    let ln_c = (2.0 + a) * sum - half_logs - d * a;
    let lower = 3.0 * d + (1.0 + a) * (sum - d);
    let upper = (a + 2.0) * sum - a;
    debug_assert!(lower <= ln_c + 1e-9 && ln_c <= upper + 1e-9);
    Ok(CoveringConstant { ln_c, lower, upper })
}

/// A subgaussian tail `P(X ≥ t) ≤ 3C·exp(−rate·t²)` with `ln C` the covering
/// constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailConstants {
    pub ln_covering: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub t: f64,
    /// `ln` of the prefactor `3C`.
    pub ln_prefactor: f64,
    pub rate: f64,
    pub log_raw: f64,
    /// The bound as computed; may exceed 1.
    pub raw: f64,
    /// `raw` clipped to `[0, 1]`.
    pub clipped: f64,
}

impl TailBound {
    fn new(t: f64, ln_prefactor: f64, rate: f64) -> Result<TailBound> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("tail threshold must be ≥ 0, got {t}")));
        }
        let log_raw = ln_prefactor - rate * t * t;
        let raw = log_raw.exp();
        Ok(TailBound { t, ln_prefactor, rate, log_raw, raw, clipped: raw.min(1.0) })
    }
}

impl TailConstants {
    pub fn ln_prefactor(&self) -> f64 {
        LN_3 + self.ln_covering
    }

    /// The subgaussian scale `K` with `P ≤ 3C·exp(−t²/K²)`.
    pub fn scale(&self) -> f64 {
        1.0 / self.rate.sqrt()
    }

    pub fn at(&self, t: f64) -> Result<TailBound> {
        TailBound::new(t, self.ln_prefactor(), self.rate)
    }

    /// `ln(K √(2 ln 3C) (1 + 1/ln 3C))`.
    pub fn ln_expectation_bound(&self) -> Result<f64> {
        ln_tail_to_expectation(self.ln_prefactor(), self.scale())
    }

    /// `ln(K √(ln 3C))`.
    pub fn ln_min_bound(&self) -> f64 {
        self.scale().ln() + 0.5 * self.ln_prefactor().ln()
    }
}

/// Tail constants of the named random model: the covering constant uses
/// the model's Lipschitz factor and realified sphere dimensions.
pub fn model_tail_constants(model: &ModelSpec) -> Result<TailConstants> {
    model.validate()?;
    match model {
        ModelSpec::GaussianTensor { shape, field } => {
            let k = field.k() as usize;
            let ns: Vec<usize> = shape.iter().map(|&n| k * n).collect();
            let cov = log_covering_constant(1.0, &ns)?;
            let ln_prod: f64 = shape.iter().map(|&n| (n as f64).ln()).sum();
            let kf = k as f64;
            let rate = (kf.ln() + ln_prod - 12f64.ln() - (kf - 1.0)).exp();
            Ok(TailConstants { ln_covering: cov.ln_c, rate })
        }
        ModelSpec::Kostlan { d, n, field } => {
            if *d == 0 {
                return Err(Error::Domain("tail bounds need degree d ≥ 1".into()));
            }
            let k = field.k();
            let cov = log_covering_constant(f64::from(*d), &[(k * n) as usize])?;
            let kf = f64::from(k);
            let rate = (kf.ln() + ln_form_dimension(*d, *n) - 12f64.ln() - (kf - 1.0)).exp();
            Ok(TailConstants { ln_covering: cov.ln_c, rate })
        }
        ModelSpec::Harmonic { d, n } => {
            if *d == 0 {
                return Err(Error::Domain("tail bounds need degree d ≥ 1".into()));
            }
            let cov = log_covering_constant(f64::from(*d), &[*n as usize])?;
            let rate = (f64::from(*d) * LN_2 + ln_half_binomial(*d, *n) - 12f64.ln()).exp();
            Ok(TailConstants { ln_covering: cov.ln_c, rate })
        }
        ModelSpec::KostlanMulti { ds, ns, field } => {
            let max_d = *ds.iter().max().expect("validated");
            if max_d == 0 {
                return Err(Error::Domain("tail bounds need some degree d_j ≥ 1".into()));
            }
            let k = field.k();
            let spheres: Vec<usize> = ns.iter().map(|&n| (k * n) as usize).collect();
            let cov = log_covering_constant(f64::from(max_d), &spheres)?;
            let kf = f64::from(k);
            let ln_prod_b: f64 = ds.iter().zip(ns).map(|(&d, &n)| ln_form_dimension(d, n)).sum();
            let rate = (kf.ln() + ln_prod_b - 12f64.ln() - (kf - 1.0)).exp();
            Ok(TailConstants { ln_covering: cov.ln_c, rate })
        }
        ModelSpec::MultiHarmonic { ds, ns } => {
            let max_d = *ds.iter().max().expect("validated");
            if max_d == 0 {
                return Err(Error::Domain("tail bounds need some degree d_j ≥ 1".into()));
            }
            let spheres: Vec<usize> = ns.iter().map(|&n| n as usize).collect();
            let cov = log_covering_constant(f64::from(max_d), &spheres)?;
            let ln_num: f64 = ds
                .iter()
                .zip(ns)
                .map(|(&d, &n)| f64::from(d) * LN_2 + ln_half_binomial(d, n))
                .sum();
            Ok(TailConstants { ln_covering: cov.ln_c, rate: (ln_num - 12f64.ln()).exp() })
        }
        other => Err(Error::Usage(format!("no tail bound for model `{}`", other.name()))),
    }
}

/// `P(‖X‖_∞/‖X‖ ≥ t)` bound for a random element of the named model.
pub fn tail_bound_model(model: &ModelSpec, t: f64) -> Result<TailBound> {
    model_tail_constants(model)?.at(t)
}

fn check_projection(big_n: usize, k: usize) -> Result<()> {
    if k == 0 || k > big_n {
        return Err(Error::Domain(format!("projection needs 1 ≤ k ≤ N, got k={k}, N={big_n}")));
    }
    Ok(())
}

/// Tail bound for `‖Pr‖/‖r‖ ≥ t` with `P` a rank-`k` orthogonal projection of
/// a Gaussian vector in `K^N`: `3 exp(−N t²/(3e^{k−1}))` over the reals and
/// `3 exp(−2N t²/(3e^{2k−1}))` over the complex numbers.
pub fn projection_tail_bound(big_n: usize, k: usize, t: f64, field: Field) -> Result<TailBound> {
    check_projection(big_n, k)?;
    let (nf, kf) = (big_n as f64, k as f64);
    let ln_rate = match field {
        Field::Real => nf.ln() - LN_3 - (kf - 1.0),
        Field::Complex => (2.0 * nf).ln() - LN_3 - (2.0 * kf - 1.0),
    };
    TailBound::new(t, LN_3, ln_rate.exp())
}

/// `(E ‖Pr‖^l / ‖r‖^l)^{1/l}`; the complex case doubles both dimensions.
pub fn projection_moment(big_n: usize, k: usize, l: f64, field: Field) -> Result<f64> {
    check_projection(big_n, k)?;
    if !(l > 0.0) {
        return Err(Error::Domain(format!("moment order must be positive, got {l}")));
    }
    let scale = f64::from(field.k());
    let (nf, kf) = (scale * big_n as f64, scale * k as f64);
    let ln = ln_gamma((kf + l) / 2.0) + ln_gamma(nf / 2.0) - ln_gamma(kf / 2.0) - ln_gamma((nf + l) / 2.0);
    Ok((ln / l).exp())
}

/// `Σ_{p≥0} (p/3)^p / p!` (with `0^0 = 1`), summed until the terms drop
/// below `1e-16`.
pub fn a1_series() -> f64 {
    let mut sum = 1.0;
    for p in 1u64.. {
        let pf = p as f64;
        let term = (pf * (pf / 3.0).ln() - ln_factorial(p)).exp();
        sum += term;
        if term < 1e-16 {
            break;
        }
    }
    sum
}

/// Moments `(E|X|^l)^{1/l} ≤ K√l` for even `l` give `P(|X| ≥ t) ≤ 3e^{−t²/(6K²)}`.
pub fn moment_to_tail(k: f64, t: f64) -> f64 {
    3.0 * (-t * t / (6.0 * k * k)).exp()
}

fn check_ln_c(ln_c: f64, k: f64) -> Result<()> {
    if !(ln_c >= 0.0) {
        return Err(Error::Domain(format!("need C ≥ 1, got ln C = {ln_c}")));
    }
    if !(k >= 0.0) {
        return Err(Error::Domain(format!("need K ≥ 0, got {k}")));
    }
    Ok(())
}

/// A tail `P(|X| ≥ t) ≤ C e^{−t²/K²}` gives `(E|X|^l)^{1/l} ≤ K(√(π/2) + √(2 ln C))√l`.
pub fn tail_to_moment(ln_c: f64, k: f64, l: f64) -> Result<f64> {
    check_ln_c(ln_c, k)?;
    Ok(k * ((PI / 2.0).sqrt() + (2.0 * ln_c).sqrt()) * l.sqrt())
}

fn ln_tail_to_expectation(ln_c: f64, k: f64) -> Result<f64> {
    check_ln_c(ln_c, k)?;
    if ln_c <= 0.0 {
        return Err(Error::Domain("the expectation bound needs C > 1".into()));
    }
    Ok(k.ln() + 0.5 * (2.0 * ln_c).ln() + (1.0 + 1.0 / ln_c).ln())
}

/// A tail `P(|X| ≥ t) ≤ C e^{−t²/K²}` gives `E|X| ≤ K√(2 ln C)(1 + 1/ln C)`.
pub fn tail_to_expectation(ln_c: f64, k: f64) -> Result<f64> {
    Ok(ln_tail_to_expectation(ln_c, k)?.exp())
}

/// A tail `P(X ≥ t) ≤ C e^{−t²/K²}` forces `min X ≤ K√(ln C)`.
pub fn tail_to_min(ln_c: f64, k: f64) -> Result<f64> {
    check_ln_c(ln_c, k)?;
    Ok(k * ln_c.sqrt())
}

/// The chart `z ↦ (1, z)/√(1 + ‖z‖²)` applied blockwise.
pub fn io_map(zs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    zs.iter()
        .map(|z| {
            let s = (1.0 + z.iter().map(|v| v * v).sum::<f64>()).sqrt();
            std::iter::once(1.0).chain(z.iter().copied()).map(|v| v / s).collect()
        })
        .collect()
}

/// Volume distortion of [`io_map`]: `∏_k (1 + ‖z_k‖²)^{−n_k/2}` with
/// `n_k = len(z_k) + 1`.
pub fn io_jacobian_det(zs: &[Vec<f64>]) -> f64 {
    zs.iter()
        .map(|z| {
            let sq: f64 = z.iter().map(|v| v * v).sum();
            (1.0 + sq).powf(-(z.len() as f64 + 1.0) / 2.0)
        })
        .product()
}

/// `(lower, binom(d+n−1, d)^{−1/2}, upper)` with the `√((n−1)!/d^{n−1})`
/// approximation, valid for `d ≥ n²/4`.
pub fn form_dimension_sandwich(d: u32, n: u32) -> Result<(f64, f64, f64)> {
    let (df, nf) = (f64::from(d), f64::from(n));
    if d < 2 || n < 2 || 4.0 * df < nf * nf {
        return Err(Error::Domain(format!("need d, n ≥ 2 and d ≥ n²/4, got d={d}, n={n}")));
    }
    let ln_core = 0.5 * (ln_factorial(u64::from(n) - 1) - (nf - 1.0) * df.ln());
    let mid = (-0.5 * ln_form_dimension(d, n)).exp();
    Ok(((ln_core.exp()) * (1.0 - nf * nf / (4.0 * df)), mid, ln_core.exp()))
}

/// `(lower, binom(d+n/2−1, d)^{−1/2}, upper)` with the `√(Γ(n/2)/d^{n/2−1})`
/// approximation, valid for `d ≥ n²/16`.
pub fn half_binomial_sandwich(d: u32, n: u32) -> Result<(f64, f64, f64)> {
    let (df, nf) = (f64::from(d), f64::from(n));
    if d < 2 || n < 2 || 16.0 * df < nf * nf {
        return Err(Error::Domain(format!("need d, n ≥ 2 and d ≥ n²/16, got d={d}, n={n}")));
    }
    let core = (0.5 * (ln_gamma(nf / 2.0) - (nf / 2.0 - 1.0) * df.ln())).exp();
    let mid = (-0.5 * ln_half_binomial(d, n)).exp();
    Ok((core * (1.0 - nf * nf / (16.0 * df)), mid, core * (1.0 + 1.0 / (4.0 * df))))
}

/// `(1/√(d+1), Γ(d+½)/Γ(d+1), 1/√d)`.
pub fn gautschi(d: u32) -> Result<(f64, f64, f64)> {
    if d == 0 {
        return Err(Error::Domain("need d ≥ 1".into()));
    }
    let df = f64::from(d);
    let mid = (ln_gamma(df + 0.5) - ln_gamma(df + 1.0)).exp();
    Ok((1.0 / (df + 1.0).sqrt(), mid, 1.0 / df.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn general_lower_examples() {
        assert!(close(lower_bound_general(&[2, 2, 2], Field::Real).unwrap(), 0.5, 1e-14));
        assert!(close(lower_bound_general(&[5, 5], Field::Real).unwrap(), 1.0 / 5f64.sqrt(), 1e-14));
        assert!(close(lower_bound_general(&[2, 3, 4], Field::Complex).unwrap(), 1.0 / 6f64.sqrt(), 1e-14));
        assert!(close(lower_bound_general(&[7], Field::Real).unwrap(), 1.0, 1e-15));
    }

    #[test]
    fn general_headline_value() {
        let ups = upper_bound_general(&[2, 2, 2], Field::Real).unwrap();
        let head = ups.iter().find(|c| c.tag == "general-headline").unwrap();
        assert!(close(head.value, 10.0 * (3.0 * 3f64.ln()).sqrt() / 2.0, 1e-13));
        assert!(head.vacuous);
        assert!(upper_bound_general(&[2, 2], Field::Real).is_err());
    }

    #[test]
    fn general_cubical_expectation_form() {
        for d in 3..7usize {
            for n in 2..6usize {
                let got = expectation_bound_general(&vec![n; d], Field::Real).unwrap();
                let (df, nf) = (d as f64, n as f64);
                let want = 9.0 * (1.0 + 1.0 / df.ln() + 2.0 / (df * (1.0 + nf))) * (df * df.ln()).sqrt()
                    / nf.powf((df - 1.0) / 2.0);
                assert!(close(got, want, 1e-12));
            }
        }
    }

    #[test]
    fn general_small_orders_exact() {
        let b = bounds_general(&[3, 5], Field::Real).unwrap();
        assert!(close(b.lower, 1.0 / 3f64.sqrt(), 1e-14));
        assert_eq!(b.lower, b.upper);
        let b = bounds_general(&[4, 1, 1], Field::Complex).unwrap();
        assert_eq!((b.lower, b.upper), (1.0, 1.0));
    }

    #[test]
    fn symmetric_examples() {
        let b = bounds_symmetric(10, 2, Field::Real).unwrap();
        assert!(close(b.component("sym-lower-general").unwrap().value, 2f64.powf(-4.5), 1e-13));
        assert!(close(b.lower, 0.044194173824159216, 1e-12));
        let head = b.component("sym-headline").unwrap().value;
        assert!(close(head, 6.0 * (2.0 * 10f64.ln()).sqrt() / 32.0, 1e-12));
        assert!((head - 0.4024).abs() < 5e-5);

        let b = bounds_symmetric(3, 2, Field::Complex).unwrap();
        assert!(close(b.lower, 0.5, 1e-14));
        let head = b.component("sym-headline").unwrap().value;
        assert!(close(head, 10.0 * (2.0 * 3f64.ln()).sqrt() / 2.0, 1e-13));
    }

    #[test]
    fn symmetric_d2_exact_and_errors() {
        let b = bounds_symmetric(2, 7, Field::Complex).unwrap();
        assert!(close(b.lower, 1.0 / 7f64.sqrt(), 1e-14));
        assert_eq!(b.lower, b.upper);
        assert!(matches!(bounds_symmetric(1, 3, Field::Real), Err(Error::Domain(_))));
    }

    #[test]
    fn factorial_form_dominates_real_headline() {
        for d in 3..13 {
            for n in 2..7 {
                let b = bounds_symmetric(d, n, Field::Real).unwrap();
                assert!(b.lower <= 1.0);
                let fact = b.component("sym-factorial").unwrap().ln_value;
                let head = b.component("sym-headline").unwrap().ln_value;
                assert!(fact >= head - 1e-12, "d={d} n={n}");
            }
        }
    }

    #[test]
    fn exact_tail_forms_beat_displayed_ones() {
        for d in 3..15 {
            for n in 2..6 {
                for field in [Field::Real, Field::Complex] {
                    let b = bounds_symmetric(d, n, field).unwrap();
                    let c = |t: &str| b.component(t).unwrap().ln_value;
                    assert!(c("kostlan-min-exact") <= c("kostlan-min") + 1e-12);
                    assert!(c("kostlan-expectation-exact") <= c("kostlan-expectation-sharp") + 1e-12);
                    if field == Field::Real {
                        assert!(c("harmonic-min-exact") <= c("harmonic-min") + 1e-12);
                        assert!(c("harmonic-expectation-exact") <= c("harmonic-expectation") + 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn large_d_sandwich_encloses() {
        for n in 2..7u32 {
            for d in (n * n).div_ceil(4).max(3)..60 {
                for field in [Field::Real, Field::Complex] {
                    assert!(large_d_encloses(d, n, field).unwrap(), "d={d} n={n} {field}");
                }
            }
        }
        assert!(bounds_symmetric_large_d(3, 4, Field::Real).is_err());
    }

    #[test]
    fn partial_examples() {
        let b = bounds_partially_symmetric(&[2, 3], &[2, 2], Field::Complex).unwrap();
        assert!(close(b.lower, 12f64.powf(-0.5), 1e-13));
        let b = bounds_partially_symmetric(&[2, 3], &[2, 2], Field::Real).unwrap();
        assert!(close(b.lower, 0.25, 1e-13));
        assert!(matches!(
            bounds_partially_symmetric(&[2, 2], &[3, 3], Field::Real),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn partial_reduces_to_symmetric() {
        for field in [Field::Real, Field::Complex] {
            let p = bounds_partially_symmetric(&[5], &[3], field).unwrap();
            let s = bounds_symmetric(5, 3, field).unwrap();
            let pc = |t: &str| p.component(t).unwrap().value;
            let sc = |t: &str| s.component(t).unwrap().value;
            assert!(close(pc("partial-headline"), sc("sym-headline"), 1e-13));
            assert!(close(pc("partial-lower-integral"), sc("sym-lower-integral"), 1e-13));
            assert!(close(pc("partial-lower-general"), sc("sym-lower-general"), 1e-13));
            assert!(close(pc("kostlan-multi-min"), sc("kostlan-min"), 1e-13));
            assert!(close(pc("kostlan-multi-min-exact"), sc("kostlan-min-exact"), 1e-13));
        }
    }

    #[test]
    fn covering_constant_example() {
        let c = log_covering_constant(3.0, &[2, 2, 2]).unwrap();
        assert!((c.ln_c - (12.0 + 6.0 * 9f64.ln() - 3.0 * 9f64.ln())).abs() < 1e-12);
        assert!((c.ln_c - 18.592).abs() < 1e-3);
        assert!(c.lower <= c.ln_c && c.ln_c <= c.upper);
        assert!(log_covering_constant(0.5, &[2]).is_err());
    }

    #[test]
    fn projection_values() {
        assert!(close(projection_moment(10, 3, 2.0, Field::Real).unwrap(), 0.3f64.sqrt(), 1e-12));
        for l in [1.0, 2.0, 5.0] {
            assert!(close(projection_moment(7, 7, l, Field::Complex).unwrap(), 1.0, 1e-12));
        }
        let tb = projection_tail_bound(4, 4, 0.1, Field::Real).unwrap();
        assert!(tb.raw > 1.0 && tb.clipped == 1.0);
        assert!(projection_tail_bound(3, 4, 0.1, Field::Real).is_err());
    }

    #[test]
    fn conversions() {
        assert!((a1_series() - 2.62509).abs() < 1e-4);
        assert!(close(tail_to_min(1.0, 1.0).unwrap(), 1.0, 1e-15));
        assert!(close(tail_to_expectation(1.0, 1.0).unwrap(), 2.0 * 2f64.sqrt(), 1e-14));
        assert!(tail_to_expectation(0.0, 1.0).is_err());
    }

    #[test]
    fn tail_model_values() {
        let model = ModelSpec::GaussianTensor { shape: vec![2, 2, 2], field: Field::Real };
        let tb = tail_bound_model(&model, 1.0).unwrap();
        let ln_c = log_covering_constant(1.0, &[2, 2, 2]).unwrap().ln_c;
        assert!(close(tb.log_raw, LN_3 + ln_c - 8.0 / 12.0, 1e-13));

        let k = model_tail_constants(&ModelSpec::Kostlan { d: 3, n: 2, field: Field::Real }).unwrap();
        assert!(close(k.rate, 4.0 / 12.0, 1e-13));

        for (d, n) in [(3u32, 2u32), (4, 3), (7, 5)] {
            let h = model_tail_constants(&ModelSpec::Harmonic { d, n }).unwrap();
            let want = 2.0 * 3f64.sqrt() * 2f64.powf(-f64::from(d) / 2.0) * (-0.5 * ln_half_binomial(d, n)).exp();
            assert!(close(h.scale(), want, 1e-12));
        }
        assert!(matches!(
            tail_bound_model(&ModelSpec::Identity { n: 3 }, 0.5),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn io_jacobian_examples() {
        assert_eq!(io_jacobian_det(&[vec![0.0; 3], vec![0.0]]), 1.0);
        let z = vec![0.6, 0.8];
        assert!(close(io_jacobian_det(&[z]), 2f64.powf(-1.5), 1e-14));
    }

    #[test]
    fn asymptotic_examples() {
        let (lo, mid, hi) = form_dimension_sandwich(16, 4).unwrap();
        assert!(close(mid, 969f64.powf(-0.5), 1e-12));
        assert!(close(hi, (6.0f64 / 4096.0).sqrt(), 1e-12));
        assert!(close(lo, hi * 0.75, 1e-12));
        assert!(lo <= mid && mid <= hi);
        let (lo, mid, hi) = gautschi(1).unwrap();
        assert!(close(mid, PI.sqrt() / 2.0, 1e-12));
        assert!(lo <= mid && mid <= hi);
    }
}
