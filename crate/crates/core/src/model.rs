//! Named random models and deterministic fixtures, shared by the bound
//! tables, the Monte Carlo harness and the command line.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polynomial::{HomogPoly, MultiHomogPoly};
use crate::random::{
    gaussian_multi_harmonic, gaussian_harmonic, gaussian_tensor, kostlan_form, kostlan_multi, standard_gaussian,
    uniform_sphere,
};
use crate::spectral::Target;
use crate::tensor::{Field, Tensor, UnitVectorTuple};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum ModelSpec {
    GaussianTensor { shape: Vec<usize>, field: Field },
    Kostlan { d: u32, n: u32, field: Field },
    Harmonic { d: u32, n: u32 },
    KostlanMulti { ds: Vec<u32>, ns: Vec<u32>, field: Field },
    MultiHarmonic { ds: Vec<u32>, ns: Vec<u32> },
    /// `λ x¹ ⊗ ⋯ ⊗ x^d` with random unit factors and a random nonzero `λ`.
    RankOne { shape: Vec<usize>, field: Field },
    /// The `n × n` identity matrix (every sample identical).
    Identity { n: usize },
}

pub const MODEL_NAMES: [&str; 7] = [
    "gaussian-tensor",
    "kostlan",
    "harmonic",
    "kostlan-multi",
    "multi-harmonic",
    "rank-one",
    "identity",
];

/// One drawn instance.
#[derive(Debug, Clone)]
pub enum Sample {
    Tensor(Tensor),
    Poly(HomogPoly),
    Multi(MultiHomogPoly),
}

impl Sample {
    pub fn target(&self) -> Target<'_> {
        match self {
            Sample::Tensor(t) => Target::Tensor(t),
            Sample::Poly(f) => Target::Poly(f),
            Sample::Multi(f) => Target::Multi(f),
        }
    }
}

fn check_blocks(ds: &[u32], ns: &[u32]) -> Result<()> {
    if ds.is_empty() || ds.len() != ns.len() {
        return Err(Error::Usage(format!("--ds and --ns need the same nonzero length, got {ds:?} and {ns:?}")));
    }
    Ok(())
}

impl ModelSpec {
    /// Builds a model from its command-line name and parameters.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        name: &str,
        shape: Option<Vec<usize>>,
        d: Option<u32>,
        n: Option<u32>,
        ds: Option<Vec<u32>>,
        ns: Option<Vec<u32>>,
        field: Field,
    ) -> Result<ModelSpec> {
        let need = |what: &str| Error::Usage(format!("model `{name}` needs --{what}"));
        let spec = match name {
            "gaussian-tensor" => ModelSpec::GaussianTensor {
                shape: shape.ok_or_else(|| need("shape"))?,
                field,
            },
            "kostlan" => ModelSpec::Kostlan {
                d: d.ok_or_else(|| need("d"))?,
                n: n.ok_or_else(|| need("n"))?,
                field,
            },
            "harmonic" => {
                if field == Field::Complex {
                    return Err(Error::UnsupportedField("harmonic models are real".into()));
                }
                ModelSpec::Harmonic {
                    d: d.ok_or_else(|| need("d"))?,
                    n: n.ok_or_else(|| need("n"))?,
                }
            }
            "kostlan-multi" => ModelSpec::KostlanMulti {
                ds: ds.ok_or_else(|| need("ds"))?,
                ns: ns.ok_or_else(|| need("ns"))?,
                field,
            },
            "multi-harmonic" => {
                if field == Field::Complex {
                    return Err(Error::UnsupportedField("harmonic models are real".into()));
                }
                ModelSpec::MultiHarmonic {
                    ds: ds.ok_or_else(|| need("ds"))?,
                    ns: ns.ok_or_else(|| need("ns"))?,
                }
            }
            "rank-one" => ModelSpec::RankOne {
                shape: shape.ok_or_else(|| need("shape"))?,
                field,
            },
            "identity" => ModelSpec::Identity {
                n: n.ok_or_else(|| need("n"))? as usize,
            },
            other => {
                return Err(Error::Usage(format!(
                    "unknown model `{other}` (expected one of {})",
                    MODEL_NAMES.join(", ")
                )))
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::GaussianTensor { shape, .. } | ModelSpec::RankOne { shape, .. } => {
                if shape.is_empty() || shape.contains(&0) {
                    return Err(Error::Usage(format!("invalid shape {shape:?}")));
                }
            }
            ModelSpec::Kostlan { n, .. } => {
                if *n == 0 {
                    return Err(Error::Usage("--n must be positive".into()));
                }
            }
            ModelSpec::Harmonic { n, .. } => {
                if *n < 2 {
                    return Err(Error::Domain(format!("harmonic spaces need n ≥ 2, got n={n}")));
                }
            }
            ModelSpec::KostlanMulti { ds, ns, .. } => {
                check_blocks(ds, ns)?;
                if ns.contains(&0) {
                    return Err(Error::Usage("every block needs n ≥ 1".into()));
                }
            }
            ModelSpec::MultiHarmonic { ds, ns } => {
                check_blocks(ds, ns)?;
                if ns.iter().any(|&n| n < 2) {
                    return Err(Error::Domain("harmonic blocks need n ≥ 2".into()));
                }
            }
            ModelSpec::Identity { n } => {
                if *n == 0 {
                    return Err(Error::Usage("--n must be positive".into()));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::GaussianTensor { .. } => "gaussian-tensor",
            ModelSpec::Kostlan { .. } => "kostlan",
            ModelSpec::Harmonic { .. } => "harmonic",
            ModelSpec::KostlanMulti { .. } => "kostlan-multi",
            ModelSpec::MultiHarmonic { .. } => "multi-harmonic",
            ModelSpec::RankOne { .. } => "rank-one",
            ModelSpec::Identity { .. } => "identity",
        }
    }

    pub fn field(&self) -> Field {
        match self {
            ModelSpec::GaussianTensor { field, .. }
            | ModelSpec::Kostlan { field, .. }
            | ModelSpec::KostlanMulti { field, .. }
            | ModelSpec::RankOne { field, .. } => *field,
            ModelSpec::Harmonic { .. } | ModelSpec::MultiHarmonic { .. } | ModelSpec::Identity { .. } => Field::Real,
        }
    }

    /// Short human-readable description, e.g. `kostlan d=4 n=3 real`.
    pub fn describe(&self) -> String {
        let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        let joinu = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        match self {
            ModelSpec::GaussianTensor { shape, field } | ModelSpec::RankOne { shape, field } => {
                format!("{} shape={} {field}", self.name(), joinu(shape))
            }
            ModelSpec::Kostlan { d, n, field } => format!("kostlan d={d} n={n} {field}"),
            ModelSpec::Harmonic { d, n } => format!("harmonic d={d} n={n} real"),
            ModelSpec::KostlanMulti { ds, ns, field } => {
                format!("kostlan-multi ds={} ns={} {field}", join(ds), join(ns))
            }
            ModelSpec::MultiHarmonic { ds, ns } => format!("multi-harmonic ds={} ns={} real", join(ds), join(ns)),
            ModelSpec::Identity { n } => format!("identity n={n}"),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Sample> {
        Ok(match self {
            ModelSpec::GaussianTensor { shape, field } => Sample::Tensor(gaussian_tensor(shape, *field, rng)?),
            ModelSpec::Kostlan { d, n, field } => Sample::Poly(kostlan_form(*d, *n as usize, *field, rng)?),
            ModelSpec::Harmonic { d, n } => Sample::Poly(gaussian_harmonic(*d, *n, rng)?),
            ModelSpec::KostlanMulti { ds, ns, field } => {
                let ns: Vec<usize> = ns.iter().map(|&n| n as usize).collect();
                Sample::Multi(kostlan_multi(ds, &ns, *field, rng)?)
            }
            ModelSpec::MultiHarmonic { ds, ns } => Sample::Multi(gaussian_multi_harmonic(ds, ns, rng)?),
            ModelSpec::RankOne { shape, field } => {
                let xs = shape
                    .iter()
                    .map(|&n| uniform_sphere(n, *field, rng))
                    .collect::<Result<Vec<_>>>()?;
                let mut lambda = standard_gaussian(*field, rng);
                if lambda.norm() < 1e-3 {
                    lambda += 1.0;
                }
                Sample::Tensor(Tensor::rank_one(lambda, &UnitVectorTuple::normalized(xs, *field)?)?)
            }
            ModelSpec::Identity { n } => Sample::Tensor(Tensor::identity(*n)?),
        })
    }
}
