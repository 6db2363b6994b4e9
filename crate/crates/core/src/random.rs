//! Gaussian ensembles on tensors and forms, sphere sampling, and the
//! projection-ratio law.
//!
//! Every random object is drawn from a [`ChaCha8Rng`] stream derived from
//! `(master seed, sample index, purpose tag)`, so results never depend on
//! how work is scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonic::harmonic_basis;
use crate::polynomial::{monomials, HomogPoly, MultiHomogPoly};
use crate::tensor::{vector_norm, Field, Tensor, C64};

/// χ² draws with at most this many degrees of freedom are sums of squares.
pub const CHI_SQUARED_DIRECT_MAX: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(tag: &str) -> u64 {
    tag.bytes()
        .fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

impl SeedSpec {
    pub fn new(master_seed: u64) -> Self {
        SeedSpec { master_seed }
    }

    /// Seed of the stream for `(index, tag)`.
    pub fn derive(&self, index: u64, tag: &str) -> u64 {
        let a = splitmix64(self.master_seed ^ fnv1a(tag));
        splitmix64(a ^ splitmix64(index.wrapping_add(0x632b_e59b_d9b4_e019)))
    }

    pub fn rng(&self, index: u64, tag: &str) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.derive(index, tag))
    }
}

/// Standard Gaussian of the field: `N(0,1)` for ℝ, real and imaginary
/// parts `N(0, 1/2)` for ℂ.
pub fn standard_gaussian<R: Rng + ?Sized>(field: Field, rng: &mut R) -> C64 {
    match field {
        Field::Real => C64::new(rng.sample(StandardNormal), 0.0),
        Field::Complex => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(s * re, s * im)
        }
    }
}

pub fn gaussian_tensor<R: Rng + ?Sized>(shape: &[usize], field: Field, rng: &mut R) -> Result<Tensor> {
    let len: usize = shape.iter().product();
    let data = (0..len).map(|_| standard_gaussian(field, rng)).collect();
    Tensor::new(shape.to_vec(), field, data)
}

/// Kostlan form: `f_α = √binom(d,α) g_α` with i.i.d. standard Gaussians `g_α`.
pub fn kostlan_form<R: Rng + ?Sized>(d: u32, n: usize, field: Field, rng: &mut R) -> Result<HomogPoly> {
    if n == 0 {
        return Err(Error::Domain("forms need at least one variable".into()));
    }
    let mons = monomials(n, d);
    let coeffs = mons
        .weights()
        .iter()
        .map(|w| standard_gaussian(field, rng) * w.sqrt())
        .collect();
    HomogPoly::new(n, d, field, coeffs)
}

pub fn kostlan_multi<R: Rng + ?Sized>(ds: &[u32], ns: &[usize], field: Field, rng: &mut R) -> Result<MultiHomogPoly> {
    let zero = MultiHomogPoly::zeros(ns, ds, field)?;
    let coeffs = (0..zero.coeffs().len())
        .map(|k| standard_gaussian(field, rng) * zero.weight(k).sqrt())
        .collect();
    MultiHomogPoly::new(ns, ds, field, coeffs)
}

/// `Σ g_i b_i` over the Bombieri–Weyl orthonormal basis of `H_{d,n}`.
pub fn gaussian_harmonic<R: Rng + ?Sized>(d: u32, n: u32, rng: &mut R) -> Result<HomogPoly> {
    let basis = harmonic_basis(d, n)?;
    let g: Vec<f64> = (0..basis.dimension()).map(|_| rng.sample(StandardNormal)).collect();
    basis.combination(&g)
}

/// Gaussian element of `H_{d₁,n₁} ⊗ ⋯ ⊗ H_{d_m,n_m}` over the product basis.
pub fn gaussian_multi_harmonic<R: Rng + ?Sized>(ds: &[u32], ns: &[u32], rng: &mut R) -> Result<MultiHomogPoly> {
    if ds.is_empty() || ds.len() != ns.len() {
        return Err(Error::Shape(format!("need matching nonempty block lists, got d={ds:?} n={ns:?}")));
    }
    let bases = ds
        .iter()
        .zip(ns)
        .map(|(&d, &n)| harmonic_basis(d, n))
        .collect::<Result<Vec<_>>>()?;
    let dims: Vec<usize> = bases.iter().map(|b| b.dimension()).collect();
    let total: usize = dims.iter().product();
    let mut coeffs: Vec<f64> = (0..total).map(|_| rng.sample(StandardNormal)).collect();
    // Replace the leading block axis by monomial coordinates, one mode at a
    // time, cycling the axes so the next block leads.
    let mut shape = dims.clone();
    for b in &bases {
        let rows = b.elements().first().map_or(0, |e| e.coeffs().len());
        let rest: usize = shape[1..].iter().product();
        let mut next = vec![0.0; rows * rest];
        for (i, e) in b.elements().iter().enumerate() {
            let src = &coeffs[i * rest..(i + 1) * rest];
            for (r, c) in e.coeffs().iter().enumerate() {
                if c.re == 0.0 {
                    continue;
                }
                // Write transposed: new layout is (rest..., rows).
                for (q, s) in src.iter().enumerate() {
                    next[q * rows + r] += c.re * s;
                }
            }
        }
        coeffs = next;
        shape.remove(0);
        shape.push(rows);
    }
    let nsu: Vec<usize> = ns.iter().map(|&n| n as usize).collect();
    MultiHomogPoly::new(&nsu, ds, Field::Real, coeffs.into_iter().map(|x| C64::new(x, 0.0)).collect())
}

/// Uniform point on the unit sphere of `K^n` (realified dimension `k n`).
pub fn uniform_sphere<R: Rng + ?Sized>(n: usize, field: Field, rng: &mut R) -> Result<Vec<C64>> {
    if n == 0 {
        return Err(Error::Domain("sphere needs n ≥ 1".into()));
    }
    loop {
        let v: Vec<C64> = (0..n).map(|_| standard_gaussian(field, rng)).collect();
        let norm = vector_norm(&v);
        if norm > 1e-300 {
            return Ok(v.into_iter().map(|z| z / norm).collect());
        }
    }
}

fn chi_squared<R: Rng + ?Sized>(dof: usize, rng: &mut R) -> f64 {
    if dof == 0 {
        return 0.0;
    }
    if dof <= CHI_SQUARED_DIRECT_MAX {
        (0..dof)
            .map(|_| {
                let g: f64 = rng.sample(StandardNormal);
                g * g
            })
            .sum()
    } else {
        Gamma::new(dof as f64 / 2.0, 2.0).expect("positive shape").sample(rng)
    }
}

fn check_projection(big_n: usize, k: usize) -> Result<()> {
    if k == 0 || k > big_n {
        return Err(Error::Domain(format!("need 1 ≤ k ≤ N, got k={k}, N={big_n}")));
    }
    Ok(())
}

/// `‖Pr‖/‖r‖` for a Gaussian `r ∈ ℝ^N` and a rank-`k` orthogonal projection,
/// sampled as `√(v/(v+z))` with `v ~ χ²_k`, `z ~ χ²_{N−k}`.
pub fn projection_ratio_sample<R: Rng + ?Sized>(big_n: usize, k: usize, rng: &mut R) -> Result<f64> {
    check_projection(big_n, k)?;
    let v = chi_squared(k, rng);
    let z = chi_squared(big_n - k, rng);
    Ok((v / (v + z)).sqrt())
}

/// A fixed rank-`k` projection of `ℝ^N`, stored as an orthonormal frame.
#[derive(Debug, Clone)]
pub struct Projection {
    frame: Vec<Vec<f64>>,
    big_n: usize,
}

impl Projection {
    /// Frame obtained by Gram–Schmidt on `k` Gaussian vectors.
    pub fn random<R: Rng + ?Sized>(big_n: usize, k: usize, rng: &mut R) -> Result<Self> {
        check_projection(big_n, k)?;
        let mut frame: Vec<Vec<f64>> = Vec::with_capacity(k);
        while frame.len() < k {
            let mut v: Vec<f64> = (0..big_n).map(|_| rng.sample(StandardNormal)).collect();
            for _ in 0..2 {
                for q in &frame {
                    let p: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
                    v.iter_mut().zip(q).for_each(|(x, y)| *x -= p * y);
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-8 {
                frame.push(v.into_iter().map(|x| x / norm).collect());
            }
        }
        Ok(Projection { frame, big_n })
    }

    /// `‖Pr‖/‖r‖` for a fresh Gaussian `r`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let r: Vec<f64> = (0..self.big_n).map(|_| rng.sample(StandardNormal)).collect();
        let total = r.iter().map(|x| x * x).sum::<f64>();
        let proj: f64 = self
            .frame
            .iter()
            .map(|q| {
                let p: f64 = q.iter().zip(&r).map(|(a, b)| a * b).sum();
                p * p
            })
            .sum();
        (proj / total).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_deterministic_and_distinct() {
        let s = SeedSpec::new(42);
        let a: u64 = s.rng(3, "sample").gen();
        let b: u64 = s.rng(3, "sample").gen();
        let c: u64 = s.rng(4, "sample").gen();
        let e: u64 = s.rng(3, "starts").gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, e);
    }

    #[test]
    fn full_projection_is_one() {
        let mut rng = SeedSpec::new(1).rng(0, "t");
        for _ in 0..10 {
            assert_eq!(projection_ratio_sample(7, 7, &mut rng).unwrap(), 1.0);
        }
        assert!(matches!(projection_ratio_sample(3, 4, &mut rng), Err(Error::Domain(_))));
    }

    #[test]
    fn sphere_points_are_unit() {
        let mut rng = SeedSpec::new(9).rng(0, "t");
        for field in [Field::Real, Field::Complex] {
            let x = uniform_sphere(5, field, &mut rng).unwrap();
            assert!((vector_norm(&x) - 1.0).abs() < 1e-14);
        }
        assert!(uniform_sphere(0, Field::Real, &mut rng).is_err());
    }

    #[test]
    fn harmonic_samples_are_harmonic() {
        let mut rng = SeedSpec::new(5).rng(0, "t");
        for (d, n) in [(3, 2), (4, 3), (5, 4)] {
            let f = gaussian_harmonic(d, n, &mut rng).unwrap();
            assert!(f.laplacian().max_abs_coeff() <= 1e-9);
        }
    }

    #[test]
    fn multi_harmonic_blocks_are_harmonic() {
        let mut rng = SeedSpec::new(6).rng(0, "t");
        let f = gaussian_multi_harmonic(&[2, 3], &[3, 2], &mut rng).unwrap();
        let xs = vec![
            uniform_sphere(3, Field::Real, &mut rng).unwrap(),
            uniform_sphere(2, Field::Real, &mut rng).unwrap(),
        ];
        for j in 0..2 {
            assert!(f.partial(&xs, j).unwrap().laplacian().max_abs_coeff() <= 1e-9);
        }
    }
}
