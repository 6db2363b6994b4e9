//! Dense tensors over ℝ or ℂ with Frobenius geometry and the multilinear
//! contractions used by alternating spectral-norm maximization.
//!
//! Storage is row-major with the last index fastest. Complex and real tensors
//! share one representation (`Complex64` entries) distinguished by a
//! [`Field`] tag; real tensors keep every imaginary part exactly zero.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance on `| ‖x‖₂ − 1 |` for vectors that claim to be unit.
pub const UNIT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    /// Real dimension of one copy of the scalar field (1 for ℝ, 2 for ℂ).
    pub fn k(self) -> u32 {
        match self {
            Field::Real => 1,
            Field::Complex => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Field::Real => "real",
            Field::Complex => "complex",
        }
    }
}

impl std::str::FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "real" | "r" => Ok(Field::Real),
            "complex" | "c" => Ok(Field::Complex),
            other => Err(Error::Usage(format!("unknown field `{other}` (expected real|complex)"))),
        }
    }
}

impl std::fmt::Display for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

pub(crate) fn check_field_values(field: Field, values: &[C64], what: &str) -> Result<()> {
    if field == Field::Real && values.iter().any(|z| z.im != 0.0) {
        return Err(Error::Field(format!("{what} tagged real has nonzero imaginary parts")));
    }
    Ok(())
}

pub fn vector_norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Bilinear pairing `Σ v_i x_i` (no conjugation).
pub fn pair(v: &[C64], x: &[C64]) -> C64 {
    v.iter().zip(x).map(|(a, b)| a * b).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    field: Field,
    data: Vec<C64>,
}

impl Tensor {
    pub fn new(shape: Vec<usize>, field: Field, data: Vec<C64>) -> Result<Self> {
        validate_shape(&shape)?;
        let len: usize = shape.iter().product();
        if data.len() != len {
            return Err(Error::Dimension(format!(
                "data length {} does not match shape {:?} (expected {len})",
                data.len(),
                shape
            )));
        }
        check_field_values(field, &data, "tensor")?;
        Ok(Tensor { shape, field, data })
    }

    pub fn from_real(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        Tensor::new(shape, Field::Real, data.into_iter().map(|x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(shape: Vec<usize>, field: Field) -> Result<Self> {
        validate_shape(&shape)?;
        let len = shape.iter().product();
        Ok(Tensor {
            shape,
            field,
            data: vec![C64::new(0.0, 0.0); len],
        })
    }

    /// The real `n × n` identity matrix as a 2-tensor.
    pub fn identity(n: usize) -> Result<Self> {
        let mut t = Tensor::zeros(vec![n, n], Field::Real)?;
        for i in 0..n {
            t.data[i * n + i] = C64::new(1.0, 0.0);
        }
        Ok(t)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn is_cubical(&self) -> bool {
        self.shape.windows(2).all(|w| w[0] == w[1])
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| *z == C64::new(0.0, 0.0))
    }

    pub fn get(&self, index: &[usize]) -> Result<C64> {
        Ok(self.data[self.flat_index(index)?])
    }

    pub fn flat_index(&self, index: &[usize]) -> Result<usize> {
        if index.len() != self.shape.len() {
            return Err(Error::Index(format!(
                "multi-index of length {} for order-{} tensor",
                index.len(),
                self.shape.len()
            )));
        }
        let mut flat = 0;
        for (&i, &n) in index.iter().zip(&self.shape) {
            if i >= n {
                return Err(Error::Index(format!("index {i} out of range for mode of size {n}")));
            }
            flat = flat * n + i;
        }
        Ok(flat)
    }

    /// Inverse of [`Tensor::flat_index`].
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.shape.len()];
        for (slot, &n) in idx.iter_mut().zip(&self.shape).rev() {
            *slot = flat % n;
            flat /= n;
        }
        idx
    }

    pub fn scaled(&self, c: C64) -> Tensor {
        let field = if c.im != 0.0 { Field::Complex } else { self.field };
        Tensor {
            shape: self.shape.clone(),
            field,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    fn check_compatible(&self, other: &Tensor) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::Dimension(format!("shapes {:?} and {:?} differ", self.shape, other.shape)));
        }
        if self.field != other.field {
            return Err(Error::Field(format!("fields {} and {} differ", self.field, other.field)));
        }
        Ok(())
    }

    /// Frobenius product `Σ conj(t) t'`, conjugate-linear in `self`.
    pub fn frobenius_inner(&self, other: &Tensor) -> Result<C64> {
        self.check_compatible(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `λ x¹ ⊗ ⋯ ⊗ x^d`.
    pub fn rank_one(lambda: C64, xs: &UnitVectorTuple) -> Result<Tensor> {
        let shape: Vec<usize> = xs.vectors.iter().map(Vec::len).collect();
        let mut field = xs.field;
        if lambda.im != 0.0 {
            field = Field::Complex;
        }
        let mut data = vec![lambda];
        for v in &xs.vectors {
            let mut next = Vec::with_capacity(data.len() * v.len());
            for a in &data {
                for b in v {
                    next.push(a * b);
                }
            }
            data = next;
        }
        Tensor::new(shape, field, data)
    }

    /// `⟨T, x¹ ⊗ ⋯ ⊗ x^d⟩ = Σ conj(t_I) x¹_{i₁} ⋯ x^d_{i_d}`.
    pub fn multilinear(&self, xs: &[Vec<C64>]) -> Result<C64> {
        let v = self.contract_all_but(xs, self.order() - 1)?;
        Ok(pair(&v, &xs[self.order() - 1]))
    }

    /// The vector `v_i = ⟨T, x¹ ⊗ ⋯ ⊗ e_i ⊗ ⋯ ⊗ x^d⟩` (slot `j` replaced by
    /// `e_i`); the value of slot `j` in `xs` is ignored. Satisfies
    /// `Σ_i v_i x^j_i = ⟨T, x¹ ⊗ ⋯ ⊗ x^d⟩`.
    pub fn contract_all_but(&self, xs: &[Vec<C64>], j: usize) -> Result<Vec<C64>> {
        let d = self.order();
        if j >= d {
            return Err(Error::Index(format!("mode {j} out of range for order-{d} tensor")));
        }
        if xs.len() != d {
            return Err(Error::Dimension(format!("{} vectors supplied for order-{d} tensor", xs.len())));
        }
        for (k, (x, &n)) in xs.iter().zip(&self.shape).enumerate() {
            if k != j && x.len() != n {
                return Err(Error::Dimension(format!("vector {k} has length {} but mode size is {n}", x.len())));
            }
        }
        // Contract trailing modes first (cache friendly), then leading ones.
        let nj = self.shape[j];
        let lead: usize = self.shape[..j].iter().product();
        let trail_shape = &self.shape[j + 1..];
        let trail: usize = trail_shape.iter().product();

        // Weights of the trailing block: w[r] = ∏_{k>j} x^k_{i_k}.
        let trail_w = outer_weights(&xs[j + 1..], trail_shape);
        let lead_w = outer_weights(&xs[..j], &self.shape[..j]);

        let mut v = vec![C64::new(0.0, 0.0); nj];
        for (l, lw) in lead_w.iter().enumerate().take(lead) {
            for (i, vi) in v.iter_mut().enumerate() {
                let base = (l * nj + i) * trail;
                let block = &self.data[base..base + trail];
                let s: C64 = block.iter().zip(&trail_w).map(|(t, w)| t.conj() * w).sum();
                *vi += lw * s;
            }
        }
        Ok(v)
    }

    /// Average over all index permutations. Equivalent to averaging each
    /// entry over its orbit (entries sharing the same index multiset).
    pub fn symmetrize(&self) -> Result<Tensor> {
        self.require_cubical()?;
        let mut sums: HashMap<Vec<usize>, (C64, usize)> = HashMap::new();
        for flat in 0..self.len() {
            let mut key = self.multi_index(flat);
            key.sort_unstable();
            let e = sums.entry(key).or_insert((C64::new(0.0, 0.0), 0));
            e.0 += self.data[flat];
            e.1 += 1;
        }
        let data = (0..self.len())
            .map(|flat| {
                let mut key = self.multi_index(flat);
                key.sort_unstable();
                let (s, c) = sums[&key];
                s / c as f64
            })
            .collect();
        Ok(Tensor {
            shape: self.shape.clone(),
            field: self.field,
            data,
        })
    }

    /// Max entry deviation from the symmetrized tensor is at most `tol`.
    pub fn is_symmetric(&self, tol: f64) -> Result<bool> {
        let sym = self.symmetrize()?;
        Ok(self.max_abs_diff(&sym) <= tol)
    }

    pub fn max_abs_diff(&self, other: &Tensor) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn require_cubical(&self) -> Result<()> {
        if !self.is_cubical() {
            return Err(Error::Shape(format!("shape {:?} is not cubical", self.shape)));
        }
        Ok(())
    }
}

fn validate_shape(shape: &[usize]) -> Result<()> {
    if shape.is_empty() {
        return Err(Error::Shape("tensor order must be at least 1".into()));
    }
    if shape.contains(&0) {
        return Err(Error::Shape(format!("shape {shape:?} has a zero mode")));
    }
    Ok(())
}

/// Row-major outer product of the given vectors (the empty product is `[1]`).
fn outer_weights(xs: &[Vec<C64>], shape: &[usize]) -> Vec<C64> {
    let mut w = vec![C64::new(1.0, 0.0)];
    for (x, &n) in xs.iter().zip(shape) {
        let mut next = Vec::with_capacity(w.len() * n);
        for a in &w {
            for b in &x[..n] {
                next.push(a * b);
            }
        }
        w = next;
    }
    w
}

/// A tuple of unit vectors `(x¹, …, x^d)`, one per tensor mode.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVectorTuple {
    vectors: Vec<Vec<C64>>,
    field: Field,
}

impl UnitVectorTuple {
    pub fn new(vectors: Vec<Vec<C64>>, field: Field) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::Shape("empty vector tuple".into()));
        }
        for (j, v) in vectors.iter().enumerate() {
            if v.is_empty() {
                return Err(Error::Shape(format!("vector {j} is empty")));
            }
            check_field_values(field, v, "vector")?;
            let norm = vector_norm(v);
            if (norm - 1.0).abs() > UNIT_TOLERANCE {
                return Err(Error::Precondition(format!("vector {j} has norm {norm}, expected 1")));
            }
        }
        Ok(UnitVectorTuple { vectors, field })
    }

    /// Normalizes each vector first; fails on zero vectors.
    pub fn normalized(vectors: Vec<Vec<C64>>, field: Field) -> Result<Self> {
        let vectors = vectors
            .into_iter()
            .enumerate()
            .map(|(j, v)| {
                let norm = vector_norm(&v);
                if norm == 0.0 {
                    return Err(Error::Precondition(format!("vector {j} is zero")));
                }
                Ok(v.into_iter().map(|z| z / norm).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        UnitVectorTuple::new(vectors, field)
    }

    pub fn from_real(vectors: Vec<Vec<f64>>) -> Result<Self> {
        let vectors = vectors
            .into_iter()
            .map(|v| v.into_iter().map(|x| C64::new(x, 0.0)).collect())
            .collect();
        UnitVectorTuple::new(vectors, Field::Real)
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<Vec<C64>> {
        self.vectors
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn e(n: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    }

    #[test]
    fn identity_inner_is_trace() {
        let id = Tensor::identity(2).unwrap();
        assert_eq!(id.frobenius_inner(&id).unwrap(), c(2.0));
    }

    #[test]
    fn disjoint_supports_are_orthogonal() {
        let a = Tensor::from_real(vec![2, 2], vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let b = Tensor::from_real(vec![2, 2], vec![0.0, 3.0, -1.0, 0.0]).unwrap();
        assert_eq!(a.frobenius_inner(&b).unwrap(), c(0.0));
    }

    #[test]
    fn inner_rejects_mismatches() {
        let a = Tensor::zeros(vec![2, 2], Field::Real).unwrap();
        let b = Tensor::zeros(vec![2, 3], Field::Real).unwrap();
        let z = Tensor::zeros(vec![2, 2], Field::Complex).unwrap();
        assert!(matches!(a.frobenius_inner(&b), Err(Error::Dimension(_))));
        assert!(matches!(a.frobenius_inner(&z), Err(Error::Field(_))));
    }

    #[test]
    fn construction_invariants() {
        assert!(matches!(Tensor::zeros(vec![], Field::Real), Err(Error::Shape(_))));
        assert!(matches!(Tensor::zeros(vec![2, 0], Field::Real), Err(Error::Shape(_))));
        assert!(matches!(
            Tensor::from_real(vec![2, 2], vec![1.0; 3]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            Tensor::new(vec![1], Field::Real, vec![C64::new(0.0, 1.0)]),
            Err(Error::Field(_))
        ));
    }

    #[test]
    fn rank_one_basis_tensor() {
        let xs = UnitVectorTuple::from_real(vec![e(3, 0), e(2, 0), e(2, 0)]).unwrap();
        let t = Tensor::rank_one(c(1.0), &xs).unwrap();
        assert_eq!(t.get(&[0, 0, 0]).unwrap(), c(1.0));
        assert!((t.frobenius_norm() - 1.0).abs() < 1e-15);
        assert_eq!(t.data().iter().filter(|z| z.norm() != 0.0).count(), 1);
    }

    #[test]
    fn rank_one_zero_lambda() {
        let xs = UnitVectorTuple::from_real(vec![e(2, 1), e(3, 2)]).unwrap();
        assert!(Tensor::rank_one(c(0.0), &xs).unwrap().is_zero());
    }

    #[test]
    fn rank_one_all_ones() {
        let s = 1.0 / 2f64.sqrt();
        let xs = UnitVectorTuple::from_real(vec![vec![s, s], vec![s, s]]).unwrap();
        let t = Tensor::rank_one(c(2.0), &xs).unwrap();
        // Elementwise oracle: 2 · (1/√2)(1/√2) = 1.
        for z in t.data() {
            assert!((z - c(1.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn rank_one_rejects_non_unit() {
        assert!(matches!(
            UnitVectorTuple::from_real(vec![vec![1.0, 1.0]]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn contract_matrix_vector() {
        // M = [[1, 2, 3], [4, 5, 6]], y = (1, 0, -1)/√2
        let m = Tensor::from_real(vec![2, 3], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let xs = vec![vec![c(1.0), c(0.0)], vec![c(s), c(0.0), c(-s)]];
        let v = m.contract_all_but(&xs, 0).unwrap();
        assert!((v[0] - c(-2.0 * s)).norm() < 1e-15);
        assert!((v[1] - c(-2.0 * s)).norm() < 1e-15);
    }

    #[test]
    fn contract_rank_one_recovers_factor() {
        let s = 1.0 / 5f64.sqrt();
        let x1 = vec![s, 2.0 * s];
        let x2 = vec![0.6, 0.0, 0.8];
        let x3 = vec![0.0, 1.0];
        let xs = UnitVectorTuple::from_real(vec![x1, x2.clone(), x3]).unwrap();
        let t = Tensor::rank_one(c(3.0), &xs).unwrap();
        let v = t.contract_all_but(xs.vectors(), 1).unwrap();
        for (a, b) in v.iter().zip(&x2) {
            assert!((a - c(3.0 * b)).norm() < 1e-14);
        }
    }

    #[test]
    fn contract_zero_and_bad_index() {
        let t = Tensor::zeros(vec![2, 2], Field::Real).unwrap();
        let xs = vec![vec![c(1.0), c(0.0)], vec![c(0.0), c(1.0)]];
        assert!(t.contract_all_but(&xs, 1).unwrap().iter().all(|z| z.norm() == 0.0));
        assert!(matches!(t.contract_all_but(&xs, 2), Err(Error::Index(_))));
    }

    #[test]
    fn symmetrize_matrix() {
        let m = Tensor::from_real(vec![2, 2], vec![1.0, 2.0, 4.0, 3.0]).unwrap();
        let s = m.symmetrize().unwrap();
        assert_eq!(s.data(), &[c(1.0), c(3.0), c(3.0), c(3.0)][..]);
    }

    #[test]
    fn symmetrize_basis_cube() {
        let xs = UnitVectorTuple::from_real(vec![e(2, 0), e(2, 0), e(2, 1)]).unwrap();
        let t = Tensor::rank_one(c(1.0), &xs).unwrap();
        let s = t.symmetrize().unwrap();
        for idx in [[0, 0, 1], [0, 1, 0], [1, 0, 0]] {
            assert!((s.get(&idx).unwrap() - c(1.0 / 3.0)).norm() < 1e-16);
        }
        assert_eq!(s.get(&[0, 0, 0]).unwrap(), c(0.0));
        assert!(s.is_symmetric(1e-15).unwrap());
        assert!(!t.is_symmetric(1e-3).unwrap());
    }

    #[test]
    fn symmetrize_requires_cubical() {
        let t = Tensor::zeros(vec![2, 3], Field::Real).unwrap();
        assert!(matches!(t.symmetrize(), Err(Error::Shape(_))));
    }
}
