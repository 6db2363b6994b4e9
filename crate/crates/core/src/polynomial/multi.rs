use std::sync::Arc;

use super::monomials::{monomials, Monomials};
use super::HomogPoly;
use crate::error::{Error, Result};
use crate::tensor::{check_field_values, Field, C64};

/// A multi-homogeneous form `F(x¹, …, x^m)` of multi-degree `(d₁, …, d_m)`
/// in blocks of `n₁, …, n_m` variables.
///
/// Coefficients are indexed row-major over the per-block graded-lex monomial
/// indices (last block fastest).
#[derive(Debug, Clone)]
pub struct MultiHomogPoly {
    field: Field,
    blocks: Vec<Arc<Monomials>>,
    coeffs: Vec<C64>,
}

impl MultiHomogPoly {
    pub fn new(ns: &[usize], ds: &[u32], field: Field, coeffs: Vec<C64>) -> Result<Self> {
        let blocks = make_blocks(ns, ds)?;
        let len: usize = blocks.iter().map(|b| b.len()).product();
        if coeffs.len() != len {
            return Err(Error::Dimension(format!("{} coefficients for {len} multi-monomials", coeffs.len())));
        }
        check_field_values(field, &coeffs, "polynomial")?;
        Ok(MultiHomogPoly { field, blocks, coeffs })
    }

    pub fn zeros(ns: &[usize], ds: &[u32], field: Field) -> Result<Self> {
        let blocks = make_blocks(ns, ds)?;
        let len: usize = blocks.iter().map(|b| b.len()).product();
        Ok(MultiHomogPoly {
            field,
            blocks,
            coeffs: vec![C64::new(0.0, 0.0); len],
        })
    }

    pub fn from_terms(ns: &[usize], ds: &[u32], field: Field, terms: &[(Vec<Vec<u32>>, C64)]) -> Result<Self> {
        let mut p = MultiHomogPoly::zeros(ns, ds, field)?;
        for (alphas, c) in terms {
            let flat = p.flat_index(alphas)?;
            p.coeffs[flat] += c;
        }
        check_field_values(field, &p.coeffs, "polynomial")?;
        Ok(p)
    }

    /// The one-block form with the same coefficients.
    pub fn from_homog(f: &HomogPoly) -> MultiHomogPoly {
        MultiHomogPoly {
            field: f.field(),
            blocks: vec![monomials(f.n(), f.degree())],
            coeffs: f.coeffs().to_vec(),
        }
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn ns(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.n()).collect()
    }

    pub fn ds(&self) -> Vec<u32> {
        self.blocks.iter().map(|b| b.degree()).collect()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn block(&self, j: usize) -> &Monomials {
        &self.blocks[j]
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == C64::new(0.0, 0.0))
    }

    pub fn flat_index(&self, alphas: &[Vec<u32>]) -> Result<usize> {
        if alphas.len() != self.blocks.len() {
            return Err(Error::Shape(format!("{} exponent blocks for {} blocks", alphas.len(), self.blocks.len())));
        }
        let mut flat = 0;
        for (alpha, b) in alphas.iter().zip(&self.blocks) {
            let i = b.index_of(alpha).ok_or_else(|| {
                Error::Shape(format!("exponent {alpha:?} is not a degree-{} monomial in {} variables", b.degree(), b.n()))
            })?;
            flat = flat * b.len() + i;
        }
        Ok(flat)
    }

    /// Per-block monomial indices of a flat coefficient index.
    pub fn block_indices(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.blocks.len()];
        for (slot, b) in idx.iter_mut().zip(&self.blocks).rev() {
            *slot = flat % b.len();
            flat /= b.len();
        }
        idx
    }

    /// `binom(d, α) = ∏_j binom(d_j, α(j))` for a flat index.
    pub fn weight(&self, flat: usize) -> f64 {
        self.block_indices(flat)
            .iter()
            .zip(&self.blocks)
            .map(|(&i, b)| b.weights()[i])
            .product()
    }

    fn check_same_space(&self, other: &MultiHomogPoly) -> Result<()> {
        if self.ns() != other.ns() || self.ds() != other.ds() {
            return Err(Error::Shape(format!(
                "block structures differ: n={:?} d={:?} vs n={:?} d={:?}",
                self.ns(),
                self.ds(),
                other.ns(),
                other.ds()
            )));
        }
        if self.field != other.field {
            return Err(Error::Field(format!("fields {} and {} differ", self.field, other.field)));
        }
        Ok(())
    }

    /// Multi-homogeneous Bombieri–Weyl product.
    pub fn bw_inner(&self, other: &MultiHomogPoly) -> Result<C64> {
        self.check_same_space(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .enumerate()
            .map(|(k, (f, g))| f.conj() * g / self.weight(k))
            .sum())
    }

    pub fn bw_norm(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, f)| f.norm_sqr() / self.weight(k))
            .sum::<f64>()
            .sqrt()
    }

    fn check_points(&self, xs: &[Vec<C64>], skip: Option<usize>) -> Result<()> {
        if xs.len() != self.blocks.len() {
            return Err(Error::Shape(format!("{} points for {} blocks", xs.len(), self.blocks.len())));
        }
        for (j, (x, b)) in xs.iter().zip(&self.blocks).enumerate() {
            if Some(j) != skip && x.len() != b.n() {
                return Err(Error::Shape(format!("block {j} point has length {} (expected {})", x.len(), b.n())));
            }
        }
        Ok(())
    }

    /// Values of every monomial of block `j` at `x`.
    fn monomial_values(b: &Monomials, x: &[C64]) -> Vec<C64> {
        let d = b.degree() as usize;
        let pw: Vec<Vec<C64>> = x
            .iter()
            .map(|&xi| {
                let mut p = Vec::with_capacity(d + 1);
                let mut acc = C64::new(1.0, 0.0);
                for _ in 0..=d {
                    p.push(acc);
                    acc *= xi;
                }
                p
            })
            .collect();
        b.exponents()
            .iter()
            .map(|alpha| alpha.iter().enumerate().map(|(i, &a)| pw[i][a as usize]).product())
            .collect()
    }

    pub fn evaluate(&self, xs: &[Vec<C64>]) -> Result<C64> {
        self.check_points(xs, None)?;
        let vals: Vec<Vec<C64>> = self
            .blocks
            .iter()
            .zip(xs)
            .map(|(b, x)| Self::monomial_values(b, x))
            .collect();
        Ok(self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != C64::new(0.0, 0.0))
            .map(|(k, c)| {
                let idx = self.block_indices(k);
                idx.iter().enumerate().fold(*c, |acc, (j, &i)| acc * vals[j][i])
            })
            .sum())
    }

    /// The form `y ↦ F(x¹, …, y, …, x^m)` in block `j` (the entry `xs[j]`
    /// is ignored).
    pub fn partial(&self, xs: &[Vec<C64>], j: usize) -> Result<HomogPoly> {
        if j >= self.blocks.len() {
            return Err(Error::Index(format!("block {j} out of range")));
        }
        self.check_points(xs, Some(j))?;
        let vals: Vec<Option<Vec<C64>>> = self
            .blocks
            .iter()
            .zip(xs)
            .enumerate()
            .map(|(k, (b, x))| (k != j).then(|| Self::monomial_values(b, x)))
            .collect();
        let bj = &self.blocks[j];
        let mut coeffs = vec![C64::new(0.0, 0.0); bj.len()];
        for (k, c) in self.coeffs.iter().enumerate() {
            if *c == C64::new(0.0, 0.0) {
                continue;
            }
            let idx = self.block_indices(k);
            let mut w = *c;
            for (blk, &i) in idx.iter().enumerate() {
                if let Some(v) = &vals[blk] {
                    w *= v[i];
                }
            }
            coeffs[idx[j]] += w;
        }
        let field = if xs.iter().flatten().any(|z| z.im != 0.0) {
            Field::Complex
        } else {
            self.field
        };
        HomogPoly::new(bj.n(), bj.degree(), field, coeffs)
    }

    /// Tensor product `f₁(x¹)⋯f_m(x^m)` of real or complex forms.
    pub fn product_of(forms: &[&HomogPoly]) -> Result<MultiHomogPoly> {
        if forms.is_empty() {
            return Err(Error::Shape("need at least one factor".into()));
        }
        let ns: Vec<usize> = forms.iter().map(|f| f.n()).collect();
        let ds: Vec<u32> = forms.iter().map(|f| f.degree()).collect();
        let field = if forms.iter().any(|f| f.field() == Field::Complex) {
            Field::Complex
        } else {
            Field::Real
        };
        let mut coeffs = vec![C64::new(1.0, 0.0)];
        for f in forms {
            let mut next = Vec::with_capacity(coeffs.len() * f.coeffs().len());
            for a in &coeffs {
                for b in f.coeffs() {
                    next.push(a * b);
                }
            }
            coeffs = next;
        }
        MultiHomogPoly::new(&ns, &ds, field, coeffs)
    }
}

fn make_blocks(ns: &[usize], ds: &[u32]) -> Result<Vec<Arc<Monomials>>> {
    if ns.is_empty() || ns.len() != ds.len() {
        return Err(Error::Shape(format!(
            "need matching nonempty block lists, got n={ns:?} d={ds:?}"
        )));
    }
    if ns.contains(&0) {
        return Err(Error::Shape("every block needs at least one variable".into()));
    }
    Ok(ns.iter().zip(ds).map(|(&n, &d)| monomials(n, d)).collect())
}
