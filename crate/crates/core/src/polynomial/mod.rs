//! Homogeneous and multi-homogeneous forms with the Bombieri–Weyl inner
//! product, and the dictionary between symmetric tensors and forms.
//!
//! Coefficients are stored densely in graded-lexicographic monomial order.
//! Under the dictionary `f(x) = Σ_I t_I x_{i₁}⋯x_{i_d}` the coefficient of
//! `x^α` is `binom(d, α) · t_I` for any multi-index `I` with counts `α`, and
//! the Bombieri–Weyl product of forms equals the Frobenius product of the
//! associated symmetric tensors.

mod monomials;
mod multi;

use std::sync::Arc;

pub use monomials::{counts, monomials, Monomials};
pub use multi::MultiHomogPoly;

use crate::error::{Error, Result};
use crate::tensor::{check_field_values, Field, Tensor, C64};

/// Tolerance used when accepting a tensor as symmetric.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct HomogPoly {
    field: Field,
    monomials: Arc<Monomials>,
    coeffs: Vec<C64>,
}

impl PartialEq for HomogPoly {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.n() == other.n()
            && self.degree() == other.degree()
            && self.coeffs == other.coeffs
    }
}

impl HomogPoly {
    pub fn new(n: usize, d: u32, field: Field, coeffs: Vec<C64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Shape("a form needs at least one variable".into()));
        }
        let monomials = monomials(n, d);
        if coeffs.len() != monomials.len() {
            return Err(Error::Dimension(format!(
                "{} coefficients for {} monomials (n={n}, d={d})",
                coeffs.len(),
                monomials.len()
            )));
        }
        check_field_values(field, &coeffs, "polynomial")?;
        Ok(HomogPoly {
            field,
            monomials,
            coeffs,
        })
    }

    pub fn from_real(n: usize, d: u32, coeffs: Vec<f64>) -> Result<Self> {
        HomogPoly::new(n, d, Field::Real, coeffs.into_iter().map(|x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(n: usize, d: u32, field: Field) -> Result<Self> {
        let len = monomials(n.max(1), d).len();
        HomogPoly::new(n, d, field, vec![C64::new(0.0, 0.0); len])
    }

    /// Builds a form from `(α, coefficient)` pairs; repeated exponents add up.
    pub fn from_terms(n: usize, d: u32, field: Field, terms: &[(Vec<u32>, C64)]) -> Result<Self> {
        let mut p = HomogPoly::zeros(n, d, field)?;
        for (alpha, c) in terms {
            let i = p.monomials.index_of(alpha).ok_or_else(|| {
                Error::Shape(format!("exponent {alpha:?} is not a degree-{d} monomial in {n} variables"))
            })?;
            p.coeffs[i] += c;
        }
        check_field_values(field, &p.coeffs, "polynomial")?;
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.monomials.n()
    }

    pub fn degree(&self) -> u32 {
        self.monomials.degree()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn monomials(&self) -> &Monomials {
        &self.monomials
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, alpha: &[u32]) -> Option<C64> {
        self.monomials.index_of(alpha).map(|i| self.coeffs[i])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == C64::new(0.0, 0.0))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `a·self + b·other`.
    pub fn linear_combination(&self, a: C64, other: &HomogPoly, b: C64) -> Result<HomogPoly> {
        self.check_same_space(other)?;
        let field = if self.field == Field::Complex || a.im != 0.0 || b.im != 0.0 {
            Field::Complex
        } else {
            Field::Real
        };
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| a * x + b * y).collect();
        HomogPoly::new(self.n(), self.degree(), field, coeffs)
    }

    pub fn scaled(&self, c: C64) -> HomogPoly {
        let field = if c.im != 0.0 { Field::Complex } else { self.field };
        HomogPoly {
            field,
            monomials: self.monomials.clone(),
            coeffs: self.coeffs.iter().map(|z| z * c).collect(),
        }
    }

    /// Same form viewed over ℂ.
    pub fn complexified(&self) -> HomogPoly {
        HomogPoly {
            field: Field::Complex,
            ..self.clone()
        }
    }

    fn check_same_space(&self, other: &HomogPoly) -> Result<()> {
        if self.n() != other.n() || self.degree() != other.degree() {
            return Err(Error::Shape(format!(
                "forms live in different spaces: (n={}, d={}) vs (n={}, d={})",
                self.n(),
                self.degree(),
                other.n(),
                other.degree()
            )));
        }
        Ok(())
    }

    /// Bombieri–Weyl product `Σ binom(d, α)⁻¹ conj(f_α) g_α`.
    pub fn bw_inner(&self, other: &HomogPoly) -> Result<C64> {
        self.check_same_space(other)?;
        if self.field != other.field {
            return Err(Error::Field(format!("fields {} and {} differ", self.field, other.field)));
        }
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .zip(self.monomials.weights())
            .map(|((f, g), w)| f.conj() * g / *w)
            .sum())
    }

    pub fn bw_norm(&self) -> f64 {
        self.coeffs
            .iter()
            .zip(self.monomials.weights())
            .map(|(f, w)| f.norm_sqr() / w)
            .sum::<f64>()
            .sqrt()
    }

    fn powers(&self, x: &[C64]) -> Vec<Vec<C64>> {
        let d = self.degree() as usize;
        x.iter()
            .map(|&xi| {
                let mut p = Vec::with_capacity(d + 1);
                let mut acc = C64::new(1.0, 0.0);
                for _ in 0..=d {
                    p.push(acc);
                    acc *= xi;
                }
                p
            })
            .collect()
    }

    fn check_point(&self, x: &[C64]) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::Shape(format!("point of length {} for a form in {} variables", x.len(), self.n())));
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &[C64]) -> Result<C64> {
        self.check_point(x)?;
        Ok(self.evaluate_unchecked(x))
    }

    pub fn evaluate_real(&self, x: &[f64]) -> Result<C64> {
        let z: Vec<C64> = x.iter().map(|&v| C64::new(v, 0.0)).collect();
        self.evaluate(&z)
    }

    pub(crate) fn evaluate_unchecked(&self, x: &[C64]) -> C64 {
        let pw = self.powers(x);
        self.coeffs
            .iter()
            .zip(self.monomials.exponents())
            .filter(|(c, _)| **c != C64::new(0.0, 0.0))
            .map(|(c, alpha)| {
                let mut m = *c;
                for (i, &a) in alpha.iter().enumerate() {
                    m *= pw[i][a as usize];
                }
                m
            })
            .sum()
    }

    /// Value and holomorphic gradient `(∂f/∂x_i)` at `x`.
    pub fn value_and_gradient(&self, x: &[C64]) -> Result<(C64, Vec<C64>)> {
        self.check_point(x)?;
        Ok(self.value_and_gradient_unchecked(x))
    }

    pub(crate) fn value_and_gradient_unchecked(&self, x: &[C64]) -> (C64, Vec<C64>) {
        let n = self.n();
        let pw = self.powers(x);
        let zero = C64::new(0.0, 0.0);
        let mut value = zero;
        let mut grad = vec![zero; n];
        let mut prefix = vec![zero; n + 1];
        let mut suffix = vec![zero; n + 1];
        for (c, alpha) in self.coeffs.iter().zip(self.monomials.exponents()) {
            if *c == zero {
                continue;
            }
            prefix[0] = C64::new(1.0, 0.0);
            for i in 0..n {
                prefix[i + 1] = prefix[i] * pw[i][alpha[i] as usize];
            }
            suffix[n] = C64::new(1.0, 0.0);
            for i in (0..n).rev() {
                suffix[i] = suffix[i + 1] * pw[i][alpha[i] as usize];
            }
            value += c * prefix[n];
            for i in 0..n {
                let a = alpha[i];
                if a > 0 {
                    grad[i] += c * f64::from(a) * pw[i][a as usize - 1] * prefix[i] * suffix[i + 1];
                }
            }
        }
        (value, grad)
    }

    /// `Σ_i ∂²f/∂x_i²`, a form of degree `d − 2`. For `d < 2` the result is
    /// the zero constant (degree 0).
    pub fn laplacian(&self) -> HomogPoly {
        let n = self.n();
        let d = self.degree();
        if d < 2 {
            return HomogPoly::zeros(n, 0, self.field).expect("valid zero form");
        }
        let mut out = HomogPoly::zeros(n, d - 2, self.field).expect("valid zero form");
        let target = out.monomials.clone();
        let mut beta = vec![0u32; n];
        for (c, alpha) in self.coeffs.iter().zip(self.monomials.exponents()) {
            for i in 0..n {
                let a = alpha[i];
                if a >= 2 {
                    beta.copy_from_slice(alpha);
                    beta[i] -= 2;
                    let j = target.index_of(&beta).expect("degree d-2 monomial");
                    out.coeffs[j] += c * f64::from(a * (a - 1));
                }
            }
        }
        out
    }

    /// The form `f(x) = Σ t_I x_{i₁}⋯x_{i_d}` of a symmetric tensor.
    pub fn from_symmetric_tensor(t: &Tensor) -> Result<HomogPoly> {
        if !t.is_cubical() {
            return Err(Error::Shape(format!("shape {:?} is not cubical", t.shape())));
        }
        let sym = t.symmetrize()?;
        let dev = t.max_abs_diff(&sym);
        if dev > SYMMETRY_TOLERANCE {
            return Err(Error::Symmetry(format!("max deviation from symmetrization is {dev:e}")));
        }
        let n = t.shape()[0];
        let d = t.order() as u32;
        let mons = monomials(n, d);
        let coeffs = mons
            .exponents()
            .iter()
            .zip(mons.weights())
            .map(|(alpha, w)| {
                let index: Vec<usize> = alpha
                    .iter()
                    .enumerate()
                    .flat_map(|(i, &a)| std::iter::repeat_n(i, a as usize))
                    .collect();
                t.get(&index).map(|v| v * *w)
            })
            .collect::<Result<Vec<_>>>()?;
        HomogPoly::new(n, d, t.field(), coeffs)
    }

    /// Inverse of [`HomogPoly::from_symmetric_tensor`]: `t_I = f_α / binom(d, α)`.
    pub fn to_symmetric_tensor(&self) -> Result<Tensor> {
        let n = self.n();
        let d = self.degree() as usize;
        if d == 0 {
            return Err(Error::Shape("degree-0 forms have no tensor of order ≥ 1".into()));
        }
        let shape = vec![n; d];
        let mut t = Tensor::zeros(shape, self.field)?;
        let data: Vec<C64> = (0..t.len())
            .map(|flat| {
                let alpha = counts(&t.multi_index(flat), n);
                let i = self.monomials.index_of(&alpha).expect("counts have degree d");
                self.coeffs[i] / self.monomials.weights()[i]
            })
            .collect();
        t = Tensor::new(t.shape().to_vec(), self.field, data)?;
        Ok(t)
    }

    /// `g(x) = f(M x)` for a real `n × n` matrix `M` (rows indexed by the
    /// variables of `f`). Used for orthogonal changes of variables.
    pub fn linear_substitution(&self, m: &[Vec<f64>]) -> Result<HomogPoly> {
        let n = self.n();
        if m.len() != n || m.iter().any(|row| row.len() != n) {
            return Err(Error::Shape(format!("substitution matrix must be {n}×{n}")));
        }
        if self.degree() == 0 {
            return Ok(self.clone());
        }
        // t'_{j₁…j_d} = Σ_I t_I M_{i₁j₁}⋯M_{i_d j_d}, one mode at a time.
        let t = self.to_symmetric_tensor()?;
        let d = t.order();
        let mut data = t.data().to_vec();
        for mode in 0..d {
            let lead = n.pow(mode as u32);
            let trail = n.pow((d - mode - 1) as u32);
            let mut next = vec![C64::new(0.0, 0.0); data.len()];
            for l in 0..lead {
                for i in 0..n {
                    for j in 0..n {
                        let w = m[i][j];
                        if w == 0.0 {
                            continue;
                        }
                        let src = (l * n + i) * trail;
                        let dst = (l * n + j) * trail;
                        for r in 0..trail {
                            next[dst + r] += data[src + r] * w;
                        }
                    }
                }
            }
            data = next;
        }
        let t2 = Tensor::new(vec![n; d], self.field, data)?.symmetrize()?;
        HomogPoly::from_symmetric_tensor(&t2)
    }
}
