//! Real harmonic forms `H_{d,n}`: dimension, a Bombieri–Weyl orthonormal
//! basis, exact `L²(S^{n−1})` products, and zonal harmonics.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::polynomial::{monomials, HomogPoly, Monomials};
use crate::special::{binomial_u128, ln_gamma};
use crate::tensor::{vector_norm, Field, C64, UNIT_TOLERANCE};

/// Relative singular-value cutoff for the Laplacian null space.
pub const NULL_SPACE_RTOL: f64 = 1e-10;

/// `D_{d,n} = binom(n+d−1, d) − binom(n+d−3, d−2)`.
pub fn harmonic_dimension(d: u32, n: u32) -> Result<usize> {
    if n < 2 {
        return Err(Error::Domain(format!("harmonic spaces need n ≥ 2, got n={n}")));
    }
    let (d64, n64) = (u64::from(d), u64::from(n));
    let all = binomial_u128(n64 + d64 - 1, d64).expect("dimension fits");
    let sub = if d >= 2 {
        binomial_u128(n64 + d64 - 3, d64 - 2).expect("dimension fits")
    } else {
        0
    };
    Ok((all - sub) as usize)
}

/// `2^{d−1} Γ(d + n/2) / (√π^n Γ(d+1))`: the ratio between the
/// Bombieri–Weyl and `L²(S^{n−1})` products on `H_{d,n}`.
pub fn lemma21_constant(d: u32, n: u32) -> f64 {
    let (d, n) = (f64::from(d), f64::from(n));
    ((d - 1.0) * std::f64::consts::LN_2 + ln_gamma(d + n / 2.0)
        - n / 2.0 * std::f64::consts::PI.ln()
        - ln_gamma(d + 1.0))
    .exp()
}

/// `∫_{S^{n−1}} x^β dS`: zero unless every `β_i` is even, otherwise
/// `2 ∏ Γ((β_i+1)/2) / Γ((|β|+n)/2)`.
pub fn monomial_sphere_integral(beta: &[u32]) -> f64 {
    if beta.iter().any(|b| b % 2 == 1) {
        return 0.0;
    }
    let total: u32 = beta.iter().sum();
    let n = beta.len() as f64;
    let ln = std::f64::consts::LN_2 + beta.iter().map(|&b| ln_gamma((f64::from(b) + 1.0) / 2.0)).sum::<f64>()
        - ln_gamma((f64::from(total) + n) / 2.0);
    ln.exp()
}

/// Matrix `M_{αβ} = ∫ x^{α+β} dS` over degree-`d` monomials in `n` variables.
fn sphere_moment_matrix(mons: &Monomials) -> DMatrix<f64> {
    let len = mons.len();
    let mut m = DMatrix::zeros(len, len);
    let mut beta = vec![0u32; mons.n()];
    for i in 0..len {
        for j in i..len {
            for (k, b) in beta.iter_mut().enumerate() {
                *b = mons.exponent(i)[k] + mons.exponent(j)[k];
            }
            let v = monomial_sphere_integral(&beta);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

fn require_real(f: &HomogPoly) -> Result<()> {
    if f.field() == Field::Complex {
        return Err(Error::UnsupportedField("L²(S^{n-1}) products are defined for real forms only".into()));
    }
    Ok(())
}

/// Exact `∫_{S^{n−1}} f g dS` for real forms of equal degree.
pub fn l2_sphere_inner(f: &HomogPoly, g: &HomogPoly) -> Result<f64> {
    require_real(f)?;
    require_real(g)?;
    if f.n() != g.n() || f.degree() != g.degree() {
        return Err(Error::Shape("forms must share n and degree".into()));
    }
    let mons = f.monomials();
    let mut beta = vec![0u32; f.n()];
    let mut acc = 0.0;
    for (i, fa) in f.coeffs().iter().enumerate() {
        if fa.re == 0.0 {
            continue;
        }
        for (j, gb) in g.coeffs().iter().enumerate() {
            if gb.re == 0.0 {
                continue;
            }
            for (k, b) in beta.iter_mut().enumerate() {
                *b = mons.exponent(i)[k] + mons.exponent(j)[k];
            }
            acc += fa.re * gb.re * monomial_sphere_integral(&beta);
        }
    }
    Ok(acc)
}

/// `h = Re (x₁ + i x₂)^d = r^d cos(dθ)`, a harmonic form in two variables.
pub fn cos_harmonic(d: u32) -> Result<HomogPoly> {
    // Re(i^k) is 1, 0, −1, 0 for k mod 4 = 0, 1, 2, 3.
    let terms: Vec<(Vec<u32>, C64)> = (0..=d)
        .filter(|k| k % 2 == 0)
        .map(|k| {
            let sign = if k % 4 == 0 { 1.0 } else { -1.0 };
            let b = binomial_u128(u64::from(d), u64::from(k)).expect("small binomial") as f64;
            (vec![d - k, k], C64::new(sign * b, 0.0))
        })
        .collect();
    HomogPoly::from_terms(2, d, Field::Real, &terms)
}

/// A Bombieri–Weyl orthonormal basis of `H_{d,n}`.
#[derive(Debug)]
pub struct HarmonicBasis {
    d: u32,
    n: u32,
    basis: Vec<HomogPoly>,
    /// Inverse of the `L²(S^{n−1})` Gram matrix of `basis`.
    l2_gram_inv: OnceLock<DMatrix<f64>>,
}

impl HarmonicBasis {
    /// Null space of the Laplacian's coefficient matrix, orthonormalized
    /// under the Bombieri–Weyl product. Deterministic for fixed `(d, n)`.
    pub fn new(d: u32, n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("harmonic spaces need n ≥ 2, got n={n}")));
        }
        let nu = n as usize;
        let mons = monomials(nu, d);
        let len = mons.len();
        let null_vectors: Vec<Vec<f64>> = if d < 2 {
            (0..len)
                .map(|i| {
                    let mut v = vec![0.0; len];
                    v[i] = 1.0;
                    v
                })
                .collect()
        } else {
            laplacian_null_space(&mons, &monomials(nu, d - 2))
        };
        let weights = mons.weights();
        let bw = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).zip(weights).map(|((x, y), w)| x * y / w).sum() };

        // Modified Gram–Schmidt with one re-orthogonalization pass.
        let mut ortho: Vec<Vec<f64>> = Vec::with_capacity(null_vectors.len());
        for mut v in null_vectors {
            for _ in 0..2 {
                for q in &ortho {
                    let p = bw(q, &v);
                    for (vi, qi) in v.iter_mut().zip(q) {
                        *vi -= p * qi;
                    }
                }
            }
            let norm = bw(&v, &v).sqrt();
            if norm <= 1e-12 {
                continue;
            }
            v.iter_mut().for_each(|x| *x /= norm);
            ortho.push(v);
        }
        let basis = ortho
            .into_iter()
            .map(|v| HomogPoly::from_real(nu, d, v))
            .collect::<Result<Vec<_>>>()?;
        Ok(HarmonicBasis {
            d,
            n,
            basis,
            l2_gram_inv: OnceLock::new(),
        })
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn elements(&self) -> &[HomogPoly] {
        &self.basis
    }

    /// `Σ_i c_i b_i`.
    pub fn combination(&self, c: &[f64]) -> Result<HomogPoly> {
        if c.len() != self.basis.len() {
            return Err(Error::Dimension(format!("{} coefficients for a {}-dim basis", c.len(), self.basis.len())));
        }
        let len = self.basis.first().map_or(0, |b| b.coeffs().len());
        let mut coeffs = vec![0.0; len];
        for (ci, b) in c.iter().zip(&self.basis) {
            for (acc, z) in coeffs.iter_mut().zip(b.coeffs()) {
                *acc += ci * z.re;
            }
        }
        HomogPoly::from_real(self.n as usize, self.d, coeffs)
    }

    fn l2_gram_inverse(&self) -> &DMatrix<f64> {
        self.l2_gram_inv.get_or_init(|| {
            let mons = monomials(self.n as usize, self.d);
            let m = sphere_moment_matrix(&mons);
            let b = DMatrix::from_fn(mons.len(), self.basis.len(), |i, j| self.basis[j].coeffs()[i].re);
            let gram = b.transpose() * m * &b;
            gram.cholesky()
                .expect("L² Gram matrix of a basis is positive definite")
                .inverse()
        })
    }

    /// The zonal harmonic with pole `x`: the reproducing element of
    /// `H_{d,n}` at `x` for the `L²(S^{n−1})` product, built as the kernel
    /// sum over an `L²`-orthonormalized copy of the basis.
    pub fn zonal(&self, x: &[f64]) -> Result<HomogPoly> {
        if x.len() != self.n as usize {
            return Err(Error::Shape(format!("pole has length {} (expected {})", x.len(), self.n)));
        }
        let z: Vec<C64> = x.iter().map(|&v| C64::new(v, 0.0)).collect();
        let norm = vector_norm(&z);
        if (norm - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::Precondition(format!("pole has norm {norm}, expected 1")));
        }
        let values = DVector::from_iterator(
            self.basis.len(),
            self.basis.iter().map(|b| b.evaluate_unchecked(&z).re),
        );
        let weights = self.l2_gram_inverse() * values;
        self.combination(weights.as_slice())
    }
}

/// Shared, cached basis for `(d, n)`.
pub fn harmonic_basis(d: u32, n: u32) -> Result<Arc<HarmonicBasis>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Arc<HarmonicBasis>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(b) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&(d, n)) {
        return Ok(b.clone());
    }
    let built = Arc::new(HarmonicBasis::new(d, n)?);
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    Ok(guard.entry((d, n)).or_insert(built).clone())
}

/// Euclidean-orthonormal basis (in monomial coordinates) of the kernel of
/// the Laplacian `P_{d,n} → P_{d−2,n}`.
fn laplacian_null_space(src: &Monomials, dst: &Monomials) -> Vec<Vec<f64>> {
    let cols = src.len();
    // Pad to a square matrix so the SVD returns a full right basis.
    let mut a = DMatrix::<f64>::zeros(cols.max(dst.len()), cols);
    let mut beta = vec![0u32; src.n()];
    for (j, alpha) in src.exponents().iter().enumerate() {
        for i in 0..src.n() {
            let e = alpha[i];
            if e >= 2 {
                beta.copy_from_slice(alpha);
                beta[i] -= 2;
                let row = dst.index_of(&beta).expect("degree d-2 monomial");
                a[(row, j)] += f64::from(e * (e - 1));
            }
        }
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let largest = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = NULL_SPACE_RTOL * largest;
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= cutoff)
        .map(|(k, _)| v_t.row(k).iter().copied().collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn dimension_examples() {
        assert_eq!(harmonic_dimension(1, 3).unwrap(), 3);
        assert_eq!(harmonic_dimension(2, 3).unwrap(), 5);
        assert_eq!(harmonic_dimension(3, 2).unwrap(), 2);
        assert!(matches!(harmonic_dimension(3, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn dimension_matches_null_space_rank() {
        for d in 0..=8u32 {
            for n in 2..=5u32 {
                let basis = HarmonicBasis::new(d, n).unwrap();
                assert_eq!(basis.dimension(), harmonic_dimension(d, n).unwrap(), "d={d} n={n}");
            }
        }
    }

    #[test]
    fn basis_is_harmonic_and_bw_orthonormal() {
        for (d, n) in [(1, 2), (2, 2), (3, 3), (4, 4), (6, 3), (5, 5)] {
            let basis = HarmonicBasis::new(d, n).unwrap();
            let el = basis.elements();
            for (i, a) in el.iter().enumerate() {
                assert!(a.laplacian().max_abs_coeff() <= 1e-10);
                for (j, b) in el.iter().enumerate() {
                    let g = a.bw_inner(b).unwrap().re;
                    let target = if i == j { 1.0 } else { 0.0 };
                    assert!((g - target).abs() <= 1e-10, "d={d} n={n} ({i},{j}) = {g}");
                }
            }
        }
    }

    #[test]
    fn degree_two_plane_contains_expected_forms() {
        let basis = HarmonicBasis::new(2, 2).unwrap();
        // x₁² − x₂² and x₁x₂ must lie in the span: projection reproduces them.
        for target in [vec![1.0, 0.0, -1.0], vec![0.0, 1.0, 0.0]] {
            let f = HomogPoly::from_real(2, 2, target.clone()).unwrap();
            let c: Vec<f64> = basis.elements().iter().map(|b| b.bw_inner(&f).unwrap().re).collect();
            let p = basis.combination(&c).unwrap();
            for (a, b) in p.coeffs().iter().zip(&target) {
                assert!((a.re - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn basis_is_deterministic() {
        let a = HarmonicBasis::new(4, 3).unwrap();
        let b = HarmonicBasis::new(4, 3).unwrap();
        assert_eq!(a.elements(), b.elements());
    }

    #[test]
    fn lemma_constant_examples() {
        assert!((lemma21_constant(1, 3) - 3.0 / (4.0 * PI)).abs() < 1e-15);
        assert!((lemma21_constant(2, 2) - 2.0 / PI).abs() < 1e-15);
        assert!((lemma21_constant(2, 4) - 6.0 / (PI * PI)).abs() < 1e-15);
    }

    #[test]
    fn sphere_integrals() {
        let x1 = HomogPoly::from_real(3, 1, vec![1.0, 0.0, 0.0]).unwrap();
        let x2 = HomogPoly::from_real(3, 1, vec![0.0, 1.0, 0.0]).unwrap();
        assert!((l2_sphere_inner(&x1, &x1).unwrap() - 4.0 * PI / 3.0).abs() < 1e-14);
        assert_eq!(l2_sphere_inner(&x1, &x2).unwrap(), 0.0);
        for n in 2..7u32 {
            let one = HomogPoly::from_real(n as usize, 0, vec![1.0]).unwrap();
            let area = crate::special::sphere_area(n);
            assert!((l2_sphere_inner(&one, &one).unwrap() - area).abs() < 1e-12 * area);
        }
        let z = x1.complexified();
        assert!(matches!(l2_sphere_inner(&z, &z), Err(Error::UnsupportedField(_))));
    }

    #[test]
    fn circle_quadrature_cross_check() {
        // ∫_{S¹} (x₁² − x₂²)² = ∫ cos²(2θ) dθ = π and ‖x₁² − x₂²‖²_BW = 2.
        let h = HomogPoly::from_real(2, 2, vec![1.0, 0.0, -1.0]).unwrap();
        let l2 = l2_sphere_inner(&h, &h).unwrap();
        assert!((l2 - PI).abs() < 1e-14);
        let m = 4096;
        let quad: f64 = (0..m)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / m as f64;
                (t.cos().powi(2) - t.sin().powi(2)).powi(2)
            })
            .sum::<f64>()
            * 2.0
            * PI
            / m as f64;
        assert!((quad - l2).abs() < 1e-12);
        assert!((h.bw_norm().powi(2) / l2 - lemma21_constant(2, 2)).abs() < 1e-14);
    }

    #[test]
    fn zonal_at_pole() {
        let basis = HarmonicBasis::new(1, 3).unwrap();
        let z = basis.zonal(&[0.0, 0.6, 0.8]).unwrap();
        let v = z.evaluate_real(&[0.0, 0.6, 0.8]).unwrap().re;
        assert!((v - 3.0 / (4.0 * PI)).abs() < 1e-14);
        assert!(matches!(basis.zonal(&[1.0, 1.0, 0.0]), Err(Error::Precondition(_))));
    }

    #[test]
    fn cos_harmonic_is_harmonic() {
        for d in 1..10 {
            assert!(cos_harmonic(d).unwrap().laplacian().max_abs_coeff() < 1e-9);
        }
    }
}
