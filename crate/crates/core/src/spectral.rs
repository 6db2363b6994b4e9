//! Spectral and uniform norms by multi-start local ascent, the norm ratio,
//! the best rank-one approximation error, and a sphere-grid oracle.
//!
//! Every iterative value is attained at an explicit maximizer and is
//! therefore a lower estimate of the true norm.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polynomial::{HomogPoly, MultiHomogPoly};
use crate::random::{uniform_sphere, SeedSpec};
use crate::tensor::{vector_norm, Field, Tensor, UnitVectorTuple, C64};

/// Values within this distance of the best are ties; the first start wins.
pub const TIE_TOLERANCE: f64 = 1e-14;
/// Largest grid the brute-force oracle will visit.
pub const GRID_BUDGET: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaximizerConfig {
    pub starts: usize,
    pub max_iters: usize,
    /// Stop once one sweep improves the objective by at most `tol·value`.
    pub tol: f64,
    pub seed: u64,
}

impl Default for MaximizerConfig {
    fn default() -> Self {
        MaximizerConfig {
            starts: 32,
            max_iters: 1000,
            tol: 1e-12,
            seed: 0,
        }
    }
}

impl MaximizerConfig {
    pub fn with_seed(seed: u64) -> Self {
        MaximizerConfig {
            seed,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.starts == 0 || self.max_iters == 0 {
            return Err(Error::Precondition("starts and max_iters must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Precondition(format!("tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    pub value: f64,
    pub maximizer: UnitVectorTuple,
    pub iterations: usize,
    pub converged: bool,
}

/// Objects whose spectral or uniform norm can be estimated.
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    Tensor(&'a Tensor),
    Poly(&'a HomogPoly),
    Multi(&'a MultiHomogPoly),
}

impl Target<'_> {
    fn field(&self) -> Field {
        match self {
            Target::Tensor(t) => t.field(),
            Target::Poly(f) => f.field(),
            Target::Multi(f) => f.field(),
        }
    }

    /// Sphere sizes `n_j` the objective is maximized over.
    fn spheres(&self) -> Vec<usize> {
        match self {
            Target::Tensor(t) => t.shape().to_vec(),
            Target::Poly(f) => vec![f.n()],
            Target::Multi(f) => f.ns(),
        }
    }

    /// Frobenius or Bombieri–Weyl norm.
    pub fn norm(&self) -> f64 {
        match self {
            Target::Tensor(t) => t.frobenius_norm(),
            Target::Poly(f) => f.bw_norm(),
            Target::Multi(f) => f.bw_norm(),
        }
    }

    fn objective(&self, xs: &[Vec<C64>]) -> f64 {
        match self {
            Target::Tensor(t) => t.multilinear(xs).expect("validated shapes").norm(),
            Target::Poly(f) => f.evaluate_unchecked(&xs[0]).norm(),
            Target::Multi(f) => f.evaluate(xs).expect("validated shapes").norm(),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Target::Tensor(t) => t.is_zero(),
            Target::Poly(f) => f.is_zero(),
            Target::Multi(f) => f.is_zero(),
        }
    }
}

fn random_start(spheres: &[usize], field: Field, seeds: &SeedSpec, start: usize) -> Vec<Vec<C64>> {
    let mut rng = seeds.rng(start as u64, "maximizer-start");
    spheres
        .iter()
        .map(|&n| uniform_sphere(n, field, &mut rng).expect("n ≥ 1"))
        .collect()
}

/// Runs `run` from every start in parallel and keeps the best result.
fn multi_start<F>(target: Target<'_>, cfg: &MaximizerConfig, run: F) -> Result<SpectralResult>
where
    F: Fn(Vec<Vec<C64>>) -> (Vec<Vec<C64>>, usize, bool) + Sync,
{
    cfg.validate()?;
    if target.is_zero() {
        return Err(Error::ZeroInput("norm of the zero element".into()));
    }
    let field = target.field();
    let spheres = target.spheres();
    let seeds = SeedSpec::new(cfg.seed);
    let results: Vec<(f64, Vec<Vec<C64>>, usize, bool)> = (0..cfg.starts)
        .into_par_iter()
        .map(|s| {
            let (xs, iters, converged) = run(random_start(&spheres, field, &seeds, s));
            (target.objective(&xs), xs, iters, converged)
        })
        .collect();
    let best = results.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let (value, xs, iterations, converged) = results
        .into_iter()
        .find(|r| r.0 >= best - TIE_TOLERANCE)
        .expect("at least one start");
    Ok(SpectralResult {
        value,
        maximizer: UnitVectorTuple::normalized(xs, field)?,
        iterations,
        converged,
    })
}

/// `x ← conj(v)/‖v‖` maximizes `|Σ v_i x_i|` over the unit sphere, with value `‖v‖`.
fn best_response(v: &[C64]) -> Option<Vec<C64>> {
    let norm = vector_norm(v);
    (norm > 0.0).then(|| v.iter().map(|z| z.conj() / norm).collect())
}

/// One alternating run from `xs`, recording the objective after each sweep.
pub fn alternating_trace(t: &Tensor, mut xs: Vec<Vec<C64>>, max_iters: usize, tol: f64) -> Result<(Vec<Vec<C64>>, Vec<f64>, bool)> {
    if xs.len() != t.order() {
        return Err(Error::Dimension(format!("{} vectors for an order-{} tensor", xs.len(), t.order())));
    }
    let mut history = vec![t.multilinear(&xs)?.norm()];
    let mut converged = false;
    for _ in 0..max_iters {
        for j in 0..t.order() {
            let v = t.contract_all_but(&xs, j)?;
            if let Some(x) = best_response(&v) {
                xs[j] = x;
            }
        }
        let value = t.multilinear(&xs)?.norm();
        let prev = *history.last().expect("nonempty");
        history.push(value);
        if value - prev <= tol * value.max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
    }
    Ok((xs, history, converged))
}

/// `‖T‖_∞ = max |⟨T, x¹ ⊗ ⋯ ⊗ x^d⟩|` by multi-start alternating maximization.
pub fn spectral_norm_general(t: &Tensor, cfg: &MaximizerConfig) -> Result<SpectralResult> {
    multi_start(Target::Tensor(t), cfg, |xs| {
        let (xs, history, converged) = alternating_trace(t, xs, cfg.max_iters, cfg.tol).expect("validated shapes");
        (xs, history.len() - 1, converged)
    })
}

/// Sufficient-increase constant. Small values accept steps that nearly
/// reflect across a maximum and make the ascent zigzag.
const ARMIJO: f64 = 0.3;

/// Projected gradient ascent of `|f|²` on the unit sphere from `x`.
/// Returns the final point, the iteration count and the convergence flag.
fn sphere_ascent(f: &HomogPoly, mut x: Vec<C64>, max_iters: usize, tol: f64) -> (Vec<C64>, usize, bool) {
    let n = x.len();
    if f.degree() == 0 {
        return (x, 0, true);
    }
    if f.degree() == 1 {
        if let Some(y) = best_response(f.coeffs()) {
            x = y;
        }
        return (x, 1, true);
    }
    let mut step = 1.0 / (f.bw_norm().powi(2) * f64::from(f.degree())).max(1e-300);
    let (mut val, mut grad) = f.value_and_gradient_unchecked(&x);
    let mut phi = val.norm_sqr();
    for it in 1..=max_iters {
        // Real gradient of |f|² in the realified coordinates, as a complex vector.
        let g: Vec<C64> = grad.iter().map(|gi| 2.0 * val * gi.conj()).collect();
        let radial: f64 = x.iter().zip(&g).map(|(xi, gi)| (xi.conj() * gi).re).sum();
        let tangent: Vec<C64> = g.iter().zip(&x).map(|(gi, xi)| gi - xi * radial).collect();
        let slope: f64 = tangent.iter().map(|z| z.norm_sqr()).sum();
        if slope <= 1e-30 * phi.max(1e-300) {
            return (x, it, true);
        }
        let mut accepted = None;
        step *= 2.0;
        for _ in 0..60 {
            let mut y: Vec<C64> = x.iter().zip(&tangent).map(|(xi, ti)| xi + ti * step).collect();
            let norm = vector_norm(&y);
            y.iter_mut().for_each(|z| *z /= norm);
            let (v, gr) = f.value_and_gradient_unchecked(&y);
            let p = v.norm_sqr();
            if p >= phi + ARMIJO * step * slope {
                accepted = Some((y, v, gr, p));
                break;
            }
            step *= 0.5;
        }
        let Some((y, v, gr, p)) = accepted else {
            return (x, it, true);
        };
        let gain = p.sqrt() - phi.sqrt();
        x = y;
        val = v;
        grad = gr;
        phi = p;
        if gain <= tol * phi.sqrt() {
            return (x, it, true);
        }
        debug_assert_eq!(x.len(), n);
    }
    (x, max_iters, false)
}

/// `‖f‖_∞ = max_{‖x‖=1} |f(x)|` by multi-start projected gradient ascent.
pub fn spectral_norm_symmetric(f: &HomogPoly, cfg: &MaximizerConfig) -> Result<SpectralResult> {
    multi_start(Target::Poly(f), cfg, |mut xs| {
        let x = xs.pop().expect("one sphere");
        let (x, iters, converged) = sphere_ascent(f, x, cfg.max_iters, cfg.tol);
        (vec![x], iters, converged)
    })
}

/// Sweeps per block when ascending a block form inside one outer cycle.
const INNER_ITERS: usize = 50;

/// `‖F‖_∞` over a product of spheres, ascending one block at a time.
pub fn uniform_norm_multi(f: &MultiHomogPoly, cfg: &MaximizerConfig) -> Result<SpectralResult> {
    let target = Target::Multi(f);
    multi_start(target, cfg, |mut xs| {
        let mut value = target.objective(&xs);
        for it in 1..=cfg.max_iters {
            for j in 0..xs.len() {
                let g = f.partial(&xs, j).expect("validated shapes");
                if g.is_zero() {
                    continue;
                }
                let (x, _, _) = sphere_ascent(&g, xs[j].clone(), INNER_ITERS, cfg.tol);
                if g.evaluate_unchecked(&x).norm() >= g.evaluate_unchecked(&xs[j]).norm() {
                    xs[j] = x;
                }
            }
            let next = target.objective(&xs);
            let gain = next - value;
            value = next;
            if gain <= cfg.tol * value.max(f64::MIN_POSITIVE) {
                return (xs, it, true);
            }
        }
        (xs, cfg.max_iters, false)
    })
}

/// Dispatches to the estimator matching the target's structure.
pub fn uniform_norm(target: Target<'_>, cfg: &MaximizerConfig) -> Result<SpectralResult> {
    match target {
        Target::Tensor(t) => spectral_norm_general(t, cfg),
        Target::Poly(f) => spectral_norm_symmetric(f, cfg),
        Target::Multi(f) => uniform_norm_multi(f, cfg),
    }
}

/// Lower estimate of `‖·‖_∞ / ‖·‖`.
pub fn ratio(target: Target<'_>, cfg: &MaximizerConfig) -> Result<f64> {
    let norm = target.norm();
    if norm == 0.0 {
        return Err(Error::ZeroInput("ratio of the zero element".into()));
    }
    Ok((uniform_norm(target, cfg)?.value / norm).min(1.0))
}

/// `√(1 − ratio²)`, the relative best rank-one approximation error
/// (an upper estimate).
pub fn approx_error(target: Target<'_>, cfg: &MaximizerConfig) -> Result<f64> {
    let r = ratio(target, cfg)?;
    Ok((1.0 - r * r).max(0.0).sqrt())
}

/// Grid of one sphere: `real_dim` coordinates, angles at `res` levels.
struct SphereGrid {
    field: Field,
    n: usize,
    /// Dimension of the sphere actually gridded (`k n − 1` real, `2n − 2`
    /// complex with the first coordinate's phase fixed).
    angles: usize,
    res: usize,
}

impl SphereGrid {
    fn new(n: usize, field: Field, res: usize) -> Self {
        let angles = match field {
            Field::Real => n - 1,
            // |objective| is invariant under x ↦ e^{iθ}x, so x₁ may be taken real.
            Field::Complex => 2 * n - 2,
        };
        SphereGrid { field, n, angles, res }
    }

    fn points(&self) -> usize {
        if self.angles == 0 {
            // S⁰ = {±1}; in the complex case the phase is already fixed.
            return if self.field == Field::Real { 2 } else { 1 };
        }
        self.res.pow(self.angles as u32)
    }

    fn point(&self, mut idx: usize) -> Vec<C64> {
        let m = self.angles + 1;
        let mut coords = vec![0.0; m];
        if self.angles == 0 {
            coords[0] = if idx == 0 { 1.0 } else { -1.0 };
        } else {
            let mut sin_prod = 1.0;
            for a in 0..self.angles {
                let level = idx % self.res;
                idx /= self.res;
                let theta = if a + 1 < self.angles {
                    std::f64::consts::PI * level as f64 / (self.res - 1) as f64
                } else {
                    2.0 * std::f64::consts::PI * level as f64 / self.res as f64
                };
                coords[a] = sin_prod * theta.cos();
                sin_prod *= theta.sin();
            }
            coords[m - 1] = sin_prod;
        }
        match self.field {
            Field::Real => coords.into_iter().map(|c| C64::new(c, 0.0)).collect(),
            Field::Complex => {
                let mut x = vec![C64::new(coords[0], 0.0)];
                for i in 1..self.n {
                    x.push(C64::new(coords[2 * i - 1], coords[2 * i]));
                }
                x
            }
        }
    }
}

/// Maximum of the objective over a deterministic hyperspherical-angle grid
/// (`res` levels per angle, poles included). Never exceeds the true norm.
pub fn brute_force_uniform_norm(target: Target<'_>, res: usize) -> Result<f64> {
    if res < 2 {
        return Err(Error::Precondition("grid resolution must be at least 2".into()));
    }
    let field = target.field();
    let grids: Vec<SphereGrid> = target.spheres().into_iter().map(|n| SphereGrid::new(n, field, res)).collect();
    let total = grids.iter().map(|g| g.points() as f64).product::<f64>();
    if total > GRID_BUDGET {
        return Err(Error::Budget(format!("{total:.3e} grid points exceed the {GRID_BUDGET:.0e} budget")));
    }
    let counts: Vec<usize> = grids.iter().map(SphereGrid::points).collect();
    let total = total as usize;
    let best = (0..total)
        .into_par_iter()
        .with_min_len(4096)
        .map(|mut flat| {
            let mut xs = Vec::with_capacity(grids.len());
            for (g, &c) in grids.iter().zip(&counts).rev() {
                xs.push(g.point(flat % c));
                flat /= c;
            }
            xs.reverse();
            target.objective(&xs)
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}
