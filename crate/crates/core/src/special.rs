//! Log-domain special functions shared by the bound formulas and the
//! polynomial machinery.

use std::f64::consts::PI;

/// Largest degree for which multinomials are computed with exact integers.
pub const EXACT_MULTINOMIAL_MAX_DEGREE: u32 = 20;

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "ln_gamma called with non-positive argument {x}");
    libm::lgamma(x)
}

pub fn ln_factorial(n: u64) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// `ln binom(a, b)` with real arguments through Γ, for `a ≥ b ≥ 0` (and
/// `a - b > -1`).
pub fn ln_binomial(a: f64, b: f64) -> f64 {
    ln_gamma(a + 1.0) - ln_gamma(b + 1.0) - ln_gamma(a - b + 1.0)
}

/// `ln binom(d + n - 1, d)`: the log-dimension of degree-`d` forms in `n`
/// variables.
pub fn ln_form_dimension(d: u32, n: u32) -> f64 {
    ln_binomial(f64::from(d + n) - 1.0, f64::from(d))
}

/// `ln binom(d + n/2 - 1, d) = ln Γ(d + n/2) - ln Γ(d + 1) - ln Γ(n/2)`.
pub fn ln_half_binomial(d: u32, n: u32) -> f64 {
    let half = f64::from(n) / 2.0;
    ln_gamma(f64::from(d) + half) - ln_gamma(f64::from(d) + 1.0) - ln_gamma(half)
}

/// `ln |S^{n-1}|` with `|S^{n-1}| = 2 π^{n/2} / Γ(n/2)`.
pub fn ln_sphere_area(n: u32) -> f64 {
    let half = f64::from(n) / 2.0;
    std::f64::consts::LN_2 + half * PI.ln() - ln_gamma(half)
}

pub fn sphere_area(n: u32) -> f64 {
    ln_sphere_area(n).exp()
}

/// Exact `binom(n, k)`, or `None` on overflow.
pub fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) is always an integer at every step.
        acc = acc.checked_mul(u128::from(n - i))? / u128::from(i + 1);
    }
    Some(acc)
}

/// Exact multinomial `d! / (α₁! ⋯ α_n!)`, or `None` on overflow.
pub fn multinomial_u128(alpha: &[u32]) -> Option<u128> {
    let mut total: u64 = 0;
    let mut acc: u128 = 1;
    for &a in alpha {
        total += u64::from(a);
        acc = acc.checked_mul(binomial_u128(total, u64::from(a))?)?;
    }
    Some(acc)
}

pub fn ln_multinomial(alpha: &[u32]) -> f64 {
    let d: u32 = alpha.iter().sum();
    ln_factorial(u64::from(d)) - alpha.iter().map(|&a| ln_factorial(u64::from(a))).sum::<f64>()
}

/// `binom(d, α)`: exact for `d ≤ 20`, otherwise exponentiated log-gamma.
pub fn multinomial(alpha: &[u32]) -> f64 {
    let d: u32 = alpha.iter().sum();
    if d <= EXACT_MULTINOMIAL_MAX_DEGREE {
        if let Some(v) = multinomial_u128(alpha) {
            return v as f64;
        }
    }
    ln_multinomial(alpha).exp()
}
