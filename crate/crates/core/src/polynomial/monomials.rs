use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::special::multinomial;

/// All exponent vectors `α ∈ ℕⁿ` with `|α| = d`, in graded-lexicographic
/// order (for a fixed degree: lexicographically descending, so
/// `(d, 0, …, 0)` comes first).
#[derive(Debug)]
pub struct Monomials {
    n: usize,
    d: u32,
    exponents: Vec<Vec<u32>>,
    weights: Vec<f64>,
    lookup: HashMap<Vec<u32>, usize>,
}

impl Monomials {
    fn build(n: usize, d: u32) -> Self {
        let mut exponents = Vec::new();
        let mut current = vec![0u32; n];
        fill(&mut exponents, &mut current, 0, d);
        let weights = exponents.iter().map(|a| multinomial(a)).collect();
        let lookup = exponents.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        Monomials {
            n,
            d,
            exponents,
            weights,
            lookup,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    pub fn exponent(&self, i: usize) -> &[u32] {
        &self.exponents[i]
    }

    /// `binom(d, α)` for each monomial, in canonical order.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn index_of(&self, alpha: &[u32]) -> Option<usize> {
        self.lookup.get(alpha).copied()
    }
}

fn fill(out: &mut Vec<Vec<u32>>, current: &mut Vec<u32>, pos: usize, remaining: u32) {
    let n = current.len();
    if n == 0 {
        if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if pos == n - 1 {
        current[pos] = remaining;
        out.push(current.clone());
        return;
    }
    for a in (0..=remaining).rev() {
        current[pos] = a;
        fill(out, current, pos + 1, remaining - a);
    }
    current[pos] = 0;
}

/// Shared, cached monomial table for `(n, d)`.
pub fn monomials(n: usize, d: u32) -> Arc<Monomials> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<Monomials>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry((n, d))
        .or_insert_with(|| Arc::new(Monomials::build(n, d)))
        .clone()
}

/// Exponent counts of a tensor multi-index: `α_i = #{j : i_j = i}`.
pub fn counts(index: &[usize], n: usize) -> Vec<u32> {
    let mut alpha = vec![0u32; n];
    for &i in index {
        alpha[i] += 1;
    }
    alpha
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::binomial_u128;

    #[test]
    fn grlex_order_small() {
        let m = monomials(3, 2);
        let expected: Vec<Vec<u32>> = vec![
            vec![2, 0, 0],
            vec![1, 1, 0],
            vec![1, 0, 1],
            vec![0, 2, 0],
            vec![0, 1, 1],
            vec![0, 0, 2],
        ];
        assert_eq!(m.exponents(), &expected[..]);
        assert_eq!(m.weights(), &[1.0, 2.0, 2.0, 1.0, 2.0, 1.0]);
    }

    #[test]
    fn count_matches_binomial() {
        for n in 1..6usize {
            for d in 0..9u32 {
                let m = monomials(n, d);
                let expected = binomial_u128(u64::from(d) + n as u64 - 1, u64::from(d)).unwrap();
                assert_eq!(m.len() as u128, expected, "n={n} d={d}");
                for (i, a) in m.exponents().iter().enumerate() {
                    assert_eq!(a.iter().sum::<u32>(), d);
                    assert_eq!(m.index_of(a), Some(i));
                }
            }
        }
    }
}
