//! Registry of the result tags carried by bound components and report
//! checks, each with a one-line statement of the result it names.

pub const TAGS: &[(&str, &str)] = &[
    ("general-lower", "A(K^{n_1..n_d}) ≥ 1/√(min_i ∏_{j≠i} n_j)"),
    ("general-headline", "A(K^{n_1..n_d}) ≤ 10√(d ln d)/√(min_i ∏_{j≠i} n_j), d ≥ 3"),
    ("gaussian-tensor-expectation", "E ratio of a Gaussian tensor ≤ 9(1+1/ln d+2/(d+Σn_j))√(d ln d)/√(min_i ∏_{j≠i} n_j)"),
    ("gaussian-tensor-expectation-sharp", "E ratio of a Gaussian tensor ≤ 2√3 e^{(k−1)/2}√(1+2/ln d)√(d ln d)/√(min_i ∏_{j≠i} n_j)"),
    ("gaussian-tensor-expectation-exact", "E ratio of a Gaussian tensor from the exact covering constant"),
    ("gaussian-tensor-min", "A(K^{n_1..n_d}) ≤ K√(ln C) with the elementary covering sandwich"),
    ("gaussian-tensor-min-exact", "A(K^{n_1..n_d}) ≤ K√(ln C) with the exact covering constant"),
    ("matrix-exact", "A(K^{m×n}) = 1/√min(m,n)"),
    ("vector-exact", "every nonzero vector attains ratio 1"),
    ("sym2-exact", "A(Sym²(K^n)) = 1/√n"),
    ("sym-lower-integral", "A(Sym^d) ≥ 2^{−d/2} binom(d+n−1,d)^{−1/2} real, binom(d+n−1,d)^{−1/2} complex"),
    ("sym-lower-general", "A(Sym^d(K^n)) ≥ n^{−(d−1)/2}"),
    ("sym-headline", "A(Sym^d) ≤ 6√(n ln d) 2^{−d/2} binom(d+n/2−1,d)^{−1/2} real, 10√(n ln d) binom(d+n−1,d)^{−1/2} complex"),
    ("sym-factorial", "A(Sym^d(K^n)) ≤ the factorial form of the headline upper bound"),
    ("kostlan-expectation", "E ratio of a Kostlan form, headline constant"),
    ("kostlan-expectation-sharp", "E ratio of a Kostlan form, derivation-level constant"),
    ("kostlan-expectation-exact", "E ratio of a Kostlan form from the exact covering constant"),
    ("kostlan-min", "A(Sym^d(K^n)) ≤ K√(ln C) for the Kostlan tail"),
    ("kostlan-min-exact", "A(Sym^d(K^n)) ≤ K√(ln C) for the Kostlan tail, exact covering constant"),
    ("harmonic-expectation", "E ratio of a Gaussian harmonic form"),
    ("harmonic-expectation-exact", "E ratio of a Gaussian harmonic form, exact covering constant"),
    ("harmonic-min", "A(Sym^d(R^n)) ≤ K√(ln C) for the harmonic tail"),
    ("harmonic-min-exact", "A(Sym^d(R^n)) ≤ K√(ln C) for the harmonic tail, exact covering constant"),
    ("large-d-lower", "A(Sym^d) ≥ √((n−1)!/(2^d d^{n−1}))(1−n²/(4d)) real, √((n−1)!/d^{n−1})(1−n²/(4d)) complex, d ≥ n²/4"),
    ("large-d-upper", "A(Sym^d) ≤ 9√((n/2)! ln d/(2^d d^{n/2−1}))(1+1/(4d)) real, 10√(n! ln d/d^{n−1}) complex"),
    ("partial-lower-integral", "A(⊗ Sym^{d_j}) ≥ ∏ binom(d_j+n_j−1,d_j)^{−1/2}, times 2^{−Σd_j/2} over R"),
    ("partial-lower-general", "A(⊗ Sym^{d_j}(K^{n_j})) ≥ √(max_j n_j/∏ n_j^{d_j})"),
    ("partial-headline", "headline upper bound for partially symmetric spaces"),
    ("kostlan-multi-min", "A(⊗ Sym^{d_j}) ≤ K√(ln C) for the multi-Kostlan tail"),
    ("kostlan-multi-min-exact", "A(⊗ Sym^{d_j}) ≤ K√(ln C) for the multi-Kostlan tail, exact covering constant"),
    ("multi-harmonic-min", "A(⊗ Sym^{d_j}(R^{n_j})) ≤ K√(ln C) for the product-harmonic tail"),
    ("multi-harmonic-min-exact", "as multi-harmonic-min with the exact covering constant"),
    ("trivial-upper", "every ratio is at most 1"),
    ("norm-ratio-at-most-one", "‖T‖_∞ ≤ ‖T‖"),
    ("rank-one-exact", "a rank-one tensor attains ratio 1"),
    ("complex-real-norm", "‖f‖_{∞,C} ≤ √2^d ‖f‖_{∞,R} for real forms"),
    ("projection-tail", "P(‖Pr‖/‖r‖ ≥ t) ≤ 3 exp(−N t²/(3e^{k−1}))"),
    ("projection-moment", "(E‖Pr‖^ℓ/‖r‖^ℓ)^{1/ℓ} as a ratio of Gamma functions"),
    ("projection-law", "‖Pr‖²/‖r‖² ~ Beta(k/2, (N−k)/2) for any rank-k projection"),
    ("model-tail", "P(ratio ≥ t) ≤ 3C exp(−rate t²) for the model's covering constant"),
    ("lemma-l2-constant", "⟨h,h′⟩_BW = 2^{d−1}Γ(d+n/2)/(π^{n/2}Γ(d+1)) ⟨h,h′⟩_{L²(S^{n−1})} on harmonics"),
    ("zonal-norm", "Z_x(x) = ‖Z_x‖²_{L²} = D_{d,n}/|S^{n−1}|"),
];

/// Statement of the result named by `tag`.
pub fn describe(tag: &str) -> Option<&'static str> {
    TAGS.iter().find(|(t, _)| *t == tag).map(|(_, s)| *s)
}

pub fn is_known(tag: &str) -> bool {
    describe(tag).is_some()
}
