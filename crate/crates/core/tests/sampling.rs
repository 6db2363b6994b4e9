use rand::Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{Beta, ContinuousCDF};

use rankone::random::{
    gaussian_harmonic, kostlan_form, kostlan_multi, projection_ratio_sample, uniform_sphere, Projection, SeedSpec,
};
use rankone::special::binomial_u128;
use rankone::stats::{ks_two_sample, mean, variance};
use rankone::Field;

#[test]
fn streams_are_bitwise_reproducible() {
    let s = SeedSpec::new(99);
    let a: Vec<f64> = (0..100).map(|_| s.rng(7, "sample").sample(StandardNormal)).collect();
    let mut r1 = s.rng(7, "sample");
    let mut r2 = s.rng(7, "sample");
    for _ in 0..1000 {
        assert_eq!(r1.gen::<u64>(), r2.gen::<u64>());
    }
    assert!(a.windows(2).all(|w| w[0] == w[1]));
    let f = kostlan_form(5, 3, Field::Complex, &mut s.rng(3, "form")).unwrap();
    let g = kostlan_form(5, 3, Field::Complex, &mut s.rng(3, "form")).unwrap();
    assert_eq!(f, g);
}

#[test]
fn tagged_streams_are_uncorrelated() {
    let s = SeedSpec::new(2024);
    let n = 100_000;
    let mut a = s.rng(0, "sample");
    let mut b = s.rng(0, "maximizer");
    let mut c = s.rng(1, "sample");
    let xs: Vec<f64> = (0..n).map(|_| a.sample(StandardNormal)).collect();
    let ys: Vec<f64> = (0..n).map(|_| b.sample(StandardNormal)).collect();
    let zs: Vec<f64> = (0..n).map(|_| c.sample(StandardNormal)).collect();
    let corr = |u: &[f64], v: &[f64]| {
        let (mu, mv) = (mean(u), mean(v));
        let cov: f64 = u.iter().zip(v).map(|(x, y)| (x - mu) * (y - mv)).sum::<f64>() / n as f64;
        cov / (variance(u) * variance(v)).sqrt()
    };
    let sigma = 1.0 / (n as f64).sqrt();
    assert!(corr(&xs, &ys).abs() < 3.0 * sigma);
    assert!(corr(&xs, &zs).abs() < 3.0 * sigma);
    assert!(corr(&ys, &zs).abs() < 3.0 * sigma);
}

#[test]
fn kostlan_norm_is_chi_squared() {
    let s = SeedSpec::new(5);
    for (d, n) in [(3u32, 2usize), (4, 3), (6, 2)] {
        let big_n = binomial_u128(u64::from(d) + n as u64 - 1, u64::from(d)).unwrap() as f64;
        let draws = 20_000;
        let real: Vec<f64> = (0..draws)
            .map(|i| kostlan_form(d, n, Field::Real, &mut s.rng(i, "real")).unwrap().bw_norm().powi(2))
            .collect();
        assert!((mean(&real) / big_n - 1.0).abs() < 0.05, "d={d} n={n}");
        assert!((variance(&real) / (2.0 * big_n) - 1.0).abs() < 0.05, "d={d} n={n}");
        // Complex coefficients have E|g|² = 1, so 2‖f‖² ~ χ²_{2N}.
        let complex: Vec<f64> = (0..draws)
            .map(|i| 2.0 * kostlan_form(d, n, Field::Complex, &mut s.rng(i, "complex")).unwrap().bw_norm().powi(2))
            .collect();
        assert!((mean(&complex) / (2.0 * big_n) - 1.0).abs() < 0.05);
        assert!((variance(&complex) / (4.0 * big_n) - 1.0).abs() < 0.05);
    }
}

#[test]
fn multi_kostlan_norm_has_product_dimension() {
    let s = SeedSpec::new(6);
    let draws = 20_000;
    let v: Vec<f64> = (0..draws)
        .map(|i| kostlan_multi(&[2, 3], &[2, 2], Field::Real, &mut s.rng(i, "m")).unwrap().bw_norm().powi(2))
        .collect();
    // binom(3,2) · binom(4,3) = 12 degrees of freedom.
    assert!((mean(&v) / 12.0 - 1.0).abs() < 0.05);
}

#[test]
fn harmonic_evaluation_law_is_pole_independent() {
    let s = SeedSpec::new(7);
    for (d, n) in [(3u32, 2u32), (4, 3)] {
        let poles: Vec<Vec<f64>> = (0..5)
            .map(|i| {
                uniform_sphere(n as usize, Field::Real, &mut s.rng(i, "pole"))
                    .unwrap()
                    .iter()
                    .map(|z| z.re)
                    .collect()
            })
            .collect();
        let draws = 3000;
        let values: Vec<Vec<f64>> = poles
            .iter()
            .enumerate()
            .map(|(p, x)| {
                (0..draws)
                    .map(|i| {
                        let f = gaussian_harmonic(d, n, &mut s.rng(i, &format!("harmonic-{p}"))).unwrap();
                        f.evaluate_real(x).unwrap().re / f.bw_norm()
                    })
                    .collect()
            })
            .collect();
        for other in &values[1..] {
            let ks = ks_two_sample(&values[0], other).unwrap();
            assert!(ks.p_value > 0.01, "d={d} n={n}: p={}", ks.p_value);
        }
    }
}

/// One-sample KS statistic against a continuous CDF.
fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn projection_ratio_squared_is_beta() {
    let s = SeedSpec::new(8);
    for (big_n, k) in [(10usize, 3usize), (50, 7), (200, 150)] {
        let beta = Beta::new(k as f64 / 2.0, (big_n - k) as f64 / 2.0).unwrap();
        let draws = 20_000;
        let direct: Vec<f64> = (0..draws)
            .map(|i| projection_ratio_sample(big_n, k, &mut s.rng(i, "direct")).unwrap().powi(2))
            .collect();
        let frame = Projection::random(big_n, k, &mut s.rng(0, "frame")).unwrap();
        let explicit: Vec<f64> = (0..draws).map(|i| frame.sample(&mut s.rng(i, "explicit")).powi(2)).collect();
        // 1.63/√n is the asymptotic 1% critical value.
        let critical = 1.63 / (draws as f64).sqrt();
        assert!(ks_statistic(direct, |x| beta.cdf(x)) < critical, "N={big_n} k={k}");
        assert!(ks_statistic(explicit, |x| beta.cdf(x)) < critical, "N={big_n} k={k}");
    }
}

#[test]
fn sphere_points_are_uniform_in_first_coordinate() {
    // x₁² for x uniform on S^{N−1} is Beta(1/2, (N−1)/2).
    let s = SeedSpec::new(9);
    let beta = Beta::new(0.5, 1.5).unwrap();
    let xs: Vec<f64> = (0..20_000)
        .map(|i| uniform_sphere(4, Field::Real, &mut s.rng(i, "u")).unwrap()[0].re.powi(2))
        .collect();
    assert!(ks_statistic(xs, |x| beta.cdf(x)) < 1.63 / (20_000f64).sqrt());
}
