//! Small statistical helpers shared by the diagnostics and the test suites.

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Sample autocovariance at `lag` for a known-zero-mean stationary series.
pub fn autocovariance(xs: &[f64], lag: usize) -> f64 {
    assert!(lag < xs.len(), "lag {lag} >= series length {}", xs.len());
    let n = xs.len() - lag;
    let mut s = 0.0;
    for i in 0..n {
        s += xs[i] * xs[i + lag];
    }
    s / n as f64
}

/// Two-sample Kolmogorov-Smirnov statistic (sup distance between EDFs).
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    ys.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xs.len() && j < ys.len() {
        let x = xs[i];
        let y = ys[j];
        if x <= y {
            i += 1;
        }
        if y <= x {
            j += 1;
        }
        let gap = (i as f64 / na - j as f64 / nb).abs();
        if gap > d {
            d = gap;
        }
    }
    d
}

/// Asymptotic two-sample KS p-value (Kolmogorov distribution with the
/// Stephens small-sample correction).
pub fn ks_pvalue(a: &[f64], b: &[f64]) -> f64 {
    let d = ks_statistic(a, b);
    let ne = (a.len() as f64 * b.len() as f64) / (a.len() as f64 + b.len() as f64);
    let sqrt_ne = ne.sqrt();
    let lambda = (sqrt_ne + 0.12 + 0.11 / sqrt_ne) * d;
    kolmogorov_survival(lambda)
}

fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let term = sign * (-2.0 * (j as f64) * (j as f64) * lambda * lambda).exp();
        sum += term;
        sign = -sign;
        if term.abs() < 1e-12 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Least-squares line fit, returning (slope, intercept).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let mx = mean(xs);
    let my = mean(ys);
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    let slope = num / den;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn basic_moments() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&xs), 2.5);
        assert!((variance(&xs) - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(median(&xs), 2.5);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
    }

    #[test]
    fn ks_same_distribution_passes() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let a: Vec<f64> = (0..4000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let b: Vec<f64> = (0..4000).map(|_| StandardNormal.sample(&mut rng)).collect();
        assert!(ks_pvalue(&a, &b) > 0.01);
    }

    #[test]
    fn ks_detects_shift() {
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let a: Vec<f64> = (0..4000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let b: Vec<f64> = (0..4000)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                1.0 + z
            })
            .collect();
        assert!(ks_pvalue(&a, &b) < 1e-6);
    }

    #[test]
    fn line_fit_recovers_exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let (slope, intercept) = linear_fit(&xs, &ys);
        assert!((slope - 2.0).abs() < 1e-14);
        assert!((intercept - 1.0).abs() < 1e-14);
    }
}
