//! Sample statistics with fixed summation order, so results depend only on
//! the data, not on how replicas were scheduled.

use serde::Serialize;

/// Pairwise (cascade) summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    pairwise_sum(xs) / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    covariance(xs, xs)
}

/// Unbiased sample covariance.
pub fn covariance(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 2 {
        return f64::NAN;
    }
    let (mx, my) = (mean(xs), mean(ys));
    let prods: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).collect();
    pairwise_sum(&prods) / (n - 1) as f64
}

fn central_moment(xs: &[f64], k: i32) -> f64 {
    let m = mean(xs);
    let p: Vec<f64> = xs.iter().map(|x| (x - m).powi(k)).collect();
    mean(&p)
}

/// Moment estimator `g1 = m3 / m2^{3/2}`.
pub fn skewness(xs: &[f64]) -> f64 {
    central_moment(xs, 3) / central_moment(xs, 2).powf(1.5)
}

/// Moment estimator `g2 = m4 / m2^2 - 3`.
pub fn excess_kurtosis(xs: &[f64]) -> f64 {
    central_moment(xs, 4) / central_moment(xs, 2).powi(2) - 3.0
}

/// Delta-method standard error of the sample variance, `sqrt((m4 - m2^2) / n)`.
pub fn variance_se(xs: &[f64]) -> f64 {
    let (m2, m4) = (central_moment(xs, 2), central_moment(xs, 4));
    ((m4 - m2 * m2).max(0.0) / xs.len() as f64).sqrt()
}

/// Standard error of the sample covariance from the spread of the centred
/// products.
pub fn covariance_se(xs: &[f64], ys: &[f64]) -> f64 {
    let (mx, my) = (mean(xs), mean(ys));
    let prods: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).collect();
    (variance(&prods) / xs.len() as f64).sqrt()
}

/// Standard error of the mean.
pub fn mean_se(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

/// Jarque-Bera statistic `n/6 (S^2 + K^2/4)` and its asymptotic
/// chi-square(2) p-value `exp(-JB/2)`.
pub fn jarque_bera(xs: &[f64]) -> (f64, f64) {
    let (s, k) = (skewness(xs), excess_kurtosis(xs));
    let jb = xs.len() as f64 / 6.0 * (s * s + k * k / 4.0);
    (jb, (-jb / 2.0).exp())
}

/// Median, averaging the middle pair for even lengths.
pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    covariance(&lx, &ly) / variance(&lx)
}

/// Summary of one scalar observable across replicas.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub mean_se: f64,
    pub variance: f64,
    pub variance_se: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub jarque_bera: f64,
    pub normality_p: f64,
}

impl Summary {
    pub fn of(xs: &[f64]) -> Self {
        let (jb, p) = jarque_bera(xs);
        Self {
            n: xs.len(),
            mean: mean(xs),
            mean_se: mean_se(xs),
            variance: variance(xs),
            variance_se: variance_se(xs),
            skewness: skewness(xs),
            excess_kurtosis: excess_kurtosis(xs),
            jarque_bera: jb,
            normality_p: p,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Exp, Normal};

    #[test]
    fn small_exact_values() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&xs), 2.5);
        assert!((variance(&xs) - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(median(&xs), 2.5);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert!(skewness(&xs).abs() < 1e-15);
        assert!((covariance(&xs, &[2.0, 4.0, 6.0, 8.0]) - 10.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn variance_estimator_on_gaussian_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let normal = Normal::new(1.0, 2.0).unwrap();
        let xs: Vec<f64> = (0..20_000).map(|_| normal.sample(&mut rng)).collect();
        let v = variance(&xs);
        assert!((v - 4.0).abs() < 4.0 * variance_se(&xs), "{v}");
        assert!(skewness(&xs).abs() < 0.1);
        assert!(excess_kurtosis(&xs).abs() < 0.15);
        assert!(jarque_bera(&xs).1 > 1e-3);
    }

    #[test]
    fn normality_test_flags_skewed_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let exp = Exp::new(1.0).unwrap();
        let xs: Vec<f64> = (0..2000).map(|_| exp.sample(&mut rng)).collect();
        assert!(jarque_bera(&xs).1 < 1e-6);
        assert!((skewness(&xs) - 2.0).abs() < 0.5);
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [16.0, 32.0, 64.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-2.5)).collect();
        assert!((log_log_slope(&xs, &ys) + 2.5).abs() < 1e-12);
    }
}
