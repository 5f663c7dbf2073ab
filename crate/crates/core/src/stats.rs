//! Small estimators used by the experiments.

/// Sample proportion and its binomial standard error.
pub fn proportion(successes: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let p = successes as f64 / n as f64;
    (p, (p * (1.0 - p) / n as f64).sqrt())
}

/// Mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return (xs.first().copied().unwrap_or(f64::NAN), f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Mean of a correlated series with a batch-means standard error.
pub fn batch_means(xs: &[f64], batches: usize) -> (f64, f64) {
    let size = xs.len() / batches.max(1);
    if size == 0 {
        return mean_stderr(xs);
    }
    let means: Vec<f64> = xs
        .chunks_exact(size)
        .take(batches)
        .map(|c| c.iter().sum::<f64>() / size as f64)
        .collect();
    let (_, se) = mean_stderr(&means);
    (xs.iter().sum::<f64>() / xs.len() as f64, se)
}

/// Least-squares slope of `ys` on `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len()) as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len() / 2;
    if v.len() % 2 == 1 {
        v[k]
    } else {
        (v[k - 1] + v[k]) / 2.0
    }
}

/// Pearson chi-squared statistic over paired observed/expected counts.
pub fn chi_squared(observed: &[f64], expected: &[f64]) -> f64 {
    observed
        .iter()
        .zip(expected)
        .filter(|(_, &e)| e > 0.0)
        .map(|(o, e)| (o - e).powi(2) / e)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proportion_values() {
        let (p, se) = proportion(25, 100);
        assert_eq!(p, 0.25);
        assert!((se - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
        assert!(proportion(0, 0).0.is_nan());
    }

    #[test]
    fn slope_of_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 1.0).collect();
        assert!((slope(&xs, &ys) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn median_even_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn batch_means_of_constant_series() {
        let (m, se) = batch_means(&[1.0; 100], 10);
        assert_eq!(m, 1.0);
        assert_eq!(se, 0.0);
    }

    #[test]
    fn chi_squared_zero_on_match() {
        assert_eq!(chi_squared(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
    }
}
