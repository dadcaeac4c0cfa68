//! Least-squares fits on log-log data.

/// Ordinary least-squares line `y ≈ slope·x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let slope = sxy / sxx;
    Some((slope, mean_y - slope * mean_x))
}

/// Fits `y ≈ C·x^q` on the points where both coordinates are positive and
/// finite, returning `(q, C)` when at least `min_points` remain.
pub fn power_law_fit(points: &[(f64, f64)], min_points: usize) -> Option<(f64, f64)> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .unzip();
    if xs.len() < min_points.max(2) {
        return None;
    }
    linear_fit(&xs, &ys).map(|(q, log_c)| (q, log_c.exp()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_power_law() {
        let points: Vec<_> = (1..10).map(|i| (i as f64, 3.0 * (i as f64).powf(1.5))).collect();
        let (q, c) = power_law_fit(&points, 3).unwrap();
        assert!((q - 1.5).abs() < 1e-12);
        assert!((c - 3.0).abs() < 1e-12);
    }

    #[test]
    fn skips_nonpositive_and_short_input() {
        assert!(power_law_fit(&[(1.0, 0.0), (2.0, 1.0)], 2).is_none());
        assert!(power_law_fit(&[(1.0, 1.0), (2.0, 2.0), (4.0, f64::INFINITY)], 3).is_none());
        assert!(linear_fit(&[1.0, 1.0], &[0.0, 1.0]).is_none());
    }
}
