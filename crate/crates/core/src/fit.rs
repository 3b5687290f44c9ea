//! Least-squares power-law fits on log-log data.

use crate::error::{Error, Result};

/// Result of a least-squares line fit, usually on (log x, log y) pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute residual over the fitted points.
    pub max_residual: f64,
    pub points: usize,
}

/// Ordinary least squares on the given coordinates.
///
/// Rejects fits with fewer than two points or with no variance in x.
pub fn fit_linear(xy: &[(f64, f64)]) -> Result<RateFit> {
    if xy.len() < 2 {
        return Err(Error::FitRangeTooSmall { needed: 2, got: xy.len() });
    }
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in xy {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= 0.0 || !sxx.is_finite() {
        return Err(Error::DegenerateFit("no variance in the abscissa"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = xy
        .iter()
        .map(|&(x, y)| (y - slope * x - intercept).abs())
        .fold(0.0, f64::max);
    Ok(RateFit { slope, intercept, max_residual, points: xy.len() })
}

/// Least squares on (ln x, ln y); inputs must be strictly positive.
pub fn fit_log_log(xy: &[(f64, f64)]) -> Result<RateFit> {
    let logged: Vec<(f64, f64)> = xy
        .iter()
        .filter(|&&(x, y)| x > 0.0 && y > 0.0)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    if logged.len() < xy.len() {
        return Err(Error::DegenerateFit("nonpositive value in log-log fit"));
    }
    fit_linear(&logged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exact_line_is_recovered() {
        let pts: Vec<(f64, f64)> = (1..12).map(|i| (i as f64, 3.0 - 2.0 * i as f64)).collect();
        let fit = fit_linear(&pts).unwrap();
        assert_abs_diff_eq!(fit.slope, -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.intercept, 3.0, epsilon = 1e-12);
        assert!(fit.max_residual < 1e-12);
    }

    #[test]
    fn power_law_slope_from_log_fit() {
        let pts: Vec<(f64, f64)> = (1..40).map(|i| (i as f64, 5.0 * (i as f64).powf(1.5))).collect();
        let fit = fit_log_log(&pts).unwrap();
        assert_abs_diff_eq!(fit.slope, 1.5, epsilon = 1e-10);
    }

    #[test]
    fn constant_abscissa_is_rejected() {
        let pts = vec![(2.0, 1.0), (2.0, 3.0), (2.0, 9.0)];
        assert!(fit_linear(&pts).is_err());
    }

    #[test]
    fn single_point_is_rejected() {
        assert!(fit_linear(&[(1.0, 1.0)]).is_err());
    }
}
