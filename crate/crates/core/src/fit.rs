//! Least-squares power-law fits in log–log coordinates.

use crate::error::{Error, Result};

/// `ln y ≈ intercept + slope · ln x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute residual in `ln y`.
    pub max_residual: f64,
    pub points: usize,
}

impl LogLogFit {
    pub fn predict(&self, x: f64) -> f64 {
        (self.intercept + self.slope * x.ln()).exp()
    }
}

/// Ordinary least squares on `(ln x, ln y)`; needs two distinct positive abscissae.
pub fn loglog_fit(points: &[(f64, f64)]) -> Result<LogLogFit> {
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(Error::InsufficientData("log-log fit needs finite positive data".into()));
    }
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if points.len() < 2 || sxx <= 0.0 {
        return Err(Error::InsufficientData(format!("{} points with {} distinct abscissae", points.len(), if sxx > 0.0 { 2 } else { 1 })));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = lx.iter().zip(&ly).map(|(x, y)| (y - intercept - slope * x).abs()).fold(0.0, f64::max);
    Ok(LogLogFit { slope, intercept, max_residual, points: points.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = (1..6).map(|i| (2f64.powi(-i), 3.0 * 2f64.powi(-i).powf(-0.25))).collect();
        let fit = loglog_fit(&pts).unwrap();
        assert!((fit.slope + 0.25).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(fit.max_residual < 1e-12);
        assert!((fit.predict(0.5) - pts[0].1).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(loglog_fit(&[(1.0, 1.0)]).is_err());
        assert!(loglog_fit(&[(1.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(loglog_fit(&[(1.0, -1.0), (2.0, 2.0)]).is_err());
    }
}
