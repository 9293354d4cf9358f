use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
}

impl LinearFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

/// Relative spread of the abscissae below which a design is degenerate.
pub const DEGENERATE_SPREAD: f64 = 1e-12;

/// Unweighted least squares, `slope = Cov(x, y) / Var x` and
/// `intercept = <y> - slope <x>`, computed on centred data.
pub fn linear_fit(samples: &[(f64, f64)]) -> Result<LinearFit> {
    if samples.len() < 2 {
        return arg(format!("need at least two samples, got {}", samples.len()));
    }
    let n = samples.len() as f64;
    let mx = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let my = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let spread = samples.iter().fold(0.0f64, |m, s| m.max((s.0 - mx).abs()));
    if spread <= DEGENERATE_SPREAD * mx.abs() || spread == 0.0 {
        return Err(Error::DegenerateDesign { count: samples.len(), value: mx });
    }
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(x, y) in samples {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    Ok(LinearFit { intercept: my - slope * mx, slope })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn exact_line() {
        let f = linear_fit(&[(1.0, 2.0), (2.0, 4.0), (3.0, 6.0)]).unwrap();
        assert_abs_diff_eq!(f.intercept, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.slope, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn constant() {
        let f = linear_fit(&[(0.0, 5.0), (1.0, 5.0)]).unwrap();
        assert_eq!((f.intercept, f.slope), (5.0, 0.0));
    }

    #[test]
    fn degenerate_and_short() {
        assert!(matches!(linear_fit(&[(1.0, 2.0), (1.0, 3.0)]), Err(Error::DegenerateDesign { .. })));
        assert!(matches!(linear_fit(&[(0.0, 2.0), (0.0, 3.0)]), Err(Error::DegenerateDesign { .. })));
        assert!(linear_fit(&[(1.0, 2.0)]).is_err());
    }

    proptest! {
        #[test]
        fn recovers_affine_data(
            xs in prop::collection::vec(0.0f64..0.05, 3..60),
            slope in -10.0f64..10.0,
            shift in -20.0f64..20.0,
        ) {
            let spread = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - xs.iter().cloned().fold(f64::INFINITY, f64::min);
            prop_assume!(spread > 1e-6);
            let samples: Vec<(f64, f64)> = xs.iter().map(|&x| (x, shift + slope * x)).collect();
            let f = linear_fit(&samples).unwrap();
            prop_assert!((f.intercept - shift).abs() <= 1e-12 * shift.abs().max(1.0) * 10.0);
        }

        #[test]
        fn residuals_orthogonal_to_abscissae(
            pts in prop::collection::vec((0.0f64..1.0, -5.0f64..5.0), 3..40),
        ) {
            let spread = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max)
                - pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
            prop_assume!(spread > 1e-3);
            let f = linear_fit(&pts).unwrap();
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
            let dot: f64 = pts.iter().map(|&(x, y)| (x - mx) * (y - f.predict(x))).sum();
            prop_assert!(dot.abs() <= 1e-10);
        }
    }
}
