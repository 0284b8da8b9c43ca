//! Small least-squares helpers shared by the coefficient fits.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Solve min ||design * x - y||_2 by SVD. Returns the coefficients and
/// the maximum absolute residual.
pub fn least_squares(design: &DMatrix<f64>, y: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 0.0) || smax / smin > 1e12 {
        return Err(Error::computation(
            "least squares: ill-conditioned design matrix",
            if smin > 0.0 { smax / smin } else { f64::INFINITY },
        ));
    }
    let coef = svd
        .solve(y, 0.0)
        .map_err(|e| Error::computation(format!("least squares: {e}"), f64::NAN))?;
    let resid = (design * &coef - y).abs().max();
    Ok((coef, resid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn recovers_exact_linear_model() {
        let xs: Vec<f64> = (0..20).map(|i| 0.1 * i as f64).collect();
        let design = DMatrix::from_fn(xs.len(), 2, |i, j| xs[i].powi(j as i32 + 1));
        let y = DVector::from_iterator(xs.len(), xs.iter().map(|&x| 3.0 * x - 0.5 * x * x));
        let (coef, resid) = least_squares(&design, &y).unwrap();
        assert_relative_eq!(coef[0], 3.0, max_relative = 1e-12);
        assert_relative_eq!(coef[1], -0.5, max_relative = 1e-12);
        assert!(resid < 1e-12);
    }

    #[test]
    fn rejects_degenerate_design() {
        let design = DMatrix::from_fn(10, 2, |i, _| i as f64); // identical columns
        let y = DVector::from_element(10, 1.0);
        assert!(least_squares(&design, &y).is_err());
    }
}
