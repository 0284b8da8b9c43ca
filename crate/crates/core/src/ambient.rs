//! Constant-curvature model spaces used as the ambient (M, g): Euclidean
//! space, and hyperbolic space in the hyperboloid model, where geodesic
//! distance is a closed form of the Lorentzian inner product.

use crate::error::{Error, Result};
use nalgebra::DVector;

/// Tolerance regime for the arccosh argument: round-off slightly below 1
/// is clamped, anything further off is a domain error.
const CLAMP_TOL: f64 = 1e-10;
/// How far a point may drift off the hyperboloid before it is rejected.
const ON_MANIFOLD_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub enum AmbientSpace {
    /// R^d with the flat metric.
    Euclidean { dim: usize },
    /// H^d of curvature -kappa^2, realized as the upper sheet of
    /// <x,x>_L = -1/kappa^2 in R^{d,1} (signature d pluses, one minus on
    /// the last coordinate).
    Hyperbolic { dim: usize, kappa: f64 },
}

impl AmbientSpace {
    pub fn euclidean(dim: usize) -> Self {
        AmbientSpace::Euclidean { dim }
    }

    pub fn hyperbolic(dim: usize, kappa: f64) -> Result<Self> {
        if kappa <= 0.0 {
            return Err(Error::domain("hyperbolic ambient requires kappa > 0"));
        }
        Ok(AmbientSpace::Hyperbolic { dim, kappa })
    }

    /// Intrinsic dimension d of the model space.
    pub fn dim(&self) -> usize {
        match self {
            AmbientSpace::Euclidean { dim } => *dim,
            AmbientSpace::Hyperbolic { dim, .. } => *dim,
        }
    }

    /// Number of coordinates a point carries (d, or d+1 on the hyperboloid).
    pub fn coord_dim(&self) -> usize {
        match self {
            AmbientSpace::Euclidean { dim } => *dim,
            AmbientSpace::Hyperbolic { dim, .. } => *dim + 1,
        }
    }

    pub fn kappa(&self) -> f64 {
        match self {
            AmbientSpace::Euclidean { .. } => 0.0,
            AmbientSpace::Hyperbolic { kappa, .. } => *kappa,
        }
    }

    /// Ambient inner product of tangent vectors: the Euclidean dot, or the
    /// Lorentzian form (positive definite on hyperboloid tangent spaces).
    pub fn inner(&self, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
        match self {
            AmbientSpace::Euclidean { .. } => v.dot(w),
            AmbientSpace::Hyperbolic { .. } => lorentz_inner_unchecked(v, w),
        }
    }

    /// Checks that `x` lies on the model within tolerance.
    pub fn check_point(&self, x: &DVector<f64>) -> Result<()> {
        match self {
            AmbientSpace::Euclidean { dim } => {
                if x.len() != *dim {
                    return Err(Error::domain(format!(
                        "point has {} coordinates, ambient dimension is {dim}",
                        x.len()
                    )));
                }
                Ok(())
            }
            AmbientSpace::Hyperbolic { dim, kappa } => {
                if x.len() != dim + 1 {
                    return Err(Error::domain(format!(
                        "hyperboloid point needs {} coordinates, got {}",
                        dim + 1,
                        x.len()
                    )));
                }
                let k2 = kappa * kappa;
                let drift = (k2 * lorentz_inner_unchecked(x, x) + 1.0).abs();
                if drift > ON_MANIFOLD_TOL {
                    return Err(Error::domain(format!(
                        "point off the hyperboloid: constraint residual {drift:.3e}"
                    )));
                }
                if x[x.len() - 1] <= 0.0 {
                    return Err(Error::domain("point on the wrong hyperboloid sheet"));
                }
                Ok(())
            }
        }
    }

    /// Geodesic distance between two points of the model.
    pub fn distance(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        match self {
            AmbientSpace::Euclidean { .. } => Ok((x - y).norm()),
            AmbientSpace::Hyperbolic { kappa, .. } => {
                let arg = -kappa * kappa * lorentz_inner_unchecked(x, y);
                if arg < 1.0 - CLAMP_TOL {
                    return Err(Error::domain(format!(
                        "arccosh argument {arg} below 1 beyond round-off"
                    )));
                }
                Ok(arg.max(1.0).acosh() / kappa)
            }
        }
    }

    /// Distance without the per-call manifold validation; quadrature inner
    /// loops use this after their nodes have been checked once.
    pub fn distance_unchecked(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        match self {
            AmbientSpace::Euclidean { .. } => (x - y).norm(),
            AmbientSpace::Hyperbolic { kappa, .. } => {
                let arg = (-kappa * kappa * lorentz_inner_unchecked(x, y)).max(1.0);
                arg.acosh() / kappa
            }
        }
    }

    /// Lifts a spatial vector w in R^d to the hyperboloid point
    /// (w, sqrt(|w|^2 + 1/kappa^2)); identity for Euclidean ambients.
    pub fn lift(&self, raw: &[f64]) -> DVector<f64> {
        match self {
            AmbientSpace::Euclidean { .. } => DVector::from_row_slice(raw),
            AmbientSpace::Hyperbolic { kappa, .. } => {
                project_to_hyperboloid(raw.len(), *kappa, raw)
            }
        }
    }

    /// Spatial part of a point (drops the hyperboloid time coordinate).
    pub fn spatial<'a>(&self, x: &'a DVector<f64>) -> &'a [f64] {
        match self {
            AmbientSpace::Euclidean { .. } => x.as_slice(),
            AmbientSpace::Hyperbolic { .. } => &x.as_slice()[..x.len() - 1],
        }
    }
}

/// Maps spatial coordinates w to the hyperboloid sheet:
/// (w, sqrt(|w|^2 + 1/kappa^2)). The output satisfies the constraint
/// exactly up to round-off.
pub fn project_to_hyperboloid(d: usize, kappa: f64, raw: &[f64]) -> DVector<f64> {
    assert!(kappa > 0.0, "project_to_hyperboloid requires kappa > 0");
    assert_eq!(raw.len(), d);
    let norm2: f64 = raw.iter().map(|v| v * v).sum();
    let mut coords = Vec::with_capacity(d + 1);
    coords.extend_from_slice(raw);
    coords.push((norm2 + 1.0 / (kappa * kappa)).sqrt());
    DVector::from_vec(coords)
}

/// Lorentzian inner product sum_i x_i y_i - x_last y_last.
pub fn lorentz_inner(x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::domain("lorentz_inner: dimension mismatch"));
    }
    Ok(lorentz_inner_unchecked(x, y))
}

fn lorentz_inner_unchecked(x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let m = x.len() - 1;
    let mut s = 0.0;
    for i in 0..m {
        s += x[i] * y[i];
    }
    s - x[m] * y[m]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn euclidean_distance() {
        let amb = AmbientSpace::euclidean(3);
        let x = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        assert_eq!(amb.distance(&x, &x).unwrap(), 0.0);
        let y = DVector::from_vec(vec![1.0, 2.0, 5.0]);
        assert_relative_eq!(amb.distance(&x, &y).unwrap(), 2.0);
    }

    #[test]
    fn hyperbolic_distance_closed_form() {
        // x = vertex, y = (sinh 1, 0, cosh 1): distance exactly 1
        let amb = AmbientSpace::hyperbolic(2, 1.0).unwrap();
        let x = DVector::from_vec(vec![0.0, 0.0, 1.0]);
        let y = DVector::from_vec(vec![1.0f64.sinh(), 0.0, 1.0f64.cosh()]);
        assert_relative_eq!(amb.distance(&x, &y).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn distance_scales_inversely_with_kappa() {
        let a1 = AmbientSpace::hyperbolic(2, 1.0).unwrap();
        let a2 = AmbientSpace::hyperbolic(2, 2.0).unwrap();
        // corresponding points: scale spatial coordinates by 1/kappa
        let p1 = project_to_hyperboloid(2, 1.0, &[0.7, -0.2]);
        let q1 = project_to_hyperboloid(2, 1.0, &[-0.1, 0.4]);
        let p2 = project_to_hyperboloid(2, 2.0, &[0.35, -0.1]);
        let q2 = project_to_hyperboloid(2, 2.0, &[-0.05, 0.2]);
        assert_relative_eq!(
            a2.distance(&p2, &q2).unwrap(),
            a1.distance(&p1, &q1).unwrap() / 2.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn off_manifold_rejected() {
        let amb = AmbientSpace::hyperbolic(2, 1.0).unwrap();
        let bad = DVector::from_vec(vec![0.0, 0.0, 1.1]);
        let good = DVector::from_vec(vec![0.0, 0.0, 1.0]);
        assert!(amb.distance(&bad, &good).is_err());
    }

    #[test]
    fn projection_satisfies_constraint() {
        let p = project_to_hyperboloid(2, 1.0, &[0.0, 0.0]);
        assert_eq!(p, DVector::from_vec(vec![0.0, 0.0, 1.0]));
        let q = project_to_hyperboloid(2, 1.0, &[1.0, 0.0]);
        assert_relative_eq!(q[2], 2.0f64.sqrt(), max_relative = 1e-15);
        for raw in [[0.3, -2.0], [5.0, 1.0], [0.0, 1e-8]] {
            let x = project_to_hyperboloid(2, 1.0, &raw);
            assert_relative_eq!(lorentz_inner(&x, &x).unwrap(), -1.0, max_relative = 1e-12);
            let amb = AmbientSpace::hyperbolic(2, 1.0).unwrap();
            assert!(amb.check_point(&x).is_ok());
        }
    }

    #[test]
    fn lorentz_inner_values() {
        let e3 = DVector::from_vec(vec![0.0, 0.0, 1.0]);
        assert_eq!(lorentz_inner(&e3, &e3).unwrap(), -1.0);
        let x = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let y = DVector::from_vec(vec![0.0, 1.0, 0.0]);
        assert_eq!(lorentz_inner(&x, &y).unwrap(), 0.0);
        let short = DVector::from_vec(vec![1.0, 0.0]);
        assert!(lorentz_inner(&x, &short).is_err());
    }

    #[test]
    fn lorentz_bilinearity() {
        let x = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let z = DVector::from_vec(vec![-0.5, 0.3, 1.2]);
        let y = DVector::from_vec(vec![0.1, -0.7, 0.9]);
        let (a, b) = (2.5, -1.75);
        let lhs = lorentz_inner(&(&x * a + &z * b), &y).unwrap();
        let rhs = a * lorentz_inner(&x, &y).unwrap() + b * lorentz_inner(&z, &y).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-14);
    }

    #[test]
    fn triangle_inequality_sampled() {
        // deterministic pseudo-random triples on both models
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0
        };
        let hyp = AmbientSpace::hyperbolic(3, 1.3).unwrap();
        let euc = AmbientSpace::euclidean(3);
        for _ in 0..200 {
            let w: Vec<Vec<f64>> = (0..3).map(|_| (0..3).map(|_| next()).collect()).collect();
            for amb in [&hyp, &euc] {
                let pts: Vec<_> = w.iter().map(|wi| amb.lift(wi)).collect();
                let dab = amb.distance(&pts[0], &pts[1]).unwrap();
                let dbc = amb.distance(&pts[1], &pts[2]).unwrap();
                let dac = amb.distance(&pts[0], &pts[2]).unwrap();
                assert!(dac <= dab + dbc + 1e-9);
                assert!((dab - amb.distance(&pts[1], &pts[0]).unwrap()).abs() < 1e-14);
            }
        }
    }
}
