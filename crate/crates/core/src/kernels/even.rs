//! Even-dimensional hyperbolic heat kernels. K_{2,1} is evaluated through
//! the classical one-dimensional integral representation
//!
//!   K_{2,1}(t,r) = sqrt(2) (4 pi t)^{-3/2} e^{-t/4}
//!                  * int_r^inf s e^{-s^2/4t} / sqrt(cosh s - cosh r) ds,
//!
//! with the inverse-square-root endpoint singularity removed by the
//! substitution s = r + u^2. Higher even dimensions are produced by
//! numerically differentiated recursion steps from K_{2,1}.

use crate::error::{Error, Result};
use crate::quad::adaptive_1d;

const PI: f64 = std::f64::consts::PI;

/// K_{2,1}(t, r).
pub fn k2(t: f64, r: f64) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::domain("k2: time must be positive"));
    }
    if r < 0.0 {
        return Err(Error::domain("k2: distance must be nonnegative"));
    }
    // Truncate where the integrand has dropped ~1e-19 relative to its
    // r-endpoint value: (r+U^2)^2/4t >= r^2/4t + 45.
    let u_max = ((r * r + 180.0 * t).sqrt() - r).sqrt();
    let peak = (-r * r / (4.0 * t)).exp();
    if peak == 0.0 {
        return Ok(0.0);
    }
    // cosh s - cosh r = 2 sinh((s+r)/2) sinh((s-r)/2); with s = r + u^2
    // the integrand is smooth in u and the peak factor is scaled out.
    let mut f = |u: f64| {
        let s = r + u * u;
        let root = (2.0 * (r + 0.5 * u * u).sinh() * (0.5 * u * u).sinh()).sqrt();
        if root == 0.0 {
            // u = 0 limit; nonzero only when r > 0
            if r > 0.0 {
                return 2.0 * r / r.sinh().sqrt();
            }
            return 0.0;
        }
        2.0 * u * s * (-(s * s - r * r) / (4.0 * t)).exp() / root
    };
    let (integral, _err) = adaptive_1d(&mut f, 0.0, u_max, 1e-14, 1e-12)?;
    Ok(2.0f64.sqrt() * (4.0 * PI * t).powf(-1.5) * (-t / 4.0).exp() * peak * integral)
}

/// K_{n,1} for even n >= 2. Dimensions above 2 apply the recursion
/// K_{m+2} = -e^{-mt} (2 pi sinh r)^{-1} d/dr K_m with central-difference
/// radial derivatives; accuracy degrades by roughly h^2 per step.
pub fn even_kernel(n: u32, t: f64, r: f64) -> Result<f64> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::domain(format!("even_kernel: n = {n} is not even")));
    }
    if n == 2 {
        return k2(t, r);
    }
    let m = n - 2;
    let h = 1e-4_f64.max(1e-3 * r);
    // slope = (d/dr K_m) / sinh r, extended evenly through r = 0
    let slope = if r >= 4.0 * h {
        (even_kernel(m, t, r + h)? - even_kernel(m, t, r - h)?) / (2.0 * h * r.sinh())
    } else {
        // K_m is even in r, so near the origin (d/dr K)/sinh r tends to
        // the second radial derivative at 0
        let h2 = 5e-3;
        2.0 * (even_kernel(m, t, h2)? - even_kernel(m, t, 0.0)?) / (h2 * h2)
    };
    Ok(-(-(m as f64) * t).exp() / (2.0 * PI) * slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn k2_frozen_reference_values() {
        // frozen from a 40-digit independent evaluation of the integral
        // representation
        assert_relative_eq!(
            k2(0.5, 1.0).unwrap(),
            7.5726752643569165169e-2,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            k2(1.0, 0.0).unwrap(),
            5.7535755205721974619e-2,
            max_relative = 1e-10
        );
    }

    #[test]
    fn k2_positive_and_decreasing() {
        let t = 0.3;
        let mut prev = f64::INFINITY;
        for i in 0..40 {
            let r = 0.1 * i as f64;
            let v = k2(t, r).unwrap();
            assert!(v > 0.0 && v < prev);
            prev = v;
        }
    }

    #[test]
    fn k2_rejects_bad_domain() {
        assert!(k2(0.0, 1.0).is_err());
        assert!(k2(-1.0, 1.0).is_err());
        assert!(k2(1.0, -0.1).is_err());
    }

    #[test]
    fn k4_heat_equation_sanity() {
        // dt K = drr K + 3 coth r dr K, checked loosely because of the
        // finite-difference recursion step
        let (t, r) = (0.6, 1.2);
        let h = 1e-3;
        let k = |tt: f64, rr: f64| even_kernel(4, tt, rr).unwrap();
        let kt = (k(t + h, r) - k(t - h, r)) / (2.0 * h);
        let kr = (k(t, r + h) - k(t, r - h)) / (2.0 * h);
        let krr = (k(t, r + h) - 2.0 * k(t, r) + k(t, r - h)) / (h * h);
        let res = kt - krr - 3.0 * (r.cosh() / r.sinh()) * kr;
        assert!((res / k(t, r)).abs() < 1e-2);
    }
}
