//! The radial heat-kernel family K_{n,kappa} of the simply connected
//! space form of curvature -kappa^2, together with its radial derivative,
//! weighted radial masses and small-time expansion coefficients.

mod even;
mod symbolic;

pub use even::k2;
pub use symbolic::odd_kernel;

use crate::error::{Error, Result};
use crate::fitting::least_squares;
use crate::quad::adaptive_1d;
use nalgebra::{DMatrix, DVector};

const PI: f64 = std::f64::consts::PI;

/// Selects a member of the kernel family: intrinsic dimension n >= 1 and
/// curvature scale kappa >= 0 (kappa = 0 is the flat Gaussian kernel).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelSpec {
    pub n: u32,
    pub kappa: f64,
}

impl KernelSpec {
    pub fn new(n: u32, kappa: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::domain("KernelSpec: n must be >= 1"));
        }
        if !(kappa >= 0.0) {
            return Err(Error::domain("KernelSpec: kappa must be >= 0"));
        }
        Ok(KernelSpec { n, kappa })
    }
}

/// Fitted leading coefficients of K_{n,1}/K_{n,0} ~ 1 + a_n t + b_n rho^2.
#[derive(Clone, Copy, Debug)]
pub struct SmallTimeCoefficients {
    pub a_n: f64,
    pub b_n: f64,
    pub fit_residual: f64,
}

/// (4 pi t)^{-n/2} e^{-r^2/4t}.
pub fn euclidean_kernel(n: u32, t: f64, r: f64) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::domain("euclidean_kernel: time must be positive"));
    }
    if r < 0.0 {
        return Err(Error::domain("euclidean_kernel: distance must be nonnegative"));
    }
    Ok((4.0 * PI * t).powf(-0.5 * n as f64) * (-r * r / (4.0 * t)).exp())
}

/// K_{n,kappa} for kappa > 0, via the scaling law
/// K_{n,kappa}(t,r) = kappa^n K_{n,1}(kappa^2 t, kappa r).
pub fn hyperbolic_kernel(spec: KernelSpec, t: f64, r: f64) -> Result<f64> {
    if spec.kappa <= 0.0 {
        return Err(Error::domain("hyperbolic_kernel: kappa must be positive"));
    }
    if t <= 0.0 {
        return Err(Error::domain("hyperbolic_kernel: time must be positive"));
    }
    if r < 0.0 {
        return Err(Error::domain("hyperbolic_kernel: distance must be nonnegative"));
    }
    let ts = spec.kappa * spec.kappa * t;
    let rs = spec.kappa * r;
    let unit = unit_kernel(spec.n, ts, rs)?;
    Ok(spec.kappa.powi(spec.n as i32) * unit)
}

/// K_{n,1}(t, r) with t, r already in curvature units.
fn unit_kernel(n: u32, t: f64, r: f64) -> Result<f64> {
    if n % 2 == 1 {
        Ok(odd_kernel(n).eval(t, r))
    } else {
        even::even_kernel(n, t, r)
    }
}

/// Dispatch on kappa: the flat kernel at kappa = 0, the hyperbolic family
/// otherwise.
pub fn kernel(spec: KernelSpec, t: f64, r: f64) -> Result<f64> {
    if spec.kappa == 0.0 {
        euclidean_kernel(spec.n, t, r)
    } else {
        hyperbolic_kernel(spec, t, r)
    }
}

/// Radial derivative of K_{n,kappa}, through the identity that lowers it
/// to the (n+2)-dimensional member:
///   kappa = 0:  -2 pi r K_{n+2,0}(t,r)
///   kappa > 0:  -2 pi kappa^{-1} e^{+n kappa^2 t} sinh(kappa r) K_{n+2,kappa}(t,r)
/// (positive-time form; the recursion defining the family fixes the sign
/// of the exponent, and the finite-difference consistency tests pin it).
pub fn kernel_radial_derivative(spec: KernelSpec, t: f64, r: f64) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::domain("kernel_radial_derivative: time must be positive"));
    }
    if r < 0.0 {
        return Err(Error::domain(
            "kernel_radial_derivative: distance must be nonnegative",
        ));
    }
    let up = KernelSpec {
        n: spec.n + 2,
        kappa: spec.kappa,
    };
    if spec.kappa == 0.0 {
        Ok(-2.0 * PI * r * euclidean_kernel(up.n, t, r)?)
    } else {
        let k = spec.kappa;
        Ok(-2.0 * PI / k * ((spec.n as f64) * k * k * t).exp() * (k * r).sinh()
            * hyperbolic_kernel(up, t, r)?)
    }
}

/// Upper integration bound for an infinite radial mass, in curvature
/// units: past the peak the integrand decays at least like a Gaussian,
/// so this leaves a relative tail below ~1e-19.
fn radial_cutoff(n: u32, k_extra: u32, t: f64, hyperbolic: bool) -> f64 {
    if hyperbolic {
        2.0 * (n as f64 - 1.0) * t + (180.0 * t).sqrt() + 5.0
    } else {
        (2.0 * t * (n + k_extra) as f64).sqrt() + (180.0 * t).sqrt() + 1.0
    }
}

/// Integration radius: finite or the full half-line.
#[derive(Clone, Copy, Debug)]
pub enum Radius {
    Finite(f64),
    Infinite,
}

/// Weighted radial mass of the kernel:
///   kappa = 0:  int_0^R K_{n,0}(t,rho) rho^{n+k_extra-1} drho
///   kappa > 0:  int_0^R K_{n,kappa}(t,rho) (sinh(kappa rho)/kappa)^{n-1} drho
/// For kappa = 0, R = infinity this equals (4 pi t)^{k_extra/2}/|S^{n+k_extra-1}|.
pub fn radial_mass(n: u32, kappa: f64, k_extra: u32, t: f64, radius: Radius) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::domain("radial_mass: time must be positive"));
    }
    if let Radius::Finite(r) = radius {
        if r <= 0.0 {
            return Err(Error::domain("radial_mass: radius must be positive"));
        }
    }
    let tol = 1e-10;
    if kappa == 0.0 {
        let cutoff = radial_cutoff(n, k_extra, t, false);
        let upper = match radius {
            Radius::Finite(r) => r.min(cutoff),
            Radius::Infinite => cutoff,
        };
        let power = (n + k_extra) as i32 - 1;
        let mut f = |rho: f64| {
            (4.0 * PI * t).powf(-0.5 * n as f64) * (-rho * rho / (4.0 * t)).exp() * rho.powi(power)
        };
        let (v, e) = adaptive_1d(&mut f, 0.0, upper, tol, 0.0)?;
        check_tol(v, e, tol)
    } else {
        if k_extra != 0 {
            return Err(Error::domain(
                "radial_mass: k_extra must be 0 for hyperbolic weights",
            ));
        }
        // work in curvature units; the mass is invariant under the scaling
        let ts = kappa * kappa * t;
        let cutoff = radial_cutoff(n, 0, ts, true);
        let upper = match radius {
            Radius::Finite(r) => (kappa * r).min(cutoff),
            Radius::Infinite => cutoff,
        };
        let mut failure: Option<Error> = None;
        let mut f = |x: f64| match unit_kernel(n, ts, x) {
            Ok(v) => v * x.sinh().powi(n as i32 - 1),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        };
        let (v, e) = adaptive_1d(&mut f, 0.0, upper, tol, 0.0)?;
        if let Some(err) = failure {
            return Err(err);
        }
        check_tol(v, e, tol)
    }
}

fn check_tol(v: f64, e: f64, tol: f64) -> Result<f64> {
    if e > tol * 4.0 {
        Err(Error::computation("radial mass tolerance not reached", e))
    } else {
        Ok(v)
    }
}

/// Tail integral int_R^inf K_{n,1}(t,rho) sinh^{n-1}(rho) drho. Only the
/// regime 0 < t <= R/(2(n-1)) is admitted, where the Gaussian-type tail
/// bound is meaningful.
pub fn hyperbolic_tail_mass(n: u32, t: f64, radius: f64) -> Result<f64> {
    if radius <= 0.0 {
        return Err(Error::domain("hyperbolic_tail_mass: radius must be positive"));
    }
    if t <= 0.0 {
        return Err(Error::domain("hyperbolic_tail_mass: time must be positive"));
    }
    if n > 1 && t > radius / (2.0 * (n as f64 - 1.0)) {
        return Err(Error::domain(
            "hyperbolic_tail_mass: t must satisfy t <= R/(2(n-1))",
        ));
    }
    let upper = radius.max(radial_cutoff(n, 0, t, true));
    let mut failure: Option<Error> = None;
    let mut f = |x: f64| match unit_kernel(n, t, x) {
        Ok(v) => v * x.sinh().powi(n as i32 - 1),
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    };
    let (v, _e) = adaptive_1d(&mut f, radius, upper, 1e-12, 1e-10)?;
    if let Some(err) = failure {
        return Err(err);
    }
    Ok(v)
}

/// Fit K_{n,1}/K_{n,0} - 1 ~ a t + b rho^2 + (higher correction) over a
/// grid of small times and radii. The nuisance basis spans all quadratic
/// and cubic monomials in (t, rho^2) separately: with a lumped quadratic
/// term the linear coefficients pick up a bias of a few parts in 10^3,
/// and for n >= 5 the cubic remainder alone biases the coefficient
/// relation past 10^-3.
pub fn small_time_coefficients(n: u32) -> Result<SmallTimeCoefficients> {
    if n < 2 {
        return Err(Error::domain("small_time_coefficients: n must be >= 2"));
    }
    let times: Vec<f64> = (0..5).map(|k| 1e-2 * 0.5f64.powi(k)).collect();
    let rhos: Vec<f64> = (0..16).map(|i| 0.3 * (i + 1) as f64 / 16.0).collect();
    let mut rows = Vec::new();
    let mut ys = Vec::new();
    for &t in &times {
        for &rho in &rhos {
            let ratio = unit_kernel(n, t, rho)? / euclidean_kernel(n, t, rho)?;
            let x = rho * rho;
            rows.push([
                t,
                x,
                t * t,
                t * x,
                x * x,
                t * t * t,
                t * t * x,
                t * x * x,
                x * x * x,
            ]);
            ys.push(ratio - 1.0);
        }
    }
    let design = DMatrix::from_fn(rows.len(), 9, |i, j| rows[i][j]);
    let y = DVector::from_vec(ys);
    let (coef, residual) = least_squares(&design, &y)?;
    Ok(SmallTimeCoefficients {
        a_n: coef[0],
        b_n: coef[1],
        fit_residual: residual,
    })
}

/// |S^m|, the surface measure of the unit m-sphere, by the two-step
/// recursion |S^m| = 2 pi |S^{m-2}| / (m-1).
pub fn sphere_volume(m: u32) -> f64 {
    match m {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (m as f64 - 1.0) * sphere_volume(m - 2),
    }
}

/// |B_1^n|, the volume of the unit n-ball.
pub fn unit_ball_volume(n: u32) -> f64 {
    assert!(n >= 1);
    sphere_volume(n - 1) / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn euclidean_examples() {
        // normalization at the origin
        assert_relative_eq!(
            euclidean_kernel(2, 1.0 / (4.0 * PI), 0.0).unwrap(),
            1.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            euclidean_kernel(1, 1.0, 2.0).unwrap(),
            (4.0 * PI).powf(-0.5) * (-1.0f64).exp(),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            euclidean_kernel(3, 0.25, 1.0).unwrap(),
            PI.powf(-1.5) * (-1.0f64).exp(),
            max_relative = 1e-14
        );
        assert!(euclidean_kernel(3, 0.0, 1.0).is_err());
        assert!(euclidean_kernel(3, -0.2, 1.0).is_err());
    }

    #[test]
    fn hyperbolic_k3_examples() {
        let spec = KernelSpec::new(3, 1.0).unwrap();
        // r -> 0 limit of the closed form
        assert_relative_eq!(
            hyperbolic_kernel(spec, 1.0, 0.0).unwrap(),
            (4.0 * PI).powf(-1.5) * (-1.0f64).exp(),
            max_relative = 1e-13
        );
        let expected = (4.0 * PI).powf(-1.5) / 1.0f64.sinh() * (-1.25f64).exp();
        assert_relative_eq!(
            hyperbolic_kernel(spec, 1.0, 1.0).unwrap(),
            expected,
            max_relative = 1e-13
        );
        assert!((expected - 5.47e-3).abs() < 1e-4);
        assert!(hyperbolic_kernel(spec, -1.0, 1.0).is_err());
        assert!(hyperbolic_kernel(KernelSpec { n: 3, kappa: 0.0 }, 1.0, 1.0).is_err());
    }

    #[test]
    fn kappa_scaling_law() {
        // K_{3,2}(t,r) = 8 K_{3,1}(4t, 2r), to near machine precision on
        // the closed-form path
        let s2 = KernelSpec::new(3, 2.0).unwrap();
        let s1 = KernelSpec::new(3, 1.0).unwrap();
        for &(t, r) in &[(0.3, 0.2), (1.0, 1.5), (0.05, 0.9)] {
            let lhs = hyperbolic_kernel(s2, t, r).unwrap();
            let rhs = 8.0 * hyperbolic_kernel(s1, 4.0 * t, 2.0 * r).unwrap();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
        }
    }

    #[test]
    fn kappa_one_dim_reduces_to_flat() {
        // the 1-dimensional hyperbolic kernel is the flat Gaussian:
        // kappa (4 pi kappa^2 t)^{-1/2} e^{-(kappa r)^2/(4 kappa^2 t)}
        // cancels exactly
        let spec = KernelSpec::new(1, 1.0).unwrap();
        for &(t, r) in &[(0.4, 0.3), (2.0, 1.9)] {
            assert_relative_eq!(
                hyperbolic_kernel(spec, t, r).unwrap(),
                euclidean_kernel(1, t, r).unwrap(),
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn kernel_dispatch() {
        assert_relative_eq!(
            kernel(KernelSpec { n: 2, kappa: 0.0 }, 1.0 / (4.0 * PI), 0.0).unwrap(),
            1.0,
            max_relative = 1e-14
        );
        let spec = KernelSpec::new(3, 1.0).unwrap();
        assert_relative_eq!(
            kernel(spec, 1.0, 1.0).unwrap(),
            hyperbolic_kernel(spec, 1.0, 1.0).unwrap(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn kappa_to_zero_recovers_euclidean() {
        let t = 0.7;
        let r = 1.3;
        let flat = euclidean_kernel(3, t, r).unwrap();
        let mut prev_gap = f64::INFINITY;
        for &kappa in &[0.1, 0.01, 0.001] {
            let spec = KernelSpec::new(3, kappa).unwrap();
            let gap = (hyperbolic_kernel(spec, t, r).unwrap() - flat).abs();
            assert!(gap < prev_gap);
            prev_gap = gap;
        }
        assert!(prev_gap < 1e-5);
    }

    #[test]
    fn radial_derivative_identities() {
        // flat identity at (n=1, t=1, r=1)
        let d = kernel_radial_derivative(KernelSpec { n: 1, kappa: 0.0 }, 1.0, 1.0).unwrap();
        assert_relative_eq!(
            d,
            -2.0 * PI * euclidean_kernel(3, 1.0, 1.0).unwrap(),
            max_relative = 1e-14
        );
        // r -> 0+: smooth even function, derivative vanishes
        let d0 = kernel_radial_derivative(KernelSpec { n: 1, kappa: 0.0 }, 1.0, 1e-14).unwrap();
        assert!(d0.abs() < 1e-13);
        // hyperbolic case against a central finite difference
        let spec = KernelSpec::new(3, 1.0).unwrap();
        let (t, r) = (0.5, 0.7);
        let h = 1e-5;
        let fd = (hyperbolic_kernel(spec, t, r + h).unwrap()
            - hyperbolic_kernel(spec, t, r - h).unwrap())
            / (2.0 * h);
        assert_relative_eq!(
            kernel_radial_derivative(spec, t, r).unwrap(),
            fd,
            max_relative = 1e-6
        );
    }

    #[test]
    fn radial_masses() {
        // flat mass with k_extra = 0 is 1/|S^{n-1}| by normalization
        let m = radial_mass(3, 0.0, 0, 0.1, Radius::Infinite).unwrap();
        assert_relative_eq!(m, 1.0 / (4.0 * PI), max_relative = 1e-9);
        // hyperbolic normalization: |S^2| times the mass is 1
        let mh = radial_mass(3, 1.0, 0, 0.5, Radius::Infinite).unwrap();
        assert_relative_eq!(4.0 * PI * mh, 1.0, max_relative = 1e-8);
        // k_extra = 2: (4 pi t)/|S^3| = 2/pi at t = 1
        let mk = radial_mass(2, 0.0, 2, 1.0, Radius::Infinite).unwrap();
        assert_relative_eq!(mk, 2.0 / PI, max_relative = 1e-9);
        assert!(radial_mass(3, 1.0, 2, 0.5, Radius::Infinite).is_err());
        assert!(radial_mass(3, 0.0, 0, -0.5, Radius::Infinite).is_err());
    }

    #[test]
    fn tail_mass_behaviour() {
        let full = radial_mass(3, 1.0, 0, 0.05, Radius::Infinite).unwrap();
        let tail = hyperbolic_tail_mass(3, 0.05, 1.0).unwrap();
        assert!(tail < full);
        assert!(tail >= 0.0);
        // monotone in R
        let tail2 = hyperbolic_tail_mass(3, 0.01, 2.0).unwrap();
        let tail1 = hyperbolic_tail_mass(3, 0.01, 1.0).unwrap();
        assert!(tail2 <= tail1);
        // precondition enforced
        assert!(hyperbolic_tail_mass(3, 0.5, 1.0).is_err());
    }

    #[test]
    fn small_time_coefficients_match_expansions() {
        // n = 3: (a, b) = (-1, -1/6) from the closed form
        let c3 = small_time_coefficients(3).unwrap();
        assert!((c3.a_n + 1.0).abs() < 1e-3, "a_3 = {}", c3.a_n);
        assert!((c3.b_n + 1.0 / 6.0).abs() < 1e-3, "b_3 = {}", c3.b_n);
        // n = 5: (a, b) = (-10/3, -1/3)
        let c5 = small_time_coefficients(5).unwrap();
        assert!((c5.a_n + 10.0 / 3.0).abs() < 2e-3, "a_5 = {}", c5.a_n);
        assert!((c5.b_n + 1.0 / 3.0).abs() < 1e-3, "b_5 = {}", c5.b_n);
        assert!(small_time_coefficients(1).is_err());
    }

    #[test]
    fn coefficient_relation_holds() {
        for &n in &[2u32, 3, 5] {
            let c = small_time_coefficients(n).unwrap();
            let lhs = c.a_n + 2.0 * n as f64 * c.b_n;
            let rhs = -(n as f64) * (n as f64 - 1.0) / 3.0;
            assert!(
                ((lhs - rhs) / rhs.abs().max(1.0)).abs() < 1e-3,
                "n = {n}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn sphere_volumes() {
        assert_relative_eq!(sphere_volume(1), 2.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_volume(2), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_volume(3), 2.0 * PI * PI, max_relative = 1e-15);
        assert_relative_eq!(unit_ball_volume(2), PI, max_relative = 1e-15);
        assert_relative_eq!(unit_ball_volume(3), 4.0 * PI / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn normalization_across_family() {
        // |S^{n-1}| int_0^inf K_{n,kappa}(t,rho) (sinh(kappa rho)/kappa)^{n-1} drho = 1
        for &n in &[3u32, 5] {
            for &kappa in &[0.5, 1.0, 2.0] {
                for &t in &[0.05, 0.5, 2.0] {
                    let m = radial_mass(n, kappa, 0, t, Radius::Infinite).unwrap();
                    let total = sphere_volume(n - 1) * m;
                    assert!(
                        (total - 1.0).abs() < 1e-6,
                        "n={n} kappa={kappa} t={t}: {total}"
                    );
                }
            }
        }
    }
}
