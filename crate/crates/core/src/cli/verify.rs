//! Named verification suites behind `verify <suite>`: each check states a
//! claim, the computed value, and the tolerance, and reports a verdict.

use nalgebra::DVector;

use crate::asymptotics::{
    euler_characteristic, fit_short_time_slope, genus_bound_check, karp_pinsky_fit,
    karp_pinsky_radii, rigidity_defect, short_time_grid,
};
use crate::error::{Error, Result};
use crate::functional::{density_time_profile, entropy, SearchConfig};
use crate::kernels::{
    hyperbolic_tail_mass, kernel, kernel_radial_derivative, radial_mass, small_time_coefficients,
    sphere_volume, KernelSpec, Radius,
};
use crate::submanifold::catalog::shape_catalog;

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub claim: String,
    pub computed: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn check_near(name: impl Into<String>, claim: f64, computed: f64, tolerance: f64) -> Check {
    Check {
        name: name.into(),
        claim: format!("{claim}"),
        computed,
        tolerance,
        pass: (computed - claim).abs() <= tolerance,
    }
}

fn check_below(name: impl Into<String>, claim: &str, computed: f64, bound: f64) -> Check {
    Check {
        name: name.into(),
        claim: claim.to_string(),
        computed,
        tolerance: bound,
        pass: computed <= bound,
    }
}

/// Relative residual of d/dt K = K'' + (n-1) coth(r) K' at one point;
/// the time and second radial derivatives are central differences over
/// the analytic kernel and its analytic radial derivative.
fn heat_equation_residual(spec: KernelSpec, t: f64, r: f64) -> Result<f64> {
    let ht = 1e-4 * t;
    let dt = (kernel(spec, t + ht, r)? - kernel(spec, t - ht, r)?) / (2.0 * ht);
    let hr = 1e-5 * r.max(1.0);
    let d2r = (kernel_radial_derivative(spec, t, r + hr)?
        - kernel_radial_derivative(spec, t, r - hr)?)
        / (2.0 * hr);
    let k = spec.kappa;
    let lap = d2r
        + (spec.n as f64 - 1.0) * k * (k * r).cosh() / (k * r).sinh()
            * kernel_radial_derivative(spec, t, r)?;
    Ok((dt - lap).abs() / (dt.abs() + lap.abs()))
}

pub fn kernels_suite() -> Result<Vec<Check>> {
    let mut checks = Vec::new();

    let spec5 = KernelSpec::new(5, 1.0)?;
    for &t in &[0.05, 0.5, 2.0] {
        let residual = [0.3, 1.0, 2.0]
            .iter()
            .map(|&r| heat_equation_residual(spec5, t, r))
            .try_fold(0.0f64, |acc, v| v.map(|v| acc.max(v)))?;
        checks.push(check_below(
            format!("K(5,1) heat equation, t={t}"),
            "residual <= 1e-4",
            residual,
            1e-4,
        ));
        let mass = sphere_volume(4) * radial_mass(5, 1.0, 0, t, Radius::Infinite)?;
        checks.push(check_near(format!("K(5,1) normalization, t={t}"), 1.0, mass, 1e-6));
    }

    for &t in &[0.05, 0.5, 2.0] {
        let mass = sphere_volume(1) * radial_mass(2, 1.0, 0, t, Radius::Infinite)?;
        checks.push(check_near(format!("K(2,1) normalization, t={t}"), 1.0, mass, 1e-5));
    }

    let c3 = small_time_coefficients(3)?;
    checks.push(check_near("small-time a_3", -1.0, c3.a_n, 1e-3));
    checks.push(check_near("small-time b_3", -1.0 / 6.0, c3.b_n, 1e-3));
    for &n in &[2u32, 5] {
        let c = small_time_coefficients(n)?;
        let nf = n as f64;
        let residual = c.a_n + 2.0 * nf * c.b_n + nf * (nf - 1.0) / 3.0;
        checks.push(check_near(
            format!("coefficient relation a_n + 2n b_n = -n(n-1)/3, n={n}"),
            0.0,
            residual,
            1e-3,
        ));
    }

    let weighted = |t: f64| -> Result<f64> {
        Ok(hyperbolic_tail_mass(3, t, 1.0)? * (1.0 / (16.0 * t)).exp())
    };
    let reference = weighted(0.05)?;
    for &t in &[0.05, 0.02, 0.01] {
        checks.push(check_below(
            format!("tail decay, n=3 R=1 t={t}"),
            "tail exp(R^2/16t) <= 10x its t=0.05 value",
            weighted(t)?,
            10.0 * reference,
        ));
    }

    Ok(checks)
}

fn fitted_slope(name: &str, params: &[f64], u: &[f64]) -> Result<f64> {
    let sigma = shape_catalog(name, params)?;
    let kappa = sigma.ambient.kappa();
    let defect = rigidity_defect(&sigma, u, kappa)?;
    let x0 = sigma.position(u);
    let profile = density_time_profile(&sigma, kappa, &x0, &short_time_grid(defect), 1e-9)?;
    Ok(fit_short_time_slope(&profile)?.coefficients[0].1)
}

fn fitted_quadratic(name: &str, params: &[f64], x0: Vec<f64>) -> Result<f64> {
    let sigma = shape_catalog(name, params)?;
    let x0 = DVector::from_vec(x0);
    let radii = karp_pinsky_radii(&sigma, &x0)?;
    let fit = karp_pinsky_fit(&sigma, &x0, &radii, 0.03)?;
    Ok(fit.coefficients[0].1)
}

pub fn expansions_suite() -> Result<Vec<Check>> {
    let mut checks = Vec::new();

    checks.push(check_near(
        "short-time slope, unit cylinder",
        0.25,
        fitted_slope("cylinder", &[1.0, 8.0], &[0.7, 0.3])?,
        0.25 * 0.02,
    ));
    checks.push(check_near(
        "short-time slope, unit sphere",
        0.0,
        fitted_slope("sphere", &[1.0], &[1.2, 0.4])?,
        0.01,
    ));
    checks.push(check_near(
        "short-time slope, totally geodesic H2 in H3",
        0.0,
        fitted_slope("h2-in-h3", &[1.0, 3.0], &[0.3, -0.2])?,
        0.01,
    ));

    checks.push(check_near(
        "ball-volume quadratic coefficient, unit cylinder",
        1.0 / 32.0,
        fitted_quadratic("cylinder", &[1.0, 6.0], vec![1.0, 0.0, 0.0])?,
        0.02 / 32.0,
    ));
    checks.push(check_near(
        "ball-volume quadratic coefficient, unit sphere",
        0.0,
        fitted_quadratic("sphere", &[1.0], vec![0.0, 0.0, 1.0])?,
        1e-3,
    ));
    {
        let plane = shape_catalog("plane", &[1.0, 20.0])?;
        let x0 = DVector::from_vec(vec![0.0, 0.0, 0.0]);
        let radii: Vec<f64> = (0..7).map(|k| 0.5 * 0.5f64.powf(k as f64 / 2.0)).collect();
        let fit = karp_pinsky_fit(&plane, &x0, &radii, 0.03)?;
        checks.push(check_near(
            "ball-volume quadratic coefficient, plane",
            0.0,
            fit.coefficients[0].1,
            1e-3,
        ));
    }

    // pointwise rigidity identity on every catalog surface; the umbilic
    // and totally geodesic members must have defect 0
    let umbilic = ["plane", "sphere", "h2-in-h3", "geodesic-sphere-h3"];
    let surfaces: [(&str, &[f64]); 7] = [
        ("plane", &[]),
        ("sphere", &[]),
        ("cylinder", &[]),
        ("torus", &[2.0, 0.5]),
        ("graph", &[1.0, 2.0, 0.0, 0.3, 1.0, 1.0, 0.4]),
        ("h2-in-h3", &[]),
        ("geodesic-sphere-h3", &[]),
    ];
    for (name, params) in surfaces {
        let sigma = shape_catalog(name, params)?;
        let kappa = sigma.ambient.kappa();
        let mut identity = 0.0f64;
        let mut max_defect = 0.0f64;
        for u in sigma.grid(3) {
            let defect = rigidity_defect(&sigma, &u, kappa)?;
            let c = sigma.curvature_at(&u)?;
            identity = identity.max((defect - 1.5 * c.traceless2).abs());
            max_defect = max_defect.max(defect.abs());
        }
        checks.push(check_near(
            format!("rigidity identity defect = (3/2)|A - (H/2)g|^2, {name}"),
            0.0,
            identity,
            1e-8,
        ));
        if umbilic.contains(&name) {
            checks.push(check_near(
                format!("umbilic defect vanishes, {name}"),
                0.0,
                max_defect,
                1e-8,
            ));
        }
    }

    let sphere = shape_catalog("sphere", &[1.0])?;
    checks.push(check_near(
        "Euler characteristic, sphere",
        2.0,
        euler_characteristic(&sphere)?,
        0.02,
    ));
    let torus = shape_catalog("torus", &[2.0, 0.5])?;
    checks.push(check_near(
        "Euler characteristic, torus",
        0.0,
        euler_characteristic(&torus)?,
        0.02,
    ));
    for sigma in [&sphere, &torus] {
        let lambda = entropy(sigma, 0.0, &SearchConfig::default())?.lambda;
        let report = genus_bound_check(sigma, lambda)?;
        checks.push(Check {
            name: format!("genus bound consistency, {}", sigma.name),
            claim: "report is internally consistent".to_string(),
            computed: report.lhs - report.rhs,
            tolerance: 0.0,
            pass: report.consistent && (report.bound_holds == (report.lhs >= report.rhs - 1e-6)),
        });
    }

    Ok(checks)
}

pub fn entropy_suite() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let search = SearchConfig::default();
    let cases: [(&str, &[f64], f64, f64); 4] = [
        ("plane", &[], 1.0, 1e-6),
        ("sphere", &[1.0], 4.0 / std::f64::consts::E, 1e-3),
        ("cylinder", &[1.0, 8.0], (2.0 * std::f64::consts::PI / std::f64::consts::E).sqrt(), 5e-3),
        ("h2-in-h3", &[1.0, 3.0], 1.0, 1e-4),
    ];
    for (name, params, expected, tol) in cases {
        let sigma = shape_catalog(name, params)?;
        let result = entropy(&sigma, sigma.ambient.kappa(), &search)?;
        checks.push(check_near(format!("entropy, {name}"), expected, result.lambda, tol));
        checks.push(Check {
            name: format!("entropy lower bound, {name}"),
            claim: "lambda >= 1 - 1e-6".to_string(),
            computed: result.lambda,
            tolerance: 1e-6,
            pass: result.lambda >= 1.0 - 1e-6,
        });
    }
    Ok(checks)
}

pub fn suite(name: &str) -> Result<Vec<Check>> {
    match name {
        "kernels" => kernels_suite(),
        "expansions" => expansions_suite(),
        "entropy" => entropy_suite(),
        "all" => {
            let mut checks = kernels_suite()?;
            checks.extend(expansions_suite()?);
            checks.extend(entropy_suite()?);
            Ok(checks)
        }
        other => Err(Error::domain(format!(
            "unknown suite '{other}'; expected kernels, expansions, entropy, or all"
        ))),
    }
}

/// Renders the claim/computed/tolerance/verdict table.
pub fn render(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for c in checks {
        out.push_str(&format!(
            "{:<width$}  claim: {:<40}  computed: {:>24.16e}  tolerance: {:>9.3e}  {}\n",
            c.name,
            c.claim,
            c.computed,
            c.tolerance,
            if c.pass { "pass" } else { "FAIL" },
        ));
    }
    let passed = checks.iter().filter(|c| c.pass).count();
    out.push_str(&format!("{passed}/{} checks passed\n", checks.len()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_suite_passes() {
        let checks = kernels_suite().unwrap();
        assert!(checks.iter().all(|c| c.pass), "{}", render(&checks));
    }

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(suite("juggling").is_err());
    }

    #[test]
    fn render_marks_failures() {
        let checks = vec![check_near("x", 1.0, 2.0, 0.5)];
        assert!(render(&checks).contains("FAIL"));
        assert!(render(&checks).contains("0/1 checks passed"));
    }
}
