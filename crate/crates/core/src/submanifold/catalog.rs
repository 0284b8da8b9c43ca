//! Built-in analytic immersions: flat and curved model surfaces in R^3,
//! graphs of polynomials, and totally geodesic or distance-sphere
//! hypersurfaces of hyperbolic space.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DVector;

use crate::ambient::AmbientSpace;
use crate::error::{Error, Result};

use super::{ImmersedSubmanifold, Jet, ParamBox};

pub struct CatalogEntry {
    pub name: &'static str,
    pub signature: &'static str,
    pub description: &'static str,
}

pub fn catalog() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: "plane",
            signature: "[codim = 1, window = 20]",
            description: "flat R^2 in R^{2+codim}, windowed to [-window, window]^2",
        },
        CatalogEntry {
            name: "sphere",
            signature: "[radius = 1]",
            description: "round sphere in R^3, polar angles (theta, phi)",
        },
        CatalogEntry {
            name: "cylinder",
            signature: "[radius = 1, window = 20]",
            description: "circular cylinder in R^3, z windowed to [-window, window]",
        },
        CatalogEntry {
            name: "torus",
            signature: "[ring_radius, tube_radius]",
            description: "torus of revolution in R^3 (requires tube < ring)",
        },
        CatalogEntry {
            name: "graph",
            signature: "[window, (deg_u, deg_v, coeff)...]",
            description: "graph z = p(u, v) of a polynomial over [-window, window]^2",
        },
        CatalogEntry {
            name: "h2-in-h3",
            signature: "[kappa = 1, window = 3]",
            description: "totally geodesic H^2 in H^3, exponential-map coordinates",
        },
        CatalogEntry {
            name: "geodesic-sphere-h3",
            signature: "[radius = 1, kappa = 1]",
            description: "distance sphere of intrinsic radius rho_0 in H^3",
        },
        CatalogEntry {
            name: "hn-in-hn1",
            signature: "[n, kappa = 1, window = 3]",
            description: "totally geodesic H^n in H^{n+1}, exponential-map coordinates",
        },
    ]
}

pub fn shape_catalog(name: &str, params: &[f64]) -> Result<ImmersedSubmanifold> {
    match name {
        "plane" => plane(params),
        "sphere" => sphere(params),
        "cylinder" => cylinder(params),
        "torus" => torus(params),
        "graph" => graph(params),
        "h2-in-h3" => hn_in_hn1_named("h2-in-h3", 2, params),
        "geodesic-sphere-h3" => geodesic_sphere_h3(params),
        "hn-in-hn1" => {
            if params.is_empty() {
                return Err(Error::domain("hn-in-hn1 needs a dimension parameter"));
            }
            let n = positive_int(params[0], "dimension")?;
            hn_in_hn1_named("hn-in-hn1", n, &params[1..])
        }
        other => Err(Error::UnknownShape(other.to_string())),
    }
}

fn opt(params: &[f64], idx: usize, default: f64) -> f64 {
    params.get(idx).copied().unwrap_or(default)
}

fn positive(v: f64, what: &str) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::domain(format!("{what} must be positive, got {v}")))
    }
}

fn positive_int(v: f64, what: &str) -> Result<usize> {
    if v.fract() == 0.0 && v >= 1.0 && v <= 16.0 {
        Ok(v as usize)
    } else {
        Err(Error::domain(format!("{what} must be a small positive integer, got {v}")))
    }
}

fn plane(params: &[f64]) -> Result<ImmersedSubmanifold> {
    let codim = if params.is_empty() {
        1
    } else {
        positive_int(params[0], "codimension")?
    };
    let window = positive(opt(params, 1, 20.0), "window")?;
    let dim = 2 + codim;
    let domain = ParamBox::new(vec![-window; 2], vec![window; 2], vec![false; 2])?;
    let jet = Arc::new(move |u: &[f64]| {
        let mut pos = DVector::zeros(dim);
        pos[0] = u[0];
        pos[1] = u[1];
        let mut e0 = DVector::zeros(dim);
        e0[0] = 1.0;
        let mut e1 = DVector::zeros(dim);
        e1[1] = 1.0;
        Jet {
            pos,
            first: vec![e0, e1],
            second: vec![vec![DVector::zeros(dim)], vec![DVector::zeros(dim); 2]],
        }
    });
    let pj = Arc::clone(&jet);
    Ok(ImmersedSubmanifold::new(
        "plane",
        domain,
        AmbientSpace::euclidean(dim),
        false,
        Arc::new(move |u: &[f64]| pj(u).pos),
        Some(jet),
    ))
}

fn sphere(params: &[f64]) -> Result<ImmersedSubmanifold> {
    let rho = positive(opt(params, 0, 1.0), "sphere radius")?;
    let domain = ParamBox::new(vec![0.0, 0.0], vec![PI, 2.0 * PI], vec![false, true])?;
    let jet = Arc::new(move |u: &[f64]| {
        let (st, ct) = u[0].sin_cos();
        let (sp, cp) = u[1].sin_cos();
        let pos = DVector::from_vec(vec![rho * st * cp, rho * st * sp, rho * ct]);
        let dt = DVector::from_vec(vec![rho * ct * cp, rho * ct * sp, -rho * st]);
        let dp = DVector::from_vec(vec![-rho * st * sp, rho * st * cp, 0.0]);
        let dtt = -&pos;
        let dtp = DVector::from_vec(vec![-rho * ct * sp, rho * ct * cp, 0.0]);
        let dpp = DVector::from_vec(vec![-rho * st * cp, -rho * st * sp, 0.0]);
        Jet {
            pos,
            first: vec![dt, dp],
            second: vec![vec![dtt], vec![dtp, dpp]],
        }
    });
    let pj = Arc::clone(&jet);
    Ok(ImmersedSubmanifold::new(
        "sphere",
        domain,
        AmbientSpace::euclidean(3),
        true,
        Arc::new(move |u: &[f64]| pj(u).pos),
        Some(jet),
    ))
}

fn cylinder(params: &[f64]) -> Result<ImmersedSubmanifold> {
    let a = positive(opt(params, 0, 1.0), "cylinder radius")?;
    let window = positive(opt(params, 1, 20.0), "window")?;
    let domain = ParamBox::new(
        vec![0.0, -window],
        vec![2.0 * PI, window],
        vec![true, false],
    )?;
    let jet = Arc::new(move |u: &[f64]| {
        let (s, c) = u[0].sin_cos();
        Jet {
            pos: DVector::from_vec(vec![a * c, a * s, u[1]]),
            first: vec![
                DVector::from_vec(vec![-a * s, a * c, 0.0]),
                DVector::from_vec(vec![0.0, 0.0, 1.0]),
            ],
            second: vec![
                vec![DVector::from_vec(vec![-a * c, -a * s, 0.0])],
                vec![DVector::zeros(3), DVector::zeros(3)],
            ],
        }
    });
    let pj = Arc::clone(&jet);
    Ok(ImmersedSubmanifold::new(
        "cylinder",
        domain,
        AmbientSpace::euclidean(3),
        false,
        Arc::new(move |u: &[f64]| pj(u).pos),
        Some(jet),
    ))
}

fn torus(params: &[f64]) -> Result<ImmersedSubmanifold> {
    if params.len() < 2 {
        return Err(Error::domain("torus needs ring and tube radii"));
    }
    let r0 = positive(params[0], "ring radius")?;
    let a = positive(params[1], "tube radius")?;
    if a >= r0 {
        return Err(Error::domain(format!(
            "torus tube radius {a} must be smaller than ring radius {r0}"
        )));
    }
    let domain = ParamBox::new(vec![0.0, 0.0], vec![2.0 * PI, 2.0 * PI], vec![true, true])?;
    let jet = Arc::new(move |u: &[f64]| {
        // u = (theta around the tube, phi around the ring)
        let (st, ct) = u[0].sin_cos();
        let (sp, cp) = u[1].sin_cos();
        let w = r0 + a * ct;
        Jet {
            pos: DVector::from_vec(vec![w * cp, w * sp, a * st]),
            first: vec![
                DVector::from_vec(vec![-a * st * cp, -a * st * sp, a * ct]),
                DVector::from_vec(vec![-w * sp, w * cp, 0.0]),
            ],
            second: vec![
                vec![DVector::from_vec(vec![-a * ct * cp, -a * ct * sp, -a * st])],
                vec![
                    DVector::from_vec(vec![a * st * sp, -a * st * cp, 0.0]),
                    DVector::from_vec(vec![-w * cp, -w * sp, 0.0]),
                ],
            ],
        }
    });
    let pj = Arc::clone(&jet);
    Ok(ImmersedSubmanifold::new(
        "torus",
        domain,
        AmbientSpace::euclidean(3),
        true,
        Arc::new(move |u: &[f64]| pj(u).pos),
        Some(jet),
    ))
}

fn graph(params: &[f64]) -> Result<ImmersedSubmanifold> {
    if params.is_empty() || (params.len() - 1) % 3 != 0 {
        return Err(Error::domain(
            "graph needs a window followed by (deg_u, deg_v, coeff) triples",
        ));
    }
    let window = positive(params[0], "window")?;
    let mut terms: Vec<(u32, u32, f64)> = Vec::new();
    for t in params[1..].chunks(3) {
        let check = |v: f64| -> Result<u32> {
            if v.fract() == 0.0 && (0.0..=12.0).contains(&v) {
                Ok(v as u32)
            } else {
                Err(Error::domain(format!("polynomial degree must be an integer in 0..=12, got {v}")))
            }
        };
        terms.push((check(t[0])?, check(t[1])?, t[2]));
    }
    let domain = ParamBox::new(vec![-window; 2], vec![window; 2], vec![false; 2])?;
    // p and its partials up to second order
    let eval = move |u: f64, v: f64| -> [f64; 6] {
        let mut out = [0.0; 6]; // p, p_u, p_v, p_uu, p_uv, p_vv
        for &(i, j, c) in &terms {
            let (i, j) = (i as i32, j as i32);
            let m = |base: f64, p: i32| if p < 0 { 0.0 } else { base.powi(p) };
            out[0] += c * m(u, i) * m(v, j);
            out[1] += c * i as f64 * m(u, i - 1) * m(v, j);
            out[2] += c * j as f64 * m(u, i) * m(v, j - 1);
            out[3] += c * (i * (i - 1)) as f64 * m(u, i - 2) * m(v, j);
            out[4] += c * (i * j) as f64 * m(u, i - 1) * m(v, j - 1);
            out[5] += c * (j * (j - 1)) as f64 * m(u, i) * m(v, j - 2);
        }
        out
    };
    let jet = Arc::new(move |u: &[f64]| {
        let [p, pu, pv, puu, puv, pvv] = eval(u[0], u[1]);
        Jet {
            pos: DVector::from_vec(vec![u[0], u[1], p]),
            first: vec![
                DVector::from_vec(vec![1.0, 0.0, pu]),
                DVector::from_vec(vec![0.0, 1.0, pv]),
            ],
            second: vec![
                vec![DVector::from_vec(vec![0.0, 0.0, puu])],
                vec![
                    DVector::from_vec(vec![0.0, 0.0, puv]),
                    DVector::from_vec(vec![0.0, 0.0, pvv]),
                ],
            ],
        }
    });
    let pj = Arc::clone(&jet);
    Ok(ImmersedSubmanifold::new(
        "graph",
        domain,
        AmbientSpace::euclidean(3),
        false,
        Arc::new(move |u: &[f64]| pj(u).pos),
        Some(jet),
    ))
}

fn geodesic_sphere_h3(params: &[f64]) -> Result<ImmersedSubmanifold> {
    let rho = positive(opt(params, 0, 1.0), "sphere radius")?;
    let kappa = positive(opt(params, 1, 1.0), "kappa")?;
    let rs = (kappa * rho).sinh() / kappa;
    let tc = (kappa * rho).cosh() / kappa;
    let domain = ParamBox::new(vec![0.0, 0.0], vec![PI, 2.0 * PI], vec![false, true])?;
    let jet = Arc::new(move |u: &[f64]| {
        let (st, ct) = u[0].sin_cos();
        let (sp, cp) = u[1].sin_cos();
        let pos = DVector::from_vec(vec![rs * st * cp, rs * st * sp, rs * ct, tc]);
        let dt = DVector::from_vec(vec![rs * ct * cp, rs * ct * sp, -rs * st, 0.0]);
        let dp = DVector::from_vec(vec![-rs * st * sp, rs * st * cp, 0.0, 0.0]);
        let dtt = DVector::from_vec(vec![-rs * st * cp, -rs * st * sp, -rs * ct, 0.0]);
        let dtp = DVector::from_vec(vec![-rs * ct * sp, rs * ct * cp, 0.0, 0.0]);
        let dpp = DVector::from_vec(vec![-rs * st * cp, -rs * st * sp, 0.0, 0.0]);
        Jet {
            pos,
            first: vec![dt, dp],
            second: vec![vec![dtt], vec![dtp, dpp]],
        }
    });
    let pj = Arc::clone(&jet);
    Ok(ImmersedSubmanifold::new(
        "geodesic-sphere-h3",
        domain,
        AmbientSpace::hyperbolic(3, kappa)?,
        true,
        Arc::new(move |u: &[f64]| pj(u).pos),
        Some(jet),
    ))
}

/// sinh(κ√s)/(κ√s) and cosh(κ√s)/κ with first and second s-derivatives,
/// by their everywhere-convergent power series in s (all terms positive, so
/// no cancellation).
fn radial_profiles(kappa: f64, s: f64) -> ([f64; 3], [f64; 3]) {
    let k2 = kappa * kappa;
    let sum = |mut coeff: f64, ratio: &dyn Fn(f64) -> f64| -> [f64; 3] {
        let mut out = [0.0; 3];
        let mut pow = [1.0, 0.0, 0.0]; // s^k, s^{k-1}, s^{k-2}
        for k in 0..200 {
            let kf = k as f64;
            let term = coeff * pow[0];
            out[0] += term;
            out[1] += kf * coeff * pow[1];
            out[2] += kf * (kf - 1.0) * coeff * pow[2];
            if k > 3 && term < 1e-17 * out[0] {
                break;
            }
            pow[2] = pow[1];
            pow[1] = pow[0];
            pow[0] *= s;
            coeff *= ratio(kf);
        }
        out
    };
    let f = sum(1.0, &|k| k2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0)));
    let g = sum(1.0 / kappa, &|k| k2 / ((2.0 * k + 1.0) * (2.0 * k + 2.0)));
    (f, g)
}

/// Totally geodesic H^n in H^{n+1} in exponential-map coordinates about its
/// vertex: u ↦ (f(|u|²)·u, 0, g(|u|²)) with f = sinh(κ|u|)/(κ|u|) and
/// g = cosh(κ|u|)/κ. Nondegenerate everywhere (metric ⪰ identity).
fn hn_in_hn1_named(name: &'static str, n: usize, params: &[f64]) -> Result<ImmersedSubmanifold> {
    let kappa = positive(opt(params, 0, 1.0), "kappa")?;
    let window = positive(opt(params, 1, 3.0), "window")?;
    let dim = n + 2; // ambient coordinates in R^{n+1,1}
    let domain = ParamBox::new(vec![-window; n], vec![window; n], vec![false; n])?;
    let jet = Arc::new(move |u: &[f64]| {
        let s: f64 = u.iter().map(|v| v * v).sum();
        let ([f, f1, f2], [g, g1, g2]) = radial_profiles(kappa, s);
        let mut pos = DVector::zeros(dim);
        for i in 0..n {
            pos[i] = f * u[i];
        }
        pos[dim - 1] = g;
        let mut first = Vec::with_capacity(n);
        for j in 0..n {
            let mut d = DVector::zeros(dim);
            for i in 0..n {
                d[i] = 2.0 * f1 * u[j] * u[i] + if i == j { f } else { 0.0 };
            }
            d[dim - 1] = 2.0 * g1 * u[j];
            first.push(d);
        }
        let mut second = Vec::with_capacity(n);
        for j in 0..n {
            let mut row = Vec::with_capacity(j + 1);
            for k in 0..=j {
                let mut d = DVector::zeros(dim);
                let djk = if j == k { 1.0 } else { 0.0 };
                for i in 0..n {
                    let dij = if i == j { 1.0 } else { 0.0 };
                    let dik = if i == k { 1.0 } else { 0.0 };
                    d[i] = 4.0 * f2 * u[i] * u[j] * u[k]
                        + 2.0 * f1 * (djk * u[i] + dik * u[j] + dij * u[k]);
                }
                d[dim - 1] = 2.0 * djk * g1 + 4.0 * u[j] * u[k] * g2;
                row.push(d);
            }
            second.push(row);
        }
        Jet { pos, first, second }
    });
    let pj = Arc::clone(&jet);
    Ok(ImmersedSubmanifold::new(
        name,
        domain,
        AmbientSpace::hyperbolic(n + 1, kappa)?,
        false,
        Arc::new(move |u: &[f64]| pj(u).pos),
        Some(jet),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unknown_shape_and_bad_params() {
        assert!(matches!(
            shape_catalog("klein-bottle", &[]),
            Err(Error::UnknownShape(_))
        ));
        assert!(shape_catalog("torus", &[1.0, 2.0]).is_err());
        assert!(shape_catalog("sphere", &[-1.0]).is_err());
        assert!(shape_catalog("graph", &[1.0, 0.5, 0.0, 1.0]).is_err());
    }

    #[test]
    fn hyperbolic_shapes_stay_on_the_hyperboloid() {
        for (name, params) in [
            ("h2-in-h3", &[1.0, 5.0][..]),
            ("geodesic-sphere-h3", &[1.3, 0.7][..]),
            ("hn-in-hn1", &[3.0, 2.0, 1.5][..]),
        ] {
            let s = shape_catalog(name, params).unwrap();
            for u in s.grid(4) {
                s.ambient.check_point(&s.position(&u)).unwrap();
            }
        }
    }

    #[test]
    fn exponential_map_radius_is_parameter_norm() {
        // the coordinates are geodesic polar: ambient distance from the
        // vertex equals |u|
        let s = shape_catalog("h2-in-h3", &[1.0, 5.0]).unwrap();
        let vertex = s.position(&[0.0, 0.0]);
        for u in [[1.0f64, 0.0], [0.3, -0.4], [3.0, 4.0]] {
            let r = (u[0] * u[0] + u[1] * u[1]).sqrt();
            let d = s.ambient.distance(&vertex, &s.position(&u)).unwrap();
            assert_relative_eq!(d, r, max_relative = 1e-10);
        }
    }

    #[test]
    fn radial_profile_series_match_closed_forms() {
        for kappa in [0.5, 1.0, 2.0] {
            for rho in [1e-8f64, 0.3, 2.0, 8.0] {
                let s = rho * rho;
                let ([f, _, _], [g, _, _]) = radial_profiles(kappa, s);
                assert_relative_eq!(f, (kappa * rho).sinh() / (kappa * rho), max_relative = 1e-13);
                assert_relative_eq!(g, (kappa * rho).cosh() / kappa, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn catalog_lists_all_shapes() {
        let names: Vec<_> = catalog().iter().map(|e| e.name).collect();
        for n in [
            "plane",
            "sphere",
            "cylinder",
            "torus",
            "graph",
            "h2-in-h3",
            "geodesic-sphere-h3",
            "hn-in-hn1",
        ] {
            assert!(names.contains(&n), "missing {n}");
            if n == "torus" {
                assert!(shape_catalog(n, &[2.0, 1.0]).is_ok());
            } else if n == "graph" {
                assert!(shape_catalog(n, &[1.0, 2.0, 0.0, 0.1]).is_ok());
            } else if n == "hn-in-hn1" {
                assert!(shape_catalog(n, &[2.0]).is_ok());
            } else {
                assert!(shape_catalog(n, &[]).is_ok());
            }
        }
    }
}
