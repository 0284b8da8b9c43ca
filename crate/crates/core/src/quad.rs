//! Adaptive quadrature built on Gauss-Legendre rules with bisection
//! refinement. One-dimensional integrals use a 16-point base rule;
//! box integrals over parameter domains use an 8-point tensor rule.

use crate::error::{Error, Result};
use once_cell::sync::Lazy;

/// Gauss-Legendre rule on [-1, 1].
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Nodes are the roots of the Legendre polynomial P_n, found by Newton
    /// iteration from the Chebyshev initial guess.
    pub fn new(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        nodes.reverse();
        weights.reverse();
        GaussRule { nodes, weights }
    }

    pub fn integrate(&self, f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut sum = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(c + h * x);
        }
        sum * h
    }
}

/// Value and derivative of the Legendre polynomial P_n at x.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

pub static GL8: Lazy<GaussRule> = Lazy::new(|| GaussRule::new(8));
pub static GL16: Lazy<GaussRule> = Lazy::new(|| GaussRule::new(16));

const MAX_DEPTH: usize = 48;

/// Adaptive 1-d integral of `f` over [a, b] with absolute tolerance
/// `abs_tol` and relative tolerance `rel_tol` (whichever is looser wins).
/// Returns the value together with an error estimate.
pub fn adaptive_1d(
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<(f64, f64)> {
    if !(b > a) {
        return Ok((0.0, 0.0));
    }
    let rough = GL16.integrate(f, a, b).abs();
    let tol = abs_tol.max(rel_tol * rough);
    let mut err = 0.0;
    let val = segment_1d(f, a, b, tol, 0, &mut err);
    if err > tol.max(abs_tol.max(rel_tol * val.abs())) * 4.0 {
        return Err(Error::computation("1-d quadrature tolerance not reached", err));
    }
    Ok((val, err))
}

fn segment_1d(
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    depth: usize,
    err: &mut f64,
) -> f64 {
    let whole = GL16.integrate(f, a, b);
    let m = 0.5 * (a + b);
    let left = GL16.integrate(f, a, m);
    let right = GL16.integrate(f, m, b);
    let delta = (left + right - whole).abs();
    if delta <= tol || depth >= MAX_DEPTH {
        *err += delta;
        left + right
    } else {
        segment_1d(f, a, m, 0.5 * tol, depth + 1, err)
            + segment_1d(f, m, b, 0.5 * tol, depth + 1, err)
    }
}

/// Axis-aligned box in parameter space.
#[derive(Clone, Debug)]
pub struct Cell {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Cell {
    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }

    pub fn widest_axis(&self) -> usize {
        let mut best = 0;
        let mut w = f64::MIN;
        for i in 0..self.dim() {
            let wi = self.hi[i] - self.lo[i];
            if wi > w {
                w = wi;
                best = i;
            }
        }
        best
    }

    pub fn split(&self, axis: usize) -> (Cell, Cell) {
        let m = 0.5 * (self.lo[axis] + self.hi[axis]);
        let mut a = self.clone();
        let mut b = self.clone();
        a.hi[axis] = m;
        b.lo[axis] = m;
        (a, b)
    }
}

/// Tensor-product Gauss-Legendre (order 8 per axis) over a cell.
pub fn tensor_gl8(f: &mut dyn FnMut(&[f64]) -> f64, cell: &Cell) -> f64 {
    let d = cell.dim();
    let rule = &*GL8;
    let n = rule.nodes.len();
    let mut idx = vec![0usize; d];
    let mut u = vec![0.0; d];
    let mut sum = 0.0;
    let jac = cell.volume() * (0.5f64).powi(d as i32);
    loop {
        let mut w = 1.0;
        for i in 0..d {
            let c = 0.5 * (cell.lo[i] + cell.hi[i]);
            let h = 0.5 * (cell.hi[i] - cell.lo[i]);
            u[i] = c + h * rule.nodes[idx[i]];
            w *= rule.weights[idx[i]];
        }
        sum += w * f(&u);
        // advance multi-index
        let mut i = 0;
        loop {
            if i == d {
                return sum * jac;
            }
            idx[i] += 1;
            if idx[i] < n {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// Adaptive box integral: bisection along the widest axis wherever the
/// coarse/refined discrepancy exceeds the locally allotted tolerance.
pub fn adaptive_box(
    f: &mut dyn FnMut(&[f64]) -> f64,
    lo: &[f64],
    hi: &[f64],
    abs_tol: f64,
) -> Result<(f64, f64)> {
    let root = Cell {
        lo: lo.to_vec(),
        hi: hi.to_vec(),
    };
    let mut err = 0.0;
    let val = segment_box(f, &root, abs_tol, 0, &mut err);
    if err > 4.0 * abs_tol {
        return Err(Error::computation("box quadrature tolerance not reached", err));
    }
    Ok((val, err))
}

/// Adaptive integral over an arbitrary cell (used by the ball-area
/// subdivision for cells known to lie inside the ball).
pub fn adaptive_cell(
    f: &mut dyn FnMut(&[f64]) -> f64,
    cell: &Cell,
    tol: f64,
) -> (f64, f64) {
    let mut err = 0.0;
    let val = segment_box(f, cell, tol, 0, &mut err);
    (val, err)
}

fn segment_box(
    f: &mut dyn FnMut(&[f64]) -> f64,
    cell: &Cell,
    tol: f64,
    depth: usize,
    err: &mut f64,
) -> f64 {
    let whole = tensor_gl8(f, cell);
    let (a, b) = cell.split(cell.widest_axis());
    let left = tensor_gl8(f, &a);
    let right = tensor_gl8(f, &b);
    let delta = (left + right - whole).abs();
    if delta <= tol || depth >= MAX_DEPTH {
        *err += delta;
        left + right
    } else {
        segment_box(f, &a, 0.5 * tol, depth + 1, err)
            + segment_box(f, &b, 0.5 * tol, depth + 1, err)
    }
}
