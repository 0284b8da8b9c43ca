//! Parametric immersions Σⁿ → M: induced metric, second-fundamental-form
//! scalars via ambient projection, measure-weighted quadrature, and
//! geodesic-ball areas by recursive cell classification.

pub mod catalog;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::ambient::AmbientSpace;
use crate::error::{Error, Result};
use crate::quad::{adaptive_cell, tensor_gl8, Cell, GL16, GL8};

/// Minimum eigenvalue of the first fundamental form below which the map is
/// treated as failing to immerse.
const IMMERSION_TOL: f64 = 1e-10;
/// Default relative step for finite-difference jets.
pub const FD_STEP_SCALE: f64 = 1e-5;

#[derive(Clone, Debug)]
pub struct ParamBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub periodic: Vec<bool>,
}

impl ParamBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, periodic: Vec<bool>) -> Result<Self> {
        if lo.len() != hi.len() || lo.len() != periodic.len() {
            return Err(Error::domain("parameter box: mismatched axis counts"));
        }
        if lo.iter().zip(&hi).any(|(l, h)| !(h > l)) {
            return Err(Error::domain("parameter box: need lo < hi on every axis"));
        }
        Ok(ParamBox { lo, hi, periodic })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        u.len() == self.dim()
            && u.iter()
                .enumerate()
                .all(|(i, &v)| v >= self.lo[i] - 1e-12 && v <= self.hi[i] + 1e-12)
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn cell(&self) -> Cell {
        Cell {
            lo: self.lo.clone(),
            hi: self.hi.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DerivativeMode {
    Analytic,
    /// Central differences with step = step_scale · (axis extent).
    FiniteDifference { step_scale: f64 },
}

/// Position with first and second parameter derivatives, all in ambient
/// coordinates. `second[i][j]` is stored for j ≤ i.
pub struct Jet {
    pub pos: DVector<f64>,
    pub first: Vec<DVector<f64>>,
    pub second: Vec<Vec<DVector<f64>>>,
}

impl Jet {
    pub fn second_at(&self, i: usize, j: usize) -> &DVector<f64> {
        let (a, b) = if i >= j { (i, j) } else { (j, i) };
        &self.second[a][b]
    }
}

type PositionFn = dyn Fn(&[f64]) -> DVector<f64> + Send + Sync;
type JetFn = dyn Fn(&[f64]) -> Jet + Send + Sync;

#[derive(Clone)]
pub struct ImmersedSubmanifold {
    pub name: String,
    pub domain: ParamBox,
    pub ambient: AmbientSpace,
    /// Whether the image is a closed manifold (no window truncation).
    pub closed: bool,
    position: Arc<PositionFn>,
    analytic: Option<Arc<JetFn>>,
    pub derivative_mode: DerivativeMode,
}

/// Curvature scalars of Σ at one parameter point, in ambient units.
#[derive(Clone, Debug)]
pub struct CurvaturePointData {
    pub metric: DMatrix<f64>,
    pub norm_a2: f64,
    pub norm_h2: f64,
    pub traceless2: f64,
    pub scalar: f64,
}

impl ImmersedSubmanifold {
    pub fn new(
        name: impl Into<String>,
        domain: ParamBox,
        ambient: AmbientSpace,
        closed: bool,
        position: Arc<PositionFn>,
        analytic: Option<Arc<JetFn>>,
    ) -> Self {
        let derivative_mode = if analytic.is_some() {
            DerivativeMode::Analytic
        } else {
            DerivativeMode::FiniteDifference {
                step_scale: FD_STEP_SCALE,
            }
        };
        ImmersedSubmanifold {
            name: name.into(),
            domain,
            ambient,
            closed,
            position,
            analytic,
            derivative_mode,
        }
    }

    /// Intrinsic dimension n of Σ.
    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn with_mode(&self, mode: DerivativeMode) -> Self {
        let mut s = self.clone();
        s.derivative_mode = mode;
        s
    }

    pub fn position(&self, u: &[f64]) -> DVector<f64> {
        (self.position)(u)
    }

    pub fn jet(&self, u: &[f64]) -> Jet {
        match (self.derivative_mode, &self.analytic) {
            (DerivativeMode::Analytic, Some(j)) => j(u),
            (DerivativeMode::Analytic, None) => self.fd_jet(u, FD_STEP_SCALE),
            (DerivativeMode::FiniteDifference { step_scale }, _) => self.fd_jet(u, step_scale),
        }
    }

    fn fd_jet(&self, u: &[f64], step_scale: f64) -> Jet {
        let n = self.dim();
        let h: Vec<f64> = (0..n).map(|i| step_scale * self.domain.extent(i)).collect();
        let f = |v: &[f64]| (self.position)(v);
        let pos = f(u);
        let mut shifted = u.to_vec();
        let mut first = Vec::with_capacity(n);
        for i in 0..n {
            shifted[i] = u[i] + h[i];
            let fp = f(&shifted);
            shifted[i] = u[i] - h[i];
            let fm = f(&shifted);
            shifted[i] = u[i];
            first.push((fp - fm) / (2.0 * h[i]));
        }
        let mut second = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(i + 1);
            for j in 0..=i {
                let d = if i == j {
                    shifted[i] = u[i] + h[i];
                    let fp = f(&shifted);
                    shifted[i] = u[i] - h[i];
                    let fm = f(&shifted);
                    shifted[i] = u[i];
                    (fp + fm - 2.0 * &pos) / (h[i] * h[i])
                } else {
                    shifted[i] = u[i] + h[i];
                    shifted[j] = u[j] + h[j];
                    let fpp = f(&shifted);
                    shifted[j] = u[j] - h[j];
                    let fpm = f(&shifted);
                    shifted[i] = u[i] - h[i];
                    let fmm = f(&shifted);
                    shifted[j] = u[j] + h[j];
                    let fmp = f(&shifted);
                    shifted[i] = u[i];
                    shifted[j] = u[j];
                    (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j])
                };
                row.push(d);
            }
            second.push(row);
        }
        Jet { pos, first, second }
    }

    fn metric_of(&self, jet: &Jet) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.ambient.inner(&jet.first[i], &jet.first[j]))
    }

    pub fn first_fundamental_form(&self, u: &[f64]) -> Result<DMatrix<f64>> {
        let jet = self.jet(u);
        let g = self.metric_of(&jet);
        check_immersion(&g)?;
        Ok(g)
    }

    /// Area element √det g at a parameter point (cheap path for quadrature:
    /// no eigenvalue check, just nondegeneracy).
    pub fn area_element_at(&self, u: &[f64]) -> Result<(DVector<f64>, f64)> {
        let jet = self.jet(u);
        let g = self.metric_of(&jet);
        let det = g.determinant();
        if !(det > 0.0) || !det.is_finite() {
            return Err(Error::Immersion(format!(
                "degenerate metric (det g = {det:.3e}) at parameter point {u:?}"
            )));
        }
        Ok((jet.pos, det.sqrt()))
    }

    pub fn curvature_at(&self, u: &[f64]) -> Result<CurvaturePointData> {
        let n = self.dim();
        let jet = self.jet(u);
        self.ambient.check_point(&jet.pos)?;
        let g = self.metric_of(&jet);
        check_immersion(&g)?;
        let ginv = g.clone().try_inverse().ok_or_else(|| {
            Error::Immersion("first fundamental form is not invertible".into())
        })?;

        let frame = gram_schmidt(&self.ambient, &jet.first)?;
        let kappa = self.ambient.kappa();
        // second fundamental form values a_ij = normal part of D_i D_j F
        let mut a: Vec<Vec<DVector<f64>>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(i + 1);
            for j in 0..=i {
                let mut w = jet.second_at(i, j).clone();
                if kappa > 0.0 {
                    // remove the component normal to the hyperboloid itself
                    let c = kappa * kappa * self.ambient.inner(&w, &jet.pos);
                    w += &jet.pos * c;
                }
                for e in &frame {
                    let c = self.ambient.inner(&w, e);
                    w -= e * c;
                }
                row.push(w);
            }
            a.push(row);
        }
        let aij = |i: usize, j: usize| -> &DVector<f64> {
            let (p, q) = if i >= j { (i, j) } else { (j, i) };
            &a[p][q]
        };

        let mut norm_a2 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        norm_a2 += ginv[(i, k)]
                            * ginv[(j, l)]
                            * self.ambient.inner(aij(i, j), aij(k, l));
                    }
                }
            }
        }
        let mut hvec = DVector::zeros(jet.pos.len());
        for i in 0..n {
            for j in 0..n {
                hvec += aij(i, j) * ginv[(i, j)];
            }
        }
        let norm_h2 = self.ambient.inner(&hvec, &hvec);
        let traceless2 = (norm_a2 - norm_h2 / n as f64).max(0.0);
        let nf = n as f64;
        let scalar = -nf * (nf - 1.0) * kappa * kappa + norm_h2 - norm_a2;
        Ok(CurvaturePointData {
            metric: g,
            norm_a2,
            norm_h2,
            traceless2,
            scalar,
        })
    }

    /// ∫_Σ f dV over the parameter window, by adaptive tensor quadrature of
    /// f·√det g. `f` receives the parameter point and the ambient position.
    pub fn integrate(
        &self,
        f: &(dyn Fn(&[f64], &DVector<f64>) -> f64 + Sync),
        tol: f64,
    ) -> Result<(f64, f64)> {
        let mut failure: Option<Error> = None;
        let mut integrand = |u: &[f64]| -> f64 {
            match self.area_element_at(u) {
                Ok((pos, sqrt_g)) => f(u, &pos) * sqrt_g,
                Err(e) => {
                    if failure.is_none() {
                        failure = Some(e);
                    }
                    0.0
                }
            }
        };
        let r = crate::quad::adaptive_box(&mut integrand, &self.domain.lo, &self.domain.hi, tol);
        if let Some(e) = failure {
            return Err(e);
        }
        r
    }

    /// Total area of the parameter window.
    pub fn area(&self, tol: f64) -> Result<(f64, f64)> {
        self.integrate(&|_, _| 1.0, tol)
    }

    /// Area of Σ inside the ambient geodesic ball of radius `radius` about
    /// `x0`. Cells fully inside or outside the ball are resolved by distance
    /// bounds; boundary cells are refined until their ambient diameter is
    /// below `resolution`·radius and then integrated against the boundary
    /// crossing found by bisection along quadrature lines.
    pub fn geodesic_ball_area(
        &self,
        x0: &DVector<f64>,
        radius: f64,
        resolution: f64,
    ) -> Result<(f64, f64)> {
        if !(radius > 0.0) {
            return Err(Error::domain("ball radius must be positive"));
        }
        if !(resolution > 0.0 && resolution < 1.0) {
            return Err(Error::domain("ball resolution factor must lie in (0, 1)"));
        }
        self.ambient.check_point(x0)?;
        let dist = |u: &[f64]| -> f64 {
            self.ambient
                .distance_unchecked(&(self.position)(u), x0)
        };
        let sqrt_g = |u: &[f64]| -> Result<f64> { Ok(self.area_element_at(u)?.1) };

        let bottom = resolution * radius;
        let mut area = 0.0;
        let mut err = 0.0;
        let mut stack = vec![self.domain.cell()];
        let mut budget: u64 = 4_000_000;
        let mut deferred: Option<Error> = None;
        while let Some(cell) = stack.pop() {
            if budget == 0 {
                return Err(Error::computation(
                    "ball-area subdivision exceeded its cell budget",
                    f64::NAN,
                ));
            }
            budget -= 1;
            let n = cell.dim();
            let center: Vec<f64> = (0..n).map(|i| 0.5 * (cell.lo[i] + cell.hi[i])).collect();
            let cjet = self.jet(&center);
            let pc = cjet.pos.clone();
            let dc = self.ambient.distance_unchecked(&pc, x0);
            // per-axis ambient widths from the metric at the center; robust
            // for cells spanning a full period, where endpoint positions
            // coincide
            let widths: Vec<f64> = (0..n)
                .map(|i| {
                    (cell.hi[i] - cell.lo[i])
                        * self.ambient.inner(&cjet.first[i], &cjet.first[i]).max(0.0).sqrt()
                })
                .collect();
            let diag = widths.iter().map(|w| w * w).sum::<f64>().sqrt();
            // ambient radius of the cell around its center, from the corners
            let mut rad: f64 = 0.0;
            let mut dmin = dc;
            let mut dmax = dc;
            let corners = 1usize << n;
            let mut corner_d = vec![0.0; corners];
            for mask in 0..corners {
                let v: Vec<f64> = (0..n)
                    .map(|i| if mask >> i & 1 == 1 { cell.hi[i] } else { cell.lo[i] })
                    .collect();
                let p = (self.position)(&v);
                rad = rad.max(self.ambient.distance_unchecked(&p, &pc));
                let d = self.ambient.distance_unchecked(&p, x0);
                corner_d[mask] = d;
                dmin = dmin.min(d);
                dmax = dmax.max(d);
            }
            let rad = rad.max(0.5 * diag);
            let pad = 1.5 * rad;
            if dmin - pad > radius {
                continue;
            }
            if dmax + pad < radius {
                match integrate_cell_measure(&sqrt_g, &cell, bottom * bottom * 1e-4) {
                    Ok((v, e)) => {
                        area += v;
                        err += e;
                    }
                    Err(e) => {
                        deferred.get_or_insert(e);
                    }
                }
                continue;
            }
            if 2.0 * rad < bottom {
                match self.boundary_cell_area(&cell, &dist, &sqrt_g, radius) {
                    Ok((v, e)) => {
                        area += v;
                        err += e;
                    }
                    Err(e) => {
                        deferred.get_or_insert(e);
                    }
                }
                continue;
            }
            // split the axis with the largest ambient width; fall back to
            // parameter width if the metric degenerates at the center
            let mut axis = 0;
            let mut best = f64::MIN;
            for (i, &w) in widths.iter().enumerate() {
                let w = if diag > 0.0 { w } else { cell.hi[i] - cell.lo[i] };
                if w > best {
                    best = w;
                    axis = i;
                }
            }
            let (a1, a2) = cell.split(axis);
            stack.push(a1);
            stack.push(a2);
        }
        if let Some(e) = deferred {
            return Err(e);
        }
        Ok((area, err))
    }

    /// Area of the inside-the-ball part of one bottom-level boundary cell.
    /// For surfaces (n = 2): along each quadrature line in one axis, locate
    /// the boundary crossing by bisection and integrate √det g over the
    /// inside segment. Higher dimensions fall back to an indicator rule.
    fn boundary_cell_area(
        &self,
        cell: &Cell,
        dist: &dyn Fn(&[f64]) -> f64,
        sqrt_g: &dyn Fn(&[f64]) -> Result<f64>,
        radius: f64,
    ) -> Result<(f64, f64)> {
        let n = cell.dim();
        if n != 2 {
            let mut failure: Option<Error> = None;
            let mut f = |u: &[f64]| -> f64 {
                if dist(u) < radius {
                    match sqrt_g(u) {
                        Ok(s) => s,
                        Err(e) => {
                            failure.get_or_insert(e);
                            0.0
                        }
                    }
                } else {
                    0.0
                }
            };
            let v = tensor_gl8(&mut f, cell);
            if let Some(e) = failure {
                return Err(e);
            }
            // indicator cells resolve the boundary only to the cell scale
            return Ok((v, v.abs().max(cell.volume()) * 0.5));
        }
        // pick the sweep axis as the one along which the signed distance
        // varies more (corner order: bit i = axis i at hi)
        let dv0 = ((dist(&[cell.hi[0], cell.lo[1]]) - dist(&[cell.lo[0], cell.lo[1]]))
            + (dist(&[cell.hi[0], cell.hi[1]]) - dist(&[cell.lo[0], cell.hi[1]])))
        .abs();
        let dv1 = ((dist(&[cell.lo[0], cell.hi[1]]) - dist(&[cell.lo[0], cell.lo[1]]))
            + (dist(&[cell.hi[0], cell.hi[1]]) - dist(&[cell.hi[0], cell.lo[1]])))
        .abs();
        let sweep = if dv0 >= dv1 { 0 } else { 1 };
        let outer = 1 - sweep;

        let oc = 0.5 * (cell.lo[outer] + cell.hi[outer]);
        let oh = 0.5 * (cell.hi[outer] - cell.lo[outer]);
        let mut total = 0.0;
        let mut failure: Option<Error> = None;
        for (xo, wo) in GL16.nodes.iter().zip(&GL16.weights) {
            let o = oc + oh * xo;
            let at = |s: f64| -> [f64; 2] {
                let mut u = [0.0; 2];
                u[sweep] = s;
                u[outer] = o;
                u
            };
            let phi = |s: f64| dist(&at(s)) - radius;
            // sample the line, bisect each sign change, and integrate the
            // inside segments
            const SAMPLES: usize = 9;
            let (s0, s1) = (cell.lo[sweep], cell.hi[sweep]);
            let mut xs = [0.0; SAMPLES];
            let mut ps = [0.0; SAMPLES];
            for (k, (x, p)) in xs.iter_mut().zip(ps.iter_mut()).enumerate() {
                *x = s0 + (s1 - s0) * k as f64 / (SAMPLES - 1) as f64;
                *p = phi(*x);
            }
            let mut cuts = vec![s0];
            let mut inside = vec![ps[0] < 0.0];
            for k in 0..SAMPLES - 1 {
                if (ps[k] < 0.0) != (ps[k + 1] < 0.0) {
                    let (mut a, mut b) = (xs[k], xs[k + 1]);
                    let mut fa = ps[k];
                    for _ in 0..60 {
                        let m = 0.5 * (a + b);
                        let fm = phi(m);
                        if (fm < 0.0) == (fa < 0.0) {
                            a = m;
                            fa = fm;
                        } else {
                            b = m;
                        }
                    }
                    cuts.push(0.5 * (a + b));
                    inside.push(ps[k + 1] < 0.0);
                }
            }
            cuts.push(s1);
            let mut line = 0.0;
            for (k, &is_in) in inside.iter().enumerate() {
                if !is_in {
                    continue;
                }
                let (a, b) = (cuts[k], cuts[k + 1]);
                let c = 0.5 * (a + b);
                let h = 0.5 * (b - a);
                for (xi, wi) in GL8.nodes.iter().zip(&GL8.weights) {
                    match sqrt_g(&at(c + h * xi)) {
                        Ok(s) => line += wi * h * s,
                        Err(e) => {
                            failure.get_or_insert(e);
                        }
                    }
                }
            }
            total += wo * oh * line;
        }
        if let Some(e) = failure {
            return Err(e);
        }
        Ok((total, total.abs() * 1e-9))
    }

    /// Uniform interior grid in parameter space (cell midpoints).
    pub fn grid(&self, per_axis: usize) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut out = Vec::new();
        let total = per_axis.pow(n as u32);
        for flat in 0..total {
            let mut idx = flat;
            let mut u = Vec::with_capacity(n);
            for i in 0..n {
                let k = idx % per_axis;
                idx /= per_axis;
                u.push(self.domain.lo[i] + self.domain.extent(i) * (k as f64 + 0.5) / per_axis as f64);
            }
            out.push(u);
        }
        out
    }

    /// Crude ambient diameter of the (windowed) image, from a coarse grid.
    pub fn diameter_hint(&self) -> f64 {
        let pts: Vec<DVector<f64>> = self.grid(4).iter().map(|u| (self.position)(u)).collect();
        let mut d: f64 = 0.0;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                d = d.max(self.ambient.distance_unchecked(&pts[i], &pts[j]));
            }
        }
        d
    }

    /// A unit normal direction of Σ at `u` (first ambient direction not in
    /// the tangent space; for hyperbolic ambients, within the hyperboloid's
    /// own tangent space).
    pub fn normal_at(&self, u: &[f64]) -> Result<DVector<f64>> {
        let jet = self.jet(u);
        let frame = gram_schmidt(&self.ambient, &jet.first)?;
        let kappa = self.ambient.kappa();
        let m = self.ambient.coord_dim();
        for i in 0..m {
            let mut v = DVector::zeros(m);
            v[i] = 1.0;
            if kappa > 0.0 {
                let c = kappa * kappa * self.ambient.inner(&v, &jet.pos);
                v += &jet.pos * c;
            }
            for e in &frame {
                let c = self.ambient.inner(&v, e);
                v -= e * c;
            }
            let n2 = self.ambient.inner(&v, &v);
            if n2 > 1e-6 {
                return Ok(v / n2.sqrt());
            }
        }
        Err(Error::Immersion("no normal direction found".into()))
    }

    /// Positions sampled on the boundary faces of the parameter window
    /// (empty for closed shapes); used to bound truncation tails.
    pub fn window_boundary_samples(&self, per_axis: usize) -> Vec<DVector<f64>> {
        if self.closed {
            return Vec::new();
        }
        let n = self.dim();
        let mut out = Vec::new();
        for axis in 0..n {
            if self.domain.periodic[axis] {
                continue;
            }
            for &face in &[self.domain.lo[axis], self.domain.hi[axis]] {
                let others: Vec<usize> = (0..n).filter(|&i| i != axis).collect();
                let total = per_axis.pow(others.len() as u32);
                for flat in 0..total {
                    let mut idx = flat;
                    let mut u = vec![0.0; n];
                    u[axis] = face;
                    for &i in &others {
                        let k = idx % per_axis;
                        idx /= per_axis;
                        u[i] = self.domain.lo[i]
                            + self.domain.extent(i) * (k as f64 + 0.5) / per_axis as f64;
                    }
                    out.push((self.position)(&u));
                }
            }
        }
        out
    }

    /// Image of Σ under the Euclidean dilation x ↦ c·x.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if self.ambient.kappa() > 0.0 {
            return Err(Error::domain("dilation is only defined for Euclidean ambients"));
        }
        if !(c > 0.0) {
            return Err(Error::domain("dilation factor must be positive"));
        }
        let mut s = self.clone();
        let pos = Arc::clone(&self.position);
        s.position = Arc::new(move |u: &[f64]| pos(u) * c);
        s.analytic = self.analytic.as_ref().map(|j| {
            let j = Arc::clone(j);
            Arc::new(move |u: &[f64]| {
                let mut jet = j(u);
                jet.pos *= c;
                for v in &mut jet.first {
                    *v *= c;
                }
                for row in &mut jet.second {
                    for v in row {
                        *v *= c;
                    }
                }
                jet
            }) as Arc<JetFn>
        });
        s.name = format!("{}*{c}", self.name);
        Ok(s)
    }
}

fn check_immersion(g: &DMatrix<f64>) -> Result<()> {
    let eig = g.clone().symmetric_eigen();
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min > IMMERSION_TOL) {
        return Err(Error::Immersion(format!(
            "first fundamental form nearly degenerate: min eigenvalue {min:.3e}"
        )));
    }
    Ok(())
}

/// Orthonormalizes the tangent vectors in the ambient inner product.
fn gram_schmidt(ambient: &AmbientSpace, vs: &[DVector<f64>]) -> Result<Vec<DVector<f64>>> {
    let mut frame: Vec<DVector<f64>> = Vec::with_capacity(vs.len());
    for v in vs {
        let mut w = v.clone();
        for e in &frame {
            let c = ambient.inner(&w, e);
            w -= e * c;
        }
        let n2 = ambient.inner(&w, &w);
        if !(n2 > IMMERSION_TOL) {
            return Err(Error::Immersion(
                "tangent frame nearly degenerate during orthonormalization".into(),
            ));
        }
        frame.push(w / n2.sqrt());
    }
    Ok(frame)
}

/// √det g integrated over one parameter cell (used for cells fully inside a
/// ball). Converts the fallible area element into a deferred error.
fn integrate_cell_measure(
    sqrt_g: &dyn Fn(&[f64]) -> Result<f64>,
    cell: &Cell,
    tol: f64,
) -> Result<(f64, f64)> {
    let mut failure: Option<Error> = None;
    let mut f = |u: &[f64]| -> f64 {
        match sqrt_g(u) {
            Ok(s) => s,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let (v, e) = adaptive_cell(&mut f, cell, tol);
    if let Some(err) = failure {
        return Err(err);
    }
    Ok((v, e))
}
