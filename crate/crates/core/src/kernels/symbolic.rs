//! Closed-form representation of the odd-dimensional hyperbolic heat
//! kernels K_{2m+1,1}. The kernel is the m-fold image of the flat
//! 1-dimensional Gaussian under the operator -(1/sinh r) d/dr, carrying
//! an e^{-m^2 t} prefactor; the expansion is performed once per
//! dimension into a finite sum of monomials in r, coth r and csch r.

use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::sync::Mutex;

/// Truncation order of the auxiliary Taylor series (in powers of r^2)
/// used on the small-r branch.
const SERIES_ORDER: usize = 12;
/// Below this radius the csch / coth monomials are evaluated through
/// their Laurent expansion; the individual monomials are singular there
/// even though the sum is smooth.
pub const SMALL_R_SWITCH: f64 = 0.3;

/// One monomial c * t^{t_pow2 / 2} * r^p * coth(r)^q * csch(r)^s
/// (the shared Gaussian factor e^{-m^2 t - r^2/4t} is applied at the end).
#[derive(Clone, Debug)]
struct Term {
    c: f64,
    t_pow2: i32,
    p: u32,
    q: u32,
    s: u32,
    /// Taylor coefficients (in x = r^2) of (r coth r)^q (r csch r)^s,
    /// so that the monomial equals r^{p-q-s} * sum_j laurent[j] x^j.
    laurent: Vec<f64>,
}

pub struct OddKernel {
    /// n = 2m + 1.
    pub n: u32,
    m: u32,
    terms: Vec<Term>,
    /// Most negative r-exponent across the Laurent parts.
    min_exponent: i32,
}

/// Taylor coefficients of r/sinh(r) in powers of r^2.
fn r_csch_series(order: usize) -> Vec<f64> {
    // sinh(r)/r = sum r^{2k}/(2k+1)!  -> invert the power series.
    let mut sinhc = vec![0.0; order + 1];
    let mut fact = 1.0;
    for (k, c) in sinhc.iter_mut().enumerate() {
        // (2k+1)! built incrementally
        if k > 0 {
            fact *= (2 * k) as f64 * (2 * k + 1) as f64;
        }
        *c = 1.0 / fact;
    }
    invert_series(&sinhc)
}

/// Taylor coefficients of r*coth(r) in powers of r^2.
fn r_coth_series(order: usize) -> Vec<f64> {
    let s = r_csch_series(order);
    // cosh r = sum r^{2k}/(2k)!
    let mut cosh = vec![0.0; order + 1];
    let mut fact = 1.0;
    for (k, c) in cosh.iter_mut().enumerate() {
        if k > 0 {
            fact *= (2 * k - 1) as f64 * (2 * k) as f64;
        }
        *c = 1.0 / fact;
    }
    mul_series(&cosh, &s)
}

fn invert_series(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut inv = vec![0.0; n];
    inv[0] = 1.0 / a[0];
    for k in 1..n {
        let mut acc = 0.0;
        for j in 1..=k {
            acc += a[j] * inv[k - j];
        }
        inv[k] = -acc / a[0];
    }
    inv
}

fn mul_series(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().min(b.len());
    let mut out = vec![0.0; n];
    for i in 0..n {
        for j in 0..n - i {
            out[i + j] += a[i] * b[j];
        }
    }
    out
}

fn pow_series(a: &[f64], mut e: u32, order: usize) -> Vec<f64> {
    let mut out = vec![0.0; order + 1];
    out[0] = 1.0;
    let mut base = a.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            out = mul_series(&out, &base);
        }
        base = mul_series(&base, &base);
        e >>= 1;
    }
    out
}

static RCOTH: Lazy<Vec<f64>> = Lazy::new(|| r_coth_series(SERIES_ORDER));
static RCSCH: Lazy<Vec<f64>> = Lazy::new(|| r_csch_series(SERIES_ORDER));

impl OddKernel {
    fn build(n: u32) -> OddKernel {
        assert!(n % 2 == 1 && n >= 1);
        let m = (n - 1) / 2;
        // K_{1,1} = (4 pi)^{-1/2} t^{-1/2} e^{-r^2/4t}
        let mut terms = vec![Term {
            c: 1.0 / (4.0 * std::f64::consts::PI).sqrt(),
            t_pow2: -1,
            p: 0,
            q: 0,
            s: 0,
            laurent: Vec::new(),
        }];
        for _ in 0..m {
            terms = millson_step(&terms);
        }
        for t in &mut terms {
            t.laurent = mul_series(
                &pow_series(&RCOTH, t.q, SERIES_ORDER),
                &pow_series(&RCSCH, t.s, SERIES_ORDER),
            );
        }
        let min_exponent = terms
            .iter()
            .map(|t| t.p as i32 - t.q as i32 - t.s as i32)
            .min()
            .unwrap_or(0);
        OddKernel {
            n,
            m,
            terms,
            min_exponent,
        }
    }

    /// K_{n,1}(t, r) for t > 0, r >= 0.
    pub fn eval(&self, t: f64, r: f64) -> f64 {
        let gauss = (-((self.m * self.m) as f64) * t - r * r / (4.0 * t)).exp();
        if gauss == 0.0 {
            return 0.0;
        }
        if r < SMALL_R_SWITCH {
            self.eval_series(t, r) * gauss
        } else {
            self.eval_direct(t, r) * gauss
        }
    }

    fn eval_direct(&self, t: f64, r: f64) -> f64 {
        let sq = t.sqrt();
        let sinh = r.sinh();
        let coth = r.cosh() / sinh;
        let csch = 1.0 / sinh;
        let mut sum = 0.0;
        for term in &self.terms {
            sum += term.c
                * sq.powi(term.t_pow2)
                * r.powi(term.p as i32)
                * coth.powi(term.q as i32)
                * csch.powi(term.s as i32);
        }
        sum
    }

    /// Laurent-series branch for small r: the negative and odd powers of r
    /// cancel across terms, so only the smooth even part is summed.
    fn eval_series(&self, t: f64, r: f64) -> f64 {
        // exp(-x/4t) Taylor coefficients in x = r^2 are irrelevant here:
        // the shared Gaussian factor is applied by the caller, so this
        // branch only sums the monomial parts.
        let sq = t.sqrt();
        let span = 2 * SERIES_ORDER as i32 + 1;
        let mut coef = vec![0.0; (span - self.min_exponent.min(0)) as usize + 1];
        for term in &self.terms {
            let e0 = term.p as i32 - term.q as i32 - term.s as i32;
            let tp = term.c * sq.powi(term.t_pow2);
            for (j, l) in term.laurent.iter().enumerate() {
                let e = e0 + 2 * j as i32 - self.min_exponent.min(0);
                if (e as usize) < coef.len() {
                    coef[e as usize] += tp * l;
                }
            }
        }
        let base = self.min_exponent.min(0);
        let mut val = 0.0;
        let mut rp = 1.0;
        let mut e = 0i32;
        // walk nonnegative exponents only; negative ones cancel analytically
        for (k, c) in coef.iter().enumerate() {
            let expo = base + k as i32;
            if expo < 0 {
                continue;
            }
            while e < expo {
                rp *= r;
                e += 1;
            }
            val += c * rp;
        }
        val
    }

    /// Number of expanded monomials (used by tests).
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }
}

/// One step of the recursion K_{m+2} = -e^{-mt} (2 pi sinh r)^{-1} d/dr K_m:
/// differentiate every monomial, multiply by -csch(r)/(2 pi), and merge
/// like terms. The e^{-mt} factor is tracked through m^2 in `eval`.
fn millson_step(terms: &[Term]) -> Vec<Term> {
    let mut out: HashMap<(i32, u32, u32, u32), f64> = HashMap::new();
    let scale = -1.0 / (2.0 * std::f64::consts::PI);
    let mut add = |c: f64, t_pow2: i32, p: u32, q: u32, s: u32| {
        *out.entry((t_pow2, p, q, s)).or_insert(0.0) += c;
    };
    for t in terms {
        // d/dr of r^p: p r^{p-1}
        if t.p > 0 {
            add(scale * t.c * t.p as f64, t.t_pow2, t.p - 1, t.q, t.s + 1);
        }
        // d/dr of coth^q: -q coth^{q-1} csch^2
        if t.q > 0 {
            add(-scale * t.c * t.q as f64, t.t_pow2, t.p, t.q - 1, t.s + 3);
        }
        // d/dr of csch^s: -s coth csch^s
        if t.s > 0 {
            add(-scale * t.c * t.s as f64, t.t_pow2, t.p, t.q + 1, t.s + 1);
        }
        // d/dr of e^{-r^2/4t}: -(r/2t) times the monomial
        add(-scale * t.c * 0.5, t.t_pow2 - 2, t.p + 1, t.q, t.s + 1);
    }
    let mut merged: Vec<_> = out.into_iter().filter(|(_, c)| *c != 0.0).collect();
    // fixed term order so summation is reproducible across processes
    merged.sort_by_key(|&(k, _)| k);
    merged
        .into_iter()
        .map(|((t_pow2, p, q, s), c)| Term {
            c,
            t_pow2,
            p,
            q,
            s,
            laurent: Vec::new(),
        })
        .collect()
}

static CACHE: Lazy<Mutex<HashMap<u32, &'static OddKernel>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Shared, immutable expansion of K_{n,1} for odd n.
pub fn odd_kernel(n: u32) -> &'static OddKernel {
    let mut cache = CACHE.lock().unwrap();
    cache
        .entry(n)
        .or_insert_with(|| Box::leak(Box::new(OddKernel::build(n))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn k3_closed(t: f64, r: f64) -> f64 {
        (4.0 * std::f64::consts::PI * t).powf(-1.5) * r / r.sinh() * (-t - r * r / (4.0 * t)).exp()
    }

    #[test]
    fn k3_matches_closed_form() {
        let k = odd_kernel(3);
        for &(t, r) in &[(1.0, 1.0), (0.5, 0.7), (0.05, 2.5), (2.0, 0.31)] {
            assert_relative_eq!(k.eval(t, r), k3_closed(t, r), max_relative = 1e-12);
        }
    }

    #[test]
    fn k3_small_r_branch_is_continuous() {
        let k = odd_kernel(3);
        // the two branches must agree at the same radius
        let t = 0.7;
        for &r in &[0.05, 0.15, 0.29] {
            let a = k.eval_series(t, r);
            let b = k.eval_direct(t, r);
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
        // analytic limit at r = 0: (4 pi t)^{-3/2} e^{-t}
        let lim = (4.0 * std::f64::consts::PI * t).powf(-1.5) * (-t).exp();
        assert_relative_eq!(k.eval(t, 0.0), lim, max_relative = 1e-12);
    }

    #[test]
    fn k5_matches_independent_symbolic_values() {
        // frozen from an independent computer-algebra derivation of the
        // same recursion
        let k = odd_kernel(5);
        assert_relative_eq!(k.eval(1.0, 1.0), 3.0001207449852988192e-5, max_relative = 1e-12);
        assert_relative_eq!(
            k.eval(0.5, 0.7),
            1.2058263645975546919e-3,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            k.eval(2.0, 0.01),
            2.4717225588093349243e-7,
            max_relative = 1e-11
        );
        // r = 0 analytic limit: (2t+3) e^{-4t} / (96 pi^{5/2} t^{5/2})
        assert_relative_eq!(
            k.eval(1.0, 0.0),
            5.4531339020715263086e-5,
            max_relative = 1e-12
        );
    }

    #[test]
    fn k7_heat_equation_residual() {
        // dt K = drr K + (n-1) coth(r) dr K for the n = 7 member, checked
        // by central differences; guards the general recursion step.
        let k = odd_kernel(7);
        let h = 1e-4;
        for &(t, r) in &[(0.5, 0.8), (1.0, 1.7), (0.25, 0.45)] {
            let kt = (k.eval(t + h, r) - k.eval(t - h, r)) / (2.0 * h);
            let kr = (k.eval(t, r + h) - k.eval(t, r - h)) / (2.0 * h);
            let krr = (k.eval(t, r + h) - 2.0 * k.eval(t, r) + k.eval(t, r - h)) / (h * h);
            let res = kt - krr - 6.0 * (r.cosh() / r.sinh()) * kr;
            assert!((res / k.eval(t, r)).abs() < 1e-4);
        }
    }
}
