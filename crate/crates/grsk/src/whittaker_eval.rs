//! GL(n,ℝ)-Whittaker functions at small `n` via the Baxter-Q recursion,
//! the generalized `Ψ_{λ;s}`, the Sklyanin density, and quadrature checks of
//! the gamma-product integral identities.
//!
//! Every integral is taken in log coordinates `x = e^u`, so `dx/x` becomes `du`.

use std::cell::{Cell, RefCell};
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GrskError, Result};
use crate::grsk_core::{pattern_energy, Pattern};
use crate::quadrature::{tanh_sinh, QuadResult};

type C = Complex64;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

// ---------------------------------------------------------------------------
// Parameters

/// Spectral parameters for one evaluation; `lambda` has length `n` or `n + k`.
#[derive(Clone, Debug, PartialEq)]
pub struct WhittakerParams {
    pub n: usize,
    pub lambda: Vec<C>,
    pub s: Option<C>,
}

impl WhittakerParams {
    pub fn new(n: usize, lambda: Vec<C>, s: Option<C>) -> Result<Self> {
        if n == 0 || lambda.len() < n {
            return Err(GrskError::Usage(format!(
                "need n >= 1 and at least n spectral parameters, got n = {n}, {} parameters",
                lambda.len()
            )));
        }
        if lambda.len() > n && s.is_none_or(|s| s.re <= 0.0) {
            return Err(GrskError::Usage("Ψ_{λ;s} with k >= 1 needs Re s > 0".into()));
        }
        Ok(WhittakerParams { n, lambda, s })
    }

    /// `Ψ_λ(x)` or `Ψ_{λ;s}(x)` depending on whether `s` is set.
    pub fn eval(&self, x: &[f64], quad: &QuadratureSpec) -> Result<QuadResult<C>> {
        if x.len() != self.n {
            return Err(GrskError::Usage(format!("x has {} entries, n = {}", x.len(), self.n)));
        }
        match self.s {
            Some(s) => psi_s(&self.lambda, s, x, quad),
            None => psi(&self.lambda, x, quad),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadRule {
    TanhSinh,
    /// Trapezoid on a uniform log grid, halved until converged.
    LogTrapezoid,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rule: QuadRule,
    /// Minimum nodes per axis.
    pub points: usize,
    /// Target relative tolerance.
    pub tol: f64,
    pub log_substitution: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { rule: QuadRule::LogTrapezoid, points: 32, tol: 1e-10, log_substitution: true }
    }
}

impl QuadratureSpec {
    pub fn with_tol(tol: f64) -> Self {
        QuadratureSpec { tol, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 16 || !(self.tol >= 1e-12) || !self.log_substitution {
            return Err(GrskError::Usage(format!(
                "quadrature needs points >= 16, tol >= 1e-12 and log substitution, got {self:?}"
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Gamma and Bessel-K

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn ln_gamma_right(z: C) -> C {
    let z = z - 1.0;
    let mut x = c(LANCZOS[0]);
    for (i, &p) in LANCZOS.iter().enumerate().skip(1) {
        x += p / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

fn near_pole(z: C) -> bool {
    z.re <= 0.5 && z.im.abs() < 1e-14 && (z.re - z.re.round()).abs() < 1e-14
}

/// `Γ(z)` by the Lanczos approximation, with reflection for `Re z < 1/2`.
pub fn gamma(z: C) -> C {
    if z.re < 0.5 {
        if near_pole(z) {
            return c(f64::INFINITY);
        }
        PI / ((PI * z).sin() * gamma(1.0 - z))
    } else {
        ln_gamma_right(z).exp()
    }
}

/// `1/Γ(z)`, zero at the poles.
pub fn rgamma(z: C) -> C {
    if z.re < 0.5 {
        if near_pole(z) {
            return c(0.0);
        }
        (PI * z).sin() * gamma(1.0 - z) / PI
    } else {
        (-ln_gamma_right(z)).exp()
    }
}

/// `ln Γ(x)` for real `x > 0`.
pub fn ln_gamma_real(x: f64) -> f64 {
    ln_gamma_right(c(x)).re
}

/// Expands `[center, center]` in steps of ½ until `log_f` has dropped by
/// `drop` below its largest sampled value on each side.
fn scan_bracket(log_f: impl Fn(f64) -> f64, center: f64, drop: f64) -> Result<(f64, f64)> {
    let mut peak = log_f(center);
    let mut edge = [center, center];
    for (side, dir) in [(0, -1.0), (1, 1.0)] {
        for _ in 0..4000 {
            edge[side] += dir * 0.5;
            let v = log_f(edge[side]);
            peak = peak.max(v);
            if v < peak - drop {
                break;
            }
        }
        if log_f(edge[side]) >= peak - drop {
            return Err(GrskError::Budget { achieved: f64::NAN });
        }
    }
    Ok((edge[0], edge[1]))
}

/// `K_ν(z) = ½ ∫ e^{νv − z cosh v} dv`, `z > 0`.
pub fn bessel_k(nu: C, z: f64, tol: f64) -> Result<QuadResult<C>> {
    if !(z > 0.0) {
        return Err(GrskError::Domain(format!("bessel_k needs z > 0, got {z}")));
    }
    let center = (nu.re / z).asinh();
    let (lo, hi) = scan_bracket(|v| nu.re * v - z * v.cosh(), center, 50.0)?;
    let r = trapezoid_line(|v| (nu * v - z * v.cosh()).exp(), lo, hi, tol)?;
    Ok(QuadResult { value: 0.5 * r.value, error: 0.5 * r.error })
}

// ---------------------------------------------------------------------------
// Line and nested integrals

const MIN_LEVELS_STEP: f64 = 0.3;

fn trapezoid_line(f: impl Fn(f64) -> C, lo: f64, hi: f64, tol: f64) -> Result<QuadResult<C>> {
    let mut n = 16usize;
    let mut h = (hi - lo) / n as f64;
    let mut sum = c(0.0);
    let mut mass = 0.0;
    for k in 0..=n {
        let w = if k == 0 || k == n { 0.5 } else { 1.0 };
        let v = f(lo + k as f64 * h) * w;
        sum += v;
        mass += v.norm();
    }
    let mut prev = sum * h;
    for _ in 0..14 {
        h /= 2.0;
        for k in 0..n {
            let v = f(lo + (2 * k + 1) as f64 * h);
            sum += v;
            mass += v.norm();
        }
        n *= 2;
        let cur = sum * h;
        let err = (cur - prev).norm();
        if !err.is_finite() {
            return Err(GrskError::Budget { achieved: f64::NAN });
        }
        if h <= MIN_LEVELS_STEP && (err <= tol * cur.norm().max(1e-3 * mass * h) || err < 1e-300) {
            return Ok(QuadResult { value: cur, error: err });
        }
        prev = cur;
    }
    Err(GrskError::Budget { achieved: (sum * h - prev).norm() / (sum * h).norm() })
}

fn line(f: impl Fn(f64) -> C, lo: f64, hi: f64, quad: &QuadratureSpec) -> Result<QuadResult<C>> {
    match quad.rule {
        QuadRule::LogTrapezoid => trapezoid_line(f, lo, hi, quad.tol),
        QuadRule::TanhSinh => tanh_sinh(f, lo, hi, quad.tol),
    }
}

/// `∫_box f(v) dv` by iterated line integrals; inner failures propagate and
/// the largest inner relative error is folded into the estimate.
fn nested(
    br: &[(f64, f64)],
    f: &dyn Fn(&[f64]) -> Result<C>,
    quad: &QuadratureSpec,
) -> Result<QuadResult<C>> {
    let Some((&(lo, hi), rest)) = br.split_first() else {
        return Ok(QuadResult { value: f(&[])?, error: 0.0 });
    };
    let failure: RefCell<Option<GrskError>> = RefCell::new(None);
    let inner_rel = Cell::new(0.0f64);
    let outer = line(
        |v0| {
            if failure.borrow().is_some() {
                return c(0.0);
            }
            let g = |tail: &[f64]| {
                let mut p = Vec::with_capacity(tail.len() + 1);
                p.push(v0);
                p.extend_from_slice(tail);
                f(&p)
            };
            match nested(rest, &g, quad) {
                Ok(r) => {
                    if r.value.norm() > 0.0 {
                        inner_rel.set(inner_rel.get().max(r.error / r.value.norm()));
                    }
                    r.value
                }
                Err(e) => {
                    *failure.borrow_mut() = Some(e);
                    c(0.0)
                }
            }
        },
        lo,
        hi,
        quad,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let r = outer?;
    Ok(QuadResult { value: r.value, error: r.error + inner_rel.get() * r.value.norm() })
}

// ---------------------------------------------------------------------------
// Kernels and Ψ

fn check_x(x: &[f64]) -> Result<Vec<f64>> {
    if x.is_empty() || x.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(GrskError::Domain(format!("Whittaker arguments must be positive, got {x:?}")));
    }
    Ok(x.iter().map(|v| v.ln()).collect())
}

/// `log Q^n_λ(e^u, e^v)`.
fn log_q_up(lambda: C, u: &[f64], v: &[f64]) -> C {
    let n = u.len();
    let mut e = 0.0;
    for i in 0..n {
        e -= (v[i] - u[i]).exp();
        if i + 1 < n {
            e -= (u[i + 1] - v[i]).exp();
        }
    }
    lambda * (v.iter().sum::<f64>() - u.iter().sum::<f64>()) + e
}

/// `log Q^{n,n-1}_λ(e^u, e^v)`, `v` of length `n - 1`.
fn log_q_down(lambda: C, u: &[f64], v: &[f64]) -> C {
    let e: f64 = (0..v.len()).map(|i| -(v[i] - u[i]).exp() - (u[i + 1] - v[i]).exp()).sum();
    lambda * (v.iter().sum::<f64>() - u.iter().sum::<f64>()) + e
}

/// `Q^n_λ(x, y) = (Πy/Πx)^λ exp(−Σ y_i/x_i − Σ_{i<n} x_{i+1}/y_i)`.
pub fn q_kernel(n: usize, lambda: C, x: &[f64], y: &[f64]) -> Result<C> {
    if x.len() != n || y.len() != n {
        return Err(GrskError::Usage(format!("Q^{n} needs two vectors of length {n}")));
    }
    Ok(log_q_up(lambda, &check_x(x)?, &check_x(y)?).exp())
}

/// `Q^{n,n-1}_λ(x, y) = (Πy/Πx)^λ exp(−Σ_{i<n} (y_i/x_i + x_{i+1}/y_i))`, `y ∈ ℝ^{n-1}`.
pub fn q_kernel_down(n: usize, lambda: C, x: &[f64], y: &[f64]) -> Result<C> {
    if n < 2 || x.len() != n || y.len() != n - 1 {
        return Err(GrskError::Usage(format!("Q^{{{n},{}}} needs x of length n, y of length n-1", n - 1)));
    }
    Ok(log_q_down(lambda, &check_x(x)?, &check_x(y)?).exp())
}

fn bracket_width(lambda: &[C]) -> f64 {
    let p: f64 = lambda.iter().map(|l| l.re.abs()).sum::<f64>() + 1.0;
    (60.0 + 4.0 * p).ln()
}

fn pair_bracket(a: f64, b: f64, w: f64) -> (f64, f64) {
    (a.min(b) - w, a.max(b) + w)
}

fn psi_log(lambda: &[C], u: &[f64], quad: &QuadratureSpec) -> Result<QuadResult<C>> {
    let n = u.len();
    if n == 1 {
        return Ok(QuadResult { value: (-lambda[0] * u[0]).exp(), error: 0.0 });
    }
    let w = bracket_width(lambda);
    let br: Vec<(f64, f64)> = (0..n - 1).map(|i| pair_bracket(u[i], u[i + 1], w)).collect();
    let inner = &lambda[..n - 1];
    let ln = lambda[n - 1];
    nested(
        &br,
        &|v: &[f64]| {
            let q = log_q_down(ln, u, v).exp();
            if q == c(0.0) {
                return Ok(q);
            }
            Ok(q * psi_log(inner, v, quad)?.value)
        },
        quad,
    )
}

/// `Ψⁿ_λ(x)`, `n = x.len() ≤ 4`.
pub fn psi(lambda: &[C], x: &[f64], quad: &QuadratureSpec) -> Result<QuadResult<C>> {
    quad.validate()?;
    let n = x.len();
    if lambda.len() != n || n > 4 {
        return Err(GrskError::Usage(format!(
            "psi needs n <= 4 and n spectral parameters, got n = {n}, {} parameters",
            lambda.len()
        )));
    }
    psi_log(lambda, &check_x(x)?, quad)
}

fn psi_s_log(lambda: &[C], s: C, u: &[f64], quad: &QuadratureSpec) -> Result<QuadResult<C>> {
    let n = u.len();
    if lambda.len() == n {
        let p = psi_log(lambda, u, quad)?;
        let e = (-s * (-u[n - 1]).exp()).exp();
        return Ok(QuadResult { value: p.value * e, error: p.error * e.norm() });
    }
    let w = bracket_width(lambda);
    let mut br: Vec<(f64, f64)> = (0..n - 1).map(|i| pair_bracket(u[i], u[i + 1], w)).collect();
    // Below y_n ~ s the inner function decays like exp(−k (s/y_n)^{1/k}).
    let ls = s.re.ln();
    br.push((u[n - 1].min(ls) - 2.0 * w, u[n - 1].max(ls) + w));
    let top = lambda[lambda.len() - 1];
    let inner = &lambda[..lambda.len() - 1];
    nested(
        &br,
        &|v: &[f64]| {
            let q = log_q_up(top, u, v).exp();
            if q == c(0.0) {
                return Ok(q);
            }
            Ok(q * psi_s_log(inner, s, v, quad)?.value)
        },
        quad,
    )
}

/// `Ψⁿ_{λ;s}(x)` for `λ ∈ ℂ^{n+k}`, `n + k ≤ 4`.
pub fn psi_s(lambda: &[C], s: C, x: &[f64], quad: &QuadratureSpec) -> Result<QuadResult<C>> {
    quad.validate()?;
    let n = x.len();
    if lambda.len() < n || lambda.len() > 4 {
        return Err(GrskError::Usage(format!(
            "psi_s needs n <= n + k <= 4, got n = {n}, {} parameters",
            lambda.len()
        )));
    }
    if lambda.len() > n && !(s.re > 0.0) {
        return Err(GrskError::Domain("psi_s with k >= 1 needs Re s > 0".into()));
    }
    psi_s_log(lambda, s, &check_x(x)?, quad)
}

// ---------------------------------------------------------------------------
// Pattern generating function by importance sampling

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub value: C,
    pub stderr: f64,
    pub samples: usize,
}

struct PatternIntegrand<'a> {
    n: usize,
    h: usize,
    lambda: &'a [C],
    s: C,
    x: &'a [f64],
}

impl PatternIntegrand<'_> {
    /// `log (P^{−λ} e^{−ℱ_s(P)})` with the free entries at `e^v`.
    fn log_value(&self, v: &[f64]) -> C {
        let mut flat: Vec<f64> = v.iter().map(|t| t.exp()).collect();
        flat.extend_from_slice(self.x);
        let p = Pattern::from_flat(self.h, self.n, &flat).expect("pattern layout");
        let mut logs: Vec<f64> = v.to_vec();
        logs.extend(self.x.iter().map(|t| t.ln()));
        let mut it = logs.iter();
        let mut prev = 0.0;
        let mut log_type = c(0.0);
        for (i, &l) in self.lambda.iter().enumerate() {
            let row: f64 = it.by_ref().take((i + 1).min(self.n)).sum();
            log_type -= l * (row - prev);
            prev = row;
        }
        log_type - pattern_energy(&p, &0.0) - self.s / *p.z(self.n, self.n)
    }
}

fn cholesky(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let d = a.len();
    let mut l = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..=i {
            let s: f64 = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

fn solve_spd(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let d = b.len();
    let mut y = vec![0.0; d];
    for i in 0..d {
        y[i] = (b[i] - (0..i).map(|k| l[i][k] * y[k]).sum::<f64>()) / l[i][i];
    }
    let mut x = vec![0.0; d];
    for i in (0..d).rev() {
        x[i] = (y[i] - (i + 1..d).map(|k| l[k][i] * x[k]).sum::<f64>()) / l[i][i];
    }
    x
}

/// Gradient and Hessian of a smooth function by central differences.
fn derivatives(g: &dyn Fn(&[f64]) -> f64, v: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let d = v.len();
    let e = 1e-4;
    let at = |di: &[(usize, f64)]| {
        let mut w = v.to_vec();
        for &(i, s) in di {
            w[i] += s;
        }
        g(&w)
    };
    let g0 = g(v);
    let mut grad = vec![0.0; d];
    let mut hess = vec![vec![0.0; d]; d];
    for i in 0..d {
        let (p, m) = (at(&[(i, e)]), at(&[(i, -e)]));
        grad[i] = (p - m) / (2.0 * e);
        hess[i][i] = (p - 2.0 * g0 + m) / (e * e);
        for j in 0..i {
            let h = (at(&[(i, e), (j, e)]) - at(&[(i, e), (j, -e)]) - at(&[(i, -e), (j, e)])
                + at(&[(i, -e), (j, -e)]))
                / (4.0 * e * e);
            hess[i][j] = h;
            hess[j][i] = h;
        }
    }
    (grad, hess)
}

/// Maximizer of a concave function by damped Newton steps, and `−∇²` there.
fn laplace_fit(g: &dyn Fn(&[f64]) -> f64, start: Vec<f64>) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let mut v = start;
    for _ in 0..200 {
        let (grad, hess) = derivatives(g, &v);
        let neg: Vec<Vec<f64>> = hess.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
        let step = match cholesky(&neg) {
            Some(l) => solve_spd(&l, &grad),
            None => grad.clone(),
        };
        let g0 = g(&v);
        let mut t = 1.0;
        let mut moved = false;
        while t > 1e-10 {
            let w: Vec<f64> = v.iter().zip(&step).map(|(a, b)| a + t * b).collect();
            if g(&w) >= g0 {
                v = w;
                moved = true;
                break;
            }
            t /= 2.0;
        }
        if !moved || grad.iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-9 {
            break;
        }
    }
    let (_, hess) = derivatives(g, &v);
    let neg: Vec<Vec<f64>> = hess.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
    if cholesky(&neg).is_none() {
        return Err(GrskError::Domain("pattern integrand has no interior maximum".into()));
    }
    Ok((v, neg))
}

fn invert_spd(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let l = cholesky(a)?;
    let d = a.len();
    let cols: Vec<Vec<f64>> = (0..d)
        .map(|j| solve_spd(&l, &(0..d).map(|i| if i == j { 1.0 } else { 0.0 }).collect::<Vec<_>>()))
        .collect();
    Some((0..d).map(|i| (0..d).map(|j| cols[j][i]).collect()).collect())
}

const T_DOF: f64 = 5.0;

/// `∫_{Π^h(x)} P^{−λ} e^{−ℱ_s(P)} dP` by importance sampling in log
/// coordinates from a Student-t fitted at the mode.
pub fn psi_pattern_mc<R: Rng + ?Sized>(
    h: usize,
    lambda: &[C],
    s: C,
    x: &[f64],
    samples: usize,
    rng: &mut R,
) -> Result<McEstimate> {
    let n = x.len();
    check_x(x)?;
    if h < n || lambda.len() != h {
        return Err(GrskError::Usage(format!(
            "pattern integral needs h >= n and h spectral parameters, got n = {n}, h = {h}, {}",
            lambda.len()
        )));
    }
    if h > n && !(s.re > 0.0) {
        return Err(GrskError::Domain("pattern integral with h > n needs Re s > 0".into()));
    }
    let integrand = PatternIntegrand { n, h, lambda, s, x };
    let d: usize = (1..h).map(|i| i.min(n)).sum();
    if d == 0 {
        return Ok(McEstimate { value: integrand.log_value(&[]).exp(), stderr: 0.0, samples });
    }
    let g = |v: &[f64]| integrand.log_value(v).re;
    let mean_log = x.iter().map(|t| t.ln()).sum::<f64>() / n as f64;
    let (mode, neg_hess) = laplace_fit(&g, vec![mean_log; d])?;
    let cov: Vec<Vec<f64>> = invert_spd(&neg_hess)
        .ok_or_else(|| GrskError::Domain("singular Laplace fit".into()))?
        .into_iter()
        .map(|r| r.into_iter().map(|x| 1.5 * x).collect())
        .collect();
    let l = cholesky(&cov).ok_or_else(|| GrskError::Domain("singular Laplace fit".into()))?;
    let log_det_l: f64 = (0..d).map(|i| l[i][i].ln()).sum();
    let df = d as f64;
    let log_norm = ln_gamma_real((T_DOF + df) / 2.0)
        - ln_gamma_real(T_DOF / 2.0)
        - 0.5 * df * (T_DOF * PI).ln()
        - log_det_l;
    let chi = ChiSquared::new(T_DOF).expect("positive dof");
    let (mut sum, mut sq_re, mut sq_im) = (c(0.0), 0.0, 0.0);
    for _ in 0..samples {
        let scale = (chi.sample(rng) / T_DOF).sqrt();
        let y: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal) / scale).collect();
        let v: Vec<f64> =
            (0..d).map(|i| mode[i] + (0..=i).map(|k| l[i][k] * y[k]).sum::<f64>()).collect();
        let q2: f64 = y.iter().map(|t| t * t).sum();
        let log_q = log_norm - 0.5 * (T_DOF + df) * (1.0 + q2 / T_DOF).ln();
        let wgt = (integrand.log_value(&v) - log_q).exp();
        sum += wgt;
        sq_re += wgt.re * wgt.re;
        sq_im += wgt.im * wgt.im;
    }
    let m = samples as f64;
    let mean = sum / m;
    let var = (sq_re / m - mean.re * mean.re) + (sq_im / m - mean.im * mean.im);
    Ok(McEstimate { value: mean, stderr: (var.max(0.0) / m).sqrt(), samples })
}

// ---------------------------------------------------------------------------
// Elementary identities and the Sklyanin density

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ElementaryReport {
    pub homogeneity_rel_err: f64,
    pub shift_rel_err: f64,
    pub reflection_rel_err: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// Checks `Ψ(ax) = a^{−Σλ}Ψ(x)`, `Ψ_{λ+c}(x) = Πx_i^{−c} Ψ_λ(x)` and
/// `Ψ_λ(x) = Ψ_{−λ}(x')` with `x'_i = 1/x_{n−i+1}`.
pub fn elementary_identity_checks(
    lambda: &[C],
    x: &[f64],
    a: f64,
    shift: C,
    quad: &QuadratureSpec,
) -> Result<ElementaryReport> {
    if x.len() > 3 {
        return Err(GrskError::Usage("elementary identity checks run at n <= 3".into()));
    }
    let base = psi(lambda, x, quad)?.value;
    let ax: Vec<f64> = x.iter().map(|t| a * t).collect();
    let sum: C = lambda.iter().sum();
    let homog = rel(psi(lambda, &ax, quad)?.value, c(a).powc(-sum) * base);
    let shifted: Vec<C> = lambda.iter().map(|l| l + shift).collect();
    let prod: f64 = x.iter().product();
    let shift_err = rel(psi(&shifted, x, quad)?.value, c(prod).powc(-shift) * base);
    let neg: Vec<C> = lambda.iter().map(|l| -l).collect();
    let xr: Vec<f64> = x.iter().rev().map(|t| 1.0 / t).collect();
    let refl = rel(psi(&neg, &xr, quad)?.value, base);
    let tolerance = 1e-6;
    Ok(ElementaryReport {
        homogeneity_rel_err: homog,
        shift_rel_err: shift_err,
        reflection_rel_err: refl,
        tolerance,
        pass: homog.max(shift_err).max(refl) <= tolerance,
    })
}

/// `s_n(λ) = (2πι)^{−n} (n!)^{−1} Π_{i≠j} Γ(λ_i − λ_j)^{−1}`.
pub fn sklyanin_density(lambda: &[C]) -> C {
    let n = lambda.len();
    let mut v = C::new(0.0, 2.0 * PI).powi(-(n as i32)) / (1..=n).map(|k| k as f64).product::<f64>();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                v *= rgamma(lambda[i] - lambda[j]);
            }
        }
    }
    v
}

/// `Ψ²_{(a,−a)}(x)` against `2 K_{2a}(2πy)` with `πy = √(x₂/x₁)`; relative error.
pub fn bessel_relation_error(a: f64, y: f64, quad: &QuadratureSpec) -> Result<f64> {
    let x = [1.0, (PI * y).powi(2)];
    let p = psi(&[c(a), c(-a)], &x, quad)?.value;
    let k = bessel_k(c(2.0 * a), 2.0 * PI * y, quad.tol)?.value;
    Ok(rel(p * y.sqrt(), 2.0 * y.sqrt() * k))
}

// ---------------------------------------------------------------------------
// Gamma-product identities on log grids

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StadeKind {
    Square,
    Rectangular,
    BumpFriedberg,
}

impl std::str::FromStr for StadeKind {
    type Err = GrskError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "square" => Ok(StadeKind::Square),
            "rect" | "rectangular" => Ok(StadeKind::Rectangular),
            "bf" | "bump-friedberg" => Ok(StadeKind::BumpFriedberg),
            _ => Err(GrskError::Usage(format!("unknown identity kind {s:?}"))),
        }
    }
}

/// Real parameters for one identity: `lambda ∈ ℝ^m`, `nu ∈ ℝ^n` (square:
/// `n = m`; rectangular: `n = m + 1`; Bump–Friedberg ignores `nu`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StadeParams {
    pub lambda: Vec<f64>,
    pub nu: Vec<f64>,
    pub gamma: f64,
    pub s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StadeReport {
    pub kind: StadeKind,
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub rel_error: f64,
    /// Quadrature error estimate (step halving plus truncation), relative.
    pub quad_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Pass threshold for an identity on `(ℝ_{>0})^dim`.
pub fn stade_tolerance(kind: StadeKind, dim: usize) -> f64 {
    match (kind, dim) {
        (StadeKind::Rectangular, 2) => 1e-4,
        (_, d) if d <= 2 => 1e-5,
        _ => 1e-3,
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Grid {
    pub(crate) lo: f64,
    pub(crate) h: f64,
    pub(crate) n: usize,
}

impl Grid {
    pub(crate) fn new(lo: f64, hi: f64, h: f64) -> Self {
        Grid { lo, h, n: ((hi - lo) / h).round() as usize + 1 }
    }
    pub(crate) fn u(&self, k: usize) -> f64 {
        self.lo + k as f64 * self.h
    }
    fn hi(&self) -> f64 {
        self.u(self.n - 1)
    }
    pub(crate) fn coarse(&self) -> Self {
        Grid { lo: self.lo, h: 2.0 * self.h, n: (self.n - 1) / 2 + 1 }
    }
}

fn psi1_grid(l: f64, g: &Grid) -> Vec<f64> {
    (0..g.n).map(|a| (-l * g.u(a)).exp()).collect()
}

/// `Ψ²_λ(e^{u_a}, e^{u_b}) = e^{−c(u_a+u_b)} 2K_{2α}(2e^{(u_b−u_a)/2})`, row-major.
pub(crate) fn psi2_grid(l: &[f64], g: &Grid) -> Result<Vec<f64>> {
    let (al, cc) = ((l[0] - l[1]) / 2.0, (l[0] + l[1]) / 2.0);
    let n = g.n;
    let k: Vec<f64> = (0..2 * n - 1)
        .into_par_iter()
        .map(|d| {
            let z = 2.0 * ((d as f64 - (n - 1) as f64) * g.h / 2.0).exp();
            if z > 700.0 {
                return Ok(0.0);
            }
            Ok(2.0 * bessel_k(c(2.0 * al), z, 1e-13)?.value.re)
        })
        .collect::<Result<_>>()?;
    let mut out = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            out[a * n + b] = (-cc * (g.u(a) + g.u(b))).exp() * k[b + n - 1 - a];
        }
    }
    Ok(out)
}

/// `Ψ³_λ` on the cube, by the trapezoid sum of `Q^{3,2}_{λ₃} Ψ²` over the same grid.
fn psi3_grid(l: &[f64], g: &Grid) -> Result<Vec<f64>> {
    let p2 = psi2_grid(&l[..2], g)?;
    let n = g.n;
    let l3 = l[2];
    let h2 = g.h * g.h;
    let slabs: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|b| {
            let ub = g.u(b);
            // B[q][c] = y_q^{λ₃} e^{−y_q/x_b − x_c/y_q},  M = Ψ² B.
            let bm: Vec<f64> = (0..n * n)
                .map(|i| {
                    let (q, cc) = (i / n, i % n);
                    let vq = g.u(q);
                    (l3 * vq - (vq - ub).exp() - (g.u(cc) - vq).exp()).exp()
                })
                .collect();
            let mut m = vec![0.0; n * n];
            for p in 0..n {
                for q in 0..n {
                    let w = p2[p * n + q];
                    if w == 0.0 {
                        continue;
                    }
                    let row = &bm[q * n..(q + 1) * n];
                    for (acc, bv) in m[p * n..(p + 1) * n].iter_mut().zip(row) {
                        *acc += w * bv;
                    }
                }
            }
            let mut slab = vec![0.0; n * n];
            for a in 0..n {
                let ua = g.u(a);
                for p in 0..n {
                    let vp = g.u(p);
                    let av = (l3 * vp - (vp - ua).exp() - (ub - vp).exp()).exp();
                    if av == 0.0 {
                        continue;
                    }
                    for (acc, mv) in slab[a * n..(a + 1) * n].iter_mut().zip(&m[p * n..(p + 1) * n]) {
                        *acc += av * mv;
                    }
                }
                for cc in 0..n {
                    slab[a * n + cc] *= h2 * (-l3 * (ua + ub + g.u(cc))).exp();
                }
            }
            slab
        })
        .collect();
    // slabs[b][a*n + c] → index (a, b, c).
    let mut out = vec![0.0; n * n * n];
    for (b, slab) in slabs.iter().enumerate() {
        for a in 0..n {
            for cc in 0..n {
                out[(a * n + b) * n + cc] = slab[a * n + cc];
            }
        }
    }
    Ok(out)
}

fn psi_grid(l: &[f64], g: &Grid) -> Result<Vec<f64>> {
    match l.len() {
        1 => Ok(psi1_grid(l[0], g)),
        2 => psi2_grid(l, g),
        3 => psi3_grid(l, g),
        n => Err(GrskError::Usage(format!("grid Whittaker functions run at n <= 3, got {n}"))),
    }
}

/// `Ψ^m_{ν;s}` on the grid for `ν ∈ ℝ^{m+1}`, `m ≤ 2`.
fn psi_s1_grid(nu: &[f64], s: f64, g: &Grid) -> Result<Vec<f64>> {
    let n = g.n;
    let m = nu.len() - 1;
    let top = nu[m];
    let base = psi_grid(&nu[..m], g)?;
    let es: Vec<f64> = (0..n).map(|q| (-s * (-g.u(q)).exp()).exp()).collect();
    match m {
        1 => Ok((0..n)
            .map(|a| {
                let ua = g.u(a);
                g.h * (0..n)
                    .map(|q| {
                        let vq = g.u(q);
                        (top * (vq - ua) - (vq - ua).exp()).exp() * es[q] * base[q]
                    })
                    .sum::<f64>()
            })
            .collect()),
        2 => {
            let rows: Vec<Vec<f64>> = (0..n)
                .into_par_iter()
                .map(|b| {
                    let ub = g.u(b);
                    // D[p] = Σ_q y_q^{ν₃} e^{−y_q/x_b − s/y_q} Ψ²(y_p, y_q).
                    let dq: Vec<f64> = (0..n)
                        .map(|q| {
                            let vq = g.u(q);
                            (top * vq - (vq - ub).exp()).exp() * es[q]
                        })
                        .collect();
                    let d: Vec<f64> = (0..n)
                        .map(|p| (0..n).map(|q| dq[q] * base[p * n + q]).sum())
                        .collect();
                    (0..n)
                        .map(|a| {
                            let ua = g.u(a);
                            let sum: f64 = (0..n)
                                .map(|p| {
                                    let vp = g.u(p);
                                    (top * vp - (vp - ua).exp() - (ub - vp).exp()).exp() * d[p]
                                })
                                .sum();
                            g.h * g.h * (-top * (ua + ub)).exp() * sum
                        })
                        .collect()
                })
                .collect();
            let mut out = vec![0.0; n * n];
            for (b, r) in rows.iter().enumerate() {
                for a in 0..n {
                    out[a * n + b] = r[a];
                }
            }
            Ok(out)
        }
        _ => Err(GrskError::Usage("rectangular identity runs at m <= 2".into())),
    }
}

struct GridSum {
    value: f64,
    /// Relative mass on the low and high faces of the box.
    face_lo: f64,
    face_hi: f64,
}

fn grid_integrate(
    kind: StadeKind,
    p: &StadeParams,
    dim: usize,
    g: &Grid,
) -> Result<GridSum> {
    let n = g.n;
    let weights: Vec<f64> = match kind {
        StadeKind::Square => {
            let a = psi_grid(&p.nu, g)?;
            let b = psi_grid(&p.lambda, g)?;
            a.iter().zip(&b).map(|(x, y)| x * y).collect()
        }
        StadeKind::Rectangular => {
            let a = psi_s1_grid(&p.nu, p.s, g)?;
            let b = psi_grid(&p.lambda, g)?;
            a.iter().zip(&b).map(|(x, y)| x * y).collect()
        }
        StadeKind::BumpFriedberg => psi_grid(&p.lambda, g)?,
    };
    let (mut total, mut lo, mut hi) = (0.0, 0.0, 0.0);
    let mut idx = vec![0usize; dim];
    for w in weights.iter() {
        let un = g.u(idx[dim - 1]);
        let mut f = *w;
        if kind != StadeKind::Rectangular {
            f *= (-p.s * (-un).exp()).exp();
        }
        if kind == StadeKind::BumpFriedberg {
            // f(x) = Π x_i^{(−1)^i}.
            let lf: f64 = idx
                .iter()
                .enumerate()
                .map(|(i, &k)| if i % 2 == 0 { -g.u(k) } else { g.u(k) })
                .sum();
            f *= (p.gamma * lf).exp();
        }
        total += f;
        if idx.contains(&0) {
            lo += f.abs();
        }
        if idx.contains(&(n - 1)) {
            hi += f.abs();
        }
        for k in (0..dim).rev() {
            idx[k] += 1;
            if idx[k] < n {
                break;
            }
            idx[k] = 0;
        }
    }
    let vol = g.h.powi(dim as i32);
    let scale = total.abs().max(1e-300);
    Ok(GridSum { value: total * vol, face_lo: lo / scale, face_hi: hi / scale })
}

/// Exact right-hand side of the identity.
pub fn stade_rhs(kind: StadeKind, p: &StadeParams) -> f64 {
    let g = |z: f64| gamma(c(z)).re;
    let s = p.s;
    match kind {
        StadeKind::Square | StadeKind::Rectangular => {
            let m = p.lambda.len();
            let exp: f64 = (0..m).map(|i| p.nu[i] + p.lambda[i]).sum();
            let prod: f64 = p.nu.iter().flat_map(|a| p.lambda.iter().map(move |b| g(a + b))).product();
            s.powf(-exp) * prod
        }
        StadeKind::BumpFriedberg => {
            let n = p.lambda.len();
            let l = &p.lambda;
            let cn = if n % 2 == 0 { 1.0 } else { s.powf(-p.gamma) };
            let mut prod: f64 = l.iter().map(|a| g(a + p.gamma)).product();
            for i in 0..n {
                for j in i + 1..n {
                    prod *= g(l[i] + l[j]);
                }
            }
            cn * s.powf(-l.iter().sum::<f64>()) * prod
        }
    }
}

fn stade_admissible(kind: StadeKind, p: &StadeParams) -> Result<usize> {
    let m = p.lambda.len();
    let bad = |msg: &str| Err(GrskError::Usage(format!("{kind:?} identity: {msg}")));
    if !(p.s > 0.0) {
        return bad("needs s > 0");
    }
    match kind {
        StadeKind::Square | StadeKind::Rectangular => {
            let want = if kind == StadeKind::Square { m } else { m + 1 };
            let cap = if kind == StadeKind::Square { 3 } else { 2 };
            if m == 0 || m > cap || p.nu.len() != want {
                return bad(&format!("needs 1 <= m <= {cap} and nu of length {want}"));
            }
            if p.nu.iter().any(|a| p.lambda.iter().any(|b| !(a + b > 0.0))) {
                return bad("needs nu_i + lambda_j > 0");
            }
        }
        StadeKind::BumpFriedberg => {
            if m == 0 || m > 3 {
                return bad("needs 1 <= n <= 3");
            }
            if p.lambda.iter().any(|a| !(a + p.gamma > 0.0)) {
                return bad("needs lambda_i + gamma > 0");
            }
            for i in 0..m {
                for j in i + 1..m {
                    if !(p.lambda[i] + p.lambda[j] > 0.0) {
                        return bad("needs lambda_i + lambda_j > 0");
                    }
                }
            }
        }
    }
    Ok(m)
}

/// LHS by trapezoid sums on a uniform log grid (step halving for the error
/// estimate, box grown until the face mass is negligible) against the RHS.
pub fn stade_identity_check(
    kind: StadeKind,
    p: &StadeParams,
    quad: &QuadratureSpec,
) -> Result<StadeReport> {
    quad.validate()?;
    let dim = stade_admissible(kind, p)?;
    let h = if dim == 3 { 0.4 } else { 0.2 };
    let ls = p.s.ln();
    let (mut lo, mut hi) = (ls - 16.0, ls + 26.0);
    let mut attempt = 0;
    let (fine, grid) = loop {
        let mut grid = Grid::new(lo, hi, h);
        if grid.n < quad.points {
            grid = Grid::new(lo, hi, (hi - lo) / (quad.points - 1) as f64);
        }
        let r = grid_integrate(kind, p, dim, &grid)?;
        let grow_lo = r.face_lo > 1e-10;
        let grow_hi = r.face_hi > 1e-10;
        if !(grow_lo || grow_hi) || attempt == 3 {
            break (r, grid);
        }
        if grow_lo {
            lo -= 8.0;
        }
        if grow_hi {
            hi += 12.0;
        }
        attempt += 1;
    };
    let coarse = grid_integrate(kind, p, dim, &grid.coarse())?;
    debug_assert!((grid.coarse().hi() - grid.hi()).abs() <= grid.h + 1e-9);
    let rhs = stade_rhs(kind, p);
    let trunc = (fine.face_lo + fine.face_hi) * 3.0 / grid.h;
    let quad_error = (fine.value - coarse.value).abs() / fine.value.abs() + trunc;
    let rel_error = (fine.value - rhs).abs() / rhs.abs();
    let tolerance = stade_tolerance(kind, dim);
    Ok(StadeReport {
        kind,
        n: dim,
        lhs: fine.value,
        rhs,
        rel_error,
        quad_error,
        tolerance,
        pass: rel_error <= tolerance,
    })
}

/// Admissible real parameters for `kind` on `(ℝ_{>0})^dim`.
pub fn random_stade_params<R: Rng + ?Sized>(kind: StadeKind, dim: usize, rng: &mut R) -> StadeParams {
    let mut draw = |k: usize| (0..k).map(|_| rng.random_range(0.4..1.6)).collect::<Vec<f64>>();
    let lambda = draw(dim);
    let nu = match kind {
        StadeKind::Square => draw(dim),
        StadeKind::Rectangular => draw(dim + 1),
        StadeKind::BumpFriedberg => Vec::new(),
    };
    StadeParams { lambda, nu, gamma: rng.random_range(0.3..1.2), s: rng.random_range(0.5..2.0) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::exp_sinh;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn cv(v: &[f64]) -> Vec<C> {
        v.iter().map(|&t| c(t)).collect()
    }

    #[test]
    fn gamma_values() {
        assert!((gamma(c(0.5)).re - PI.sqrt()).abs() < 1e-13);
        assert!((gamma(c(5.0)).re - 24.0).abs() < 1e-11);
        assert!((gamma(c(-0.5)).re + 2.0 * PI.sqrt()).abs() < 1e-12);
        // |Γ(iy)|² = π / (y sinh πy).
        let y: f64 = 0.7;
        let g = gamma(C::new(0.0, y));
        assert!((g.norm_sqr() - PI / (y * (PI * y).sinh())).abs() < 1e-12);
        assert_eq!(rgamma(c(-2.0)), c(0.0));
        assert!((rgamma(c(3.0)).re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn bessel_values() {
        let k = bessel_k(c(0.5), 1.0, 1e-13).unwrap().value;
        assert!((k.re - (PI / 2.0).sqrt() * (-1.0f64).exp()).abs() < 1e-13);
        assert!((k.re - 0.461069).abs() < 1e-6);
        // K₀(2) from the ascending series.
        let series: f64 = (0..30)
            .map(|k| {
                let f = (1..=k).map(|j| j as f64).product::<f64>();
                let hk: f64 = (1..=k).map(|j| 1.0 / j as f64).sum();
                (1.0 / (f * f)) * (hk - (1.0f64).ln() - 0.577_215_664_901_532_9)
            })
            .sum();
        let k0 = bessel_k(c(0.0), 2.0, 1e-13).unwrap().value.re;
        assert!((k0 - series).abs() < 1e-12);
        assert!((k0 - 0.113894).abs() < 1e-6);
        let a = bessel_k(C::new(0.3, 0.8), 1.7, 1e-13).unwrap().value;
        let b = bessel_k(C::new(-0.3, -0.8), 1.7, 1e-13).unwrap().value;
        assert!((a - b).norm() < 1e-13);
    }

    #[test]
    fn kernels() {
        let (x, y, l) = (2.0, 3.0, c(0.7));
        let k = q_kernel(1, l, &[x], &[y]).unwrap();
        assert!((k.re - (y / x).powf(0.7) * (-y / x).exp()).abs() < 1e-14);
        let k = q_kernel_down(2, l, &[1.5, 2.5], &[0.8]).unwrap();
        let want = (0.8f64 / 3.75).powf(0.7) * (-0.8f64 / 1.5 - 2.5 / 0.8).exp();
        assert!((k.re - want).abs() < 1e-14);
        assert!(q_kernel(3, c(-0.4), &[1.0, 2.0, 3.0], &[0.5, 0.5, 4.0]).unwrap().re > 0.0);
        assert!(q_kernel_down(1, l, &[1.0], &[]).is_err());
    }

    #[test]
    fn psi_small_n() {
        let p = psi(&[C::new(0.3, 0.2)], &[2.0], &q()).unwrap().value;
        assert!((p - c(2.0).powc(-C::new(0.3, 0.2))).norm() < 1e-15);
        let p = psi(&[c(0.0), c(0.0)], &[1.0, 1.0], &q()).unwrap().value;
        let k0 = bessel_k(c(0.0), 2.0, 1e-13).unwrap().value.re;
        assert!((p.re - 2.0 * k0).abs() < 1e-11);
        assert!((p.re - 0.2278).abs() < 1e-4);
        assert!(psi(&[c(0.0); 5], &[1.0; 5], &q()).is_err());
    }

    #[test]
    fn psi_symmetric_in_lambda() {
        let x = [2.0, 0.7, 0.4];
        let base = psi(&cv(&[0.2, -0.3, 0.5]), &x, &q()).unwrap();
        for perm in [[0.5, -0.3, 0.2], [-0.3, 0.2, 0.5]] {
            let v = psi(&cv(&perm), &x, &q()).unwrap().value;
            assert!(rel(v, base.value) < 1e-6, "{v} vs {}", base.value);
        }
        let a = psi(&[C::new(0.3, 0.4), c(-0.2)], &[1.3, 0.6], &q()).unwrap().value;
        let b = psi(&[c(-0.2), C::new(0.3, 0.4)], &[1.3, 0.6], &q()).unwrap().value;
        assert!(rel(a, b) < 1e-8);
    }

    #[test]
    fn tolerance_halving_is_self_consistent() {
        let l = cv(&[0.4, -0.1]);
        let a = psi(&l, &[1.2, 0.5], &QuadratureSpec::with_tol(1e-6)).unwrap();
        let b = psi(&l, &[1.2, 0.5], &QuadratureSpec::with_tol(5e-7)).unwrap();
        assert!((a.value - b.value).norm() <= a.error.max(1e-15));
    }

    #[test]
    fn bessel_relation_grid() {
        for a in [0.0, 0.25, 0.5, 0.9, 1.3] {
            for y in [0.1, 0.2, 0.4, 0.7, 1.0] {
                let e = bessel_relation_error(a, y, &QuadratureSpec::with_tol(1e-12)).unwrap();
                assert!(e < 1e-8, "a = {a}, y = {y}: {e}");
            }
        }
    }

    #[test]
    fn psi_s_cases() {
        let l = cv(&[0.3, -0.2]);
        let x = [1.4, 0.6];
        let s = c(0.8);
        let a = psi_s(&l, s, &x, &q()).unwrap().value;
        let b = psi(&l, &x, &q()).unwrap().value;
        assert!(rel(a / b, (-s / 0.6).exp()) < 1e-12);
        // n = 1, k = 1 against a direct integral in y.
        let (l1, l2, x1, s1) = (0.4, 0.9, 1.7, 1.3);
        let v = psi_s(&cv(&[l1, l2]), c(s1), &[x1], &q()).unwrap().value;
        let direct = exp_sinh(
            |y: f64| (y / x1).powf(l2) * (-y / x1).exp() * y.powf(-l1) * (-s1 / y).exp() / y,
            0.0,
            1e-12,
        )
        .unwrap()
        .value;
        assert!(rel(v, c(direct)) < 1e-9);
        // Off s = 1 the symmetric quantity is s^{λ₁} Ψ_{λ;s}.
        let w = psi_s(&cv(&[l2, l1]), c(s1), &[x1], &q()).unwrap().value;
        assert!(rel(v * s1.powf(l1), w * s1.powf(l2)) < 1e-8);
        assert!(rel(v, w) > 1e-3);
        let a = psi_s(&cv(&[l1, l2]), c(1.0), &[x1], &q()).unwrap().value;
        let b = psi_s(&cv(&[l2, l1]), c(1.0), &[x1], &q()).unwrap().value;
        assert!(rel(a, b) < 1e-8);
        assert!(psi_s(&cv(&[l1, l2]), c(-1.0), &[x1], &q()).is_err());
    }

    #[test]
    fn psi_s_swaps_first_and_last() {
        let x = [1.1, 0.7];
        let a = psi_s(&cv(&[0.6, 0.2, 0.9]), c(1.0), &x, &q()).unwrap().value;
        let b = psi_s(&cv(&[0.9, 0.2, 0.6]), c(1.0), &x, &q()).unwrap().value;
        assert!(rel(a, b) < 1e-8);
        let s = 1.6f64;
        let a = psi_s(&cv(&[0.6, 0.2, 0.9]), c(s), &x, &q()).unwrap().value * s.powf(0.8);
        let b = psi_s(&cv(&[0.9, 0.2, 0.6]), c(s), &x, &q()).unwrap().value * s.powf(1.1);
        assert!(rel(a, b) < 1e-8);
    }

    #[test]
    fn pattern_monte_carlo() {
        let mut g = ChaCha8Rng::seed_from_u64(41);
        let one = psi_pattern_mc(1, &[c(0.7)], c(0.5), &[1.3], 10, &mut g).unwrap();
        assert!(rel(one.value, c(1.3f64.powf(-0.7) * (-0.5f64 / 1.3).exp())) < 1e-14);
        for (h, lam, x) in [
            (2, vec![0.4, 0.9], vec![1.7]),
            (2, vec![0.3, -0.2], vec![1.4, 0.6]),
            (3, vec![0.6, 0.2, 0.9], vec![1.1, 0.7]),
        ] {
            let l = cv(&lam);
            let mc = psi_pattern_mc(h, &l, c(1.0), &x, 40_000, &mut g).unwrap();
            let exact = psi_s(&l, c(1.0), &x, &q()).unwrap().value;
            let z = (mc.value - exact).norm() / mc.stderr;
            assert!(z < 3.0, "h = {h}, x = {x:?}: {} vs {exact}, z = {z}", mc.value);
        }
    }

    #[test]
    fn elementary_identities() {
        let r = elementary_identity_checks(&[c(0.4)], &[1.7], 2.0, c(0.3), &q()).unwrap();
        assert!(r.homogeneity_rel_err.max(r.shift_rel_err).max(r.reflection_rel_err) < 1e-14);
        let r = elementary_identity_checks(&cv(&[0.3, -0.1]), &[1.2, 0.5], 2.0, c(0.25), &q()).unwrap();
        assert!(r.homogeneity_rel_err < 1e-8 && r.pass, "{r:?}");
        let r = elementary_identity_checks(&cv(&[0.3, -0.1, 0.2]), &[1.5, 0.8, 0.6], 1.5, c(0.2), &q())
            .unwrap();
        assert!(r.reflection_rel_err < 1e-5 && r.pass, "{r:?}");
    }

    #[test]
    fn sklyanin_values() {
        let s1 = sklyanin_density(&[C::new(0.3, 0.1)]);
        assert!((s1 - 1.0 / C::new(0.0, 2.0 * PI)).norm() < 1e-15);
        let t = 0.6;
        let s2 = sklyanin_density(&[C::new(0.0, t), C::new(0.0, -t)]);
        let prod = s2 * C::new(0.0, 2.0 * PI).powi(2) * 2.0;
        let want = 1.0 / gamma(C::new(0.0, 2.0 * t)).norm_sqr();
        assert!((prod - c(want)).norm() < 1e-12);
        let l = [C::new(0.1, 0.2), C::new(-0.3, 0.5), C::new(0.4, -0.1)];
        let p = [l[2], l[0], l[1]];
        assert!((sklyanin_density(&l) - sklyanin_density(&p)).norm() < 1e-14);
    }

    #[test]
    fn stade_small_cases() {
        let p = StadeParams { lambda: vec![0.7], nu: vec![0.9], gamma: 0.0, s: 1.3 };
        let r = stade_identity_check(StadeKind::Square, &p, &q()).unwrap();
        assert!(r.pass, "{r:?}");
        let p = StadeParams { lambda: vec![0.5, 1.5], nu: vec![1.0, 2.0], gamma: 0.0, s: 1.0 };
        let rhs = 0.886_226_925_452_758 * 1.329_340_388_179_137f64.powi(2) * 3.323_350_970_447_843;
        assert!((stade_rhs(StadeKind::Square, &p) - rhs).abs() < 1e-12);
        let r = stade_identity_check(StadeKind::Square, &p, &q()).unwrap();
        assert!(r.pass, "{r:?}");
        let p = StadeParams { lambda: vec![1.0, 2.0], nu: vec![], gamma: 0.5, s: 1.0 };
        let rhs = 0.886_226_925_452_758 * 1.329_340_388_179_137 * 2.0;
        assert!((stade_rhs(StadeKind::BumpFriedberg, &p) - rhs).abs() < 1e-12);
        let r = stade_identity_check(StadeKind::BumpFriedberg, &p, &q()).unwrap();
        assert!(r.pass, "{r:?}");
        let p = StadeParams { lambda: vec![0.8], nu: vec![0.6, 1.1], gamma: 0.0, s: 0.7 };
        let r = stade_identity_check(StadeKind::Rectangular, &p, &q()).unwrap();
        assert!(r.pass, "{r:?}");
        let bad = StadeParams { lambda: vec![-0.8], nu: vec![0.6], gamma: 0.0, s: 1.0 };
        assert!(stade_identity_check(StadeKind::Square, &bad, &q()).is_err());
    }
}
