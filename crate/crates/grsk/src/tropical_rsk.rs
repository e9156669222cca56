//! The tropical (max-plus) RSK map `U`, last-passage oracles, Gelfand–Tsetlin
//! checks, the tropicalization limit of `T`, and the functions `J_λ`.

use std::ops::{Add, Div, Mul, Sub};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{GrskError, Result};
use crate::exact_numerics::Scalar;
use crate::grsk_core::{
    apply_grsk, disjoint_tuple_sum, enumerate_paths, grsk_moves, patterns_from_matrix, Pattern,
    WeightMatrix, PATH_ORACLE_MAX,
};
use crate::quadrature::{exp_sinh, tanh_sinh};

/// Real-valued matrix; entries may be any sign.
pub type RealMatrix<T> = WeightMatrix<T>;

/// Scalars the max-plus moves run over (`f64` or exact rationals).
pub trait TropicalScalar:
    Clone + PartialOrd + Add<Output = Self> + Sub<Output = Self>
{
    fn tzero() -> Self;
}

impl TropicalScalar for f64 {
    fn tzero() -> Self {
        0.0
    }
}

impl TropicalScalar for num_rational::BigRational {
    fn tzero() -> Self {
        <num_rational::BigRational as num_traits::Zero>::zero()
    }
}

fn tmin<T: TropicalScalar>(a: T, b: T) -> T {
    if b < a {
        b
    } else {
        a
    }
}

fn tmax<T: TropicalScalar>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}

fn tl<T: TropicalScalar>(y: &mut RealMatrix<T>, i: usize, j: usize, inverse: bool) {
    match (i, j) {
        (1, 1) => {}
        (1, _) | (_, 1) => {
            let prev = if i == 1 { y.get(1, j - 1) } else { y.get(i - 1, 1) }.clone();
            let cur = y.get(i, j).clone();
            y.set(i, j, if inverse { cur - prev } else { prev + cur });
        }
        _ => {
            let a = y.get(i - 1, j - 1).clone();
            let b = y.get(i - 1, j).clone();
            let c = y.get(i, j - 1).clone();
            let d = y.get(i, j).clone();
            y.set(i - 1, j - 1, tmin(b.clone(), c.clone()) - a);
            let hi = tmax(b, c);
            y.set(i, j, if inverse { d - hi } else { d + hi });
        }
    }
}

fn check_index<T>(y: &RealMatrix<T>, i: usize, j: usize) -> Result<()>
where
    T: Clone,
{
    if i == 0 || j == 0 || i > y.rows() || j > y.cols() {
        return Err(GrskError::Usage(format!("index ({i}, {j}) outside the matrix")));
    }
    Ok(())
}

pub fn tropical_local_move<T: TropicalScalar>(
    y: &RealMatrix<T>,
    i: usize,
    j: usize,
) -> Result<RealMatrix<T>> {
    check_index(y, i, j)?;
    let mut z = y.clone();
    tl(&mut z, i, j, false);
    Ok(z)
}

pub fn tropical_local_move_inverse<T: TropicalScalar>(
    y: &RealMatrix<T>,
    i: usize,
    j: usize,
) -> Result<RealMatrix<T>> {
    check_index(y, i, j)?;
    let mut z = y.clone();
    tl(&mut z, i, j, true);
    Ok(z)
}

/// The Berenstein–Kirillov map `U`, same move order as `T`.
pub fn apply_tropical<T: TropicalScalar>(y: &RealMatrix<T>) -> RealMatrix<T> {
    let mut u = y.clone();
    for (i, j) in grsk_moves(y.rows(), y.cols()) {
        tl(&mut u, i, j, false);
    }
    u
}

pub fn invert_tropical<T: TropicalScalar>(u: &RealMatrix<T>) -> RealMatrix<T> {
    let mut y = u.clone();
    for &(i, j) in grsk_moves(u.rows(), u.cols()).iter().rev() {
        tl(&mut y, i, j, true);
    }
    y
}

/// Maximum over non-intersecting `r`-tuples of paths from `(1,1), …, (1,r)`
/// to `(n,k-r+1), …, (n,k)` of the sum of visited entries.
pub fn last_passage_oracle<T: TropicalScalar>(y: &RealMatrix<T>, k: usize, r: usize) -> Result<T> {
    let (n, m) = (y.rows(), y.cols());
    if n + m > PATH_ORACLE_MAX {
        return Err(GrskError::Usage(format!(
            "path oracle refuses n + m = {} > {PATH_ORACLE_MAX}",
            n + m
        )));
    }
    if k == 0 || k > m || r == 0 || r > n.min(k) {
        return Err(GrskError::Usage(format!("invalid (k, r) = ({k}, {r}) for {n}x{m}")));
    }
    let all = |_: usize, _: usize| true;
    let families: Vec<Vec<u128>> =
        (1..=r).map(|c| enumerate_paths(m, (1, c), (n, k - r + c), &all)).collect();
    let weight = |mask: u128| {
        let mut s = T::tzero();
        let mut bits = mask;
        while bits != 0 {
            let idx = bits.trailing_zeros() as usize;
            s = s + y.entries()[idx].clone();
            bits &= bits - 1;
        }
        s
    };
    disjoint_tuple_sum(&families, &weight, &|a, b| tmax(a, b), T::tzero())
        .ok_or_else(|| GrskError::Domain("no non-intersecting path tuple".into()))
}

/// `u_{n-r+1,k-r+1} + … + u_nk`.
pub fn tropical_path_sum<T: TropicalScalar>(u: &RealMatrix<T>, k: usize, r: usize) -> T {
    let n = u.rows();
    (0..r).fold(T::tzero(), |acc, q| acc + u.get(n - q, k - q).clone())
}

/// Generalized Gelfand–Tsetlin test: `r_pp >= 0` and
/// `r_{i+1,j+1} <= r_ij <= r_{i+1,j}`, with `r_{i+1,p+1} = 0` once rows are full.
pub fn is_gelfand_tsetlin<T: TropicalScalar>(r: &Pattern<T>) -> bool {
    let p = r.width();
    let h = r.height();
    if h >= p && *r.z(p, p) < T::tzero() {
        return false;
    }
    for i in 1..h {
        for j in 1..=i.min(p) {
            let x = r.z(i, j);
            let upper = r.z(i + 1, j);
            let lower = if j < p || i + 1 <= p { r.z(i + 1, j + 1).clone() } else { T::tzero() };
            if !(lower <= *x && *x <= *upper) {
                return false;
            }
        }
    }
    true
}

/// Both output patterns of `U(Y)` are Gelfand–Tsetlin.
pub fn gt_membership_check<T: TropicalScalar>(y: &RealMatrix<T>) -> bool
where
    T: PartialEq,
{
    let pq = patterns_from_matrix(&apply_tropical(y));
    is_gelfand_tsetlin(&pq.p) && is_gelfand_tsetlin(&pq.q)
}

// ---------------------------------------------------------------------------
// Tropicalization of the geometric map

/// Positive real stored as its logarithm: products add, sums are log-sum-exp.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogF64(pub f64);

impl Add for LogF64 {
    type Output = LogF64;
    fn add(self, rhs: Self) -> Self {
        let (hi, lo) = if self.0 >= rhs.0 { (self.0, rhs.0) } else { (rhs.0, self.0) };
        LogF64(hi + (lo - hi).exp().ln_1p())
    }
}

impl Mul for LogF64 {
    type Output = LogF64;
    fn mul(self, rhs: Self) -> Self {
        LogF64(self.0 + rhs.0)
    }
}

impl Div for LogF64 {
    type Output = LogF64;
    fn div(self, rhs: Self) -> Self {
        LogF64(self.0 - rhs.0)
    }
}

impl Scalar for LogF64 {
    fn from_i64(v: i64) -> Self {
        LogF64((v as f64).ln())
    }

    fn is_positive(&self) -> bool {
        !self.0.is_nan()
    }
}

/// `ε log T(e^{Y/ε})`, in plain floats for `ε >= 1e-2` when that stays
/// finite, otherwise in the log domain.
pub fn scaled_log_grsk(y: &RealMatrix<f64>, eps: f64) -> RealMatrix<f64> {
    if eps >= 1e-2 {
        let t = apply_grsk(&y.map(|v| (v / eps).exp()));
        if t.entries().iter().all(|v| v.is_finite() && *v > 0.0) {
            return t.map(|v| eps * v.ln());
        }
    }
    apply_grsk(&y.map(|v| LogF64(v / eps))).map(|v| eps * v.0)
}

#[derive(Clone, Debug)]
pub struct TropicalizationReport {
    pub eps: Vec<f64>,
    pub max_err: Vec<f64>,
    /// Errors decrease (up to 1e-9 float noise) along the ε list.
    pub decreasing: bool,
}

pub fn tropicalization_limit_check(
    y: &RealMatrix<f64>,
    eps_list: &[f64],
) -> Result<TropicalizationReport> {
    if eps_list.is_empty() || eps_list.iter().any(|&e| !(e > 0.0)) {
        return Err(GrskError::Usage("ε list must be nonempty and positive".into()));
    }
    let u = apply_tropical(y);
    let max_err: Vec<f64> = eps_list
        .iter()
        .map(|&eps| {
            let s = scaled_log_grsk(y, eps);
            s.entries().iter().zip(u.entries()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        })
        .collect();
    let decreasing = max_err.windows(2).all(|w| w[1] <= w[0] + 1e-9);
    Ok(TropicalizationReport { eps: eps_list.to_vec(), max_err, decreasing })
}

// ---------------------------------------------------------------------------
// J_λ and its Cauchy identity

/// Determinant by cofactor expansion. Division-free, so entries that
/// underflow to subnormals cannot produce 0/0.
pub fn det_complex(a: &[Vec<Complex64>]) -> Complex64 {
    fn rec(a: &[Vec<Complex64>], cols: &mut Vec<usize>) -> Complex64 {
        let row = a.len() - cols.len();
        if cols.is_empty() {
            return Complex64::new(1.0, 0.0);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..cols.len() {
            let c = cols.remove(k);
            let minor = rec(a, cols);
            cols.insert(k, c);
            let term = a[row][c] * minor;
            acc = if k % 2 == 0 { acc + term } else { acc - term };
        }
        acc
    }
    rec(a, &mut (0..a.len()).collect())
}

/// `J_λ(x) = det(e^{-λ_i x_j}) / Π_{i>j}(λ_i - λ_j)`.
pub fn j_lambda(x: &[f64], lambda: &[Complex64]) -> Result<Complex64> {
    let n = x.len();
    if lambda.len() != n || n == 0 {
        return Err(GrskError::Usage("J_λ needs as many parameters as variables".into()));
    }
    let mut delta = Complex64::new(1.0, 0.0);
    for i in 0..n {
        for j in 0..i {
            let d = lambda[i] - lambda[j];
            if d.norm() == 0.0 {
                return Err(GrskError::Domain("repeated λ (confluent J_λ is not supported)".into()));
            }
            delta *= d;
        }
    }
    let m: Vec<Vec<Complex64>> =
        lambda.iter().map(|l| x.iter().map(|&xj| (-l * xj).exp()).collect()).collect();
    Ok(det_complex(&m) / delta)
}

#[derive(Clone, Debug)]
pub struct CauchyReport {
    pub integral: Complex64,
    pub expected: Complex64,
    pub rel_err: f64,
    pub passed: bool,
}

/// `∫_{x_1 >= x_2 >= 0} J_ν J_λ dx = Π (ν_i + λ_j)^{-1}` (also `n = m = 1`).
pub fn tropical_cauchy_check(nu: &[Complex64], lambda: &[Complex64]) -> Result<CauchyReport> {
    let n = nu.len();
    if n != lambda.len() || !(1..=2).contains(&n) {
        return Err(GrskError::Usage("Cauchy check implemented for n = m ∈ {1, 2}".into()));
    }
    if nu.iter().any(|a| lambda.iter().any(|b| (a + b).re <= 0.0)) {
        return Err(GrskError::Domain("need Re(ν_i + λ_j) > 0".into()));
    }
    let tol = 1e-11;
    let f = |x: &[f64]| -> Complex64 {
        j_lambda(x, nu).expect("validated") * j_lambda(x, lambda).expect("validated")
    };
    let integral = if n == 1 {
        exp_sinh(|x| f(&[x]), 0.0, tol)?.value
    } else {
        // x_2 = t, x_1 = t + u.
        let inner_err = std::cell::RefCell::new(None);
        let outer = exp_sinh(
            |t| match exp_sinh(|u| f(&[t + u, t]), 0.0, tol) {
                Ok(r) => r.value,
                Err(e) => {
                    inner_err.borrow_mut().get_or_insert(e.to_string());
                    Complex64::new(f64::NAN, 0.0)
                }
            },
            0.0,
            tol,
        );
        if let Some(e) = inner_err.into_inner() {
            return Err(GrskError::Domain(e));
        }
        outer?.value
    };
    let expected = nu
        .iter()
        .flat_map(|a| lambda.iter().map(move |b| a + b))
        .fold(Complex64::new(1.0, 0.0), |acc, s| acc / s);
    let rel_err = (integral - expected).norm() / expected.norm();
    Ok(CauchyReport { integral, expected, rel_err, passed: rel_err <= 1e-6 })
}

// ---------------------------------------------------------------------------
// Exponential last passage and the Laguerre ensemble

/// Marginal density of `x_1` under `Π(a_i+b_j) J_a(x) J_b(x) dx` on `x_1 >= x_2 >= 0`.
pub fn laguerre_marginal_density(a: &[f64; 2], b: &[f64; 2], x1: f64) -> Result<f64> {
    if x1 <= 0.0 {
        return Ok(0.0);
    }
    let c: f64 = a.iter().flat_map(|ai| b.iter().map(move |bj| ai + bj)).product();
    let ac = [Complex64::new(a[0], 0.0), Complex64::new(a[1], 0.0)];
    let bc = [Complex64::new(b[0], 0.0), Complex64::new(b[1], 0.0)];
    let inner = tanh_sinh(
        |x2| (j_lambda(&[x1, x2], &ac).unwrap() * j_lambda(&[x1, x2], &bc).unwrap()).re,
        0.0,
        x1,
        1e-10,
    )?;
    Ok(c * inner.value)
}

#[derive(Clone, Debug)]
pub struct LaguerreReport {
    pub samples: usize,
    pub ks_distance: f64,
    pub ks_threshold: f64,
    pub mc_mean: f64,
    pub mc_stderr: f64,
    pub quad_mean: f64,
    pub passed: bool,
}

/// Grid used for the quadrature CDF of the marginal.
const CDF_GRID: usize = 6000;

/// Sample `Y` with independent `Exp(a_i + b_j)` entries, compute `u_22`, and
/// compare against the `x_1`-marginal of the Laguerre ensemble.
pub fn laguerre_marginal_check<R: Rng + ?Sized>(
    a: &[f64; 2],
    b: &[f64; 2],
    samples: usize,
    rng: &mut R,
) -> Result<LaguerreReport> {
    if a.iter().any(|ai| b.iter().any(|bj| ai + bj <= 0.0)) {
        return Err(GrskError::Domain("need a_i + b_j > 0".into()));
    }
    if samples < 100 {
        return Err(GrskError::Usage("need at least 100 samples".into()));
    }
    let dists: Vec<Exp<f64>> = (0..4)
        .map(|k| Exp::new(a[k / 2] + b[k % 2]).map_err(|e| GrskError::Domain(e.to_string())))
        .collect::<Result<_>>()?;
    let mut u: Vec<f64> = (0..samples)
        .map(|_| {
            let y = RealMatrix::from_fn(2, 2, |i, j| dists[2 * (i - 1) + (j - 1)].sample(rng));
            *apply_tropical(&y).get(2, 2)
        })
        .collect();
    u.sort_by(f64::total_cmp);
    let mc_mean = u.iter().sum::<f64>() / samples as f64;
    let var = u.iter().map(|v| (v - mc_mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
    let mc_stderr = (var / samples as f64).sqrt();

    // Density on a uniform grid; the slowest tail rate is min(a_i + b_j).
    let rate = a.iter().flat_map(|ai| b.iter().map(move |bj| ai + bj)).fold(f64::MAX, f64::min);
    let x_max = 40.0 / rate;
    let h = x_max / CDF_GRID as f64;
    let dens: Vec<f64> = (0..=CDF_GRID)
        .map(|k| laguerre_marginal_density(a, b, k as f64 * h))
        .collect::<Result<_>>()?;
    let mut cdf = vec![0.0; CDF_GRID + 1];
    let mut mean_acc = 0.0;
    for k in 1..=CDF_GRID {
        cdf[k] = cdf[k - 1] + 0.5 * h * (dens[k - 1] + dens[k]);
        let (x0, x1) = ((k - 1) as f64 * h, k as f64 * h);
        mean_acc += 0.5 * h * (x0 * dens[k - 1] + x1 * dens[k]);
    }
    let total = cdf[CDF_GRID];
    let quad_mean = mean_acc / total;
    let cdf_at = |x: f64| -> f64 {
        let pos = (x / h).clamp(0.0, CDF_GRID as f64);
        let k = (pos.floor() as usize).min(CDF_GRID - 1);
        let frac = pos - k as f64;
        (cdf[k] + frac * (cdf[k + 1] - cdf[k])) / total
    };
    let nf = samples as f64;
    let ks_distance = u
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf_at(x);
            (f - i as f64 / nf).abs().max(((i + 1) as f64 / nf - f).abs())
        })
        .fold(0.0, f64::max);
    // 1.95/√N is the 0.1% critical value of the one-sample statistic.
    let ks_threshold = 1.95 / nf.sqrt();
    let passed = ks_distance < ks_threshold && (mc_mean - quad_mean).abs() <= 3.5 * mc_stderr;
    Ok(LaguerreReport {
        samples,
        ks_distance,
        ks_threshold,
        mc_mean,
        mc_stderr,
        quad_mean,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_numerics::rat;
    use num_rational::BigRational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn m(rows: &[&[f64]]) -> RealMatrix<f64> {
        RealMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn local_move_examples() {
        let z = m(&[&[0.0, 0.0], &[0.0, 0.0]]);
        assert_eq!(tropical_local_move(&z, 2, 2).unwrap(), z);
        let y = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let moved = tropical_local_move(&y, 2, 2).unwrap();
        assert_eq!(moved, m(&[&[1.0, 2.0], &[3.0, 7.0]]));
        assert_eq!(tropical_local_move_inverse(&moved, 2, 2).unwrap(), y);
        assert!(tropical_local_move(&y, 3, 1).is_err());
    }

    #[test]
    fn u_examples() {
        let z = m(&[&[0.0, 0.0], &[0.0, 0.0]]);
        assert_eq!(apply_tropical(&z), z);
        let y = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_eq!(apply_tropical(&y), m(&[&[2.0, 3.0], &[4.0, 8.0]]));
        assert_eq!(last_passage_oracle(&y, 2, 1).unwrap(), 8.0);
        assert_eq!(last_passage_oracle(&y, 2, 2).unwrap(), 10.0);
        assert_eq!(last_passage_oracle(&z, 2, 1).unwrap(), 0.0);
    }

    #[test]
    fn round_trip_and_greene_on_rationals() {
        let mut g = ChaCha8Rng::seed_from_u64(31);
        for n in 1..=5 {
            for mm in 1..=5 {
                let y = RealMatrix::from_fn(n, mm, |_, _| {
                    rat(g.random_range(-9..=9), g.random_range(1..=5))
                });
                let u = apply_tropical(&y);
                assert_eq!(invert_tropical(&u), y);
                for k in 1..=mm {
                    for r in 1..=n.min(k) {
                        let lp: BigRational = last_passage_oracle(&y, k, r).unwrap();
                        assert_eq!(tropical_path_sum(&u, k, r), lp, "{n}x{mm} k={k} r={r}");
                    }
                }
            }
        }
    }

    #[test]
    fn gt_equivalence() {
        let mut g = ChaCha8Rng::seed_from_u64(32);
        assert!(gt_membership_check(&m(&[&[0.0; 4], &[0.0; 4], &[0.0; 4]])));
        for _ in 0..200 {
            let y = RealMatrix::from_fn(3, 4, |_, _| g.random_range(0.0..5.0));
            assert!(gt_membership_check(&y));
            let mut bad = y.clone();
            let (i, j) = (g.random_range(1..=3), g.random_range(1..=4));
            bad.set(i, j, -g.random_range(0.01..5.0));
            assert!(!gt_membership_check(&bad));
        }
    }

    #[test]
    fn gt_pattern_conventions() {
        // Height 3, width 2: rows (1), (2, 0.5), (3, 1).
        let p = Pattern::from_rows(2, vec![vec![1.0], vec![2.0, 0.5], vec![3.0, 1.0]]).unwrap();
        assert!(is_gelfand_tsetlin(&p));
        let q = Pattern::from_rows(2, vec![vec![1.0], vec![2.0, -0.5], vec![3.0, 0.0]]).unwrap();
        assert!(!is_gelfand_tsetlin(&q));
        let r = Pattern::from_rows(2, vec![vec![1.0], vec![2.0, 0.5], vec![3.0, 0.4]]).unwrap();
        assert!(!is_gelfand_tsetlin(&r));
    }

    #[test]
    fn log_domain_matches_float_map() {
        let y = m(&[&[0.3, -1.2, 0.7], &[1.1, 0.4, -0.5]]);
        let a = apply_grsk(&y.map(|v| v.exp())).map(|v| v.ln());
        let b = apply_grsk(&y.map(|&v| LogF64(v))).map(|v| v.0);
        for (x, z) in a.entries().iter().zip(b.entries()) {
            assert!((x - z).abs() < 1e-12);
        }
    }

    #[test]
    fn tropicalization_limit() {
        let z = m(&[&[0.0, 0.0], &[0.0, 0.0]]);
        let r = tropicalization_limit_check(&z, &[1e-1, 1e-2, 1e-3]).unwrap();
        assert!(r.decreasing);
        assert!(r.max_err[2] < 1e-2);
        let mut g = ChaCha8Rng::seed_from_u64(33);
        let y = RealMatrix::from_fn(3, 3, |_, _| g.random_range(-5..=5) as f64);
        let eps = [1e-1, 1e-2, 1e-3, 1e-4];
        let r = tropicalization_limit_check(&y, &eps).unwrap();
        assert!(r.decreasing, "{:?}", r.max_err);
        assert!(r.max_err[1] < 0.1);
        for (e, err) in eps.iter().zip(&r.max_err) {
            assert!(*err < 10.0 * e * 9.0, "ε = {e}: {err}");
        }
    }

    #[test]
    fn j_lambda_examples() {
        let v = j_lambda(&[0.7], &[c(1.5)]).unwrap();
        assert!((v.re - (-1.05f64).exp()).abs() < 1e-15);
        let v = j_lambda(&[1.0, 0.0], &[c(1.0), c(2.0)]).unwrap();
        assert!((v.re - 0.232544).abs() < 1e-6);
        assert!(((-1.0f64).exp() - (-2.0f64).exp() - v.re).abs() < 1e-15);
        let x = [2.3, 1.1, 0.4];
        let l = [c(0.5), Complex64::new(1.2, 0.3), c(2.0)];
        let a = j_lambda(&x, &l).unwrap();
        let b = j_lambda(&x, &[l[2], l[0], l[1]]).unwrap();
        assert!((a - b).norm() < 1e-12 * a.norm());
        assert!(j_lambda(&[1.0, 0.0], &[c(1.0), c(1.0)]).is_err());
    }

    #[test]
    fn cauchy_identity() {
        let r = tropical_cauchy_check(&[c(0.7)], &[c(1.1)]).unwrap();
        assert!(r.passed, "{r:?}");
        let r = tropical_cauchy_check(&[c(1.0), c(2.0)], &[c(3.0), c(4.0)]).unwrap();
        assert!((r.expected.re - 1.0 / 600.0).abs() < 1e-15);
        assert!(r.passed, "{r:?}");
        let r = tropical_cauchy_check(&[c(1.0), c(2.0)], &[c(1.0), c(2.0)]).unwrap();
        assert!((r.expected.re - 1.0 / 72.0).abs() < 1e-15);
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn laguerre_density_normalized() {
        let a = [1.0, 2.0];
        let b = [1.0, 3.0];
        let h = 0.005;
        let vals: Vec<f64> =
            (0..=8000).map(|k| laguerre_marginal_density(&a, &b, k as f64 * h).unwrap()).collect();
        let total = crate::quadrature::trapezoid(&vals, h);
        assert!((total - 1.0).abs() < 1e-4, "{total}");
    }

    #[test]
    fn laguerre_small_sample() {
        let mut g = ChaCha8Rng::seed_from_u64(34);
        let r = laguerre_marginal_check(&[1.0, 2.0], &[1.0, 3.0], 5000, &mut g).unwrap();
        assert!(r.passed, "{r:?}");
    }
}
