//! Exact rational and dual-rational scalars, and the `Scalar` abstraction
//! shared by every birational map in the crate.

use std::fmt;
use std::ops::{Add, Div, Mul};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{GrskError, Result};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type PosRational = BigRational;

/// Scalar field the maps are generic over. Only the subtraction-free
/// operations are required: every local move is a ratio of sums of products.
pub trait Scalar:
    Clone + fmt::Debug + Add<Output = Self> + Mul<Output = Self> + Div<Output = Self>
{
    fn from_i64(v: i64) -> Self;

    fn is_positive(&self) -> bool;

    fn zero() -> Self {
        Self::from_i64(0)
    }

    fn one() -> Self {
        Self::from_i64(1)
    }

    fn recip(&self) -> Self {
        Self::one() / self.clone()
    }
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn is_positive(&self) -> bool {
        *self > 0.0
    }
}

/// Build `p/q` as a reduced rational.
pub fn rat(p: i64, q: i64) -> PosRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// "p/q", or "p" when the denominator is 1.
pub fn format_rational(x: &PosRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<PosRational> {
    let s = s.trim();
    let bad = || GrskError::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(GrskError::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|_| bad())?;
            Ok(BigRational::from_integer(p))
        }
    }
}

pub fn to_f64(x: &PosRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Random positive rational `p/q` with `1 <= p, q <= max`.
pub fn random_rational<R: Rng + ?Sized>(rng: &mut R, max: i64) -> PosRational {
    rat(rng.random_range(1..=max), rng.random_range(1..=max))
}

/// Forward-mode dual number over the rationals with a dense gradient row.
#[derive(Clone, PartialEq)]
pub struct DualRational {
    pub value: PosRational,
    pub partials: Vec<PosRational>,
}

impl fmt::Debug for DualRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.partials.iter().map(format_rational).collect();
        write!(f, "({}, [{}])", format_rational(&self.value), parts.join(", "))
    }
}

impl DualRational {
    pub fn constant(value: PosRational) -> Self {
        DualRational { value, partials: Vec::new() }
    }

    fn partial(&self, k: usize) -> PosRational {
        self.partials.get(k).cloned().unwrap_or_else(<BigRational as Zero>::zero)
    }

    fn width(&self, other: &Self) -> usize {
        self.partials.len().max(other.partials.len())
    }

    /// Value minus other; partials follow. Not part of `Scalar`.
    pub fn sub(&self, other: &Self) -> Self {
        let d = self.width(other);
        DualRational {
            value: &self.value - &other.value,
            partials: (0..d).map(|k| self.partial(k) - other.partial(k)).collect(),
        }
    }
}

impl Add for DualRational {
    type Output = DualRational;
    fn add(self, rhs: Self) -> Self {
        let d = self.width(&rhs);
        DualRational {
            value: &self.value + &rhs.value,
            partials: (0..d).map(|k| self.partial(k) + rhs.partial(k)).collect(),
        }
    }
}

impl Mul for DualRational {
    type Output = DualRational;
    fn mul(self, rhs: Self) -> Self {
        let d = self.width(&rhs);
        let partials = (0..d)
            .map(|k| &self.value * rhs.partial(k) + &rhs.value * self.partial(k))
            .collect();
        DualRational { value: &self.value * &rhs.value, partials }
    }
}

impl Div for DualRational {
    type Output = DualRational;
    fn div(self, rhs: Self) -> Self {
        let d = self.width(&rhs);
        let v2 = &rhs.value * &rhs.value;
        let partials = (0..d)
            .map(|k| (&rhs.value * self.partial(k) - &self.value * rhs.partial(k)) / &v2)
            .collect();
        DualRational { value: &self.value / &rhs.value, partials }
    }
}

impl Scalar for DualRational {
    fn from_i64(v: i64) -> Self {
        DualRational::constant(<BigRational as Scalar>::from_i64(v))
    }

    fn is_positive(&self) -> bool {
        Signed::is_positive(&self.value)
    }
}

/// Seed independent input coordinates: value `values[k]`, gradient `e_k`.
pub fn dual_seed(values: &[PosRational]) -> Result<Vec<DualRational>> {
    let d = values.len();
    values
        .iter()
        .enumerate()
        .map(|(k, v)| {
            if !Signed::is_positive(v) {
                return Err(GrskError::Domain(format!(
                    "dual seed coordinate {k} is not positive: {}",
                    format_rational(v)
                )));
            }
            let mut partials = vec![<BigRational as Zero>::zero(); d];
            partials[k] = <BigRational as One>::one();
            Ok(DualRational { value: v.clone(), partials })
        })
        .collect()
}

/// Determinant by fraction-free (Bareiss) elimination. Rational entries are
/// first scaled row-wise to integers.
pub fn det_exact(m: &[Vec<PosRational>]) -> PosRational {
    let n = m.len();
    if n == 0 {
        return <BigRational as One>::one();
    }
    assert!(m.iter().all(|r| r.len() == n), "det_exact needs a square matrix");
    let mut scale = <BigRational as One>::one();
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| {
            let l = row
                .iter()
                .fold(BigInt::one(), |acc, x| num_integer::lcm(acc, x.denom().clone()));
            scale = &scale * BigRational::from_integer(l.clone());
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return <BigRational as Zero>::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    BigRational::from_integer(sign * &a[n - 1][n - 1]) / scale
}

/// Jacobian determinant in logarithmic variables of a map evaluated on
/// dual inputs: `det(diag(1/out) * J * diag(in))`.
pub fn log_jacobian_from_duals(inputs: &[PosRational], outputs: &[DualRational]) -> PosRational {
    let d = inputs.len();
    assert_eq!(outputs.len(), d, "log-Jacobian needs as many outputs as inputs");
    let rows: Vec<Vec<PosRational>> = outputs
        .iter()
        .map(|o| (0..d).map(|k| o.partial(k) * &inputs[k] / &o.value).collect())
        .collect();
    det_exact(&rows)
}

/// Log-Jacobian determinant of `f` at `inputs`, evaluated exactly through
/// dual numbers seeded at the inputs.
pub fn log_jacobian_det_of<F>(inputs: &[PosRational], f: F) -> Result<PosRational>
where
    F: FnOnce(Vec<DualRational>) -> Result<Vec<DualRational>>,
{
    let seeded = dual_seed(inputs)?;
    let out = f(seeded)?;
    if out.len() != inputs.len() {
        return Err(GrskError::Usage(format!(
            "map has {} outputs for {} inputs",
            out.len(),
            inputs.len()
        )));
    }
    Ok(log_jacobian_from_duals(inputs, &out))
}
