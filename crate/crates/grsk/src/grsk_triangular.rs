//! The triangular map `T^△` on strictly lower-triangular arrays, for
//! polymers below a hard wall.

use crate::error::{GrskError, Result};
use crate::exact_numerics::{log_jacobian_det_of, PosRational, Scalar};
use crate::grsk_core::{
    apply_grsk, disjoint_tuple_sum, enumerate_paths, l_forward, mask_product,
    path_partition_oracle, rho_moves, WeightMatrix,
};

/// Entries `x_ij`, `1 <= j < i <= n`; `rows[i-2]` holds `x_i1 … x_{i,i-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangularArray<S> {
    n: usize,
    rows: Vec<Vec<S>>,
}

/// Largest `n` accepted by the hard-wall path oracle.
pub const WALL_ORACLE_MAX: usize = 10;

impl<S: Clone> TriangularArray<S> {
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let n = rows.len() + 1;
        if n < 2 {
            return Err(GrskError::Usage("triangular array needs n >= 2".into()));
        }
        for (k, r) in rows.iter().enumerate() {
            if r.len() != k + 1 {
                return Err(GrskError::Usage(format!(
                    "triangular row {} has {} entries, expected {}",
                    k + 2,
                    r.len(),
                    k + 1
                )));
            }
        }
        Ok(TriangularArray { n, rows })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let rows = (2..=n).map(|i| (1..i).map(|j| f(i, j)).collect()).collect();
        TriangularArray { n, rows }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.rows[i - 2][j - 1]
    }

    pub fn flat(&self) -> Vec<S> {
        self.rows.iter().flatten().cloned().collect()
    }

    pub fn from_flat(n: usize, flat: &[S]) -> Result<Self> {
        if flat.len() != n * (n - 1) / 2 {
            return Err(GrskError::Usage("wrong number of triangular entries".into()));
        }
        let mut it = flat.iter().cloned();
        Ok(TriangularArray::from_fn(n, |_, _| it.next().expect("length checked")))
    }
}

impl<S: Scalar> TriangularArray<S> {
    pub fn check_positive(&self) -> Result<()> {
        if self.rows.iter().flatten().all(Scalar::is_positive) {
            Ok(())
        } else {
            Err(GrskError::Domain("triangular array has a nonpositive entry".into()))
        }
    }

    /// `n × n` matrix with this array strictly below the diagonal and ones elsewhere.
    fn embed(&self) -> WeightMatrix<S> {
        WeightMatrix::from_fn(self.n, self.n, |i, j| {
            if j < i {
                self.get(i, j).clone()
            } else {
                S::one()
            }
        })
    }

    fn from_embedded(x: &WeightMatrix<S>) -> Self {
        TriangularArray::from_fn(x.rows(), |i, j| x.get(i, j).clone())
    }
}

/// `ρ^{△,k}_{k-1}` on the leading `k × k` block of `x`.
fn rho_last<S: Scalar>(x: &mut WeightMatrix<S>, k: usize) {
    let inv = x.get(k, k - 1).recip();
    x.set(k, k - 1, inv);
    let at = |x: &WeightMatrix<S>, i: usize, j: usize| {
        if j == 0 || i == k + 1 {
            S::one()
        } else {
            x.get(i, j).clone()
        }
    };
    // b at rows k, k-2, …; the rows in between are fixed.
    for off in 0..k / 2 {
        let i = k - 2 * off;
        let v = at(x, i + 1, i - 1) * at(x, i, i - 2) / x.get(i, i - 1).clone();
        x.set(i, i - 1, v);
    }
}

/// `T^△_n`, by the row recursion on the embedded matrix.
pub fn apply_grsk_triangular<S: Scalar>(w: &TriangularArray<S>) -> TriangularArray<S> {
    let mut x = w.embed();
    for k in 3..=w.n {
        for j in 1..=k - 2 {
            for (a, b) in rho_moves(k, j) {
                l_forward(&mut x, a, b);
            }
        }
        rho_last(&mut x, k);
    }
    TriangularArray::from_embedded(&x)
}

/// `ℰ^△(X) = 1/x_21 + Σ (x_{i-1,j} + x_{i,j-1}) / x_ij`, with `x_i0 = x_ii = 0`.
pub fn energy_triangular<S: Scalar>(x: &TriangularArray<S>) -> S {
    let mut e = x.get(2, 1).recip();
    for i in 2..=x.n {
        for j in 1..i {
            let up = (j < i - 1).then(|| x.get(i - 1, j).clone());
            let left = (j > 1).then(|| x.get(i, j - 1).clone());
            let num = match (up, left) {
                (None, None) => continue,
                (Some(a), None) | (None, Some(a)) => a,
                (Some(a), Some(b)) => a + b,
            };
            e = e + num / x.get(i, j).clone();
        }
    }
    e
}

pub fn check_triangular_identity(w: &TriangularArray<PosRational>) -> bool {
    let rhs = w.rows.iter().flatten().fold(PosRational::from_i64(0), |a, v| a + v.recip());
    energy_triangular(&apply_grsk_triangular(w)) == rhs
}

pub fn log_jacobian_det_triangular(w: &TriangularArray<PosRational>) -> Result<PosRational> {
    w.check_positive()?;
    log_jacobian_det_of(&w.flat(), |d| {
        let dw = TriangularArray::from_flat(w.n, &d)?;
        Ok(apply_grsk_triangular(&dw).flat())
    })
}

/// `z_r`: non-intersecting paths from `(2,1), …, (r+1,r)` to
/// `(n,n-1), …, (n-r+1,n-r)` inside `{j < i}`.
pub fn below_wall_partition_oracle<S: Scalar>(w: &TriangularArray<S>, r: usize) -> Result<S> {
    let n = w.n;
    if n > WALL_ORACLE_MAX {
        return Err(GrskError::Usage(format!(
            "hard-wall oracle refuses n = {n} > {WALL_ORACLE_MAX}"
        )));
    }
    if r == 0 || r > n / 2 {
        return Err(GrskError::Usage(format!("r = {r} outside 1..={}", n / 2)));
    }
    let x = w.embed();
    let below = |i: usize, j: usize| j < i;
    let families: Vec<Vec<u128>> = (1..=r)
        .map(|c| enumerate_paths(n, (c + 1, c), (n - c + 1, n - c), &below))
        .collect();
    disjoint_tuple_sum(&families, &|mask| mask_product(&x, mask), &|a, b| a + b, S::zero())
        .ok_or_else(|| GrskError::Domain("no non-intersecting path tuple below the wall".into()))
}

/// `(t_{n,n-1}, t_{n-2,n-3}, …) = (z_1, z_2/z_1, …)`.
pub fn check_shape_ratios(w: &TriangularArray<PosRational>) -> Result<bool> {
    let n = w.n;
    let t = apply_grsk_triangular(w);
    let mut prev = PosRational::from_i64(1);
    for k in 0..n / 2 {
        let z = below_wall_partition_oracle(w, k + 1)?;
        if *t.get(n - 2 * k, n - 2 * k - 1) != &z / &prev {
            return Ok(false);
        }
        prev = z;
    }
    Ok(true)
}

/// `τ_j = D_nj / D_{n,j-1}`, `D_nj = x_nj x_{n-1,j-1} ⋯ x_{n-j+1,1}`, `j < n`.
pub fn triangular_type<S: Scalar>(x: &TriangularArray<S>) -> Vec<S> {
    let n = x.n;
    let d = |j: usize| (0..j).fold(S::one(), |a, t| a * x.get(n - t, j - t).clone());
    (1..n).map(|j| d(j) / d(j - 1)).collect()
}

/// `Π_{ℓ<j} w_jℓ · Π_{k>j} w_kj` for `j < n`.
pub fn triangular_type_from_weights<S: Scalar>(w: &TriangularArray<S>) -> Vec<S> {
    let n = w.n;
    (1..n)
        .map(|j| {
            let row = (1..j).fold(S::one(), |a, l| a * w.get(j, l).clone());
            (j + 1..=n).fold(row, |a, k| a * w.get(k, j).clone())
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Embedding into the symmetric map as the diagonal vanishes

/// Symmetric matrix with off-diagonal entries from `w` and `ε` on the diagonal.
pub fn epsilon_matrix(w: &TriangularArray<f64>, eps: f64) -> WeightMatrix<f64> {
    WeightMatrix::from_fn(w.n, w.n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => eps,
        std::cmp::Ordering::Greater => *w.get(i, j),
        std::cmp::Ordering::Less => *w.get(j, i),
    })
}

/// `T^⋄`: symmetric extension of `T^△(w)` with the collapsed diagonal.
pub fn diamond_matrix(w: &TriangularArray<f64>) -> WeightMatrix<f64> {
    let n = w.n;
    let t = apply_grsk_triangular(w);
    let mut diag = vec![1.0; n + 1];
    let mut k = 0;
    while n >= 2 * k + 2 {
        let v = *t.get(n - 2 * k, n - 2 * k - 1);
        diag[n - 2 * k] = v;
        diag[n - 2 * k - 1] = v;
        k += 1;
    }
    WeightMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => diag[i],
        std::cmp::Ordering::Greater => *t.get(i, j),
        std::cmp::Ordering::Less => *t.get(j, i),
    })
}

/// `Λ^ε`: off-diagonal `×ε`; diagonal `n, n-2, …, 2` by `2ε²`; diagonal
/// `n-1, n-3, …, 1` by `1/2`; for odd `n`, `w_11` by `ε`.
pub fn lambda_scale(x: &WeightMatrix<f64>, eps: f64) -> WeightMatrix<f64> {
    let n = x.rows();
    WeightMatrix::from_fn(n, n, |i, j| {
        let v = *x.get(i, j);
        if i != j {
            v * eps
        } else if (n - i) % 2 == 1 {
            v / 2.0
        } else if i >= 2 {
            2.0 * eps * eps * v
        } else {
            eps * v
        }
    })
}

#[derive(Clone, Debug)]
pub struct EpsilonReport {
    pub eps: Vec<f64>,
    /// Largest entrywise relative deviation from the leading-order term, per ε.
    pub max_rel_err: Vec<f64>,
    pub passed: bool,
}

/// Deviations below this are treated as round-off.
const FLOAT_FLOOR: f64 = 1e-11;

fn shrinks_superlinearly(eps: &[f64], err: &[f64]) -> bool {
    eps.windows(2).zip(err.windows(2)).all(|(e, r)| {
        r[1] < FLOAT_FLOOR || r[1] / r[0] < 1.5 * e[1] / e[0]
    })
}

fn check_eps_list(eps_list: &[f64]) -> Result<()> {
    if eps_list.len() < 2
        || eps_list.iter().any(|&e| !(e > 0.0 && e < 1.0))
        || eps_list.windows(2).any(|p| p[1] >= p[0])
    {
        return Err(GrskError::Usage("ε list must be decreasing values in (0, 1)".into()));
    }
    Ok(())
}

/// Compare `T(W^ε)` with `Λ^ε T^⋄(W)` entrywise as `ε → 0`.
pub fn epsilon_embedding_check(w: &TriangularArray<f64>, eps_list: &[f64]) -> Result<EpsilonReport> {
    check_eps_list(eps_list)?;
    let diamond = diamond_matrix(w);
    let mut errs = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let t = apply_grsk(&epsilon_matrix(w, eps));
        let lead = lambda_scale(&diamond, eps);
        if t.entries().iter().any(|v| !v.is_finite() || *v == 0.0) {
            return Err(GrskError::Domain(format!("float overflow/underflow at ε = {eps}")));
        }
        let e = t
            .entries()
            .iter()
            .zip(lead.entries())
            .map(|(a, b)| ((a - b) / b).abs())
            .fold(0.0, f64::max);
        errs.push(e);
    }
    let passed = shrinks_superlinearly(eps_list, &errs);
    Ok(EpsilonReport { eps: eps_list.to_vec(), max_rel_err: errs, passed })
}

/// Leading-order structure of the full-square partition functions of `W^ε`:
/// `v_2k ≈ ε^{2k} z_k²` and `v_{2k-1} ≈ ε^{2k} 2 z_{k-1} z_k`.
pub fn path_structure_check(w: &TriangularArray<f64>, eps_list: &[f64]) -> Result<EpsilonReport> {
    check_eps_list(eps_list)?;
    let n = w.n;
    let mut z = vec![1.0];
    for r in 1..=n / 2 {
        z.push(below_wall_partition_oracle(w, r)?);
    }
    let mut errs = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let we = epsilon_matrix(w, eps);
        let mut worst: f64 = 0.0;
        for k in 1..=n / 2 {
            let scale = eps.powi(2 * k as i32);
            let v_even = path_partition_oracle(&we, n, 2 * k)?;
            let v_odd = path_partition_oracle(&we, n, 2 * k - 1)?;
            let lead_even = scale * z[k] * z[k];
            let lead_odd = scale * 2.0 * z[k - 1] * z[k];
            worst = worst.max(((v_even - lead_even) / lead_even).abs());
            worst = worst.max(((v_odd - lead_odd) / lead_odd).abs());
        }
        errs.push(worst);
    }
    let passed = shrinks_superlinearly(eps_list, &errs);
    Ok(EpsilonReport { eps: eps_list.to_vec(), max_rel_err: errs, passed })
}
