//! The geometric RSK map on positive n×m matrices, built from local moves.
//!
//! Indices in the public API are 1-based, `(i, j)` = (row, column).

use num_rational::BigRational;
use rand::Rng;

use crate::error::{GrskError, Result};
use crate::exact_numerics::{log_jacobian_det_of, random_rational, PosRational, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct WeightMatrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Clone> WeightMatrix<S> {
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if n == 0 || m == 0 {
            return Err(GrskError::Usage("matrix must be at least 1x1".into()));
        }
        if rows.iter().any(|r| r.len() != m) {
            return Err(GrskError::Usage("ragged matrix rows".into()));
        }
        Ok(WeightMatrix { rows: n, cols: m, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 1..=rows {
            for j in 1..=cols {
                data.push(f(i, j));
            }
        }
        WeightMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[(i - 1) * self.cols + (j - 1)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[(i - 1) * self.cols + (j - 1)] = v;
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        self.data.chunks(self.cols).map(<[S]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        WeightMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<T>(&self, f: impl Fn(&S) -> T) -> WeightMatrix<T> {
        WeightMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Top-left `k × cols` block.
    pub fn top_rows(&self, k: usize) -> Self {
        WeightMatrix::from_fn(k, self.cols, |i, j| self.get(i, j).clone())
    }
}

impl<S: Scalar> WeightMatrix<S> {
    pub fn check_positive(&self) -> Result<()> {
        match self.data.iter().position(|x| !x.is_positive()) {
            None => Ok(()),
            Some(k) => Err(GrskError::Domain(format!(
                "entry ({}, {}) is not positive",
                k / self.cols + 1,
                k % self.cols + 1
            ))),
        }
    }
}

/// Random `n × m` matrix of rationals `p/q`, `1 <= p, q <= max`.
pub fn random_matrix<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    m: usize,
    max: i64,
) -> WeightMatrix<PosRational> {
    WeightMatrix::from_fn(n, m, |_, _| random_rational(rng, max))
}

fn check_index<S>(x: &WeightMatrix<S>, i: usize, j: usize) -> Result<()> {
    if i == 0 || j == 0 || i > x.rows || j > x.cols {
        return Err(GrskError::Usage(format!(
            "index ({i}, {j}) outside a {}x{} matrix",
            x.rows, x.cols
        )));
    }
    Ok(())
}

pub(crate) fn l_forward<S: Scalar>(x: &mut WeightMatrix<S>, i: usize, j: usize) {
    match (i, j) {
        (1, 1) => {}
        (1, _) => {
            let v = x.get(1, j - 1).clone() * x.get(1, j).clone();
            x.set(1, j, v);
        }
        (_, 1) => {
            let v = x.get(i - 1, 1).clone() * x.get(i, 1).clone();
            x.set(i, 1, v);
        }
        _ => {
            let a = x.get(i - 1, j - 1).clone();
            let b = x.get(i - 1, j).clone();
            let c = x.get(i, j - 1).clone();
            let d = x.get(i, j).clone();
            let bc = b.clone() + c.clone();
            x.set(i - 1, j - 1, b * c / (a * bc.clone()));
            x.set(i, j, d * bc);
        }
    }
}

pub(crate) fn l_inverse<S: Scalar>(x: &mut WeightMatrix<S>, i: usize, j: usize) {
    match (i, j) {
        (1, 1) => {}
        (1, _) => {
            let v = x.get(1, j).clone() / x.get(1, j - 1).clone();
            x.set(1, j, v);
        }
        (_, 1) => {
            let v = x.get(i, 1).clone() / x.get(i - 1, 1).clone();
            x.set(i, 1, v);
        }
        _ => {
            let a = x.get(i - 1, j - 1).clone();
            let b = x.get(i - 1, j).clone();
            let c = x.get(i, j - 1).clone();
            let d = x.get(i, j).clone();
            let bc = b.clone() + c.clone();
            x.set(i - 1, j - 1, b * c / (a * bc.clone()));
            x.set(i, j, d / bc);
        }
    }
}

/// `l_ij` as a pure map.
pub fn local_move<S: Scalar>(x: &WeightMatrix<S>, i: usize, j: usize) -> Result<WeightMatrix<S>> {
    check_index(x, i, j)?;
    let mut y = x.clone();
    l_forward(&mut y, i, j);
    Ok(y)
}

pub fn local_move_inverse<S: Scalar>(
    x: &WeightMatrix<S>,
    i: usize,
    j: usize,
) -> Result<WeightMatrix<S>> {
    check_index(x, i, j)?;
    let mut y = x.clone();
    l_inverse(&mut y, i, j);
    Ok(y)
}

/// Moves of `R_i` on an `_ × m` matrix, in application order: `π^m_i` first,
/// then `π^{m-1}_{i-1}`, and so on; each `π^len_row` runs `l_{row,1}` first.
pub fn row_insertion_moves(i: usize, m: usize) -> Vec<(usize, usize)> {
    let mut moves = Vec::new();
    for k in 0..i.min(m) {
        let row = i - k;
        for j in 1..=m - k {
            moves.push((row, j));
        }
    }
    moves
}

/// All moves of `T = R_n ∘ … ∘ R_1`, in application order.
pub fn grsk_moves(n: usize, m: usize) -> Vec<(usize, usize)> {
    (1..=n).flat_map(|i| row_insertion_moves(i, m)).collect()
}

/// Moves of `ρ^i_j`, in application order (`l_ij` first).
pub fn rho_moves(i: usize, j: usize) -> Vec<(usize, usize)> {
    (0..i.min(j)).map(|t| (i - t, j - t)).collect()
}

pub(crate) fn apply_moves<S: Scalar>(x: &mut WeightMatrix<S>, moves: &[(usize, usize)]) {
    for &(i, j) in moves {
        l_forward(x, i, j);
    }
}

/// The gRSK map `T`.
pub fn apply_grsk<S: Scalar>(w: &WeightMatrix<S>) -> WeightMatrix<S> {
    let mut t = w.clone();
    apply_moves(&mut t, &grsk_moves(w.rows, w.cols));
    t
}

/// `R_n` applied to a matrix whose first `n-1` rows already hold `T` of the
/// top block and whose last row holds fresh weights.
pub fn apply_last_row_insertion<S: Scalar>(x: &WeightMatrix<S>) -> WeightMatrix<S> {
    let mut t = x.clone();
    apply_moves(&mut t, &row_insertion_moves(x.rows, x.cols));
    t
}

pub fn invert_grsk<S: Scalar>(t: &WeightMatrix<S>) -> Result<WeightMatrix<S>> {
    let mut w = t.clone();
    for &(i, j) in grsk_moves(t.rows, t.cols).iter().rev() {
        l_inverse(&mut w, i, j);
    }
    w.check_positive()
        .map_err(|e| GrskError::Domain(format!("input is not in the image of T: {e}")))?;
    Ok(w)
}

/// `σ(W) = (t_nm, t_{n-1,m-1}, …)`, of length `n ∧ m`.
pub fn shape<S: Scalar>(w: &WeightMatrix<S>) -> Vec<S> {
    anti_diagonal_shape(&apply_grsk(w))
}

/// Shape read off an output matrix without applying `T`.
pub fn anti_diagonal_shape<S: Clone>(t: &WeightMatrix<S>) -> Vec<S> {
    let (n, m) = (t.rows, t.cols);
    (0..n.min(m)).map(|k| t.get(n - k, m - k).clone()).collect()
}

/// `ℰ_s(X) = s/x_11 + Σ (x_{i-1,j} + x_{i,j-1}) / x_ij`, zero outside.
pub fn energy<S: Scalar>(x: &WeightMatrix<S>, s: &S) -> S {
    let mut e = s.clone() / x.get(1, 1).clone();
    for i in 1..=x.rows {
        for j in 1..=x.cols {
            let num = match (i > 1, j > 1) {
                (false, false) => continue,
                (true, false) => x.get(i - 1, j).clone(),
                (false, true) => x.get(i, j - 1).clone(),
                (true, true) => x.get(i - 1, j).clone() + x.get(i, j - 1).clone(),
            };
            e = e + num / x.get(i, j).clone();
        }
    }
    e
}

/// Both sides of the fundamental identity: the weighted reciprocal sum of
/// `W` and `ℰ_s(T(W))`.
pub fn fundamental_identity_sides<S: Scalar>(w: &WeightMatrix<S>, s: &S) -> (S, S) {
    let p = w.rows.min(w.cols);
    let mut lhs = S::zero();
    for i in 1..=w.rows {
        for j in 1..=w.cols {
            let r = w.get(i, j).recip();
            lhs = if i <= p && j == p - i + 1 { lhs + s.clone() * r } else { lhs + r };
        }
    }
    (lhs, energy(&apply_grsk(w), s))
}

pub fn check_fundamental_identity(w: &WeightMatrix<PosRational>, s: &PosRational) -> bool {
    let (l, r) = fundamental_identity_sides(w, s);
    l == r
}

pub fn check_t11_identity(w: &WeightMatrix<PosRational>) -> bool {
    let p = w.rows.min(w.cols);
    let lhs = (1..=p).fold(BigRational::from_i64(0), |acc, i| acc + w.get(i, p - i + 1).recip());
    lhs == apply_grsk(w).get(1, 1).recip()
}

// ---------------------------------------------------------------------------
// Non-intersecting path enumeration

/// Largest `n + m` accepted by the brute-force path oracles.
pub const PATH_ORACLE_MAX: usize = 14;

/// Down/right paths from `from` to `to` inside the cells accepted by `allowed`,
/// each encoded as a bitmask over the `n × m` grid.
pub(crate) fn enumerate_paths(
    m: usize,
    from: (usize, usize),
    to: (usize, usize),
    allowed: &dyn Fn(usize, usize) -> bool,
) -> Vec<u128> {
    fn walk(
        m: usize,
        cur: (usize, usize),
        to: (usize, usize),
        mask: u128,
        allowed: &dyn Fn(usize, usize) -> bool,
        out: &mut Vec<u128>,
    ) {
        let (i, j) = cur;
        if !allowed(i, j) {
            return;
        }
        let mask = mask | 1u128 << ((i - 1) * m + (j - 1));
        if cur == to {
            out.push(mask);
            return;
        }
        if i < to.0 {
            walk(m, (i + 1, j), to, mask, allowed, out);
        }
        if j < to.1 {
            walk(m, (i, j + 1), to, mask, allowed, out);
        }
    }
    let mut out = Vec::new();
    if from.0 <= to.0 && from.1 <= to.1 {
        walk(m, from, to, 0, allowed, &mut out);
    }
    out
}

/// Sum over vertex-disjoint tuples (one path per family) of the union mask
/// weight, pruning as soon as two paths share a cell.
pub(crate) fn disjoint_tuple_sum<T>(
    families: &[Vec<u128>],
    weight: &dyn Fn(u128) -> T,
    combine: &dyn Fn(T, T) -> T,
    empty: T,
) -> Option<T>
where
    T: Clone,
{
    fn rec<T: Clone>(
        families: &[Vec<u128>],
        used: u128,
        weight: &dyn Fn(u128) -> T,
        combine: &dyn Fn(T, T) -> T,
        acc: &mut Option<T>,
    ) {
        match families.split_first() {
            None => {
                let w = weight(used);
                *acc = Some(match acc.take() {
                    None => w,
                    Some(a) => combine(a, w),
                });
            }
            Some((first, rest)) => {
                for &p in first {
                    if p & used == 0 {
                        rec(rest, used | p, weight, combine, acc);
                    }
                }
            }
        }
    }
    let _ = empty;
    let mut acc = None;
    rec(families, 0, weight, combine, &mut acc);
    acc
}

pub(crate) fn mask_product<S: Scalar>(x: &WeightMatrix<S>, mask: u128) -> S {
    let mut p = S::one();
    let mut bits = mask;
    while bits != 0 {
        let k = bits.trailing_zeros() as usize;
        p = p * x.data[k].clone();
        bits &= bits - 1;
    }
    p
}

/// Brute-force sum over r-tuples of non-intersecting paths from
/// `(1,1), …, (1,r)` to `(n,k-r+1), …, (n,k)` of the product of weights.
pub fn path_partition_oracle<S: Scalar>(w: &WeightMatrix<S>, k: usize, r: usize) -> Result<S> {
    let (n, m) = (w.rows, w.cols);
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
    disjoint_tuple_sum(&families, &|mask| mask_product(w, mask), &|a, b| a + b, S::zero())
        .ok_or_else(|| GrskError::Domain("no non-intersecting path tuple".into()))
}

/// Product `t_{n-r+1,k-r+1} ⋯ t_{nk}` of the output matrix.
pub fn path_product_from_output<S: Scalar>(t: &WeightMatrix<S>, k: usize, r: usize) -> S {
    let n = t.rows;
    (0..r).fold(S::one(), |acc, q| acc * t.get(n - q, k - q).clone())
}

// ---------------------------------------------------------------------------
// Patterns

#[derive(Clone, Debug, PartialEq)]
pub struct Pattern<S> {
    height: usize,
    width: usize,
    rows: Vec<Vec<S>>,
}

impl<S: Clone> Pattern<S> {
    /// Row `i` (1-based) must have `i ∧ width` entries.
    pub fn from_rows(width: usize, rows: Vec<Vec<S>>) -> Result<Self> {
        let height = rows.len();
        if width == 0 || height < width {
            return Err(GrskError::Usage(format!(
                "pattern needs height >= width >= 1, got height {height}, width {width}"
            )));
        }
        for (k, r) in rows.iter().enumerate() {
            if r.len() != (k + 1).min(width) {
                return Err(GrskError::Usage(format!(
                    "pattern row {} has {} entries, expected {}",
                    k + 1,
                    r.len(),
                    (k + 1).min(width)
                )));
            }
        }
        Ok(Pattern { height, width, rows })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.rows
    }

    pub fn z(&self, i: usize, j: usize) -> &S {
        &self.rows[i - 1][j - 1]
    }

    fn z_opt(&self, i: usize, j: usize) -> Option<&S> {
        if i >= 1 && i <= self.height && j >= 1 && j <= i.min(self.width) {
            Some(self.z(i, j))
        } else {
            None
        }
    }

    /// Bottom row.
    pub fn shape(&self) -> &[S] {
        &self.rows[self.height - 1]
    }

    /// All entries, row by row.
    pub fn flat(&self) -> Vec<S> {
        self.rows.iter().flatten().cloned().collect()
    }

    pub fn from_flat(height: usize, width: usize, flat: &[S]) -> Result<Self> {
        let mut it = flat.iter().cloned();
        let rows = (1..=height).map(|i| it.by_ref().take(i.min(width)).collect()).collect();
        Pattern::from_rows(width, rows)
    }
}

impl<S: Scalar> Pattern<S> {
    /// `τ_i = ρ_i / ρ_{i-1}`, `ρ_i` the product of row `i`.
    pub fn pattern_type(&self) -> Vec<S> {
        let mut prev = S::one();
        self.rows
            .iter()
            .map(|r| {
                let rho = r.iter().cloned().fold(S::one(), |a, b| a * b);
                let tau = rho.clone() / prev.clone();
                prev = rho;
                tau
            })
            .collect()
    }
}

/// Integer power, negative exponents allowed.
pub fn powi<S: Scalar>(x: &S, e: i64) -> S {
    let base = if e < 0 { x.recip() } else { x.clone() };
    (0..e.unsigned_abs()).fold(S::one(), |acc, _| acc * base.clone())
}

/// `P^α = Π τ_i^{α_i}` for integer exponents.
pub fn pattern_type_weight<S: Scalar>(p: &Pattern<S>, alpha: &[i64]) -> Result<S> {
    if alpha.len() != p.height {
        return Err(GrskError::Usage(format!(
            "exponent vector has length {}, pattern height is {}",
            alpha.len(),
            p.height
        )));
    }
    Ok(p.pattern_type().iter().zip(alpha).fold(S::one(), |acc, (t, &a)| acc * powi(t, a)))
}

/// `ℱ_s(P) = s/z_nn + Σ (z_{i-1,j} + z_{i+1,j+1}) / z_ij`, zero outside the index set.
pub fn pattern_energy<S: Scalar>(p: &Pattern<S>, s: &S) -> S {
    let n = p.width;
    let mut e = s.clone() / p.z(n, n).clone();
    for i in 1..=p.height {
        for j in 1..=i.min(n) {
            let num = match (p.z_opt(i - 1, j), p.z_opt(i + 1, j + 1)) {
                (None, None) => continue,
                (Some(a), None) | (None, Some(a)) => a.clone(),
                (Some(a), Some(b)) => a.clone() + b.clone(),
            };
            e = e + num / p.z(i, j).clone();
        }
    }
    e
}

#[derive(Clone, Debug, PartialEq)]
pub struct PatternPair<S> {
    pub p: Pattern<S>,
    pub q: Pattern<S>,
}

/// Read `(P, Q)` off an output matrix: `z_kℓ = t_{n-ℓ+1, k-ℓ+1}` and
/// `z'_sℓ = t_{s-ℓ+1, m-ℓ+1}`.
pub fn patterns_from_matrix<S: Clone + PartialEq>(t: &WeightMatrix<S>) -> PatternPair<S> {
    let (n, m) = (t.rows, t.cols);
    let width = n.min(m);
    let p_rows = (1..=m)
        .map(|k| (1..=k.min(n)).map(|l| t.get(n - l + 1, k - l + 1).clone()).collect())
        .collect();
    let q_rows = (1..=n)
        .map(|s| (1..=s.min(m)).map(|l| t.get(s - l + 1, m - l + 1).clone()).collect())
        .collect();
    let pair = PatternPair {
        p: Pattern { height: m, width, rows: p_rows },
        q: Pattern { height: n, width, rows: q_rows },
    };
    debug_assert!(pair.p.shape() == pair.q.shape());
    pair
}

/// Inverse of [`patterns_from_matrix`].
pub fn matrix_from_patterns<S: Clone>(pair: &PatternPair<S>) -> Result<WeightMatrix<S>> {
    let (m, n) = (pair.p.height, pair.q.height);
    if pair.p.width != n.min(m) || pair.q.width != n.min(m) {
        return Err(GrskError::Usage("pattern widths do not match n ∧ m".into()));
    }
    let mut cells: Vec<Option<S>> = vec![None; n * m];
    for k in 1..=m {
        for l in 1..=k.min(n) {
            cells[(n - l) * m + (k - l)] = Some(pair.p.z(k, l).clone());
        }
    }
    for s in 1..=n {
        for l in 1..=s.min(m) {
            cells[(s - l) * m + (m - l)] = Some(pair.q.z(s, l).clone());
        }
    }
    let data: Option<Vec<S>> = cells.into_iter().collect();
    let data = data.ok_or_else(|| GrskError::Usage("patterns do not cover the matrix".into()))?;
    Ok(WeightMatrix { rows: n, cols: m, data })
}

// ---------------------------------------------------------------------------
// Noumi–Yamada row insertion

/// Insert row `w` (time step `n`, 1-based) into the `P` pattern after `n-1`
/// steps. `z` holds rows `1..=m` with `k ∧ (n-1)` entries each (all empty at
/// `n = 1`); the result has `k ∧ n` entries per row.
pub fn noumi_yamada_insert<S: Scalar>(z: &[Vec<S>], w: &[S], n: usize) -> Result<Vec<Vec<S>>> {
    let m = w.len();
    if n == 0 || z.len() != m {
        return Err(GrskError::Usage(format!(
            "insertion state has {} rows for a row of length {m}",
            z.len()
        )));
    }
    for (k, row) in z.iter().enumerate() {
        if row.len() != (k + 1).min(n - 1) {
            return Err(GrskError::Usage(format!("insertion state row {} has wrong length", k + 1)));
        }
    }
    let full = n > m;
    let old = |k: usize, l: usize| z[k - 1][l - 1].clone();
    let mut zc: Vec<Vec<S>> = Vec::with_capacity(m);
    // a_{k-1, n}, carried for the partial-triangle product.
    for k in 1..=m {
        let lmax = if full { k } else { k.min(n - 1) };
        let a_limit = if full { k } else { k.min(n) };
        let mut a = vec![w[k - 1].clone()];
        let mut row: Vec<S> = Vec::with_capacity(k.min(n));
        for l in 1..=a_limit {
            if l <= lmax {
                let v = if l < k {
                    a[l - 1].clone() * (old(k, l) + zc[k - 2][l - 1].clone())
                } else {
                    a[l - 1].clone() * old(k, k)
                };
                row.push(v);
            }
            if l < a_limit && l < k {
                let next = a[l - 1].clone() * old(k, l) * zc[k - 2][l - 1].clone()
                    / (row[l - 1].clone() * old(k - 1, l));
                a.push(next);
            }
        }
        if !full && k >= n {
            let akn = a[n - 1].clone();
            let v = if k == n { akn } else { zc[k - 2][n - 1].clone() * akn };
            row.push(v);
        }
        zc.push(row);
    }
    Ok(zc)
}

/// Run the row insertion over all rows of `W`; `Q` records successive shapes.
pub fn noumi_yamada<S: Scalar>(w: &WeightMatrix<S>) -> Result<PatternPair<S>> {
    let (n, m) = (w.rows, w.cols);
    let mut z: Vec<Vec<S>> = vec![Vec::new(); m];
    let mut q_rows = Vec::with_capacity(n);
    for t in 1..=n {
        let row: Vec<S> = (1..=m).map(|j| w.get(t, j).clone()).collect();
        z = noumi_yamada_insert(&z, &row, t)?;
        q_rows.push(z[m - 1].clone());
    }
    let width = n.min(m);
    Ok(PatternPair {
        p: Pattern::from_rows(width, z)?,
        q: Pattern::from_rows(width, q_rows)?,
    })
}

// ---------------------------------------------------------------------------
// Bender–Knuth moves

/// The two boundary-resolved factors of `b_ij`: the up/left sum
/// `x_{i,j-1} + x_{i-1,j}` and the harmonic factor
/// `(1/x_{i+1,j} + 1/x_{i,j+1})^{-1}`, with zeros above/left, infinities
/// below/right, and both sums equal to 1 at the corners `(1,1)`, `(n,m)`.
pub fn bk_boundary_factors<S: Scalar>(x: &WeightMatrix<S>, i: usize, j: usize) -> (S, S) {
    let (n, m) = (x.rows, x.cols);
    let up_left = if (i, j) == (1, 1) {
        S::one()
    } else {
        match (i > 1, j > 1) {
            (true, true) => x.get(i, j - 1).clone() + x.get(i - 1, j).clone(),
            (true, false) => x.get(i - 1, j).clone(),
            (false, true) => x.get(i, j - 1).clone(),
            (false, false) => unreachable!(),
        }
    };
    let down_right = if (i, j) == (n, m) {
        S::one()
    } else {
        let inv = match (i < n, j < m) {
            (true, true) => x.get(i + 1, j).recip() + x.get(i, j + 1).recip(),
            (true, false) => x.get(i + 1, j).recip(),
            (false, true) => x.get(i, j + 1).recip(),
            (false, false) => unreachable!(),
        };
        inv.recip()
    };
    (up_left, down_right)
}

pub(crate) fn b_mut<S: Scalar>(x: &mut WeightMatrix<S>, i: usize, j: usize) {
    let (ul, dr) = bk_boundary_factors(x, i, j);
    let v = ul * dr / x.get(i, j).clone();
    x.set(i, j, v);
}

pub fn bender_knuth<S: Scalar>(x: &WeightMatrix<S>, i: usize, j: usize) -> Result<WeightMatrix<S>> {
    check_index(x, i, j)?;
    let mut y = x.clone();
    b_mut(&mut y, i, j);
    Ok(y)
}

/// `r_j`: `x_nj ← x_{n,j+1}/x_nj` for `j < m`, `1/x_nm` for `j = m`.
pub fn r_map<S: Scalar>(x: &WeightMatrix<S>, j: usize) -> Result<WeightMatrix<S>> {
    let n = x.rows;
    check_index(x, n, j)?;
    let mut y = x.clone();
    let v = if j < x.cols {
        x.get(n, j + 1).clone() / x.get(n, j).clone()
    } else {
        x.get(n, j).recip()
    };
    y.set(n, j, v);
    Ok(y)
}

/// `h_j = b_{n-j+1,1} ∘ … ∘ b_nj` (or the `j > n` variant).
pub fn h_map<S: Scalar>(x: &WeightMatrix<S>, j: usize) -> Result<WeightMatrix<S>> {
    check_index(x, x.rows, j)?;
    let mut y = x.clone();
    for (a, b) in rho_moves(x.rows, j) {
        b_mut(&mut y, a, b);
    }
    Ok(y)
}

/// `ρ^n_j` through its local moves.
pub fn rho_map<S: Scalar>(x: &WeightMatrix<S>, j: usize) -> Result<WeightMatrix<S>> {
    check_index(x, x.rows, j)?;
    let mut y = x.clone();
    apply_moves(&mut y, &rho_moves(x.rows, j));
    Ok(y)
}

/// Embed a height-`n` triangle as the `P` half of an `n × n` matrix; the
/// strict upper triangle is filled with ones (no `t_j`, `j < n`, reads it).
fn triangle_to_matrix<S: Scalar>(p: &Pattern<S>) -> WeightMatrix<S> {
    let n = p.height;
    let mut x = WeightMatrix::from_fn(n, n, |_, _| S::one());
    for k in 1..=n {
        for l in 1..=k {
            x.set(n - l + 1, k - l + 1, p.z(k, l).clone());
        }
    }
    x
}

fn matrix_to_triangle<S: Scalar>(x: &WeightMatrix<S>) -> Pattern<S> {
    let n = x.rows;
    let rows = (1..=n)
        .map(|k| (1..=k).map(|l| x.get(n - l + 1, k - l + 1).clone()).collect())
        .collect();
    Pattern { height: n, width: n, rows }
}

fn check_triangle<S>(p: &Pattern<S>, j: usize) -> Result<()> {
    if p.height != p.width {
        return Err(GrskError::Usage("Schützenberger moves need a triangle (n = m)".into()));
    }
    if j == 0 || j >= p.height {
        return Err(GrskError::Usage(format!("index {j} outside 1..{}", p.height)));
    }
    Ok(())
}

/// `t_j` on a triangle, via `h_j(P, Q) = (t_j(P), Q)`.
pub fn bk_triangle<S: Scalar>(p: &Pattern<S>, j: usize) -> Result<Pattern<S>> {
    check_triangle(p, j)?;
    Ok(matrix_to_triangle(&h_map(&triangle_to_matrix(p), j)?))
}

/// `q_i = t_1 ∘ (t_2 ∘ t_1) ∘ … ∘ (t_i ∘ … ∘ t_1)`.
pub fn schuetzenberger<S: Scalar>(p: &Pattern<S>, i: usize) -> Result<Pattern<S>> {
    check_triangle(p, i)?;
    let mut x = triangle_to_matrix(p);
    for block in (1..=i).rev() {
        for j in 1..=block {
            x = h_map(&x, j)?;
        }
    }
    Ok(matrix_to_triangle(&x))
}

/// `s_i = q_i ∘ t_1 ∘ q_i`.
pub fn braid_generator<S: Scalar>(p: &Pattern<S>, i: usize) -> Result<Pattern<S>> {
    let a = schuetzenberger(p, i)?;
    let b = bk_triangle(&a, 1)?;
    schuetzenberger(&b, i)
}

// ---------------------------------------------------------------------------
// Jacobians and symmetries

/// Maps whose log-Jacobian can be computed exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JacobianMap {
    Grsk,
    LocalMove(usize, usize),
    /// `q_i` on the triangle read from the `P` side of a square matrix.
    Schuetzenberger(usize),
}

/// Log-Jacobian determinant `det(D_T^{-1} J D_W)`; exact, expected to be ±1.
pub fn log_jacobian_det(map: JacobianMap, x: &WeightMatrix<PosRational>) -> Result<PosRational> {
    x.check_positive()?;
    match map {
        JacobianMap::Grsk => log_jacobian_det_of(x.entries(), |d| {
            let dm = WeightMatrix { rows: x.rows, cols: x.cols, data: d };
            Ok(apply_grsk(&dm).data)
        }),
        JacobianMap::LocalMove(i, j) => {
            check_index(x, i, j)?;
            log_jacobian_det_of(x.entries(), |d| {
                let dm = WeightMatrix { rows: x.rows, cols: x.cols, data: d };
                Ok(local_move(&dm, i, j)?.data)
            })
        }
        JacobianMap::Schuetzenberger(i) => {
            if x.rows != x.cols {
                return Err(GrskError::Usage("Schützenberger map needs n = m".into()));
            }
            let p = matrix_to_triangle(x);
            log_jacobian_det_of(&p.flat(), |d| {
                let dp = Pattern::from_flat(p.height, p.width, &d)?;
                Ok(schuetzenberger(&dp, i)?.flat())
            })
        }
    }
}

/// Checks `T(Wᵗ) = T(W)ᵗ` and that transposition swaps the pattern pair.
pub fn transpose_symmetry_check(w: &WeightMatrix<PosRational>) -> bool {
    let t = apply_grsk(w);
    let tt = apply_grsk(&w.transpose());
    let a = patterns_from_matrix(&t);
    let b = patterns_from_matrix(&tt);
    tt == t.transpose() && a.p == b.q && a.q == b.p
}
