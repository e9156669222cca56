//! gRSK restricted to symmetric square matrices.

use crate::error::{GrskError, Result};
use crate::exact_numerics::{log_jacobian_det_of, PosRational, Scalar};
use crate::grsk_core::{apply_grsk, apply_last_row_insertion, WeightMatrix};

/// Upper triangle (with diagonal) of a symmetric `n × n` matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricWeightMatrix<S> {
    n: usize,
    upper: Vec<S>,
}

fn upper_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = (i.min(j), i.max(j));
    // Rows 1..i-1 hold n, n-1, …, n-i+2 entries.
    (i - 1) * (n + 1) - i * (i - 1) / 2 + (j - i)
}

impl<S: Clone> SymmetricWeightMatrix<S> {
    pub fn from_upper(n: usize, upper: Vec<S>) -> Result<Self> {
        if n == 0 || upper.len() != n * (n + 1) / 2 {
            return Err(GrskError::Usage(format!(
                "symmetric matrix of order {n} needs {} upper entries, got {}",
                n * (n + 1) / 2,
                upper.len()
            )));
        }
        Ok(SymmetricWeightMatrix { n, upper })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut upper = Vec::with_capacity(n * (n + 1) / 2);
        for i in 1..=n {
            for j in i..=n {
                upper.push(f(i, j));
            }
        }
        SymmetricWeightMatrix { n, upper }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn upper(&self) -> &[S] {
        &self.upper
    }

    /// Either triangle.
    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.upper[upper_index(self.n, i, j)]
    }

    pub fn to_full(&self) -> WeightMatrix<S> {
        WeightMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j).clone())
    }

    /// Upper triangle of a square matrix; the caller vouches for symmetry.
    pub fn from_full_upper(x: &WeightMatrix<S>) -> Result<Self> {
        if x.rows() != x.cols() {
            return Err(GrskError::Usage("symmetric matrix must be square".into()));
        }
        Ok(SymmetricWeightMatrix::from_fn(x.rows(), |i, j| x.get(i, j).clone()))
    }
}

impl<S: Scalar> SymmetricWeightMatrix<S> {
    pub fn check_positive(&self) -> Result<()> {
        if self.upper.iter().all(Scalar::is_positive) {
            Ok(())
        } else {
            Err(GrskError::Domain("symmetric matrix has a nonpositive entry".into()))
        }
    }
}

/// `T` on the symmetrized matrix; the output must be symmetric.
pub fn apply_grsk_symmetric<S: Scalar + PartialEq>(
    w: &SymmetricWeightMatrix<S>,
) -> SymmetricWeightMatrix<S> {
    let t = apply_grsk(&w.to_full());
    assert!(t == t.transpose(), "gRSK of a symmetric matrix is not symmetric");
    SymmetricWeightMatrix::from_fn(w.n, |i, j| t.get(i, j).clone())
}

/// One step of the symmetric recursion: from `T` of the leading
/// `(n-1) × (n-1)` block, the new column `w_{1n}, …, w_{n-1,n}` and `w_nn`,
/// build `S` and read off `T` of the order-`n` matrix.
pub fn symmetric_recursion_step<S: Scalar>(
    prev: &SymmetricWeightMatrix<S>,
    new_col: &[S],
    w_nn: &S,
) -> Result<SymmetricWeightMatrix<S>> {
    let n = prev.n + 1;
    if new_col.len() != n - 1 {
        return Err(GrskError::Usage(format!(
            "new column has {} entries, expected {}",
            new_col.len(),
            n - 1
        )));
    }
    // (n × (n-1)) stack of T^{n-1} over the new row, then R^{n,n-1}_n, transposed.
    let stacked = WeightMatrix::from_fn(n, n - 1, |i, j| {
        if i < n {
            prev.get(i, j).clone()
        } else {
            new_col[j - 1].clone()
        }
    });
    let s = apply_last_row_insertion(&stacked).transpose();
    let sij = |i: usize, j: usize| s.get(i, j).clone();
    let two = S::from_i64(2);
    Ok(SymmetricWeightMatrix::from_fn(n, |i, j| {
        if i < j {
            sij(i, j)
        } else if i == n {
            two.clone() * sij(n - 1, n) * w_nn.clone()
        } else if i == 1 {
            sij(1, 2) / (two.clone() * sij(1, 1))
        } else {
            sij(i, i + 1) * sij(i - 1, i) / sij(i, i)
        }
    }))
}

/// `T` computed only through [`symmetric_recursion_step`].
pub fn apply_grsk_symmetric_recursive<S: Scalar>(
    w: &SymmetricWeightMatrix<S>,
) -> Result<SymmetricWeightMatrix<S>> {
    let mut t = SymmetricWeightMatrix::from_upper(1, vec![w.get(1, 1).clone()])?;
    for k in 2..=w.n {
        let col: Vec<S> = (1..k).map(|i| w.get(i, k).clone()).collect();
        t = symmetric_recursion_step(&t, &col, w.get(k, k))?;
    }
    Ok(t)
}

/// Diagonal product identity: `4^⌊n/2⌋ Π w_ii` equals the alternating
/// product of output diagonal entries, which equals `Π_{odd} z_ni / Π_{even} z_ni`.
pub fn diagonal_product_identity(w: &SymmetricWeightMatrix<PosRational>) -> bool {
    let n = w.n;
    let t = apply_grsk_symmetric(w);
    let one = PosRational::from_i64(1);
    let lhs = (1..=n).fold(PosRational::from_i64(4_i64.pow((n / 2) as u32)), |a, i| {
        a * w.get(i, i)
    });
    let num = (0..=(n - 1) / 2).fold(one.clone(), |a, j| a * t.get(n - 2 * j, n - 2 * j));
    let den = if n >= 2 {
        (0..=(n - 2) / 2).fold(one.clone(), |a, j| a * t.get(n - 1 - 2 * j, n - 1 - 2 * j))
    } else {
        one.clone()
    };
    let mid = num / den;
    // z_nℓ = t_{n-ℓ+1, n-ℓ+1} on the bottom row of P.
    let z = |l: usize| t.get(n - l + 1, n - l + 1).clone();
    let odd = (1..=n).step_by(2).fold(one.clone(), |a, l| a * z(l));
    let even = (2..=n).step_by(2).fold(one, |a, l| a * z(l));
    lhs == mid && mid == odd / even
}

/// Log-Jacobian on the `n(n+1)/2` independent coordinates.
pub fn log_jacobian_det_symmetric(w: &SymmetricWeightMatrix<PosRational>) -> Result<PosRational> {
    w.check_positive()?;
    log_jacobian_det_of(&w.upper, |d| {
        let dw = SymmetricWeightMatrix::from_upper(w.n, d)?;
        Ok(apply_grsk_symmetric_recursive(&dw)?.upper)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_numerics::{random_rational, rat};
    use crate::grsk_core::patterns_from_matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_sym(g: &mut ChaCha8Rng, n: usize) -> SymmetricWeightMatrix<PosRational> {
        SymmetricWeightMatrix::from_fn(n, |_, _| random_rational(g, 9))
    }

    #[test]
    fn indexing_round_trip() {
        let w = SymmetricWeightMatrix::from_fn(4, |i, j| (10 * i + j) as i64);
        assert_eq!(*w.get(3, 2), 23);
        assert_eq!(*w.get(4, 4), 44);
        assert_eq!(w.upper().len(), 10);
        assert_eq!(w.to_full(), w.to_full().transpose());
        assert!(SymmetricWeightMatrix::from_upper(3, vec![1; 5]).is_err());
    }

    #[test]
    fn two_by_two_closed_form() {
        let (a, b, d) = (rat(2, 3), rat(5, 1), rat(7, 2));
        let w = SymmetricWeightMatrix::from_upper(2, vec![a.clone(), b.clone(), d.clone()]).unwrap();
        let t = apply_grsk_symmetric(&w);
        let expect = vec![&b / rat(2, 1), &a * &b, rat(2, 1) * &a * &b * &d];
        assert_eq!(t.upper(), expect.as_slice());
        let ones = SymmetricWeightMatrix::from_fn(2, |_, _| rat(1, 1));
        assert_eq!(apply_grsk_symmetric(&ones).upper(), &[rat(1, 2), rat(1, 1), rat(2, 1)]);
        let single = SymmetricWeightMatrix::from_upper(1, vec![rat(3, 5)]).unwrap();
        assert_eq!(apply_grsk_symmetric(&single), single);
    }

    #[test]
    fn recursion_matches_full_map() {
        let mut g = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=5 {
            let w = random_sym(&mut g, n);
            assert_eq!(apply_grsk_symmetric_recursive(&w).unwrap(), apply_grsk_symmetric(&w));
        }
        let prev = SymmetricWeightMatrix::from_upper(1, vec![rat(1, 1)]).unwrap();
        assert!(symmetric_recursion_step(&prev, &[], &rat(1, 1)).is_err());
    }

    #[test]
    fn diagonal_products() {
        let ones = SymmetricWeightMatrix::from_fn(2, |_, _| rat(1, 1));
        assert!(diagonal_product_identity(&ones));
        let mut g = ChaCha8Rng::seed_from_u64(6);
        for n in 1..=6 {
            assert!(diagonal_product_identity(&random_sym(&mut g, n)), "n = {n}");
        }
    }

    #[test]
    fn symmetric_patterns_coincide() {
        let mut g = ChaCha8Rng::seed_from_u64(7);
        let w = random_sym(&mut g, 4);
        let pq = patterns_from_matrix(&apply_grsk(&w.to_full()));
        assert_eq!(pq.p, pq.q);
    }

    #[test]
    fn jacobian_is_unimodular() {
        let mut g = ChaCha8Rng::seed_from_u64(8);
        for n in 1..=4 {
            let d = log_jacobian_det_symmetric(&random_sym(&mut g, n)).unwrap();
            assert!(d == rat(1, 1) || d == rat(-1, 1), "n = {n}: {d}");
        }
    }
}
