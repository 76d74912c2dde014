//! Dense complex linear algebra with tensor-product structure.
//!
//! Every operator in this crate is a [`ComplexMatrix`], optionally annotated
//! by a [`DimsSpec`] describing how its index space factors into subsystems.
//! Composite indices are big-endian: for factors `d_0, …, d_{n-1}` the index
//! `i` decomposes as `i = i_0·(d_1⋯d_{n-1}) + … + i_{n-1}`, so factor 0 is the
//! most significant digit. All factor indices in this API are zero-based.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance on `max |m - m†|` for treating a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub type C64 = Complex64;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Dense square complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim(), self.dim())?;
        for i in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    /// Wraps a nalgebra matrix, rejecting non-square or empty input.
    pub fn new(inner: DMatrix<C64>) -> Result<Self> {
        if inner.nrows() != inner.ncols() {
            return Err(Error::DimensionMismatch {
                expected: inner.nrows(),
                found: inner.ncols(),
            });
        }
        if inner.nrows() == 0 {
            return Err(Error::InvalidArgument("matrix dimension must be at least 1".into()));
        }
        Ok(Self(inner))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(dim, dim, f))
    }

    /// Builds a matrix from row-major rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("matrix must have at least one row".into()));
        }
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
        }
        Ok(Self::from_fn(dim, |i, j| rows[i][j]))
    }

    /// Builds a matrix from real row-major rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|&x| c(x, 0.0)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { c(diag[i], 0.0) } else { C64::default() })
    }

    /// `|v⟩⟨v|` (no normalization is applied).
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    /// Largest entrywise modulus of `self - other`. Panics on size mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "max_abs_diff on matrices of different size");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |m - m†|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `(m + m†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()).map(|z| z * 0.5))
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut C64 {
        &mut self.0[idx]
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(self.0.$method(rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-self.0)
    }
}

/// Ordered subsystem dimensions of a composite space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DimsSpec(Vec<usize>);

impl DimsSpec {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument("dims must list at least one factor".into()));
        }
        if factors.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "zero-dimensional factor in {factors:?}"
            )));
        }
        Ok(Self(factors))
    }

    /// `n` copies of the factor `d`.
    pub fn uniform(d: usize, n: usize) -> Result<Self> {
        Self::new(vec![d; n])
    }

    pub fn factors(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    /// Product of the dimensions of the listed factors.
    pub fn block_total(&self, factors: &[usize]) -> usize {
        factors.iter().map(|&k| self.0[k]).product()
    }

    pub fn check_matrix(&self, m: &ComplexMatrix) -> Result<()> {
        if m.dim() != self.total() {
            return Err(Error::DimensionMismatch {
                expected: self.total(),
                found: m.dim(),
            });
        }
        Ok(())
    }

    /// Big-endian digits of a composite index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.0.len()];
        for (slot, &d) in out.iter_mut().zip(&self.0).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.0).fold(0, |acc, (&i, &d)| acc * d + i)
    }

    /// Composite index over a subset of factors (taken in the given order).
    fn sub_index(&self, digits: &[usize], factors: &[usize]) -> usize {
        factors.iter().fold(0, |acc, &k| acc * self.0[k] + digits[k])
    }

    fn check_factor_set(&self, set: &[usize], what: &str) -> Result<Vec<usize>> {
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != set.len() {
            return Err(Error::InvalidArgument(format!("repeated factor in {what} set {set:?}")));
        }
        if let Some(&bad) = sorted.iter().find(|&&k| k >= self.0.len()) {
            return Err(Error::InvalidArgument(format!(
                "factor {bad} in {what} set is out of range for {} factors",
                self.0.len()
            )));
        }
        Ok(sorted)
    }
}

impl fmt::Display for DimsSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// A split of the factors of a [`DimsSpec`] into two nonempty blocks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub struct PartitionSpec {
    first: Vec<usize>,
    second: Vec<usize>,
}

impl PartitionSpec {
    /// Validates that `first` and `second` are disjoint, nonempty, and cover
    /// `0..n_factors`.
    pub fn new(first: Vec<usize>, second: Vec<usize>, n_factors: usize) -> Result<Self> {
        if first.is_empty() || second.is_empty() {
            return Err(Error::InvalidPartition("both blocks must be nonempty".into()));
        }
        let mut seen = vec![false; n_factors];
        for &k in first.iter().chain(&second) {
            if k >= n_factors {
                return Err(Error::InvalidPartition(format!(
                    "factor {k} out of range for {n_factors} factors"
                )));
            }
            if seen[k] {
                return Err(Error::InvalidPartition(format!("factor {k} appears twice")));
            }
            seen[k] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidPartition("blocks do not cover every factor".into()));
        }
        let mut first = first;
        let mut second = second;
        first.sort_unstable();
        second.sort_unstable();
        Ok(Self { first, second })
    }

    /// `first` against everything else.
    pub fn split_off(first: Vec<usize>, n_factors: usize) -> Result<Self> {
        let second = (0..n_factors).filter(|k| !first.contains(k)).collect();
        Self::new(first, second, n_factors)
    }

    /// The single cut of a two-factor space.
    pub fn bipartite() -> Self {
        Self {
            first: vec![0],
            second: vec![1],
        }
    }

    /// Every distinct two-block partition of `n_factors` factors, smaller
    /// block first. For three factors this is `0|12`, `1|02`, `2|01`.
    pub fn all(n_factors: usize) -> Vec<Self> {
        let mut out = Vec::new();
        for size in 1..=n_factors / 2 {
            for mask in 0u64..(1u64 << n_factors) {
                if mask.count_ones() as usize != size {
                    continue;
                }
                // Equal halves: keep only the copy whose first block holds factor 0.
                if 2 * size == n_factors && mask & 1 == 0 {
                    continue;
                }
                let first: Vec<usize> = (0..n_factors).filter(|k| mask >> k & 1 == 1).collect();
                let second: Vec<usize> = (0..n_factors).filter(|k| mask >> k & 1 == 0).collect();
                out.push(Self { first, second });
            }
        }
        out.sort_by(|a, b| (a.first.len(), &a.first).cmp(&(b.first.len(), &b.first)));
        out
    }

    pub fn first(&self) -> &[usize] {
        &self.first
    }

    pub fn second(&self) -> &[usize] {
        &self.second
    }

    pub fn n_factors(&self) -> usize {
        self.first.len() + self.second.len()
    }

    pub fn check_dims(&self, dims: &DimsSpec) -> Result<()> {
        if self.n_factors() != dims.len() {
            return Err(Error::InvalidPartition(format!(
                "partition {self} covers {} factors but dims {dims} has {}",
                self.n_factors(),
                dims.len()
            )));
        }
        Ok(())
    }

    /// Dimensions of the two blocks.
    pub fn block_dims(&self, dims: &DimsSpec) -> (usize, usize) {
        (dims.block_total(&self.first), dims.block_total(&self.second))
    }
}

impl fmt::Display for PartitionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |b: &[usize]| b.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{}|{}", show(&self.first), show(&self.second))
    }
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Traces out every factor not listed in `keep`. The result lives on the
/// kept factors in their original order.
pub fn partial_trace(m: &ComplexMatrix, dims: &DimsSpec, keep: &[usize]) -> Result<ComplexMatrix> {
    dims.check_matrix(m)?;
    if keep.is_empty() {
        return Err(Error::InvalidArgument("keep set must be nonempty".into()));
    }
    let keep = dims.check_factor_set(keep, "keep")?;
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();

    let n = m.dim();
    let (kept_idx, traced_idx): (Vec<usize>, Vec<usize>) = (0..n)
        .map(|i| {
            let d = dims.digits(i);
            (dims.sub_index(&d, &keep), dims.sub_index(&d, &traced))
        })
        .unzip();

    let mut out = ComplexMatrix::zeros(dims.block_total(&keep));
    for i in 0..n {
        for j in 0..n {
            if traced_idx[i] == traced_idx[j] {
                out[(kept_idx[i], kept_idx[j])] += m[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Transposes the listed factors, leaving the others untouched.
pub fn partial_transpose(m: &ComplexMatrix, dims: &DimsSpec, transposed: &[usize]) -> Result<ComplexMatrix> {
    dims.check_matrix(m)?;
    let transposed = dims.check_factor_set(transposed, "transposed")?;
    let n = m.dim();
    let digits: Vec<Vec<usize>> = (0..n).map(|i| dims.digits(i)).collect();
    let mut out = ComplexMatrix::zeros(n);
    let mut row = vec![0; dims.len()];
    let mut col = vec![0; dims.len()];
    for i in 0..n {
        for j in 0..n {
            row.copy_from_slice(&digits[i]);
            col.copy_from_slice(&digits[j]);
            for &k in &transposed {
                std::mem::swap(&mut row[k], &mut col[k]);
            }
            out[(dims.index_of(&row), dims.index_of(&col))] = m[(i, j)];
        }
    }
    Ok(out)
}

/// Reorders tensor factors: factor `k` of the result is factor `order[k]`
/// of the input.
pub fn permute_factors(m: &ComplexMatrix, dims: &DimsSpec, order: &[usize]) -> Result<(ComplexMatrix, DimsSpec)> {
    dims.check_matrix(m)?;
    let sorted = dims.check_factor_set(order, "order")?;
    if sorted.len() != dims.len() {
        return Err(Error::InvalidArgument(format!(
            "order {order:?} is not a permutation of {} factors",
            dims.len()
        )));
    }
    let new_dims = DimsSpec::new(order.iter().map(|&k| dims.factors()[k]).collect())?;
    let n = m.dim();
    let map: Vec<usize> = (0..n)
        .map(|i| {
            let d = dims.digits(i);
            let permuted: Vec<usize> = order.iter().map(|&k| d[k]).collect();
            new_dims.index_of(&permuted)
        })
        .collect();
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out[(map[i], map[j])] = m[(i, j)];
        }
    }
    Ok((out, new_dims))
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<C64>>,
}

fn checked_hermitian(m: &ComplexMatrix) -> Result<DMatrix<C64>> {
    let deviation = m.hermitian_deviation();
    if deviation.is_nan() || deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(m.hermitian_part().into_dmatrix())
}

pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let eig = checked_hermitian(m)?.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| eig.eigenvectors.column(k).iter().copied().collect())
        .collect();
    Ok(HermitianEigen { values, vectors })
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let mut values: Vec<f64> = checked_hermitian(m)?.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?[0])
}
