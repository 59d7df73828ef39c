//! Dense symmetric positive-definite linear algebra.
//!
//! Everything here is row-major and `O(n³)` dense; Gram matrices in this
//! crate are small enough that nothing fancier is needed.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense row-major rectangular matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

/// Square matrix whose symmetry holds by construction: every write goes to
/// both `(i, j)` and `(j, i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> SymMatrix<T> {
    pub fn zeros(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        Ok(Self {
            n,
            data: vec![T::zero(); n * n],
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            m.set(i, i, T::one());
        }
        Ok(m)
    }

    /// Builds the matrix from `f(i, j)` evaluated once per unordered pair `i <= j`.
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            for j in i..n {
                m.set(i, j, f(i, j));
            }
        }
        Ok(m)
    }

    /// Takes explicit rows; rejects anything that is not square and exactly symmetric.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::zeros(n)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v != rows[j][i] {
                    return Err(Error::InvalidArgument(format!("matrix not symmetric at ({i}, {j})")));
                }
                m.data[i * n + j] = v;
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    /// Writes `v` at `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn add_diagonal(&mut self, shift: T) {
        for i in 0..self.n {
            self.data[i * self.n + i] = self.data[i * self.n + i] + shift;
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Result<Vec<T>> {
        check_len(self.n, x.len())?;
        Ok((0..self.n)
            .map(|i| dot(&self.data[i * self.n..(i + 1) * self.n], x))
            .collect())
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }
}

/// Diagonal-shift schedule tried when a factorization fails.
///
/// Attempts run with shift `0` first, then `initial · growth_factor^k` for
/// `k = 0..max_attempts`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JitterPolicy<T> {
    pub initial: T,
    pub growth_factor: T,
    pub max_attempts: usize,
}

impl<T: Scalar> Default for JitterPolicy<T> {
    fn default() -> Self {
        Self {
            initial: T::lit(1e-10),
            growth_factor: T::lit(10.0),
            max_attempts: 8,
        }
    }
}

impl<T: Scalar> JitterPolicy<T> {
    pub fn none() -> Self {
        Self {
            initial: T::zero(),
            growth_factor: T::lit(10.0),
            max_attempts: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.initial >= T::zero()) || !self.initial.is_finite() {
            return Err(Error::InvalidArgument("jitter initial must be >= 0".into()));
        }
        if !(self.growth_factor > T::one()) {
            return Err(Error::InvalidArgument("jitter growth factor must be > 1".into()));
        }
        if self.max_attempts == 0 {
            return Err(Error::InvalidArgument("jitter max_attempts must be >= 1".into()));
        }
        Ok(())
    }

    /// The shifts in the order they are tried.
    pub fn shifts(&self) -> Vec<T> {
        let mut out = vec![T::zero()];
        if self.initial > T::zero() {
            let mut s = self.initial;
            for _ in 0..self.max_attempts {
                out.push(s);
                s = s * self.growth_factor;
            }
        }
        out
    }
}

/// Lower-triangular factor `L` with `L·Lᵀ = A + applied_jitter·I`.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor<T> {
    n: usize,
    lower: Vec<T>,
    applied_jitter: T,
}

impl<T: Scalar> CholeskyFactor<T> {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn applied_jitter(&self) -> T {
        self.applied_jitter
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.lower[i * self.n + j]
    }

    /// Solves `L·z = b`.
    pub fn forward_solve(&self, b: &[T]) -> Result<Vec<T>> {
        check_len(self.n, b.len())?;
        let n = self.n;
        let mut z = b.to_vec();
        for i in 0..n {
            let row = &self.lower[i * n..i * n + i];
            let s = z[i] - dot(row, &z[..i]);
            z[i] = s / self.lower[i * n + i];
        }
        Ok(z)
    }

    /// Solves `Lᵀ·x = z`.
    pub fn backward_solve(&self, z: &[T]) -> Result<Vec<T>> {
        check_len(self.n, z.len())?;
        let n = self.n;
        let mut x = z.to_vec();
        for i in (0..n).rev() {
            let mut s = x[i];
            for (k, &xk) in x.iter().enumerate().skip(i + 1) {
                s = s - self.lower[k * n + i] * xk;
            }
            x[i] = s / self.lower[i * n + i];
        }
        Ok(x)
    }

    /// Dense `L·Lᵀ`.
    pub fn reconstruct(&self) -> SymMatrix<T> {
        let n = self.n;
        SymMatrix::from_upper_fn(n, |i, j| {
            let k = i.min(j) + 1;
            dot(&self.lower[i * n..i * n + k], &self.lower[j * n..j * n + k])
        })
        .expect("factor dimension is at least one")
    }
}

/// Cholesky factorization with adaptive diagonal jitter.
///
/// Tries the shifts of `policy` in increasing order and returns the first
/// that yields strictly positive pivots.
pub fn cholesky<T: Scalar>(a: &SymMatrix<T>, policy: &JitterPolicy<T>) -> Result<CholeskyFactor<T>> {
    policy.validate()?;
    if a.data.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let shifts = policy.shifts();
    for &shift in &shifts {
        if let Some(lower) = try_factor(a, shift) {
            return Ok(CholeskyFactor {
                n: a.n,
                lower,
                applied_jitter: shift,
            });
        }
    }
    Err(Error::NotPositiveDefinite {
        attempts: shifts.len(),
        last_jitter: shifts.last().map_or(0.0, |s| s.to_f64_lossy()),
    })
}

fn try_factor<T: Scalar>(a: &SymMatrix<T>, shift: T) -> Option<Vec<T>> {
    let n = a.n;
    let mut l = vec![T::zero(); n * n];
    for j in 0..n {
        let diag = a.get(j, j) + shift - dot(&l[j * n..j * n + j], &l[j * n..j * n + j]);
        if !(diag > T::zero()) || !diag.is_finite() {
            return None;
        }
        let ljj = diag.sqrt();
        l[j * n + j] = ljj;
        for i in j + 1..n {
            let s = a.get(i, j) - dot(&l[i * n..i * n + j], &l[j * n..j * n + j]);
            l[i * n + j] = s / ljj;
        }
    }
    Some(l)
}

/// Solves `(L·Lᵀ)·x = b` by forward then backward substitution.
pub fn solve_cholesky<T: Scalar>(f: &CholeskyFactor<T>, b: &[T]) -> Result<Vec<T>> {
    let z = f.forward_solve(b)?;
    f.backward_solve(&z)
}

/// `2·Σ ln L[i][i]`.
pub fn log_det<T: Scalar>(f: &CholeskyFactor<T>) -> T {
    let two = T::lit(2.0);
    two * (0..f.n).map(|i| f.get(i, i).ln()).sum::<T>()
}

#[inline]
pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
