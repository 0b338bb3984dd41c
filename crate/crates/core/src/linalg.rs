//! Small dense linear algebra on slices.
//!
//! Hot paths (gauges, projections) stay generic and allocation-light;
//! factorizations that only run at construction time go through nalgebra in f64.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{invalid, Result};
use crate::scalar::Scalar;

#[inline]
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

/// Euclidean norm. Every gauge that reduces to a euclidean length calls this,
/// so ratios like `|x| / |x|` evaluate to exactly one.
#[inline]
pub fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

#[inline]
pub fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale_in_place<T: Scalar>(x: &mut [T], s: T) {
    x.iter_mut().for_each(|v| *v *= s);
}

pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn add<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn from_rows(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(invalid(format!(
                "matrix data has {} entries, expected {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn diagonal(d: &[T]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in d.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
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
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.rows];
        self.matvec_into(x, &mut out);
        out
    }

    pub fn matvec_into(&self, x: &[T], out: &mut [T]) {
        debug_assert_eq!(x.len(), self.cols);
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(i), x);
        }
    }

    /// `Aᵀ x`.
    pub fn tmatvec(&self, x: &[T]) -> Vec<T> {
        debug_assert_eq!(x.len(), self.rows);
        let mut out = vec![T::zero(); self.cols];
        for (i, &xi) in x.iter().enumerate() {
            axpy(xi, self.row(i), &mut out);
        }
        out
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol)
            })
    }

    fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).as_f64())
    }

    fn from_nalgebra(m: &DMatrix<f64>) -> Self {
        let (rows, cols) = m.shape();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(T::lit(m[(i, j)]));
            }
        }
        Self { rows, cols, data }
    }

    /// Lower Cholesky factor `L` with `self = L Lᵀ`, or `None` if not positive definite.
    pub fn cholesky(&self) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let c = self.to_nalgebra().cholesky()?;
        Some(Self::from_nalgebra(&c.l()))
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        self.to_nalgebra().try_inverse().map(|m| Self::from_nalgebra(&m))
    }

    pub fn determinant(&self) -> T {
        T::lit(self.to_nalgebra().determinant())
    }

    /// Solves `L z = b` for lower triangular `L` (forward substitution).
    pub fn solve_lower(&self, b: &[T]) -> Vec<T> {
        let n = self.rows;
        let mut z = vec![T::zero(); n];
        for i in 0..n {
            let mut s = b[i];
            for j in 0..i {
                s -= self.get(i, j) * z[j];
            }
            z[i] = s / self.get(i, i);
        }
        z
    }

    /// Solves `Lᵀ z = b` for lower triangular `L` (back substitution).
    pub fn solve_lower_transpose(&self, b: &[T]) -> Vec<T> {
        let n = self.rows;
        let mut z = vec![T::zero(); n];
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in i + 1..n {
                s -= self.get(j, i) * z[j];
            }
            z[i] = s / self.get(i, i);
        }
        z
    }

    /// `Lᵀ x` for lower triangular `L`.
    pub fn lower_transpose_mul(&self, x: &[T]) -> Vec<T> {
        let n = self.rows;
        (0..n)
            .map(|i| {
                let mut s = T::zero();
                for j in i..n {
                    s += self.get(j, i) * x[j];
                }
                s
            })
            .collect()
    }
}

/// Orthogonalizes `v` against every vector in `basis` (modified Gram-Schmidt),
/// twice, and returns the residual norm.
pub fn orthogonalize<T: Scalar>(v: &mut [T], basis: &[Vec<T>]) -> T {
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, v);
            axpy(-c, q, v);
        }
    }
    norm(v)
}

/// Orthonormal basis of a Haar-random `k`-dimensional subspace of `R^n`:
/// gaussian vectors, modified Gram-Schmidt with one reorthogonalization pass.
/// A vector that collapses numerically is redrawn.
pub fn haar_frame<T: Scalar, R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<Vec<T>> {
    let mut basis: Vec<Vec<T>> = Vec::with_capacity(k);
    let floor = T::lit(1e-10);
    while basis.len() < k {
        let mut v: Vec<T> = (0..n).map(|_| T::standard_normal(rng)).collect();
        let before = norm(&v);
        let after = orthogonalize(&mut v, &basis);
        if after <= floor * before {
            continue;
        }
        scale_in_place(&mut v, T::one() / after);
        basis.push(v);
    }
    basis
}

/// Completes an orthonormal family to a basis of `R^n`, returning only the new vectors.
///
/// Candidates are the standard basis vectors; at each step the one with the
/// largest residual is taken, so the result is deterministic and well conditioned.
pub fn orthonormal_complement<T: Scalar>(n: usize, basis: &[Vec<T>]) -> Vec<Vec<T>> {
    let missing = n - basis.len();
    let mut residuals: Vec<Vec<T>> = (0..n)
        .map(|i| {
            let mut e = vec![T::zero(); n];
            e[i] = T::one();
            for q in basis {
                let c = q[i];
                axpy(-c, q, &mut e);
            }
            e
        })
        .collect();
    let mut out: Vec<Vec<T>> = Vec::with_capacity(missing);
    let mut used = vec![false; n];
    for _ in 0..missing {
        let (best, _) = residuals
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, r)| (i, dot(r, r)))
            .fold((usize::MAX, T::neg_infinity()), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        used[best] = true;
        let mut v = residuals[best].clone();
        orthogonalize(&mut v, basis);
        let nv = orthogonalize(&mut v, &out);
        scale_in_place(&mut v, T::one() / nv);
        for (i, r) in residuals.iter_mut().enumerate() {
            if !used[i] {
                let c = dot(&v, r);
                axpy(-c, &v, r);
            }
        }
        out.push(v);
    }
    out
}
