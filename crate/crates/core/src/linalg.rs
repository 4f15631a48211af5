//! Dense row-major matrices and the symmetric eigensolver every matrix
//! function in the crate is built on.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![T::one(); n])
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == T::zero() {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o = *o + a * b;
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.cols, x.len(), "apply shape mismatch");
        (0..self.rows)
            .map(|i| dot(self.row(i), x))
            .collect()
    }

    /// `self * inner * self`, exactly symmetrized. Intended for symmetric
    /// `self` and `inner`, as in whitening `Y^{-1/2} X Y^{-1/2}`.
    pub fn sandwich(&self, inner: &Self) -> Self {
        self.matmul(inner).matmul(self).symmetrized()
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    /// `self += s * other`
    pub fn add_scaled(&mut self, s: T, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + s * b;
        }
    }

    pub fn trace(&self) -> T {
        self.diagonal().into_iter().sum()
    }

    pub fn frobenius_dot(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        dot(&self.data, &other.data)
    }

    pub fn frobenius_norm(&self) -> T {
        self.frobenius_dot(self).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    /// `(A + Aᵀ) / 2`
    pub fn symmetrized(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| {
            if i == j {
                self[(i, i)]
            } else {
                (self[(i, j)] + self[(j, i)]) * half
            }
        })
    }
}

#[inline]
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub fn norm2<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Mul for &Mat<T> {
    type Output = Mat<T>;

    fn mul(self, rhs: &Mat<T>) -> Mat<T> {
        self.matmul(rhs)
    }
}

impl<T: Scalar> Add for &Mat<T> {
    type Output = Mat<T>;

    fn add(self, rhs: &Mat<T>) -> Mat<T> {
        let mut out = self.clone();
        out.add_scaled(T::one(), rhs);
        out
    }
}

impl<T: Scalar> Sub for &Mat<T> {
    type Output = Mat<T>;

    fn sub(self, rhs: &Mat<T>) -> Mat<T> {
        let mut out = self.clone();
        out.add_scaled(-T::one(), rhs);
        out
    }
}

impl<T: fmt::Debug> fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for r in self.data.chunks(self.cols.max(1)) {
            writeln!(f, "  {r:?}")?;
        }
        write!(f, "]")
    }
}

/// Eigendecomposition `A = Q diag(values) Qᵀ` of a symmetric matrix.
///
/// Eigenvalues are sorted ascending; column `k` of `vectors` belongs to
/// `values[k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair<T> {
    pub values: Vec<T>,
    pub vectors: Mat<T>,
}

impl<T: Scalar> EigenPair<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn min_value(&self) -> T {
        self.values[0]
    }

    pub fn max_value(&self) -> T {
        self.values[self.values.len() - 1]
    }

    /// `Q diag(f(λ)) Qᵀ`, computed on the upper triangle and mirrored so the
    /// result is exactly symmetric.
    pub fn map(&self, f: impl Fn(T) -> T) -> Mat<T> {
        let fv: Vec<T> = self.values.iter().map(|&l| f(l)).collect();
        self.map_values(&fv)
    }

    /// `Q diag(values) Qᵀ` for a replacement spectrum.
    pub fn map_values(&self, fv: &[T]) -> Mat<T> {
        let n = self.dim();
        let q = &self.vectors;
        let mut out = Mat::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = T::zero();
                for (k, &fk) in fv.iter().enumerate() {
                    acc = acc + q[(i, k)] * fk * q[(j, k)];
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> Mat<T> {
        self.map_values(&self.values)
    }
}

const MAX_SWEEPS: usize = 100;

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Only the upper triangle of `a` is read. Deterministic for a given input.
pub fn sym_eig<T: Scalar>(a: &Mat<T>) -> Result<EigenPair<T>> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.rows();
    let mut a = a.clone();
    let mut v = Mat::<T>::identity(n);
    let mut d = a.diagonal();
    let mut b = d.clone();
    let mut z = vec![T::zero(); n];
    let hundred = T::lit(100.0);
    let nn = T::from_usize_lossy(n * n);

    for sweep in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off = off + a[(p, q)].abs();
            }
        }
        if off == T::zero() {
            return Ok(sorted(d, v));
        }
        let thresh = if sweep < 3 {
            T::lit(0.2) * off / nn
        } else {
            T::zero()
        };
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let g = hundred * apq.abs();
                if sweep > 3 && d[p].abs() + g == d[p].abs() && d[q].abs() + g == d[q].abs() {
                    a[(p, q)] = T::zero();
                } else if apq.abs() > thresh {
                    let h = d[q] - d[p];
                    let t = if h.abs() + g == h.abs() {
                        apq / h
                    } else {
                        let theta = T::lit(0.5) * h / apq;
                        let t = T::one() / (theta.abs() + (T::one() + theta * theta).sqrt());
                        if theta < T::zero() {
                            -t
                        } else {
                            t
                        }
                    };
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = t * c;
                    let tau = s / (T::one() + c);
                    let h = t * apq;
                    z[p] = z[p] - h;
                    z[q] = z[q] + h;
                    d[p] = d[p] - h;
                    d[q] = d[q] + h;
                    a[(p, q)] = T::zero();
                    let rot = |m: &mut Mat<T>, i: usize, j: usize, k: usize, l: usize| {
                        let g = m[(i, j)];
                        let h = m[(k, l)];
                        m[(i, j)] = g - s * (h + g * tau);
                        m[(k, l)] = h + s * (g - h * tau);
                    };
                    for j in 0..p {
                        rot(&mut a, j, p, j, q);
                    }
                    for j in p + 1..q {
                        rot(&mut a, p, j, j, q);
                    }
                    for j in q + 1..n {
                        rot(&mut a, p, j, q, j);
                    }
                    for j in 0..n {
                        rot(&mut v, j, p, j, q);
                    }
                }
            }
        }
        for p in 0..n {
            b[p] = b[p] + z[p];
            d[p] = b[p];
            z[p] = T::zero();
        }
    }

    let mut off = T::zero();
    for p in 0..n {
        for q in p + 1..n {
            off = off + a[(p, q)] * a[(p, q)];
        }
    }
    Err(Error::EigenNonConvergence {
        sweeps: MAX_SWEEPS,
        off_diagonal: off.sqrt().to_f64_lossy(),
    })
}

fn sorted<T: Scalar>(d: Vec<T>, v: Mat<T>) -> EigenPair<T> {
    let n = d.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).expect("finite eigenvalues"));
    let values = order.iter().map(|&k| d[k]).collect();
    let vectors = Mat::from_fn(n, n, |i, j| v[(i, order[j])]);
    EigenPair { values, vectors }
}

/// Minimum-norm solution of a symmetric (possibly singular or indefinite)
/// linear system, via the eigendecomposition pseudo-inverse.
pub fn sym_pinv_solve<T: Scalar>(a: &Mat<T>, rhs: &[T]) -> Result<Vec<T>> {
    let eig = sym_eig(a)?;
    let n = eig.dim();
    let scale = eig
        .values
        .iter()
        .fold(T::zero(), |m, l| m.max(l.abs()));
    let cutoff = scale * T::epsilon() * T::from_usize_lossy(n.max(1)) * T::lit(16.0);
    let mut x = vec![T::zero(); n];
    for (k, &l) in eig.values.iter().enumerate() {
        if l.abs() <= cutoff {
            continue;
        }
        let qk = eig.vectors.column(k);
        let coef = dot(&qk, rhs) / l;
        for (xi, &qi) in x.iter_mut().zip(&qk) {
            *xi = *xi + coef * qi;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn check_reconstruction(a: &Mat<f64>, eig: &EigenPair<f64>) {
        let q = &eig.vectors;
        let err = (&eig.reconstruct() - a).frobenius_norm();
        assert!(err <= 1e-12 * a.frobenius_norm().max(1.0), "reconstruction {err}");
        let orth = (&q.transpose().matmul(q) - &Mat::identity(a.rows())).frobenius_norm();
        assert!(orth <= 1e-12, "orthogonality {orth}");
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let eig = sym_eig(&Mat::<f64>::identity(2)).unwrap();
        assert_eq!(eig.values, vec![1.0, 1.0]);
        check_reconstruction(&Mat::identity(2), &eig);
    }

    #[test]
    fn diagonal_is_sorted_ascending() {
        let a = Mat::from_diagonal(&[3.0, 1.0]);
        let eig = sym_eig(&a).unwrap();
        assert_eq!(eig.values, vec![1.0, 3.0]);
        check_reconstruction(&a, &eig);
    }

    #[test]
    fn two_by_two_characteristic_polynomial() {
        // λ² - 4λ + 3 = 0
        let a = Mat::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let eig = sym_eig(&a).unwrap();
        assert_abs_diff_eq!(eig.values[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(eig.values[1], 3.0, epsilon = 1e-14);
        check_reconstruction(&a, &eig);
    }

    #[test]
    fn larger_matrix_reconstructs() {
        let a = Mat::from_fn(7, 7, |i, j| {
            let (i, j) = (i as f64, j as f64);
            (i * j + 1.0).sin() + (i + j).cos()
        });
        let eig = sym_eig(&a).unwrap();
        check_reconstruction(&a, &eig);
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rejects_non_square_and_nan() {
        assert!(matches!(
            sym_eig(&Mat::<f64>::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
        let mut a = Mat::<f64>::identity(2);
        a[(0, 1)] = f64::NAN;
        assert_eq!(sym_eig(&a), Err(Error::NonFinite));
    }

    #[test]
    fn pinv_solves_singular_consistent_system() {
        let a = Mat::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        let x = sym_pinv_solve(&a, &[2.0, 2.0]).unwrap();
        assert_abs_diff_eq!(x[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(x[1], 1.0, epsilon = 1e-14);
    }
}
