//! Symmetric and symmetric positive definite matrices, spectral matrix
//! functions, and the affine-invariant Riemannian geometry on SPD matrices.
//!
//! Every matrix function goes through [`sym_eig`]: for `A = Q Λ Qᵀ`,
//! `f(A) = Q f(Λ) Qᵀ`. SPD matrices cache their eigendecomposition, so
//! repeated `log`/`sqrt`/`inv_sqrt` calls on the same point cost one
//! decomposition.

use std::cmp::Ordering;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{sym_eig, EigenPair, Mat};
use crate::scalar::Scalar;

/// Relative tolerance on `|a_ij - a_ji|` accepted (and then symmetrized away)
/// by the constructors.
pub const SYM_TOL: f64 = 1e-9;

/// Eigenvalues must exceed `PD_FLOOR_REL * max(λ_max, 1)`.
pub const PD_FLOOR_REL: f64 = 1e-12;

/// The positive-definiteness floor for a matrix with largest eigenvalue
/// `max_eigenvalue`.
pub fn pd_floor<T: Scalar>(max_eigenvalue: T) -> T {
    T::lit(PD_FLOOR_REL) * max_eigenvalue.max(T::one())
}

fn check_symmetric<T: Scalar>(m: &Mat<T>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let tol = T::lit(SYM_TOL);
    for i in 0..m.rows() {
        for j in i + 1..m.cols() {
            let dev = (m[(i, j)] - m[(j, i)]).abs();
            if dev > tol * m[(i, j)].abs().max(T::one()) {
                return Err(Error::NotSymmetric {
                    row: i,
                    col: j,
                    deviation: dev.to_f64_lossy(),
                });
            }
        }
    }
    Ok(())
}

fn check_floor<T: Scalar>(eig: &EigenPair<T>) -> Result<()> {
    let floor = pd_floor(eig.max_value());
    if eig.min_value() <= floor {
        return Err(Error::DegenerateMatrix {
            min_eigenvalue: eig.min_value().to_f64_lossy(),
            floor: floor.to_f64_lossy(),
        });
    }
    Ok(())
}

fn ensure_same_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Symmetric `d×d` matrix; a tangent vector at an SPD point.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix<T> {
    mat: Mat<T>,
}

impl<T: Scalar> SymMatrix<T> {
    /// Validates symmetry to [`SYM_TOL`] and symmetrizes.
    pub fn new(mat: Mat<T>) -> Result<Self> {
        check_symmetric(&mat)?;
        Ok(Self {
            mat: mat.symmetrized(),
        })
    }

    pub fn from_row_major(dim: usize, entries: Vec<T>) -> Result<Self> {
        Self::new(Mat::from_row_major(dim, dim, entries)?)
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: Mat::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: Mat::identity(dim),
        }
    }

    /// Wraps a matrix already known to be exactly symmetric.
    pub(crate) fn from_mat_unchecked(mat: Mat<T>) -> Self {
        debug_assert!(mat.is_square());
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn as_mat(&self) -> &Mat<T> {
        &self.mat
    }

    pub fn into_mat(self) -> Mat<T> {
        self.mat
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_mat_unchecked(self.mat.scale(s))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        ensure_same_dim(self.dim(), other.dim())?;
        Ok(Self::from_mat_unchecked(&self.mat + &other.mat))
    }

    pub fn frobenius_norm(&self) -> T {
        self.mat.frobenius_norm()
    }

    pub fn eigen(&self) -> Result<EigenPair<T>> {
        sym_eig(&self.mat)
    }

    /// Matrix exponential; always SPD.
    pub fn exp(&self) -> Result<SpdMatrix<T>> {
        let eig = self.eigen()?;
        let values = eig.values.iter().map(|l| l.exp()).collect();
        Ok(SpdMatrix::from_spectrum(values, eig.vectors))
    }
}

/// Symmetric positive definite `d×d` matrix.
#[derive(Clone)]
pub struct SpdMatrix<T> {
    mat: Mat<T>,
    eig: OnceLock<Result<EigenPair<T>>>,
}

impl<T: Scalar> SpdMatrix<T> {
    /// Validates symmetry and positive definiteness (smallest eigenvalue above
    /// [`pd_floor`]).
    pub fn new(mat: Mat<T>) -> Result<Self> {
        check_symmetric(&mat)?;
        let mat = mat.symmetrized();
        let eig = sym_eig(&mat)?;
        let floor = pd_floor(eig.max_value());
        if eig.min_value() <= floor {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: eig.min_value().to_f64_lossy(),
                floor: floor.to_f64_lossy(),
            });
        }
        Ok(Self {
            mat,
            eig: OnceLock::from(Ok(eig)),
        })
    }

    pub fn from_row_major(dim: usize, entries: Vec<T>) -> Result<Self> {
        Self::new(Mat::from_row_major(dim, dim, entries)?)
    }

    pub fn from_diagonal(diag: &[T]) -> Result<Self> {
        Self::new(Mat::from_diagonal(diag))
    }

    pub fn from_sym(sym: SymMatrix<T>) -> Result<Self> {
        Self::new(sym.mat)
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_spectrum(vec![T::one(); dim], Mat::identity(dim))
    }

    /// Builds `Q diag(values) Qᵀ` and keeps the decomposition. `values` must be
    /// positive.
    pub(crate) fn from_spectrum(values: Vec<T>, vectors: Mat<T>) -> Self {
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap_or(Ordering::Equal));
        let eig = EigenPair {
            values: order.iter().map(|&k| values[k]).collect(),
            vectors: Mat::from_fn(n, n, |i, j| vectors[(i, order[j])]),
        };
        Self {
            mat: eig.reconstruct(),
            eig: OnceLock::from(Ok(eig)),
        }
    }

    /// Wraps an exactly symmetric matrix produced by a manifold operation;
    /// the decomposition (and with it the floor check) is deferred to the
    /// first spectral function call.
    pub(crate) fn from_mat_unchecked(mat: Mat<T>) -> Self {
        debug_assert!(mat.is_square());
        Self {
            mat,
            eig: OnceLock::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn as_mat(&self) -> &Mat<T> {
        &self.mat
    }

    pub fn into_mat(self) -> Mat<T> {
        self.mat
    }

    pub fn to_sym(&self) -> SymMatrix<T> {
        SymMatrix::from_mat_unchecked(self.mat.clone())
    }

    /// Cached eigendecomposition.
    pub fn eigen(&self) -> Result<&EigenPair<T>> {
        self.eig
            .get_or_init(|| sym_eig(&self.mat))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn checked_eigen(&self) -> Result<&EigenPair<T>> {
        let eig = self.eigen()?;
        check_floor(eig)?;
        Ok(eig)
    }

    pub fn min_eigenvalue(&self) -> Result<T> {
        Ok(self.eigen()?.min_value())
    }

    pub fn log(&self) -> Result<SymMatrix<T>> {
        let eig = self.checked_eigen()?;
        Ok(SymMatrix::from_mat_unchecked(eig.map(|l| l.ln())))
    }

    pub fn sqrt(&self) -> Result<SpdMatrix<T>> {
        let eig = self.checked_eigen()?;
        Ok(Self::from_spectrum(
            eig.values.iter().map(|l| l.sqrt()).collect(),
            eig.vectors.clone(),
        ))
    }

    pub fn inv_sqrt(&self) -> Result<SpdMatrix<T>> {
        let eig = self.checked_eigen()?;
        Ok(Self::from_spectrum(
            eig.values.iter().map(|l| l.sqrt().recip()).collect(),
            eig.vectors.clone(),
        ))
    }

    pub fn inv(&self) -> Result<SpdMatrix<T>> {
        let eig = self.checked_eigen()?;
        Ok(Self::from_spectrum(
            eig.values.iter().map(|l| l.recip()).collect(),
            eig.vectors.clone(),
        ))
    }

    /// `A^p` for real `p`.
    pub fn powf(&self, p: T) -> Result<SpdMatrix<T>> {
        let eig = self.checked_eigen()?;
        Ok(Self::from_spectrum(
            eig.values.iter().map(|l| l.powf(p)).collect(),
            eig.vectors.clone(),
        ))
    }

    /// Tangent-space helper at this point, holding `Y^{1/2}` and `Y^{-1/2}`.
    pub fn frame(&self) -> Result<TangentFrame<T>> {
        TangentFrame::new(self)
    }
}

impl<T: Scalar> PartialEq for SpdMatrix<T> {
    fn eq(&self, other: &Self) -> bool {
        self.mat == other.mat
    }
}

impl<T: std::fmt::Debug> std::fmt::Debug for SpdMatrix<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpdMatrix").field("mat", &self.mat).finish()
    }
}

/// Spectral function applied eigenvalue-wise to a symmetric matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralFn {
    Exp,
    Log,
    Sqrt,
    InvSqrt,
    Inv,
}

/// `Q f(Λ) Qᵀ`. Every function except [`SpectralFn::Exp`] requires the input
/// to clear the positive-definiteness floor.
pub fn spectral_fn<T: Scalar>(a: &SymMatrix<T>, f: SpectralFn) -> Result<Mat<T>> {
    let eig = a.eigen()?;
    if f != SpectralFn::Exp {
        check_floor(&eig)?;
    }
    Ok(match f {
        SpectralFn::Exp => eig.map(|l| l.exp()),
        SpectralFn::Log => eig.map(|l| l.ln()),
        SpectralFn::Sqrt => eig.map(|l| l.sqrt()),
        SpectralFn::InvSqrt => eig.map(|l| l.sqrt().recip()),
        SpectralFn::Inv => eig.map(|l| l.recip()),
    })
}

/// Tangent space at a base point `Y`, with `Y^{±1/2}` computed once.
///
/// Whitening `X ↦ Y^{-1/2} X Y^{-1/2}` moves the base point to the identity,
/// where the affine-invariant inner product becomes the Frobenius one.
#[derive(Clone, Debug)]
pub struct TangentFrame<T> {
    base: SpdMatrix<T>,
    sqrt: Mat<T>,
    inv_sqrt: Mat<T>,
}

impl<T: Scalar> TangentFrame<T> {
    pub fn new(base: &SpdMatrix<T>) -> Result<Self> {
        let eig = base.checked_eigen()?;
        Ok(Self {
            base: base.clone(),
            sqrt: eig.map(|l| l.sqrt()),
            inv_sqrt: eig.map(|l| l.sqrt().recip()),
        })
    }

    pub fn base(&self) -> &SpdMatrix<T> {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn sqrt(&self) -> &Mat<T> {
        &self.sqrt
    }

    pub fn inv_sqrt(&self) -> &Mat<T> {
        &self.inv_sqrt
    }

    /// `Y^{-1/2} X Y^{-1/2}`
    pub fn whiten(&self, x: &Mat<T>) -> Mat<T> {
        self.inv_sqrt.sandwich(x)
    }

    /// `Y^{1/2} S Y^{1/2}`
    pub fn unwhiten(&self, s: &Mat<T>) -> Mat<T> {
        self.sqrt.sandwich(s)
    }

    /// Eigendecomposition of the whitened point `Y^{-1/2} X Y^{-1/2}`, with
    /// the floor check applied.
    pub fn whitened_eigen(&self, x: &SpdMatrix<T>) -> Result<EigenPair<T>> {
        ensure_same_dim(self.dim(), x.dim())?;
        let eig = sym_eig(&self.whiten(x.as_mat()))?;
        check_floor(&eig)?;
        Ok(eig)
    }

    /// `log(Y^{-1/2} X Y^{-1/2})`: the log map at `Y` expressed in whitened
    /// coordinates.
    pub fn whitened_log(&self, x: &SpdMatrix<T>) -> Result<Mat<T>> {
        Ok(self.whitened_eigen(x)?.map(|l| l.ln()))
    }

    pub fn log_map(&self, x: &SpdMatrix<T>) -> Result<SymMatrix<T>> {
        Ok(SymMatrix::from_mat_unchecked(
            self.unwhiten(&self.whitened_log(x)?),
        ))
    }

    /// Exponential map of a whitened tangent vector.
    pub fn exp_whitened(&self, s: &Mat<T>) -> Result<SpdMatrix<T>> {
        let e = sym_eig(s)?.map(|l| l.exp());
        Ok(SpdMatrix::from_mat_unchecked(self.unwhiten(&e)))
    }

    pub fn exp_map(&self, z: &SymMatrix<T>) -> Result<SpdMatrix<T>> {
        ensure_same_dim(self.dim(), z.dim())?;
        self.exp_whitened(&self.whiten(z.as_mat()))
    }

    pub fn inner(&self, x: &SymMatrix<T>, z: &SymMatrix<T>) -> Result<T> {
        ensure_same_dim(self.dim(), x.dim())?;
        ensure_same_dim(self.dim(), z.dim())?;
        Ok(self.whiten(x.as_mat()).frobenius_dot(&self.whiten(z.as_mat())))
    }

    /// Affine-invariant norm of a tangent vector.
    pub fn norm(&self, x: &SymMatrix<T>) -> Result<T> {
        ensure_same_dim(self.dim(), x.dim())?;
        Ok(self.whiten(x.as_mat()).frobenius_norm())
    }

    /// Geodesic distance from the base point.
    pub fn dist(&self, x: &SpdMatrix<T>) -> Result<T> {
        let eig = self.whitened_eigen(x)?;
        Ok(eig
            .values
            .iter()
            .map(|l| {
                let g = l.ln();
                g * g
            })
            .sum::<T>()
            .sqrt())
    }

    /// Point at parameter `t` on the geodesic from the base point through `x`.
    pub fn geodesic(&self, x: &SpdMatrix<T>, t: T) -> Result<SpdMatrix<T>> {
        if t == T::zero() {
            return Ok(self.base.clone());
        }
        let eig = self.whitened_eigen(x)?;
        let p = eig.map(|l| (t * l.ln()).exp());
        Ok(SpdMatrix::from_mat_unchecked(self.unwhiten(&p)))
    }
}

/// Affine-invariant inner product `Tr(Y⁻¹ x Y⁻¹ z)` on the tangent space at `y`.
pub fn airm_inner<T: Scalar>(y: &SpdMatrix<T>, x: &SymMatrix<T>, z: &SymMatrix<T>) -> Result<T> {
    y.frame()?.inner(x, z)
}

/// `Y^{1/2} exp(Y^{-1/2} z Y^{-1/2}) Y^{1/2}`
pub fn exp_map<T: Scalar>(y: &SpdMatrix<T>, z: &SymMatrix<T>) -> Result<SpdMatrix<T>> {
    y.frame()?.exp_map(z)
}

/// `Y^{1/2} log(Y^{-1/2} Z Y^{-1/2}) Y^{1/2}`
pub fn log_map<T: Scalar>(y: &SpdMatrix<T>, z: &SpdMatrix<T>) -> Result<SymMatrix<T>> {
    y.frame()?.log_map(z)
}

/// Affine-invariant geodesic distance `‖log(X^{-1/2} Y X^{-1/2})‖_F`.
///
/// Arguments are put in a canonical order first so that the result is
/// bitwise symmetric.
pub fn geodesic_dist<T: Scalar>(x: &SpdMatrix<T>, y: &SpdMatrix<T>) -> Result<T> {
    ensure_same_dim(x.dim(), y.dim())?;
    let (a, b) = if lex_cmp(x.as_mat(), y.as_mat()) == Ordering::Greater {
        (y, x)
    } else {
        (x, y)
    };
    a.frame()?.dist(b)
}

fn lex_cmp<T: Scalar>(a: &Mat<T>, b: &Mat<T>) -> Ordering {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| x.partial_cmp(y).unwrap_or(Ordering::Equal))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

/// Log-Euclidean distance `‖log X − log Y‖_F`.
pub fn le_dist<T: Scalar>(x: &SpdMatrix<T>, y: &SpdMatrix<T>) -> Result<T> {
    ensure_same_dim(x.dim(), y.dim())?;
    let lx = x.log()?;
    let ly = y.log()?;
    Ok((lx.as_mat() - ly.as_mat()).frobenius_norm())
}

/// Upper-triangle vectorization `[a11, √2·a12, a22, √2·a13, √2·a23, a33, …]`,
/// an isometry from the Frobenius inner product to the Euclidean one.
pub fn le_vectorize<T: Scalar>(a: &SymMatrix<T>) -> Vec<T> {
    vectorize_upper(a.as_mat())
}

pub(crate) fn vectorize_upper<T: Scalar>(a: &Mat<T>) -> Vec<T> {
    let d = a.rows();
    let sqrt2 = T::lit(std::f64::consts::SQRT_2);
    let mut v = Vec::with_capacity(d * (d + 1) / 2);
    for j in 0..d {
        for i in 0..=j {
            v.push(if i == j { a[(i, i)] } else { sqrt2 * a[(i, j)] });
        }
    }
    v
}

/// Inverse of [`le_vectorize`].
pub fn le_unvectorize<T: Scalar>(v: &[T]) -> Result<SymMatrix<T>> {
    // d(d+1)/2 = len
    let d = ((((8 * v.len() + 1) as f64).sqrt() - 1.0) / 2.0).round() as usize;
    if d * (d + 1) / 2 != v.len() {
        return Err(Error::InvalidParameter(format!(
            "vector length {} is not triangular",
            v.len()
        )));
    }
    let inv_sqrt2 = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    let mut m = Mat::zeros(d, d);
    let mut k = 0;
    for j in 0..d {
        for i in 0..=j {
            let x = if i == j { v[k] } else { v[k] * inv_sqrt2 };
            m[(i, j)] = x;
            m[(j, i)] = x;
            k += 1;
        }
    }
    Ok(SymMatrix::from_mat_unchecked(m))
}

/// `exp_map(X, t·log_map(X, Y))`; `t > 1` extrapolates past `Y`.
pub fn geodesic_point<T: Scalar>(x: &SpdMatrix<T>, y: &SpdMatrix<T>, t: T) -> Result<SpdMatrix<T>> {
    ensure_same_dim(x.dim(), y.dim())?;
    x.frame()?.geodesic(y, t)
}
