//! Covariance descriptors built from pixel grids and feature tables.
//!
//! Derivatives are central differences; pixels on the one-pixel border are
//! skipped, so every feature row comes from a full 3×3 neighbourhood. Pixel
//! positions use `x` for the column and `y` for the row.

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::Scalar;
use crate::spd::SpdMatrix;

const MIN_GRID: usize = 5;

/// Single-channel 2-D array, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Grid<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.as_ref().len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.as_ref().len(),
                });
            }
            data.extend_from_slice(r.as_ref());
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    fn require_min(&self) -> Result<()> {
        if self.rows < MIN_GRID || self.cols < MIN_GRID {
            return Err(Error::GridTooSmall {
                rows: self.rows,
                cols: self.cols,
                min: MIN_GRID,
            });
        }
        Ok(())
    }

    /// `(∂x, ∂y, ∂²x, ∂²y)` at an interior pixel.
    fn derivatives(&self, r: usize, c: usize) -> [T; 4] {
        let half = T::lit(0.5);
        let two = T::lit(2.0);
        let v = self.get(r, c);
        let (l, rt) = (self.get(r, c - 1), self.get(r, c + 1));
        let (up, dn) = (self.get(r - 1, c), self.get(r + 1, c));
        [(rt - l) * half, (dn - up) * half, rt - two * v + l, dn - two * v + up]
    }

    /// Bilinear resampling to `rows × cols` with pixel centres aligned.
    pub fn resize(&self, rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 || self.rows == 0 || self.cols == 0 {
            return Err(Error::InvalidParameter("resize needs nonempty grids".into()));
        }
        let coord = |i: usize, out: usize, src: usize| -> (usize, usize, T) {
            let s = ((T::from_usize_lossy(i) + T::lit(0.5)) * T::from_usize_lossy(src) / T::from_usize_lossy(out)
                - T::lit(0.5))
            .max(T::zero())
            .min(T::from_usize_lossy(src - 1));
            let lo = s.floor().to_usize().unwrap_or(0).min(src - 1);
            let hi = (lo + 1).min(src - 1);
            (lo, hi, s - T::from_usize_lossy(lo))
        };
        Ok(Self::from_fn(rows, cols, |r, c| {
            let (r0, r1, fr) = coord(r, rows, self.rows);
            let (c0, c1, fc) = coord(c, cols, self.cols);
            let top = self.get(r0, c0) * (T::one() - fc) + self.get(r0, c1) * fc;
            let bot = self.get(r1, c0) * (T::one() - fc) + self.get(r1, c1) * fc;
            top * (T::one() - fr) + bot * fr
        }))
    }

    /// Divides by the population standard deviation; constant grids are
    /// returned unchanged.
    pub fn unit_variance(&self) -> Self {
        let n = T::from_usize_lossy(self.data.len());
        let mean = self.data.iter().copied().sum::<T>() / n;
        let var = self.data.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / n;
        if var <= T::zero() {
            return self.clone();
        }
        let s = var.sqrt();
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v / s).collect(),
        }
    }
}

/// Subtracts the pixel-wise mean over all frames from each frame.
pub fn subtract_mean_frame<T: Scalar>(frames: &[Grid<T>]) -> Result<Vec<Grid<T>>> {
    let first = frames.first().ok_or(Error::EmptyInput("frames"))?;
    if let Some(f) = frames.iter().find(|f| f.rows != first.rows || f.cols != first.cols) {
        return Err(Error::DimensionMismatch {
            expected: first.data.len(),
            found: f.data.len(),
        });
    }
    let n = T::from_usize_lossy(frames.len());
    let mean: Vec<T> = (0..first.data.len())
        .map(|i| frames.iter().map(|f| f.data[i]).sum::<T>() / n)
        .collect();
    Ok(frames
        .iter()
        .map(|f| Grid {
            rows: f.rows,
            cols: f.cols,
            data: f.data.iter().zip(&mean).map(|(&v, &m)| v - m).collect(),
        })
        .collect())
}

/// `M` feature vectors of a common dimension `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureTable<T> {
    rows: Mat<T>,
    pub provenance: String,
}

impl<T: Scalar> FeatureTable<T> {
    pub fn new(rows: Mat<T>, provenance: impl Into<String>) -> Result<Self> {
        if rows.rows() < 2 {
            return Err(Error::EmptyInput("feature table needs at least two rows"));
        }
        if rows.cols() == 0 {
            return Err(Error::EmptyInput("feature table needs at least one column"));
        }
        if !rows.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            rows,
            provenance: provenance.into(),
        })
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R], provenance: impl Into<String>) -> Result<Self> {
        Self::new(Mat::from_rows(rows)?, provenance)
    }

    pub fn len(&self) -> usize {
        self.rows.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.rows() == 0
    }

    pub fn feature_dim(&self) -> usize {
        self.rows.cols()
    }

    pub fn row(&self, i: usize) -> &[T] {
        self.rows.row(i)
    }

    pub fn as_mat(&self) -> &Mat<T> {
        &self.rows
    }

    /// Sample covariance with `1/(M−1)` normalization.
    pub fn covariance(&self) -> Mat<T> {
        let (m, k) = (self.rows.rows(), self.rows.cols());
        let mut mean = vec![T::zero(); k];
        for i in 0..m {
            for (mu, &v) in mean.iter_mut().zip(self.rows.row(i)) {
                *mu = *mu + v;
            }
        }
        let mf = T::from_usize_lossy(m);
        mean.iter_mut().for_each(|mu| *mu = *mu / mf);
        let mut cov = Mat::zeros(k, k);
        for i in 0..m {
            let row = self.rows.row(i);
            for a in 0..k {
                let da = row[a] - mean[a];
                for b in a..k {
                    cov[(a, b)] = cov[(a, b)] + da * (row[b] - mean[b]);
                }
            }
        }
        let denom = T::from_usize_lossy(m - 1);
        for a in 0..k {
            for b in a..k {
                let v = cov[(a, b)] / denom;
                cov[(a, b)] = v;
                cov[(b, a)] = v;
            }
        }
        cov
    }
}

/// `1e-6 · trace(C) / k`, with `C` the unregularized covariance.
pub fn default_ridge<T: Scalar>(table: &FeatureTable<T>) -> T {
    T::lit(1e-6) * table.covariance().trace() / T::from_usize_lossy(table.feature_dim())
}

/// Sample covariance of the table plus `ridge · I`.
///
/// Fails with [`Error::RankDeficient`] when the result is not safely positive
/// definite; the error suggests a ridge large enough to fix that.
pub fn covariance_descriptor<T: Scalar>(table: &FeatureTable<T>, ridge: T) -> Result<SpdMatrix<T>> {
    if !(ridge >= T::zero()) || !ridge.is_finite() {
        return Err(Error::InvalidParameter("ridge must be finite and >= 0".into()));
    }
    let cov = table.covariance();
    let k = cov.rows();
    let trace = cov.trace();
    let mut c = cov;
    for i in 0..k {
        c[(i, i)] = c[(i, i)] + ridge;
    }
    SpdMatrix::new(c).map_err(|e| match e {
        Error::NotPositiveDefinite { min_eigenvalue, floor } => {
            let relative = 1e-6 * trace.to_f64_lossy() / k as f64;
            Error::RankDeficient {
                min_eigenvalue,
                floor,
                suggested_ridge: relative.max(ridge.to_f64_lossy() * 10.0).max(1e-6),
            }
        }
        other => other,
    })
}

/// Covariance of a set of vectors (for example per-frame or per-image
/// feature vectors of one image set) plus `ridge · I`.
pub fn set_covariance<T: Scalar>(vectors: &FeatureTable<T>, ridge: T) -> Result<SpdMatrix<T>> {
    covariance_descriptor(vectors, ridge)
}

/// `[I, |Iₓ|, |I_y|, |Iₓₓ|, |I_yy|]` for each interior pixel.
pub fn brodatz_pixel_features<T: Scalar>(gray: &Grid<T>) -> Result<FeatureTable<T>> {
    gray.require_min()?;
    let mut data = Vec::with_capacity((gray.rows - 2) * (gray.cols - 2) * 5);
    for r in 1..gray.rows - 1 {
        for c in 1..gray.cols - 1 {
            let [dx, dy, dxx, dyy] = gray.derivatives(r, c);
            data.extend_from_slice(&[gray.get(r, c), dx.abs(), dy.abs(), dxx.abs(), dyy.abs()]);
        }
    }
    FeatureTable::new(Mat::from_row_major(data.len() / 5, 5, data)?, "brodatz")
}

/// `[x, y, R, G, B, R′, G′, B′, R″, G″, B″]` for each interior pixel, where
/// `′ = √(Iₓ² + I_y²)` and `″ = √(Iₓₓ² + I_yy²)` per channel.
pub fn ethz_pixel_features<T: Scalar>(rgb: &[Grid<T>; 3]) -> Result<FeatureTable<T>> {
    let (rows, cols) = (rgb[0].rows, rgb[0].cols);
    for ch in rgb {
        if ch.rows != rows || ch.cols != cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: ch.rows * ch.cols,
            });
        }
        ch.require_min()?;
    }
    let mut data = Vec::with_capacity((rows - 2) * (cols - 2) * 11);
    for r in 1..rows - 1 {
        for c in 1..cols - 1 {
            let d: Vec<[T; 4]> = rgb.iter().map(|ch| ch.derivatives(r, c)).collect();
            data.push(T::from_usize_lossy(c));
            data.push(T::from_usize_lossy(r));
            data.extend(rgb.iter().map(|ch| ch.get(r, c)));
            data.extend(d.iter().map(|v| (v[0] * v[0] + v[1] * v[1]).sqrt()));
            data.extend(d.iter().map(|v| (v[2] * v[2] + v[3] * v[3]).sqrt()));
        }
    }
    FeatureTable::new(Mat::from_row_major(data.len() / 11, 11, data)?, "ethz")
}

/// Orthonormal DCT-II basis: row `u` holds `α(u)·cos(π(2n+1)u / 2N)`.
fn dct_basis<T: Scalar>(n: usize) -> Mat<T> {
    let nf = n as f64;
    Mat::from_fn(n, n, |u, i| {
        let alpha = if u == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
        T::lit(alpha * (std::f64::consts::PI * (2.0 * i as f64 + 1.0) * u as f64 / (2.0 * nf)).cos())
    })
}

/// Full orthonormal 2-D DCT-II, `C_r · G · C_cᵀ`.
pub fn dct2<T: Scalar>(gray: &Grid<T>) -> Mat<T> {
    let g = Mat::from_row_major(gray.rows, gray.cols, gray.data.clone()).expect("grid shape");
    dct_basis(gray.rows).matmul(&g).matmul(&dct_basis::<T>(gray.cols).transpose())
}

/// JPEG-style zig-zag order over a `rows × cols` coefficient array.
pub fn zigzag_order(rows: usize, cols: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(rows * cols);
    if rows == 0 || cols == 0 {
        return out;
    }
    for s in 0..rows + cols - 1 {
        let lo = s.saturating_sub(cols - 1);
        let hi = s.min(rows - 1);
        if s % 2 == 1 {
            out.extend((lo..=hi).map(|r| (r, s - r)));
        } else {
            out.extend((lo..=hi).rev().map(|r| (r, s - r)));
        }
    }
    out
}

/// First `k` zig-zag-ordered coefficients of the orthonormal 2-D DCT-II.
pub fn dct_features<T: Scalar>(gray: &Grid<T>, k: usize) -> Result<Vec<T>> {
    let total = gray.rows * gray.cols;
    if k == 0 || k > total {
        return Err(Error::OutOfRange {
            what: "dct coefficient count",
            value: k,
            min: 1,
            max: total,
        });
    }
    let coeffs = dct2(gray);
    Ok(zigzag_order(gray.rows, gray.cols)
        .into_iter()
        .take(k)
        .map(|(u, v)| coeffs[(u, v)])
        .collect())
}
