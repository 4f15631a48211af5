//! Convex class models on the SPD manifold and the classifiers built on them.
//!
//! A class with training points `X₁…X_N` is modelled by every weighted
//! Fréchet mean of those points. A query `Y` is assigned to the class whose
//! model is nearest; three approximations of that distance are provided:
//!
//! * [`dist_fm`] solves in the tangent space at `Y`, where distances to `Y`
//!   are exact: `min_w ‖Σ wᵢ log(Y^{-1/2} Xᵢ Y^{-1/2})‖²_F`.
//! * [`dist_cs`] replaces the Fréchet mean by the arithmetic combination
//!   `M = Σ wᵢXᵢ`: `min_w d_g²(Y, M)`.
//! * [`dist_le`] works in the Log-Euclidean domain, which reduces to a
//!   simplex-constrained quadratic program.

mod classify;
mod distance;

use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::optim::{SimplexWeights, SolveReport};
use crate::scalar::Scalar;
use crate::spd::{vectorize_upper, SpdMatrix};

pub use classify::{classify, geo_nn, Classification, Neighbor};
pub use distance::{
    dist_cs, dist_fm, dist_le, euclidean_hull_dist, model_distance, CsObjective, FmObjective,
};

/// Convex-model distance approximation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MccmVariant {
    /// Tangent space at the query.
    Fm,
    /// Arithmetic combination of the training points.
    Cs,
    /// Log-Euclidean quadratic program.
    Le,
}

impl MccmVariant {
    pub const ALL: [MccmVariant; 3] = [MccmVariant::Fm, MccmVariant::Cs, MccmVariant::Le];

    pub fn name(self) -> &'static str {
        match self {
            MccmVariant::Fm => "fm",
            MccmVariant::Cs => "cs",
            MccmVariant::Le => "le",
        }
    }
}

impl fmt::Display for MccmVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Distance from a query to a convex class model.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceResult<T> {
    pub distance: T,
    pub weights: SimplexWeights<T>,
    pub report: SolveReport<T>,
    /// CS only: whether `Y − Σ wᵢ*Xᵢ` is positive semi-definite at the optimum.
    pub loewner_dominated: Option<bool>,
}

#[derive(Clone, Debug)]
pub(crate) struct LeCache<T> {
    pub log_vectors: Vec<Vec<T>>,
    pub gram: Mat<T>,
}

/// The training points of one class.
#[derive(Clone, Debug)]
pub struct ConvexClassModel<T, L> {
    label: L,
    points: Vec<SpdMatrix<T>>,
    le_cache: OnceLock<Result<LeCache<T>>>,
}

impl<T: Scalar, L> ConvexClassModel<T, L> {
    pub fn new(label: L, points: Vec<SpdMatrix<T>>) -> Result<Self> {
        let dim = points.first().ok_or(Error::EmptyInput("class model points"))?.dim();
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
        Ok(Self {
            label,
            points,
            le_cache: OnceLock::new(),
        })
    }

    pub fn label(&self) -> &L {
        &self.label
    }

    pub fn points(&self) -> &[SpdMatrix<T>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    /// Vectorized point logarithms and their Gram matrix, computed (and the
    /// Gram validated) on first use.
    pub(crate) fn le_cache(&self) -> Result<&LeCache<T>> {
        self.le_cache
            .get_or_init(|| {
                let log_vectors = self
                    .points
                    .iter()
                    .map(|p| Ok(vectorize_upper(p.log()?.as_mat())))
                    .collect::<Result<Vec<_>>>()?;
                let gram = gram_of(&log_vectors);
                crate::optim::validate_gram_for_cache(&gram)?;
                Ok(LeCache { log_vectors, gram })
            })
            .as_ref()
            .map_err(Clone::clone)
    }
}

pub(crate) fn gram_of<T: Scalar, V: AsRef<[T]>>(vectors: &[V]) -> Mat<T> {
    let n = vectors.len();
    let mut g = Mat::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = crate::linalg::dot(vectors[i].as_ref(), vectors[j].as_ref());
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}
