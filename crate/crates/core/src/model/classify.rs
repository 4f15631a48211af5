use super::distance::{cs_in_frame, fm_in_frame, le_for_query};
use super::{ConvexClassModel, DistanceResult, MccmVariant};
use crate::error::{Error, Result};
use crate::optim::SpgParams;
use crate::scalar::Scalar;
use crate::spd::SpdMatrix;

/// Outcome of nearest-convex-model classification.
#[derive(Clone, Debug)]
pub struct Classification<L, T> {
    pub label: L,
    /// Position of the winning model in the input slice.
    pub index: usize,
    /// One entry per model, in input order.
    pub distances: Vec<DistanceResult<T>>,
}

/// Nearest training point under the geodesic distance.
#[derive(Clone, Debug, PartialEq)]
pub struct Neighbor<L, T> {
    pub label: L,
    pub distance: T,
    pub index: usize,
}

fn first_min<T: Scalar>(values: impl Iterator<Item = T>) -> Option<(usize, T)> {
    let mut best: Option<(usize, T)> = None;
    for (i, v) in values.enumerate() {
        match best {
            Some((_, b)) if !(v < b) => {}
            _ => best = Some((i, v)),
        }
    }
    best
}

/// Assigns `y` to the class whose convex model is nearest; ties go to the
/// model listed first.
///
/// The square roots of `y` are computed once and shared across classes.
/// A failure while measuring one class is returned as [`Error::Class`]
/// carrying that class's label.
pub fn classify<T: Scalar, L: Clone + ToString>(
    y: &SpdMatrix<T>,
    models: &[ConvexClassModel<T, L>],
    variant: MccmVariant,
    params: &SpgParams<T>,
) -> Result<Classification<L, T>> {
    if models.is_empty() {
        return Err(Error::EmptyInput("class models"));
    }
    for m in models {
        if m.dim() != y.dim() {
            return Err(Error::DimensionMismatch {
                expected: m.dim(),
                found: y.dim(),
            }
            .in_class(m.label().to_string()));
        }
    }
    let frame = match variant {
        MccmVariant::Le => None,
        _ => Some(y.frame()?),
    };
    let distances = models
        .iter()
        .map(|m| {
            let r = match (&frame, variant) {
                (Some(f), MccmVariant::Fm) => fm_in_frame(f, m.points(), params),
                (Some(f), MccmVariant::Cs) => cs_in_frame(f, m.points(), params),
                _ => le_for_query(y, m, params),
            };
            r.map_err(|e| e.in_class(m.label().to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    let (index, _) = first_min(distances.iter().map(|d| d.distance)).expect("at least one model");
    Ok(Classification {
        label: models[index].label().clone(),
        index,
        distances,
    })
}

/// Geodesic nearest neighbour over labelled points; ties go to the first
/// occurrence.
pub fn geo_nn<T: Scalar, L: Clone>(y: &SpdMatrix<T>, points: &[(L, SpdMatrix<T>)]) -> Result<Neighbor<L, T>> {
    if points.is_empty() {
        return Err(Error::EmptyInput("training points"));
    }
    let frame = y.frame()?;
    let dists = points
        .iter()
        .map(|(_, x)| {
            if x.dim() != y.dim() {
                return Err(Error::DimensionMismatch {
                    expected: y.dim(),
                    found: x.dim(),
                });
            }
            frame.dist(x)
        })
        .collect::<Result<Vec<_>>>()?;
    let (index, distance) = first_min(dists.into_iter()).expect("at least one point");
    Ok(Neighbor {
        label: points[index].0.clone(),
        distance,
        index,
    })
}
