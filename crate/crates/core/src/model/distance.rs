use super::{gram_of, ConvexClassModel, DistanceResult, MccmVariant};
use crate::error::{Error, Result};
use crate::linalg::{dot, sym_eig, EigenPair, Mat};
use crate::optim::{solve_validated, spg_minimize, qp_simplex_with, SimplexObjective, SimplexWeights, SpgParams};
use crate::scalar::Scalar;
use crate::spd::{pd_floor, vectorize_upper, SpdMatrix, TangentFrame};

fn ensure_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `g(w) = Tr((Σᵢ wᵢLᵢ)²)` with `Lᵢ = log(Y^{-1/2} Xᵢ Y^{-1/2})`.
///
/// Stored as the Gram matrix `Kᵢⱼ = Tr(LᵢLⱼ)`, so `g(w) = wᵀKw` and
/// `∂g/∂wⱼ = 2·Tr(Lⱼ Σᵢ wᵢLᵢ) = 2(Kw)ⱼ`.
#[derive(Clone, Debug)]
pub struct FmObjective<T> {
    logs: Vec<Mat<T>>,
    gram: Mat<T>,
}

impl<T: Scalar> FmObjective<T> {
    pub fn new(frame: &TangentFrame<T>, points: &[SpdMatrix<T>]) -> Result<Self> {
        let logs = points
            .iter()
            .map(|p| frame.whitened_log(p))
            .collect::<Result<Vec<_>>>()?;
        let flat: Vec<&[T]> = logs.iter().map(|l| l.as_slice()).collect();
        let gram = gram_of(&flat);
        Ok(Self { logs, gram })
    }

    /// `Σᵢ wᵢLᵢ`
    pub fn combination(&self, w: &[T]) -> Mat<T> {
        let d = self.logs[0].rows();
        let mut s = Mat::zeros(d, d);
        for (l, &wi) in self.logs.iter().zip(w) {
            if wi != T::zero() {
                s.add_scaled(wi, l);
            }
        }
        s
    }
}

impl<T: Scalar> SimplexObjective<T> for FmObjective<T> {
    fn value(&mut self, w: &[T]) -> Result<T> {
        Ok(dot(w, &self.gram.apply(w)))
    }

    fn gradient(&mut self, w: &[T], grad: &mut [T]) -> Result<()> {
        let two = T::lit(2.0);
        for (g, kw) in grad.iter_mut().zip(self.gram.apply(w)) {
            *g = two * kw;
        }
        Ok(())
    }
}

/// `f(w) = d_g²(Y, Σᵢ wᵢXᵢ) = ‖log A(w)‖²_F` with
/// `A(w) = Y^{-1/2} M Y^{-1/2} = Σᵢ wᵢ Bᵢ`, `Bᵢ = Y^{-1/2} Xᵢ Y^{-1/2}`.
///
/// The gradient `∂f/∂wᵢ = 2·Tr(log(A) A⁻¹ Bᵢ)` equals
/// `2·Tr(log(Y^{-1/2}MY^{-1/2}) Y^{1/2} M⁻¹ Xᵢ Y^{-1/2})`; `log(A)A⁻¹` is
/// formed spectrally from the decomposition shared with the value.
#[derive(Clone, Debug)]
pub struct CsObjective<T> {
    whitened: Vec<Mat<T>>,
    cache: Option<(Vec<T>, EigenPair<T>)>,
}

impl<T: Scalar> CsObjective<T> {
    pub fn new(frame: &TangentFrame<T>, points: &[SpdMatrix<T>]) -> Result<Self> {
        for p in points {
            ensure_dim(frame.dim(), p.dim())?;
        }
        Ok(Self {
            whitened: points.iter().map(|p| frame.whiten(p.as_mat())).collect(),
            cache: None,
        })
    }

    fn eigen_at(&mut self, w: &[T]) -> Result<&EigenPair<T>> {
        let hit = matches!(&self.cache, Some((cw, _)) if cw.as_slice() == w);
        if !hit {
            let d = self.whitened[0].rows();
            let mut a = Mat::zeros(d, d);
            for (b, &wi) in self.whitened.iter().zip(w) {
                if wi != T::zero() {
                    a.add_scaled(wi, b);
                }
            }
            let eig = sym_eig(&a)?;
            let floor = pd_floor(eig.max_value());
            if eig.min_value() <= floor {
                return Err(Error::DegenerateMatrix {
                    min_eigenvalue: eig.min_value().to_f64_lossy(),
                    floor: floor.to_f64_lossy(),
                });
            }
            self.cache = Some((w.to_vec(), eig));
        }
        Ok(&self.cache.as_ref().expect("cache filled").1)
    }

    /// Largest eigenvalue of `Y^{-1/2} M Y^{-1/2}`; `Y − M ⪰ 0` iff it is ≤ 1.
    fn max_whitened_eigenvalue(&mut self, w: &[T]) -> Result<T> {
        Ok(self.eigen_at(w)?.max_value())
    }
}

impl<T: Scalar> SimplexObjective<T> for CsObjective<T> {
    fn value(&mut self, w: &[T]) -> Result<T> {
        let eig = self.eigen_at(w)?;
        Ok(eig
            .values
            .iter()
            .map(|l| {
                let g = l.ln();
                g * g
            })
            .sum())
    }

    fn gradient(&mut self, w: &[T], grad: &mut [T]) -> Result<()> {
        let two = T::lit(2.0);
        let h = self.eigen_at(w)?.map(|l| two * l.ln() / l);
        for (g, b) in grad.iter_mut().zip(&self.whitened) {
            *g = h.frobenius_dot(b);
        }
        Ok(())
    }
}

pub(crate) fn fm_in_frame<T: Scalar>(
    frame: &TangentFrame<T>,
    points: &[SpdMatrix<T>],
    params: &SpgParams<T>,
) -> Result<DistanceResult<T>> {
    let mut obj = FmObjective::new(frame, points)?;
    let (weights, report) = spg_minimize(&mut obj, &SimplexWeights::uniform(points.len()), params)?;
    let distance = obj.combination(weights.as_slice()).frobenius_norm();
    Ok(DistanceResult {
        distance,
        weights,
        report,
        loewner_dominated: None,
    })
}

pub(crate) fn cs_in_frame<T: Scalar>(
    frame: &TangentFrame<T>,
    points: &[SpdMatrix<T>],
    params: &SpgParams<T>,
) -> Result<DistanceResult<T>> {
    let mut obj = CsObjective::new(frame, points)?;
    let (weights, report) = spg_minimize(&mut obj, &SimplexWeights::uniform(points.len()), params)?;
    let value = obj.value(weights.as_slice())?;
    let dominated = obj.max_whitened_eigenvalue(weights.as_slice())? <= T::one() + T::lit(1e-12);
    Ok(DistanceResult {
        distance: value.max(T::zero()).sqrt(),
        weights,
        report,
        loewner_dominated: Some(dominated),
    })
}

pub(crate) fn le_for_query<T: Scalar, L>(
    y: &SpdMatrix<T>,
    model: &ConvexClassModel<T, L>,
    params: &SpgParams<T>,
) -> Result<DistanceResult<T>> {
    ensure_dim(model.dim(), y.dim())?;
    let cache = model.le_cache()?;
    let target = vectorize_upper(y.log()?.as_mat());
    let b: Vec<T> = cache.log_vectors.iter().map(|v| dot(v, &target)).collect();
    let (weights, report) = solve_validated(&cache.gram, &b, params)?;
    let mut residual = target;
    for (v, &wi) in cache.log_vectors.iter().zip(weights.as_slice()) {
        for (r, &x) in residual.iter_mut().zip(v) {
            *r = *r - wi * x;
        }
    }
    Ok(DistanceResult {
        distance: dot(&residual, &residual).sqrt(),
        weights,
        report,
        loewner_dominated: None,
    })
}

/// Tangent-space (Fréchet-mean) convex-model distance.
pub fn dist_fm<T: Scalar, L>(
    y: &SpdMatrix<T>,
    model: &ConvexClassModel<T, L>,
    params: &SpgParams<T>,
) -> Result<DistanceResult<T>> {
    ensure_dim(model.dim(), y.dim())?;
    fm_in_frame(&y.frame()?, model.points(), params)
}

/// Confined-set convex-model distance `min_w d_g(Y, Σ wᵢXᵢ)`.
///
/// The Loewner restriction `Σ wᵢXᵢ ⪯ Y` is not imposed; whether the optimum
/// satisfies it is reported in [`DistanceResult::loewner_dominated`].
pub fn dist_cs<T: Scalar, L>(
    y: &SpdMatrix<T>,
    model: &ConvexClassModel<T, L>,
    params: &SpgParams<T>,
) -> Result<DistanceResult<T>> {
    ensure_dim(model.dim(), y.dim())?;
    cs_in_frame(&y.frame()?, model.points(), params)
}

/// Log-Euclidean convex-model distance `min_w ‖log Y − Σ wᵢ log Xᵢ‖_F`.
pub fn dist_le<T: Scalar, L>(
    y: &SpdMatrix<T>,
    model: &ConvexClassModel<T, L>,
    params: &SpgParams<T>,
) -> Result<DistanceResult<T>> {
    le_for_query(y, model, params)
}

/// Dispatches on `variant`.
pub fn model_distance<T: Scalar, L>(
    y: &SpdMatrix<T>,
    model: &ConvexClassModel<T, L>,
    variant: MccmVariant,
    params: &SpgParams<T>,
) -> Result<DistanceResult<T>> {
    match variant {
        MccmVariant::Fm => dist_fm(y, model, params),
        MccmVariant::Cs => dist_cs(y, model, params),
        MccmVariant::Le => dist_le(y, model, params),
    }
}

/// Euclidean distance from `y` to the convex hull of `points`.
pub fn euclidean_hull_dist<T: Scalar, V: AsRef<[T]>>(
    y: &[T],
    points: &[V],
    params: &SpgParams<T>,
) -> Result<DistanceResult<T>> {
    if points.is_empty() {
        return Err(Error::EmptyInput("hull points"));
    }
    for p in points {
        ensure_dim(y.len(), p.as_ref().len())?;
    }
    let gram = gram_of(points);
    let b: Vec<T> = points.iter().map(|p| dot(p.as_ref(), y)).collect();
    let (weights, report) = qp_simplex_with(&gram, &b, params)?;
    let mut residual = y.to_vec();
    for (p, &wi) in points.iter().zip(weights.as_slice()) {
        for (r, &x) in residual.iter_mut().zip(p.as_ref()) {
            *r = *r - wi * x;
        }
    }
    Ok(DistanceResult {
        distance: dot(&residual, &residual).sqrt(),
        weights,
        report,
        loewner_dominated: None,
    })
}
