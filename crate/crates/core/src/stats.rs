//! Weighted Fréchet (Karcher) means under the affine-invariant metric, and
//! the Log-Euclidean mean used to initialize them.

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::optim::SimplexWeights;
use crate::scalar::Scalar;
use crate::spd::{SpdMatrix, SymMatrix};

#[derive(Clone, Debug, PartialEq)]
pub struct MeanParams<T> {
    /// Stop once `‖Σ wᵢ log_M(Xᵢ)‖_F ≤ tol`. `None` means
    /// `max(1e-9, 100·ε)·d` for dimension `d`.
    pub tol: Option<T>,
    pub max_iter: usize,
    /// Initial step along the weighted mean tangent vector, in `(0, 1]`;
    /// halved whenever the objective would increase.
    pub step: T,
}

impl<T: Scalar> Default for MeanParams<T> {
    fn default() -> Self {
        Self {
            tol: None,
            max_iter: 200,
            step: T::one(),
        }
    }
}

impl<T: Scalar> MeanParams<T> {
    pub fn effective_tol(&self, dim: usize) -> T {
        self.tol.unwrap_or_else(|| {
            T::lit(1e-9).max(T::lit(100.0) * T::epsilon()) * T::from_usize_lossy(dim)
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.tol.is_some_and(|t| !(t > T::zero())) {
            return Err(Error::InvalidParameter("mean tol must be > 0".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("mean max_iter must be >= 1".into()));
        }
        if !(self.step > T::zero() && self.step <= T::one()) {
            return Err(Error::InvalidParameter("mean step must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

fn check_inputs<T: Scalar>(points: &[SpdMatrix<T>], weights: &SimplexWeights<T>) -> Result<usize> {
    let first = points.first().ok_or(Error::EmptyInput("points"))?;
    if weights.len() != points.len() {
        return Err(Error::DimensionMismatch {
            expected: points.len(),
            found: weights.len(),
        });
    }
    let dim = first.dim();
    if let Some(p) = points.iter().find(|p| p.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: p.dim(),
        });
    }
    Ok(dim)
}

/// `exp(Σᵢ wᵢ log Xᵢ)`
pub fn le_mean<T: Scalar>(points: &[SpdMatrix<T>], weights: &SimplexWeights<T>) -> Result<SpdMatrix<T>> {
    let dim = check_inputs(points, weights)?;
    let mut acc = Mat::zeros(dim, dim);
    for (p, &w) in points.iter().zip(weights.as_slice()) {
        if w > T::zero() {
            acc.add_scaled(w, p.log()?.as_mat());
        }
    }
    SymMatrix::new(acc)?.exp()
}

/// Weighted sum of squared geodesic distances from `m`, with the whitened
/// logs `log(M^{-1/2} Xᵢ M^{-1/2})`.
struct Evaluation<T> {
    objective: T,
    /// `Σ wᵢ log(M^{-1/2} Xᵢ M^{-1/2})`
    direction: Mat<T>,
    /// Frobenius norm of the ambient tangent vector `M^{1/2} direction M^{1/2}`.
    residual: T,
}

fn evaluate<T: Scalar>(m: &SpdMatrix<T>, points: &[&SpdMatrix<T>], weights: &[T]) -> Result<Evaluation<T>> {
    let frame = m.frame()?;
    let dim = m.dim();
    let mut direction = Mat::zeros(dim, dim);
    let mut objective = T::zero();
    for (p, &w) in points.iter().zip(weights) {
        let l = frame.whitened_log(p)?;
        objective = objective + w * l.frobenius_dot(&l);
        direction.add_scaled(w, &l);
    }
    let residual = frame.unwhiten(&direction).frobenius_norm();
    Ok(Evaluation {
        objective,
        direction,
        residual,
    })
}

/// Weighted Karcher mean by Riemannian fixed-point iteration
/// `M ← exp_M(step · Σᵢ wᵢ log_M(Xᵢ))`, started from [`le_mean`].
///
/// On success the first-order condition `‖Σᵢ wᵢ log_M(Xᵢ)‖_F ≤ tol` holds.
/// Zero-weight points are ignored.
pub fn frechet_mean<T: Scalar>(
    points: &[SpdMatrix<T>],
    weights: &SimplexWeights<T>,
    params: &MeanParams<T>,
) -> Result<SpdMatrix<T>> {
    params.validate()?;
    let dim = check_inputs(points, weights)?;
    let (active, w): (Vec<&SpdMatrix<T>>, Vec<T>) = points
        .iter()
        .zip(weights.as_slice())
        .filter(|(_, &w)| w > T::zero())
        .map(|(p, &w)| (p, w))
        .unzip();
    if active.len() == 1 {
        return Ok(active[0].clone());
    }
    let total: T = w.iter().copied().sum();
    let w: Vec<T> = w.iter().map(|&x| x / total).collect();
    let tol = params.effective_tol(dim);

    let mut m = {
        let owned: Vec<SpdMatrix<T>> = active.iter().map(|p| (*p).clone()).collect();
        le_mean(&owned, &SimplexWeights::from_projection(w.clone()))?
    };
    let mut eval = evaluate(&m, &active, &w)?;
    for _ in 0..params.max_iter {
        if eval.residual <= tol {
            return Ok(m);
        }
        let frame = m.frame()?;
        let mut step = params.step;
        let mut advanced = false;
        for _ in 0..40 {
            let cand = frame.exp_whitened(&eval.direction.scale(step))?;
            let cand_eval = evaluate(&cand, &active, &w)?;
            // near the optimum the objective decrease drops below round-off,
            // while the residual still shrinks
            if cand_eval.objective <= eval.objective || cand_eval.residual < eval.residual {
                m = cand;
                eval = cand_eval;
                advanced = true;
                break;
            }
            step = step * T::lit(0.5);
        }
        if !advanced {
            break;
        }
    }
    if eval.residual <= tol {
        return Ok(m);
    }
    Err(Error::MaxIterExceeded {
        iterations: params.max_iter,
        residual: eval.residual.to_f64_lossy(),
        last_iterate: m.as_mat().as_slice().iter().map(|x| x.to_f64_lossy()).collect(),
    })
}

/// `‖Σᵢ wᵢ log_M(Xᵢ)‖_F`, the first-order optimality residual of a weighted
/// Karcher mean candidate `m`.
pub fn karcher_residual<T: Scalar>(
    m: &SpdMatrix<T>,
    points: &[SpdMatrix<T>],
    weights: &SimplexWeights<T>,
) -> Result<T> {
    check_inputs(points, weights)?;
    let refs: Vec<&SpdMatrix<T>> = points.iter().collect();
    Ok(evaluate(m, &refs, weights.as_slice())?.residual)
}

/// `Σᵢ wᵢ d_g²(M, Xᵢ)`
pub fn frechet_objective<T: Scalar>(
    m: &SpdMatrix<T>,
    points: &[SpdMatrix<T>],
    weights: &SimplexWeights<T>,
) -> Result<T> {
    check_inputs(points, weights)?;
    let refs: Vec<&SpdMatrix<T>> = points.iter().collect();
    Ok(evaluate(m, &refs, weights.as_slice())?.objective)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spd::geodesic_dist;

    fn diag(d: &[f64]) -> SpdMatrix<f64> {
        SpdMatrix::from_diagonal(d).unwrap()
    }

    fn sample() -> Vec<SpdMatrix<f64>> {
        vec![
            SpdMatrix::new(Mat::from_rows(&[[2.0, 0.3, 0.1], [0.3, 1.0, -0.2], [0.1, -0.2, 1.5]]).unwrap()).unwrap(),
            SpdMatrix::new(Mat::from_rows(&[[1.0, -0.4, 0.0], [-0.4, 3.0, 0.5], [0.0, 0.5, 0.8]]).unwrap()).unwrap(),
            SpdMatrix::new(Mat::from_rows(&[[0.7, 0.1, 0.2], [0.1, 0.9, 0.0], [0.2, 0.0, 2.2]]).unwrap()).unwrap(),
        ]
    }

    #[test]
    fn vertex_weights_return_that_point() {
        let pts = sample();
        let w = SimplexWeights::vertex(3, 1);
        let m = frechet_mean(&pts, &w, &MeanParams::default()).unwrap();
        assert_eq!(m, pts[1]);
    }

    #[test]
    fn repeated_point_is_its_own_mean() {
        let x = sample().remove(0);
        let pts = vec![x.clone(), x.clone()];
        let w = SimplexWeights::new(vec![0.3, 0.7]).unwrap();
        let m = frechet_mean(&pts, &w, &MeanParams::default()).unwrap();
        assert!((m.as_mat() - x.as_mat()).max_abs() < 1e-12);
    }

    #[test]
    fn commuting_pair_gives_geometric_mean() {
        let pts = vec![diag(&[1.0, 1.0]), diag(&[4.0, 4.0])];
        let w = SimplexWeights::uniform(2);
        let m = frechet_mean(&pts, &w, &MeanParams::default()).unwrap();
        assert!((m.as_mat() - &Mat::from_diagonal(&[2.0, 2.0])).max_abs() < 1e-12);
        let le = le_mean(&pts, &w).unwrap();
        assert!((m.as_mat() - le.as_mat()).max_abs() < 1e-8);
    }

    #[test]
    fn le_mean_of_inverse_pair_is_identity() {
        let x = diag(&[3.0, 0.5, 7.0]);
        let pts = vec![x.clone(), x.inv().unwrap()];
        let m = le_mean(&pts, &SimplexWeights::uniform(2)).unwrap();
        assert!((m.as_mat() - &Mat::identity(3)).max_abs() < 1e-14);
        let single = le_mean(&pts[..1], &SimplexWeights::uniform(1)).unwrap();
        assert!((single.as_mat() - x.as_mat()).max_abs() < 1e-13);
    }

    #[test]
    fn karcher_condition_and_objective_decrease() {
        let pts = sample();
        let w = SimplexWeights::new(vec![0.2, 0.5, 0.3]).unwrap();
        let params = MeanParams::default();
        let m = frechet_mean(&pts, &w, &params).unwrap();
        assert!(karcher_residual(&m, &pts, &w).unwrap() <= params.effective_tol(3));
        let init = le_mean(&pts, &w).unwrap();
        assert!(frechet_objective(&m, &pts, &w).unwrap() <= frechet_objective(&init, &pts, &w).unwrap());
        // the mean is not farther than the worst point
        for p in &pts {
            assert!(geodesic_dist(&m, p).unwrap() < 3.0);
        }
    }

    #[test]
    fn iteration_cap_is_reported() {
        let pts = sample();
        let w = SimplexWeights::uniform(3);
        let params = MeanParams {
            tol: Some(1e-300),
            max_iter: 3,
            ..MeanParams::default()
        };
        match frechet_mean(&pts, &w, &params) {
            Err(Error::MaxIterExceeded { last_iterate, residual, .. }) => {
                assert_eq!(last_iterate.len(), 9);
                assert!(residual.is_finite());
            }
            other => panic!("expected MaxIterExceeded, got {other:?}"),
        }
    }

    #[test]
    fn input_validation() {
        let pts = sample();
        assert!(matches!(
            frechet_mean(&[], &SimplexWeights::<f64>::uniform(1), &MeanParams::default()),
            Err(Error::EmptyInput(_))
        ));
        assert!(matches!(
            frechet_mean(&pts, &SimplexWeights::uniform(2), &MeanParams::default()),
            Err(Error::DimensionMismatch { .. })
        ));
        let bad = MeanParams { step: 0.0, ..MeanParams::default() };
        assert!(frechet_mean(&pts, &SimplexWeights::uniform(3), &bad).is_err());
    }
}
