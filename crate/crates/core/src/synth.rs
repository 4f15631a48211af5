//! Synthetic SPD fixtures: random points, equidistant triples around a known
//! Karcher mean, the approximation-error study, the nearest-neighbour versus
//! convex-model scenario, and Fréchet-mean data augmentation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::model::{model_distance, ConvexClassModel, MccmVariant};
use crate::optim::{SimplexWeights, SpgParams};
use crate::scalar::Scalar;
use crate::spd::{geodesic_dist, geodesic_point, SpdMatrix, TangentFrame};
use crate::stats::{frechet_mean, MeanParams};

/// Haar-distributed orthogonal matrix: Gram–Schmidt on a Gaussian matrix.
fn random_orthogonal<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(dim);
    while basis.len() < dim {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        for _ in 0..2 {
            for b in &basis {
                let p: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            v.iter_mut().for_each(|x| *x /= n);
            basis.push(v);
        }
    }
    basis
}

/// `QΛQᵀ` with Haar-random `Q` and eigenvalues log-uniform on
/// `[cap^{-1/2}, cap^{1/2}]`, so the condition number never exceeds `cap`.
pub fn random_spd<T: Scalar, R: Rng + ?Sized>(dim: usize, rng: &mut R, condition_cap: f64) -> Result<SpdMatrix<T>> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    if !(condition_cap >= 1.0) || !condition_cap.is_finite() {
        return Err(Error::InvalidParameter("condition cap must be finite and >= 1".into()));
    }
    let half = 0.5 * condition_cap.ln();
    let values: Vec<f64> = (0..dim).map(|_| rng.random_range(-half..=half).exp()).collect();
    let q = random_orthogonal(dim, rng);
    let mut m = Mat::zeros(dim, dim);
    for (col, &l) in q.iter().zip(&values) {
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = m[(i, j)] + T::lit(l * col[i] * col[j]);
            }
        }
    }
    SpdMatrix::new(m)
}

/// Random symmetric matrix with unit Frobenius norm, Frobenius-orthogonal to
/// every matrix in `against` (which must be orthonormal).
pub fn random_unit_symmetric<R: Rng + ?Sized>(dim: usize, rng: &mut R, against: &[Mat<f64>]) -> Mat<f64> {
    loop {
        let g = Mat::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let mut s = (&g + &g.transpose()).scale(0.5);
        for b in against {
            let p = s.frobenius_dot(b);
            s.add_scaled(-p, b);
        }
        let n = s.frobenius_norm();
        if n > 1e-8 {
            return s.scale(1.0 / n);
        }
    }
}

fn cast<T: Scalar>(m: &Mat<f64>) -> Mat<T> {
    Mat::from_fn(m.rows(), m.cols(), |i, j| T::lit(m[(i, j)]))
}

/// Three points at equal geodesic distance `radius` from a random center
/// `M₁`, with tangent vectors summing to zero so that `M₁` is their
/// equal-weight Karcher mean.
#[derive(Clone, Debug)]
pub struct EquidistantTriple<T> {
    pub points: [SpdMatrix<T>; 3],
    pub center: SpdMatrix<T>,
}

pub fn equidistant_triple<T: Scalar, R: Rng + ?Sized>(
    dim: usize,
    rng: &mut R,
    condition_cap: f64,
    radius: f64,
) -> Result<EquidistantTriple<T>> {
    if dim < 2 {
        return Err(Error::InvalidParameter("equidistant triple needs dim >= 2".into()));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidParameter("radius must be finite and > 0".into()));
    }
    let center: SpdMatrix<T> = random_spd(dim, rng, condition_cap)?;
    let a = random_unit_symmetric(dim, rng, &[]);
    let b = random_unit_symmetric(dim, rng, std::slice::from_ref(&a));
    let phase = rng.random_range(0.0..std::f64::consts::TAU);
    let frame = TangentFrame::new(&center)?;
    let make = |k: usize| -> Result<SpdMatrix<T>> {
        let theta = phase + k as f64 * std::f64::consts::TAU / 3.0;
        let mut s = a.scale(radius * theta.cos());
        s.add_scaled(radius * theta.sin(), &b);
        frame.exp_whitened(&cast(&s))
    };
    Ok(EquidistantTriple {
        points: [make(0)?, make(1)?, make(2)?],
        center,
    })
}

/// Settings of the approximation-error study.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorTrialConfig {
    pub dim: usize,
    pub trials: usize,
    /// Query placement `d_g(M₁, Q) = m·D`.
    pub multipliers: Vec<f64>,
    pub seed: u64,
    pub condition_cap: f64,
    /// Geodesic distance of the triple's points from their center.
    pub tangent_norm: f64,
}

impl Default for ErrorTrialConfig {
    fn default() -> Self {
        Self {
            dim: 5,
            trials: 50,
            multipliers: vec![5.0, 10.0, 100.0, 200.0],
            seed: 20_170_501,
            condition_cap: 1e3,
            tangent_norm: 0.01,
        }
    }
}

impl ErrorTrialConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidParameter("dim must be >= 2".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        if self.multipliers.is_empty() || self.multipliers.iter().any(|m| !(*m > 0.0) || !m.is_finite()) {
            return Err(Error::InvalidParameter("multipliers must be finite and > 0".into()));
        }
        if !(self.condition_cap >= 1.0) || !self.condition_cap.is_finite() {
            return Err(Error::InvalidParameter("condition cap must be finite and >= 1".into()));
        }
        if !(self.tangent_norm > 0.0) || !self.tangent_norm.is_finite() {
            return Err(Error::InvalidParameter("tangent norm must be finite and > 0".into()));
        }
        Ok(())
    }

    /// Independent generator for trial `index`.
    pub fn trial_rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }
}

/// Errors of one trial, indexed `[variant][multiplier]` in
/// [`MccmVariant::ALL`] order.
#[derive(Clone, Debug)]
pub struct TrialErrors {
    /// `D = d_g(M₁, M₂)`.
    pub base_distance: f64,
    pub errors: [Vec<Result<f64>>; 3],
}

/// One trial: `M₂` is the midpoint mean of `X₁, X₂`, the query sits on the
/// geodesic from `M₁` through `M₂` at `m·D`, and the exact distance to the
/// three-point model is `(m − 1)·D`.
pub fn error_trial(
    config: &ErrorTrialConfig,
    index: usize,
    params: &SpgParams<f64>,
    mean: &MeanParams<f64>,
) -> Result<TrialErrors> {
    config.validate()?;
    let mut rng = config.trial_rng(index);
    let triple: EquidistantTriple<f64> =
        equidistant_triple(config.dim, &mut rng, config.condition_cap, config.tangent_norm)?;
    let [x1, x2, x3] = triple.points;
    let m1 = triple.center;
    let m2 = frechet_mean(&[x1.clone(), x2.clone()], &SimplexWeights::uniform(2), mean)?;
    let d = geodesic_dist(&m1, &m2)?;
    let model = ConvexClassModel::new((), vec![x1, x2, x3])?;
    let mut errors: [Vec<Result<f64>>; 3] = Default::default();
    for &m in &config.multipliers {
        let truth = (m - 1.0).abs() * d;
        let q = geodesic_point(&m1, &m2, m);
        for (slot, variant) in errors.iter_mut().zip(MccmVariant::ALL) {
            let err = q
                .as_ref()
                .map_err(Clone::clone)
                .and_then(|q| model_distance(q, &model, variant, params))
                .map(|r| (r.distance - truth).abs());
            slot.push(err);
        }
    }
    Ok(TrialErrors {
        base_distance: d,
        errors,
    })
}

/// Trial-averaged absolute errors.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorTable {
    pub multipliers: Vec<f64>,
    /// `mean_error[v][k]`: average over successful trials of variant
    /// `MccmVariant::ALL[v]` at multiplier `k`; NaN if every trial failed.
    pub mean_error: [Vec<f64>; 3],
    pub failures: [Vec<usize>; 3],
    pub trials: usize,
}

impl ErrorTable {
    pub fn row(&self, variant: MccmVariant) -> &[f64] {
        let i = MccmVariant::ALL.iter().position(|v| *v == variant).expect("known variant");
        &self.mean_error[i]
    }

    pub fn from_trials(config: &ErrorTrialConfig, trials: &[Result<TrialErrors>]) -> Self {
        let k = config.multipliers.len();
        let mut sums = [vec![0.0; k], vec![0.0; k], vec![0.0; k]];
        let mut counts = [vec![0usize; k], vec![0usize; k], vec![0usize; k]];
        let mut failures = [vec![0usize; k], vec![0usize; k], vec![0usize; k]];
        for t in trials {
            for v in 0..3 {
                for j in 0..k {
                    match t.as_ref().map(|t| &t.errors[v][j]) {
                        Ok(Ok(e)) => {
                            sums[v][j] += e;
                            counts[v][j] += 1;
                        }
                        _ => failures[v][j] += 1,
                    }
                }
            }
        }
        let mean = |v: usize| -> Vec<f64> {
            sums[v]
                .iter()
                .zip(&counts[v])
                .map(|(s, &c)| if c == 0 { f64::NAN } else { s / c as f64 })
                .collect()
        };
        Self {
            multipliers: config.multipliers.clone(),
            mean_error: [mean(0), mean(1), mean(2)],
            failures,
            trials: trials.len(),
        }
    }
}

/// Runs every trial sequentially and averages.
pub fn approx_error_trial(
    config: &ErrorTrialConfig,
    params: &SpgParams<f64>,
    mean: &MeanParams<f64>,
) -> Result<ErrorTable> {
    config.validate()?;
    let trials: Vec<_> = (0..config.trials).map(|i| error_trial(config, i, params, mean)).collect();
    Ok(ErrorTable::from_trials(config, &trials))
}

/// Two classes and a query on which the geodesic nearest neighbour and the
/// nearest convex model disagree: the single point of `class1` is closer to
/// the query than either point of `class2`, yet the segment between the
/// `class2` points passes closer still.
#[derive(Clone, Debug)]
pub struct Figure1Case<T> {
    pub query: SpdMatrix<T>,
    pub class1: Vec<SpdMatrix<T>>,
    pub class2: Vec<SpdMatrix<T>>,
    pub attempts: usize,
}

const FIGURE1_ATTEMPTS: usize = 100;

/// Builds the whitened tangent vectors `±r·u + h·v` (class 2) and `ρ·w`
/// (class 1) at the query, with `h < ρ < √(r² + h²)`, and keeps the first
/// draw on which both orderings hold numerically.
pub fn figure1_case<T: Scalar, R: Rng + ?Sized>(dim: usize, rng: &mut R, params: &SpgParams<T>) -> Result<Figure1Case<T>> {
    if dim < 2 {
        return Err(Error::InvalidParameter("figure1_case needs dim >= 2".into()));
    }
    for attempt in 1..=FIGURE1_ATTEMPTS {
        let query: SpdMatrix<T> = random_spd(dim, rng, 10.0)?;
        let u = random_unit_symmetric(dim, rng, &[]);
        let v = random_unit_symmetric(dim, rng, std::slice::from_ref(&u));
        let w = random_unit_symmetric(dim, rng, &[u.clone(), v.clone()]);
        let r: f64 = rng.random_range(1.0..2.0);
        let h = r * rng.random_range(0.05..0.2f64);
        let vertex = (r * r + h * h).sqrt();
        let rho = h + (vertex - h) * rng.random_range(0.6..0.9f64);
        let frame = TangentFrame::new(&query)?;
        let at = |s: Mat<f64>| frame.exp_whitened(&cast(&s));
        let mut plus = u.scale(r);
        plus.add_scaled(h, &v);
        let mut minus = u.scale(-r);
        minus.add_scaled(h, &v);
        let class2 = vec![at(plus)?, at(minus)?];
        let class1 = vec![at(w.scale(rho))?];

        let nearest1 = geodesic_dist(&query, &class1[0])?;
        let nearest2 = geodesic_dist(&query, &class2[0])?.min(geodesic_dist(&query, &class2[1])?);
        let m1 = ConvexClassModel::new(1, class1.clone())?;
        let m2 = ConvexClassModel::new(2, class2.clone())?;
        let d1 = model_distance(&query, &m1, MccmVariant::Fm, params)?.distance;
        let d2 = model_distance(&query, &m2, MccmVariant::Fm, params)?.distance;
        if nearest1 < nearest2 && d2 < d1 {
            return Ok(Figure1Case {
                query,
                class1,
                class2,
                attempts: attempt,
            });
        }
    }
    Err(Error::ConstructionFailed {
        attempts: FIGURE1_ATTEMPTS,
    })
}

/// Weights drawn from the flat Dirichlet distribution on the `n`-simplex.
pub fn dirichlet_weights<T: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> SimplexWeights<T> {
    let raw: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    SimplexWeights::new(raw.iter().map(|x| T::lit(x / total)).collect()).unwrap_or_else(|_| SimplexWeights::uniform(n))
}

/// `count` weighted Fréchet means of `points`, each with fresh
/// [`dirichlet_weights`].
pub fn frechet_augment<T: Scalar, R: Rng + ?Sized>(
    points: &[SpdMatrix<T>],
    count: usize,
    rng: &mut R,
    params: &MeanParams<T>,
) -> Result<Vec<SpdMatrix<T>>> {
    if points.is_empty() {
        return Err(Error::EmptyInput("class points"));
    }
    (0..count)
        .map(|_| frechet_mean(points, &dirichlet_weights(points.len(), rng), params))
        .collect()
}
