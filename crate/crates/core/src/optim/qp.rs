//! `min wᵀGw − 2bᵀw` over the probability simplex.
//!
//! Solved with SPG, then refined by an active-set pass on the support SPG
//! found, and finally certified against the KKT conditions
//! `2Gw − 2b − λe − μ = 0`, `μ ≥ 0`, `μᵀw = 0`.

use super::simplex::SimplexWeights;
use super::spg::{spg_minimize, SimplexObjective, SolveReport, SpgParams};
use crate::error::{Error, Result};
use crate::linalg::{dot, sym_eig, sym_pinv_solve, Mat};
use crate::scalar::Scalar;

const GRAM_TOL: f64 = 1e-8;
const KKT_TOL: f64 = 1e-7;

/// `f(w) = wᵀGw − 2bᵀw`
#[derive(Clone, Debug)]
pub struct QuadraticObjective<'a, T> {
    pub gram: &'a Mat<T>,
    pub linear: &'a [T],
}

impl<T: Scalar> SimplexObjective<T> for QuadraticObjective<'_, T> {
    fn value(&mut self, w: &[T]) -> Result<T> {
        Ok(quad_value(self.gram, self.linear, w))
    }

    fn gradient(&mut self, w: &[T], grad: &mut [T]) -> Result<()> {
        let gw = self.gram.apply(w);
        let two = T::lit(2.0);
        for ((g, a), b) in grad.iter_mut().zip(gw).zip(self.linear) {
            *g = two * (a - *b);
        }
        Ok(())
    }
}

fn quad_value<T: Scalar>(g: &Mat<T>, b: &[T], w: &[T]) -> T {
    dot(w, &g.apply(w)) - T::lit(2.0) * dot(b, w)
}

fn problem_scale<T: Scalar>(g: &Mat<T>, b: &[T]) -> T {
    b.iter()
        .fold(g.max_abs(), |m, x| m.max(x.abs()))
        .max(T::one())
}

/// Checks that `g` is square, matches `b`, and is symmetric PSD to within
/// `1e-8` relative to its largest entry.
pub(crate) fn validate_gram<T: Scalar>(g: &Mat<T>, b: &[T]) -> Result<()> {
    if !g.is_square() {
        return Err(Error::NotSquare {
            rows: g.rows(),
            cols: g.cols(),
        });
    }
    if g.rows() == 0 {
        return Err(Error::EmptyInput("Gram matrix"));
    }
    if g.rows() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: g.rows(),
            found: b.len(),
        });
    }
    if !g.is_finite() || b.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let tol = T::lit(GRAM_TOL) * g.max_abs().max(T::one());
    let asym = (g - &g.transpose()).max_abs();
    let min_eig = sym_eig(&g.symmetrized())?.min_value();
    if asym > tol || min_eig < -tol {
        return Err(Error::InvalidGram {
            min_eigenvalue: min_eig.to_f64_lossy(),
            asymmetry: asym.to_f64_lossy(),
        });
    }
    Ok(())
}

pub(crate) fn validate_gram_for_cache<T: Scalar>(g: &Mat<T>) -> Result<()> {
    validate_gram(g, &vec![T::zero(); g.rows()])
}

/// Worst violation of the KKT conditions at a feasible `w`.
///
/// The multiplier `λ` is the mean gradient over the support `{w_i > 0}`;
/// the residual is the max of stationarity on the support, dual
/// infeasibility `max(0, λ − g_i)` off it, and `|μ_i w_i|`.
pub fn kkt_residual<T: Scalar>(g: &Mat<T>, b: &[T], w: &[T]) -> T {
    let two = T::lit(2.0);
    let grad: Vec<T> = g
        .apply(w)
        .into_iter()
        .zip(b)
        .map(|(a, &bi)| two * (a - bi))
        .collect();
    let support: Vec<usize> = (0..w.len()).filter(|&i| w[i] > T::zero()).collect();
    if support.is_empty() {
        return T::infinity();
    }
    let lambda = support.iter().map(|&i| grad[i]).sum::<T>() / T::from_usize_lossy(support.len());
    let mut worst = T::zero();
    for i in 0..w.len() {
        let mu = grad[i] - lambda;
        if w[i] > T::zero() {
            worst = worst.max(mu.abs());
        } else {
            worst = worst.max((-mu).max(T::zero()));
        }
        worst = worst.max((mu * w[i]).abs());
    }
    worst
}

/// Active-set refinement seeded with the support of `w`. Returns `None` when
/// no consistent support is found within the pass budget.
fn polish<T: Scalar>(g: &Mat<T>, b: &[T], w: &[T]) -> Result<Option<Vec<T>>> {
    let n = w.len();
    let mut in_support: Vec<bool> = w.iter().map(|&x| x > T::zero()).collect();
    let two = T::lit(2.0);
    let tol = T::lit(KKT_TOL) * problem_scale(g, b) * T::lit(1e-3);
    for _ in 0..(2 * n + 2) {
        let support: Vec<usize> = (0..n).filter(|&i| in_support[i]).collect();
        let k = support.len();
        if k == 0 {
            return Ok(None);
        }
        let kkt = Mat::from_fn(k + 1, k + 1, |r, c| match (r < k, c < k) {
            (true, true) => two * g[(support[r], support[c])],
            (true, false) | (false, true) => T::one(),
            (false, false) => T::zero(),
        });
        let mut rhs: Vec<T> = support.iter().map(|&i| two * b[i]).collect();
        rhs.push(T::one());
        let x = sym_pinv_solve(&kkt, &rhs)?;

        let mut most_negative = None;
        for (r, &i) in support.iter().enumerate() {
            if x[r] < T::zero() && most_negative.is_none_or(|(_, v)| x[r] < v) {
                most_negative = Some((i, x[r]));
            }
        }
        if let Some((i, _)) = most_negative {
            in_support[i] = false;
            continue;
        }

        let mut cand = vec![T::zero(); n];
        for (r, &i) in support.iter().enumerate() {
            cand[i] = x[r];
        }
        let sum: T = cand.iter().copied().sum();
        if !(sum > T::zero()) {
            return Ok(None);
        }
        for c in cand.iter_mut() {
            *c = *c / sum;
        }
        let grad: Vec<T> = g
            .apply(&cand)
            .into_iter()
            .zip(b)
            .map(|(a, &bi)| two * (a - bi))
            .collect();
        let lambda = support.iter().map(|&i| grad[i]).sum::<T>() / T::from_usize_lossy(k);
        let entering = (0..n)
            .filter(|&i| !in_support[i] && grad[i] - lambda < -tol)
            .min_by(|&i, &j| grad[i].partial_cmp(&grad[j]).expect("finite gradient"));
        match entering {
            Some(j) => in_support[j] = true,
            None => return Ok(Some(cand)),
        }
    }
    Ok(None)
}

/// [`qp_simplex_with`] using default SPG parameters.
pub fn qp_simplex<T: Scalar>(g: &Mat<T>, b: &[T]) -> Result<(SimplexWeights<T>, SolveReport<T>)> {
    qp_simplex_with(g, b, &SpgParams::default())
}

/// Minimizes `wᵀGw − 2bᵀw` subject to `w ≥ 0`, `Σw = 1`.
///
/// `report.converged` is true iff the KKT residual is at most `1e-7` times
/// `max(1, max|G|, max|b|)`.
pub fn qp_simplex_with<T: Scalar>(
    g: &Mat<T>,
    b: &[T],
    params: &SpgParams<T>,
) -> Result<(SimplexWeights<T>, SolveReport<T>)> {
    validate_gram(g, b)?;
    solve_validated(g, b, params)
}

pub(crate) fn solve_validated<T: Scalar>(
    g: &Mat<T>,
    b: &[T],
    params: &SpgParams<T>,
) -> Result<(SimplexWeights<T>, SolveReport<T>)> {
    let n = b.len();
    if n == 1 {
        let w = vec![T::one()];
        let objective = quad_value(g, b, &w);
        return Ok((
            SimplexWeights::from_projection(w),
            SolveReport {
                iterations: 0,
                objective,
                projected_grad_norm: T::zero(),
                converged: true,
                kkt_residual: Some(T::zero()),
            },
        ));
    }
    let mut objective = QuadraticObjective { gram: g, linear: b };
    let (w, mut report) = spg_minimize(&mut objective, &SimplexWeights::uniform(n), params)?;
    let mut best = w.into_vec();
    let mut best_obj = report.objective;
    let scale = problem_scale(g, b);

    if let Some(cand) = polish(g, b, &best)? {
        let obj = quad_value(g, b, &cand);
        let slack = T::lit(1e-12) * scale;
        if obj <= best_obj + slack && kkt_residual(g, b, &cand) <= kkt_residual(g, b, &best) {
            best = cand;
            best_obj = obj;
        }
    }
    let kkt = kkt_residual(g, b, &best);
    report.objective = best_obj;
    report.kkt_residual = Some(kkt);
    report.converged = kkt <= T::lit(KKT_TOL) * scale;
    Ok((SimplexWeights::from_projection(best), report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Exhaustive active-set oracle: solves the equality-constrained QP on
    /// every support by Gaussian elimination and keeps the best feasible one.
    fn enumeration_oracle(g: &[Vec<f64>], b: &[f64]) -> (Vec<f64>, f64) {
        let n = b.len();
        let mut best = (vec![], f64::INFINITY);
        for mask in 1u32..(1 << n) {
            let s: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let k = s.len();
            let mut a = vec![vec![0.0; k + 2]; k + 1];
            for (r, &i) in s.iter().enumerate() {
                for (c, &j) in s.iter().enumerate() {
                    a[r][c] = 2.0 * g[i][j];
                }
                a[r][k] = 1.0;
                a[r][k + 1] = 2.0 * b[i];
            }
            a[k][..k].fill(1.0);
            a[k][k + 1] = 1.0;
            // partial-pivot elimination
            let mut singular = false;
            for col in 0..=k {
                let p = (col..=k)
                    .max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())
                    .unwrap();
                if a[p][col].abs() < 1e-12 {
                    singular = true;
                    break;
                }
                a.swap(col, p);
                let pivot = a[col].clone();
                for (r, row) in a.iter_mut().enumerate() {
                    if r != col {
                        let f = row[col] / pivot[col];
                        for (x, y) in row[col..].iter_mut().zip(&pivot[col..]) {
                            *x -= f * y;
                        }
                    }
                }
            }
            if singular {
                continue;
            }
            let mut w = vec![0.0; n];
            for (r, &i) in s.iter().enumerate() {
                w[i] = a[r][k + 1] / a[r][r];
            }
            if w.iter().any(|&x| x < -1e-12) {
                continue;
            }
            let obj: f64 = (0..n)
                .map(|i| (0..n).map(|j| w[i] * g[i][j] * w[j]).sum::<f64>() - 2.0 * b[i] * w[i])
                .sum();
            if obj < best.1 {
                best = (w, obj);
            }
        }
        best
    }

    fn lcg(state: &mut u64) -> f64 {
        *state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    #[test]
    fn single_variable_is_trivial() {
        let g = Mat::from_rows(&[[3.0]]).unwrap();
        let (w, rep) = qp_simplex(&g, &[1.0]).unwrap();
        assert_eq!(w.as_slice(), &[1.0]);
        assert!(rep.converged);
    }

    #[test]
    fn identity_gram_hand_case() {
        // w1² + w2² − 2w1 on the simplex: optimum (1, 0)
        let g = Mat::<f64>::identity(2);
        let (w, rep) = qp_simplex(&g, &[1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(w.as_slice()[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w.as_slice()[1], 0.0, epsilon = 1e-12);
        assert!(rep.converged);
        assert!(rep.kkt_residual.unwrap() <= 1e-7);
    }

    #[test]
    fn hull_interior_target_has_zero_distance() {
        let pts = [[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]];
        let y = [2.0 / 3.0, 2.0 / 3.0];
        let g = Mat::from_fn(3, 3, |i, j| dot(&pts[i], &pts[j]));
        let b: Vec<f64> = pts.iter().map(|p| dot(p, &y)).collect();
        let (_, rep) = qp_simplex(&g, &b).unwrap();
        // ‖y − Xw‖² = objective + ‖y‖²
        assert_abs_diff_eq!(rep.objective, -dot(&y, &y), epsilon = 1e-12);
    }

    #[test]
    fn rejects_indefinite_and_asymmetric_gram() {
        let g = Mat::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        assert!(matches!(qp_simplex(&g, &[0.0, 0.0]), Err(Error::InvalidGram { .. })));
        let g = Mat::from_rows(&[[1.0, 0.5], [0.0, 1.0]]).unwrap();
        assert!(matches!(qp_simplex(&g, &[0.0, 0.0]), Err(Error::InvalidGram { .. })));
        let g = Mat::<f64>::identity(2);
        assert!(matches!(qp_simplex(&g, &[0.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn matches_enumeration_and_plain_spg_on_random_quadratics() {
        let mut seed = 42u64;
        for n in 2..=5 {
            for _ in 0..20 {
                // G = AᵀA with A of shape (n-1)×n: rank-deficient on purpose
                let rows = n - 1 + (lcg(&mut seed) > 0.0) as usize;
                let a: Vec<Vec<f64>> = (0..rows).map(|_| (0..n).map(|_| lcg(&mut seed)).collect()).collect();
                let gv: Vec<Vec<f64>> = (0..n)
                    .map(|i| (0..n).map(|j| (0..rows).map(|r| a[r][i] * a[r][j]).sum()).collect())
                    .collect();
                let b: Vec<f64> = (0..n).map(|_| lcg(&mut seed)).collect();
                let g = Mat::from_rows(&gv).unwrap();
                let (w, rep) = qp_simplex(&g, &b).unwrap();
                assert!(rep.converged, "kkt {:?}", rep.kkt_residual);
                let (_, oracle_obj) = enumeration_oracle(&gv, &b);
                assert!(rep.objective <= oracle_obj + 1e-9, "{} vs {}", rep.objective, oracle_obj);
                if rows >= n {
                    assert!((rep.objective - oracle_obj).abs() <= 1e-9);
                }
                let mut obj = QuadraticObjective { gram: &g, linear: &b };
                let params = SpgParams { grad_tol: 1e-10, max_iter: 5000, ..SpgParams::default() };
                let (ws, _) = spg_minimize(&mut obj, &SimplexWeights::uniform(n), &params).unwrap();
                let fs = quad_value(&g, &b, ws.as_slice());
                assert!((fs - rep.objective).abs() <= 1e-6);
                assert!(SimplexWeights::new(w.into_vec()).is_ok());
            }
        }
    }
}
