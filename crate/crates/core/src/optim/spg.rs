//! Spectral projected gradient over the probability simplex.
//!
//! Barzilai–Borwein step lengths, safeguarded to `[step_min, step_max]`,
//! combined with a nonmonotone Armijo line search (Grippo–Lampariello–Lucidi)
//! over the last `line_search_memory` objective values.

use std::collections::VecDeque;

use super::simplex::{project_simplex, SimplexWeights};
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::scalar::Scalar;

/// Smooth objective over the simplex.
pub trait SimplexObjective<T: Scalar> {
    fn value(&mut self, w: &[T]) -> Result<T>;

    /// Writes `∇f(w)` into `grad`.
    fn gradient(&mut self, w: &[T], grad: &mut [T]) -> Result<()>;
}

/// Adapts a pair of closures to [`SimplexObjective`].
pub struct FnObjective<F, G> {
    pub value: F,
    pub gradient: G,
}

impl<T, F, G> SimplexObjective<T> for FnObjective<F, G>
where
    T: Scalar,
    F: FnMut(&[T]) -> T,
    G: FnMut(&[T], &mut [T]),
{
    fn value(&mut self, w: &[T]) -> Result<T> {
        Ok((self.value)(w))
    }

    fn gradient(&mut self, w: &[T], grad: &mut [T]) -> Result<()> {
        (self.gradient)(w, grad);
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpgParams<T> {
    pub max_iter: usize,
    /// Stop once `‖P(w − ∇f) − w‖∞ ≤ grad_tol`.
    pub grad_tol: T,
    pub line_search_memory: usize,
    pub step_min: T,
    pub step_max: T,
    pub armijo_c: T,
}

impl<T: Scalar> Default for SpgParams<T> {
    fn default() -> Self {
        Self {
            max_iter: 500,
            grad_tol: T::lit(1e-7),
            line_search_memory: 10,
            step_min: T::lit(1e-10),
            step_max: T::lit(1e10),
            armijo_c: T::lit(1e-4),
        }
    }
}

impl<T: Scalar> SpgParams<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        if self.max_iter == 0 {
            return bad("max_iter must be >= 1");
        }
        if !(self.grad_tol > T::zero()) {
            return bad("grad_tol must be > 0");
        }
        if self.line_search_memory == 0 {
            return bad("line_search_memory must be >= 1");
        }
        if !(self.step_min > T::zero() && self.step_min <= self.step_max) {
            return bad("need 0 < step_min <= step_max");
        }
        if !(self.armijo_c > T::zero() && self.armijo_c < T::one()) {
            return bad("armijo_c must lie in (0, 1)");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport<T> {
    pub iterations: usize,
    pub objective: T,
    pub projected_grad_norm: T,
    pub converged: bool,
    /// Worst KKT residual, filled in by solvers that certify their output.
    pub kkt_residual: Option<T>,
}

const MAX_BACKTRACKS: usize = 60;

fn projected_grad_norm<T: Scalar>(w: &[T], g: &[T]) -> Result<T> {
    let shifted: Vec<T> = w.iter().zip(g).map(|(&wi, &gi)| wi - gi).collect();
    let p = project_simplex(&shifted)?;
    Ok(p
        .as_slice()
        .iter()
        .zip(w)
        .fold(T::zero(), |m, (&pi, &wi)| m.max((pi - wi).abs())))
}

fn non_finite<T: Scalar>(iteration: usize, w: &[T]) -> Error {
    Error::NonFiniteObjective {
        iteration,
        iterate: w.iter().map(|x| x.to_f64_lossy()).collect(),
    }
}

/// Minimizes `objective` over the simplex starting from `w0`.
///
/// The returned weights are never worse than `w0`: the best iterate seen is
/// returned if the nonmonotone search ends above it.
pub fn spg_minimize<T, O>(
    objective: &mut O,
    w0: &SimplexWeights<T>,
    params: &SpgParams<T>,
) -> Result<(SimplexWeights<T>, SolveReport<T>)>
where
    T: Scalar,
    O: SimplexObjective<T> + ?Sized,
{
    params.validate()?;
    let n = w0.len();
    let mut w = project_simplex(w0.as_slice())?.into_vec();
    let mut f = objective.value(&w)?;
    if !f.is_finite() {
        return Err(non_finite(0, &w));
    }
    let mut g = vec![T::zero(); n];
    objective.gradient(&w, &mut g)?;
    if g.iter().any(|x| !x.is_finite()) {
        return Err(non_finite(0, &w));
    }
    let mut pg = projected_grad_norm(&w, &g)?;
    let mut step = if pg > T::zero() {
        pg.recip().max(params.step_min).min(params.step_max)
    } else {
        T::one()
    };

    let mut history: VecDeque<T> = VecDeque::with_capacity(params.line_search_memory);
    history.push_back(f);
    let mut best = (w.clone(), f, pg);
    let mut converged = pg <= params.grad_tol;
    let mut iterations = 0;
    let mut g_new = vec![T::zero(); n];

    while !converged && iterations < params.max_iter {
        iterations += 1;
        let trial: Vec<T> = w.iter().zip(&g).map(|(&wi, &gi)| wi - step * gi).collect();
        let target = project_simplex(&trial)?.into_vec();
        let d: Vec<T> = target.iter().zip(&w).map(|(&p, &wi)| p - wi).collect();
        let gtd = dot(&g, &d);
        let f_ref = history.iter().copied().fold(T::neg_infinity(), T::max);

        let mut alpha = T::one();
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            // convex combination keeps the iterate on the simplex
            let cand: Vec<T> = w
                .iter()
                .zip(&target)
                .map(|(&wi, &pi)| (T::one() - alpha) * wi + alpha * pi)
                .collect();
            let f_cand = objective.value(&cand)?;
            if !f_cand.is_finite() {
                return Err(non_finite(iterations, &cand));
            }
            if f_cand <= f_ref + params.armijo_c * alpha * gtd {
                accepted = Some((cand, f_cand));
                break;
            }
            let denom = f_cand - f - alpha * gtd;
            let quad = -T::lit(0.5) * alpha * alpha * gtd / denom;
            alpha = if denom > T::zero() && quad >= T::lit(0.1) * alpha && quad <= T::lit(0.9) * alpha {
                quad
            } else {
                alpha * T::lit(0.5)
            };
        }
        let Some((w_new, f_new)) = accepted else {
            // no further decrease representable at this precision
            break;
        };

        objective.gradient(&w_new, &mut g_new)?;
        if g_new.iter().any(|x| !x.is_finite()) {
            return Err(non_finite(iterations, &w_new));
        }
        let s: Vec<T> = w_new.iter().zip(&w).map(|(&a, &b)| a - b).collect();
        let y: Vec<T> = g_new.iter().zip(&g).map(|(&a, &b)| a - b).collect();
        let sty = dot(&s, &y);
        step = if sty <= T::zero() {
            params.step_max
        } else {
            (dot(&s, &s) / sty).max(params.step_min).min(params.step_max)
        };

        w = w_new;
        f = f_new;
        std::mem::swap(&mut g, &mut g_new);
        pg = projected_grad_norm(&w, &g)?;
        if history.len() == params.line_search_memory {
            history.pop_front();
        }
        history.push_back(f);
        if f <= best.1 {
            best = (w.clone(), f, pg);
        }
        converged = pg <= params.grad_tol;
    }

    if f > best.1 {
        w = best.0;
        f = best.1;
        pg = best.2;
        converged = pg <= params.grad_tol;
    }
    Ok((
        SimplexWeights::from_projection(w),
        SolveReport {
            iterations,
            objective: f,
            projected_grad_norm: pg,
            converged,
            kkt_residual: None,
        },
    ))
}
