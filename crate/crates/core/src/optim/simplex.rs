use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Nonnegative weights summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexWeights<T> {
    values: Vec<T>,
}

impl<T: Scalar> SimplexWeights<T> {
    /// Accepts `values` if every entry is `≥ 0` and the sum is within
    /// `max(1e-10, 8·N·ε)` of one.
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("simplex weights"));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= T::zero())) {
            return Err(Error::InvalidWeights(format!("entry {v} is negative or NaN")));
        }
        let sum: T = values.iter().copied().sum();
        if (sum - T::one()).abs() > Self::sum_tolerance(values.len()) {
            return Err(Error::InvalidWeights(format!("entries sum to {sum}")));
        }
        Ok(Self { values })
    }

    pub(crate) fn sum_tolerance(n: usize) -> T {
        T::lit(1e-10).max(T::lit(8.0) * T::from_usize_lossy(n) * T::epsilon())
    }

    /// `(1/N, …, 1/N)`
    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform weights need n >= 1");
        Self {
            values: vec![T::one() / T::from_usize_lossy(n); n],
        }
    }

    /// All mass on index `i`.
    pub fn vertex(n: usize, i: usize) -> Self {
        assert!(i < n);
        let mut values = vec![T::zero(); n];
        values[i] = T::one();
        Self { values }
    }

    /// Wraps values produced by a projection; no validation.
    pub(crate) fn from_projection(values: Vec<T>) -> Self {
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<T> {
        self.values
    }

    /// Index of the largest weight (first on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = i;
            }
        }
        best
    }
}

/// Euclidean projection onto the probability simplex (sort-based, O(N log N)).
pub fn project_simplex<T: Scalar>(v: &[T]) -> Result<SimplexWeights<T>> {
    if v.is_empty() {
        return Err(Error::EmptyInput("vector to project"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut sorted = v.to_vec();
    // descending; stable so ties keep input order
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    let mut cumsum = T::zero();
    let mut theta = T::zero();
    for (j, &u) in sorted.iter().enumerate() {
        cumsum = cumsum + u;
        let t = (cumsum - T::one()) / T::from_usize_lossy(j + 1);
        if u - t > T::zero() {
            theta = t;
        }
    }
    let values = v.iter().map(|&x| (x - theta).max(T::zero())).collect();
    Ok(SimplexWeights::from_projection(values))
}
