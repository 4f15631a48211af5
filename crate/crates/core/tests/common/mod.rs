//! Fixtures and independent oracles shared by the integration tests.
//!
//! The 2×2 routines use closed-form eigenvalues so they share no code with
//! the library's Jacobi solver.
#![allow(dead_code)]

use mccm::linalg::Mat;
use mccm::spd::SpdMatrix;
use mccm::synth::random_spd;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn spd(dim: usize, r: &mut ChaCha8Rng, cap: f64) -> SpdMatrix<f64> {
    random_spd(dim, r, cap).unwrap()
}

/// `2I + G/2` with Gaussian-ish `G`; comfortably invertible.
pub fn random_invertible(dim: usize, r: &mut ChaCha8Rng) -> Mat<f64> {
    Mat::from_fn(dim, dim, |i, j| {
        let g: f64 = r.random_range(-1.0..1.0);
        if i == j {
            2.0 + 0.5 * g
        } else {
            0.5 * g
        }
    })
}

pub fn congruence(a: &Mat<f64>, x: &SpdMatrix<f64>) -> SpdMatrix<f64> {
    SpdMatrix::new(a.matmul(x.as_mat()).matmul(&a.transpose())).unwrap()
}

/// Weights bounded away from the simplex boundary.
pub fn interior_weights(n: usize, r: &mut ChaCha8Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| r.random_range(0.1..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|x| x / s).collect()
}

/// Central differences with step `h` in each coordinate.
pub fn fd_gradient(mut f: impl FnMut(&[f64]) -> f64, w: &[f64], h: f64) -> Vec<f64> {
    (0..w.len())
        .map(|i| {
            let mut p = w.to_vec();
            let mut m = w.to_vec();
            p[i] += h;
            m[i] -= h;
            (f(&p) - f(&m)) / (2.0 * h)
        })
        .collect()
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let scale: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-8);
    diff / scale
}

/// Minimum of `f` over the grid `{w ∈ Δ_n : wᵢ ∈ step·ℤ}`, n ≤ 3.
pub fn simplex_grid_min(n: usize, step: f64, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
    let k = (1.0 / step).round() as usize;
    let mut best = f64::INFINITY;
    match n {
        1 => best = f(&[1.0]),
        2 => {
            for i in 0..=k {
                let a = i as f64 / k as f64;
                best = best.min(f(&[a, 1.0 - a]));
            }
        }
        3 => {
            for i in 0..=k {
                for j in 0..=k - i {
                    let a = i as f64 / k as f64;
                    let b = j as f64 / k as f64;
                    best = best.min(f(&[a, b, (1.0 - a - b).max(0.0)]));
                }
            }
        }
        _ => panic!("grid oracle supports n <= 3"),
    }
    best
}

/// Symmetric 2×2 `[[a, b], [b, c]]`.
pub type S2 = [f64; 3];

pub fn s2_of(x: &SpdMatrix<f64>) -> S2 {
    let m = x.as_mat();
    assert_eq!(m.rows(), 2);
    [m[(0, 0)], m[(0, 1)], m[(1, 1)]]
}

/// `f` applied to the spectrum, closed form.
pub fn s2_fn(s: S2, f: impl Fn(f64) -> f64) -> S2 {
    let [a, b, c] = s;
    let mid = 0.5 * (a + c);
    let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let (l1, l2) = (mid + rad, mid - rad);
    if rad == 0.0 {
        return [f(a), 0.0, f(a)];
    }
    // projector onto the l1 eigenspace: (S − l2·I)/(l1 − l2)
    let p = [(a - l2) / (l1 - l2), b / (l1 - l2), (c - l2) / (l1 - l2)];
    let (f1, f2) = (f(l1), f(l2));
    [f2 + (f1 - f2) * p[0], (f1 - f2) * p[1], f2 + (f1 - f2) * p[2]]
}

pub fn s2_mul(x: S2, y: S2) -> [f64; 4] {
    [
        x[0] * y[0] + x[1] * y[1],
        x[0] * y[1] + x[1] * y[2],
        x[1] * y[0] + x[2] * y[1],
        x[1] * y[1] + x[2] * y[2],
    ]
}

/// `P·S·P` for symmetric `P`, `S`.
pub fn s2_sandwich(p: S2, s: S2) -> S2 {
    let ps = s2_mul(p, s);
    let a = ps[0] * p[0] + ps[1] * p[1];
    let b = ps[0] * p[1] + ps[1] * p[2];
    let c = ps[2] * p[1] + ps[3] * p[2];
    [a, b, c]
}

pub fn s2_frob2(s: S2) -> f64 {
    s[0] * s[0] + 2.0 * s[1] * s[1] + s[2] * s[2]
}

pub fn s2_comb(ws: &[f64], xs: &[S2]) -> S2 {
    let mut out = [0.0; 3];
    for (w, x) in ws.iter().zip(xs) {
        for k in 0..3 {
            out[k] += w * x[k];
        }
    }
    out
}

/// Roots of `det(M − λY) = 0`, the eigenvalues of `Y⁻¹M`.
pub fn s2_gen_eig(y: S2, m: S2) -> (f64, f64) {
    let qa = y[0] * y[2] - y[1] * y[1];
    let qb = -(m[0] * y[2] + m[2] * y[0] - 2.0 * m[1] * y[1]);
    let qc = m[0] * m[2] - m[1] * m[1];
    let disc = (qb * qb - 4.0 * qa * qc).max(0.0).sqrt();
    ((-qb + disc) / (2.0 * qa), (-qb - disc) / (2.0 * qa))
}

/// `d_g²(Y, Σ wᵢXᵢ)` via the generalized eigenvalues.
pub fn cs_objective_2x2(y: S2, xs: &[S2], w: &[f64]) -> f64 {
    let (l1, l2) = s2_gen_eig(y, s2_comb(w, xs));
    l1.ln().powi(2) + l2.ln().powi(2)
}

/// `w ↦ ‖Σ wᵢ log(Y^{-1/2} Xᵢ Y^{-1/2})‖²_F`.
pub fn fm_objective_2x2(y: S2, xs: &[S2]) -> impl Fn(&[f64]) -> f64 {
    let yis = s2_fn(y, |l| 1.0 / l.sqrt());
    let logs: Vec<S2> = xs.iter().map(|x| s2_fn(s2_sandwich(yis, *x), f64::ln)).collect();
    move |w| s2_frob2(s2_comb(w, &logs))
}

/// `w ↦ ‖log Y − Σ wᵢ log Xᵢ‖²_F`.
pub fn le_objective_2x2(y: S2, xs: &[S2]) -> impl Fn(&[f64]) -> f64 {
    let ly = s2_fn(y, f64::ln);
    let logs: Vec<S2> = xs.iter().map(|x| s2_fn(*x, f64::ln)).collect();
    move |w| {
        let c = s2_comb(w, &logs);
        s2_frob2([ly[0] - c[0], ly[1] - c[1], ly[2] - c[2]])
    }
}
