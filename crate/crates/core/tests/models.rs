mod common;

use common::*;
use mccm::model::{
    classify, dist_cs, dist_fm, dist_le, euclidean_hull_dist, geo_nn, model_distance, ConvexClassModel, CsObjective,
    FmObjective, MccmVariant,
};
use mccm::optim::{SimplexObjective, SpgParams};
use mccm::spd::{geodesic_dist, le_dist, SpdMatrix};
use mccm::synth::{figure1_case, frechet_augment, Figure1Case};
use mccm::stats::MeanParams;
use proptest::prelude::*;
use rand::Rng;

fn params() -> SpgParams<f64> {
    SpgParams::default()
}

fn gradient_check(dim: usize, seed: u64) {
    let mut r = rng(seed);
    let y = spd(dim, &mut r, 20.0);
    let pts: Vec<SpdMatrix<f64>> = (0..4).map(|_| spd(dim, &mut r, 20.0)).collect();
    let frame = y.frame().unwrap();
    let mut fm = FmObjective::new(&frame, &pts).unwrap();
    let mut cs = CsObjective::new(&frame, &pts).unwrap();
    for _ in 0..10 {
        let w = interior_weights(pts.len(), &mut r);
        let mut g = vec![0.0; pts.len()];

        fm.gradient(&w, &mut g).unwrap();
        let mut fm2 = fm.clone();
        let fd = fd_gradient(|v| fm2.value(v).unwrap(), &w, 1e-5);
        assert!(rel_err(&g, &fd) <= 1e-5, "fm dim {dim}: {g:?} vs {fd:?}");

        cs.gradient(&w, &mut g).unwrap();
        let mut cs2 = cs.clone();
        let fd = fd_gradient(|v| cs2.value(v).unwrap(), &w, 1e-5);
        assert!(rel_err(&g, &fd) <= 1e-5, "cs dim {dim}: {g:?} vs {fd:?}");
    }
}

#[test]
fn gradients_match_finite_differences() {
    for seed in 0..3 {
        gradient_check(3, seed);
        gradient_check(6, seed);
    }
}

fn diag2(a: f64, b: f64) -> SpdMatrix<f64> {
    SpdMatrix::from_diagonal(&[a, b]).unwrap()
}

#[test]
fn commuting_two_point_model_matches_line_oracle() {
    let y = diag2(1.0, 1.0);
    let pts = vec![diag2(4.0, 0.8), diag2(0.5, 3.0)];
    let model = ConvexClassModel::new(0, pts.clone()).unwrap();
    let xs: Vec<S2> = pts.iter().map(s2_of).collect();
    let ys = s2_of(&y);
    let fm = fm_objective_2x2(ys, &xs);
    let grid_fm = simplex_grid_min(2, 1e-4, |w| fm(w)).sqrt();
    let grid_cs = simplex_grid_min(2, 1e-4, |w| cs_objective_2x2(ys, &xs, w)).sqrt();
    assert!((dist_fm(&y, &model, &params()).unwrap().distance - grid_fm).abs() < 1e-4);
    assert!((dist_cs(&y, &model, &params()).unwrap().distance - grid_cs).abs() < 1e-4);
}

#[test]
fn le_three_point_model_matches_simplex_grid() {
    let pts = vec![diag2(4.0, 0.8), diag2(0.5, 3.0), diag2(0.7, 0.6)];
    let model = ConvexClassModel::new(0, pts.clone()).unwrap();
    let xs: Vec<S2> = pts.iter().map(s2_of).collect();
    // one query inside the log-domain hull, one outside
    for y in [diag2(1.3, 0.9), diag2(5.0, 5.0)] {
        let le = le_objective_2x2(s2_of(&y), &xs);
        let grid = simplex_grid_min(3, 1e-3, |w| le(w));
        let got = dist_le(&y, &model, &params()).unwrap().distance;
        assert!(got * got <= grid + 1e-12);
        assert!(grid - got * got < 1e-5, "{} vs {grid}", got * got);
    }
}

#[test]
fn random_small_models_never_lose_to_the_grid() {
    for seed in 0..6u64 {
        let mut r = rng(100 + seed);
        let n = 1 + (seed as usize % 3);
        let y = spd(2, &mut r, 10.0);
        let pts: Vec<SpdMatrix<f64>> = (0..n).map(|_| spd(2, &mut r, 10.0)).collect();
        let model = ConvexClassModel::new(0, pts.clone()).unwrap();
        let xs: Vec<S2> = pts.iter().map(s2_of).collect();
        let ys = s2_of(&y);
        let fm = fm_objective_2x2(ys, &xs);
        let le = le_objective_2x2(ys, &xs);
        let oracle = [
            simplex_grid_min(n, 1e-2, |w| fm(w)),
            simplex_grid_min(n, 1e-2, |w| cs_objective_2x2(ys, &xs, w)),
            simplex_grid_min(n, 1e-2, |w| le(w)),
        ];
        for (v, o) in MccmVariant::ALL.into_iter().zip(oracle) {
            let d = model_distance(&y, &model, v, &params()).unwrap().distance;
            assert!(d * d <= o + 1e-4, "{v} seed {seed}: {} > {o}", d * d);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn hull_dominance_and_membership(seed in any::<u64>(), n in 1usize..5, dim in 2usize..5) {
        let mut r = rng(seed);
        let y = spd(dim, &mut r, 50.0);
        let pts: Vec<SpdMatrix<f64>> = (0..n).map(|_| spd(dim, &mut r, 50.0)).collect();
        let model = ConvexClassModel::new(0, pts.clone()).unwrap();
        let dg = pts.iter().map(|p| geodesic_dist(&y, p).unwrap()).fold(f64::INFINITY, f64::min);
        let dl = pts.iter().map(|p| le_dist(&y, p).unwrap()).fold(f64::INFINITY, f64::min);
        prop_assert!(dist_fm(&y, &model, &params()).unwrap().distance <= dg + 1e-6);
        prop_assert!(dist_cs(&y, &model, &params()).unwrap().distance <= dg + 1e-6);
        prop_assert!(dist_le(&y, &model, &params()).unwrap().distance <= dl + 1e-6);

        let member = pts[r.random_range(0..n)].clone();
        for v in MccmVariant::ALL {
            prop_assert!(model_distance(&member, &model, v, &params()).unwrap().distance <= 1e-6);
        }
    }

    #[test]
    fn single_point_collapse(seed in any::<u64>(), dim in 1usize..6) {
        let mut r = rng(seed);
        let y = spd(dim, &mut r, 50.0);
        let x = spd(dim, &mut r, 50.0);
        let model = ConvexClassModel::new(0, vec![x.clone()]).unwrap();
        let dg = geodesic_dist(&y, &x).unwrap();
        prop_assert!((dist_fm(&y, &model, &params()).unwrap().distance - dg).abs() <= 1e-8);
        prop_assert!((dist_cs(&y, &model, &params()).unwrap().distance - dg).abs() <= 1e-8);
        prop_assert!((dist_le(&y, &model, &params()).unwrap().distance - le_dist(&y, &x).unwrap()).abs() <= 1e-8);
    }

    #[test]
    fn classify_decision_is_affine_equivariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dim = 3;
        let models: Vec<ConvexClassModel<f64, usize>> = (0..3)
            .map(|c| ConvexClassModel::new(c, (0..3).map(|_| spd(dim, &mut r, 20.0)).collect()).unwrap())
            .collect();
        let y = spd(dim, &mut r, 20.0);
        let a = random_invertible(dim, &mut r);
        let moved: Vec<ConvexClassModel<f64, usize>> = models
            .iter()
            .map(|m| ConvexClassModel::new(*m.label(), m.points().iter().map(|p| congruence(&a, p)).collect()).unwrap())
            .collect();
        let ya = congruence(&a, &y);
        for v in [MccmVariant::Fm, MccmVariant::Cs] {
            let before = classify(&y, &models, v, &params()).unwrap();
            let after = classify(&ya, &moved, v, &params()).unwrap();
            let mut sorted: Vec<f64> = before.distances.iter().map(|d| d.distance).collect();
            sorted.sort_by(f64::total_cmp);
            // skip numerically tied instances
            if sorted[1] - sorted[0] > 1e-6 {
                prop_assert_eq!(before.label, after.label);
            }
        }
    }

    #[test]
    fn euclidean_hull_matches_grid(seed in any::<u64>()) {
        let mut r = rng(seed);
        let pts: Vec<[f64; 2]> = (0..3).map(|_| [r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)]).collect();
        let y = [r.random_range(-3.0..3.0), r.random_range(-3.0..3.0)];
        let got = euclidean_hull_dist(&y, &pts, &params()).unwrap().distance;
        let grid = simplex_grid_min(3, 2e-3, |w| {
            let px = w[0] * pts[0][0] + w[1] * pts[1][0] + w[2] * pts[2][0];
            let py = w[0] * pts[0][1] + w[1] * pts[1][1] + w[2] * pts[2][1];
            (y[0] - px).powi(2) + (y[1] - py).powi(2)
        });
        prop_assert!(got * got <= grid + 1e-9);
        prop_assert!(grid.sqrt() - got <= 1e-2);
    }
}

#[test]
fn figure1_fixture_and_augmentation() {
    for seed in 0..5u64 {
        let case: Figure1Case<f64> = figure1_case(3, &mut rng(seed), &params()).unwrap();
        let labelled: Vec<(&str, SpdMatrix<f64>)> = case
            .class1
            .iter()
            .map(|p| ("c1", p.clone()))
            .chain(case.class2.iter().map(|p| ("c2", p.clone())))
            .collect();
        assert_eq!(geo_nn(&case.query, &labelled).unwrap().label, "c1");
        let models = [
            ConvexClassModel::new("c1", case.class1.clone()).unwrap(),
            ConvexClassModel::new("c2", case.class2.clone()).unwrap(),
        ];
        assert_eq!(classify(&case.query, &models, MccmVariant::Fm, &params()).unwrap().label, "c2");

        // enough random means of class 2 put one of them nearer than class 1
        let extra = frechet_augment(&case.class2, 200, &mut rng(seed + 1000), &MeanParams::default()).unwrap();
        let mut augmented = labelled.clone();
        augmented.extend(extra.into_iter().map(|p| ("c2", p)));
        assert_eq!(geo_nn(&case.query, &augmented).unwrap().label, "c2");
    }
}
