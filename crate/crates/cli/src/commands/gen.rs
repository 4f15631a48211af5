use mccm::linalg::Mat;
use mccm::spd::SymMatrix;
use mccm::synth::{figure1_case, random_unit_symmetric};
use mccm::{SpdMatrix, SpgParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::SpdRecord;
use crate::error::{CliError, Result};

#[derive(Clone, Debug, Default)]
pub struct GeneratedSplit {
    pub train: Vec<SpdRecord>,
    pub test: Vec<SpdRecord>,
}

#[derive(Clone, Debug)]
pub struct ClusterOptions {
    pub classes: usize,
    pub dim: usize,
    pub train_per_class: usize,
    pub test_per_class: usize,
    /// Geodesic distance of each class center from the identity, along
    /// mutually orthogonal directions.
    pub separation: f64,
    /// Geodesic distance of each sample from its class center.
    pub spread: f64,
    pub seed: u64,
}

impl Default for ClusterOptions {
    fn default() -> Self {
        Self {
            classes: 3,
            dim: 4,
            train_per_class: 10,
            test_per_class: 5,
            separation: 3.0,
            spread: 0.5,
            seed: 0,
        }
    }
}

/// Classes `c0, c1, …` clustered around well separated centers. Train and
/// test points are interleaved class by class.
pub fn gen_clusters(opts: &ClusterOptions) -> Result<GeneratedSplit> {
    let d = opts.dim;
    if opts.classes == 0 || d == 0 || opts.train_per_class == 0 {
        return Err(CliError::Usage("classes, dim and train-per-class must be >= 1".into()));
    }
    if opts.classes > d * (d + 1) / 2 {
        return Err(CliError::Usage(format!(
            "at most {} orthogonal class directions exist in dimension {d}",
            d * (d + 1) / 2
        )));
    }
    if !(opts.separation > 0.0) || !(opts.spread >= 0.0) || !opts.separation.is_finite() || !opts.spread.is_finite() {
        return Err(CliError::Usage("separation must be > 0 and spread >= 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut dirs: Vec<Mat<f64>> = Vec::with_capacity(opts.classes);
    let mut out = GeneratedSplit::default();
    for c in 0..opts.classes {
        let u = random_unit_symmetric(d, &mut rng, &dirs);
        let center = SymMatrix::new(u.scale(opts.separation))?.exp()?;
        dirs.push(u);
        let frame = center.frame()?;
        let label = format!("c{c}");
        let sample = |rng: &mut ChaCha8Rng| -> Result<SpdMatrix> {
            let v = random_unit_symmetric(d, rng, &[]);
            Ok(frame.exp_whitened(&v.scale(opts.spread))?)
        };
        for _ in 0..opts.train_per_class {
            out.train.push(SpdRecord::new(label.clone(), &sample(&mut rng)?));
        }
        for _ in 0..opts.test_per_class {
            out.test.push(SpdRecord::new(label.clone(), &sample(&mut rng)?));
        }
    }
    Ok(out)
}

/// The nearest-neighbour versus convex-model scenario: class `c1` has one
/// point, class `c2` two, and the single test query belongs to `c2`.
pub fn gen_figure1(dim: usize, seed: u64) -> Result<GeneratedSplit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let case = figure1_case(dim, &mut rng, &SpgParams::default())?;
    let train = case
        .class1
        .iter()
        .map(|m| SpdRecord::new("c1", m))
        .chain(case.class2.iter().map(|m| SpdRecord::new("c2", m)))
        .collect();
    Ok(GeneratedSplit {
        train,
        test: vec![SpdRecord::new("c2", &case.query)],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clusters_are_deterministic_and_sized() {
        let o = ClusterOptions::default();
        let a = gen_clusters(&o).unwrap();
        let b = gen_clusters(&o).unwrap();
        assert_eq!(a.train, b.train);
        assert_eq!(a.train.len(), 30);
        assert_eq!(a.test.len(), 15);
        assert!(gen_clusters(&ClusterOptions { classes: 11, ..o }).is_err());
    }
}
