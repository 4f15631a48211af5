use std::path::Path;
use std::time::Instant;

use mccm::model::{euclidean_hull_dist, geo_nn};
use mccm::spd::le_vectorize;
use mccm::{classify, ConvexClassModel, SpdMatrix, SpgParams};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::millis;
use crate::config::{Method, RunConfig};
use crate::dataset::{label_order, load_dataset, LabeledPoint};
use crate::error::{CliError, Result};

/// Training data grouped per class, in order of first appearance.
pub struct Trained {
    pub classes: Vec<String>,
    models: Vec<ConvexClassModel<String>>,
    points: Vec<(String, SpdMatrix)>,
    vectors: Vec<Vec<Vec<f64>>>,
}

impl Trained {
    pub fn new(train: &[LabeledPoint], method: Method) -> Result<Self> {
        if train.is_empty() {
            return Err(CliError::Usage("training set is empty".into()));
        }
        let classes = label_order(train);
        let members = |c: &String| -> Vec<&LabeledPoint> { train.iter().filter(|p| &p.label == c).collect() };
        let models = classes
            .iter()
            .map(|c| ConvexClassModel::new(c.clone(), members(c).iter().map(|p| p.matrix.clone()).collect()))
            .collect::<mccm::Result<Vec<_>>>()?;
        let vectors = if method == Method::EuclidHull {
            classes
                .iter()
                .map(|c| members(c).iter().map(|p| le_vectorize(&p.matrix.to_sym())).collect())
                .collect()
        } else {
            Vec::new()
        };
        Ok(Self {
            classes,
            models,
            points: train.iter().map(|p| (p.label.clone(), p.matrix.clone())).collect(),
            vectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.points[0].1.dim()
    }

    fn query(&self, y: &SpdMatrix, method: Method, params: &SpgParams, weights: bool) -> Result<Verdict> {
        if y.dim() != self.dim() {
            return Err(mccm::Error::DimensionMismatch {
                expected: self.dim(),
                found: y.dim(),
            }
            .into());
        }
        if let Some(v) = method.variant() {
            let c = classify(y, &self.models, v, params)?;
            return Ok(Verdict {
                predicted: c.label,
                distances: c.distances.iter().map(|d| d.distance).collect(),
                weights: weights.then(|| c.distances.iter().map(|d| d.weights.as_slice().to_vec()).collect()),
            });
        }
        match method {
            Method::GeoNn => {
                let nn = geo_nn(y, &self.points)?;
                let frame = y.frame()?;
                let mut distances = vec![f64::INFINITY; self.classes.len()];
                for (label, x) in &self.points {
                    let k = self.class_index(label);
                    distances[k] = distances[k].min(frame.dist(x)?);
                }
                Ok(Verdict {
                    predicted: nn.label,
                    distances,
                    weights: None,
                })
            }
            _ => {
                let v = le_vectorize(&y.to_sym());
                let results = self
                    .vectors
                    .iter()
                    .map(|pts| euclidean_hull_dist(&v, pts, params))
                    .collect::<mccm::Result<Vec<_>>>()?;
                let distances: Vec<f64> = results.iter().map(|r| r.distance).collect();
                let best = first_min(&distances);
                Ok(Verdict {
                    predicted: self.classes[best].clone(),
                    distances,
                    weights: weights.then(|| results.iter().map(|r| r.weights.as_slice().to_vec()).collect()),
                })
            }
        }
    }

    fn class_index(&self, label: &str) -> usize {
        self.classes.iter().position(|c| c == label).expect("label seen in training")
    }
}

fn first_min(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

struct Verdict {
    predicted: String,
    distances: Vec<f64>,
    weights: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryResult {
    pub index: usize,
    pub label: String,
    pub predicted: String,
    /// One entry per class, in `classes` order.
    pub distances: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Vec<f64>>>,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub schema: u32,
    pub command: String,
    pub variant: Method,
    pub classes: Vec<String>,
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
    pub total_ms: f64,
    pub queries: Vec<QueryResult>,
}

/// Classifies every test point; results keep test-set order whatever the
/// thread count.
pub fn classify_points(train: &[LabeledPoint], test: &[LabeledPoint], cfg: &RunConfig) -> Result<ClassifyReport> {
    cfg.validate()?;
    let params = cfg.spg.params();
    let method = cfg.variant;
    let pool = cfg.pool()?;
    let start = Instant::now();
    let trained = Trained::new(train, method)?;
    let queries = pool.install(|| {
        test.par_iter()
            .enumerate()
            .map(|(index, p)| {
                let t = Instant::now();
                let v = trained.query(&p.matrix, method, &params, cfg.weights)?;
                Ok(QueryResult {
                    index,
                    label: p.label.clone(),
                    predicted: v.predicted,
                    distances: v.distances,
                    weights: v.weights,
                    elapsed_ms: millis(t.elapsed()),
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let total_ms = millis(start.elapsed());
    let correct = queries.iter().filter(|q| q.label == q.predicted).count();
    let total = queries.len();
    Ok(ClassifyReport {
        schema: 1,
        command: "classify".into(),
        variant: method,
        classes: trained.classes,
        correct,
        total,
        accuracy: if total == 0 { 0.0 } else { correct as f64 / total as f64 },
        total_ms,
        queries,
    })
}

pub fn run_classify(train: &Path, test: &Path, cfg: &RunConfig) -> Result<ClassifyReport> {
    let train = load_dataset(train)?;
    let test = load_dataset(test)?;
    classify_points(&train, &test, cfg)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub variant: Method,
    pub total_ms: f64,
    pub per_query_ms: f64,
    pub accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub schema: u32,
    pub command: String,
    pub queries: usize,
    pub classes: Vec<String>,
    pub dim: usize,
    pub rows: Vec<BenchmarkRow>,
}

/// Times each method on the same inputs; model construction is included
/// in the total.
pub fn run_benchmark(train: &Path, test: &Path, methods: &[Method], cfg: &RunConfig) -> Result<BenchmarkReport> {
    let train = load_dataset(train)?;
    let test = load_dataset(test)?;
    if methods.is_empty() {
        return Err(CliError::Usage("no variants to benchmark".into()));
    }
    let mut rows = Vec::with_capacity(methods.len());
    let mut classes = Vec::new();
    for &m in methods {
        let cfg = RunConfig {
            variant: m,
            weights: false,
            ..cfg.clone()
        };
        let report = classify_points(&train, &test, &cfg)?;
        rows.push(BenchmarkRow {
            variant: m,
            total_ms: report.total_ms,
            per_query_ms: if report.total == 0 { 0.0 } else { report.total_ms / report.total as f64 },
            accuracy: report.accuracy,
        });
        classes = report.classes;
    }
    Ok(BenchmarkReport {
        schema: 1,
        command: "benchmark".into(),
        queries: test.len(),
        classes,
        dim: train[0].matrix.dim(),
        rows,
    })
}
