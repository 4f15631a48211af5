mod classify;
mod descriptor;
mod gen;
mod synthetic;

pub use classify::{
    classify_points, run_benchmark, run_classify, BenchmarkReport, BenchmarkRow, ClassifyReport, QueryResult,
    Trained,
};
pub use descriptor::{parse_resize, run_descriptor, DescriptorOptions, Recipe};
pub use gen::{gen_clusters, gen_figure1, ClusterOptions, GeneratedSplit};
pub use synthetic::{run_synthetic, SyntheticReport};

pub(crate) fn millis(d: std::time::Duration) -> f64 {
    d.as_secs_f64() * 1e3
}
