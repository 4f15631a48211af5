use std::path::PathBuf;

use clap::ValueEnum;
use mccm::descriptors::{
    brodatz_pixel_features, covariance_descriptor, dct_features, default_ridge, ethz_pixel_features,
    subtract_mean_frame, FeatureTable, Grid,
};
use serde::{Deserialize, Serialize};

use crate::dataset::SpdRecord;
use crate::error::{CliError, Result};
use crate::grid::{load_gray, load_rgb, load_table};

/// How input files become covariance descriptors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Recipe {
    /// One grayscale grid per file, 5 features per pixel, one record per file.
    Brodatz,
    /// Three channel grids per file, 11 features per pixel, one record per file.
    Ethz,
    /// Every file is one grayscale frame; the first `dct_k` zig-zag DCT
    /// coefficients of all frames form one set, giving a single record.
    DctSet,
    /// Each file is a numeric table (rows = observations).
    Table,
}

impl Recipe {
    pub fn parse(s: &str) -> Result<Self> {
        <Self as ValueEnum>::from_str(s, true).map_err(|_| CliError::Usage(format!("unknown recipe `{s}`")))
    }
}

#[derive(Clone, Debug)]
pub struct DescriptorOptions {
    pub recipe: Recipe,
    pub inputs: Vec<PathBuf>,
    /// Defaults to each input's file stem (the first input's for `dct-set`).
    pub label: Option<String>,
    /// Defaults to `1e-6·trace/k` per descriptor.
    pub ridge: Option<f64>,
    pub dct_k: usize,
    pub resize: Option<(usize, usize)>,
    pub subtract_mean_frame: bool,
    pub unit_variance: bool,
}

impl DescriptorOptions {
    pub fn new(recipe: Recipe, inputs: Vec<PathBuf>) -> Self {
        Self {
            recipe,
            inputs,
            label: None,
            ridge: None,
            dct_k: 16,
            resize: None,
            subtract_mean_frame: false,
            unit_variance: false,
        }
    }

    fn label_for(&self, path: &std::path::Path) -> String {
        self.label.clone().unwrap_or_else(|| {
            path.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "unlabeled".into())
        })
    }
}

/// `RxC`, e.g. `32x32`.
pub fn parse_resize(s: &str) -> Result<(usize, usize)> {
    let bad = || CliError::Usage(format!("resize must look like 32x32, got `{s}`"));
    let (r, c) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let r: usize = r.trim().parse().map_err(|_| bad())?;
    let c: usize = c.trim().parse().map_err(|_| bad())?;
    if r == 0 || c == 0 {
        return Err(bad());
    }
    Ok((r, c))
}

fn prepare(grids: Vec<Grid<f64>>, opts: &DescriptorOptions) -> Result<Vec<Grid<f64>>> {
    let mut grids = match opts.resize {
        Some((r, c)) => grids.iter().map(|g| g.resize(r, c)).collect::<mccm::Result<Vec<_>>>()?,
        None => grids,
    };
    if opts.subtract_mean_frame {
        grids = subtract_mean_frame(&grids)?;
    }
    if opts.unit_variance {
        grids = grids.iter().map(Grid::unit_variance).collect();
    }
    Ok(grids)
}

fn describe(table: &FeatureTable<f64>, label: String, opts: &DescriptorOptions) -> Result<SpdRecord> {
    let ridge = opts.ridge.unwrap_or_else(|| default_ridge(table));
    let m = covariance_descriptor(table, ridge)?;
    let mut rec = SpdRecord::new(label, &m);
    rec.ridge = Some(ridge);
    Ok(rec)
}

pub fn run_descriptor(opts: &DescriptorOptions) -> Result<Vec<SpdRecord>> {
    if opts.inputs.is_empty() {
        return Err(CliError::Usage("descriptor needs at least one input file".into()));
    }
    if let Some(r) = opts.ridge {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(CliError::Usage("ridge must be finite and >= 0".into()));
        }
    }
    match opts.recipe {
        Recipe::Brodatz => {
            let grids = opts.inputs.iter().map(|p| load_gray(p)).collect::<Result<Vec<_>>>()?;
            let grids = prepare(grids, opts)?;
            grids
                .iter()
                .zip(&opts.inputs)
                .map(|(g, p)| describe(&brodatz_pixel_features(g)?, opts.label_for(p), opts))
                .collect()
        }
        Recipe::Ethz => {
            let images = opts.inputs.iter().map(|p| load_rgb(p)).collect::<Result<Vec<_>>>()?;
            // preprocess each channel across images
            let mut channels: [Vec<Grid<f64>>; 3] = Default::default();
            for (c, slot) in channels.iter_mut().enumerate() {
                *slot = prepare(images.iter().map(|im| im[c].clone()).collect(), opts)?;
            }
            (0..images.len())
                .map(|i| {
                    let rgb = [channels[0][i].clone(), channels[1][i].clone(), channels[2][i].clone()];
                    describe(&ethz_pixel_features(&rgb)?, opts.label_for(&opts.inputs[i]), opts)
                })
                .collect()
        }
        Recipe::DctSet => {
            let frames = opts.inputs.iter().map(|p| load_gray(p)).collect::<Result<Vec<_>>>()?;
            let frames = prepare(frames, opts)?;
            let rows = frames
                .iter()
                .map(|f| dct_features(f, opts.dct_k))
                .collect::<mccm::Result<Vec<_>>>()?;
            let table = FeatureTable::from_rows(&rows, "dct-set")?;
            Ok(vec![describe(&table, opts.label_for(&opts.inputs[0]), opts)?])
        }
        Recipe::Table => opts
            .inputs
            .iter()
            .map(|p| {
                let rows = load_table(p)?;
                let table = FeatureTable::from_rows(&rows, p.display().to_string())?;
                describe(&table, opts.label_for(p), opts)
            })
            .collect(),
    }
}
