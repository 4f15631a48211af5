//! CSV grids: one block of comma-separated rows per channel, channels
//! separated by blank lines.

use std::fs;
use std::path::Path;

use mccm::descriptors::Grid;

use crate::error::{CliError, Result};

/// Parses every blank-line separated block of `text` into rows of numbers.
pub fn parse_blocks(text: &str, path: &Path) -> Result<Vec<Vec<Vec<f64>>>> {
    let mut blocks = Vec::new();
    let mut current: Vec<(usize, &str)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            if !current.is_empty() {
                blocks.push(parse_block(&current, path)?);
                current.clear();
            }
        } else {
            current.push((i + 1, line));
        }
    }
    if !current.is_empty() {
        blocks.push(parse_block(&current, path)?);
    }
    Ok(blocks)
}

fn parse_block(lines: &[(usize, &str)], path: &Path) -> Result<Vec<Vec<f64>>> {
    let joined: String = lines.iter().map(|(_, l)| format!("{l}\n")).collect();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(joined.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(lines.len());
    for (record, &(line, _)) in reader.records().zip(lines) {
        let err = |message: String| CliError::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let record = record.map_err(|e| err(e.to_string()))?;
        let row = record
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| err(format!("{f:?}: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(err(format!("expected {} columns, found {}", first.len(), row.len())));
            }
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(err("non-finite value".into()));
        }
        rows.push(row);
    }
    Ok(rows)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn to_grid(rows: &[Vec<f64>], path: &Path) -> Result<Grid<f64>> {
    Grid::from_rows(rows).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: 1,
        message: e.to_string(),
    })
}

fn expect_blocks(blocks: &[Vec<Vec<f64>>], n: usize, path: &Path) -> Result<()> {
    if blocks.len() != n {
        return Err(CliError::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: format!("expected {n} channel block(s), found {}", blocks.len()),
        });
    }
    Ok(())
}

pub fn load_gray(path: &Path) -> Result<Grid<f64>> {
    let blocks = parse_blocks(&read(path)?, path)?;
    expect_blocks(&blocks, 1, path)?;
    to_grid(&blocks[0], path)
}

pub fn load_rgb(path: &Path) -> Result<[Grid<f64>; 3]> {
    let blocks = parse_blocks(&read(path)?, path)?;
    expect_blocks(&blocks, 3, path)?;
    Ok([to_grid(&blocks[0], path)?, to_grid(&blocks[1], path)?, to_grid(&blocks[2], path)?])
}

/// Rows of a single-block CSV feature table.
pub fn load_table(path: &Path) -> Result<Vec<Vec<f64>>> {
    let blocks = parse_blocks(&read(path)?, path)?;
    expect_blocks(&blocks, 1, path)?;
    Ok(blocks.into_iter().next().unwrap_or_default())
}

pub fn format_grid(g: &Grid<f64>) -> String {
    let mut s = String::new();
    for r in 0..g.rows() {
        let row: Vec<String> = (0..g.cols()).map(|c| g.get(r, c).to_string()).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}
