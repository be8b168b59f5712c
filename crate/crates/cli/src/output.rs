use std::fs;
use std::path::Path;

use csv::Writer;
use flexstop_core::{GridSpec, IterationTrace, Model, StateSet};

use crate::error::{CliError, Result};

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

pub fn stopping_set(path: &Path, model: &Model, grid: Option<&GridSpec>, set: &StateSet) -> Result<()> {
    let mut w = Writer::from_path(path)?;
    match grid {
        Some(spec) => {
            w.write_record(["state", "x", "y", "in_f"])?;
            for z in 0..model.n_states() {
                let (x, y) = spec.coords(z);
                w.write_record([z.to_string(), x.to_string(), y.to_string(), flag(set.contains(z)).into()])?;
            }
        }
        None => {
            w.write_record(["state", "label", "in_f"])?;
            for z in 0..model.n_states() {
                w.write_record([z.to_string(), model.label(z), flag(set.contains(z)).into()])?;
            }
        }
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn values(path: &Path, model: &Model, grid: Option<&GridSpec>, values: &[f64]) -> Result<()> {
    let mut w = Writer::from_path(path)?;
    match grid {
        Some(spec) => {
            w.write_record(["state", "x", "y", "value"])?;
            for (z, v) in values.iter().enumerate() {
                let (x, y) = spec.coords(z);
                w.write_record([z.to_string(), x.to_string(), y.to_string(), v.to_string()])?;
            }
        }
        None => {
            w.write_record(["state", "label", "value"])?;
            for (z, v) in values.iter().enumerate() {
                w.write_record([z.to_string(), model.label(z), v.to_string()])?;
            }
        }
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn trace(path: &Path, trace: &IterationTrace) -> Result<()> {
    let mut w = Writer::from_path(path)?;
    w.write_record(["iteration", "window", "set_size", "removed", "wall_ms"])?;
    for r in &trace.records {
        w.write_record([
            r.iteration.to_string(),
            r.window.to_string(),
            r.size_after.to_string(),
            r.removed.len().to_string(),
            format!("{:.3}", r.wall.as_secs_f64() * 1e3),
        ])?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// `height` rows of `width` cells; row `y` lists `x = 0..width`.
pub fn grid_matrix<T: ToString>(path: &Path, spec: &GridSpec, cell: impl Fn(usize) -> T) -> Result<()> {
    let mut w = Writer::from_path(path)?;
    let header: Vec<String> = std::iter::once("y".to_string())
        .chain((0..spec.width).map(|x| format!("x{x}")))
        .collect();
    w.write_record(&header)?;
    for y in 0..spec.height {
        let row: Vec<String> = std::iter::once(y.to_string())
            .chain((0..spec.width).map(|x| cell(spec.index(x, y)).to_string()))
            .collect();
        w.write_record(&row)?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
