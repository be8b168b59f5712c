use std::fs;
use std::path::{Path, PathBuf};

use flexstop_core::{build_grid, GridSpec, Model, ModelFile, StateSet};

use crate::error::{CliError, Result};

/// A loaded model together with its grid geometry, if any.
pub struct Loaded {
    pub model: Model,
    pub initial: StateSet,
    pub grid: Option<GridSpec>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_grid(path: &Path) -> Result<GridSpec> {
    serde_json::from_str(&read(path)?).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load(model: Option<&PathBuf>, grid: Option<&PathBuf>) -> Result<Loaded> {
    match (model, grid) {
        (Some(path), None) => {
            let file: ModelFile = serde_json::from_str(&read(path)?).map_err(|source| CliError::Json {
                path: path.clone(),
                source,
            })?;
            let (model, initial) = file.into_model()?;
            Ok(Loaded {
                model,
                initial,
                grid: None,
            })
        }
        (None, Some(path)) => {
            let spec = read_grid(path)?;
            let model = build_grid(&spec)?;
            let initial = StateSet::full(model.n_states());
            Ok(Loaded {
                model,
                initial,
                grid: Some(spec),
            })
        }
        _ => Err(CliError::Usage("exactly one of --model and --grid is required".into())),
    }
}

/// A state given as an index or a label.
pub fn parse_state(model: &Model, token: &str) -> Result<usize> {
    let token = token.trim();
    if let Ok(z) = token.parse::<usize>() {
        if z < model.n_states() {
            return Ok(z);
        }
        return Err(CliError::Usage(format!("state {z} out of range")));
    }
    model
        .state_by_name(token)
        .ok_or_else(|| CliError::Usage(format!("unknown state {token:?}")))
}

/// `all`, or a comma-separated list of state indices or labels.
pub fn parse_state_set(model: &Model, text: &str) -> Result<StateSet> {
    let n = model.n_states();
    if text.trim() == "all" {
        return Ok(StateSet::full(n));
    }
    let mut set = StateSet::empty(n);
    for token in text.split(',').filter(|t| !t.trim().is_empty()) {
        set.insert(parse_state(model, token)?);
    }
    if set.is_empty() {
        return Err(CliError::Usage("state set is empty".into()));
    }
    Ok(set)
}

/// Comma-separated positive integers.
pub fn parse_sweep(text: &str) -> Result<Vec<usize>> {
    let ks = text
        .split(',')
        .map(|t| match t.trim().parse::<usize>() {
            Ok(k) if k >= 1 => Ok(k),
            _ => Err(CliError::Usage(format!("bad sweep value {t:?}"))),
        })
        .collect::<Result<Vec<_>>>()?;
    if ks.is_empty() {
        return Err(CliError::Usage("sweep list is empty".into()));
    }
    Ok(ks)
}
