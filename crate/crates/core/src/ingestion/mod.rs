//! CSV loading driven by a manifest, bundled datasets, and synthetic generators.
//!
//! A manifest names the target column, the task, and an ordered list of
//! transforms. Categorical columns and text targets are encoded ordinally by
//! first appearance. No scaling is ever applied.

pub mod bundled;
mod loader;
mod synthetic;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::TaskKind;

pub use loader::{load_csv, load_csv_reader, write_csv};
pub use synthetic::{generate, SyntheticSpec};

/// Rows are 1-based data rows (the header is not counted).
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),

    #[error("missing column `{column}`")]
    MissingColumn { column: String },

    #[error("row {row}, column `{column}`: cannot parse `{value}` as a number")]
    Unparseable { row: usize, column: String, value: String },

    #[error("row {row}, column `{column}`: non-finite value")]
    NonFinite { row: usize, column: String },

    #[error("transform {index} ({transform}) refers to column `{column}`, dropped by an earlier transform")]
    TransformOrder {
        index: usize,
        transform: &'static str,
        column: String,
    },

    #[error("manifest `{name}`: {message}")]
    Manifest { name: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Transform {
    DropColumn { column: String },
    /// Replaces each distinct text value with its first-appearance index.
    EncodeCategorical { column: String },
    /// Allows a text classification target, encoded by first appearance.
    EncodeTarget,
}

impl Transform {
    fn name(&self) -> &'static str {
        match self {
            Transform::DropColumn { .. } => "drop_column",
            Transform::EncodeCategorical { .. } => "encode_categorical",
            Transform::EncodeTarget => "encode_target",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub name: String,
    pub path: PathBuf,
    pub target_column: String,
    pub task: TaskKind,
    #[serde(default)]
    pub transforms: Vec<Transform>,
}

impl DatasetManifest {
    pub fn new(name: impl Into<String>, path: impl Into<PathBuf>, target_column: impl Into<String>, task: TaskKind) -> Self {
        DatasetManifest {
            name: name.into(),
            path: path.into(),
            target_column: target_column.into(),
            task,
            transforms: Vec::new(),
        }
    }

    pub fn with_transform(mut self, t: Transform) -> Self {
        self.transforms.push(t);
        self
    }

    pub fn from_toml_str(text: &str) -> Result<Self, IngestError> {
        toml::from_str(text).map_err(|e| IngestError::Manifest {
            name: "<inline>".into(),
            message: e.message().to_string(),
        })
    }

    /// Reads a manifest file. A relative `path` inside it is resolved against
    /// the manifest's own directory.
    pub fn from_file(path: &Path) -> Result<Self, IngestError> {
        let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut m: DatasetManifest = toml::from_str(&text).map_err(|e| IngestError::Manifest {
            name: path.display().to_string(),
            message: e.message().to_string(),
        })?;
        m.resolve_relative_to(path.parent().unwrap_or(Path::new(".")));
        Ok(m)
    }

    pub fn resolve_relative_to(&mut self, dir: &Path) {
        if self.path.is_relative() {
            self.path = dir.join(&self.path);
        }
    }
}
