//! Small classic datasets compiled into the library.
//!
//! | name | rows | features | task | target |
//! |------|------|----------|------|--------|
//! | `iris` | 150 | 4 | multiclass (3) | `species` |
//! | `wine` | 178 | 13 | multiclass (3) | `cultivar` |
//! | `breast_cancer` | 569 | 30 | binary (malignant = 0, benign = 1) | `diagnosis` |
//! | `diabetes` | 442 | 10 | regression | `progression` |

use super::{load_csv_reader, DatasetManifest, IngestError, Transform};
use crate::dataset::{Dataset, TaskKind};
use crate::error::Result;
use crate::scalar::Scalar;

pub const NAMES: [&str; 4] = ["iris", "wine", "breast_cancer", "diabetes"];
pub const CLASSIFICATION: [&str; 3] = ["iris", "wine", "breast_cancer"];

fn source(name: &str) -> Option<(&'static str, &'static str, TaskKind)> {
    Some(match name {
        "iris" => (include_str!("../../data/iris.csv"), "species", TaskKind::Multiclass),
        "wine" => (include_str!("../../data/wine.csv"), "cultivar", TaskKind::Multiclass),
        "breast_cancer" => (include_str!("../../data/breast_cancer.csv"), "diagnosis", TaskKind::Binary),
        "diabetes" => (include_str!("../../data/diabetes.csv"), "progression", TaskKind::Regression),
        _ => return None,
    })
}

pub fn load<T: Scalar>(name: &str) -> Result<Dataset<T>> {
    let (text, target, task) = source(name).ok_or_else(|| IngestError::Manifest {
        name: name.to_string(),
        message: format!("no bundled dataset named `{name}` (have {})", NAMES.join(", ")),
    })?;
    let mut manifest = DatasetManifest::new(name, format!("<bundled>/{name}.csv"), target, task);
    if task.is_classification() {
        manifest = manifest.with_transform(Transform::EncodeTarget);
    }
    let d: Dataset<T> = load_csv_reader(&manifest, text.as_bytes())?;
    Ok(d.with_metadata("source", "bundled"))
}
