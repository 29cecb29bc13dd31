use std::collections::HashMap;
use std::hash::Hash;
use std::io::{Read, Write};

use ndarray::Array2;

use super::{DatasetManifest, IngestError, Transform};
use crate::dataset::{Dataset, Target};
use crate::error::Result;
use crate::scalar::Scalar;

struct Column {
    name: String,
    cells: Vec<String>,
    codes: Option<Vec<usize>>,
}

/// Maps each key to the index of its first appearance.
fn first_appearance<K: Eq + Hash>(keys: impl IntoIterator<Item = K>) -> (Vec<usize>, usize) {
    let mut seen = HashMap::new();
    let codes = keys
        .into_iter()
        .map(|k| {
            let next = seen.len();
            *seen.entry(k).or_insert(next)
        })
        .collect();
    (codes, seen.len())
}

fn parse_cell(value: &str, row: usize, column: &str) -> Result<f64, IngestError> {
    let v: f64 = value.parse().map_err(|_| IngestError::Unparseable {
        row,
        column: column.to_string(),
        value: value.to_string(),
    })?;
    if !v.is_finite() {
        return Err(IngestError::NonFinite {
            row,
            column: column.to_string(),
        });
    }
    Ok(v)
}

pub fn load_csv<T: Scalar>(manifest: &DatasetManifest) -> Result<Dataset<T>> {
    let file = std::fs::File::open(&manifest.path).map_err(|source| IngestError::Io {
        path: manifest.path.clone(),
        source,
    })?;
    let d: Dataset<T> = load_csv_reader(manifest, std::io::BufReader::new(file))?;
    Ok(d.with_metadata("source", manifest.path.display().to_string()))
}

/// Parses CSV text per `manifest`, ignoring `manifest.path`.
///
/// The result passes every structural dataset check; whether it has enough
/// rows for a given fold count is left to the caller.
pub fn load_csv_reader<T: Scalar, R: Read>(manifest: &DatasetManifest, reader: R) -> Result<Dataset<T>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut columns: Vec<Column> = rdr
        .headers()
        .map_err(IngestError::from)?
        .iter()
        .map(|name| Column {
            name: name.to_string(),
            cells: Vec::new(),
            codes: None,
        })
        .collect();
    for record in rdr.records() {
        let record = record.map_err(IngestError::from)?;
        for (c, v) in columns.iter_mut().zip(record.iter()) {
            c.cells.push(v.to_string());
        }
    }
    let rows = columns.first().map_or(0, |c| c.cells.len());

    let mut dropped: Vec<String> = Vec::new();
    let mut encode_target = false;
    let manifest_error = |message: String| IngestError::Manifest {
        name: manifest.name.clone(),
        message,
    };
    for (index, t) in manifest.transforms.iter().enumerate() {
        let locate = |columns: &[Column], column: &str| -> Result<usize, IngestError> {
            if dropped.iter().any(|d| d == column) {
                return Err(IngestError::TransformOrder {
                    index,
                    transform: t.name(),
                    column: column.to_string(),
                });
            }
            columns
                .iter()
                .position(|c| c.name == column)
                .ok_or_else(|| IngestError::MissingColumn {
                    column: column.to_string(),
                })
        };
        match t {
            Transform::DropColumn { column } => {
                if *column == manifest.target_column {
                    return Err(manifest_error(format!("cannot drop the target column `{column}`")).into());
                }
                let at = locate(&columns, column)?;
                columns.remove(at);
                dropped.push(column.clone());
            }
            Transform::EncodeCategorical { column } => {
                let at = locate(&columns, column)?;
                let (codes, _) = first_appearance(columns[at].cells.iter().map(String::as_str));
                columns[at].codes = Some(codes);
            }
            Transform::EncodeTarget => {
                if !manifest.task.is_classification() {
                    return Err(manifest_error("encode_target on a regression task".into()).into());
                }
                encode_target = true;
            }
        }
    }

    let target_at = columns
        .iter()
        .position(|c| c.name == manifest.target_column)
        .ok_or_else(|| IngestError::MissingColumn {
            column: manifest.target_column.clone(),
        })?;
    let target_col = columns.remove(target_at);

    let mut data = Vec::with_capacity(rows * columns.len());
    for row in 0..rows {
        for c in &columns {
            let v = match &c.codes {
                Some(codes) => codes[row] as f64,
                None => parse_cell(&c.cells[row], row + 1, &c.name)?,
            };
            data.push(T::of(v));
        }
    }
    let features = Array2::from_shape_vec((rows, columns.len()), data).expect("row-major buffer matches shape");
    let names: Vec<String> = columns.into_iter().map(|c| c.name).collect();

    let dataset = if manifest.task.is_classification() {
        let (labels, class_count) = if encode_target {
            first_appearance(target_col.cells.iter().map(String::as_str))
        } else {
            let parsed = target_col
                .cells
                .iter()
                .enumerate()
                .map(|(i, v)| parse_cell(v, i + 1, &target_col.name).map(|x| (x + 0.0).to_bits()))
                .collect::<Result<Vec<u64>, _>>()?;
            first_appearance(parsed)
        };
        Dataset::classification(manifest.name.clone(), features, labels, class_count, names).with_task(manifest.task)
    } else {
        let values = target_col
            .cells
            .iter()
            .enumerate()
            .map(|(i, v)| parse_cell(v, i + 1, &target_col.name).map(T::of))
            .collect::<Result<Vec<T>, _>>()?;
        Dataset::regression(manifest.name.clone(), features, values, names)
    };
    dataset
        .with_metadata("target_column", manifest.target_column.clone())
        .validated(1)
}

/// Writes `d` as CSV with its feature names (or `x0, x1, ...`) followed by
/// `target_column`. Values use the shortest representation that parses back
/// to the same number.
pub fn write_csv<T: Scalar, W: Write>(d: &Dataset<T>, writer: W, target_column: &str) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = if d.feature_names().is_empty() {
        (0..d.n_features()).map(|j| format!("x{j}")).collect()
    } else {
        d.feature_names().to_vec()
    };
    header.push(target_column.to_string());
    w.write_record(&header).map_err(IngestError::from)?;
    for (i, row) in d.features().outer_iter().enumerate() {
        let mut cells: Vec<String> = row.iter().map(ToString::to_string).collect();
        cells.push(match d.target() {
            Target::Labels(l) => l[i].to_string(),
            Target::Values(v) => v[i].to_string(),
        });
        w.write_record(&cells).map_err(IngestError::from)?;
    }
    w.flush().map_err(|e| IngestError::Csv(e.into()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::TaskKind;
    use crate::error::Error;

    fn manifest(task: TaskKind) -> DatasetManifest {
        DatasetManifest::new("t", "unused.csv", "label", task)
    }

    #[test]
    fn text_labels_by_first_appearance() {
        let csv = "a,b,label\n1,2,yes\n3,4,no\n5,6,yes\n";
        let m = manifest(TaskKind::Binary).with_transform(Transform::EncodeTarget);
        let d: Dataset<f64> = load_csv_reader(&m, csv.as_bytes()).unwrap();
        assert_eq!(d.target().as_labels().unwrap(), &[0, 1, 0]);
        assert_eq!(d.class_count(), Some(2));
        assert_eq!(d.feature_names(), &["a".to_string(), "b".to_string()]);
        assert_eq!(d.features()[[2, 1]], 6.0);
    }

    #[test]
    fn numeric_labels_are_renumbered() {
        let csv = "a,label\n1,7\n2,3\n3,7\n4,5\n";
        let d: Dataset<f64> = load_csv_reader(&manifest(TaskKind::Multiclass), csv.as_bytes()).unwrap();
        assert_eq!(d.target().as_labels().unwrap(), &[0, 1, 0, 2]);
    }

    #[test]
    fn drop_column_removes_feature() {
        let csv = "StudentID,score,label\n17,1.5,1\n18,2.5,0\n";
        let m = manifest(TaskKind::Binary).with_transform(Transform::DropColumn {
            column: "StudentID".into(),
        });
        let d: Dataset<f64> = load_csv_reader(&m, csv.as_bytes()).unwrap();
        assert_eq!(d.feature_names(), &["score".to_string()]);
        assert_eq!(d.n_features(), 1);
    }

    #[test]
    fn categorical_encoding() {
        let csv = "gender,label\nFemale,0\nMale,1\nFemale,1\nOther,0\n";
        let m = manifest(TaskKind::Binary).with_transform(Transform::EncodeCategorical {
            column: "gender".into(),
        });
        let d: Dataset<f64> = load_csv_reader(&m, csv.as_bytes()).unwrap();
        assert_eq!(d.features().column(0).to_vec(), vec![0.0, 1.0, 0.0, 2.0]);
    }

    #[test]
    fn single_class_target_is_a_validation_failure() {
        let csv = "a,label\n1,x\n2,x\n";
        let m = manifest(TaskKind::Binary).with_transform(Transform::EncodeTarget);
        let err = load_csv_reader::<f64, _>(&m, csv.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::InvalidDataset { .. }), "{err}");
    }

    #[test]
    fn distinct_errors_name_row_and_column() {
        let m = manifest(TaskKind::Binary);
        let err = load_csv_reader::<f64, _>(&m, "a,label\n1,0\nabc,1\n".as_bytes()).unwrap_err();
        assert!(
            matches!(&err, Error::Ingest(IngestError::Unparseable { row: 2, column, value }) if column == "a" && value == "abc"),
            "{err}"
        );
        let err = load_csv_reader::<f64, _>(&m, "a,label\n1,0\ninf,1\n".as_bytes()).unwrap_err();
        assert!(matches!(&err, Error::Ingest(IngestError::NonFinite { row: 2, .. })), "{err}");
        let err = load_csv_reader::<f64, _>(&m, "a,b\n1,0\n".as_bytes()).unwrap_err();
        assert!(matches!(&err, Error::Ingest(IngestError::MissingColumn { column }) if column == "label"));
    }

    #[test]
    fn drop_then_encode_same_column_is_an_order_error() {
        let m = manifest(TaskKind::Binary)
            .with_transform(Transform::DropColumn { column: "g".into() })
            .with_transform(Transform::EncodeCategorical { column: "g".into() });
        let err = load_csv_reader::<f64, _>(&m, "g,label\nm,0\nf,1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Ingest(IngestError::TransformOrder { index: 1, .. })));

        // the other order is fine
        let m = manifest(TaskKind::Binary)
            .with_transform(Transform::EncodeCategorical { column: "g".into() })
            .with_transform(Transform::DropColumn { column: "g".into() });
        let d: Dataset<f64> = load_csv_reader(&m, "g,x,label\nm,1,0\nf,2,1\n".as_bytes()).unwrap();
        assert_eq!(d.n_features(), 1);
    }

    #[test]
    fn encode_target_rejected_for_regression() {
        let m = manifest(TaskKind::Regression).with_transform(Transform::EncodeTarget);
        assert!(load_csv_reader::<f64, _>(&m, "a,label\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn ragged_rows_are_csv_errors() {
        let err = load_csv_reader::<f64, _>(&manifest(TaskKind::Binary), "a,label\n1,0,9\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Ingest(IngestError::Csv(_))));
    }

    #[test]
    fn missing_file_names_the_path() {
        let m = DatasetManifest::new("t", "/nonexistent/x.csv", "label", TaskKind::Binary);
        let err = load_csv::<f64>(&m).unwrap_err().to_string();
        assert!(err.contains("/nonexistent/x.csv"), "{err}");
    }
}
