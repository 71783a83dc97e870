//! Input data model: class labels, score matrices, one-vs-rest indicator
//! expansion, and delimited-file ingestion.
//!
//! The on-disk format is a delimited text file (comma by default, tab
//! selectable) with one header row, one label column, and one numeric score
//! column per class named `score_<classname>`. Scores are arbitrary finite
//! reals; probability normalization is not required.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Prefix that marks a score column and carries the class name.
pub const SCORE_COLUMN_PREFIX: &str = "score_";

/// Default name of the label column.
pub const DEFAULT_LABEL_COLUMN: &str = "label";

/// A named class at a fixed position in the score matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassLabel {
    pub name: String,
    pub index: usize,
}

/// True labels plus an n-by-k score matrix; the single input artifact for
/// every downstream computation.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationDataset {
    classes: Vec<ClassLabel>,
    labels: Vec<usize>,
    scores: Matrix,
    empty_classes: Vec<usize>,
}

/// One-hot ground-truth expansion: entry `(i, j)` is 1 exactly when sample
/// `i` belongs to class `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorMatrix {
    pub values: Matrix,
}

/// Options for [`load_dataset`].
#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub label_column: String,
    /// Explicit score columns in class order. When `None`, every column
    /// named `score_<class>` is used in file order.
    pub score_columns: Option<Vec<String>>,
    pub delimiter: u8,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            label_column: DEFAULT_LABEL_COLUMN.to_string(),
            score_columns: None,
            delimiter: b',',
        }
    }
}

impl EvaluationDataset {
    /// Validates and assembles a dataset. Classes with no samples are
    /// accepted but recorded; consumers must handle them.
    pub fn new(classes: Vec<ClassLabel>, labels: Vec<usize>, scores: Matrix) -> Result<Self> {
        let k = classes.len();
        if k < 2 {
            return Err(Error::Validation(format!(
                "need at least 2 classes, got {k}"
            )));
        }
        for (i, class) in classes.iter().enumerate() {
            if class.index != i {
                return Err(Error::Validation(format!(
                    "class '{}' has index {}, expected {}",
                    class.name, class.index, i
                )));
            }
            if classes[..i].iter().any(|c| c.name == class.name) {
                return Err(Error::Validation(format!(
                    "duplicate class name '{}'",
                    class.name
                )));
            }
        }
        let n = labels.len();
        if n < 2 {
            return Err(Error::Validation(format!(
                "need at least 2 samples, got {n}"
            )));
        }
        if scores.rows() != n || scores.cols() != k {
            return Err(Error::Validation(format!(
                "score matrix is {}x{}, expected {}x{}",
                scores.rows(),
                scores.cols(),
                n,
                k
            )));
        }
        if !scores.is_finite() {
            return Err(Error::Validation(
                "score matrix contains non-finite values".into(),
            ));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::Validation(format!(
                "label index {bad} out of range for {k} classes"
            )));
        }
        let mut counts = vec![0usize; k];
        for &l in &labels {
            counts[l] += 1;
        }
        let empty_classes = (0..k).filter(|&i| counts[i] == 0).collect();
        Ok(EvaluationDataset {
            classes,
            labels,
            scores,
            empty_classes,
        })
    }

    pub fn classes(&self) -> &[ClassLabel] {
        &self.classes
    }

    pub fn class_names(&self) -> Vec<String> {
        self.classes.iter().map(|c| c.name.clone()).collect()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn scores(&self) -> &Matrix {
        &self.scores
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of classes.
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// Indices of classes with no samples.
    pub fn empty_classes(&self) -> &[usize] {
        &self.empty_classes
    }

    pub fn has_empty_classes(&self) -> bool {
        !self.empty_classes.is_empty()
    }

    /// Number of samples in class `index`.
    pub fn class_count_of(&self, index: usize) -> usize {
        self.labels.iter().filter(|&&l| l == index).count()
    }

    /// Boolean membership mask for class `index`.
    pub fn class_mask(&self, index: usize) -> Vec<bool> {
        self.labels.iter().map(|&l| l == index).collect()
    }

    /// Resample rows with replacement according to `indices`.
    pub fn resample(&self, indices: &[usize]) -> Result<Self> {
        let rows: Vec<Vec<f64>> = indices
            .iter()
            .map(|&i| self.scores.row(i).to_vec())
            .collect();
        let labels: Vec<usize> = indices.iter().map(|&i| self.labels[i]).collect();
        EvaluationDataset::new(self.classes.clone(), labels, Matrix::from_rows(rows)?)
    }
}

/// One-hot expansion of the label vector.
pub fn to_indicator(dataset: &EvaluationDataset) -> IndicatorMatrix {
    let n = dataset.len();
    let k = dataset.class_count();
    let mut values = Matrix::zeros(n, k);
    for (i, &label) in dataset.labels().iter().enumerate() {
        values.set(i, label, 1.0);
    }
    IndicatorMatrix { values }
}

/// Empirical class proportions; nonnegative and summing to 1.
pub fn class_frequencies(dataset: &EvaluationDataset) -> Vec<f64> {
    let n = dataset.len() as f64;
    let mut counts = vec![0usize; dataset.class_count()];
    for &l in dataset.labels() {
        counts[l] += 1;
    }
    counts.iter().map(|&c| c as f64 / n).collect()
}

/// Class name for a score column: the `score_` prefix is stripped when
/// present, otherwise the column name itself is the class name.
fn class_name_of_column(column: &str) -> String {
    column
        .strip_prefix(SCORE_COLUMN_PREFIX)
        .unwrap_or(column)
        .to_string()
}

/// Loads and validates a dataset from a delimited file.
pub fn load_dataset(path: impl AsRef<Path>, options: &LoadOptions) -> Result<EvaluationDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(true)
        .flexible(false)
        .from_reader(file);

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::InputSchema(format!("cannot read header row: {e}")))?
        .iter()
        .map(|h| h.to_string())
        .collect();

    let label_idx = headers
        .iter()
        .position(|h| h == &options.label_column)
        .ok_or_else(|| {
            Error::InputSchema(format!(
                "label column '{}' not found in header",
                options.label_column
            ))
        })?;

    // (header index, class name) in class order.
    let score_cols: Vec<(usize, String)> = match &options.score_columns {
        Some(names) => {
            let mut cols = Vec::with_capacity(names.len());
            for name in names {
                let idx = headers.iter().position(|h| h == name).ok_or_else(|| {
                    Error::InputSchema(format!("score column '{name}' not found in header"))
                })?;
                cols.push((idx, class_name_of_column(name)));
            }
            cols
        }
        None => headers
            .iter()
            .enumerate()
            .filter(|(_, h)| h.starts_with(SCORE_COLUMN_PREFIX))
            .map(|(i, h)| (i, class_name_of_column(h)))
            .collect(),
    };

    if score_cols.len() < 2 {
        return Err(Error::InputSchema(format!(
            "need at least 2 score columns, found {}",
            score_cols.len()
        )));
    }
    for (i, (_, name)) in score_cols.iter().enumerate() {
        if score_cols[..i].iter().any(|(_, other)| other == name) {
            return Err(Error::InputSchema(format!(
                "duplicate score column for class '{name}'"
            )));
        }
    }

    let classes: Vec<ClassLabel> = score_cols
        .iter()
        .enumerate()
        .map(|(index, (_, name))| ClassLabel {
            name: name.clone(),
            index,
        })
        .collect();

    let mut labels = Vec::new();
    let mut rows = Vec::new();
    for (record_idx, record) in reader.records().enumerate() {
        let row = record_idx + 1;
        let record =
            record.map_err(|e| Error::Validation(format!("malformed record at row {row}: {e}")))?;

        for (col_idx, field) in record.iter().enumerate() {
            if field.is_empty() {
                return Err(Error::Validation(format!(
                    "empty field at row {row}, column '{}'",
                    headers.get(col_idx).map(String::as_str).unwrap_or("?")
                )));
            }
        }

        let label_value = record.get(label_idx).ok_or_else(|| {
            Error::Validation(format!("row {row} is missing the label field"))
        })?;
        let label_index = classes
            .iter()
            .position(|c| c.name == label_value)
            .ok_or_else(|| Error::LabelVocabulary {
                row,
                label: label_value.to_string(),
            })?;
        labels.push(label_index);

        let mut score_row = Vec::with_capacity(score_cols.len());
        for (header_idx, class_name) in &score_cols {
            let field = record.get(*header_idx).ok_or_else(|| {
                Error::Validation(format!("row {row} is missing a score field"))
            })?;
            let value: f64 = field.parse().map_err(|_| Error::Parse {
                row,
                column: format!("{SCORE_COLUMN_PREFIX}{class_name}"),
                message: format!("'{field}' is not a number"),
            })?;
            if !value.is_finite() {
                return Err(Error::Validation(format!(
                    "non-finite score {value} at row {row}, column '{SCORE_COLUMN_PREFIX}{class_name}'"
                )));
            }
            score_row.push(value);
        }
        rows.push(score_row);
    }

    if rows.len() < 2 {
        return Err(Error::Validation(format!(
            "need at least 2 samples, got {}",
            rows.len()
        )));
    }
    EvaluationDataset::new(classes, labels, Matrix::from_rows(rows)?)
}

/// Writes a dataset back out in the same schema `load_dataset` reads.
/// Floats use the shortest representation that round-trips exactly, so
/// load -> write -> load is the identity.
pub fn write_dataset(dataset: &EvaluationDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = BufWriter::new(file);
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };

    let mut header = vec![DEFAULT_LABEL_COLUMN.to_string()];
    header.extend(
        dataset
            .classes()
            .iter()
            .map(|c| format!("{SCORE_COLUMN_PREFIX}{}", c.name)),
    );
    writeln!(out, "{}", header.join(",")).map_err(io_err)?;

    for (i, &label) in dataset.labels().iter().enumerate() {
        let mut fields = vec![dataset.classes()[label].name.clone()];
        fields.extend(dataset.scores().row(i).iter().map(|v| v.to_string()));
        writeln!(out, "{}", fields.join(",")).map_err(io_err)?;
    }
    out.flush().map_err(io_err)?;
    Ok(())
}
