//! CSV readers and writers for confusion matrices and label-pair files.

use std::io::{Read, Write};

use crate::confusion::{infer_classes, ingest_labels, ConfusionMatrix};
use crate::error::{Error, Result};

/// A matrix read from CSV, with the header labels when the file had them.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledMatrix {
    pub labels: Option<Vec<String>>,
    pub matrix: ConfusionMatrix,
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input)
}

/// Reads a square integer matrix, one row per true class.
///
/// The first record is treated as a header of class labels when none of its
/// fields parse as an integer.
pub fn read_matrix_csv<R: Read>(input: R) -> Result<LabeledMatrix> {
    let mut labels: Option<Vec<String>> = None;
    let mut grid: Vec<Vec<i64>> = Vec::new();
    for (n, record) in reader(input).records().enumerate() {
        let record = record?;
        let line = record.position().map_or(n + 1, |p| p.line() as usize);
        if n == 0 && record.iter().all(|f| f.parse::<i64>().is_err()) {
            labels = Some(record.iter().map(str::to_string).collect());
            continue;
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(col, field)| {
                field.parse::<i64>().map_err(|_| Error::Parse {
                    line,
                    column: col + 1,
                    message: format!("`{field}` is not an integer"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        grid.push(row);
    }
    let matrix = ConfusionMatrix::validate(&grid)?;
    if let Some(l) = &labels {
        if l.len() != matrix.class_count() {
            return Err(Error::DimensionMismatch {
                left: matrix.class_count(),
                right: l.len(),
            });
        }
    }
    Ok(LabeledMatrix { labels, matrix })
}

pub fn write_matrix_csv<W: Write>(output: W, m: &ConfusionMatrix, labels: Option<&[String]>) -> Result<()> {
    let mut w = csv::Writer::from_writer(output);
    if let Some(labels) = labels {
        w.write_record(labels)?;
    }
    for row in m.rows() {
        w.write_record(row.iter().map(u64::to_string))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `true,predicted` label pairs. A leading `true,predicted` header is skipped.
pub fn read_label_pairs<R: Read>(input: R) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (n, record) in reader(input).records().enumerate() {
        let record = record?;
        let line = record.position().map_or(n + 1, |p| p.line() as usize);
        if record.len() != 2 {
            return Err(Error::Parse {
                line,
                column: record.len().min(2) + 1,
                message: format!("expected 2 fields (true,predicted), found {}", record.len()),
            });
        }
        if n == 0 && record[0].eq_ignore_ascii_case("true") && record[1].eq_ignore_ascii_case("predicted") {
            continue;
        }
        pairs.push((record[0].to_string(), record[1].to_string()));
    }
    Ok(pairs)
}

/// Builds a matrix from a label-pair file. Without `classes`, class order is first appearance.
pub fn read_labels_csv<R: Read>(input: R, classes: Option<&[String]>) -> Result<LabeledMatrix> {
    let pairs = read_label_pairs(input)?;
    let classes = match classes {
        Some(c) => c.to_vec(),
        None => infer_classes(&pairs),
    };
    let matrix = ingest_labels(pairs.iter().map(|(t, p)| (t.as_str(), p.as_str())), &classes)?;
    Ok(LabeledMatrix {
        labels: Some(classes),
        matrix,
    })
}
