//! Labeled feature matrices, CSV ingest, centering and pairwise distances.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Dense row-major `n × D` matrix of finite reals.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty(format!("matrix shape {rows}x{cols}")));
        }
        if values.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Self { rows, cols, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            values.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, values)
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![0.0; rows * cols])
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.cols)
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.cols) {
            return Err(Error::InvalidParameter(format!(
                "column {bad} out of range for {} columns",
                self.cols
            )));
        }
        let mut values = Vec::with_capacity(self.rows * cols.len());
        for r in self.rows_iter() {
            values.extend(cols.iter().map(|&c| r[c]));
        }
        Self::new(self.rows, cols.len(), values)
    }
}

/// Dense integer class codes, one per row, plus the original label strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector {
    codes: Vec<usize>,
    names: Vec<String>,
}

impl LabelVector {
    /// Codes must be contiguous from 0; names default to the code's decimal form.
    pub fn from_codes(codes: Vec<usize>) -> Result<Self> {
        let k = codes.iter().max().map_or(0, |m| m + 1);
        let names = (0..k).map(|c| c.to_string()).collect();
        Self::with_names(codes, names)
    }

    pub fn with_names(codes: Vec<usize>, names: Vec<String>) -> Result<Self> {
        if codes.is_empty() {
            return Err(Error::Empty("label vector".into()));
        }
        if let Some(&bad) = codes.iter().find(|&&c| c >= names.len()) {
            return Err(Error::InvalidParameter(format!(
                "label code {bad} has no name ({} names)",
                names.len()
            )));
        }
        Ok(Self { codes, names })
    }

    /// Codes assigned by first appearance.
    pub fn from_strings<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        let mut index: HashMap<&str, usize> = HashMap::new();
        let mut names = Vec::new();
        let mut codes = Vec::with_capacity(labels.len());
        for l in labels {
            let l = l.as_ref();
            let code = *index.entry(l).or_insert_with(|| {
                names.push(l.to_string());
                names.len() - 1
            });
            codes.push(code);
        }
        Self::with_names(codes, names)
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn codes(&self) -> &[usize] {
        &self.codes
    }

    #[inline]
    pub fn code(&self, i: usize) -> usize {
        self.codes[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name_of(&self, i: usize) -> &str {
        &self.names[self.codes[i]]
    }

    pub fn num_classes(&self) -> usize {
        self.names.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceKind {
    #[default]
    Euclidean,
    Cosine,
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DistanceKind::Euclidean => "euclidean",
            DistanceKind::Cosine => "cosine",
        })
    }
}

impl FromStr for DistanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "euclidean" | "euclidian" | "l2" => Ok(DistanceKind::Euclidean),
            "cosine" => Ok(DistanceKind::Cosine),
            other => Err(Error::InvalidParameter(format!(
                "unknown distance `{other}` (expected euclidean or cosine)"
            ))),
        }
    }
}

/// Symmetric `n × n` distance matrix with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
}

impl DistanceMatrix {
    /// Validates symmetry (exact), zero diagonal and non-negativity.
    pub fn from_dense(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: values.len(),
            });
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(Error::Invariant(format!("distance d({i},{i}) is not zero")));
            }
            for j in 0..i {
                let v = values[i * n + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::Invariant(format!("distance d({i},{j}) = {v}")));
                }
                if v != values[j * n + i] {
                    return Err(Error::Invariant(format!("d({i},{j}) != d({j},{i})")));
                }
            }
        }
        Ok(Self { n, values })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Distances among `indices`, in that order.
    pub fn submatrix(&self, indices: &[usize]) -> DistanceMatrix {
        let m = indices.len();
        let mut values = Vec::with_capacity(m * m);
        for &i in indices {
            values.extend(indices.iter().map(|&j| self.get(i, j)));
        }
        DistanceMatrix { n: m, values }
    }

    /// Elementwise squares, still row-major `n × n`.
    pub fn squared(&self) -> Vec<f64> {
        self.values.iter().map(|d| d * d).collect()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// Reads a labeled CSV: header row, one label column, all other columns numeric.
pub fn load_csv(path: impl AsRef<Path>, label_column: &str) -> Result<(DataMatrix, LabelVector)> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, label_column)
}

pub fn read_csv<R: std::io::Read>(reader: R, label_column: &str) -> Result<(DataMatrix, LabelVector)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::MissingLabelColumn(label_column.to_string()))?;
    let width = headers.len();
    if width < 2 {
        return Err(Error::Empty("no feature columns besides the label".into()));
    }

    let mut values = Vec::new();
    let mut labels = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            return Err(Error::RaggedRow {
                line,
                expected: width,
                found: record.len(),
            });
        }
        for (c, field) in record.iter().enumerate() {
            if c == label_idx {
                labels.push(field.to_string());
                continue;
            }
            let v: f64 = field.parse().ok().filter(|v: &f64| v.is_finite()).ok_or_else(|| {
                Error::NonNumeric {
                    line,
                    column: headers[c].to_string(),
                    value: field.to_string(),
                }
            })?;
            values.push(v);
        }
    }
    if labels.is_empty() {
        return Err(Error::Empty("csv has no data rows".into()));
    }
    let x = DataMatrix::new(labels.len(), width - 1, values)?;
    let y = LabelVector::from_strings(&labels)?;
    Ok((x, y))
}

/// Writes features as `f0..f{d-1}` columns followed by a `label` column of
/// label names. Values use shortest round-trip formatting.
pub fn write_csv(x: &DataMatrix, labels: &LabelVector, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if labels.len() != x.nrows() {
        return Err(Error::DimensionMismatch {
            expected: x.nrows(),
            found: labels.len(),
        });
    }
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let mut header: Vec<String> = (0..x.ncols()).map(|k| format!("f{k}")).collect();
    header.push("label".into());
    w.write_record(&header)?;
    for (i, row) in x.rows_iter().enumerate() {
        let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        rec.push(labels.name_of(i).to_string());
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn column_means(x: &DataMatrix) -> Vec<f64> {
    let mut mean = vec![0.0; x.ncols()];
    for r in x.rows_iter() {
        for (m, v) in mean.iter_mut().zip(r) {
            *m += v;
        }
    }
    let n = x.nrows() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    mean
}

/// Subtracts the column means; returns the centered matrix and the means.
pub fn center_columns(x: &DataMatrix) -> (DataMatrix, Vec<f64>) {
    let mean = column_means(x);
    let mut values = Vec::with_capacity(x.as_slice().len());
    for r in x.rows_iter() {
        values.extend(r.iter().zip(&mean).map(|(v, m)| v - m));
    }
    let centered = DataMatrix {
        rows: x.nrows(),
        cols: x.ncols(),
        values,
    };
    (centered, mean)
}

/// Centers and scales each column to unit sample standard deviation.
/// Constant columns are only centered.
pub fn standardize_columns(x: &DataMatrix) -> DataMatrix {
    let (mut centered, _) = center_columns(x);
    let n = x.nrows();
    let d = x.ncols();
    if n < 2 {
        return centered;
    }
    let mut sd = vec![0.0; d];
    for r in centered.rows_iter() {
        for (s, v) in sd.iter_mut().zip(r) {
            *s += v * v;
        }
    }
    for s in &mut sd {
        *s = (*s / (n - 1) as f64).sqrt();
    }
    for r in centered.values.chunks_exact_mut(d) {
        for (v, s) in r.iter_mut().zip(&sd) {
            if *s > 0.0 {
                *v /= s;
            }
        }
    }
    centered
}

#[inline]
pub(crate) fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// All-pairs distances. Each unordered pair is evaluated once and mirrored.
pub fn pairwise_distances(x: &DataMatrix, kind: DistanceKind) -> Result<DistanceMatrix> {
    let n = x.nrows();
    let norms2: Vec<f64> = x.rows_iter().map(|r| dot(r, r)).collect();
    if kind == DistanceKind::Cosine {
        if let Some(i) = norms2.iter().position(|&s| s == 0.0) {
            return Err(Error::ZeroNormRow(i));
        }
    }

    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let ri = x.row(i);
            ((i + 1)..n)
                .map(|j| {
                    let rj = x.row(j);
                    match kind {
                        DistanceKind::Euclidean => squared_euclidean(ri, rj).sqrt(),
                        DistanceKind::Cosine => {
                            let sim = dot(ri, rj) / (norms2[i] * norms2[j]).sqrt();
                            (1.0 - sim).max(0.0)
                        }
                    }
                })
                .collect()
        })
        .collect();

    let mut values = vec![0.0; n * n];
    for (i, row) in upper.iter().enumerate() {
        for (off, &d) in row.iter().enumerate() {
            let j = i + 1 + off;
            values[i * n + j] = d;
            values[j * n + i] = d;
        }
    }
    Ok(DistanceMatrix { n, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn csv_err(text: &str) -> Error {
        read_csv(text.as_bytes(), "label").unwrap_err()
    }

    #[test]
    fn loads_small_csv_with_first_appearance_codes() {
        let text = "f1,label,f2\n1,a,2\n3,a,4\n5,b,6\n7,b,8\n";
        let (x, y) = read_csv(text.as_bytes(), "label").unwrap();
        assert_eq!((x.nrows(), x.ncols()), (4, 2));
        assert_eq!(x.row(2), &[5.0, 6.0]);
        assert_eq!(y.codes(), &[0, 0, 1, 1]);
        assert_eq!(y.names(), &["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn write_then_load_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        let x = DataMatrix::from_rows(&[vec![0.1, -2.5e-7], vec![1.0 / 3.0, 4.0]]).unwrap();
        let y = LabelVector::from_strings(&["cat", "dog"]).unwrap();
        write_csv(&x, &y, &path).unwrap();
        let (x2, y2) = load_csv(&path, "label").unwrap();
        assert_eq!(x, x2);
        assert_eq!(y.names(), y2.names());
        assert_eq!(y.codes(), y2.codes());
    }

    #[test]
    fn non_numeric_cell_names_line_and_column() {
        match csv_err("x,y,label\n1,2,a\n3,abc,b\n") {
            Error::NonNumeric { line, column, value } => {
                assert_eq!(line, 3);
                assert_eq!(column, "y");
                assert_eq!(value, "abc");
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn ragged_and_missing_label_are_errors() {
        assert!(matches!(csv_err("x,y,label\n1,2,a\n3,b\n"), Error::RaggedRow { line: 3, .. }));
        assert!(matches!(
            read_csv("x,y\n1,2\n".as_bytes(), "label").unwrap_err(),
            Error::MissingLabelColumn(_)
        ));
        assert!(matches!(
            load_csv("/nonexistent/file.csv", "label").unwrap_err(),
            Error::Io { .. }
        ));
    }

    #[test]
    fn center_two_points() {
        let x = DataMatrix::from_rows(&[vec![1.0], vec![3.0]]).unwrap();
        let (c, mean) = center_columns(&x);
        assert_eq!(c.as_slice(), &[-1.0, 1.0]);
        assert_eq!(mean, vec![2.0]);
    }

    #[test]
    fn center_random_matrix_has_zero_column_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let vals: Vec<f64> = (0..250).map(|_| rng.random_range(-10.0..10.0)).collect();
        let x = DataMatrix::new(50, 5, vals).unwrap();
        let (c, _) = center_columns(&x);
        for j in 0..5 {
            let s: f64 = (0..50).map(|i| c.get(i, j)).sum();
            assert!(s.abs() < 1e-9, "column {j} sum {s}");
        }
        let (cc, mean2) = center_columns(&c);
        assert!(mean2.iter().all(|m| m.abs() < 1e-12));
        for (a, b) in cc.as_slice().iter().zip(c.as_slice()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn standardize_gives_unit_variance() {
        let x = DataMatrix::from_rows(&[vec![1.0, 5.0], vec![2.0, 5.0], vec![3.0, 5.0]]).unwrap();
        let s = standardize_columns(&x);
        assert_eq!(s.as_slice(), &[-1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn distance_examples() {
        let x = DataMatrix::from_rows(&[vec![0.0, 0.0], vec![3.0, 4.0], vec![3.0, 4.0]]).unwrap();
        let d = pairwise_distances(&x, DistanceKind::Euclidean).unwrap();
        assert_eq!(d.get(0, 1), 5.0);
        assert_eq!(d.get(1, 2), 0.0);

        let x = DataMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.3, 0.7], vec![0.3, 0.7]])
            .unwrap();
        let d = pairwise_distances(&x, DistanceKind::Cosine).unwrap();
        assert_eq!(d.get(0, 1), 1.0);
        assert_eq!(d.get(2, 3), 0.0);
    }

    #[test]
    fn cosine_rejects_zero_row() {
        let x = DataMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(
            pairwise_distances(&x, DistanceKind::Cosine),
            Err(Error::ZeroNormRow(1))
        ));
    }

    #[test]
    fn non_finite_values_rejected() {
        assert!(matches!(
            DataMatrix::new(1, 2, vec![1.0, f64::NAN]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
    }

    proptest! {
        #[test]
        fn distances_symmetric_and_metric(
            vals in proptest::collection::vec(-50.0f64..50.0, 24),
            cosine in any::<bool>(),
        ) {
            let x = DataMatrix::new(8, 3, vals).unwrap();
            let kind = if cosine { DistanceKind::Cosine } else { DistanceKind::Euclidean };
            let Ok(d) = pairwise_distances(&x, kind) else { return Ok(()); };
            for i in 0..8 {
                prop_assert_eq!(d.get(i, i), 0.0);
                for j in 0..8 {
                    prop_assert_eq!(d.get(i, j), d.get(j, i));
                    prop_assert!(d.get(i, j) >= 0.0);
                }
            }
            if !cosine {
                for i in 0..8 {
                    for j in 0..8 {
                        for k in 0..8 {
                            prop_assert!(d.get(i, k) <= d.get(i, j) + d.get(j, k) + 1e-9);
                        }
                    }
                }
            }
        }
    }
}
