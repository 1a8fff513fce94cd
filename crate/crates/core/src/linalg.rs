//! Compressed sparse rows and the plain-text matrix format.
//!
//! The text format starts with `rows cols bandwidth`. When `bandwidth == cols`
//! every row lists all `cols` entries; otherwise each row is `first_col v₀ v₁ ...`
//! holding the contiguous window from its first to its last stored entry.

use nalgebra::DMatrix;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixFormatError {
    #[error("missing or malformed header 'rows cols bandwidth'")]
    Header,
    #[error("line {line}: {message}")]
    Row { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Keeps every entry that is not exactly zero.
    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let (rows, cols) = m.shape();
        let mut row_ptr = Vec::with_capacity(rows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in 0..rows {
            for j in 0..cols {
                let v = m[(i, j)];
                if v != 0.0 {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(values.len());
        }
        Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Builds from per-row `(col, value)` lists; columns are sorted and duplicates summed.
    pub fn from_rows(cols: usize, rows: Vec<Vec<(usize, f64)>>) -> Self {
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        let n = rows.len();
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            let start = values.len();
            for (c, v) in row {
                assert!(c < cols, "column {c} out of range");
                if values.len() > start && col_idx.last() == Some(&c) {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(values.len());
        }
        Self {
            rows: n,
            cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (c, v) = self.row(i);
        c.binary_search(&j).map(|p| v[p]).unwrap_or(0.0)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            let (c, v) = self.row(i);
            for (&j, &x) in c.iter().zip(v) {
                m[(i, j)] = x;
            }
        }
        m
    }

    /// `y = A x`; returns the number of floating-point operations (two per stored entry).
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) -> u64 {
        assert_eq!(x.len(), self.cols);
        assert_eq!(y.len(), self.rows);
        for (i, out) in y.iter_mut().enumerate() {
            let (c, v) = self.row(i);
            *out = c.iter().zip(v).map(|(&j, &a)| a * x[j]).sum();
        }
        2 * self.nnz() as u64
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        self.mul_vec(x, &mut y);
        y
    }

    /// `Aᵀ x`.
    pub fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows);
        let mut y = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            let (c, v) = self.row(i);
            for (&j, &a) in c.iter().zip(v) {
                y[j] += a * xi;
            }
        }
        y
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).1.iter().sum()).collect()
    }

    /// Widest row window `last_col − first_col + 1`.
    pub fn bandwidth(&self) -> usize {
        (0..self.rows)
            .map(|i| {
                let (c, _) = self.row(i);
                match (c.first(), c.last()) {
                    (Some(a), Some(b)) => b - a + 1,
                    _ => 0,
                }
            })
            .max()
            .unwrap_or(0)
    }

    /// Serializes densely when `dense` is set, otherwise row windows.
    pub fn to_text(&self, dense: bool) -> String {
        let bandwidth = if dense { self.cols } else { self.bandwidth() };
        let mut out = format!("{} {} {}\n", self.rows, self.cols, bandwidth);
        for i in 0..self.rows {
            let (c, _) = self.row(i);
            let (first, last) = if dense || bandwidth == self.cols {
                (0, self.cols)
            } else {
                match (c.first(), c.last()) {
                    (Some(&a), Some(&b)) => (a, b + 1),
                    _ => (0, 0),
                }
            };
            let mut line = String::new();
            if !(dense || bandwidth == self.cols) {
                let _ = write!(line, "{first}");
            }
            for j in first..last {
                if !line.is_empty() {
                    line.push(' ');
                }
                let _ = write!(line, "{}", self.get(i, j));
            }
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, MatrixFormatError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(MatrixFormatError::Header)?;
        let h: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| MatrixFormatError::Header)?;
        let [rows, cols, bandwidth] = h[..] else {
            return Err(MatrixFormatError::Header);
        };
        let dense = bandwidth == cols;
        let mut out = Vec::with_capacity(rows);
        for (line_no, line) in lines.by_ref().take(rows) {
            let err = |message: String| MatrixFormatError::Row {
                line: line_no + 1,
                message,
            };
            let mut tokens = line.split_whitespace();
            let first = if dense {
                0
            } else {
                tokens
                    .next()
                    .ok_or_else(|| err("missing first column".into()))?
                    .parse::<usize>()
                    .map_err(|e| err(e.to_string()))?
            };
            let vals: Vec<f64> = tokens
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|e: std::num::ParseFloatError| err(e.to_string()))?;
            if dense && vals.len() != cols {
                return Err(err(format!("expected {cols} entries, found {}", vals.len())));
            }
            if !dense && (vals.len() > bandwidth || first + vals.len() > cols) {
                return Err(err("row window exceeds the bandwidth or the column count".into()));
            }
            out.push(
                vals.into_iter()
                    .enumerate()
                    .filter(|(_, v)| *v != 0.0)
                    .map(|(k, v)| (first + k, v))
                    .collect(),
            );
        }
        if out.len() != rows {
            return Err(MatrixFormatError::Row {
                line: out.len() + 2,
                message: format!("expected {rows} rows"),
            });
        }
        Ok(Self::from_rows(cols, out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_round_trip_and_products() {
        let d = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 2.5, 0.0, -0.1, 0.0]);
        let m = CsrMatrix::from_dense(&d);
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.to_dense(), d);
        assert_eq!(m.apply(&[1.0, 2.0, 3.0]), vec![8.5, -0.2]);
        assert_eq!(m.apply_transpose(&[1.0, 1.0]), vec![1.0, -0.1, 2.5]);
        assert_eq!(CsrMatrix::from_text(&m.to_text(true)).unwrap(), m);
        assert!(m.to_text(true).starts_with("2 3 3\n"));
    }

    #[test]
    fn banded_text_format() {
        let d = DMatrix::from_row_slice(3, 4, &[1.0, 2.0, 0.0, 0.0, 0.0, 3.0, 4.0, 0.0, 0.0, 0.0, 0.0, 5.0]);
        let m = CsrMatrix::from_dense(&d);
        assert_eq!(m.bandwidth(), 2);
        let text = m.to_text(false);
        assert_eq!(text, "3 4 2\n0 1 2\n1 3 4\n3 5\n");
        assert_eq!(CsrMatrix::from_text(&text).unwrap(), m);
        assert!(CsrMatrix::from_text("3 4 2\n0 1 2 3\n").is_err());
        assert!(CsrMatrix::from_text("x").is_err());
    }

    #[test]
    fn shortest_float_formatting_round_trips() {
        let d = DMatrix::from_row_slice(1, 2, &[0.1 + 0.2, 1.0 / 3.0]);
        let m = CsrMatrix::from_dense(&d);
        assert_eq!(CsrMatrix::from_text(&m.to_text(true)).unwrap().to_dense(), d);
    }
}
