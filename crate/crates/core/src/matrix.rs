use crate::error::{Error, Result};

/// An `n x d` matrix of finite coordinates stored row-major, one row per
/// observation.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl DataMatrix {
    /// Builds a matrix from row-major values. Rejects empty shapes and
    /// non-finite entries.
    pub fn from_row_major(values: Vec<f64>, rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 {
            return Err(Error::EmptyData);
        }
        if cols == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        if values.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "{} values cannot form a {rows}x{cols} matrix",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Self { values, rows, cols })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyData)?.as_ref().len();
        let mut values = Vec::with_capacity(rows.len() * first);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != first {
                return Err(Error::Ragged {
                    row: i,
                    expected: first,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::from_row_major(values, rows.len(), first)
    }

    /// A single-column matrix.
    pub fn from_column(values: &[f64]) -> Result<Self> {
        Self::from_row_major(values.to_vec(), values.len(), 1)
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

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn column_mean(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.cols];
        for row in self.rows() {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        let n = self.rows as f64;
        mean.iter_mut().for_each(|m| *m /= n);
        mean
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &DataMatrix) -> Result<DataMatrix> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.cols,
            });
        }
        let mut values = self.values.clone();
        values.extend_from_slice(&other.values);
        Ok(DataMatrix {
            values,
            rows: self.rows + other.rows,
            cols: self.cols,
        })
    }

    /// The first `k` rows.
    pub fn head(&self, k: usize) -> Result<DataMatrix> {
        let k = k.min(self.rows);
        Self::from_row_major(self.values[..k * self.cols].to_vec(), k, self.cols)
    }

    /// Applies `x -> A x + b` to every row; `a` is row-major `d x d`.
    pub fn affine(&self, a: &[f64], b: &[f64]) -> Result<DataMatrix> {
        let d = self.cols;
        if a.len() != d * d || b.len() != d {
            return Err(Error::InvalidArgument("affine map has wrong shape".into()));
        }
        let mut out = Vec::with_capacity(self.values.len());
        for row in self.rows() {
            for r in 0..d {
                let dot: f64 = (0..d).map(|c| a[r * d + c] * row[c]).sum();
                out.push(dot + b[r]);
            }
        }
        Self::from_row_major(out, self.rows, d)
    }

    pub(crate) fn ensure_dim(&self, d: usize) -> Result<()> {
        if self.cols != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: self.cols,
            });
        }
        Ok(())
    }
}

pub(crate) fn check_point(x: &[f64], d: usize) -> Result<()> {
    if x.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: x.len(),
        });
    }
    if let Some(col) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { row: 0, col });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_and_ragged() {
        assert_eq!(
            DataMatrix::from_rows(&[[1.0, f64::NAN]]).unwrap_err(),
            Error::NonFinite { row: 0, col: 1 }
        );
        let rows: Vec<Vec<f64>> = vec![vec![1.0, 2.0], vec![3.0]];
        assert!(matches!(
            DataMatrix::from_rows(&rows),
            Err(Error::Ragged { row: 1, .. })
        ));
        assert_eq!(
            DataMatrix::from_row_major(vec![], 0, 2).unwrap_err(),
            Error::EmptyData
        );
    }

    #[test]
    fn mean_and_stack() {
        let a = DataMatrix::from_rows(&[[0.0, 0.0], [2.0, 4.0]]).unwrap();
        assert_eq!(a.column_mean(), vec![1.0, 2.0]);
        let b = a.vstack(&a).unwrap();
        assert_eq!(b.nrows(), 4);
        assert_eq!(b.row(3), &[2.0, 4.0]);
    }
}
