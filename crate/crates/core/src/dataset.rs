use std::path::PathBuf;

use crate::da::NetworkShape;
use crate::error::{Error, Result};

/// Where a dataset came from.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Synthetic {
        rho: f64,
        seed: u64,
    },
    IdxFile(PathBuf),
    InMemory,
    /// Column or row subset of another dataset.
    Derived,
}

/// `n` instances with entries in `[0, 1]`, stored row-major. When `bias` is set
/// every row carries a trailing constant 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n: usize,
    visible: usize,
    bias: bool,
    values: Vec<f64>,
    source: DataSource,
}

impl Dataset {
    /// Build from raw data rows (without bias); the bias column is appended when
    /// `bias` is set.
    pub fn from_rows(rows: &[Vec<f64>], bias: bool, source: DataSource) -> Result<Self> {
        let dims = rows.first().ok_or(Error::EmptyDataset)?.len();
        let mut values = Vec::with_capacity(rows.len() * (dims + 1));
        for (r, row) in rows.iter().enumerate() {
            if row.len() != dims {
                return Err(Error::Dimension(format!(
                    "row {r} has {} coordinates, expected {dims}",
                    row.len()
                )));
            }
            values.extend_from_slice(row);
            if bias {
                values.push(1.0);
            }
        }
        Self::from_visible(rows.len(), dims + usize::from(bias), bias, values, source)
    }

    /// Build from `n · dims` data values (without bias), row-major.
    pub fn from_flat(
        n: usize,
        dims: usize,
        data: &[f64],
        bias: bool,
        source: DataSource,
    ) -> Result<Self> {
        if data.len() != n * dims {
            return Err(Error::Dimension(format!(
                "{} values do not form {n} rows of {dims}",
                data.len()
            )));
        }
        if !bias {
            return Self::from_visible(n, dims, false, data.to_vec(), source);
        }
        let mut values = Vec::with_capacity(n * (dims + 1));
        for row in data.chunks(dims.max(1)).take(n) {
            values.extend_from_slice(row);
            values.push(1.0);
        }
        Self::from_visible(n, dims + 1, true, values, source)
    }

    /// Build from rows that already include the bias coordinate when `bias` is set.
    pub fn from_visible(
        n: usize,
        visible: usize,
        bias: bool,
        values: Vec<f64>,
        source: DataSource,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        if visible == 0 || values.len() != n * visible {
            return Err(Error::Dimension(format!(
                "{} values do not form {n} rows of {visible}",
                values.len()
            )));
        }
        for (pos, &value) in values.iter().enumerate() {
            if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                return Err(Error::InputDomain {
                    index: pos % visible,
                    value,
                });
            }
            if bias && pos % visible == visible - 1 && value != 1.0 {
                return Err(Error::InputDomain {
                    index: visible - 1,
                    value,
                });
            }
        }
        Ok(Self {
            n,
            visible,
            bias,
            values,
            source,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Row length including the bias coordinate.
    pub fn visible(&self) -> usize {
        self.visible
    }

    /// Row length excluding the bias coordinate.
    pub fn data_dims(&self) -> usize {
        self.visible - usize::from(self.bias)
    }

    pub fn bias(&self) -> bool {
        self.bias
    }

    pub fn source(&self) -> &DataSource {
        &self.source
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.visible..(i + 1) * self.visible]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.visible)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn shape(&self, hidden: usize) -> Result<NetworkShape> {
        NetworkShape::new(self.visible, hidden, self.bias)
    }

    /// Keep only the listed columns. When this dataset has a bias column it must
    /// be listed last, and the result keeps it as its bias.
    pub fn restrict_columns(&self, columns: &[usize]) -> Result<Self> {
        if columns.is_empty() || columns.iter().any(|&c| c >= self.visible) {
            return Err(Error::Dimension("column subset out of range".into()));
        }
        let keeps_bias = self.bias && columns.last() == Some(&(self.visible - 1));
        if self.bias && columns[..columns.len() - 1].contains(&(self.visible - 1)) {
            return Err(Error::Dimension("bias column must come last".into()));
        }
        let mut values = Vec::with_capacity(self.n * columns.len());
        for row in self.rows() {
            values.extend(columns.iter().map(|&c| row[c]));
        }
        Self::from_visible(
            self.n,
            columns.len(),
            keeps_bias,
            values,
            DataSource::Derived,
        )
    }

    /// Keep only the listed rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        if indices.iter().any(|&i| i >= self.n) {
            return Err(Error::Dimension("row index out of range".into()));
        }
        let mut values = Vec::with_capacity(indices.len() * self.visible);
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        Self::from_visible(
            indices.len(),
            self.visible,
            self.bias,
            values,
            DataSource::Derived,
        )
    }
}
