use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `n` points of common dimension `d`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    d: usize,
    data: Vec<f64>,
}

impl PointSet {
    /// Builds a point set from a row-major buffer of `n * d` values.
    pub fn new(d: usize, data: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("point dimension must be positive"));
        }
        if data.is_empty() {
            return Err(Error::invalid("point set must contain at least one point"));
        }
        if !data.len().is_multiple_of(d) {
            return Err(Error::DimensionMismatch {
                expected: d * (data.len() / d + 1),
                actual: data.len(),
            });
        }
        Ok(Self { d, data })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let d = rows
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::invalid("point set must contain at least one point"))?;
        let mut data = Vec::with_capacity(d * rows.len());
        for row in rows {
            Error::check_len(d, row.len())?;
            data.extend(row);
        }
        Self::new(d, data)
    }

    pub fn n(&self) -> usize {
        self.data.len() / self.d
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.data.chunks_exact(self.d)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ragged_rows_rejected() {
        let err = PointSet::from_rows(vec![vec![1.0, 2.0], vec![3.0]]).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                actual: 1
            }
        );
    }

    #[test]
    fn empty_rejected() {
        assert!(PointSet::from_rows(vec![]).is_err());
        assert!(PointSet::new(3, vec![]).is_err());
    }

    #[test]
    fn rows_round_trip() {
        let ps = PointSet::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(ps.n(), 2);
        assert_eq!(ps.row(1), &[3.0, 4.0]);
        assert_eq!(ps.rows().count(), 2);
    }
}
