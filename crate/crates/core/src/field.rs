use alloc::vec::Vec;

use crate::{Error, Result};

/// Outcome of an integration run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunStatus {
    Completed,
    /// The run went non-finite (or past the blow-up guard) at `time`.
    Unstable {
        time: f64,
    },
}

impl RunStatus {
    pub fn is_stable(&self) -> bool {
        matches!(self, RunStatus::Completed)
    }
}

/// Solution values on a periodic space-time mesh.
///
/// Spatial nodes sit at `x_i = L i / rows`. Storage is one column per time
/// node; `macro_nodes[j]` marks columns that lie on the macro time grid
/// (every column of a single-scale run).
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    length: f64,
    rows: usize,
    times: Vec<f64>,
    macro_nodes: Vec<bool>,
    values: Vec<f64>,
    pub status: RunStatus,
}

impl SpaceTimeField {
    pub fn new(length: f64, rows: usize) -> Self {
        Self {
            length,
            rows,
            times: Vec::new(),
            macro_nodes: Vec::new(),
            values: Vec::new(),
            status: RunStatus::Completed,
        }
    }

    pub fn push_column(&mut self, time: f64, is_macro: bool, column: &[f64]) -> Result<()> {
        if column.len() != self.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, found: column.len() });
        }
        self.times.push(time);
        self.macro_nodes.push(is_macro);
        self.values.extend_from_slice(column);
        Ok(())
    }

    /// Pushes every `stride`-th entry of a finer column.
    pub(crate) fn push_strided(&mut self, time: f64, is_macro: bool, column: &[f64], stride: usize) {
        debug_assert_eq!(column.len(), self.rows * stride);
        self.times.push(time);
        self.macro_nodes.push(is_macro);
        self.values.extend(column.iter().step_by(stride).copied());
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn n_columns(&self) -> usize {
        self.times.len()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn is_macro(&self, j: usize) -> bool {
        self.macro_nodes[j]
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.values[j * self.rows..(j + 1) * self.rows]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.rows.max(1))
    }

    pub fn last_column(&self) -> Option<&[f64]> {
        self.n_columns().checked_sub(1).map(|j| self.column(j))
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.rows + i]
    }

    pub fn space_nodes(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.length * i as f64 / self.rows as f64).collect()
    }

    /// Index of the column whose time is within `tol` of `t`.
    pub fn find_time(&self, t: f64, tol: f64) -> Option<usize> {
        let j = self.times.partition_point(|&s| s < t - tol);
        (j < self.times.len() && libm::fabs(self.times[j] - t) <= tol).then_some(j)
    }

    /// Index of the last column with time `<= t`.
    pub fn column_at_or_before(&self, t: f64) -> Option<usize> {
        self.times.partition_point(|&s| s <= t).checked_sub(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_and_lookup() {
        let mut f = SpaceTimeField::new(2.0, 2);
        f.push_column(0.0, true, &[1.0, 2.0]).unwrap();
        f.push_column(0.1, false, &[3.0, 4.0]).unwrap();
        f.push_column(0.5, true, &[5.0, 6.0]).unwrap();
        assert_eq!(f.column(1), &[3.0, 4.0]);
        assert_eq!(f.value(1, 2), 6.0);
        assert_eq!(f.find_time(0.5 + 1e-13, 1e-12), Some(2));
        assert_eq!(f.find_time(0.3, 1e-12), None);
        assert_eq!(f.column_at_or_before(0.3), Some(1));
        assert_eq!(f.space_nodes(), [0.0, 1.0]);
        assert!(f.push_column(1.0, true, &[1.0]).is_err());
    }
}
