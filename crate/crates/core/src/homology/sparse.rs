use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;

/// Sparse integer matrix, row-major. Zero entries are never stored, so
/// structural equality is mathematical equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BTreeMap<usize, i64>>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BTreeMap::new(); rows],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i].get(&j).copied().unwrap_or(0)
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: i64) {
        assert!(i < self.rows && j < self.cols, "({i},{j}) out of bounds");
        if v == 0 {
            return;
        }
        let entry = self.data[i].entry(j).or_insert(0);
        *entry += v;
        if *entry == 0 {
            self.data[i].remove(&j);
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        assert!(i < self.rows && j < self.cols, "({i},{j}) out of bounds");
        if v == 0 {
            self.data[i].remove(&j);
        } else {
            self.data[i].insert(j, v);
        }
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.data[i].iter().map(|(&j, &v)| (j, v))
    }

    /// All non-zero entries as `(row, col, value)`, row-major.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |(&j, &v)| (i, j, v)))
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(BTreeMap::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BTreeMap::is_empty)
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for (i, j, v) in self.triplets() {
            t.data[j].insert(i, v);
        }
        t
    }

    pub fn matmul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for (i, row) in self.data.iter().enumerate() {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for (&k, &a) in row {
                for (&j, &b) in &rhs.data[k] {
                    *acc.entry(j).or_insert(0) += a * b;
                }
            }
            acc.retain(|_, v| *v != 0);
            out.data[i] = acc;
        }
        out
    }

    pub fn plus(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shapes differ");
        let mut out = self.clone();
        for (i, j, v) in rhs.triplets() {
            out.add_to(i, j, v);
        }
        out
    }

    /// Copy of the block `[r0, r0+rows) × [c0, c0+cols)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> IntMatrix {
        let mut out = IntMatrix::zeros(rows, cols);
        for i in 0..rows {
            for (&j, &v) in self.data[r0 + i].range(c0..c0 + cols) {
                out.data[i].insert(j - c0, v);
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && self.triplets().all(|(i, j, v)| self.get(j, i) == v)
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> i64 {
        self.data
            .iter()
            .map(|r| r.values().map(|v| v.abs()).sum::<i64>())
            .max()
            .unwrap_or(0)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for (i, j, v) in self.triplets() {
            m[(i, j)] = v as f64;
        }
        m
    }

    pub(crate) fn to_dense_rows(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; self.cols]; self.rows];
        for (i, j, v) in self.triplets() {
            m[i][j] = v;
        }
        m
    }

    /// Coordinate text: a `rows cols nnz` header, then one `row col value`
    /// line per non-zero, zero-based.
    pub fn to_coordinate_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.rows, self.cols, self.nnz());
        for (i, j, v) in self.triplets() {
            writeln!(out, "{i} {j} {v}").expect("write to string");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let mut a = IntMatrix::zeros(2, 3);
        a.set(0, 0, 1);
        a.set(0, 2, -1);
        a.set(1, 1, 2);
        let at = a.transpose();
        assert_eq!(at.get(2, 0), -1);
        let g = a.matmul(&at);
        assert_eq!(g.get(0, 0), 2);
        assert_eq!(g.get(1, 1), 4);
        assert_eq!(g.get(0, 1), 0);
        assert_eq!(g.nnz(), 2);
        assert!(g.is_symmetric());
        assert!(a.plus(&a).plus(&IntMatrix::zeros(2, 3)).get(1, 1) == 4);
        let mut z = a.clone();
        z.add_to(1, 1, -2);
        assert_eq!(z.nnz(), 2);
        assert_eq!(a.inf_norm(), 2);
        assert_eq!(a.to_coordinate_text(), "2 3 3\n0 0 1\n0 2 -1\n1 1 2\n");
        assert_eq!(a.block(0, 1, 2, 2).get(1, 0), 2);
    }
}
