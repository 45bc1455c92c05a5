use std::collections::BTreeMap;
use std::fmt;

use super::ring::Pid;
use super::AlgebraError;

/// Sparse matrix over a PID. Zero entries are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix<R: Pid> {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), R>,
}

impl<R: Pid> SparseMatrix<R> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries.insert((i, i), R::one());
        }
        m
    }

    pub fn from_entries<I>(rows: usize, cols: usize, entries: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (usize, usize, R)>,
    {
        let mut m = Self::zeros(rows, cols);
        for (i, j, v) in entries {
            if i >= rows || j >= cols {
                return Err(AlgebraError::IndexOutOfRange { row: i, col: j, rows, cols });
            }
            m.add_to(i, j, v);
        }
        Ok(m)
    }

    pub fn from_dense(rows: &[Vec<R>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn to_dense(&self) -> Vec<Vec<R>> {
        let mut d = vec![vec![R::zero(); self.cols]; self.rows];
        for (&(i, j), v) in &self.entries {
            d[i][j] = v.clone();
        }
        d
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> R {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(R::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, v: R) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        if v.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), v);
        }
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: R) {
        let cur = self.get(i, j);
        self.set(i, j, cur + v);
    }

    /// Nonzero entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &R)> {
        self.entries.iter().map(|(&(i, j), v)| (i, j, v))
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, &R)> {
        self.entries.range((i, 0)..(i + 1, 0)).map(|(&(_, j), v)| (j, v))
    }

    pub fn column(&self, j: usize) -> Vec<(usize, R)> {
        self.iter().filter(|&(_, c, _)| c == j).map(|(i, _, v)| (i, v.clone())).collect()
    }

    pub fn transpose(&self) -> Self {
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            entries: self.entries.iter().map(|(&(i, j), v)| ((j, i), v.clone())).collect(),
        }
    }

    pub fn scale(&self, k: &R) -> Self {
        let mut out = Self::zeros(self.rows, self.cols);
        for (&(i, j), v) in &self.entries {
            out.set(i, j, k.clone() * v.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&(-R::one()))
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.same_shape(other, "add")?;
        let mut out = self.clone();
        for (&(i, j), v) in &other.entries {
            out.add_to(i, j, v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.cols != other.rows {
            return Err(AlgebraError::DimensionMismatch {
                op: "mul",
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let mut by_row: BTreeMap<usize, Vec<(usize, &R)>> = BTreeMap::new();
        for (&(k, j), v) in &other.entries {
            by_row.entry(k).or_default().push((j, v));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for (&(i, k), a) in &self.entries {
            if let Some(row) = by_row.get(&k) {
                for &(j, b) in row {
                    out.add_to(i, j, a.clone() * b.clone());
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[R]) -> Result<Vec<R>, AlgebraError> {
        if x.len() != self.cols {
            return Err(AlgebraError::DimensionMismatch {
                op: "mul_vec",
                left: (self.rows, self.cols),
                right: (x.len(), 1),
            });
        }
        let mut y = vec![R::zero(); self.rows];
        for (&(i, j), v) in &self.entries {
            y[i] = y[i].clone() + v.clone() * x[j].clone();
        }
        Ok(y)
    }

    /// Rows and columns picked by index lists, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let row_pos: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        let col_pos: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(p, &j)| (j, p)).collect();
        let mut out = Self::zeros(rows.len(), cols.len());
        for (&(i, j), v) in &self.entries {
            if let (Some(&p), Some(&q)) = (row_pos.get(&i), col_pos.get(&j)) {
                out.set(p, q, v.clone());
            }
        }
        out
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hconcat(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.rows != other.rows {
            return Err(AlgebraError::DimensionMismatch {
                op: "hconcat",
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        out.entries = self.entries.clone();
        for (&(i, j), v) in &other.entries {
            out.entries.insert((i, j + self.cols), v.clone());
        }
        Ok(out)
    }

    fn same_shape(&self, other: &Self, op: &'static str) -> Result<(), AlgebraError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(AlgebraError::DimensionMismatch {
                op,
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        Ok(())
    }
}

impl<R: Pid> fmt::Display for SparseMatrix<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dense = self.to_dense();
        let cells: Vec<Vec<String>> =
            dense.iter().map(|row| row.iter().map(|v| v.to_string()).collect()).collect();
        let width = cells.iter().flatten().map(|s| s.len()).max().unwrap_or(1);
        for row in &cells {
            let line: Vec<String> = row.iter().map(|s| format!("{s:>width$}")).collect();
            writeln!(f, "[{}]", line.join(" "))?;
        }
        Ok(())
    }
}
