use crate::error::{Error, Result};
use crate::exact::Subspace;
use crate::scalar::{dot, Scalar};

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from rows; `cols` is needed to describe a matrix with
    /// zero rows.
    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let n = rows.len();
        for row in rows {
            if row.len() != cols {
                return Err(Error::dims("matrix row", cols, row.len()));
            }
            data.extend(row);
        }
        Ok(Self {
            rows: n,
            cols,
            data,
        })
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(columns: &[Vec<T>], rows: usize) -> Result<Self> {
        if let Some(bad) = columns.iter().find(|c| c.len() != rows) {
            return Err(Error::dims("matrix column", rows, bad.len()));
        }
        Ok(Self::from_fn(rows, columns.len(), |i, j| {
            columns[j][i].clone()
        }))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), self.cols, |i, j| self.get(idx[i], j).clone())
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    pub fn mul_vec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols {
            return Err(Error::dims("matrix-vector product", self.cols, x.len()));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::dims("hstack", self.rows, other.rows));
        }
        Ok(Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        }))
    }

    /// Vertical concatenation.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::dims("vstack", self.cols, other.cols));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Rank by fraction-free (Bareiss) elimination. On integer-valued input
    /// every intermediate entry is itself a minor of the input, so rational
    /// entries never pick up denominators.
    pub fn rank(&self) -> usize {
        let (rows, cols) = (self.rows, self.cols);
        let mut a = self.data.clone();
        let mut prev = T::one();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !a[i * cols + c].is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..cols {
                    a.swap(p * cols + j, r * cols + j);
                }
            }
            let pivot = a[r * cols + c].clone();
            for i in r + 1..rows {
                let lead = a[i * cols + c].clone();
                for j in c + 1..cols {
                    let v = (pivot.clone() * a[i * cols + j].clone()
                        - lead.clone() * a[r * cols + j].clone())
                        / prev.clone();
                    a[i * cols + j] = v;
                }
                a[i * cols + c] = T::zero();
            }
            prev = pivot;
            r += 1;
        }
        r
    }

    /// Reduced row echelon form and the pivot column of each nonzero row.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = T::one() / m.get(r, c).clone();
            for j in c..self.cols {
                let v = m.get(r, j).clone() * inv.clone();
                m.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..self.cols {
                    let v = m.get(i, j).clone() - f.clone() * m.get(r, j).clone();
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    /// Basis of `{x : M x = 0}`, one vector per free column of the RREF, in
    /// increasing free-column order.
    pub fn null_space(&self) -> Subspace<T> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&j| !is_pivot[j]) {
            let mut v = vec![T::zero(); self.cols];
            v[free] = T::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r.get(row, free).clone();
            }
            debug_assert!(self.mul_vec(&v).unwrap().iter().all(|e| e.is_zero()));
            basis.push(v);
        }
        Subspace::from_independent(self.cols, basis)
    }

    /// One solution of `M x = b` (free variables set to zero), or `None` when
    /// the system is inconsistent.
    pub fn solve(&self, b: &[T]) -> Result<Option<Vec<T>>> {
        if b.len() != self.rows {
            return Err(Error::dims("linear solve", self.rows, b.len()));
        }
        let aug = self.hstack(&Matrix::from_fn(self.rows, 1, |i, _| b[i].clone()))?;
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![T::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = r.get(row, self.cols).clone();
        }
        Ok(Some(x))
    }

    /// Indices of a maximal linearly independent subset of rows, chosen
    /// greedily in row order.
    pub fn independent_rows(&self) -> Vec<usize> {
        let (_, pivots) = self.transpose().rref();
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}
