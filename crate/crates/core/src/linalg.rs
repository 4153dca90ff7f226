//! Dense row-major matrices over any [`Field`].

use serde::{Deserialize, Serialize};

use crate::gf::Field;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Copy> Matrix<E> {
    pub fn filled(rows: usize, cols: usize, value: E) -> Self {
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    /// Builds a matrix from equal-length rows. Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<E>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let n = rows.len();
        Self {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// An empty matrix with a fixed number of columns.
    pub fn empty(cols: usize) -> Self {
        Self {
            rows: 0,
            cols,
            data: Vec::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> E {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: E) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[E] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [E] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<E> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<E>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c));
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn push_row(&mut self, row: &[E]) {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        self.data.extend_from_slice(row);
        self.rows += 1;
    }

    /// Rows stacked below each other.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "column count mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Columns placed side by side.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "row count mismatch");
        let rows = (0..self.rows)
            .map(|r| {
                let mut row = self.row(r).to_vec();
                row.extend_from_slice(other.row(r));
                row
            })
            .collect();
        let mut m = Self::from_rows(rows);
        m.cols = self.cols + other.cols;
        m
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for r in 0..self.rows {
            data.extend(cols.iter().map(|&c| self.get(r, c)));
        }
        Self {
            rows: self.rows,
            cols: cols.len(),
            data,
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Self {
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn map<T: Copy>(&self, f: impl Fn(E) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }
}

impl<E: Copy + Eq> Matrix<E> {
    pub fn zeros<F: Field<Elem = E>>(f: &F, rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, f.zero())
    }

    pub fn identity<F: Field<Elem = E>>(f: &F, n: usize) -> Self {
        let mut m = Self::zeros(f, n, n);
        for i in 0..n {
            m.set(i, i, f.one());
        }
        m
    }

    pub fn is_zero<F: Field<Elem = E>>(&self, f: &F) -> bool {
        self.data.iter().all(|&x| f.is_zero(x))
    }

    pub fn mul<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if f.is_zero(a) {
                    continue;
                }
                for c in 0..other.cols {
                    let v = f.add(out.get(r, c), f.mul(a, other.get(k, c)));
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_mul_vec<F: Field<Elem = E>>(&self, f: &F, v: &[E]) -> Vec<E> {
        assert_eq!(v.len(), self.rows, "dimension mismatch");
        let mut out = vec![f.zero(); self.cols];
        for (r, &a) in v.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (c, o) in out.iter_mut().enumerate() {
                *o = f.add(*o, f.mul(a, self.get(r, c)));
            }
        }
        out
    }

    pub fn add<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "dimension mismatch"
        );
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref<F: Field<Elem = E>>(&self, f: &F) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !f.is_zero(m.get(r, col))) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = f.inv(m.get(row, col));
            for x in m.row_mut(row) {
                *x = f.mul(*x, inv);
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m.get(r, col);
                if f.is_zero(factor) {
                    continue;
                }
                for c in col..m.cols {
                    let v = f.sub(m.get(r, c), f.mul(factor, m.get(row, c)));
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank<F: Field<Elem = E>>(&self, f: &F) -> usize {
        if self.rows > self.cols {
            return self.transpose().rank(f);
        }
        self.rref(f).1.len()
    }

    pub fn det<F: Field<Elem = E>>(&self, f: &F) -> E {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let mut m = self.clone();
        let mut det = f.one();
        for col in 0..m.cols {
            let Some(p) = (col..m.rows).find(|&r| !f.is_zero(m.get(r, col))) else {
                return f.zero();
            };
            if p != col {
                m.swap_rows(col, p);
                det = f.neg(det);
            }
            let pivot = m.get(col, col);
            det = f.mul(det, pivot);
            let inv = f.inv(pivot);
            for r in col + 1..m.rows {
                let factor = f.mul(m.get(r, col), inv);
                if f.is_zero(factor) {
                    continue;
                }
                for c in col..m.cols {
                    let v = f.sub(m.get(r, c), f.mul(factor, m.get(col, c)));
                    m.set(r, c, v);
                }
            }
        }
        det
    }

    pub fn inverse<F: Field<Elem = E>>(&self, f: &F) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let (r, pivots) = self.hstack(&Self::identity(f, n)).rref(f);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(r.select_columns(&(n..2 * n).collect::<Vec<_>>()))
    }

    /// Some `x` with `x * self = b`, if one exists.
    pub fn solve_left<F: Field<Elem = E>>(&self, f: &F, b: &[E]) -> Option<Vec<E>> {
        assert_eq!(b.len(), self.cols, "dimension mismatch");
        // Solve self^T x^T = b^T via the augmented system.
        let t = self.transpose();
        let aug = t.hstack(&Matrix::from_rows(b.iter().map(|&x| vec![x]).collect()).with_cols(1));
        let (r, pivots) = aug.rref(f);
        if pivots.last() == Some(&self.rows) {
            return None;
        }
        let mut x = vec![f.zero(); self.rows];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r.get(i, self.rows);
        }
        Some(x)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn with_cols(mut self, cols: usize) -> Self {
        if self.rows == 0 {
            self.cols = cols;
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::PrimeField;

    #[test]
    fn rank_det_inverse_mod_five() {
        let f = PrimeField::new(5).unwrap();
        let a = Matrix::from_rows(vec![vec![1, 2], vec![3, 4]]);
        assert_eq!(a.det(&f), 3); // 4 - 6 = -2
        let inv = a.inverse(&f).unwrap();
        assert_eq!(a.mul(&f, &inv), Matrix::identity(&f, 2));
        let s = Matrix::from_rows(vec![vec![1, 2], vec![2, 4]]);
        assert_eq!(s.rank(&f), 1);
        assert_eq!(s.det(&f), 0);
        assert!(s.inverse(&f).is_none());
    }

    #[test]
    fn solve_left_recovers_combination() {
        let f = PrimeField::new(7).unwrap();
        let g = Matrix::from_rows(vec![vec![1, 0, 3, 4], vec![0, 1, 5, 6]]);
        let c = g.left_mul_vec(&f, &[2, 5]);
        assert_eq!(g.solve_left(&f, &c), Some(vec![2, 5]));
        assert_eq!(g.solve_left(&f, &[1, 0, 0, 0]), None);
    }

    #[test]
    fn stacking_shapes() {
        let a = Matrix::from_rows(vec![vec![1u32, 2]]);
        let b = Matrix::from_rows(vec![vec![3u32]]);
        let h = a.hstack(&b);
        assert_eq!((h.rows(), h.cols()), (1, 3));
        assert_eq!(h.transpose().cols(), 1);
        assert_eq!(a.vstack(&a).rows(), 2);
        assert_eq!(Matrix::<u32>::empty(3).transpose().rows(), 3);
    }
}
