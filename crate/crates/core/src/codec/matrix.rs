//! Dense matrices over GF(256).

use super::gf256::Gf256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Gf256>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Gf256::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Gf256::ONE;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Gf256>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Gf256] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// The matrix made of the listed rows, in order.
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

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    /// Gauss-Jordan inverse; `None` if singular or not square.
    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut work = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !work[(r, col)].is_zero())?;
            work.swap_rows(pivot, col);
            inv.swap_rows(pivot, col);
            let scale = work[(col, col)].inverse()?;
            work.scale_row(col, scale);
            inv.scale_row(col, scale);
            for r in 0..n {
                let factor = work[(r, col)];
                if r != col && !factor.is_zero() {
                    work.add_scaled_row(r, col, factor);
                    inv.add_scaled_row(r, col, factor);
                }
            }
        }
        Some(inv)
    }

    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pivot) = (rank..self.rows).find(|&r| !work[(r, col)].is_zero()) else {
                continue;
            };
            work.swap_rows(pivot, rank);
            let scale = work[(rank, col)].inverse().expect("nonzero pivot");
            work.scale_row(rank, scale);
            for r in rank + 1..self.rows {
                let factor = work[(r, col)];
                if !factor.is_zero() {
                    work.add_scaled_row(r, rank, factor);
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn scale_row(&mut self, r: usize, s: Gf256) {
        for c in 0..self.cols {
            self[(r, c)] *= s;
        }
    }

    /// `row[dst] += factor * row[src]`
    fn add_scaled_row(&mut self, dst: usize, src: usize, factor: Gf256) {
        for c in 0..self.cols {
            let v = self[(src, c)];
            self[(dst, c)] += factor * v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Gf256;

    fn index(&self, (r, c): (usize, usize)) -> &Gf256 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Gf256 {
        &mut self.data[r * self.cols + c]
    }
}

/// Rows of `generator` that a greedy scan in the given order finds linearly
/// independent, stopping once a full basis is found.
pub fn independent_rows(generator: &Matrix, candidates: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let cols = generator.cols();
    // reduced basis rows keyed by pivot column
    let mut basis: Vec<(usize, Vec<Gf256>)> = Vec::new();
    let mut chosen = Vec::new();
    for r in candidates {
        let mut v = generator.row(r).to_vec();
        for (pivot, b) in &basis {
            let f = v[*pivot];
            if !f.is_zero() {
                for (x, y) in v.iter_mut().zip(b) {
                    *x += f * *y;
                }
            }
        }
        if let Some(pivot) = v.iter().position(|x| !x.is_zero()) {
            let s = v[pivot].inverse().expect("nonzero");
            v.iter_mut().for_each(|x| *x *= s);
            // keep the basis fully reduced on its pivot columns
            for (_, b) in basis.iter_mut() {
                let f = b[pivot];
                if !f.is_zero() {
                    for (x, y) in b.iter_mut().zip(&v) {
                        *x += f * *y;
                    }
                }
            }
            basis.push((pivot, v));
            chosen.push(r);
            if chosen.len() == cols {
                break;
            }
        }
    }
    chosen
}
