//! Dense matrices over the binary field.

use std::fmt;

use crate::error::{Error, Result};

/// Row-major binary matrix. Entries are stored as `0`/`1` bytes.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(k: usize) -> Self {
        let mut m = Self::zeros(k, k);
        for i in 0..k {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from nested rows; every entry is reduced mod 2.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != n_cols {
                return Err(Error::length("matrix row", n_cols, row.len()));
            }
            data.extend(row.iter().map(|&b| b & 1));
        }
        Ok(Self {
            rows: n_rows,
            cols: n_cols,
            data,
        })
    }

    /// Permutation matrix sending component `i` of a row vector to position
    /// `perm[i]`, i.e. `(b * P)[perm[i]] = b[i]`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let k = perm.len();
        let mut seen = vec![false; k];
        let mut m = Self::zeros(k, k);
        for (i, &p) in perm.iter().enumerate() {
            if p >= k || seen[p] {
                return Err(Error::out_of_range("permutation entry", p, "a bijection on 0..k"));
            }
            seen[p] = true;
            m.set(i, p, 1);
        }
        Ok(m)
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

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        self.data[r * self.cols + c] = v & 1;
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul(&self, rhs: &BinaryMatrix) -> Result<BinaryMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::length("matrix product inner dimension", self.cols, rhs.rows));
        }
        let mut out = BinaryMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) == 1 {
                    for c in 0..rhs.cols {
                        out.data[r * rhs.cols + c] ^= rhs.get(k, c);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix, `b * A`.
    pub fn left_mul_vec(&self, b: &[u8]) -> Result<Vec<u8>> {
        if b.len() != self.rows {
            return Err(Error::length("row vector", self.rows, b.len()));
        }
        let mut out = vec![0u8; self.cols];
        for (r, &bit) in b.iter().enumerate() {
            if bit & 1 == 1 {
                for (o, &a) in out.iter_mut().zip(self.row(r)) {
                    *o ^= a;
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &BinaryMatrix) -> BinaryMatrix {
        let mut out = BinaryMatrix::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                if self.get(r1, c1) == 0 {
                    continue;
                }
                for r2 in 0..rhs.rows {
                    for c2 in 0..rhs.cols {
                        out.set(r1 * rhs.rows + r2, c1 * rhs.cols + c2, rhs.get(r2, c2));
                    }
                }
            }
        }
        out
    }

    /// Rank over the binary field.
    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..a.cols {
            let Some(pivot) = (rank..a.rows).find(|&r| a.get(r, col) == 1) else {
                continue;
            };
            a.swap_rows(rank, pivot);
            for r in 0..a.rows {
                if r != rank && a.get(r, col) == 1 {
                    a.xor_row_into(rank, r);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Determinant over the binary field (square matrices only).
    pub fn determinant(&self) -> Result<u8> {
        if !self.is_square() {
            return Err(Error::length("square matrix columns", self.rows, self.cols));
        }
        Ok(u8::from(self.rank() == self.rows))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Result<BinaryMatrix> {
        if !self.is_invertible() {
            return Err(Error::SingularMatrix);
        }
        let k = self.rows;
        let mut a = self.clone();
        let mut inv = BinaryMatrix::identity(k);
        for col in 0..k {
            let pivot = (col..k).find(|&r| a.get(r, col) == 1).ok_or(Error::SingularMatrix)?;
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            for r in 0..k {
                if r != col && a.get(r, col) == 1 {
                    a.xor_row_into(col, r);
                    inv.xor_row_into(col, r);
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        for c in 0..self.cols {
            let v = self.data[src * self.cols + c];
            self.data[dst * self.cols + c] ^= v;
        }
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let s: String = self.row(r).iter().map(|&b| if b == 1 { '1' } else { '0' }).collect();
            writeln!(f, "  {s}")?;
        }
        write!(f, "]")
    }
}
