//! Dense exact linear algebra over a field context: reduced row echelon form,
//! rank, and null spaces. RREF is canonical per row space, so subspace
//! equality is matrix equality after reduction.

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElem};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>,
}

impl Matrix {
    pub fn zeros(ctx: &FieldCtx, rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![ctx.zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<FieldElem>>) -> Result<Matrix> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Internal("ragged matrix rows".into()));
        }
        let n = rows.len();
        Ok(Matrix {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self, ctx: &FieldCtx) -> bool {
        self.data.iter().all(|c| ctx.is_zero(c))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// In-place reduced row echelon form; returns the rank. Pivots are
    /// normalized to 1 and cleared above and below, and zero rows sink to
    /// the bottom, so the result is the canonical basis of the row space.
    pub fn rref(&mut self, ctx: &FieldCtx) -> usize {
        let mut pivot = 0usize;
        for col in 0..self.cols {
            if pivot >= self.rows {
                break;
            }
            let Some(pr) = (pivot..self.rows).find(|&r| !ctx.is_zero(self.get(r, col))) else {
                continue;
            };
            self.swap_rows(pivot, pr);
            let inv = ctx
                .inv(self.get(pivot, col))
                .expect("pivot is nonzero by selection");
            for j in col..self.cols {
                let v = ctx.mul(self.get(pivot, j), &inv);
                self.set(pivot, j, v);
            }
            for r in 0..self.rows {
                if r == pivot || ctx.is_zero(self.get(r, col)) {
                    continue;
                }
                let factor = self.get(r, col).clone();
                for j in col..self.cols {
                    let v = ctx.sub(self.get(r, j), &ctx.mul(&factor, self.get(pivot, j)));
                    self.set(r, j, v);
                }
            }
            pivot += 1;
        }
        pivot
    }

    /// RREF with zero rows dropped: the canonical row-space basis.
    pub fn row_space_basis(mut self, ctx: &FieldCtx) -> Matrix {
        let rank = self.rref(ctx);
        self.data.truncate(rank * self.cols);
        self.rows = rank;
        self
    }

    pub fn rank(&self, ctx: &FieldCtx) -> usize {
        self.clone().rref(ctx)
    }

    /// Canonical basis of `{ x : self * x^T = 0 }`, one row per free column.
    pub fn nullspace(&self, ctx: &FieldCtx) -> Matrix {
        let mut red = self.clone();
        let rank = red.rref(ctx);
        // pivot column of each of the first `rank` rows
        let mut pivot_cols = Vec::with_capacity(rank);
        for r in 0..rank {
            let col = (0..red.cols)
                .find(|&j| !ctx.is_zero(red.get(r, j)))
                .expect("nonzero row above rank");
            pivot_cols.push(col);
        }
        let mut basis = Vec::new();
        for free in 0..red.cols {
            if pivot_cols.contains(&free) {
                continue;
            }
            let mut v = vec![ctx.zero(); red.cols];
            v[free] = ctx.one();
            for (r, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = ctx.neg(red.get(r, free));
            }
            basis.push(v);
        }
        let m = Matrix::from_rows(basis).expect("uniform basis rows");
        m.row_space_basis(ctx)
    }

    pub fn stack(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols {
            return Err(Error::Internal("column mismatch in stack".into()));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// A * B^T.
    pub fn mul_transpose(&self, other: &Matrix, ctx: &FieldCtx) -> Result<Matrix> {
        if self.cols != other.cols {
            return Err(Error::Internal("column mismatch in product".into()));
        }
        let mut out = Matrix::zeros(ctx, self.rows, other.rows);
        for i in 0..self.rows {
            for j in 0..other.rows {
                let mut acc = ctx.zero();
                for t in 0..self.cols {
                    let a = self.get(i, t);
                    if ctx.is_zero(a) {
                        continue;
                    }
                    acc = ctx.add(&acc, &ctx.mul(a, other.get(j, t)));
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Row-space equality via the canonical reduced form.
    pub fn same_row_space(&self, other: &Matrix, ctx: &FieldCtx) -> bool {
        self.clone().row_space_basis(ctx) == other.clone().row_space_basis(ctx)
    }
}
