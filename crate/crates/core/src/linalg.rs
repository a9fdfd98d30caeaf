//! Dense exact matrix arithmetic over `F_{q^r}`: reduced row echelon form,
//! rank, null spaces, square solves, and the all-k-column-subsets MDS test.
//!
//! Elimination uses first-nonzero pivoting; in exact finite-field arithmetic
//! pivot magnitude is irrelevant and determinism is what matters.

use std::fmt;
use std::ops::{Index, IndexMut};

use thiserror::Error;

use crate::galois::{ExtField, FieldElem};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix is singular")]
    Singular,
    #[error("matrix rank {rank} is below its row count {rows}")]
    RankDeficient { rank: usize, rows: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("malformed matrix text: {0}")]
    BadText(String),
}

/// Row-major dense matrix over a declared extension field.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    field: ExtField,
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>,
}

impl Matrix {
    pub fn new(field: ExtField, rows: usize, cols: usize, data: Vec<FieldElem>) -> Self {
        assert_eq!(rows * cols, data.len());
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn zeros(field: ExtField, rows: usize, cols: usize) -> Self {
        let data = vec![field.zero(); rows * cols];
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn identity(field: ExtField, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = m.field.one();
        }
        m
    }

    pub fn from_rows(field: ExtField, rows: Vec<Vec<FieldElem>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == ncols));
        Matrix {
            field,
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn field(&self) -> &ExtField {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[FieldElem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<FieldElem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.field.clone(), self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn select_cols(&self, sel: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.field.clone(), self.rows, sel.len());
        for i in 0..self.rows {
            for (jj, &j) in sel.iter().enumerate() {
                out[(i, jj)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn select_rows(&self, sel: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.field.clone(), sel.len(), self.cols);
        for (ii, &i) in sel.iter().enumerate() {
            for j in 0..self.cols {
                out[(ii, j)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        assert_eq!(self.field, other.field);
        let f = &self.field;
        let mut out = Matrix::zeros(self.field.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = f.zero();
                for k in 0..self.cols {
                    acc = f.add(&acc, &f.mul(&self[(i, k)], &other[(k, j)]));
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    /// Row vector times matrix: `v · M`.
    pub fn left_mul_vec(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        assert_eq!(v.len(), self.rows, "vector length must equal row count");
        let f = &self.field;
        let mut out = vec![f.zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                out[j] = f.add(&out[j], &f.mul(vi, &self[(i, j)]));
            }
        }
        out
    }

    /// Matrix times column vector: `M · v`.
    pub fn mul_vec(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        assert_eq!(v.len(), self.cols, "vector length must equal column count");
        let f = &self.field;
        (0..self.rows)
            .map(|i| {
                let mut acc = f.zero();
                for j in 0..self.cols {
                    acc = f.add(&acc, &f.mul(&self[(i, j)], &v[j]));
                }
                acc
            })
            .collect()
    }

    /// Reduced row echelon form and rank. The output has the same row space
    /// as the input.
    pub fn rref_rank(&self) -> (Matrix, usize) {
        let f = self.field.clone();
        let mut m = self.clone();
        let mut pivot_row = 0;
        for col in 0..m.cols {
            if pivot_row == m.rows {
                break;
            }
            let Some(src) = (pivot_row..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(pivot_row, src);
            let inv = f.inv(&m[(pivot_row, col)]).expect("pivot nonzero");
            for j in col..m.cols {
                m[(pivot_row, j)] = f.mul(&m[(pivot_row, j)], &inv);
            }
            for r in 0..m.rows {
                if r == pivot_row || m[(r, col)].is_zero() {
                    continue;
                }
                let factor = m[(r, col)].clone();
                for j in col..m.cols {
                    let t = f.mul(&factor, &m[(pivot_row, j)]);
                    m[(r, j)] = f.sub(&m[(r, j)], &t);
                }
            }
            pivot_row += 1;
        }
        (m, pivot_row)
    }

    pub fn rank(&self) -> usize {
        self.rref_rank().1
    }

    /// A basis (as matrix rows) of the right kernel `{v : M vᵀ = 0}`; has
    /// `cols - rank` rows.
    pub fn null_space(&self) -> Matrix {
        let f = self.field.clone();
        let (r, rank) = self.rref_rank();
        // Pivot column of each of the first `rank` rows.
        let mut pivots = Vec::with_capacity(rank);
        for i in 0..rank {
            let col = (0..r.cols)
                .find(|&j| !r[(i, j)].is_zero())
                .expect("nonzero row has a pivot");
            pivots.push(col);
        }
        let free: Vec<usize> = (0..self.cols).filter(|j| !pivots.contains(j)).collect();
        let mut basis = Matrix::zeros(f.clone(), free.len(), self.cols);
        for (bi, &fc) in free.iter().enumerate() {
            basis[(bi, fc)] = f.one();
            for (pi, &pc) in pivots.iter().enumerate() {
                basis[(bi, pc)] = f.neg(&r[(pi, fc)]);
            }
        }
        basis
    }

    /// Solves `M x = b` for square nonsingular `M`.
    pub fn solve_square(&self, b: &[FieldElem]) -> Result<Vec<FieldElem>, LinalgError> {
        assert_eq!(self.rows, self.cols, "matrix must be square");
        assert_eq!(b.len(), self.rows);
        let f = self.field.clone();
        let n = self.rows;
        // Augmented elimination.
        let mut m = self.clone();
        let mut rhs = b.to_vec();
        for col in 0..n {
            let Some(src) = (col..n).find(|&r| !m[(r, col)].is_zero()) else {
                return Err(LinalgError::Singular);
            };
            m.swap_rows(col, src);
            rhs.swap(col, src);
            let inv = f.inv(&m[(col, col)]).expect("pivot nonzero");
            for j in col..n {
                m[(col, j)] = f.mul(&m[(col, j)], &inv);
            }
            rhs[col] = f.mul(&rhs[col], &inv);
            for r in 0..n {
                if r == col || m[(r, col)].is_zero() {
                    continue;
                }
                let factor = m[(r, col)].clone();
                for j in col..n {
                    let t = f.mul(&factor, &m[(col, j)]);
                    m[(r, j)] = f.sub(&m[(r, j)], &t);
                }
                let t = f.mul(&factor, &rhs[col]);
                rhs[r] = f.sub(&rhs[r], &t);
            }
        }
        Ok(rhs)
    }

    /// True iff every `rows`-column submatrix is nonsingular, i.e. the row
    /// space is MDS. Enumerates subsets in lexicographic order and
    /// short-circuits on the first failure; cost is C(cols, rows) rank
    /// checks, acceptable at desk scale.
    pub fn all_k_subsets_full_rank(&self) -> Result<bool, LinalgError> {
        let k = self.rows;
        assert!(k <= self.cols);
        let rank = self.rank();
        if rank < k {
            return Err(LinalgError::RankDeficient { rank, rows: k });
        }
        if k == 0 {
            return Ok(true);
        }
        for subset in combinations(self.cols, k) {
            if self.select_cols(&subset).rank() < k {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// First k-column subset (lexicographic order) on which the restriction
    /// is singular, if any. Shares the enumeration with
    /// [`Matrix::all_k_subsets_full_rank`]; used to report audit witnesses.
    pub fn first_singular_k_subset(&self) -> Option<Vec<usize>> {
        let k = self.rows;
        combinations(self.cols, k).find(|subset| self.select_cols(subset).rank() < k)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// True when `v` lies in the row space.
    pub fn row_space_contains(&self, v: &[FieldElem]) -> bool {
        assert_eq!(v.len(), self.cols);
        let mut stacked = self.row_vecs();
        stacked.push(v.to_vec());
        let stacked = Matrix::from_rows(self.field.clone(), stacked);
        stacked.rank() == self.rank()
    }

    /// True when both row spaces coincide (mutual membership via rank).
    pub fn same_row_space(&self, other: &Matrix) -> bool {
        assert_eq!(self.cols, other.cols);
        let ra = self.rank();
        let rb = other.rank();
        if ra != rb {
            return false;
        }
        let mut stacked = self.row_vecs();
        stacked.extend(other.row_vecs());
        Matrix::from_rows(self.field.clone(), stacked).rank() == ra
    }

    /// Matrix text format: first line `rows cols`, then one row per line of
    /// canonical element serializations separated by spaces.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            let line = self
                .row(i)
                .iter()
                .map(|e| e.to_text())
                .collect::<Vec<_>>()
                .join(" ");
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    pub fn parse_text(field: &ExtField, text: &str) -> Result<Matrix, LinalgError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| LinalgError::BadText("empty".into()))?;
        let mut parts = header.split_whitespace();
        let rows: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| LinalgError::BadText(header.to_string()))?;
        let cols: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| LinalgError::BadText(header.to_string()))?;
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| LinalgError::BadText("missing row".into()))?;
            let entries: Vec<&str> = line.split_whitespace().collect();
            if entries.len() != cols {
                return Err(LinalgError::BadText(format!(
                    "expected {cols} entries, got {}",
                    entries.len()
                )));
            }
            for e in entries {
                data.push(
                    field
                        .parse_elem(e)
                        .map_err(|err| LinalgError::BadText(err.to_string()))?,
                );
            }
        }
        Ok(Matrix::new(field.clone(), rows, cols, data))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = FieldElem;
    fn index(&self, idx: (usize, usize)) -> &FieldElem {
        assert!(idx.0 < self.rows && idx.1 < self.cols);
        &self.data[idx.0 * self.cols + idx.1]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut FieldElem {
        assert!(idx.0 < self.rows && idx.1 < self.cols);
        &mut self.data[idx.0 * self.cols + idx.1]
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// All k-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Combinations {
    Combinations {
        n,
        k,
        next: if k <= n { Some((0..k).collect()) } else { None },
    }
}

pub struct Combinations {
    n: usize,
    k: usize,
    next: Option<Vec<usize>>,
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.clone()?;
        // Advance: find the rightmost index that can still move right.
        let mut state = current.clone();
        let mut i = self.k;
        loop {
            if i == 0 {
                self.next = None;
                break;
            }
            i -= 1;
            if state[i] < self.n - (self.k - i) {
                state[i] += 1;
                for j in i + 1..self.k {
                    state[j] = state[j - 1] + 1;
                }
                self.next = Some(state);
                break;
            }
        }
        Some(current)
    }
}

/// Number of k-subsets of an n-set; used for audit budgeting.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}
