//! The matrix-representation map `M_β`, the matrix product `⋆` on
//! `F_{q^r}^r`, the coordinate-wise (`*`) and inner (`·`) matrix products on
//! block vectors, and spans of code products.
//!
//! With `y = Σ_i β_i y^i` (each `y^i` a row over `F_q`), the matrix product
//! is `x ⋆ y = M_β^{-1}(M_β(x) M_β(y)) = Σ_i x_i y^i`. The implementation
//! uses the sum form (`r` field multiplications plus one decomposition of
//! `y`); the two-conversion matrix route is kept as a test oracle. Setting
//! `r = 1`, `β = (1)` recovers the ordinary scalar, Schur and dot products.

use thiserror::Error;

use crate::galois::{Basis, ExtField, FieldElem};
use crate::linalg::Matrix;
use crate::skew::{total_eval, SkewPoly};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProductError {
    #[error("block shape mismatch: {0} blocks vs {1}")]
    BlockMismatch(usize, usize),
    #[error("invalid code dimension {0}")]
    InvalidDimension(usize),
}

/// A vector of `F_{q^r}^{blocks·r}` viewed as `blocks` chunks of length `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockVector {
    r: usize,
    blocks: Vec<Vec<FieldElem>>,
}

impl BlockVector {
    pub fn new(r: usize, blocks: Vec<Vec<FieldElem>>) -> Self {
        assert!(blocks.iter().all(|b| b.len() == r));
        BlockVector { r, blocks }
    }

    /// Splits a flat vector into length-`r` blocks; the length must divide.
    pub fn from_flat(r: usize, flat: Vec<FieldElem>) -> Self {
        assert_eq!(flat.len() % r, 0);
        let blocks = flat.chunks(r).map(|c| c.to_vec()).collect();
        BlockVector { r, blocks }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, i: usize) -> &[FieldElem] {
        &self.blocks[i]
    }

    pub fn blocks(&self) -> &[Vec<FieldElem>] {
        &self.blocks
    }

    pub fn flatten(&self) -> Vec<FieldElem> {
        self.blocks.iter().flatten().cloned().collect()
    }
}

/// The matrix representation of a length-`r` vector: column `j` holds the
/// `β`-coordinates of `x_j`. Entries are prime-subfield constants embedded
/// in the extension field. For `r = 1`, `β = (1)` this is the identity map.
pub fn mat_rep(field: &ExtField, basis: &Basis, x: &[FieldElem]) -> Matrix {
    let r = basis.r();
    assert_eq!(x.len(), r);
    let mut m = Matrix::zeros(field.clone(), r, r);
    for (j, xj) in x.iter().enumerate() {
        for (i, c) in basis.decompose(field, xj).into_iter().enumerate() {
            m[(i, j)] = field.embed(c);
        }
    }
    m
}

/// Inverse of [`mat_rep`]: reassembles `x_j = Σ_i β_i m_{ij}` from a matrix
/// of embedded prime-subfield entries.
pub fn mat_rep_inv(field: &ExtField, basis: &Basis, m: &Matrix) -> Vec<FieldElem> {
    let r = basis.r();
    assert_eq!((m.rows(), m.cols()), (r, r));
    (0..r)
        .map(|j| {
            let coords: Vec<u32> = (0..r)
                .map(|i| {
                    let e = &m[(i, j)];
                    debug_assert!(field.in_prime_subfield(e));
                    e.coeffs()[0]
                })
                .collect();
            basis.compose(field, &coords)
        })
        .collect()
}

/// The matrix product `x ⋆ y = Σ_i x_i y^i` with respect to `basis`.
pub fn star(field: &ExtField, basis: &Basis, x: &[FieldElem], y: &[FieldElem]) -> Vec<FieldElem> {
    let r = basis.r();
    assert_eq!(x.len(), r);
    assert_eq!(y.len(), r);
    // y_coords[j][i] = i-th β-coordinate of y_j.
    let y_coords: Vec<Vec<u32>> = y.iter().map(|yj| basis.decompose(field, yj)).collect();
    (0..r)
        .map(|j| {
            let mut acc = field.zero();
            for (i, xi) in x.iter().enumerate() {
                if y_coords[j][i] != 0 {
                    acc = field.add(&acc, &field.scale(y_coords[j][i], xi));
                }
            }
            acc
        })
        .collect()
}

/// Test-oracle route for `⋆`: two matrix-representation conversions and an
/// `r x r` matrix multiply.
pub fn star_via_matrices(
    field: &ExtField,
    basis: &Basis,
    x: &[FieldElem],
    y: &[FieldElem],
) -> Vec<FieldElem> {
    let mx = mat_rep(field, basis, x);
    let my = mat_rep(field, basis, y);
    mat_rep_inv(field, basis, &mx.matmul(&my))
}

/// Coordinate-wise matrix product: `⋆` applied block by block.
pub fn cw_product(
    field: &ExtField,
    basis: &Basis,
    x: &BlockVector,
    y: &BlockVector,
) -> Result<BlockVector, ProductError> {
    if x.block_count() != y.block_count() || x.r() != y.r() {
        return Err(ProductError::BlockMismatch(x.block_count(), y.block_count()));
    }
    let blocks = x
        .blocks()
        .iter()
        .zip(y.blocks())
        .map(|(a, b)| star(field, basis, a, b))
        .collect();
    Ok(BlockVector::new(x.r(), blocks))
}

/// Inner matrix product: the sum of the blockwise `⋆` products, a length-`r`
/// vector.
pub fn inner_product(
    field: &ExtField,
    basis: &Basis,
    x: &BlockVector,
    y: &BlockVector,
) -> Result<Vec<FieldElem>, ProductError> {
    if x.block_count() != y.block_count() || x.r() != y.r() {
        return Err(ProductError::BlockMismatch(x.block_count(), y.block_count()));
    }
    let r = x.r();
    let mut acc = vec![field.zero(); r];
    for (a, b) in x.blocks().iter().zip(y.blocks()) {
        let s = star(field, basis, a, b);
        for (dst, src) in acc.iter_mut().zip(s) {
            *dst = field.add(dst, &src);
        }
    }
    Ok(acc)
}

/// Generator matrix of the span of all pairwise coordinate-wise products of
/// the canonical monomial generators of two linearized Reed-Solomon codes of
/// dimensions `k1` and `k2` over evaluation points `a_vec`.
///
/// The pairwise products are themselves evaluations of the monomials
/// `x^{i+j}`, so the row space equals the linearized Reed-Solomon code of
/// dimension `min(k1 + k2 - 1, N)`. With `k2 = 0` one factor is the zero
/// code and the span is empty; the dimension identity needs both `k1, k2
/// >= 1`.
pub fn code_product_span(
    field: &ExtField,
    basis: &Basis,
    a_vec: &[FieldElem],
    k1: usize,
    k2: usize,
) -> Result<Matrix, ProductError> {
    let n = a_vec.len() * basis.r();
    if k1 < 1 || k1 > n {
        return Err(ProductError::InvalidDimension(k1));
    }
    if k2 > n {
        return Err(ProductError::InvalidDimension(k2));
    }
    let r = basis.r();
    let monomial_row = |deg: usize| {
        let m = SkewPoly::monomial(field, field.one(), deg);
        total_eval(field, &m, a_vec, basis)
    };
    let mut products = Vec::new();
    for i in 0..k1 {
        let gi = BlockVector::from_flat(r, monomial_row(i));
        for j in 0..k2 {
            let gj = BlockVector::from_flat(r, monomial_row(j));
            let p = cw_product(field, basis, &gi, &gj).expect("shapes agree");
            products.push(p.flatten());
        }
    }
    if products.is_empty() {
        return Ok(Matrix::zeros(field.clone(), 0, n));
    }
    let stacked = Matrix::from_rows(field.clone(), products);
    let (rref, rank) = stacked.rref_rank();
    let basis_rows: Vec<Vec<FieldElem>> = (0..rank).map(|i| rref.row(i).to_vec()).collect();
    Ok(Matrix::from_rows(field.clone(), basis_rows))
}
