//! The twisted polynomial ring `F_{q^r}[x; σ]` and its evaluation operators.
//!
//! Multiplication follows the commutation rule `x·β = σ(β)·x`. Evaluation
//! goes through the `F_q`-linear operators `D_a^i(β) = σ^i(β)·N_i(a)`, where
//! `N_i(a) = σ^{i-1}(a)···σ(a)·a` is the i-th norm (`N_0 = 1` by the empty
//! product). A polynomial `F = Σ F_i x^i` acts as `Σ F_i D_a^i`, and its
//! total evaluation concatenates the images of a basis under `D_{a_j}` for
//! each evaluation point `a_j`.

use rand_core::RngCore;

use crate::galois::{Basis, ExtField, FieldElem, GaloisError};

/// A skew polynomial: coefficients low degree first, trailing zeros trimmed.
/// The empty vector is the zero polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewPoly {
    coeffs: Vec<FieldElem>,
}

impl SkewPoly {
    pub fn zero() -> Self {
        SkewPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: FieldElem) -> Self {
        SkewPoly::from_coeffs(vec![c])
    }

    /// `c · x^deg`.
    pub fn monomial(field: &ExtField, c: FieldElem, deg: usize) -> Self {
        let mut coeffs = vec![field.zero(); deg + 1];
        coeffs[deg] = c;
        SkewPoly::from_coeffs(coeffs)
    }

    /// Trims trailing zeros so the representation is canonical.
    pub fn from_coeffs(mut coeffs: Vec<FieldElem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        SkewPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, other: &SkewPoly, field: &ExtField) -> SkewPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(|| field.zero());
            let b = other.coeffs.get(i).cloned().unwrap_or_else(|| field.zero());
            out.push(field.add(&a, &b));
        }
        SkewPoly::from_coeffs(out)
    }

    pub fn scale(&self, c: &FieldElem, field: &ExtField) -> SkewPoly {
        SkewPoly::from_coeffs(self.coeffs.iter().map(|f| field.mul(c, f)).collect())
    }

    /// Product in `F_{q^r}[x; σ]`: the coefficient of `x^m` is
    /// `Σ_{i+j=m} F_i · σ^i(G_j)`. For nonzero inputs the degrees add.
    pub fn mul(&self, other: &SkewPoly, field: &ExtField) -> SkewPoly {
        if self.is_zero() || other.is_zero() {
            return SkewPoly::zero();
        }
        let mut out = vec![field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, fi) in self.coeffs.iter().enumerate() {
            if fi.is_zero() {
                continue;
            }
            for (j, gj) in other.coeffs.iter().enumerate() {
                let term = field.mul(fi, &field.frobenius_pow(gj, i));
                out[i + j] = field.add(&out[i + j], &term);
            }
        }
        SkewPoly::from_coeffs(out)
    }

    /// Text form: space-separated canonical elements, low degree first.
    /// The zero polynomial prints as a single zero element.
    pub fn to_text(&self, field: &ExtField) -> String {
        if self.coeffs.is_empty() {
            return field.zero().to_text();
        }
        self.coeffs
            .iter()
            .map(|c| c.to_text())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn parse_text(field: &ExtField, s: &str) -> Result<SkewPoly, GaloisError> {
        let coeffs: Result<Vec<FieldElem>, _> =
            s.split_whitespace().map(|p| field.parse_elem(p)).collect();
        Ok(SkewPoly::from_coeffs(coeffs?))
    }
}

/// The i-th norm `N_i(a) = σ^{i-1}(a)···σ(a)·a`, with `N_0(a) = 1`.
pub fn norm_i(field: &ExtField, a: &FieldElem, i: usize) -> FieldElem {
    let mut acc = field.one();
    for step in 0..i {
        acc = field.mul(&field.frobenius_pow(a, step), &acc);
    }
    acc
}

/// Evaluates `F` through the operators at `a`, applied to a single element:
/// `Σ_i F_i · σ^i(β) · N_i(a)`.
///
/// The powers `σ^i(β)` and norms `N_i(a)` are built incrementally, one
/// Frobenius application and one multiply per degree step.
pub fn op_eval(field: &ExtField, f: &SkewPoly, a: &FieldElem, beta_elem: &FieldElem) -> FieldElem {
    let mut acc = field.zero();
    let mut sigma_beta = beta_elem.clone(); // σ^i(β)
    let mut norm = field.one(); // N_i(a)
    let mut sigma_a = a.clone(); // σ^i(a)
    for (i, fi) in f.coeffs.iter().enumerate() {
        if i > 0 {
            sigma_beta = field.frobenius(&sigma_beta);
            norm = field.mul(&sigma_a, &norm); // N_{i} = σ^{i-1}(a)·N_{i-1}
            sigma_a = field.frobenius(&sigma_a);
        }
        if !fi.is_zero() {
            acc = field.add(&acc, &field.mul(fi, &field.mul(&sigma_beta, &norm)));
        }
    }
    acc
}

/// Total evaluation over evaluation points `a_1 … a_g` and a basis: the
/// length `g·r` concatenation of `(F^{D_{a_j}}(β_1), …, F^{D_{a_j}}(β_r))`.
pub fn total_eval(
    field: &ExtField,
    f: &SkewPoly,
    a_vec: &[FieldElem],
    basis: &Basis,
) -> Vec<FieldElem> {
    let mut out = Vec::with_capacity(a_vec.len() * basis.r());
    for a in a_vec {
        for beta in basis.elems() {
            out.push(op_eval(field, f, a, beta));
        }
    }
    out
}

/// Uniform polynomial of degree `< max_deg_exclusive`: every coefficient
/// i.i.d. uniform over the field. With `max_deg_exclusive = 0` this is
/// always the zero polynomial.
pub fn random_skew(field: &ExtField, max_deg_exclusive: usize, rng: &mut dyn RngCore) -> SkewPoly {
    let coeffs = (0..max_deg_exclusive).map(|_| field.sample(rng)).collect();
    SkewPoly::from_coeffs(coeffs)
}
