//! Linearized Reed-Solomon codes as concrete generator matrices, encoding,
//! MDS verification, and generic erasure decoding.
//!
//! The dimension-`k` code of length `N = g·r` evaluates all twisted
//! polynomials of degree below `k` at the points `(γ^0, …, γ^{g-1})` through
//! a fixed basis; its canonical generator has row `i` equal to the total
//! evaluation of `x^i`. Setting `r = 1` gives a Reed-Solomon-like code on
//! the powers of `γ`; setting `g = 1` gives a Gabidulin-type code.
//!
//! Decoding is plain Gaussian elimination on a restricted generator. The
//! retrieval protocol only ever needs erasure recovery at known support, so
//! no fast twisted-polynomial decoder is included.

use thiserror::Error;

use crate::galois::{Basis, ExtField, FieldElem};
use crate::linalg::{LinalgError, Matrix};
use crate::skew::{total_eval, SkewPoly};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodeError {
    #[error("need q > g: field size {q} does not exceed group count {g}")]
    TooManyGroups { q: u32, g: usize },
    #[error("invalid dimension k={k} for length {n}")]
    InvalidK { k: usize, n: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("not decodable: {0}")]
    Undecodable(String),
    #[error("decoded message re-encodes inconsistently at position {0}")]
    Inconsistent(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("malformed code descriptor: {0}")]
    BadDescriptor(String),
}

/// A linearized Reed-Solomon code `C_{N,k}` with its canonical generator.
#[derive(Debug, Clone, PartialEq)]
pub struct LrsCode {
    field: ExtField,
    g: usize,
    k: usize,
    gamma: FieldElem,
    a_vec: Vec<FieldElem>,
    basis: Basis,
    gen: Matrix,
}

impl LrsCode {
    /// Builds `C_{N,k}` over `g` groups. `gamma` defaults to the smallest
    /// primitive element and `basis` to the polynomial basis. Requires
    /// `q > g` (the evaluation points `γ^0 … γ^{g-1}` must have pairwise
    /// distinct norms) and `k <= N`.
    pub fn new(
        field: ExtField,
        g: usize,
        k: usize,
        gamma: Option<FieldElem>,
        basis: Option<Basis>,
    ) -> Result<Self, CodeError> {
        let q = field.q();
        if g as u64 >= q as u64 {
            return Err(CodeError::TooManyGroups { q, g });
        }
        let n = g * field.r();
        if k > n {
            return Err(CodeError::InvalidK { k, n });
        }
        let gamma = gamma.unwrap_or_else(|| field.find_primitive());
        let basis = basis.unwrap_or_else(|| field.polynomial_basis());
        let a_vec: Vec<FieldElem> = (0..g as u64).map(|j| field.pow(&gamma, j)).collect();
        let rows: Vec<Vec<FieldElem>> = (0..k)
            .map(|i| {
                let m = SkewPoly::monomial(&field, field.one(), i);
                total_eval(&field, &m, &a_vec, &basis)
            })
            .collect();
        let gen = if k == 0 {
            Matrix::zeros(field.clone(), 0, n)
        } else {
            Matrix::from_rows(field.clone(), rows)
        };
        debug_assert_eq!(gen.rank(), k);
        Ok(LrsCode {
            field,
            g,
            k,
            gamma,
            a_vec,
            basis,
            gen,
        })
    }

    pub fn field(&self) -> &ExtField {
        &self.field
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn r(&self) -> usize {
        self.field.r()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Code length `N = g·r`.
    pub fn n(&self) -> usize {
        self.g * self.field.r()
    }

    pub fn gamma(&self) -> &FieldElem {
        &self.gamma
    }

    pub fn a_vec(&self) -> &[FieldElem] {
        &self.a_vec
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn generator(&self) -> &Matrix {
        &self.gen
    }

    /// `msg · G`; equals the total evaluation of the polynomial with
    /// coefficient vector `msg`.
    pub fn encode(&self, msg: &[FieldElem]) -> Result<Vec<FieldElem>, CodeError> {
        if msg.len() != self.k {
            return Err(CodeError::DimensionMismatch(format!(
                "message length {} != k = {}",
                msg.len(),
                self.k
            )));
        }
        Ok(self.gen.left_mul_vec(msg))
    }

    /// Exhaustive MDS check on the generator.
    pub fn is_mds(&self) -> Result<bool, CodeError> {
        if self.k == 0 {
            return Ok(true);
        }
        Ok(self.gen.all_k_subsets_full_rank()?)
    }

    /// Parity-check matrix: a null-space basis of the generator,
    /// `(N - k) x N`.
    pub fn parity_check(&self) -> Matrix {
        self.gen.null_space()
    }

    /// Recovers the message from a vector with erased positions (`None`).
    pub fn erasure_decode(
        &self,
        received: &[Option<FieldElem>],
    ) -> Result<Vec<FieldElem>, CodeError> {
        erasure_decode_matrix(&self.gen, received)
    }

    /// Uniform random codeword, sampled through the message space.
    pub fn random_codeword(&self, rng: &mut dyn rand_core::RngCore) -> Vec<FieldElem> {
        let poly = crate::skew::random_skew(&self.field, self.k, rng);
        total_eval(&self.field, &poly, &self.a_vec, &self.basis)
    }

    /// Code descriptor: field block, `g=`, `k=`, `gamma=`, `beta=`, then the
    /// generator matrix.
    pub fn to_text(&self) -> String {
        format!(
            "{}g={}\nk={}\ngamma={}\nbeta={}\n{}",
            self.field.to_text(),
            self.g,
            self.k,
            self.gamma.to_text(),
            self.basis.to_text(),
            self.gen.to_text()
        )
    }

    pub fn parse_text(text: &str) -> Result<Self, CodeError> {
        let mut field_lines = Vec::new();
        let mut g = None;
        let mut k = None;
        let mut gamma_text = None;
        let mut beta_text = None;
        let mut rest = Vec::new();
        for line in text.lines() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            if let Some((key, value)) = t.split_once('=') {
                match key.trim() {
                    "q" | "r" | "modulus" => {
                        field_lines.push(t.to_string());
                        continue;
                    }
                    "g" => {
                        g = Some(value.trim().parse::<usize>().map_err(|_| {
                            CodeError::BadDescriptor(t.to_string())
                        })?);
                        continue;
                    }
                    "k" => {
                        k = Some(value.trim().parse::<usize>().map_err(|_| {
                            CodeError::BadDescriptor(t.to_string())
                        })?);
                        continue;
                    }
                    "gamma" => {
                        gamma_text = Some(value.trim().to_string());
                        continue;
                    }
                    "beta" => {
                        beta_text = Some(value.trim().to_string());
                        continue;
                    }
                    _ => {}
                }
            }
            rest.push(line.to_string());
        }
        let field = ExtField::parse_text(&field_lines.join("\n"))
            .map_err(|e| CodeError::BadDescriptor(e.to_string()))?;
        let g = g.ok_or_else(|| CodeError::BadDescriptor("missing g=".into()))?;
        let k = k.ok_or_else(|| CodeError::BadDescriptor("missing k=".into()))?;
        let gamma = gamma_text
            .map(|s| field.parse_elem(&s))
            .transpose()
            .map_err(|e| CodeError::BadDescriptor(e.to_string()))?;
        let basis = beta_text
            .map(|s| Basis::parse_text(&field, &s))
            .transpose()
            .map_err(|e| CodeError::BadDescriptor(e.to_string()))?;
        let code = LrsCode::new(field.clone(), g, k, gamma, basis)?;
        // The stored generator must match the canonical one.
        if !rest.is_empty() {
            let stored = Matrix::parse_text(&field, &rest.join("\n"))
                .map_err(|e| CodeError::BadDescriptor(e.to_string()))?;
            if stored != code.gen {
                return Err(CodeError::BadDescriptor(
                    "generator does not match parameters".into(),
                ));
            }
        }
        Ok(code)
    }
}

/// Erasure decoding against an arbitrary `k x N` generator: solves
/// `msg · G|_S = received|_S` on the `k` lowest-indexed unerased positions,
/// then cross-checks the re-encoding on every unerased position.
pub fn erasure_decode_matrix(
    gen: &Matrix,
    received: &[Option<FieldElem>],
) -> Result<Vec<FieldElem>, CodeError> {
    let k = gen.rows();
    let n = gen.cols();
    if received.len() != n {
        return Err(CodeError::DimensionMismatch(format!(
            "received length {} != code length {}",
            received.len(),
            n
        )));
    }
    let known: Vec<usize> = (0..n).filter(|&j| received[j].is_some()).collect();
    if known.len() < k {
        return Err(CodeError::Undecodable(format!(
            "{} unerased positions, need {}",
            known.len(),
            k
        )));
    }
    let support: Vec<usize> = known[..k].to_vec();
    let restricted = gen.select_cols(&support);
    let rhs: Vec<FieldElem> = support
        .iter()
        .map(|&j| received[j].clone().expect("position is unerased"))
        .collect();
    // msg · G|_S = rhs  <=>  (G|_S)^T msg^T = rhs^T
    let msg = restricted
        .transpose()
        .solve_square(&rhs)
        .map_err(|_| CodeError::Undecodable("restricted system is singular".into()))?;
    // Cross-check against every unerased position.
    let reencoded = gen.left_mul_vec(&msg);
    for &j in &known {
        if reencoded[j] != *received[j].as_ref().expect("position is unerased") {
            return Err(CodeError::Inconsistent(j));
        }
    }
    Ok(msg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::PrimeField;
    use crate::linalg::combinations;
    use crate::products::{star, BlockVector};
    use crate::skew::norm_i;
    use rand_core::{RngCore, SeedableRng};

    fn f25() -> ExtField {
        ExtField::new(PrimeField::new(5).unwrap(), 2, None).unwrap()
    }

    fn code_5_3_2(k: usize) -> LrsCode {
        LrsCode::new(f25(), 3, k, None, None).unwrap()
    }

    #[test]
    fn generator_shapes() {
        let c = code_5_3_2(0);
        assert_eq!(c.generator().rows(), 0);
        assert_eq!(c.n(), 6);

        // k = 1: the single row is (β, β, β).
        let c = code_5_3_2(1);
        let f = c.field().clone();
        let row = c.generator().row(0);
        for j in 0..3 {
            for (i, beta) in c.basis().elems().iter().enumerate() {
                assert_eq!(row[j * 2 + i], *beta, "constant row repeats the basis");
            }
        }
        assert_eq!(c.encode(&[f.one()]).unwrap(), row.to_vec());
    }

    #[test]
    fn dimension_is_exact_for_all_k() {
        let f = f25();
        for k in 0..=6 {
            let c = LrsCode::new(f.clone(), 3, k, None, None).unwrap();
            assert_eq!(c.generator().rank(), k);
        }
    }

    #[test]
    fn nested_generators() {
        // C_{N,k} ⊂ C_{N,k+1}: the generator of the smaller is a row prefix.
        let big = code_5_3_2(4);
        for k in 0..4 {
            let small = code_5_3_2(k);
            for i in 0..k {
                assert_eq!(small.generator().row(i), big.generator().row(i));
            }
        }
    }

    #[test]
    fn parameter_validation() {
        let f = ExtField::new(PrimeField::new(3).unwrap(), 2, None).unwrap();
        assert_eq!(
            LrsCode::new(f.clone(), 3, 1, None, None).unwrap_err(),
            CodeError::TooManyGroups { q: 3, g: 3 }
        );
        assert_eq!(
            LrsCode::new(f, 2, 5, None, None).unwrap_err(),
            CodeError::InvalidK { k: 5, n: 4 }
        );
    }

    #[test]
    fn mds_with_exhaustive_minor_oracle() {
        // (q=5, g=3, r=2, k=3): all 20 column triples of the 3x6 generator
        // are checked nonsingular two ways.
        let c = code_5_3_2(3);
        assert!(c.is_mds().unwrap());
        let gen = c.generator();
        for subset in combinations(6, 3) {
            assert_eq!(gen.select_cols(&subset).rank(), 3, "subset {subset:?}");
        }
    }

    #[test]
    fn mds_detects_corruption() {
        let c = code_5_3_2(3);
        let f = c.field().clone();
        let mut corrupt = c.generator().clone();
        for i in 0..3 {
            corrupt[(i, 2)] = f.zero();
        }
        assert!(!corrupt.all_k_subsets_full_rank().unwrap());
    }

    #[test]
    fn square_code_is_mds() {
        let c = code_5_3_2(6);
        assert!(c.is_mds().unwrap());
    }

    #[test]
    fn encode_matches_polynomial_evaluation() {
        let c = code_5_3_2(3);
        let f = c.field().clone();
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(1);

        assert!(c
            .encode(&vec![f.zero(); 3])
            .unwrap()
            .iter()
            .all(|e| e.is_zero()));

        // Unit message picks out a generator row.
        let mut e1 = vec![f.zero(); 3];
        e1[0] = f.one();
        assert_eq!(c.encode(&e1).unwrap(), c.generator().row(0).to_vec());

        for _ in 0..200 {
            let msg: Vec<_> = (0..3).map(|_| f.sample(&mut rng)).collect();
            let poly = SkewPoly::from_coeffs(msg.clone());
            let direct = total_eval(&f, &poly, c.a_vec(), c.basis());
            assert_eq!(c.encode(&msg).unwrap(), direct);
        }
    }

    #[test]
    fn erasure_decode_roundtrips() {
        let c = code_5_3_2(3);
        let f = c.field().clone();
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(2);

        // No erasures: exact inverse of encode.
        let msg: Vec<_> = (0..3).map(|_| f.sample(&mut rng)).collect();
        let cw = c.encode(&msg).unwrap();
        let rx: Vec<_> = cw.iter().cloned().map(Some).collect();
        assert_eq!(c.erasure_decode(&rx).unwrap(), msg);

        // Any N-k = 3 random erasures decode, 100 masks.
        for _ in 0..100 {
            let msg: Vec<_> = (0..3).map(|_| f.sample(&mut rng)).collect();
            let cw = c.encode(&msg).unwrap();
            let mut rx: Vec<_> = cw.iter().cloned().map(Some).collect();
            let mut erased = std::collections::BTreeSet::new();
            while erased.len() < 3 {
                erased.insert((rng.next_u32() % 6) as usize);
            }
            for &j in &erased {
                rx[j] = None;
            }
            assert_eq!(c.erasure_decode(&rx).unwrap(), msg);
        }

        // N-k+1 erasures leave fewer than k equations.
        let cw = c.encode(&msg).unwrap();
        let mut rx: Vec<_> = cw.iter().cloned().map(Some).collect();
        for item in rx.iter_mut().take(4) {
            *item = None;
        }
        assert!(matches!(
            c.erasure_decode(&rx),
            Err(CodeError::Undecodable(_))
        ));
    }

    #[test]
    fn corrupted_symbol_fails_crosscheck() {
        let c = code_5_3_2(3);
        let f = c.field().clone();
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(3);
        let msg: Vec<_> = (0..3).map(|_| f.sample(&mut rng)).collect();
        let cw = c.encode(&msg).unwrap();
        let mut rx: Vec<_> = cw.iter().cloned().map(Some).collect();
        // Flip the last symbol; the first k positions still decode but the
        // re-encoding check must catch it.
        let last = rx[5].take().unwrap();
        rx[5] = Some(f.add(&last, &f.one()));
        assert_eq!(c.erasure_decode(&rx), Err(CodeError::Inconsistent(5)));
    }

    #[test]
    fn dual_of_mds_is_mds() {
        let c = code_5_3_2(2);
        let parity = c.parity_check();
        assert_eq!(parity.rows(), 4);
        assert!(parity.all_k_subsets_full_rank().unwrap());
        // And the parity rows annihilate the code.
        let f = c.field().clone();
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(4);
        for _ in 0..50 {
            let cw = c.random_codeword(&mut rng);
            for i in 0..parity.rows() {
                let mut acc = f.zero();
                for (a, b) in cw.iter().zip(parity.row(i)) {
                    acc = f.add(&acc, &f.mul(a, b));
                }
                assert!(acc.is_zero());
            }
        }
    }

    #[test]
    fn one_dimensional_codimension_parity() {
        // k = N-1: one parity row orthogonal to all generator rows.
        let c = code_5_3_2(5);
        let parity = c.parity_check();
        assert_eq!(parity.rows(), 1);
        let f = c.field().clone();
        for i in 0..5 {
            let mut acc = f.zero();
            for (a, b) in c.generator().row(i).iter().zip(parity.row(0)) {
                acc = f.add(&acc, &f.mul(a, b));
            }
            assert!(acc.is_zero());
        }
    }

    #[test]
    fn r_one_reduction_behaves_like_reed_solomon() {
        // r = 1, β = (1): MDS on the powers of γ, and the block products
        // reduce to plain coordinate-wise products.
        let f = ExtField::new(PrimeField::new(5).unwrap(), 1, None).unwrap();
        let c = LrsCode::new(f.clone(), 4, 2, None, None).unwrap();
        assert!(c.is_mds().unwrap());
        let basis = c.basis().clone();
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(5);
        for _ in 0..100 {
            let x: Vec<_> = (0..4).map(|_| f.sample(&mut rng)).collect();
            let y: Vec<_> = (0..4).map(|_| f.sample(&mut rng)).collect();
            let bx = BlockVector::from_flat(1, x.clone());
            let by = BlockVector::from_flat(1, y.clone());
            let cw = crate::products::cw_product(&f, &basis, &bx, &by).unwrap();
            let expected: Vec<_> = x.iter().zip(&y).map(|(a, b)| f.mul(a, b)).collect();
            assert_eq!(cw.flatten(), expected);
        }
    }

    #[test]
    fn g_one_reduction_is_gabidulin_like() {
        // g = 1: the evaluation point is γ^0 = 1, all norms are 1, and row i
        // of the generator is (σ^i(β_1), …, σ^i(β_r)).
        let f = f25();
        let c = LrsCode::new(f.clone(), 1, 2, None, None).unwrap();
        assert!(c.is_mds().unwrap());
        assert_eq!(norm_i(&f, &f.one(), 5), f.one());
        for i in 0..2 {
            let row = c.generator().row(i);
            for (l, beta) in c.basis().elems().iter().enumerate() {
                assert_eq!(row[l], f.frobenius_pow(beta, i));
            }
        }
        // Single-group star product agrees blockwise with itself.
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(6);
        let basis = c.basis().clone();
        for _ in 0..50 {
            let x: Vec<_> = (0..2).map(|_| f.sample(&mut rng)).collect();
            let y: Vec<_> = (0..2).map(|_| f.sample(&mut rng)).collect();
            let bx = BlockVector::from_flat(2, x.clone());
            let by = BlockVector::from_flat(2, y.clone());
            let cw = crate::products::cw_product(&f, &basis, &bx, &by).unwrap();
            assert_eq!(cw.flatten(), star(&f, &basis, &x, &y));
            assert_eq!(
                crate::products::inner_product(&f, &basis, &bx, &by).unwrap(),
                star(&f, &basis, &x, &y)
            );
        }
    }

    #[test]
    fn descriptor_roundtrip() {
        let c = code_5_3_2(3);
        let text = c.to_text();
        let parsed = LrsCode::parse_text(&text).unwrap();
        assert_eq!(parsed, c);
    }
}
