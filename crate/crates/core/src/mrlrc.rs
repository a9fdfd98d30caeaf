//! The maximally recoverable locally repairable storage code: an outer
//! linearized Reed-Solomon code multiplied by a block-diagonal of systematic
//! MDS local generators, with two-phase erasure repair and an exhaustive
//! maximal-recoverability auditor.
//!
//! Coordinates `0..n` split into `g` consecutive groups of `r + δ - 1`. The
//! first `r` positions of each group are systematic: puncturing all local
//! parities recovers the outer generator exactly, column for column.

use thiserror::Error;

use crate::codes::{CodeError, LrsCode};
use crate::galois::{ExtField, FieldElem, GaloisError, PrimeField};
use crate::linalg::{binomial, combinations, Matrix};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LrcError {
    #[error("field size {q} is below the local code length {needed}")]
    FieldTooSmall { q: u32, needed: u32 },
    #[error("local code construction failed verification: {0}")]
    ConstructionFailed(String),
    #[error("erasure pattern is uncorrectable ({phase} phase): {detail}")]
    Uncorrectable { phase: RepairPhase, detail: String },
    #[error("audit needs {needed} subset checks, budget is {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("received symbols are inconsistent with the code at position {0}")]
    Inconsistent(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Galois(#[from] GaloisError),
    #[error("malformed storage-code descriptor: {0}")]
    BadDescriptor(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepairPhase {
    Local,
    Global,
}

impl std::fmt::Display for RepairPhase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RepairPhase::Local => f.write_str("local"),
            RepairPhase::Global => f.write_str("global"),
        }
    }
}

/// A systematic `(r + δ - 1, r)` MDS generator over the prime subfield,
/// `A = [I_r | P]`, stored with entries embedded in the extension field.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalCode {
    r: usize,
    delta: usize,
    gen: Matrix,
}

impl LocalCode {
    /// Builds the local generator from a systematized Vandermonde matrix on
    /// the points `0, 1, …, r+δ-2` of `F_q`; requires `q >= r + δ - 1`. The
    /// MDS property is verified exhaustively before returning.
    pub fn new(field: &ExtField, r: usize, delta: usize) -> Result<Self, LrcError> {
        assert!(r >= 1 && delta >= 1);
        let q = field.q();
        let len = r + delta - 1;
        if (q as usize) < len {
            return Err(LrcError::FieldTooSmall {
                q,
                needed: len as u32,
            });
        }
        // Vandermonde rows point^0 … point^{r-1} on distinct points.
        let mut vand = Matrix::zeros(field.clone(), r, len);
        for (j, point) in (0..len as u32).enumerate() {
            let p = field.embed(point);
            let mut acc = field.one();
            for i in 0..r {
                vand[(i, j)] = acc.clone();
                acc = field.mul(&acc, &p);
            }
        }
        Self::from_generator(field, r, delta, systematize(&vand)?)
    }

    /// Wraps a caller-supplied generator, enforcing the systematic form, the
    /// prime-subfield entries, and the MDS property.
    pub fn from_generator(
        field: &ExtField,
        r: usize,
        delta: usize,
        gen: Matrix,
    ) -> Result<Self, LrcError> {
        let len = r + delta - 1;
        if gen.rows() != r || gen.cols() != len {
            return Err(LrcError::DimensionMismatch(format!(
                "local generator must be {r} x {len}, got {} x {}",
                gen.rows(),
                gen.cols()
            )));
        }
        for i in 0..r {
            for j in 0..len {
                if !field.in_prime_subfield(&gen[(i, j)]) {
                    return Err(LrcError::ConstructionFailed(format!(
                        "entry ({i}, {j}) lies outside the prime subfield"
                    )));
                }
                if j < r {
                    let expected = if i == j { field.one() } else { field.zero() };
                    if gen[(i, j)] != expected {
                        return Err(LrcError::ConstructionFailed(
                            "generator is not systematic".into(),
                        ));
                    }
                }
            }
        }
        match gen.all_k_subsets_full_rank() {
            Ok(true) => {}
            Ok(false) => {
                return Err(LrcError::ConstructionFailed(
                    "local generator is not MDS".into(),
                ))
            }
            Err(e) => return Err(LrcError::ConstructionFailed(e.to_string())),
        }
        Ok(LocalCode { r, delta, gen })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    /// Group length `r + δ - 1`.
    pub fn group_len(&self) -> usize {
        self.r + self.delta - 1
    }

    pub fn generator(&self) -> &Matrix {
        &self.gen
    }
}

/// Audits any `k x n` generator whose columns split into consecutive groups
/// of `group_len` with claimed locality `r`: for every choice of `r`
/// positions per group, the restriction must be MDS. Returns a witness for
/// the first failure. `MrLrc::audit_mr` delegates here; taking a bare
/// matrix also lets callers probe corrupted generators.
pub fn audit_generator(
    gen: &Matrix,
    group_len: usize,
    r: usize,
    budget: u64,
) -> Result<MrAudit, LrcError> {
    assert_eq!(gen.cols() % group_len, 0);
    let g = gen.cols() / group_len;
    let k = gen.rows();
    let per_group = binomial(group_len, r);
    let delta_choices = per_group.pow(g as u32);
    let needed = delta_choices.saturating_mul(binomial(g * r, k));
    if needed > budget {
        return Err(LrcError::BudgetExceeded { needed, budget });
    }
    let group_choices: Vec<Vec<usize>> = combinations(group_len, r).collect();
    let mut odometer = vec![0usize; g];
    let mut examined = 0u64;
    loop {
        let delta: Vec<usize> = odometer
            .iter()
            .enumerate()
            .flat_map(|(j, &c)| group_choices[c].iter().map(move |&off| j * group_len + off))
            .collect();
        examined += 1;
        let restricted = gen.select_cols(&delta);
        let fail_subset = if restricted.rank() < k {
            Some((0..k).collect::<Vec<_>>())
        } else {
            restricted.first_singular_k_subset()
        };
        if let Some(subset) = fail_subset {
            return Ok(MrAudit {
                passed: false,
                delta_choices: examined,
                witness: Some(MrWitness {
                    subset: subset.iter().map(|&i| delta[i]).collect(),
                    delta,
                }),
            });
        }
        // Advance the odometer.
        let mut pos = g;
        loop {
            if pos == 0 {
                return Ok(MrAudit {
                    passed: true,
                    delta_choices: examined,
                    witness: None,
                });
            }
            pos -= 1;
            if odometer[pos] + 1 < group_choices.len() {
                odometer[pos] += 1;
                for o in odometer.iter_mut().skip(pos + 1) {
                    *o = 0;
                }
                break;
            }
        }
    }
}

/// Row-reduces an MDS generator into systematic form `[I | P]`.
fn systematize(gen: &Matrix) -> Result<Matrix, LrcError> {
    let r = gen.rows();
    let lead: Vec<usize> = (0..r).collect();
    let first = gen.select_cols(&lead);
    let mut out = Matrix::zeros(gen.field().clone(), r, gen.cols());
    for j in 0..gen.cols() {
        let col: Vec<FieldElem> = (0..r).map(|i| gen[(i, j)].clone()).collect();
        let solved = first
            .solve_square(&col)
            .map_err(|_| LrcError::ConstructionFailed("leading block is singular".into()))?;
        for i in 0..r {
            out[(i, j)] = solved[i].clone();
        }
    }
    Ok(out)
}

/// Report of the maximal-recoverability audit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MrAudit {
    pub passed: bool,
    /// Number of systematic-position choices examined.
    pub delta_choices: u64,
    /// On failure: the global column choice and the k-column subset whose
    /// restriction is singular.
    pub witness: Option<MrWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MrWitness {
    pub delta: Vec<usize>,
    pub subset: Vec<usize>,
}

/// The global storage code: outer linearized Reed-Solomon code of length
/// `N = g·r` composed with `g` copies of the local generator, total length
/// `n = g(r + δ - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MrLrc {
    outer: LrsCode,
    local: LocalCode,
    g_glob: Matrix,
}

impl MrLrc {
    /// Assembles the storage code for parameters `(q, r, δ, g, k)` with the
    /// default modulus, primitive element and polynomial basis.
    pub fn build(q: u64, r: usize, delta: usize, g: usize, k: usize) -> Result<Self, LrcError> {
        let base = PrimeField::new(q)?;
        let field = ExtField::new(base, r, None)?;
        let outer = LrsCode::new(field.clone(), g, k, None, None)?;
        let local = LocalCode::new(&field, r, delta)?;
        Self::assemble(outer, local)
    }

    /// Assembles from explicit parts; used when the caller overrides the
    /// modulus, `γ`, the basis, or the local generator.
    pub fn assemble(outer: LrsCode, local: LocalCode) -> Result<Self, LrcError> {
        if outer.k() < 1 {
            return Err(LrcError::Code(CodeError::InvalidK {
                k: outer.k(),
                n: outer.n(),
            }));
        }
        if outer.r() != local.r() {
            return Err(LrcError::DimensionMismatch(format!(
                "outer locality {} != local code dimension {}",
                outer.r(),
                local.r()
            )));
        }
        let field = outer.field().clone();
        let g = outer.g();
        let big_n = outer.n();
        let len = local.group_len();
        let n = g * len;
        // diag_g(A): N x n block diagonal.
        let mut diag = Matrix::zeros(field.clone(), big_n, n);
        for j in 0..g {
            for i in 0..local.r() {
                for c in 0..len {
                    diag[(j * local.r() + i, j * len + c)] = local.generator()[(i, c)].clone();
                }
            }
        }
        let g_glob = outer.generator().matmul(&diag);
        let code = MrLrc {
            outer,
            local,
            g_glob,
        };
        debug_assert_eq!(
            code.g_glob.select_cols(&code.systematic_cols()),
            *code.outer.generator()
        );
        Ok(code)
    }

    pub fn field(&self) -> &ExtField {
        self.outer.field()
    }

    pub fn outer(&self) -> &LrsCode {
        &self.outer
    }

    pub fn local(&self) -> &LocalCode {
        &self.local
    }

    pub fn generator(&self) -> &Matrix {
        &self.g_glob
    }

    pub fn g(&self) -> usize {
        self.outer.g()
    }

    pub fn r(&self) -> usize {
        self.outer.r()
    }

    pub fn k(&self) -> usize {
        self.outer.k()
    }

    pub fn delta(&self) -> usize {
        self.local.delta()
    }

    /// Total length `n = g(r + δ - 1)`.
    pub fn n(&self) -> usize {
        self.g() * self.local.group_len()
    }

    /// Restricted length `N = g·r` after dropping local parities.
    pub fn big_n(&self) -> usize {
        self.outer.n()
    }

    /// Number of global parities `gr - k`.
    pub fn global_parities(&self) -> usize {
        self.big_n() - self.k()
    }

    /// Column range of group `j` inside `0..n`.
    pub fn group_range(&self, j: usize) -> std::ops::Range<usize> {
        let len = self.local.group_len();
        j * len..(j + 1) * len
    }

    /// The systematic columns: the first `r` positions of every group.
    pub fn systematic_cols(&self) -> Vec<usize> {
        let len = self.local.group_len();
        (0..self.g())
            .flat_map(|j| (0..self.r()).map(move |i| j * len + i))
            .collect()
    }

    /// Encodes a stack of message rows: returns `Y = X·G_glob` and the
    /// locally non-redundant part `Z = X·G_out`. The systematic columns of
    /// `Y` equal `Z` entry for entry.
    pub fn encode_global(&self, x: &Matrix) -> Result<(Matrix, Matrix), LrcError> {
        if x.cols() != self.k() {
            return Err(LrcError::DimensionMismatch(format!(
                "message width {} != k = {}",
                x.cols(),
                self.k()
            )));
        }
        let y = x.matmul(&self.g_glob);
        let z = x.matmul(self.outer.generator());
        Ok((y, z))
    }

    /// Fills every erasure a single group can repair on its own (groups with
    /// at most `δ - 1` erasures). Returns the number of positions filled.
    pub fn local_repair_pass(
        &self,
        row: &mut [Option<FieldElem>],
    ) -> Result<usize, LrcError> {
        assert_eq!(row.len(), self.n());
        let _field = self.field().clone();
        let r = self.r();
        let len = self.local.group_len();
        let mut filled = 0;
        for j in 0..self.g() {
            let range = self.group_range(j);
            let known: Vec<usize> = (0..len)
                .filter(|&off| row[range.start + off].is_some())
                .collect();
            if known.len() == len || known.len() < r {
                continue;
            }
            // Solve z_j from any r known columns of A, then re-expand.
            let support = &known[..r];
            let a_restricted = self.local.generator().select_cols(support);
            let vals: Vec<FieldElem> = support
                .iter()
                .map(|&off| row[range.start + off].clone().expect("known position"))
                .collect();
            let z_j = a_restricted
                .transpose()
                .solve_square(&vals)
                .map_err(|_| LrcError::ConstructionFailed("local MDS solve failed".into()))?;
            let expanded = self.local.generator().left_mul_vec(&z_j);
            for (off, value) in expanded.into_iter().enumerate() {
                let pos = range.start + off;
                match &row[pos] {
                    Some(existing) => {
                        if *existing != value {
                            return Err(LrcError::Inconsistent(pos));
                        }
                    }
                    None => {
                        row[pos] = Some(value);
                        filled += 1;
                    }
                }
            }
        }
        Ok(filled)
    }

    /// Repairs a codeword row with erasures (`None` entries).
    ///
    /// Phase 1 repairs each group with at most `δ - 1` erasures locally.
    /// Phase 2 handles the rest: it first decodes the message through the
    /// greedy systematic choice (the `r` lowest-indexed available positions
    /// per group), and if that restriction is rank-deficient it falls back
    /// to all available columns, which succeeds exactly on the
    /// information-theoretically correctable patterns.
    pub fn repair(&self, row: &[Option<FieldElem>]) -> Result<Vec<FieldElem>, LrcError> {
        if row.len() != self.n() {
            return Err(LrcError::DimensionMismatch(format!(
                "row length {} != n = {}",
                row.len(),
                self.n()
            )));
        }
        let mut work = row.to_vec();
        self.local_repair_pass(&mut work)?;
        if work.iter().all(|e| e.is_some()) {
            return Ok(work.into_iter().map(|e| e.expect("filled")).collect());
        }

        // Phase 2: decode the message globally and re-encode.
        let r = self.r();
        let available: Vec<usize> = (0..self.n()).filter(|&p| work[p].is_some()).collect();
        let mut greedy = Vec::new();
        for j in 0..self.g() {
            let range = self.group_range(j);
            let in_group: Vec<usize> = available
                .iter()
                .copied()
                .filter(|p| range.contains(p))
                .collect();
            greedy.extend(in_group.into_iter().take(r));
        }
        let msg = match self.solve_message(&work, &greedy)? {
            Some(m) => m,
            None => self
                .solve_message(&work, &available)?
                .ok_or_else(|| LrcError::Uncorrectable {
                    phase: RepairPhase::Global,
                    detail: format!(
                        "available columns span rank {} < k = {}",
                        self.g_glob.select_cols(&available).rank(),
                        self.k()
                    ),
                })?,
        };
        let repaired = self.g_glob.left_mul_vec(&msg);
        for (pos, original) in row.iter().enumerate() {
            if let Some(v) = original {
                if repaired[pos] != *v {
                    return Err(LrcError::Inconsistent(pos));
                }
            }
        }
        Ok(repaired)
    }

    /// Solves `msg · G_glob|_cols = row|_cols` if the restriction has full
    /// rank, cross-checking every supplied column.
    fn solve_message(
        &self,
        row: &[Option<FieldElem>],
        cols: &[usize],
    ) -> Result<Option<Vec<FieldElem>>, LrcError> {
        let k = self.k();
        let sub = self.g_glob.select_cols(cols);
        let (rref, rank) = sub.rref_rank();
        if rank < k {
            return Ok(None);
        }
        // Pivot columns of the restriction give k independent equations.
        let mut pivots = Vec::with_capacity(k);
        for i in 0..k {
            let col = (0..sub.cols())
                .find(|&j| !rref[(i, j)].is_zero())
                .expect("nonzero row has a pivot");
            pivots.push(cols[col]);
        }
        let square = self.g_glob.select_cols(&pivots);
        let vals: Vec<FieldElem> = pivots
            .iter()
            .map(|&p| row[p].clone().expect("pivot columns are available"))
            .collect();
        let msg = square
            .transpose()
            .solve_square(&vals)
            .map_err(|_| LrcError::ConstructionFailed("pivot system singular".into()))?;
        let reencoded = self.g_glob.left_mul_vec(&msg);
        for &p in cols {
            if reencoded[p] != *row[p].as_ref().expect("available column") {
                return Err(LrcError::Inconsistent(p));
            }
        }
        Ok(Some(msg))
    }

    /// Exhaustive maximal-recoverability audit: for every choice of `r`
    /// systematic positions per group, the restriction of the global
    /// generator must be MDS. Cost is `C(r+δ-1, r)^g` MDS checks of
    /// `C(N, k)` subsets each; refuses to start past `budget` total subset
    /// checks.
    pub fn audit_mr(&self, budget: u64) -> Result<MrAudit, LrcError> {
        audit_generator(&self.g_glob, self.local.group_len(), self.r(), budget)
    }

    /// Storage-code descriptor: the outer code descriptor, `delta=`, and the
    /// local generator block.
    pub fn to_text(&self) -> String {
        format!(
            "{}delta={}\n{}",
            self.outer.to_text(),
            self.delta(),
            self.local.generator().to_text()
        )
    }

    pub fn parse_text(text: &str) -> Result<Self, LrcError> {
        // The outer descriptor ends at the generator matrix; the local
        // generator block follows the delta= line.
        let Some(delta_pos) = text.find("delta=") else {
            return Err(LrcError::BadDescriptor("missing delta=".into()));
        };
        let outer_text = &text[..delta_pos];
        let rest = &text[delta_pos..];
        let mut lines = rest.lines();
        let delta_line = lines.next().expect("delta line exists");
        let delta: usize = delta_line
            .trim_start_matches("delta=")
            .trim()
            .parse()
            .map_err(|_| LrcError::BadDescriptor(delta_line.to_string()))?;
        let outer = LrsCode::parse_text(outer_text)?;
        let field = outer.field().clone();
        let local_text: Vec<&str> = lines.collect();
        let local_gen = Matrix::parse_text(&field, &local_text.join("\n"))
            .map_err(|e| LrcError::BadDescriptor(e.to_string()))?;
        let local = LocalCode::from_generator(&field, outer.r(), delta, local_gen)?;
        Self::assemble(outer, local)
    }
}
