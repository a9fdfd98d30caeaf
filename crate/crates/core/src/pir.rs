//! The private information retrieval protocol over the locally non-redundant
//! part of the storage code.
//!
//! Each of `s` iterations sends every server a query of `b·m` blocks of `r`
//! field elements: fresh uniform codewords of the masking code `C_{N,rt}`,
//! plus, in the blocks of the requested file, a diagonal 0/1 mask selecting
//! a window of `h` coordinates per fold. Servers reply with the inner matrix
//! product of their stored blocks against the query. Because products of
//! stored codewords and masking codewords land in `C_{N,k+rt-1}`, the parity
//! matrix `H` of that code annihilates the random part of the total
//! response; the syndrome then pins down the `c = N - k - rt + 1` masked
//! symbols through an invertible `c x c` system (the dual code is MDS).
//! After `s` iterations each fold knows `k` symbols of its codeword row and
//! erasure-decodes the file row.
//!
//! The no-folding scheme is exactly the `b = 1` case; `b, s` are derived so
//! that `bk = sc` holds without any divisibility assumption on `k`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand_core::RngCore;
use thiserror::Error;

use crate::codes::{CodeError, LrsCode};
use crate::galois::FieldElem;
use crate::linalg::{combinations, Matrix};
use crate::products::{inner_product, mat_rep_inv, BlockVector, ProductError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PirError {
    #[error("collusion too large: k + rt = {sum} exceeds N = {n}")]
    CollusionTooLarge { sum: usize, n: usize },
    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("singular support system: {0}")]
    SingularSupport(String),
    #[error("expected {expected} rounds, got {got}")]
    MissingRound { expected: usize, got: usize },
    #[error("query distribution has {size} points, cap is {cap}")]
    DistributionTooLarge { size: u128, cap: u128 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Product(#[from] ProductError),
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// Derived protocol constants.
///
/// `c = N - k - rt + 1` symbols are recovered per iteration; folding `b` and
/// iteration count `s` are the smallest integers with `bk = sc`, and
/// `chunk = k/s = c/b` is the per-fold window width. `b = 1` (the
/// no-folding scheme) happens exactly when `c` divides `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PirParams {
    pub g: usize,
    pub r: usize,
    pub q: u32,
    pub k: usize,
    pub t: usize,
    pub m: usize,
    /// Restricted code length `N = g·r`.
    pub n: usize,
    /// Symbols recovered per iteration.
    pub c: usize,
    /// Folding factor.
    pub b: usize,
    /// Iteration count.
    pub s: usize,
    /// Per-fold window width `h`.
    pub chunk: usize,
}

impl PirParams {
    pub fn scheme1(&self) -> bool {
        self.b == 1
    }

    /// Colluding nodes `rt`.
    pub fn tau(&self) -> usize {
        self.r * self.t
    }

    pub fn header_text(&self) -> String {
        format!(
            "q={}\nr={}\ng={}\nk={}\nt={}\nm={}\nN={}\nc={}\nb={}\ns={}\nh={}\n",
            self.q, self.r, self.g, self.k, self.t, self.m, self.n, self.c, self.b, self.s,
            self.chunk
        )
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// An exact rational, always reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den != 0);
        let d = gcd(num, den).max(1);
        Ratio {
            num: num / d,
            den: den / d,
        }
    }
}

impl std::fmt::Display for Ratio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Validates inputs and derives the protocol constants.
pub fn derive_params(
    g: usize,
    r: usize,
    q: u32,
    k: usize,
    t: usize,
    m: usize,
) -> Result<PirParams, PirError> {
    if g < 1 || r < 1 || k < 1 || t < 1 || m < 1 {
        return Err(PirError::InvalidParameter(
            "g, r, k, t, m must all be positive".into(),
        ));
    }
    let n = g * r;
    let rt = r * t;
    if k + rt > n {
        return Err(PirError::CollusionTooLarge { sum: k + rt, n });
    }
    let c = n - k - rt + 1;
    let l = (c as u64 / gcd(c as u64, k as u64)) * k as u64; // lcm(c, k)
    let b = (l / k as u64) as usize;
    let s = (l / c as u64) as usize;
    let chunk = k / s;
    debug_assert_eq!(b * k, s * c);
    debug_assert_eq!(chunk, c / b);
    debug_assert_eq!(chunk * s, k);
    Ok(PirParams {
        g,
        r,
        q,
        k,
        t,
        m,
        n,
        c,
        b,
        s,
        chunk,
    })
}

/// The download rate `bk/(Ns)` as an exact rational; always equals
/// `(N - k - rt + 1)/N`.
pub fn rate(params: &PirParams) -> Ratio {
    let measured = Ratio::new(
        params.b as u64 * params.k as u64,
        params.n as u64 * params.s as u64,
    );
    let formula = Ratio::new(params.c as u64, params.n as u64);
    assert_eq!(measured, formula, "bk/(Ns) must equal c/N");
    measured
}

/// Per-colluding-set result of the structural privacy audit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrivacyReport {
    /// Colluding-set size that was audited.
    pub t: usize,
    /// Number of sets checked: C(g, t).
    pub sets_checked: usize,
    /// Sets whose restricted masking generator dropped rank.
    pub failures: Vec<Vec<usize>>,
}

impl PrivacyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks, for every colluding set `T` of `t` servers, that the masking
/// generator restricted to the `rt` columns of those servers has rank `rt`,
/// i.e. the colluders' view of each masking codeword is uniform. `gen` must
/// be an `rt x (g·r)` generator.
pub fn privacy_audit(gen: &Matrix, r: usize, t: usize) -> PrivacyReport {
    let rt = gen.rows();
    let g = gen.cols() / r;
    let mut failures = Vec::new();
    let mut sets_checked = 0;
    for servers in combinations(g, t) {
        sets_checked += 1;
        let cols: Vec<usize> = servers
            .iter()
            .flat_map(|&j| j * r..(j + 1) * r)
            .collect();
        if gen.select_cols(&cols).rank() < rt {
            failures.push(servers);
        }
    }
    PrivacyReport {
        t,
        sets_checked,
        failures,
    }
}

/// Queries and the secret masking codewords of one iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundQueries {
    /// One query per server: `b·m` blocks of `r` elements, file-major
    /// (file `ℓ` occupies blocks `ℓ·b .. (ℓ+1)·b`, one per fold).
    pub queries: Vec<BlockVector>,
    /// The sampled masking codewords, in the same `(file, fold)` order.
    pub masks: Vec<BlockVector>,
}

/// One full protocol round as recorded in a transcript.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundRecord {
    pub queries: Vec<BlockVector>,
    pub responses: Vec<Vec<FieldElem>>,
    pub syndrome: Vec<FieldElem>,
    pub chunks: Vec<Vec<FieldElem>>,
}

/// Complete record of a retrieval session. Byte-exact reproducible for a
/// fixed seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub params: PirParams,
    pub seed: u64,
    /// Requested file, 0-based.
    pub file_index: usize,
    pub rounds: Vec<RoundRecord>,
    /// Symbols of `F_{q^r}` received from servers; local redundancy is never
    /// downloaded, so this is `N` per iteration.
    pub downloaded_symbols: u64,
    /// Query symbols sent to servers: `g·r·b·m` per iteration.
    pub uploaded_symbols: u64,
}

impl Transcript {
    pub fn measured_rate(&self) -> Ratio {
        Ratio::new(
            self.params.b as u64 * self.params.k as u64,
            self.downloaded_symbols,
        )
    }

    /// Plain-text transcript: a header echoing the parameters and seed, then
    /// one section per iteration with queries, responses, the syndrome and
    /// the recovered chunks.
    pub fn to_text(&self) -> String {
        let mut out = self.params.header_text();
        let _ = writeln!(out, "seed={}", self.seed);
        let _ = writeln!(out, "file={}", self.file_index + 1);
        let _ = writeln!(out, "downloaded={}", self.downloaded_symbols);
        let _ = writeln!(out, "uploaded={}", self.uploaded_symbols);
        for (u, round) in self.rounds.iter().enumerate() {
            let _ = writeln!(out, "iteration={}", u + 1);
            for (j, q) in round.queries.iter().enumerate() {
                let blocks: Vec<String> = q
                    .blocks()
                    .iter()
                    .map(|b| {
                        b.iter()
                            .map(|e| e.to_text())
                            .collect::<Vec<_>>()
                            .join(" ")
                    })
                    .collect();
                let _ = writeln!(out, "query j={} {}", j + 1, blocks.join(";"));
            }
            for (j, resp) in round.responses.iter().enumerate() {
                let line: Vec<String> = resp.iter().map(|e| e.to_text()).collect();
                let _ = writeln!(out, "response j={} {}", j + 1, line.join(" "));
            }
            let syn: Vec<String> = round.syndrome.iter().map(|e| e.to_text()).collect();
            let _ = writeln!(out, "syndrome {}", syn.join(" "));
            for (v, chunk) in round.chunks.iter().enumerate() {
                let line: Vec<String> = chunk.iter().map(|e| e.to_text()).collect();
                let _ = writeln!(out, "chunk v={} {}", v + 1, line.join(" "));
            }
        }
        out
    }
}

/// A retrieval scheme bound to a storage code: the derived parameters, the
/// masking code, and the cached parity matrix of the product code.
#[derive(Debug, Clone, PartialEq)]
pub struct PirScheme {
    params: PirParams,
    outer: LrsCode,
    masking: LrsCode,
    parity: Matrix,
}

impl PirScheme {
    /// Builds the scheme for `t` colluding servers and `m` files over the
    /// given outer code. The masking code `C_{N,rt}` and the parity matrix
    /// of `C_{N,k+rt-1}` share the outer code's `γ` and basis.
    pub fn new(outer: &LrsCode, t: usize, m: usize) -> Result<Self, PirError> {
        let params = derive_params(outer.g(), outer.r(), outer.field().q(), outer.k(), t, m)?;
        let field = outer.field().clone();
        let masking = LrsCode::new(
            field.clone(),
            outer.g(),
            params.tau(),
            Some(outer.gamma().clone()),
            Some(outer.basis().clone()),
        )?;
        let product = LrsCode::new(
            field,
            outer.g(),
            params.k + params.tau() - 1,
            Some(outer.gamma().clone()),
            Some(outer.basis().clone()),
        )?;
        let parity = product.parity_check();
        debug_assert_eq!(parity.rows(), params.c);
        Ok(PirScheme {
            params,
            outer: outer.clone(),
            masking,
            parity,
        })
    }

    pub fn params(&self) -> &PirParams {
        &self.params
    }

    pub fn outer(&self) -> &LrsCode {
        &self.outer
    }

    pub fn masking(&self) -> &LrsCode {
        &self.masking
    }

    /// Parity matrix of the product code, `c x N`.
    pub fn parity(&self) -> &Matrix {
        &self.parity
    }

    /// The masked window of fold `v` at iteration `u` (both 0-based):
    /// `chunk` consecutive coordinates starting at `chunk·(u+v)`, reduced
    /// cyclically into `0..N`. For valid parameters the window never
    /// actually wraps.
    pub fn support(&self, u: usize, v: usize) -> Vec<usize> {
        let h = self.params.chunk;
        let start = h * (u + v);
        (start..start + h).map(|p| p % self.params.n).collect()
    }

    /// Union of all fold windows at iteration `u`, sorted; always `c`
    /// positions.
    pub fn round_support(&self, u: usize) -> Vec<usize> {
        let mut all: Vec<usize> = (0..self.params.b)
            .flat_map(|v| self.support(u, v))
            .collect();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), self.params.c, "fold windows must not collide");
        all
    }

    /// The diagonal selection matrix of server `j` against a position set,
    /// and its field-vector form. Entry `κ` of the diagonal is 1 iff global
    /// coordinate `j·r + κ` lies in `positions`.
    pub fn mask_matrix(&self, j: usize, positions: &[usize]) -> (Matrix, Vec<FieldElem>) {
        let field = self.outer.field();
        let r = self.params.r;
        let mut diag = Matrix::zeros(field.clone(), r, r);
        for kappa in 0..r {
            if positions.contains(&(j * r + kappa)) {
                diag[(kappa, kappa)] = field.one();
            }
        }
        let vec = mat_rep_inv(field, self.outer.basis(), &diag);
        (diag, vec)
    }

    /// Builds the queries of iteration `u` for file `file_index` (0-based):
    /// fresh uniform masking codewords for every `(file, fold)` block, plus
    /// the diagonal masks on the requested file's blocks.
    pub fn gen_queries(
        &self,
        file_index: usize,
        u: usize,
        rng: &mut dyn RngCore,
    ) -> Result<RoundQueries, PirError> {
        let p = &self.params;
        if file_index >= p.m {
            return Err(PirError::IndexOutOfRange {
                index: file_index,
                bound: p.m,
            });
        }
        if u >= p.s {
            return Err(PirError::IndexOutOfRange {
                index: u,
                bound: p.s,
            });
        }
        let field = self.outer.field().clone();
        // One uniform codeword per (file, fold), file-major order.
        let masks: Vec<BlockVector> = (0..p.m * p.b)
            .map(|_| BlockVector::from_flat(p.r, self.masking.random_codeword(rng)))
            .collect();
        let mut queries = Vec::with_capacity(p.g);
        for j in 0..p.g {
            let mut blocks: Vec<Vec<FieldElem>> = masks
                .iter()
                .map(|d| d.block(j).to_vec())
                .collect();
            for v in 0..p.b {
                let window = self.support(u, v);
                let (_, e_block) = self.mask_matrix(j, &window);
                let target = file_index * p.b + v;
                for (dst, add) in blocks[target].iter_mut().zip(e_block) {
                    *dst = field.add(dst, &add);
                }
            }
            queries.push(BlockVector::new(p.r, blocks));
        }
        Ok(RoundQueries { queries, masks })
    }

    /// A server's answer: the inner matrix product of its `b·m` stored
    /// blocks against the query blocks. Pure; the server learns nothing
    /// beyond the query itself.
    pub fn server_respond(
        &self,
        z_blocks: &BlockVector,
        query: &BlockVector,
    ) -> Result<Vec<FieldElem>, PirError> {
        Ok(inner_product(
            self.outer.field(),
            self.outer.basis(),
            z_blocks,
            query,
        )?)
    }

    /// Recovers the `b` masked windows of iteration `u` from the assembled
    /// total response: the parity syndrome kills the random part, and the
    /// `c x c` support system (invertible because the dual code is MDS)
    /// yields the masked symbols.
    pub fn reconstruct_round(
        &self,
        total_response: &[FieldElem],
        u: usize,
    ) -> Result<Vec<Vec<FieldElem>>, PirError> {
        let p = &self.params;
        assert_eq!(total_response.len(), p.n);
        let syndrome = self.parity.mul_vec(total_response);
        let support = self.round_support(u);
        let h_s = self.parity.select_cols(&support);
        let values = h_s
            .solve_square(&syndrome)
            .map_err(|e| PirError::SingularSupport(e.to_string()))?;
        let lookup: BTreeMap<usize, &FieldElem> =
            support.iter().copied().zip(values.iter()).collect();
        let chunks = (0..p.b)
            .map(|v| {
                self.support(u, v)
                    .into_iter()
                    .map(|pos| (*lookup[&pos]).clone())
                    .collect()
            })
            .collect();
        Ok(chunks)
    }

    /// Assembles the file from all `s` rounds of chunks: per fold, the
    /// windows are disjoint and cover `k` coordinates of that fold's
    /// codeword row, which erasure-decodes to the file row.
    pub fn reconstruct_file(
        &self,
        round_chunks: &[Vec<Vec<FieldElem>>],
    ) -> Result<Matrix, PirError> {
        let p = &self.params;
        if round_chunks.len() != p.s {
            return Err(PirError::MissingRound {
                expected: p.s,
                got: round_chunks.len(),
            });
        }
        let field = self.outer.field().clone();
        let mut rows = Vec::with_capacity(p.b);
        for v in 0..p.b {
            let mut masked: Vec<Option<FieldElem>> = vec![None; p.n];
            for (u, chunks) in round_chunks.iter().enumerate() {
                for (pos, val) in self.support(u, v).into_iter().zip(&chunks[v]) {
                    assert!(masked[pos].is_none(), "fold windows must be disjoint");
                    masked[pos] = Some(val.clone());
                }
            }
            debug_assert_eq!(masked.iter().filter(|e| e.is_some()).count(), p.k);
            rows.push(self.outer.erasure_decode(&masked)?);
        }
        Ok(Matrix::from_rows(field, rows))
    }

    /// Structural privacy audit over every colluding set of `t` servers.
    pub fn audit_privacy(&self) -> PrivacyReport {
        privacy_audit(self.masking.generator(), self.params.r, self.params.t)
    }

    /// Exhaustively tabulates the distribution of the colluders' joint query
    /// view at iteration `u` for a requested file, by enumerating every
    /// masking-codeword tuple. Only feasible on tiny instances; the point
    /// count `(q^r)^{rt·m·b}` must not exceed `cap`.
    pub fn exhaustive_view_distribution(
        &self,
        colluders: &[usize],
        file_index: usize,
        u: usize,
        cap: u128,
    ) -> Result<BTreeMap<Vec<u32>, u64>, PirError> {
        let p = &self.params;
        if file_index >= p.m {
            return Err(PirError::IndexOutOfRange {
                index: file_index,
                bound: p.m,
            });
        }
        let field = self.outer.field().clone();
        let card = field.cardinality() as u128;
        let rt = p.tau();
        let msg_space = card.pow(rt as u32);
        let tuples = msg_space.checked_pow((p.m * p.b) as u32);
        let size = match tuples {
            Some(s) => s,
            None => {
                return Err(PirError::DistributionTooLarge {
                    size: u128::MAX,
                    cap,
                })
            }
        };
        if size > cap {
            return Err(PirError::DistributionTooLarge { size, cap });
        }
        // Precompute the deterministic mask blocks per (server, fold).
        let mask_blocks: Vec<Vec<Vec<FieldElem>>> = (0..p.g)
            .map(|j| {
                (0..p.b)
                    .map(|v| self.mask_matrix(j, &self.support(u, v)).1)
                    .collect()
            })
            .collect();
        let mut dist: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
        for tuple_index in 0..size {
            // Decode the tuple into m·b masking messages, each rt field
            // elements.
            let mut n = tuple_index;
            let mut codewords = Vec::with_capacity(p.m * p.b);
            for _ in 0..p.m * p.b {
                let msg_index = n % msg_space;
                n /= msg_space;
                let mut msg = Vec::with_capacity(rt);
                let mut mi = msg_index;
                for _ in 0..rt {
                    msg.push(field.elem_at((mi % card) as u64));
                    mi /= card;
                }
                let cw = self.masking.encode(&msg)?;
                codewords.push(BlockVector::from_flat(p.r, cw));
            }
            // Colluders' joint view.
            let mut key = Vec::new();
            for &j in colluders {
                for (block_idx, d) in codewords.iter().enumerate() {
                    let file = block_idx / p.b;
                    let v = block_idx % p.b;
                    let mut block = d.block(j).to_vec();
                    if file == file_index {
                        for (dst, add) in block.iter_mut().zip(&mask_blocks[j][v]) {
                            *dst = field.add(dst, add);
                        }
                    }
                    for e in &block {
                        key.extend_from_slice(e.coeffs());
                    }
                }
            }
            *dist.entry(key).or_insert(0) += 1;
        }
        Ok(dist)
    }
}
