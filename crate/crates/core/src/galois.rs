//! Prime fields `F_q`, extension fields `F_{q^r}`, the Frobenius automorphism
//! `σ(a) = a^q`, and ordered bases of `F_{q^r}` over `F_q`.
//!
//! Elements of `F_{q^r}` are residue classes of polynomials modulo a monic
//! irreducible polynomial of degree `r` over `F_q`, stored as `r` residues in
//! `[0, q)`, low degree first. The canonical text form of an element is its
//! residues joined by commas, e.g. `3,1` for `3 + ᾱ`.
//!
//! Everything here is an immutable value after construction; all operations
//! are pure.

use std::fmt;

use rand_core::RngCore;
use thiserror::Error;

/// Errors raised while constructing fields or parsing their descriptors.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GaloisError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("the supplied modulus is reducible over F_{0}")]
    NotIrreducible(u32),
    #[error("invalid modulus: {0}")]
    BadModulus(String),
    #[error("the supplied elements do not form a basis of F_{{q^r}} over F_q")]
    NotABasis,
    #[error("malformed field element `{0}`")]
    BadElement(String),
    #[error("malformed field descriptor: {0}")]
    BadDescriptor(String),
}

/// The prime field `F_q`, `q` prime. Arithmetic is integers mod `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    q: u32,
}

impl PrimeField {
    /// Builds `F_q`. Fails with [`GaloisError::NotPrime`] unless `q` is prime.
    pub fn new(q: u64) -> Result<Self, GaloisError> {
        if q < 2 || !is_prime(q) {
            return Err(GaloisError::NotPrime(q));
        }
        Ok(PrimeField { q: q as u32 })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.q as u64) as u32
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.q as u64 - b as u64) % self.q as u64) as u32
    }

    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    /// Multiplicative inverse via Fermat: `a^(q-2)`.
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        Some(self.pow(a, self.q as u64 - 2))
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a as u64;
        let q = self.q as u64;
        let mut acc = 1u64;
        base %= q;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % q;
            }
            base = base * base % q;
            e >>= 1;
        }
        acc as u32
    }

    /// Uniform residue in `[0, q)` by rejection against the largest multiple
    /// of `q` below `2^32`, so no draw is biased.
    pub fn sample(&self, rng: &mut dyn RngCore) -> u32 {
        let q = self.q as u64;
        let zone = (1u64 << 32) / q * q;
        loop {
            let x = rng.next_u32() as u64;
            if x < zone {
                return (x % q) as u32;
            }
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// An element of `F_{q^r}`: exactly `r` residues in `[0, q)`, low degree
/// first, relative to the modulus variable `ᾱ` of the owning [`ExtField`].
///
/// The derived ordering is lexicographic on the coefficient tuple with the
/// constant term most significant; it is the order used when the library
/// speaks of the "smallest" element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElem {
    coeffs: Vec<u32>,
}

impl FieldElem {
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Canonical text form: residues joined by commas, low degree first.
    pub fn to_text(&self) -> String {
        self.coeffs
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// The extension field `F_{q^r} = F_q[x]/(modulus)` together with the
/// precomputed `r x r` matrices over `F_q` of `σ^0, …, σ^{r-1}`.
#[derive(Debug, Clone)]
pub struct ExtField {
    base: PrimeField,
    r: usize,
    /// Monic modulus, `r + 1` coefficients low-to-high; last entry is 1.
    modulus: Vec<u32>,
    /// `frob[i]` is the row-major `r x r` matrix of `σ^i` in the polynomial
    /// basis: `coeffs(σ^i(x)) = frob[i] · coeffs(x)`.
    frob: Vec<Vec<u32>>,
}

impl PartialEq for ExtField {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.r == other.r && self.modulus == other.modulus
    }
}

impl Eq for ExtField {}

impl ExtField {
    /// Builds `F_{q^r}`. When `modulus` is `None`, picks the lexicographically
    /// smallest monic irreducible of degree `r` (constant term most
    /// significant in the comparison), found by exhaustive search with a full
    /// trial-division irreducibility test.
    pub fn new(base: PrimeField, r: usize, modulus: Option<Vec<u32>>) -> Result<Self, GaloisError> {
        assert!(r >= 1, "extension degree must be at least 1");
        let q = base.q();
        let modulus = match modulus {
            Some(m) => {
                if m.len() != r + 1 {
                    return Err(GaloisError::BadModulus(format!(
                        "expected {} coefficients, got {}",
                        r + 1,
                        m.len()
                    )));
                }
                if m[r] != 1 {
                    return Err(GaloisError::BadModulus("modulus must be monic".into()));
                }
                if m.iter().any(|&c| c >= q) {
                    return Err(GaloisError::BadModulus(format!(
                        "coefficients must lie in [0, {q})"
                    )));
                }
                if !poly_is_irreducible(&base, &m) {
                    return Err(GaloisError::NotIrreducible(q));
                }
                m
            }
            None => smallest_irreducible(&base, r),
        };
        let mut field = ExtField {
            base,
            r,
            modulus,
            frob: Vec::new(),
        };
        field.frob = field.frobenius_tables();
        Ok(field)
    }

    pub fn base(&self) -> PrimeField {
        self.base
    }

    pub fn q(&self) -> u32 {
        self.base.q()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// `q^r`, the number of elements.
    pub fn cardinality(&self) -> u64 {
        (self.q() as u64).pow(self.r as u32)
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem {
            coeffs: vec![0; self.r],
        }
    }

    pub fn one(&self) -> FieldElem {
        self.embed(1)
    }

    /// Embeds a base-field residue as a constant of the extension.
    pub fn embed(&self, c: u32) -> FieldElem {
        assert!(c < self.q());
        let mut coeffs = vec![0; self.r];
        coeffs[0] = c;
        FieldElem { coeffs }
    }

    /// True when the element lies in the embedded prime subfield (all
    /// coefficients beyond the constant term vanish).
    pub fn in_prime_subfield(&self, x: &FieldElem) -> bool {
        x.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// Builds an element from residues, validating length and ranges.
    pub fn elem(&self, coeffs: Vec<u32>) -> Result<FieldElem, GaloisError> {
        if coeffs.len() != self.r || coeffs.iter().any(|&c| c >= self.q()) {
            return Err(GaloisError::BadElement(format!("{coeffs:?}")));
        }
        Ok(FieldElem { coeffs })
    }

    /// Element at position `index` in the coefficient-lexicographic order
    /// (constant term most significant). `index < q^r`.
    pub fn elem_at(&self, index: u64) -> FieldElem {
        let q = self.q() as u64;
        assert!(index < self.cardinality());
        let mut coeffs = vec![0u32; self.r];
        let mut n = index;
        for i in (0..self.r).rev() {
            coeffs[i] = (n % q) as u32;
            n /= q;
        }
        FieldElem { coeffs }
    }

    /// All `q^r` elements in coefficient-lexicographic order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.cardinality()).map(|n| self.elem_at(n))
    }

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| self.base.add(x, y))
            .collect();
        FieldElem { coeffs }
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| self.base.sub(x, y))
            .collect();
        FieldElem { coeffs }
    }

    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        let coeffs = a.coeffs.iter().map(|&x| self.base.neg(x)).collect();
        FieldElem { coeffs }
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let r = self.r;
        if r == 1 {
            return FieldElem {
                coeffs: vec![self.base.mul(a.coeffs[0], b.coeffs[0])],
            };
        }
        let mut prod = vec![0u32; 2 * r - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] = self.base.add(prod[i + j], self.base.mul(x, y));
            }
        }
        self.reduce(&mut prod);
        prod.truncate(r);
        FieldElem { coeffs: prod }
    }

    /// Scales by a base-field residue.
    pub fn scale(&self, c: u32, a: &FieldElem) -> FieldElem {
        let coeffs = a.coeffs.iter().map(|&x| self.base.mul(c, x)).collect();
        FieldElem { coeffs }
    }

    pub fn pow(&self, a: &FieldElem, mut e: u64) -> FieldElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, `None` for zero. Computed as `a^(q^r - 2)`.
    pub fn inv(&self, a: &FieldElem) -> Option<FieldElem> {
        if a.is_zero() {
            return None;
        }
        Some(self.pow(a, self.cardinality() - 2))
    }

    /// Reduces a coefficient vector of length >= r in place modulo the monic
    /// modulus; afterwards only the first `r` entries are meaningful.
    fn reduce(&self, coeffs: &mut [u32]) {
        let r = self.r;
        for i in (r..coeffs.len()).rev() {
            let c = coeffs[i];
            if c == 0 {
                continue;
            }
            coeffs[i] = 0;
            for j in 0..r {
                let t = self.base.mul(c, self.modulus[j]);
                coeffs[i - r + j] = self.base.sub(coeffs[i - r + j], t);
            }
        }
    }

    /// `σ^i(x) = x^(q^i)`, applied through the precomputed matrix of
    /// `σ^(i mod r)`.
    pub fn frobenius_pow(&self, x: &FieldElem, i: usize) -> FieldElem {
        let mat = &self.frob[i % self.r];
        let r = self.r;
        let mut out = vec![0u32; r];
        for (row, item) in out.iter_mut().enumerate() {
            let mut acc = 0u32;
            for col in 0..r {
                acc = self
                    .base
                    .add(acc, self.base.mul(mat[row * r + col], x.coeffs[col]));
            }
            *item = acc;
        }
        FieldElem { coeffs: out }
    }

    /// `σ(x) = x^q`.
    pub fn frobenius(&self, x: &FieldElem) -> FieldElem {
        self.frobenius_pow(x, 1)
    }

    /// Matrices of `σ^0 … σ^(r-1)` in the polynomial basis, each row-major.
    fn frobenius_tables(&self) -> Vec<Vec<u32>> {
        let r = self.r;
        // Column j of the σ matrix holds the coordinates of (ᾱ^j)^q.
        let mut sigma = vec![0u32; r * r];
        for j in 0..r {
            let mut alpha_j = self.zero();
            alpha_j.coeffs[j] = 1;
            let image = self.pow(&alpha_j, self.q() as u64);
            for i in 0..r {
                sigma[i * r + j] = image.coeffs[i];
            }
        }
        let mut tables = Vec::with_capacity(r);
        let mut ident = vec![0u32; r * r];
        for i in 0..r {
            ident[i * r + i] = 1;
        }
        tables.push(ident);
        for i in 1..r {
            let prev = &tables[i - 1];
            let mut next = vec![0u32; r * r];
            for row in 0..r {
                for col in 0..r {
                    let mut acc = 0u32;
                    for m in 0..r {
                        acc = self
                            .base
                            .add(acc, self.base.mul(sigma[row * r + m], prev[m * r + col]));
                    }
                    next[row * r + col] = acc;
                }
            }
            tables.push(next);
        }
        tables
    }

    /// The smallest element (coefficient-lexicographic order) of
    /// multiplicative order `q^r - 1`. The order test checks
    /// `x^((q^r-1)/p) != 1` for every prime `p` dividing `q^r - 1`.
    pub fn find_primitive(&self) -> FieldElem {
        let order = self.cardinality() - 1;
        if order == 1 {
            return self.one();
        }
        let prime_divisors = prime_factors(order);
        for n in 1..self.cardinality() {
            let x = self.elem_at(n);
            let primitive = prime_divisors
                .iter()
                .all(|&p| self.pow(&x, order / p) != self.one());
            if primitive {
                return x;
            }
        }
        unreachable!("every finite field has a primitive element");
    }

    /// Uniform element: `r` independent uniform residues.
    pub fn sample(&self, rng: &mut dyn RngCore) -> FieldElem {
        let coeffs = (0..self.r).map(|_| self.base.sample(rng)).collect();
        FieldElem { coeffs }
    }

    /// The polynomial basis `(1, ᾱ, …, ᾱ^{r-1})`.
    pub fn polynomial_basis(&self) -> Basis {
        let elems = (0..self.r)
            .map(|i| {
                let mut e = self.zero();
                e.coeffs[i] = 1;
                e
            })
            .collect();
        Basis::new(self, elems).expect("polynomial basis is always a basis")
    }

    pub fn parse_elem(&self, s: &str) -> Result<FieldElem, GaloisError> {
        let coeffs: Result<Vec<u32>, _> = s.trim().split(',').map(|p| p.trim().parse()).collect();
        let coeffs = coeffs.map_err(|_| GaloisError::BadElement(s.to_string()))?;
        self.elem(coeffs)
    }

    /// Field descriptor: `q=`, `r=`, `modulus=` lines.
    pub fn to_text(&self) -> String {
        format!(
            "q={}\nr={}\nmodulus={}\n",
            self.q(),
            self.r,
            self.modulus
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
    }

    /// Parses the three descriptor lines produced by [`ExtField::to_text`].
    pub fn parse_text(text: &str) -> Result<Self, GaloisError> {
        let mut q = None;
        let mut r = None;
        let mut modulus = None;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| GaloisError::BadDescriptor(line.to_string()))?;
            match key.trim() {
                "q" => {
                    q = Some(
                        value
                            .trim()
                            .parse::<u64>()
                            .map_err(|_| GaloisError::BadDescriptor(line.to_string()))?,
                    )
                }
                "r" => {
                    r = Some(
                        value
                            .trim()
                            .parse::<usize>()
                            .map_err(|_| GaloisError::BadDescriptor(line.to_string()))?,
                    )
                }
                "modulus" => {
                    let coeffs: Result<Vec<u32>, _> =
                        value.trim().split(',').map(|p| p.trim().parse()).collect();
                    modulus =
                        Some(coeffs.map_err(|_| GaloisError::BadDescriptor(line.to_string()))?);
                }
                _ => return Err(GaloisError::BadDescriptor(line.to_string())),
            }
        }
        let q = q.ok_or_else(|| GaloisError::BadDescriptor("missing q=".into()))?;
        let r = r.ok_or_else(|| GaloisError::BadDescriptor("missing r=".into()))?;
        let base = PrimeField::new(q)?;
        ExtField::new(base, r, modulus)
    }
}

/// An ordered basis `(β_1, …, β_r)` of `F_{q^r}` over `F_q`, with the inverse
/// of its coordinate matrix precomputed so that [`Basis::decompose`] is a
/// single matrix application.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    elems: Vec<FieldElem>,
    /// Row-major r x r inverse over F_q of the matrix whose column i holds
    /// the polynomial-basis coordinates of β_{i+1}.
    inv: Vec<u32>,
}

impl Basis {
    /// Validates that the elements are `r` in number and linearly independent
    /// over `F_q`.
    pub fn new(field: &ExtField, elems: Vec<FieldElem>) -> Result<Self, GaloisError> {
        let r = field.r();
        if elems.len() != r || elems.iter().any(|e| e.coeffs.len() != r) {
            return Err(GaloisError::NotABasis);
        }
        let mut mat = vec![0u32; r * r];
        for (col, e) in elems.iter().enumerate() {
            for row in 0..r {
                mat[row * r + col] = e.coeffs[row];
            }
        }
        let inv = invert_fq_matrix(&field.base(), &mat, r).ok_or(GaloisError::NotABasis)?;
        Ok(Basis { elems, inv })
    }

    pub fn elems(&self) -> &[FieldElem] {
        &self.elems
    }

    pub fn r(&self) -> usize {
        self.elems.len()
    }

    /// The unique `(c_1, …, c_r)` over `F_q` with `x = Σ c_i β_i`.
    pub fn decompose(&self, field: &ExtField, x: &FieldElem) -> Vec<u32> {
        let r = self.r();
        let base = field.base();
        let mut out = vec![0u32; r];
        for (row, item) in out.iter_mut().enumerate() {
            let mut acc = 0u32;
            for col in 0..r {
                acc = base.add(acc, base.mul(self.inv[row * r + col], x.coeffs()[col]));
            }
            *item = acc;
        }
        out
    }

    /// Reassembles `Σ c_i β_i`; inverse of [`Basis::decompose`].
    pub fn compose(&self, field: &ExtField, coords: &[u32]) -> FieldElem {
        assert_eq!(coords.len(), self.r());
        let mut acc = field.zero();
        for (c, beta) in coords.iter().zip(&self.elems) {
            acc = field.add(&acc, &field.scale(*c, beta));
        }
        acc
    }

    pub fn to_text(&self) -> String {
        self.elems
            .iter()
            .map(|e| e.to_text())
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn parse_text(field: &ExtField, s: &str) -> Result<Self, GaloisError> {
        let elems: Result<Vec<FieldElem>, _> =
            s.trim().split(';').map(|p| field.parse_elem(p)).collect();
        Basis::new(field, elems?)
    }
}

/// Gauss-Jordan inverse of a row-major `n x n` matrix over `F_q`;
/// `None` when singular.
fn invert_fq_matrix(base: &PrimeField, mat: &[u32], n: usize) -> Option<Vec<u32>> {
    let mut a = mat.to_vec();
    let mut inv = vec![0u32; n * n];
    for i in 0..n {
        inv[i * n + i] = 1;
    }
    for col in 0..n {
        let pivot = (col..n).find(|&row| a[row * n + col] != 0)?;
        if pivot != col {
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
                inv.swap(col * n + j, pivot * n + j);
            }
        }
        let p = base.inv(a[col * n + col]).expect("pivot is nonzero");
        for j in 0..n {
            a[col * n + j] = base.mul(a[col * n + j], p);
            inv[col * n + j] = base.mul(inv[col * n + j], p);
        }
        for row in 0..n {
            if row == col || a[row * n + col] == 0 {
                continue;
            }
            let f = a[row * n + col];
            for j in 0..n {
                let t = base.mul(f, a[col * n + j]);
                a[row * n + j] = base.sub(a[row * n + j], t);
                let t = base.mul(f, inv[col * n + j]);
                inv[row * n + j] = base.sub(inv[row * n + j], t);
            }
        }
    }
    Some(inv)
}

// Polynomial helpers over F_q (coefficient vectors, low degree first).

fn poly_trim(p: &mut Vec<u32>) {
    while p.len() > 1 && *p.last().unwrap() == 0 {
        p.pop();
    }
}

fn poly_rem(base: &PrimeField, num: &[u32], den: &[u32]) -> Vec<u32> {
    let mut rem = num.to_vec();
    poly_trim(&mut rem);
    let dd = den.len() - 1;
    let lead_inv = base.inv(den[dd]).expect("divisor has nonzero lead");
    while rem.len() > dd && !(rem.len() == 1 && rem[0] == 0) {
        let shift = rem.len() - 1 - dd;
        let f = base.mul(*rem.last().unwrap(), lead_inv);
        for (i, &dc) in den.iter().enumerate() {
            let t = base.mul(f, dc);
            rem[shift + i] = base.sub(rem[shift + i], t);
        }
        poly_trim(&mut rem);
    }
    rem
}

fn poly_is_zero(p: &[u32]) -> bool {
    p.iter().all(|&c| c == 0)
}

/// Full irreducibility test by trial division: a monic polynomial of degree
/// `r` is reducible iff some monic polynomial of degree in `1..=r/2` divides
/// it.
fn poly_is_irreducible(base: &PrimeField, poly: &[u32]) -> bool {
    let r = poly.len() - 1;
    if r == 0 {
        return false;
    }
    if r == 1 {
        return true;
    }
    let q = base.q() as u64;
    for d in 1..=r / 2 {
        let count = q.pow(d as u32);
        for n in 0..count {
            let mut div = vec![0u32; d + 1];
            let mut m = n;
            for c in div.iter_mut().take(d) {
                *c = (m % q) as u32;
                m /= q;
            }
            div[d] = 1;
            if poly_is_zero(&poly_rem(base, poly, &div)) {
                return false;
            }
        }
    }
    true
}

/// Lexicographically smallest monic irreducible of degree `r`: candidates are
/// enumerated by the tuple `(c_0, …, c_{r-1})` with the constant term most
/// significant.
fn smallest_irreducible(base: &PrimeField, r: usize) -> Vec<u32> {
    let q = base.q() as u64;
    let count = q.pow(r as u32);
    for n in 0..count {
        let mut cand = vec![0u32; r + 1];
        let mut m = n;
        for i in (0..r).rev() {
            cand[i] = (m % q) as u32;
            m /= q;
        }
        cand[r] = 1;
        if poly_is_irreducible(base, &cand) {
            return cand;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_q");
}

/// Prime factorization by trial division; inputs stay well under 2^20 here.
pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_core::SeedableRng;

    fn f25() -> ExtField {
        ExtField::new(PrimeField::new(5).unwrap(), 2, None).unwrap()
    }

    #[test]
    fn prime_field_construction() {
        assert!(PrimeField::new(5).is_ok());
        assert_eq!(PrimeField::new(4), Err(GaloisError::NotPrime(4)));
        assert!(PrimeField::new(2).is_ok());
        assert_eq!(PrimeField::new(1), Err(GaloisError::NotPrime(1)));
    }

    #[test]
    fn trivial_extension_is_base_field() {
        let f = ExtField::new(PrimeField::new(5).unwrap(), 1, None).unwrap();
        assert_eq!(f.cardinality(), 5);
        // Frobenius is the identity on F_q.
        for n in 0..5 {
            let x = f.elem_at(n);
            assert_eq!(f.frobenius(&x), x);
        }
    }

    #[test]
    fn default_modulus_is_lex_smallest_irreducible() {
        // Independent oracle: enumerate all 25 monic quadratics over F_5 in
        // the same order and take the first with no roots (a complete test
        // for degree 2).
        let mut expected = None;
        'outer: for c0 in 0..5u32 {
            for c1 in 0..5u32 {
                let has_root = (0..5u32).any(|x| (c0 + c1 * x + x * x) % 5 == 0);
                if !has_root {
                    expected = Some(vec![c0, c1, 1]);
                    break 'outer;
                }
            }
        }
        let f = f25();
        assert_eq!(f.modulus(), expected.unwrap().as_slice());
        assert_eq!(f.modulus(), &[1, 1, 1]); // x^2 + x + 1
    }

    #[test]
    fn reducible_modulus_rejected() {
        // x^3 + x^2 + x is divisible by x.
        let base = PrimeField::new(2).unwrap();
        let err = ExtField::new(base, 3, Some(vec![0, 1, 1, 1])).unwrap_err();
        assert_eq!(err, GaloisError::NotIrreducible(2));
    }

    #[test]
    fn irreducibility_needs_more_than_roots() {
        // x^4 + x^2 + 1 = (x^2 + x + 1)^2 over F_2 is rootless but reducible.
        let base = PrimeField::new(2).unwrap();
        let err = ExtField::new(base, 4, Some(vec![1, 0, 1, 0, 1])).unwrap_err();
        assert_eq!(err, GaloisError::NotIrreducible(2));
    }

    #[test]
    fn frobenius_is_exponentiation() {
        let f = f25();
        for n in 0..f.cardinality() {
            let x = f.elem_at(n);
            assert_eq!(f.frobenius(&x), f.pow(&x, 5));
            assert_eq!(f.frobenius_pow(&x, 2), x); // σ^r = id
            assert_eq!(f.frobenius_pow(&x, 2), f.pow(&f.pow(&x, 5), 5));
        }
    }

    #[test]
    fn frobenius_fixes_exactly_the_prime_subfield() {
        // Exhaustive over every field with q^r <= 4096 that the grid uses.
        for (q, r) in [(5u64, 2usize), (2, 5), (3, 4), (7, 3), (5, 4)] {
            let f = ExtField::new(PrimeField::new(q).unwrap(), r, None).unwrap();
            assert!(f.cardinality() <= 4096);
            for n in 0..f.cardinality() {
                let x = f.elem_at(n);
                let fixed = f.frobenius(&x) == x;
                assert_eq!(fixed, f.in_prime_subfield(&x), "x = {x} in q={q}, r={r}");
            }
        }
    }

    #[test]
    fn frobenius_is_an_automorphism() {
        let f = ExtField::new(PrimeField::new(7).unwrap(), 2, None).unwrap();
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let x = f.sample(&mut rng);
            let y = f.sample(&mut rng);
            assert_eq!(
                f.frobenius(&f.mul(&x, &y)),
                f.mul(&f.frobenius(&x), &f.frobenius(&y))
            );
            assert_eq!(
                f.frobenius(&f.add(&x, &y)),
                f.add(&f.frobenius(&x), &f.frobenius(&y))
            );
        }
    }

    #[test]
    fn field_axioms_random() {
        let f = f25();
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(1);
        for _ in 0..500 {
            let a = f.sample(&mut rng);
            let b = f.sample(&mut rng);
            let c = f.sample(&mut rng);
            assert_eq!(f.mul(&a, &f.mul(&b, &c)), f.mul(&f.mul(&a, &b), &c));
            assert_eq!(
                f.mul(&a, &f.add(&b, &c)),
                f.add(&f.mul(&a, &b), &f.mul(&a, &c))
            );
            if !a.is_zero() {
                let inv = f.inv(&a).unwrap();
                assert_eq!(f.mul(&a, &inv), f.one());
            }
        }
    }

    #[test]
    fn primitive_elements() {
        let f2 = ExtField::new(PrimeField::new(2).unwrap(), 1, None).unwrap();
        assert_eq!(f2.find_primitive(), f2.one());

        let f5 = ExtField::new(PrimeField::new(5).unwrap(), 1, None).unwrap();
        // Oracle: powers of 2 mod 5 are 2, 4, 3, 1 -> order 4.
        assert_eq!(f5.find_primitive(), f5.embed(2));

        // F_4: anything outside {0, 1} generates the order-3 group; the
        // lexicographically smallest such element is ᾱ = (0, 1).
        let f4 = ExtField::new(PrimeField::new(2).unwrap(), 2, None).unwrap();
        assert_eq!(f4.find_primitive(), f4.elem(vec![0, 1]).unwrap());
    }

    #[test]
    fn primitive_order_is_exact_by_exhaustion() {
        for (q, r) in [(5u64, 2usize), (7, 2), (3, 3)] {
            let f = ExtField::new(PrimeField::new(q).unwrap(), r, None).unwrap();
            let gamma = f.find_primitive();
            // Exhaustive oracle: walk all powers and find the true order.
            let mut x = gamma.clone();
            let mut order = 1u64;
            while x != f.one() {
                x = f.mul(&x, &gamma);
                order += 1;
            }
            assert_eq!(order, f.cardinality() - 1);
        }
    }

    #[test]
    fn decompose_and_compose_roundtrip() {
        let f = f25();
        let beta = f.polynomial_basis();
        // x = β_1 -> (1, 0); x = 0 -> (0, 0).
        assert_eq!(beta.decompose(&f, &f.one()), vec![1, 0]);
        assert_eq!(beta.decompose(&f, &f.zero()), vec![0, 0]);
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(3);
        for _ in 0..200 {
            let x = f.sample(&mut rng);
            assert_eq!(beta.compose(&f, &beta.decompose(&f, &x)), x);
        }
    }

    #[test]
    fn decompose_nontrivial_basis() {
        let f = f25();
        // β = (1 + ᾱ, 2ᾱ): independent since det [[1,0],[1,2]] = 2 != 0.
        let beta = Basis::new(
            &f,
            vec![f.elem(vec![1, 1]).unwrap(), f.elem(vec![0, 2]).unwrap()],
        )
        .unwrap();
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(4);
        for _ in 0..200 {
            let x = f.sample(&mut rng);
            let c = beta.decompose(&f, &x);
            // Oracle: recombine through field arithmetic directly.
            let recombined = f.add(
                &f.scale(c[0], &beta.elems()[0]),
                &f.scale(c[1], &beta.elems()[1]),
            );
            assert_eq!(recombined, x);
        }
    }

    #[test]
    fn decompose_is_linear() {
        let f = f25();
        let beta = f.polynomial_basis();
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(5);
        for _ in 0..200 {
            let x = f.sample(&mut rng);
            let y = f.sample(&mut rng);
            let a = f.base().sample(&mut rng);
            let lhs = beta.decompose(&f, &f.add(&f.scale(a, &x), &y));
            let rhs: Vec<u32> = beta
                .decompose(&f, &x)
                .iter()
                .zip(beta.decompose(&f, &y))
                .map(|(&cx, cy)| f.base().add(f.base().mul(a, cx), cy))
                .collect();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn dependent_elements_rejected() {
        let f = f25();
        let err = Basis::new(&f, vec![f.one(), f.embed(2)]).unwrap_err();
        assert_eq!(err, GaloisError::NotABasis);
    }

    #[test]
    fn descriptor_roundtrip() {
        let f = ExtField::new(PrimeField::new(7).unwrap(), 3, None).unwrap();
        let text = f.to_text();
        let parsed = ExtField::parse_text(&text).unwrap();
        assert_eq!(parsed, f);
        assert!(text.starts_with("q=7\nr=3\nmodulus="));
    }

    #[test]
    fn element_text_is_canonical() {
        let f = f25();
        let x = f.elem(vec![3, 1]).unwrap();
        assert_eq!(x.to_text(), "3,1");
        assert_eq!(f.parse_elem("3,1").unwrap(), x);
        assert!(f.parse_elem("5,0").is_err());
        assert!(f.parse_elem("1").is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_roughly_uniform() {
        let f = f25();
        let mut a = rand_chacha::ChaCha20Rng::seed_from_u64(42);
        let mut b = rand_chacha::ChaCha20Rng::seed_from_u64(42);
        for _ in 0..100 {
            assert_eq!(f.sample(&mut a), f.sample(&mut b));
        }
        // Coarse uniformity: 10_000 draws over 25 cells, expect 400 per cell.
        let mut counts = [0u32; 25];
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(9);
        for _ in 0..10_000 {
            let x = f.sample(&mut rng);
            counts[(x.coeffs()[0] * 5 + x.coeffs()[1]) as usize] += 1;
        }
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - 400.0;
                d * d / 400.0
            })
            .sum();
        // 24 degrees of freedom; the 99.9th percentile is about 51.2.
        assert!(chi2 < 52.0, "chi2 = {chi2}");
    }
}
