//! Command-line front end: builds storage codes from flat config files,
//! encodes file sets into database dumps, repairs erased columns, runs
//! retrieval sessions, and executes the exhaustive auditors.
//!
//! Config files are lower-case `key=value` lines with `#` comments. Every
//! audit prints a line-oriented `CHECK <name> PASS|FAIL [witness]` stream
//! suitable for golden-file testing, preceded by the resolved protocol
//! parameters. Exit codes: 0 success (all checks pass), 1 domain error or
//! failed check, 2 usage error.

use std::io::Write;

use rand_core::SeedableRng;

use crate::codes::LrsCode;
use crate::galois::{Basis, ExtField, FieldElem, PrimeField};
use crate::linalg::Matrix;
use crate::mrlrc::{LocalCode, MrLrc};
use crate::pir::{derive_params, rate, PirScheme};
use crate::products::{
    cw_product, inner_product, star, star_via_matrices, BlockVector,
};
use crate::skew::{random_skew, total_eval};
use crate::storesim::{run_retrieval, Database, FileSet};

/// Environment variable consulted for a default seed when neither the
/// `--seed` flag nor the config provides one.
pub const SEED_ENV: &str = "LRSPIR_SEED";

const DEFAULT_AUDIT_BUDGET: u64 = 1_000_000;
const DISTRIBUTION_CAP: u128 = 1 << 16;

enum CliError {
    Usage(String),
    Domain(String),
}

impl CliError {
    fn domain(module: &str, e: impl std::fmt::Display) -> Self {
        CliError::Domain(format!("{module}: {e}"))
    }

    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

/// Runtime configuration: the construction and protocol parameters plus
/// optional overrides for the modulus, primitive element, basis, and the
/// local generator.
#[derive(Debug, Clone, Default)]
pub struct Config {
    pub q: u64,
    pub r: usize,
    pub delta: usize,
    pub g: usize,
    pub k: usize,
    pub t: usize,
    pub m: usize,
    pub seed: Option<u64>,
    pub modulus: Option<Vec<u32>>,
    pub gamma: Option<String>,
    pub basis: Option<String>,
    pub local_generator: Option<String>,
}

impl Config {
    /// Parses `key=value` lines; `#` starts a comment. All of
    /// `q, r, delta, g, k, t, m` are required.
    pub fn parse_text(text: &str) -> Result<Self, String> {
        let mut cfg = Config::default();
        let mut seen = std::collections::BTreeSet::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got `{line}`"))?;
            let key = key.trim();
            let value = value.trim();
            if !seen.insert(key.to_string()) {
                return Err(format!("duplicate key `{key}`"));
            }
            let int = || value.parse::<usize>().map_err(|_| format!("bad integer in `{line}`"));
            match key {
                "q" => cfg.q = value.parse().map_err(|_| format!("bad integer in `{line}`"))?,
                "r" => cfg.r = int()?,
                "delta" => cfg.delta = int()?,
                "g" => cfg.g = int()?,
                "k" => cfg.k = int()?,
                "t" => cfg.t = int()?,
                "m" => cfg.m = int()?,
                "seed" => {
                    cfg.seed =
                        Some(value.parse().map_err(|_| format!("bad integer in `{line}`"))?)
                }
                "modulus" => {
                    let coeffs: Result<Vec<u32>, _> =
                        value.split(',').map(|p| p.trim().parse()).collect();
                    cfg.modulus = Some(coeffs.map_err(|_| format!("bad modulus in `{line}`"))?);
                }
                "gamma" => cfg.gamma = Some(value.to_string()),
                "basis" => cfg.basis = Some(value.to_string()),
                "local_generator" => cfg.local_generator = Some(value.to_string()),
                _ => return Err(format!("unknown key `{key}`")),
            }
        }
        for (name, v) in [
            ("q", cfg.q as usize),
            ("r", cfg.r),
            ("delta", cfg.delta),
            ("g", cfg.g),
            ("k", cfg.k),
            ("t", cfg.t),
            ("m", cfg.m),
        ] {
            if v == 0 {
                return Err(format!("missing or zero `{name}`"));
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &str) -> Result<Self, String> {
        let text =
            std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
        Self::parse_text(&text)
    }

    /// Builds the field with the configured or default modulus.
    pub fn field(&self) -> Result<ExtField, String> {
        let base = PrimeField::new(self.q).map_err(|e| e.to_string())?;
        ExtField::new(base, self.r, self.modulus.clone()).map_err(|e| e.to_string())
    }

    /// Builds the storage code, honoring every override.
    pub fn build_code(&self) -> Result<MrLrc, String> {
        let field = self.field()?;
        let gamma = self
            .gamma
            .as_ref()
            .map(|s| field.parse_elem(s))
            .transpose()
            .map_err(|e| e.to_string())?;
        let basis = self
            .basis
            .as_ref()
            .map(|s| Basis::parse_text(&field, s))
            .transpose()
            .map_err(|e| e.to_string())?;
        let outer =
            LrsCode::new(field.clone(), self.g, self.k, gamma, basis).map_err(|e| e.to_string())?;
        let local = match &self.local_generator {
            None => LocalCode::new(&field, self.r, self.delta).map_err(|e| e.to_string())?,
            Some(text) => {
                let rows: Result<Vec<Vec<FieldElem>>, String> = text
                    .split(';')
                    .map(|row| {
                        row.split_whitespace()
                            .map(|e| field.parse_elem(e).map_err(|e| e.to_string()))
                            .collect()
                    })
                    .collect();
                let rows = rows?;
                let cols = rows.first().map_or(0, |r| r.len());
                if rows.iter().any(|r| r.len() != cols) {
                    return Err("ragged local_generator".into());
                }
                let gen = Matrix::from_rows(field.clone(), rows);
                LocalCode::from_generator(&field, self.r, self.delta, gen)
                    .map_err(|e| e.to_string())?
            }
        };
        MrLrc::assemble(outer, local).map_err(|e| e.to_string())
    }

    /// Builds the retrieval scheme over the configured code.
    pub fn scheme(&self, code: &MrLrc) -> Result<PirScheme, String> {
        PirScheme::new(code.outer(), self.t, self.m).map_err(|e| e.to_string())
    }

    /// Seed resolution order: `--seed` flag, config `seed=`, the
    /// environment variable, then 0.
    pub fn resolve_seed(&self, flag: Option<u64>) -> u64 {
        flag.or(self.seed)
            .or_else(|| std::env::var(SEED_ENV).ok().and_then(|s| s.parse().ok()))
            .unwrap_or(0)
    }
}

/// Runs a command line and writes reports to `out`. Returns the process
/// exit code.
pub fn dispatch_with(args: &[String], out: &mut dyn Write) -> i32 {
    match run(args, out) {
        Ok(code) => code,
        Err(e) => {
            match &e {
                CliError::Usage(msg) => eprintln!("usage error: {msg}"),
                CliError::Domain(msg) => eprintln!("error: {msg}"),
            }
            e.exit_code()
        }
    }
}

/// [`dispatch_with`] against stdout.
pub fn dispatch(args: &[String]) -> i32 {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    dispatch_with(args, &mut lock)
}

const USAGE: &str = "usage: lrspir <command> [options]

commands:
  build     --config <file> [--out <file>]
  encode    --config <file> --files <file> [--out <file>]
  repair    --db <file> --erase <cols> [--out <file>]
  retrieve  --db <file> --config <file> --file <i> [--seed <n>]
            [--out <file>] [--transcript <file>]
  audit     mr|privacy|products|reductions --config <file>
  rate      --config <file>";

fn run(args: &[String], out: &mut dyn Write) -> Result<i32, CliError> {
    let Some(command) = args.first() else {
        return Err(CliError::Usage(USAGE.into()));
    };
    match command.as_str() {
        "build" => cmd_build(&args[1..], out),
        "encode" => cmd_encode(&args[1..], out),
        "repair" => cmd_repair(&args[1..], out),
        "retrieve" => cmd_retrieve(&args[1..], out),
        "audit" => cmd_audit(&args[1..], out),
        "rate" => cmd_rate(&args[1..], out),
        other => Err(CliError::Usage(format!(
            "unknown command `{other}`\n{USAGE}"
        ))),
    }
}

/// Minimal flag parser: every option takes a value; leftover positionals
/// are returned in order.
fn parse_flags(args: &[String]) -> Result<(std::collections::BTreeMap<String, String>, Vec<String>), CliError> {
    let mut flags = std::collections::BTreeMap::new();
    let mut positional = Vec::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if let Some(name) = a.strip_prefix("--") {
            let value = it
                .next()
                .ok_or_else(|| CliError::Usage(format!("flag --{name} needs a value")))?;
            flags.insert(name.to_string(), value.clone());
        } else {
            positional.push(a.clone());
        }
    }
    Ok((flags, positional))
}

fn required<'a>(
    flags: &'a std::collections::BTreeMap<String, String>,
    name: &str,
) -> Result<&'a str, CliError> {
    flags
        .get(name)
        .map(|s| s.as_str())
        .ok_or_else(|| CliError::Usage(format!("missing required flag --{name}")))
}

fn load_config(flags: &std::collections::BTreeMap<String, String>) -> Result<Config, CliError> {
    Config::load(required(flags, "config")?).map_err(CliError::Usage)
}

fn emit(out: &mut dyn Write, path: Option<&String>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| CliError::Domain(format!("cannot write {p}: {e}"))),
        None => {
            out.write_all(content.as_bytes())
                .map_err(|e| CliError::Domain(e.to_string()))
        }
    }
}

fn params_header(cfg: &Config, out: &mut dyn Write) -> Result<(), CliError> {
    let params = derive_params(cfg.g, cfg.r, cfg.q as u32, cfg.k, cfg.t, cfg.m)
        .map_err(|e| CliError::domain("pir", e))?;
    out.write_all(params.header_text().as_bytes())
        .map_err(|e| CliError::Domain(e.to_string()))?;
    Ok(())
}

fn cmd_build(args: &[String], out: &mut dyn Write) -> Result<i32, CliError> {
    let (flags, _) = parse_flags(args)?;
    let cfg = load_config(&flags)?;
    let code = cfg.build_code().map_err(|e| CliError::domain("mrlrc", e))?;
    emit(out, flags.get("out"), &code.to_text())?;
    Ok(0)
}

fn cmd_encode(args: &[String], out: &mut dyn Write) -> Result<i32, CliError> {
    let (flags, _) = parse_flags(args)?;
    let cfg = load_config(&flags)?;
    let code = cfg.build_code().map_err(|e| CliError::domain("mrlrc", e))?;
    let scheme = cfg.scheme(&code).map_err(|e| CliError::domain("pir", e))?;
    let files_path = required(&flags, "files")?;
    let files_text = std::fs::read_to_string(files_path)
        .map_err(|e| CliError::Domain(format!("cannot read {files_path}: {e}")))?;
    let files = FileSet::parse_text(code.field(), &files_text)
        .map_err(|e| CliError::domain("storesim", e))?;
    let p = scheme.params();
    if files.m() != p.m || files.b() != p.b || files.k() != p.k {
        return Err(CliError::Domain(format!(
            "storesim: files must be m={} matrices of {} x {}, got m={} of {} x {}",
            p.m,
            p.b,
            p.k,
            files.m(),
            files.b(),
            files.k()
        )));
    }
    let db = Database::init(code, &files).map_err(|e| CliError::domain("storesim", e))?;
    emit(out, flags.get("out"), &db.to_text())?;
    Ok(0)
}

fn cmd_repair(args: &[String], out: &mut dyn Write) -> Result<i32, CliError> {
    let (flags, _) = parse_flags(args)?;
    let db_path = required(&flags, "db")?;
    let db_text = std::fs::read_to_string(db_path)
        .map_err(|e| CliError::Domain(format!("cannot read {db_path}: {e}")))?;
    let db = Database::parse_text(&db_text).map_err(|e| CliError::domain("storesim", e))?;
    let erase = required(&flags, "erase")?;
    let cols: Result<Vec<usize>, _> = erase.split(',').map(|p| p.trim().parse::<usize>()).collect();
    let cols = cols.map_err(|_| CliError::Usage(format!("bad --erase list `{erase}`")))?;
    let code = db.code().clone();
    for &c in &cols {
        if c < 1 || c > code.n() {
            return Err(CliError::Usage(format!(
                "erased column {c} outside 1..={}",
                code.n()
            )));
        }
    }
    // A failed node erases its column from every stored row.
    let rows = db.b() * db.m();
    let mut repaired_rows: Vec<Vec<FieldElem>> = Vec::with_capacity(rows);
    for row_idx in 0..rows {
        let mut row: Vec<Option<FieldElem>> = Vec::with_capacity(code.n());
        for j in 0..code.g() {
            for v in db.server_share(j).row(row_idx) {
                row.push(Some(v.clone()));
            }
        }
        for &c in &cols {
            row[c - 1] = None;
        }
        repaired_rows.push(code.repair(&row).map_err(|e| CliError::domain("mrlrc", e))?);
    }
    // Rebuild the dump from the repaired rows.
    let field = code.field().clone();
    let full = Matrix::from_rows(field.clone(), repaired_rows);
    let mut text = code.to_text();
    text.push_str(&format!("m={}\nb={}\n", db.m(), db.b()));
    for j in 0..code.g() {
        let group: Vec<usize> = code.group_range(j).collect();
        text.push_str(&format!("server={}\n{}", j + 1, full.select_cols(&group).to_text()));
    }
    emit(out, flags.get("out"), &text)?;
    Ok(0)
}

fn cmd_retrieve(args: &[String], out: &mut dyn Write) -> Result<i32, CliError> {
    let (flags, _) = parse_flags(args)?;
    let cfg = load_config(&flags)?;
    let db_path = required(&flags, "db")?;
    let db_text = std::fs::read_to_string(db_path)
        .map_err(|e| CliError::Domain(format!("cannot read {db_path}: {e}")))?;
    let db = Database::parse_text(&db_text).map_err(|e| CliError::domain("storesim", e))?;
    let scheme = cfg
        .scheme(db.code())
        .map_err(|e| CliError::domain("pir", e))?;
    let file_arg = required(&flags, "file")?;
    let file_1based: usize = file_arg
        .parse()
        .map_err(|_| CliError::Usage(format!("bad --file `{file_arg}`")))?;
    if file_1based < 1 {
        return Err(CliError::Usage("--file is 1-based".into()));
    }
    let seed_flag = flags
        .get("seed")
        .map(|s| s.parse::<u64>().map_err(|_| CliError::Usage(format!("bad --seed `{s}`"))))
        .transpose()?;
    let seed = cfg.resolve_seed(seed_flag);
    let (file, transcript) = run_retrieval(&db, &scheme, file_1based - 1, seed)
        .map_err(|e| CliError::domain("storesim", e))?;
    emit(out, flags.get("out"), &file.to_text())?;
    if let Some(path) = flags.get("transcript") {
        std::fs::write(path, transcript.to_text())
            .map_err(|e| CliError::Domain(format!("cannot write {path}: {e}")))?;
    }
    Ok(0)
}

fn cmd_rate(args: &[String], out: &mut dyn Write) -> Result<i32, CliError> {
    let (flags, _) = parse_flags(args)?;
    let cfg = load_config(&flags)?;
    let params = derive_params(cfg.g, cfg.r, cfg.q as u32, cfg.k, cfg.t, cfg.m)
        .map_err(|e| CliError::domain("pir", e))?;
    let ratio = rate(&params);
    writeln!(out, "{ratio}").map_err(|e| CliError::Domain(e.to_string()))?;
    out.write_all(params.header_text().as_bytes())
        .map_err(|e| CliError::Domain(e.to_string()))?;
    Ok(0)
}

fn cmd_audit(args: &[String], out: &mut dyn Write) -> Result<i32, CliError> {
    let Some(kind) = args.first() else {
        return Err(CliError::Usage(
            "audit needs a kind: mr|privacy|products|reductions".into(),
        ));
    };
    let (flags, _) = parse_flags(&args[1..])?;
    let cfg = load_config(&flags)?;
    let mut all_pass = true;
    let mut check = |out: &mut dyn Write, name: &str, pass: bool, witness: Option<String>| {
        all_pass &= pass;
        let verdict = if pass { "PASS" } else { "FAIL" };
        let tail = witness.map(|w| format!(" {w}")).unwrap_or_default();
        writeln!(out, "CHECK {name} {verdict}{tail}").map_err(|e| CliError::Domain(e.to_string()))
    };
    params_header(&cfg, out)?;
    match kind.as_str() {
        "mr" => {
            let code = cfg.build_code().map_err(|e| CliError::domain("mrlrc", e))?;
            let audit = code
                .audit_mr(DEFAULT_AUDIT_BUDGET)
                .map_err(|e| CliError::domain("mrlrc", e))?;
            let witness = audit.witness.as_ref().map(|w| {
                format!(
                    "delta={:?} subset={:?}",
                    w.delta.iter().map(|p| p + 1).collect::<Vec<_>>(),
                    w.subset.iter().map(|p| p + 1).collect::<Vec<_>>()
                )
            });
            check(out, "mr_restrictions", audit.passed, witness)?;
        }
        "privacy" => {
            let code = cfg.build_code().map_err(|e| CliError::domain("mrlrc", e))?;
            let scheme = cfg.scheme(&code).map_err(|e| CliError::domain("pir", e))?;
            let report = scheme.audit_privacy();
            let failed: std::collections::BTreeSet<&Vec<usize>> =
                report.failures.iter().collect();
            for t_set in crate::linalg::combinations(cfg.g, cfg.t) {
                let name = format!(
                    "privacy_rank_T={}",
                    t_set
                        .iter()
                        .map(|j| (j + 1).to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                );
                check(out, &name, !failed.contains(&t_set), None)?;
            }
            // Exhaustive distribution comparison when the instance is tiny.
            match scheme.exhaustive_view_distribution(&[0], 0, 0, DISTRIBUTION_CAP) {
                Err(_) => {}
                Ok(_) => {
                    let mut identical = true;
                    for t_set in crate::linalg::combinations(cfg.g, cfg.t) {
                        for i in 1..cfg.m {
                            for u in 0..scheme.params().s {
                                let d0 = scheme
                                    .exhaustive_view_distribution(&t_set, 0, u, DISTRIBUTION_CAP)
                                    .map_err(|e| CliError::domain("pir", e))?;
                                let di = scheme
                                    .exhaustive_view_distribution(&t_set, i, u, DISTRIBUTION_CAP)
                                    .map_err(|e| CliError::domain("pir", e))?;
                                identical &= d0 == di;
                            }
                        }
                    }
                    check(out, "privacy_distribution", identical, None)?;
                }
            }
        }
        "products" => {
            let code = cfg.build_code().map_err(|e| CliError::domain("mrlrc", e))?;
            let field = code.field().clone();
            let basis = code.outer().basis().clone();
            let a_vec = code.outer().a_vec().to_vec();
            let r = cfg.r;
            let seed = cfg.resolve_seed(None);
            let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);

            let mut agree = true;
            for _ in 0..1000 {
                let x: Vec<FieldElem> = (0..r).map(|_| field.sample(&mut rng)).collect();
                let y: Vec<FieldElem> = (0..r).map(|_| field.sample(&mut rng)).collect();
                agree &= star(&field, &basis, &x, &y) == star_via_matrices(&field, &basis, &x, &y);
            }
            check(out, "star_route_agreement", agree, None)?;

            let mut morphism = true;
            for _ in 0..1000 {
                let p = random_skew(&field, cfg.k, &mut rng);
                let q = random_skew(&field, cfg.k, &mut rng);
                let lhs = total_eval(&field, &p.mul(&q, &field), &a_vec, &basis);
                let vp = BlockVector::from_flat(r, total_eval(&field, &p, &a_vec, &basis));
                let vq = BlockVector::from_flat(r, total_eval(&field, &q, &a_vec, &basis));
                let rhs = cw_product(&field, &basis, &vp, &vq).expect("same shape");
                morphism &= lhs == rhs.flatten();
            }
            check(out, "eval_product_morphism", morphism, None)?;

            let n = code.big_n();
            let mut spans = true;
            let mut witness = None;
            for k1 in 1..=n {
                for k2 in 1..=n {
                    let span =
                        crate::products::code_product_span(&field, &basis, &a_vec, k1, k2)
                            .map_err(|e| CliError::domain("products", e))?;
                    let expect = LrsCode::new(
                        field.clone(),
                        cfg.g,
                        (k1 + k2 - 1).min(n),
                        Some(code.outer().gamma().clone()),
                        Some(basis.clone()),
                    )
                    .map_err(|e| CliError::domain("codes", e))?;
                    if !span.same_row_space(expect.generator()) {
                        spans = false;
                        witness.get_or_insert(format!("k1={k1} k2={k2}"));
                    }
                }
            }
            check(out, "code_product_dimensions", spans, witness)?;
        }
        "reductions" => {
            let seed = cfg.resolve_seed(None);
            let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);

            // r = 1: the three products become the scalar, coordinate-wise
            // and dot products.
            let base = PrimeField::new(cfg.q).map_err(|e| CliError::domain("galois", e))?;
            let f1 = ExtField::new(base, 1, None).map_err(|e| CliError::domain("galois", e))?;
            let b1 = f1.polynomial_basis();
            let mut reduce_ok = true;
            for _ in 0..1000 {
                let x: Vec<FieldElem> = (0..cfg.g).map(|_| f1.sample(&mut rng)).collect();
                let y: Vec<FieldElem> = (0..cfg.g).map(|_| f1.sample(&mut rng)).collect();
                let bx = BlockVector::from_flat(1, x.clone());
                let by = BlockVector::from_flat(1, y.clone());
                let cw = cw_product(&f1, &b1, &bx, &by).expect("same shape");
                let schur: Vec<FieldElem> = x.iter().zip(&y).map(|(a, b)| f1.mul(a, b)).collect();
                reduce_ok &= cw.flatten() == schur;
                let dot = inner_product(&f1, &b1, &bx, &by).expect("same shape");
                let mut acc = f1.zero();
                for s in &schur {
                    acc = f1.add(&acc, s);
                }
                reduce_ok &= dot == vec![acc];
            }
            check(out, "r1_products_reduce", reduce_ok, None)?;

            let c1 = LrsCode::new(f1.clone(), cfg.g, cfg.k.min(cfg.g), None, None)
                .map_err(|e| CliError::domain("codes", e))?;
            check(
                out,
                "r1_code_mds",
                c1.is_mds().map_err(|e| CliError::domain("codes", e))?,
                None,
            )?;

            // g = 1: block products collapse to the single-block product.
            let field = cfg.field().map_err(|e| CliError::domain("galois", e))?;
            let basis = field.polynomial_basis();
            let mut single = true;
            for _ in 0..1000 {
                let x: Vec<FieldElem> = (0..cfg.r).map(|_| field.sample(&mut rng)).collect();
                let y: Vec<FieldElem> = (0..cfg.r).map(|_| field.sample(&mut rng)).collect();
                let bx = BlockVector::from_flat(cfg.r, x.clone());
                let by = BlockVector::from_flat(cfg.r, y.clone());
                let s = star(&field, &basis, &x, &y);
                single &= cw_product(&field, &basis, &bx, &by).expect("same shape").flatten() == s;
                single &= inner_product(&field, &basis, &bx, &by).expect("same shape") == s;
            }
            check(out, "g1_products_blockwise", single, None)?;

            let cg1 = LrsCode::new(field.clone(), 1, cfg.r.min(cfg.k), None, None)
                .map_err(|e| CliError::domain("codes", e))?;
            check(
                out,
                "g1_code_mds",
                cg1.is_mds().map_err(|e| CliError::domain("codes", e))?,
                None,
            )?;
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown audit kind `{other}`; expected mr|privacy|products|reductions"
            )))
        }
    }
    Ok(if all_pass { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parses_and_validates() {
        let cfg = Config::parse_text(
            "# grid point\nq=5\nr=2\ndelta=2\ng=4\nk=2\nt=2\nm=2\nseed=7\n",
        )
        .unwrap();
        assert_eq!((cfg.q, cfg.r, cfg.delta, cfg.g), (5, 2, 2, 4));
        assert_eq!((cfg.k, cfg.t, cfg.m, cfg.seed), (2, 2, 2, Some(7)));

        assert!(Config::parse_text("q=5\n").is_err());
        assert!(Config::parse_text("q=5\nq=7\nr=1\ndelta=1\ng=2\nk=1\nt=1\nm=1").is_err());
        assert!(Config::parse_text("nonsense").is_err());
    }

    #[test]
    fn config_overrides_flow_through() {
        let cfg = Config::parse_text(
            "q=5\nr=2\ndelta=2\ng=3\nk=3\nt=1\nm=1\nmodulus=2,0,1\ngamma=1,1\nbasis=1,0;0,1\n",
        )
        .unwrap();
        let code = cfg.build_code().unwrap();
        assert_eq!(code.field().modulus(), &[2, 0, 1]);
        assert_eq!(code.outer().gamma().to_text(), "1,1");
    }

    #[test]
    fn seed_resolution_order() {
        let cfg = Config::parse_text("q=5\nr=1\ndelta=1\ng=3\nk=2\nt=1\nm=1\nseed=5\n").unwrap();
        assert_eq!(cfg.resolve_seed(Some(9)), 9);
        assert_eq!(cfg.resolve_seed(None), 5);
        let cfg = Config::parse_text("q=5\nr=1\ndelta=1\ng=3\nk=2\nt=1\nm=1\n").unwrap();
        // No flag, no config seed, no env (not set in tests): 0.
        assert_eq!(cfg.resolve_seed(None), 0);
    }
}
