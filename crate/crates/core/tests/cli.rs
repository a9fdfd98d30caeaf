//! Command-line integration tests: config loading, the full
//! build/encode/repair/retrieve pipeline with byte-exact round trips, the
//! audit check streams, and exit-code conventions.

use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};

use lrspir::cli::dispatch_with;
use lrspir::galois::{ExtField, PrimeField};
use lrspir::mrlrc::MrLrc;
use lrspir::storesim::{Database, FileSet};
use rand_core::SeedableRng;

static DIR_ID: AtomicU64 = AtomicU64::new(0);

/// A scratch directory unique to this test invocation.
fn scratch() -> PathBuf {
    let id = DIR_ID.fetch_add(1, Ordering::SeqCst);
    let dir = std::env::temp_dir().join(format!(
        "lrspir-cli-test-{}-{id}",
        std::process::id()
    ));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> (i32, String) {
    let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    let mut out = Vec::new();
    let code = dispatch_with(&args, &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn write(dir: &std::path::Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path.to_str().unwrap().to_string()
}

const GRID_CONFIG: &str = "q=5\nr=2\ndelta=2\ng=4\nk=2\nt=2\nm=2\nseed=3\n";

#[test]
fn rate_prints_the_exact_rational_first() {
    let dir = scratch();
    let cfg = write(&dir, "grid.cfg", GRID_CONFIG);
    let (code, out) = run(&["rate", "--config", &cfg]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("3/8"));
    // The resolved parameters make the report self-describing.
    assert!(out.contains("N=8"));
    assert!(out.contains("b=3"));
    assert!(out.contains("s=2"));
}

#[test]
fn usage_errors_exit_2() {
    let (code, _) = run(&[]);
    assert_eq!(code, 2);
    let (code, _) = run(&["frobnicate"]);
    assert_eq!(code, 2);
    let (code, _) = run(&["rate"]);
    assert_eq!(code, 2); // missing --config
    let dir = scratch();
    let cfg = write(&dir, "grid.cfg", GRID_CONFIG);
    let (code, _) = run(&["audit", "nonsense", "--config", &cfg]);
    assert_eq!(code, 2);
}

#[test]
fn build_emits_a_parseable_descriptor() {
    let dir = scratch();
    let cfg = write(&dir, "grid.cfg", "q=5\nr=2\ndelta=2\ng=3\nk=3\nt=1\nm=2\n");
    let out_path = dir.join("code.txt");
    let (code, _) = run(&["build", "--config", &cfg, "--out", out_path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out_path).unwrap();
    let parsed = MrLrc::parse_text(&text).unwrap();
    assert_eq!(parsed.to_text(), text);
    assert_eq!((parsed.g(), parsed.k(), parsed.delta()), (3, 3, 2));
}

#[test]
fn encode_then_retrieve_round_trips_every_file() {
    let dir = scratch();
    let cfg = write(&dir, "grid.cfg", GRID_CONFIG);

    // Deterministic random files, serialized through the canonical format.
    let field = ExtField::new(PrimeField::new(5).unwrap(), 2, None).unwrap();
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(5);
    let files = FileSet::random(&field, 2, 3, 2, &mut rng); // m=2, b=3, k=2
    let files_path = write(&dir, "files.txt", &files.to_text());

    let db_path = dir.join("db.txt");
    let (code, _) = run(&[
        "encode",
        "--config",
        &cfg,
        "--files",
        &files_path,
        "--out",
        db_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);

    for i in 1..=2 {
        let out_path = dir.join(format!("file{i}.txt"));
        let transcript_path = dir.join(format!("transcript{i}.txt"));
        let (code, _) = run(&[
            "retrieve",
            "--db",
            db_path.to_str().unwrap(),
            "--config",
            &cfg,
            "--file",
            &i.to_string(),
            "--seed",
            "42",
            "--out",
            out_path.to_str().unwrap(),
            "--transcript",
            transcript_path.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let got = std::fs::read_to_string(&out_path).unwrap();
        assert_eq!(got, files.file(i - 1).to_text(), "file {i} round trip");
        let transcript = std::fs::read_to_string(&transcript_path).unwrap();
        assert!(transcript.contains("seed=42"));
        assert!(transcript.contains(&format!("file={i}")));
        assert!(transcript.contains("iteration=2"));
    }
}

#[test]
fn retrieval_transcripts_are_byte_exact_for_a_seed() {
    let dir = scratch();
    let cfg = write(&dir, "grid.cfg", GRID_CONFIG);
    let field = ExtField::new(PrimeField::new(5).unwrap(), 2, None).unwrap();
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(6);
    let files = FileSet::random(&field, 2, 3, 2, &mut rng);
    let files_path = write(&dir, "files.txt", &files.to_text());
    let db_path = dir.join("db.txt");
    run(&["encode", "--config", &cfg, "--files", &files_path, "--out", db_path.to_str().unwrap()]);

    let mut texts = Vec::new();
    for run_idx in 0..2 {
        let t_path = dir.join(format!("t{run_idx}.txt"));
        let (code, _) = run(&[
            "retrieve",
            "--db",
            db_path.to_str().unwrap(),
            "--config",
            &cfg,
            "--file",
            "1",
            "--seed",
            "777",
            "--transcript",
            t_path.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        texts.push(std::fs::read(&t_path).unwrap());
    }
    assert_eq!(texts[0], texts[1], "transcripts must be byte-identical");
}

#[test]
fn retrieve_rejects_an_out_of_range_index() {
    let dir = scratch();
    let cfg = write(&dir, "grid.cfg", GRID_CONFIG);
    let field = ExtField::new(PrimeField::new(5).unwrap(), 2, None).unwrap();
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(7);
    let files = FileSet::random(&field, 2, 3, 2, &mut rng);
    let files_path = write(&dir, "files.txt", &files.to_text());
    let db_path = dir.join("db.txt");
    run(&["encode", "--config", &cfg, "--files", &files_path, "--out", db_path.to_str().unwrap()]);

    let (code, _) = run(&[
        "retrieve",
        "--db",
        db_path.to_str().unwrap(),
        "--config",
        &cfg,
        "--file",
        "7",
    ]);
    assert_eq!(code, 1, "domain error for a missing file index");
}

#[test]
fn repair_restores_erased_nodes() {
    let dir = scratch();
    let cfg = write(&dir, "grid.cfg", "q=5\nr=2\ndelta=2\ng=3\nk=3\nt=1\nm=2\n");
    let field = ExtField::new(PrimeField::new(5).unwrap(), 2, None).unwrap();
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(8);
    let files = FileSet::random(&field, 2, 2, 3, &mut rng); // b = lcm(2,3)/3 = 2 here
    let files_path = write(&dir, "files.txt", &files.to_text());
    let db_path = dir.join("db.txt");
    let (code, _) = run(&["encode", "--config", &cfg, "--files", &files_path, "--out", db_path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let original = std::fs::read_to_string(&db_path).unwrap();

    // Lose one node per group (columns are 1-based).
    let repaired_path = dir.join("repaired.txt");
    let (code, _) = run(&[
        "repair",
        "--db",
        db_path.to_str().unwrap(),
        "--erase",
        "1,5,9",
        "--out",
        repaired_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let repaired = std::fs::read_to_string(&repaired_path).unwrap();
    assert_eq!(repaired, original, "repair must restore the exact dump");

    // An uncorrectable pattern is a domain error.
    let all_cols: Vec<String> = (1..=7).map(|c| c.to_string()).collect();
    let (code, _) = run(&[
        "repair",
        "--db",
        db_path.to_str().unwrap(),
        "--erase",
        &all_cols.join(","),
    ]);
    assert_eq!(code, 1);
}

#[test]
fn database_dump_round_trips() {
    let dir = scratch();
    let cfg = write(&dir, "grid.cfg", GRID_CONFIG);
    let field = ExtField::new(PrimeField::new(5).unwrap(), 2, None).unwrap();
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(9);
    let files = FileSet::random(&field, 2, 3, 2, &mut rng);
    let files_path = write(&dir, "files.txt", &files.to_text());
    let db_path = dir.join("db.txt");
    run(&["encode", "--config", &cfg, "--files", &files_path, "--out", db_path.to_str().unwrap()]);
    let text = std::fs::read_to_string(&db_path).unwrap();
    let db = Database::parse_text(&text).unwrap();
    assert_eq!(db.to_text(), text);
}

#[test]
fn audits_pass_on_grid_configs() {
    let dir = scratch();
    for (name, cfg_text) in [
        ("a", "q=5\nr=2\ndelta=2\ng=4\nk=2\nt=2\nm=2\n"),
        ("b", "q=5\nr=1\ndelta=2\ng=3\nk=2\nt=1\nm=2\n"),
        ("c", "q=7\nr=3\ndelta=2\ng=3\nk=3\nt=1\nm=2\n"),
    ] {
        let cfg = write(&dir, &format!("{name}.cfg"), cfg_text);
        for kind in ["mr", "privacy", "products", "reductions"] {
            let (code, out) = run(&["audit", kind, "--config", &cfg]);
            assert_eq!(code, 0, "audit {kind} on {name}: {out}");
            assert!(out.contains("CHECK"), "audit {kind} must emit CHECK lines");
            assert!(
                !out.contains("FAIL"),
                "audit {kind} on {name} reported a failure:\n{out}"
            );
        }
    }
}

#[test]
fn privacy_audit_emits_one_line_per_colluding_set() {
    let dir = scratch();
    let cfg = write(&dir, "grid.cfg", GRID_CONFIG);
    let (code, out) = run(&["audit", "privacy", "--config", &cfg]);
    assert_eq!(code, 0);
    let rank_lines = out
        .lines()
        .filter(|l| l.starts_with("CHECK privacy_rank_"))
        .count();
    assert_eq!(rank_lines, 6, "C(4, 2) colluding sets");
}

#[test]
fn tiny_instance_runs_the_distribution_check() {
    let dir = scratch();
    let cfg = write(&dir, "tiny.cfg", "q=3\nr=1\ndelta=1\ng=2\nk=1\nt=1\nm=2\n");
    let (code, out) = run(&["audit", "privacy", "--config", &cfg]);
    assert_eq!(code, 0, "{out}");
    assert!(
        out.contains("CHECK privacy_distribution PASS"),
        "tiny instances must tabulate the view distribution:\n{out}"
    );
}
