use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn gsmp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gsmp")).args(args).output().expect("spawn gsmp")
}

fn ok(args: &[&str]) -> String {
    let out = gsmp(args);
    assert!(out.status.success(), "gsmp {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

/// Small synthetic gallery + probes in `dir`.
fn fixture(dir: &Path) -> (String, String) {
    let (g, q) = (p(dir, "g.gsmp"), p(dir, "p.gsmp"));
    ok(&[
        "synth", "--num-identities", "12", "--dim", "16", "--nonmate-identities", "4", "--seed", "3",
        "--gallery-out", &g, "--probes-out", &q,
    ]);
    (g, q)
}

fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

#[test]
fn condense_never_grows_the_gallery() {
    let dir = TempDir::new().unwrap();
    let (g, _) = fixture(dir.path());
    let out = ok(&["condense", "--gallery", &g, "--radius", "0.5", "--out", &p(dir.path(), "c.gsmp")]);
    let field = |k: &str| -> usize {
        out.split_whitespace().find_map(|kv| kv.strip_prefix(k)).unwrap().parse().unwrap()
    };
    assert!(field("samples=") <= field("input_vectors="), "{out}");
}

#[test]
fn sweep_emits_eight_sorted_rows() {
    let dir = TempDir::new().unwrap();
    let (g, q) = fixture(dir.path());
    let out = ok(&[
        "sweep", "--gallery", &g, "--probes", &q, "--radii", "0.4,0.8", "--bandwidths", "0.8,1.0",
        "--pruning-ratios", "0,1", "--fpirs", "0.05",
    ]);
    let fnirs: Vec<f64> = out
        .lines()
        .filter(|l| l.starts_with("rank="))
        .map(|l| l.split_whitespace().find_map(|kv| kv.strip_prefix("fnir=")).unwrap().parse().unwrap())
        .collect();
    assert_eq!(fnirs.len(), 8);
    assert!(fnirs.windows(2).all(|w| w[0] <= w[1]), "{fnirs:?}");
}

#[test]
fn eval_raw_and_prun_gen_match_golden() {
    let dir = TempDir::new().unwrap();
    let (g, q) = fixture(dir.path());
    let out = ok(&["eval", "--gallery", &g, "--probes", &q, "--method", "raw,prun_gen", "--fpirs", "0.05,0.1"]);
    let path = golden_path("eval_raw_prun_gen.txt");
    if std::env::var_os("GSMP_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &out).unwrap();
    }
    assert_eq!(out, std::fs::read_to_string(&path).unwrap());
}

#[test]
fn identify_lines_have_four_fields() {
    let dir = TempDir::new().unwrap();
    let (g, q) = fixture(dir.path());
    let out = ok(&["identify", "--gallery", &g, "--probes", &q, "--threshold", "0.9"]);
    assert_eq!(out.lines().count(), 12 * 10 + 4 * 10);
    for (i, line) in out.lines().enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f.len(), 4, "{line}");
        assert_eq!(f[0], i.to_string());
        assert!(f[3] == "true" || f[3] == "false");
    }
}

#[test]
fn text_and_binary_inputs_agree() {
    let dir = TempDir::new().unwrap();
    let (g, q) = fixture(dir.path());
    let gt = p(dir.path(), "g.txt");
    ok(&["prune", "--gallery", &g, "--pruning-ratio", "0", "--out", &gt, "--format", "text"]);
    let a = ok(&["eval", "--gallery", &g, "--probes", &q, "--method", "raw"]);
    let b = ok(&["eval", "--gallery", &gt, "--probes", &q, "--method", "raw"]);
    assert_eq!(a, b);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = TempDir::new().unwrap();
    let (g, _) = fixture(dir.path());
    let cfg = p(dir.path(), "run.conf");
    std::fs::write(&cfg, "# tighter spheres\nradius = 0.3\n").unwrap();
    let from_file = ok(&["--config", &cfg, "generate", "--gallery", &g, "--out", &p(dir.path(), "a.gsmp")]);
    let from_flag = ok(&["generate", "--gallery", &g, "--radius", "0.3", "--out", &p(dir.path(), "b.gsmp")]);
    assert_eq!(from_file, from_flag);
    assert_eq!(std::fs::read(dir.path().join("a.gsmp")).unwrap(), std::fs::read(dir.path().join("b.gsmp")).unwrap());
}

#[test]
fn failures_exit_non_zero_with_a_message() {
    let dir = TempDir::new().unwrap();
    let (g, q) = fixture(dir.path());

    let unknown_flag = gsmp(&["prune", "--gallery", &g, "--out", "x", "--bogus"]);
    assert_eq!(unknown_flag.status.code(), Some(2));

    let missing = gsmp(&["prune", "--gallery", &p(dir.path(), "absent.gsmp"), "--out", "x"]);
    assert!(!missing.status.success());
    assert!(String::from_utf8_lossy(&missing.stderr).contains("absent.gsmp"));

    let other = p(dir.path(), "wide.gsmp");
    ok(&["synth", "--num-identities", "3", "--dim", "8", "--gallery-out", &other, "--probes-out", &p(dir.path(), "wq.gsmp")]);
    let mismatch = gsmp(&["eval", "--gallery", &other, "--probes", &q]);
    assert!(!mismatch.status.success());
    assert!(String::from_utf8_lossy(&mismatch.stderr).contains("dimension"), "{}", String::from_utf8_lossy(&mismatch.stderr));

    let garbage = p(dir.path(), "garbage.gsmp");
    std::fs::write(&garbage, b"not a dataset").unwrap();
    let bad = gsmp(&["identify", "--gallery", &garbage, "--probes", &q, "--threshold", "1"]);
    assert!(!bad.status.success() && bad.status.code() != Some(1));
}
