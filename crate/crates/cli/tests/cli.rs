use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn twistlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twistlab")).args(args).output().expect("binary runs")
}

fn run_to(sub: &str, config: &str, out: &Path, extra: &[&str]) -> Output {
    let cfg = configs().join(config);
    let mut args = vec![sub, cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    twistlab(&args)
}

fn read_json(p: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn density_run_writes_report_table_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_to("density", "density_golden.toml", dir.path(), &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = read_json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["kind"], "bohr-density");
    assert_eq!(manifest["status"], "ok");
    let csv = std::fs::read_to_string(dir.path().join("density.csv")).unwrap();
    assert!(csv.starts_with("n,best_offset,count,boundary,window_size,ratio,limit,deviation"));
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        assert!(run_to("galois", "galois_cubic.toml", d.path(), &["--seed", "7"]).status.success());
    }
    for f in ["report.json", "labels.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let (ma, mb) = (read_json(&a.path().join("manifest.json")), read_json(&b.path().join("manifest.json")));
    assert_eq!(ma["config_hash"], mb["config_hash"]);
}

#[test]
fn seed_changes_the_config_hash() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(run_to("galois", "galois_cubic.toml", a.path(), &["--seed", "1"]).status.success());
    assert!(run_to("galois", "galois_cubic.toml", b.path(), &["--seed", "2"]).status.success());
    let (ma, mb) = (read_json(&a.path().join("manifest.json")), read_json(&b.path().join("manifest.json")));
    assert_ne!(ma["config_hash"], mb["config_hash"]);
}

#[test]
fn wrong_subcommand_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_to("recur", "density_golden.toml", dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("kind"));
}

#[test]
fn malformed_config_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.toml");
    std::fs::write(&p, "kind = \"galois\"\n\n[galois]\nd = 3\nbogus = 1\n").unwrap();
    let o = twistlab(&["galois", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 5"), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn bohr_describes_a_shipped_set() {
    let o = twistlab(&["bohr", "golden-arc", "--radius", "10"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("3/10"), "{text}");
}

#[test]
fn smoke_verify_passes_and_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = twistlab(&["verify", "--level", "smoke", "--out", dir.path().to_str().unwrap()]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{text}");
    assert!(text.contains("11/11 criteria passed"));
    let v = read_json(&dir.path().join("verify.json"));
    assert_eq!(v.as_array().unwrap().len(), 11);
}

#[test]
fn written_headers_match_the_schema() {
    let schema = read_json(&Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schema/tables.schema.json"));
    for (sub, config, table) in [("density", "density_golden.toml", "density.csv"), ("galois", "galois_cubic.toml", "labels.csv")] {
        let dir = tempfile::tempdir().unwrap();
        assert!(run_to(sub, config, dir.path(), &["--seed", "3"]).status.success());
        let text = std::fs::read_to_string(dir.path().join(table)).unwrap();
        let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
        let expected: Vec<&str> =
            schema["tables"][table]["columns"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
        assert_eq!(header, expected, "{table}");
    }
}
