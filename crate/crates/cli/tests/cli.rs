use std::path::Path;
use std::process::{Command, Output};

fn diffgame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diffgame")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn generate(out: &Path, workers: &str) -> Output {
    diffgame(&["generate", "--pairs", "12", "--seed", "9", "--workers", workers, "--out", out.to_str().unwrap()])
}

#[test]
fn generate_stats_eval_validate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing/parent/run");
    let o = generate(&out, "2");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("config sha256"));
    for f in ["manifest.json", "scenes.jsonl", "dialogs.jsonl"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let ds = out.to_str().unwrap();

    let o = diffgame(&["stats", "--dataset", ds]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("mean rounds"));
    let o = diffgame(&["stats", "--dataset", ds, "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["dialogs"].as_u64().unwrap() <= 24);

    let o = diffgame(&["eval", "--dataset", ds]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("transitions"));
    assert!(text.contains("replay success        1.000"), "{text}");

    let o = diffgame(&["validate", "--dataset", ds]);
    assert!(o.status.success());
    assert!(stdout(&o).contains(": ok"));
}

#[test]
fn worker_count_does_not_change_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(generate(&a, "1").status.success());
    assert!(generate(&b, "4").status.success());
    for f in ["manifest.json", "scenes.jsonl", "dialogs.jsonl"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn bad_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "pairs = 5\n[split]\ntrain = 0.9\nvalid = 0.2\ntest = 0.1\n").unwrap();
    let o = diffgame(&["generate", "--config", cfg.to_str().unwrap(), "--out", dir.path().join("x").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("split"));
    assert!(!dir.path().join("x").exists());

    std::fs::write(&cfg, "pairs = 5\nbogus = 1\n").unwrap();
    let o = diffgame(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn eval_rejects_out_of_range_epsilon() {
    let o = diffgame(&["eval", "--dataset", "nowhere", "--epsilon", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
}
