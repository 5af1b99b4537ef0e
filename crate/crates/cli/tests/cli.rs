use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_purefields"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn construct_small(out: &Path, extra: &[&str]) -> Output {
    let out = out.to_str().unwrap();
    let mut args = vec![
        "construct", "--l", "3", "--k", "2", "--x", "10^9", "--small-ceiling", "2",
        "--symbol-ceiling", "7", "--out", out,
    ];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn construct_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = construct_small(dir.path(), &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("manifest.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["schema"], "purefields.run-manifest/1");
    assert_eq!(v["params"]["override_regime"], true);
    let ms: Vec<u64> = v["admissible"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a["m"].as_u64().unwrap())
        .collect();
    assert_eq!(ms, vec![105, 210, 315, 420]);
    assert!(dir.path().join("config.toml").exists());
}

#[test]
fn manifests_are_deterministic_across_modes_and_jobs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(code(&construct_small(a.path(), &["--jobs", "1", "--mode", "direct"])), 0);
    assert_eq!(code(&construct_small(b.path(), &["--jobs", "4"])), 0);
    let ma = std::fs::read(a.path().join("manifest.json")).unwrap();
    let mb = std::fs::read(b.path().join("manifest.json")).unwrap();
    assert_eq!(ma, mb);

    assert_eq!(code(&construct_small(b.path(), &["--mode", "staged"])), 0);
    let read = |p: &Path| -> serde_json::Value {
        serde_json::from_str(&std::fs::read_to_string(p.join("manifest.json")).unwrap()).unwrap()
    };
    assert_eq!(read(a.path())["admissible"], read(b.path())["admissible"]);
}

#[test]
fn parameter_errors_exit_2() {
    let o = run(&["construct", "--epsilon", "1.5"]);
    assert_eq!(code(&o), 2);
    let o = run(&["construct", "--x", "5"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("x too small"));
    assert_eq!(code(&run(&["construct", "--l", "4"])), 2);
    assert_eq!(code(&run(&["construct", "--mode", "sideways"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn empty_result_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&[
        "construct", "--x", "10^9", "--small-ceiling", "7", "--symbol-ceiling", "13", "--out", out,
    ]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn analyze_and_summarize() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(code(&construct_small(dir.path(), &[])), 0);
    let o = run(&["analyze", "--out", out, "--proxy-cutoff", "1000", "--precision", "20"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("reports.json")).unwrap()).unwrap();
    assert_eq!(v["reports"].as_array().unwrap().len(), 8);
    assert_eq!(v["symbols_verified"], true);
    for r in v["reports"].as_array().unwrap() {
        assert_eq!(r["report"]["schema"], "purefields.field-report/1");
        if r["j"] == 1 {
            assert!(r["report"]["unit"].is_object());
        }
    }
    let o = run(&["report", dir.path().join("reports.json").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("estimate"));
    let o = run(&["report", dir.path().join("manifest.json").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
}

#[test]
fn analyze_without_manifest_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["analyze", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn verify_dispatch() {
    let o = run(&["verify", "weil"]);
    assert_eq!(code(&o), 0);
    let s = String::from_utf8_lossy(&o.stdout);
    assert!(s.starts_with("PASS weil"), "{s}");
    let o = run(&["verify", "discriminant", "--json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["suite"], "discriminant");
    assert_eq!(v[0]["passed"], true);
    assert_eq!(code(&run(&["verify", "unknown-suite"])), 2);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("o");
    std::fs::write(
        &cfg,
        format!(
            "l = 3\nk = 2\nepsilon = 0.9\nx = \"1000000000\"\nsmall_prime_ceiling = 2\n\
             symbol_prime_ceiling = 13\nout = {:?}\n",
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    // Config alone gives the empty (7, 13)-style run; the flag brings it back.
    assert_eq!(code(&run(&["construct", "--config", cfg.to_str().unwrap()])), 3);
    let o = run(&["construct", "--config", cfg.to_str().unwrap(), "--symbol-ceiling", "7"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let written = std::fs::read_to_string(out.join("config.toml")).unwrap();
    assert!(written.contains("symbol_prime_ceiling = 7"));
    std::fs::write(&cfg, "nonsense = true\n").unwrap();
    assert_eq!(code(&run(&["construct", "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn cache_is_written_and_reused() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("factors.csv");
    let c = cache.to_str().unwrap();
    assert_eq!(code(&construct_small(dir.path(), &["--cache", c])), 0);
    let first = std::fs::read_to_string(&cache).unwrap();
    assert!(first.lines().count() >= 8);
    let m1 = std::fs::read(dir.path().join("manifest.json")).unwrap();
    assert_eq!(code(&construct_small(dir.path(), &["--cache", c])), 0);
    assert_eq!(std::fs::read(dir.path().join("manifest.json")).unwrap(), m1);
    assert_eq!(std::fs::read_to_string(&cache).unwrap(), first);
}

#[test]
fn single_field_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["report", "--a", "2", "--l", "3", "--proxy-cutoff", "20000", "--csv", "--out", out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["field"]["discriminant"], "108");
    let h = v["h_estimate"].as_f64().unwrap();
    assert!(h > 0.5 && h < 2.0, "{h}");
    let csv = std::fs::read_to_string(dir.path().join("lambda_2_3.csv")).unwrap();
    assert!(csv.starts_with("p,class,lambda,cumulative\n"));
    assert_eq!(code(&run(&["report", "--a", "8", "--l", "3"])), 2);
}
