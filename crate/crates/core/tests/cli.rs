use std::path::PathBuf;

use sparsemaps::cli::main_with_args;

fn table_dir() -> String {
    concat!(env!("CARGO_MANIFEST_DIR"), "/../../tables/small").to_string()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("sparsemaps").chain(args.iter().copied());
    let code = main_with_args(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sparsemaps-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn count_reads_table_files() {
    let t = table_dir();
    let (code, out, _) = run(&["count", "--n", "3", "--faces", "1", "--genus", "1", "--table", &t]);
    assert_eq!(code, 0);
    assert_eq!(out, "10\n");
    let (code, out, _) = run(&["count", "--n", "5"]);
    assert_eq!((code, out.as_str()), (0, "42\n"));
    let (_, json, _) = run(&["count", "--n", "5", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(json.trim()).unwrap();
    assert!(v.get("config").is_some());
}

#[test]
fn sampling_is_reproducible() {
    let t = table_dir();
    let args = ["sample", "--n", "20", "--faces", "1", "--genus", "1", "--count", "5", "--seed", "7", "--table", &t];
    let (code, a, err) = run(&args);
    assert_eq!(code, 0, "{err}");
    let (_, b, _) = run(&args);
    assert_eq!(a, b);
    // Header line plus one line per draw.
    assert_eq!(a.lines().count(), 6);
    let (_, c, _) = run(&["sample", "--n", "20", "--faces", "1", "--genus", "1", "--count", "5", "--seed", "8", "--table", &t]);
    assert_ne!(a.lines().nth(1), c.lines().nth(1));
}

#[test]
fn exit_codes() {
    // Missing seed.
    assert_eq!(run(&["sample", "--n", "5"]).0, 1);
    assert_eq!(run(&["frobnicate"]).0, 1);
    assert_eq!(run(&["--help"]).0, 0);
    // Approximate mode is only for one face.
    assert_eq!(run(&["sample", "--n", "50", "--faces", "3", "--mode", "approximate", "--seed", "1"]).0, 3);
    // The closed-form partition ratio misses its tolerance.
    let (code, out, _) = run(&["verify", "--suite", "phi-ratio", "--n", "10000", "--s", "30", "--seed", "1"]);
    assert_eq!(code, 2, "{out}");
    assert!(out.contains("FAIL"));
    let (code, _, _) = run(&["verify", "--suite", "closed-forms", "--seed", "1"]);
    assert_eq!(code, 0);
    assert_eq!(run(&["decompose", "--input", "/nonexistent/map.json"]).0, 1);
}

#[test]
fn decompose_and_stats_read_sample_output() {
    let t = table_dir();
    let samples = scratch("samples.jsonl");
    let p = samples.to_str().unwrap();
    let (code, _, err) = run(&[
        "sample", "--n", "30", "--faces", "3", "--genus", "0", "--count", "20", "--seed", "3", "--table", &t, "--output", p,
    ]);
    assert_eq!(code, 0, "{err}");

    let stats_csv = scratch("stats.csv");
    let (code, _, err) = run(&["stats", "--input", p, "--output", stats_csv.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let csv = std::fs::read_to_string(&stats_csv).unwrap();
    assert!(csv.starts_with('#'));
    let edges = csv.lines().find(|l| l.starts_with("edges,")).unwrap();
    assert!(edges.starts_with("edges,30,0"), "{edges}");

    let text = std::fs::read_to_string(&samples).unwrap();
    let line: serde_json::Value = serde_json::from_str(text.lines().nth(1).unwrap()).unwrap();
    let map = scratch("map.json");
    std::fs::write(&map, line["map"].to_string()).unwrap();
    let (code, out, err) = run(&["decompose", "--input", map.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let dec: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(dec["defect"], line["defect"]);
}
