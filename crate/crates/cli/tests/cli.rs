use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use scenebench::scene::read_benchmark;
use scenebench::score::ScoreFile;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_scenebench");

fn golden() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/golden")
}

fn toy_fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/toy_queen.json")
}

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .env_remove("SCENEBENCH_CONFIG_DIR")
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = run(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn generate_is_deterministic() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(d, &["generate", "--count", "100", "--seed", "7", "--out", "a.jsonl"]);
    ok(d, &["generate", "--count", "100", "--seed", "7", "--out", "b.jsonl"]);
    assert_eq!(fs::read(d.join("a.jsonl")).unwrap(), fs::read(d.join("b.jsonl")).unwrap());
    let manifest = fs::read_to_string(d.join("a.jsonl.manifest.json")).unwrap();
    assert!(manifest.contains("\"command\": \"generate\""));
    assert!(manifest.contains("\"seed\": 7"));
    ok(d, &["generate", "--count", "100", "--seed", "8", "--out", "c.jsonl"]);
    assert_ne!(fs::read(d.join("a.jsonl")).unwrap(), fs::read(d.join("c.jsonl")).unwrap());
}

#[test]
fn generate_large_respects_bounds() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(d, &["generate", "--count", "10000", "--seed", "1", "--out", "b.jsonl", "--stats", "s.tsv"]);
    let entries = read_benchmark(&fs::read_to_string(d.join("b.jsonl")).unwrap()).unwrap();
    assert_eq!(entries.len(), 10000);
    assert!(entries.iter().all(|e| e.scene.total_number() <= 5 && e.scene.relations().len() <= 6));
    assert!(entries.iter().all(|e| e.prompt.split_whitespace().count() <= 78));
    let stats = fs::read_to_string(d.join("s.tsv")).unwrap();
    assert!(stats.contains("size\t-\t10000"));
}

#[test]
fn usage_and_data_errors() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    assert_eq!(code(&run(d, &["generate", "--count", "0", "--out", "x"])), 1);
    assert_eq!(code(&run(d, &["generate", "--count", "3", "--p", "0.3", "--out", "x"])), 1);
    assert_eq!(code(&run(d, &["frobnicate"])), 1);
    assert_eq!(code(&run(d, &["--help"])), 0);

    fs::write(d.join("bad.jsonl"), "{\"schema\":\"scenebench/benchmark\",\"version\":1}\n{\"id\":0}\n").unwrap();
    fs::create_dir(d.join("dets")).unwrap();
    let out = run(d, &["score", "--benchmark", "bad.jsonl", "--detections", "dets", "--out", "s.json"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    assert_eq!(code(&run(d, &["score", "--benchmark", "missing.jsonl", "--detections", "dets", "--out", "s.json"])), 2);
}

#[test]
fn malformed_detection_record_names_the_file() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    fs::create_dir(d.join("dets")).unwrap();
    let text = fs::read_to_string(golden().join("detections/2.json")).unwrap().replacen("0.93", "\"high\"", 1);
    fs::write(d.join("dets/2.json"), text).unwrap();
    let bench = golden().join("benchmark.jsonl");
    let out = run(d, &["score", "--benchmark", bench.to_str().unwrap(), "--detections", "dets", "--out", "s.json"]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("2.json") && err.contains("confidence"), "{err}");
    assert!(!d.join("s.json").exists());
}

#[test]
fn golden_scores_and_pairs_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let g = golden();
    let bench = g.join("benchmark.jsonl");
    let dets = g.join("detections");
    ok(d, &["score", "--benchmark", bench.to_str().unwrap(), "--detections", dets.to_str().unwrap(), "--out", "scores.json"]);
    assert_eq!(
        fs::read_to_string(d.join("scores.json")).unwrap(),
        fs::read_to_string(g.join("expected_scores.json")).unwrap()
    );
    ok(d, &["revise", "--benchmark", bench.to_str().unwrap(), "--scores", "scores.json", "--out", "enforce.jsonl"]);
    let pairs = fs::read_to_string(d.join("enforce.jsonl")).unwrap();
    assert_eq!(pairs, fs::read_to_string(g.join("expected_enforce.jsonl")).unwrap());
    assert!(pairs.contains(r#""c1":"2 bowl. The second bowl is white, above the first cup""#));
}

#[test]
fn empty_detections_score_zero_acc() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    fs::create_dir(d.join("none")).unwrap();
    ok(d, &["generate", "--count", "200", "--seed", "3", "--out", "b.jsonl"]);
    let out = ok(d, &["score", "--benchmark", "b.jsonl", "--detections", "none", "--out", "s.json"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("200 entries had no detection record"));
    let scores = ScoreFile::parse(&fs::read_to_string(d.join("s.json")).unwrap()).unwrap();
    assert_eq!(scores.aggregate.mean_acc, 0.0);
    assert!(scores.records.iter().all(|r| r.bias == r.total_instances && r.missing_detections));

    ok(d, &["analyze", "--scores", "s.json", "--group-by", "relations", "--fix-total", "4", "--out", "g.tsv"]);
    let table = fs::read_to_string(d.join("g.tsv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next().unwrap(), "relations\tsize\tmean_acc\tmean_bias\tmean_align_score\talign_score_of_means");
    let sizes: usize = lines
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let cols: Vec<&str> = l.split('\t').collect();
            assert_eq!(&cols[2..5], ["0.000000", "4.000000", "0.100000"]);
            cols[1].parse::<usize>().unwrap()
        })
        .sum();
    assert_eq!(sizes, scores.records.iter().filter(|r| r.total_instances == 4).count());

    ok(d, &["analyze", "--scores", "s.json", "--directions", "--out", "k.tsv"]);
    assert!(fs::read_to_string(d.join("k.tsv")).unwrap().starts_with("kind\tcorrect\ttotal\taccuracy\nleft\t0\t"));
    assert_eq!(code(&run(d, &["analyze", "--scores", "s.json", "--stability", "--out", "x.tsv"])), 1);
    ok(d, &["analyze", "--scores", "s.json", "--scores", "s.json", "--stability", "--out", "st.tsv"]);
    assert!(fs::read_to_string(d.join("st.tsv")).unwrap().contains("acc\t0.000000\t0.000000"));
}

#[test]
fn perfect_scores_give_empty_enforce_file() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let text = fs::read_to_string(golden().join("benchmark.jsonl")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    fs::write(d.join("b.jsonl"), format!("{}\n{}\n", lines[0], lines[3])).unwrap();
    let dets = golden().join("detections");
    ok(d, &["score", "--benchmark", "b.jsonl", "--detections", dets.to_str().unwrap(), "--out", "s.json"]);
    let out = ok(d, &["revise", "--benchmark", "b.jsonl", "--scores", "s.json", "--out", "e.jsonl"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("nothing to enforce"));
    assert_eq!(fs::read_to_string(d.join("e.jsonl")).unwrap(), "{\"schema\":\"scenebench/enforce\",\"version\":1}\n");
}

#[test]
fn guidance_demo_reduction() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let fx = toy_fixture();
    let fx = fx.to_str().unwrap();
    ok(d, &["guidance-demo", "--mode", "rte", "--w", "7", "--wprime", "0", "--fixture", fx, "--c0", "king", "--c1", "woman", "--c2", "man", "--out", "rte.tsv"]);
    ok(d, &["guidance-demo", "--mode", "cfg", "--w", "7", "--fixture", fx, "--c0", "king", "--out", "cfg.tsv"]);
    let rte = fs::read_to_string(d.join("rte.tsv")).unwrap();
    assert_eq!(rte, fs::read_to_string(d.join("cfg.tsv")).unwrap());
    assert_eq!(rte.lines().count(), 12);
    assert!(rte.starts_with("step\tx0\tx1\tx2\n0\t1.0\t1.0\t1.0\n"));
    assert_eq!(code(&run(d, &["guidance-demo", "--mode", "rte", "--w", "7", "--fixture", fx, "--c0", "king", "--out", "x.tsv"])), 1);
    assert_eq!(code(&run(d, &["guidance-demo", "--mode", "cfg", "--w", "7", "--fixture", fx, "--c0", "prince", "--out", "x.tsv"])), 2);
    ok(d, &["guidance-demo", "--mode", "cfg", "--w", "1", "--fixture", fx, "--c0", "king", "--x0", "-1,0,2", "--steps", "1", "--out", "one.tsv"]);
}

#[test]
fn correlate_matches_reference_values() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    // metric and two annotators; scipy on (metric, mean rating) gives the reference
    let csv = "metric,ann1,ann2\n0.62,4,4\n0.31,2,3\n0.88,5,5\n0.45,3,3\n0.31,2,2\n0.74,4,4\n0.59,3,4\n0.12,1,1\n";
    fs::write(d.join("r.csv"), csv).unwrap();
    ok(d, &["correlate", "--input", "r.csv", "--ratings", "ann1,ann2", "--out", "c.tsv"]);
    let table = fs::read_to_string(d.join("c.tsv")).unwrap();
    let get = |name: &str| -> f64 {
        table.lines().find_map(|l| l.strip_prefix(&format!("{name}\t"))).unwrap().parse().unwrap()
    };
    assert!((get("pearson") - 0.9827741344402983).abs() < 1e-9);
    assert!((get("spearman") - 0.9879518072289155).abs() < 1e-9);
    assert!((get("kendall_tau_b") - 0.962962962962963).abs() < 1e-9);
    assert!(table.contains("krippendorff_alpha_interval\t"));
    assert_eq!(code(&run(d, &["correlate", "--input", "r.csv", "--ratings", "ann9", "--out", "c.tsv"])), 1);
    fs::write(d.join("bad.csv"), "metric,ann1\n0.1,x\n0.2,3\n").unwrap();
    assert_eq!(code(&run(d, &["correlate", "--input", "bad.csv", "--ratings", "ann1", "--out", "c.tsv"])), 2);
}

#[test]
fn config_dir_supplies_the_default_table() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let table = r#"{"schema":"scenebench/compatibility","version":1,"canonical":false,
      "categories":[{"name":"apple","colors":["green","red"]},{"name":"banana","colors":["yellow"]}]}"#;
    fs::write(d.join("compatibility.json"), table).unwrap();
    let out = Command::new(BIN)
        .args(["generate", "--count", "50", "--max-categories", "2", "--out", "b.jsonl"])
        .current_dir(d)
        .env("SCENEBENCH_CONFIG_DIR", d)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let entries = read_benchmark(&fs::read_to_string(d.join("b.jsonl")).unwrap()).unwrap();
    assert!(entries
        .iter()
        .flat_map(|e| e.scene.categories())
        .all(|c| c.as_str() == "apple" || c.as_str() == "banana"));
    let manifest = fs::read_to_string(d.join("b.jsonl.manifest.json")).unwrap();
    assert!(manifest.contains("compatibility.json"));
}
