use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn sentwb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sentwb"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn synth_corpus(dir: &Path, docs: usize) -> PathBuf {
    let path = dir.join("corpus.jsonl");
    let out = sentwb(&["synth", "--out", path.to_str().unwrap(), "--docs", &docs.to_string()]);
    assert!(out.status.success(), "{}", stderr(&out));
    path
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("exp.toml");
    fs::write(&path, body).unwrap();
    path
}

const SMALL_GRID: &str = r#"
encoders = ["counts", "tfidf"]
models = ["lr", "dt"]
[corpus]
path = "corpus.jsonl"
"#;

#[test]
fn run_writes_all_artifacts_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    synth_corpus(dir.path(), 90);
    let config = write_config(dir.path(), SMALL_GRID);
    let out_dir = dir.path().join("out");
    let out = sentwb(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let csv = fs::read_to_string(out_dir.join("results.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "encoder,model,accuracy,precision,recall,f1");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("counts,dt,"));
    assert!(lines[2].starts_with("counts,lr,"));
    assert!(stdout(&out).contains("Accuracy"));

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 42);
    assert_eq!(manifest["cells_total"], 4);
    assert_eq!(manifest["corpus_sha256"].as_str().unwrap().len(), 64);
    assert!(out_dir.join("models").join("tfidf_lr.json").is_file());
}

#[test]
fn reruns_are_byte_identical_and_seed_override_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    synth_corpus(dir.path(), 90);
    let config = write_config(dir.path(), SMALL_GRID);
    let run = |name: &str, extra: &[&str]| {
        let out_dir = dir.path().join(name);
        let mut args = vec![
            "run",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ];
        args.extend_from_slice(extra);
        let out = sentwb(&args);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        out_dir
    };
    let a = run("a", &[]);
    let b = run("b", &["--serial"]);
    assert_eq!(
        fs::read(a.join("results.csv")).unwrap(),
        fs::read(b.join("results.csv")).unwrap()
    );
    let c = run("c", &["--seed", "7"]);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(c.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 7);
}

#[test]
fn invalid_config_reports_every_problem_and_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "encoders = [\"glove\"]\nmodels = [\"lr\"]\n[corpus]\npath = \"missing.csv\"\n[split]\ntest_fraction = 0\n",
    );
    let out = sentwb(&["validate", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("unknown encoder: glove"), "{err}");
    assert!(err.contains("split.test_fraction"), "{err}");
    assert!(err.contains("corpus.path"), "{err}");

    let out = sentwb(&["run", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("unknown encoder: glove"));
}

#[test]
fn validate_accepts_the_bundled_example() {
    let example = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/example.toml");
    let out = sentwb(&["validate", "--config", example.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn unloadable_corpus_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("corpus.jsonl"),
        "{\"id\": \"a\", \"content\": \"x\", \"label\": \"Happy\"}\n",
    )
    .unwrap();
    let config = write_config(dir.path(), SMALL_GRID);
    let out = sentwb(&["run", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("Happy"), "{}", stderr(&out));
}

#[test]
fn failing_cells_give_exit_two_and_are_listed() {
    let dir = tempfile::tempdir().unwrap();
    synth_corpus(dir.path(), 60);
    // covers only one document, so the external encoder cannot align
    fs::write(
        dir.path().join("emb.jsonl"),
        "{\"meta\": {\"model\": \"fixture\", \"pooling\": \"mean\", \"dim\": 2}}\n\
         {\"id\": \"syn-0001\", \"dim\": 2, \"values\": [0.5, -0.5]}\n",
    )
    .unwrap();
    let config = write_config(
        dir.path(),
        "encoders = [\"tfidf\", \"external:emb.jsonl\"]\nmodels = [\"lr\"]\n[corpus]\npath = \"corpus.jsonl\"\n",
    );
    let out_dir = dir.path().join("out");
    let out = sentwb(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("external:"), "{}", stderr(&out));
    let csv = fs::read_to_string(out_dir.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["failures"].as_array().unwrap().len(), 1);
    assert_eq!(manifest["failures"][0]["stage"], "encode");
}

#[test]
fn inspect_corpus_prints_distribution_and_histogram() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth_corpus(dir.path(), 30);
    let out = sentwb(&["inspect-corpus", "--corpus", corpus.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("documents: 30"), "{text}");
    assert!(text.contains("Positive") && text.contains("Negative") && text.contains("Neutral"));
    assert!(text.contains("tokens per document"));

    let config = write_config(dir.path(), SMALL_GRID);
    let out = sentwb(&["inspect-corpus", "--config", config.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
}

#[test]
fn export_splits_partitions_the_corpus() {
    let dir = tempfile::tempdir().unwrap();
    synth_corpus(dir.path(), 50);
    let config = write_config(dir.path(), SMALL_GRID);
    let out_dir = dir.path().join("splits");
    let out = sentwb(&[
        "export-splits",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let train = fs::read_to_string(out_dir.join("train.jsonl")).unwrap();
    let test = fs::read_to_string(out_dir.join("test.jsonl")).unwrap();
    assert_eq!(test.lines().count(), 10);
    assert_eq!(train.lines().count() + test.lines().count(), 50);
}

#[test]
fn augment_after_split_leaves_test_untouched() {
    let dir = tempfile::tempdir().unwrap();
    synth_corpus(dir.path(), 30);
    let config = write_config(dir.path(), &format!("{SMALL_GRID}[augment]\ntarget_per_class = 20\n"));
    let export = |name: &str, extra: &[&str]| {
        let out_dir = dir.path().join(name);
        let mut args = vec![
            "export-splits",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ];
        args.extend_from_slice(extra);
        let out = sentwb(&args);
        assert!(out.status.success(), "{}", stderr(&out));
        (
            fs::read_to_string(out_dir.join("train.jsonl")).unwrap(),
            fs::read_to_string(out_dir.join("test.jsonl")).unwrap(),
        )
    };
    let (before_train, before_test) = export("before", &[]);
    let (after_train, after_test) = export("after", &["--augment-after-split"]);
    assert_eq!(before_train.lines().count() + before_test.lines().count(), 60);
    assert_eq!(after_train.lines().count(), 60);
    assert_eq!(after_test.lines().count(), 6);
    assert!(!after_test.contains("-aug-"));
}

#[test]
fn synth_rejects_zero_documents() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.csv");
    let out = sentwb(&["synth", "--out", path.to_str().unwrap(), "--docs", "0"]);
    assert_eq!(out.status.code(), Some(1));
}
