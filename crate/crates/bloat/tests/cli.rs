mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bloat(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bloat"))
        .args(args)
        .current_dir(dir)
        .env_remove("API_KEY")
        .env_remove("BLOAT_LOG")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// A scratch copy of the golden fixture.
fn golden_copy() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let src = common::fixtures().join("golden");
    for entry in ["docs", "lexicon", "market"] {
        common::copy_dir(&src.join(entry), &dir.path().join(entry));
    }
    fs::copy(src.join("config.toml"), dir.path().join("config.toml")).unwrap();
    dir
}

fn ingest5_config(dir: &Path, manifest: &str, out: &str, extra: &str) -> PathBuf {
    let manifest = common::fixtures().join("ingest5").join(manifest);
    let path = dir.join(format!("{out}.toml"));
    let lexicon = common::fixtures().join("golden/lexicon");
    let text = format!(
        "seed = 1\n{extra}\n[paths]\nmanifest = {:?}\nlexicon_dir = {:?}\noutput_dir = {out:?}\n",
        manifest.display().to_string(),
        lexicon.display().to_string()
    );
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn ingest_reports_parseable_share() {
    let dir = tempfile::tempdir().unwrap();
    ingest5_config(dir.path(), "manifest.csv", "out", "");
    let o = bloat(dir.path(), &["ingest", "--config", "out.toml"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("ingest: retrieved=4/5"), "{}", stdout(&o));
    let report = fs::read_to_string(dir.path().join("out/ingest_report.json")).unwrap();
    assert!(report.contains("DYNA_2020"), "{report}");

    ingest5_config(dir.path(), "manifest.csv", "again", "");
    let o = bloat(dir.path(), &["ingest", "--config", "again.toml"]);
    assert_eq!(o.status.code(), Some(0));
    for name in ["documents.jsonl", "ingest_report.json"] {
        assert_eq!(fs::read(dir.path().join("out").join(name)).unwrap(), fs::read(dir.path().join("again").join(name)).unwrap(), "{name}");
    }
}

#[test]
fn empty_manifest_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    ingest5_config(dir.path(), "empty_manifest.csv", "out", "");
    let o = bloat(dir.path(), &["ingest", "--config", "out.toml"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("error:"), "{}", stderr(&o));
}

#[test]
fn missing_config_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = bloat(dir.path(), &["run", "--config", "nope.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn remote_mode_without_key_fails_before_any_work() {
    let dir = golden_copy();
    let o = bloat(dir.path(), &["run", "--config", "config.toml", "--mode", "remote"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("API_KEY"), "{}", stderr(&o));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn only_metrics_reuses_cached_summaries() {
    let dir = golden_copy();
    let o = bloat(dir.path(), &["run", "--config", "config.toml", "--only", "ingest,summarize"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let summaries = dir.path().join("out/summaries.jsonl");
    let before = (fs::read(&summaries).unwrap(), fs::metadata(&summaries).unwrap().modified().unwrap());

    let o = bloat(dir.path(), &["run", "--config", "config.toml", "--only", "metrics"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(lines.len(), 1, "{lines:?}");
    assert!(lines[0].starts_with("metrics: documents=20 summaries=20"), "{lines:?}");
    let after = (fs::read(&summaries).unwrap(), fs::metadata(&summaries).unwrap().modified().unwrap());
    assert_eq!(before, after);
    assert!(dir.path().join("out/summary_metrics.csv").exists());
}

#[test]
fn metrics_without_summaries_asks_for_the_earlier_stage() {
    let dir = golden_copy();
    let o = bloat(dir.path(), &["metrics", "--config", "config.toml"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("documents.jsonl"), "{}", stderr(&o));
}

#[test]
fn input_schema_mismatch_names_the_column_before_any_work() {
    let dir = golden_copy();
    let returns = dir.path().join("market/returns.csv");
    let text = fs::read_to_string(&returns).unwrap().replacen("firm_id,date,ret,mkt_ret", "firm_id,date,return,mkt_ret", 1);
    fs::write(&returns, text).unwrap();
    let o = bloat(dir.path(), &["run", "--config", "config.toml"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("returns.csv: missing column \"ret\""), "{}", stderr(&o));
    assert!(!dir.path().join("out/documents.jsonl").exists());
}

#[test]
fn unknown_regression_field_is_a_schema_error() {
    let dir = golden_copy();
    let config = dir.path().join("config.toml");
    let text = fs::read_to_string(&config).unwrap().replace("dep = \"pin\"", "dep = \"pin_typo\"");
    fs::write(&config, text).unwrap();
    let o = bloat(dir.path(), &["run", "--config", "config.toml"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("\"pin_typo\""), "{}", stderr(&o));
}

#[test]
fn seed_flag_overrides_the_config() {
    let dir = tempfile::tempdir().unwrap();
    ingest5_config(dir.path(), "manifest.csv", "out", "");
    let o = bloat(dir.path(), &["ingest", "--config", "out.toml", "--seed", "7", "--jobs", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let resolved = fs::read_to_string(dir.path().join("out/resolved_config.toml")).unwrap();
    assert!(resolved.contains("seed = 7") && resolved.contains("jobs = 1"), "{resolved}");
}

#[test]
fn remote_run_counts_retries_against_a_stub() {
    let stub = common::serve(|n, req| {
        if n < 2 {
            (429, "{}".into())
        } else {
            (200, common::completion(&common::first_words(&common::chunk_of(req), 20)))
        }
    });
    let dir = tempfile::tempdir().unwrap();
    let extra = format!(
        "mode = \"remote\"\n[summarizer]\ntargeted = []\n[remote]\nendpoint = {:?}\nbackoff_ms = 1\nmax_backoff_ms = 5\nconcurrency = 1\n",
        stub.url
    );
    ingest5_config(dir.path(), "manifest.csv", "out", &extra);
    let o = Command::new(env!("CARGO_BIN_EXE_bloat"))
        .args(["run", "--config", "out.toml", "--only", "ingest,summarize"])
        .current_dir(dir.path())
        .env("API_KEY", "test-key")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("summarized=4/4 targeted=0 failures=0 retries=2"), "{}", stdout(&o));
    assert_eq!(stub.request_count(), 6);
    let summaries = fs::read_to_string(dir.path().join("out/summaries.jsonl")).unwrap();
    assert!(summaries.lines().all(|l| l.contains("\"kind\":\"remote\"")), "{summaries}");
}
