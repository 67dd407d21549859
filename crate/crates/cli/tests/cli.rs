use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

const SMALL: &str = r#"
seed = 9
task = "classify_mood"

[dataset]
moods = ["happy", "sad"]
samples_per_cell = 6
duration = 2.0
snr_db = 5.0
plant_types = ["basil", "mimosa"]

[[dataset.persons]]
id = "a"
step_frequency = 1.3
walking_speed = 1.2
vertical_amplitude = 1.0

[[dataset.persons]]
id = "b"
step_frequency = 1.6
walking_speed = 1.3
vertical_amplitude = 0.9

[evaluation]
k_folds = 4

[forest]
n_estimators = 20
"#;

const SHAKE: &str = r#"
seed = 4
task = "legshake"

[legshake]
shake_records = 2
noise_records = 2
duration = 6.0
onset = [1.5, 3.0]
"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_esdgait"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run(config: &Path, out: &Path, args: &[&str]) -> Output {
    bin()
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .arg("--quiet")
        .args(args)
        .output()
        .unwrap()
}

fn ok(o: Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn simulate_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.toml", SMALL);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    ok(run(&cfg, &a, &["simulate"]));
    ok(run(&cfg, &b, &["--jobs", "3", "simulate"]));
    let files = dir_bytes(&a);
    // 24 records, two files each, plus the manifest
    assert_eq!(files.len(), 49);
    assert_eq!(files, dir_bytes(&b));
}

#[test]
fn invalid_config_exits_with_validation_code() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "bad.toml", &SMALL.replace("samples_per_cell = 6", "samples_per_cell = 0"));
    let o = run(&cfg, &tmp.path().join("o"), &["simulate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!tmp.path().join("o").exists());

    let o = bin().args(["simulate"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1), "missing --config");
    let o = bin().args(["no-such-command"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn missing_features_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.toml", SMALL);
    let o = run(&cfg, &tmp.path().join("o"), &["train"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn full_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.toml", SMALL);
    let out = tmp.path().join("run");
    ok(run(&cfg, &out, &["simulate"]));
    let msg = ok(run(&cfg, &out, &["featurize"]));
    assert!(msg.contains("24 rows"), "{msg}");
    let header = fs::read_to_string(out.join("features.csv")).unwrap();
    assert!(header.lines().next().unwrap().ends_with(",label"));
    assert_eq!(header.lines().count(), 25);

    ok(run(&cfg, &out, &["train"]));
    assert!(out.join("model.rfj").exists());
    let eval: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("eval.json")).unwrap()).unwrap();
    let acc = eval["accuracy"].as_f64().unwrap();
    let kappa = eval["cohens_kappa"].as_f64().unwrap();
    // balanced binary truth
    assert!((kappa - (2.0 * acc - 1.0)).abs() < 1e-9);

    let second = tmp.path().join("again");
    fs::create_dir_all(&second).unwrap();
    for f in ["features.csv", "features.meta.json"] {
        fs::copy(out.join(f), second.join(f)).unwrap();
    }
    ok(run(&cfg, &second, &["--jobs", "2", "eval"]));
    assert_eq!(fs::read(out.join("eval.json")).unwrap(), fs::read(second.join("eval.json")).unwrap());

    let model = out.join("model.rfj");
    let scored = ok(run(&cfg, &second, &["eval", "--model", model.to_str().unwrap()]));
    assert!(scored.contains("saved model"), "{scored}");
    let other = write_config(tmp.path(), "other.toml", &format!("{SMALL}\n[mfcc]\nn_mel_filters = 30\n"));
    let o = run(&other, &second, &["eval", "--model", model.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "fingerprint mismatch");

    ok(run(&cfg, &out, &["report"]));
    let imp = fs::read_to_string(out.join("importance.csv")).unwrap();
    let total: f64 = imp.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9);
    let sweep = fs::read_to_string(out.join("accuracy_vs_k.csv")).unwrap();
    assert_eq!(sweep.lines().next(), Some("k,forest_acc,baseline_acc"));
    assert_eq!(sweep.lines().nth(1).unwrap().split(',').nth(2), Some("0.5"));
}

#[test]
fn mixed_sample_rates_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.toml", SMALL);
    let out = tmp.path().join("run");
    ok(run(&cfg, &out, &["simulate"]));
    let meta = out.join("a_happy_000.meta.json");
    let text = fs::read_to_string(&meta).unwrap().replace("\"sample_rate\": 10000.0", "\"sample_rate\": 8000.0");
    fs::write(&meta, text).unwrap();
    let o = run(&cfg, &out, &["featurize"]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn detect_from_file_and_stdin() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "shake.toml", SHAKE);
    let out = tmp.path().join("run");
    ok(run(&cfg, &out, &["simulate"]));

    let shake = out.join("shake_000.sig.csv");
    let from_file = ok(run(&cfg, &out, &["detect", "--input", shake.to_str().unwrap()]));
    assert!(from_file.lines().any(|l| l.starts_with(r#"{"type":"open""#)), "{from_file}");

    let mut child = bin()
        .args(["--quiet", "detect", "--chunk", "333"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&fs::read(&shake).unwrap()).unwrap();
    let from_stdin = ok(child.wait_with_output().unwrap());
    assert_eq!(from_file, from_stdin);

    let rest = out.join("rest_000.sig.csv");
    let quiet = ok(run(&cfg, &out, &["detect", "--input", rest.to_str().unwrap()]));
    assert!(quiet.is_empty(), "{quiet}");

    let manifest = out.join("dataset.json");
    let summary = ok(run(&cfg, &out, &["detect", "--manifest", manifest.to_str().unwrap()]));
    assert!(summary.contains("2 shake / 2 other"), "{summary}");
    assert!(out.join("detection.json").exists());
}
