use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_aqcpqc"))
}

fn triangle() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/triangle.maxcut")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn error_kind(o: &Output) -> String {
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).expect("error JSON on stderr");
    v["error"]["kind"].as_str().unwrap().to_owned()
}

/// Body of a CSV written by the tool, without the leading config comment.
fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    let text = fs::read_to_string(path).unwrap();
    assert!(text.starts_with("# {"), "config header missing in {}", path.display());
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    reader.records().map(|r| r.unwrap()).collect()
}

fn strip_timing(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(map) => {
            map.remove("wall_time_s");
            map.values_mut().for_each(strip_timing);
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

#[test]
fn run_on_bundled_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["run", "--instance", triangle().to_str().unwrap(), "--steps", "10", "--out", "r"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let line = stdout(&o);
    for field in ["final_energy=", "E_opt=", "overlap=", "distance=", "ratio=", "evaluations="] {
        assert!(line.contains(field), "{line}");
    }
    let record: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r/record.json")).unwrap()).unwrap();
    assert_eq!(record["schema_version"], 1);
    assert_eq!(record["config"]["schedule"]["steps"], 10);
    let overlap = record["result"]["metrics"]["overlap"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&overlap));
    assert_eq!(csv_rows(&dir.path().join("r/trace.csv")).len(), 11);
}

#[test]
fn missing_instance_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["run", "--instance", "nowhere.maxcut"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_kind(&o), "instance-not-found");
}

#[test]
fn invalid_flags_are_reported_as_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["run", "--instance", "@triangle", "--mode", "sideways"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_kind(&o), "invalid-arguments");
}

#[test]
fn repeated_runs_write_identical_records() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["run", "--generate", "tfi:4:2", "--steps", "6", "--out", "same"];
    let read = || {
        assert_eq!(run_in(dir.path(), &args).status.code(), Some(0));
        let mut v: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("same/record.json")).unwrap()).unwrap();
        strip_timing(&mut v);
        v
    };
    assert_eq!(read(), read());
}

#[test]
fn oracle_on_two_equal_numbers() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("pair.np"), "1 1\n").unwrap();
    let o = run_in(dir.path(), &["oracle", "--instance", "pair.np"]);
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o);
    assert!(line.contains("E_opt=0 ") && line.contains("d=2"), "{line}");
}

#[test]
fn sweep_emits_one_row_per_step_count() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["sweep", "--instance", "@triangle", "--steps-list", "2,26", "--out", "s"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&dir.path().join("s/sweep.csv"));
    assert_eq!(rows.len(), 2);
    assert_eq!((&rows[0][0], &rows[1][0]), ("2", "26"));
}

#[test]
fn compare_table_schema() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "compare", "--sizes", "3", "--kinds", "numpart", "--count", "1", "--steps", "5", "--restarts", "2", "--out", "c",
    ];
    let o = run_in(dir.path(), &args);
    assert!(matches!(o.status.code(), Some(0) | Some(3)), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("c/compare_numpart.csv")).unwrap();
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["size", "method", "mean_overlap", "mean_energy_distance"]);
    let methods: Vec<String> = reader.records().map(|r| r.unwrap()[1].to_owned()).collect();
    assert_eq!(methods, ["aqcpqc", "vqe-gd", "vqe-spsa2"]);
}

#[test]
fn gen_writes_instance_and_descriptor() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["gen", "--generate", "maxcut-3reg:6:1", "--out", "g"]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("g/maxcut-3reg_n6_s1.maxcut")).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 9);
    let descriptor: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("g/maxcut-3reg_n6_s1.json")).unwrap()).unwrap();
    assert_eq!(descriptor["seed"], 1);
    let o = run_in(dir.path(), &["oracle", "--instance", "g/maxcut-3reg_n6_s1.maxcut"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.json"), r#"{"instance": "@triangle", "steps": 3, "layers": 2}"#).unwrap();
    let o = run_in(dir.path(), &["run", "--config", "c.json", "--steps", "4", "--out", "o"]);
    assert_eq!(o.status.code(), Some(0));
    let record: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("o/record.json")).unwrap()).unwrap();
    assert_eq!(record["config"]["steps"], 4);
    assert_eq!(record["config"]["layers"], 2);
    assert_eq!(record["result"]["steps"].as_array().unwrap().len(), 5);
}

#[test]
fn vqe_run_through_optimizer_flag() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["run", "--instance", "@triangle", "--optimizer", "gd", "--restarts", "2", "--out", "v"]);
    assert_eq!(o.status.code(), Some(0));
    let record: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("v/record.json")).unwrap()).unwrap();
    assert_eq!(record["result"]["method"], "vqe-gd");
    assert_eq!(csv_rows(&dir.path().join("v/trace.csv")).len(), 2);
}
