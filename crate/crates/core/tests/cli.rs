mod common;

use common::{path_str, thermod, thermod_ok};

fn synth_small(dir: &std::path::Path) -> String {
    let data = dir.join("data");
    thermod_ok(&["synth", "--out", path_str(&data), "--frames", "160", "--seed", "3"]);
    path_str(&data).to_string()
}

#[test]
fn invalid_flags_fail_before_work() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.thod");
    let r = thermod(&["train", "--data", "/nonexistent", "--nf", "0", "--out", path_str(&out)]);
    assert!(!r.status.success());
    let err = String::from_utf8_lossy(&r.stderr);
    assert!(err.contains("nf must be ≥ 1"), "{err}");
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    assert!(!out.exists());

    let r = thermod(&["train", "--data", "/nonexistent", "--lr", "0", "--out", path_str(&out)]);
    assert!(!r.status.success());

    let r = thermod(&["ablate", "--param", "nr", "--values", "1,4", "--data", "/x", "--out", "/x/r.csv"]);
    assert!(!r.status.success());
    assert!(String::from_utf8_lossy(&r.stderr).contains("nr must be"));

    let r = thermod(&["frobnicate"]);
    assert_eq!(r.status.code(), Some(2));
    assert_eq!(String::from_utf8_lossy(&r.stderr).trim_end().lines().count(), 1);
}

#[test]
fn missing_data_dir_is_a_clean_error() {
    let dir = tempfile::tempdir().unwrap();
    let r = thermod(&[
        "train",
        "--data",
        path_str(&dir.path().join("nothing")),
        "--out",
        path_str(&dir.path().join("m.thod")),
    ]);
    assert!(!r.status.success());
    let err = String::from_utf8_lossy(&r.stderr);
    assert!(err.starts_with("thermod: "), "{err}");
}

#[test]
fn train_eval_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth_small(dir.path());
    let model = dir.path().join("m.thod");
    thermod_ok(&[
        "train", "--data", &data, "--nr", "3", "--epochs", "2", "--fold", "2", "--out", path_str(&model),
    ]);
    let history = std::fs::read_to_string(dir.path().join("m.history.csv")).unwrap();
    let lines: Vec<&str> = history.lines().collect();
    assert_eq!(lines[0], "epoch,train_loss,test_mse_norm,test_mse_degps");
    assert_eq!(lines.len(), 3);
    let last: Vec<f64> = lines[2].split(',').map(|v| v.parse().unwrap()).collect();
    assert!((last[3] - last[2] * 40_000.0).abs() <= 1e-9 * last[3].max(1.0));

    let csv = dir.path().join("eval.csv");
    let r = thermod_ok(&["eval", "--data", &data, "--model", path_str(&model), "--fold", "2", "--out", path_str(&csv)]);
    let stdout = String::from_utf8_lossy(&r.stdout);
    assert!(stdout.contains("garden-3"), "{stdout}");
    let eval = std::fs::read_to_string(&csv).unwrap();
    let row: Vec<&str> = eval.lines().nth(1).unwrap().split(',').collect();
    // evaluating the held-out fold reproduces the final history entry
    let mse: f64 = row[3].parse().unwrap();
    assert!((mse - last[2]).abs() < 1e-12, "{mse} vs {}", last[2]);
}

#[test]
fn data_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth_small(dir.path());
    let model = dir.path().join("m.thod");
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_thermod"))
        .args(["train", "--nr", "3", "--epochs", "1", "--out", path_str(&model)])
        .env("THERMOD_DATA", &data)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let history = std::fs::read_to_string(dir.path().join("m.history.csv")).unwrap();
    // no held-out set: test columns are empty
    assert!(history.lines().nth(1).unwrap().ends_with(",,"));
}

#[test]
fn ablate_then_stats() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth_small(dir.path());
    let results = dir.path().join("r.csv");
    let stats = dir.path().join("s.csv");
    thermod_ok(&[
        "ablate", "--param", "nf", "--values", "2,3", "--nr", "3", "--epochs", "1", "--data", &data,
        "--out", path_str(&results), "--stats", path_str(&stats), "--jobs", "2",
    ]);
    let text = std::fs::read_to_string(&results).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 6);
    assert!(text.lines().nth(1).unwrap().starts_with("nf,2,0,"));

    let again = dir.path().join("s2.csv");
    thermod_ok(&["stats", "--results", path_str(&results), "--out", path_str(&again)]);
    assert_eq!(std::fs::read(&stats).unwrap(), std::fs::read(&again).unwrap());

    let degps = dir.path().join("s3.csv");
    thermod_ok(&["stats", "--results", path_str(&results), "--out", path_str(&degps), "--unit", "degps"]);
    let norm_median: f64 = std::fs::read_to_string(&again).unwrap().lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    let degps_median: f64 = std::fs::read_to_string(&degps).unwrap().lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((degps_median - norm_median * 40_000.0).abs() < 1e-6 * degps_median);
}

#[test]
fn import_builds_a_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("walk.csv");
    let mut text = String::new();
    for (i, label) in [30.0, 30.0, 30.0, -30.0].iter().enumerate() {
        let cells: Vec<String> = (0..768).map(|p| format!("{}", 20.0 + ((p + i) % 7) as f32)).collect();
        text.push_str(&format!("{},{label}\n", cells.join(",")));
    }
    std::fs::write(&csv, text).unwrap();
    let data = dir.path().join("ds");
    let r = thermod_ok(&["import", "--csv", path_str(&csv), "--env", "Garden", "--data", path_str(&data)]);
    assert!(String::from_utf8_lossy(&r.stdout).contains("4 frames, 2 segments"));
    let acqs = thermal_odometry::dataset::load_dataset(&data).unwrap();
    assert_eq!(acqs.len(), 1);
    assert_eq!(acqs[0].id, "walk");

    // importing the same id twice is refused
    let r = thermod(&["import", "--csv", path_str(&csv), "--env", "Garden", "--data", path_str(&data)]);
    assert!(!r.status.success());
}
