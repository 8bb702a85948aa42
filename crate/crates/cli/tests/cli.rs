use std::process::{Command, Output};

fn fgc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fgc"))
        .args(args)
        .env_remove("FGC_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

#[test]
fn count_j_prints_bare_number() {
    let o = fgc(&["count-j", "--a", "2", "--q", "3", "--n", "2", "--k", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "12");
}

#[test]
fn count_j_json_has_every_determinant() {
    let o = fgc(&["count-j", "--a", "2", "--q", "3", "--n", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["total"], "14");
    assert_eq!(v["per_det"].as_array().unwrap().len(), 2);
}

#[test]
fn dim_of_hurwitz_triangle() {
    let o = fgc(&["dim", "--sig", "0;2,3,7", "--n", "42"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "1805");
    let o = fgc(&["dim", "--sig", "0;2,3,7", "--n", "42", "--oracle"]);
    assert!(o.status.success());
}

#[test]
fn verify_small_table() {
    let o = fgc(&["verify", "table", "--a-max", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("a=2") && text.contains("a=3"));
    assert!(text.ends_with("true"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(fgc(&["--bogus"]).status.code(), Some(2));
    assert_eq!(fgc(&["dim", "--sig", "0;x", "--n", "3"]).status.code(), Some(2));
    assert_eq!(fgc(&["count-j", "--a", "2", "--q", "3", "--n", "2", "--digits", "3"]).status.code(), Some(2));
}

#[test]
fn domain_errors_exit_1() {
    let o = fgc(&["count-j", "--a", "2", "--q", "4", "--n", "2", "--k", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
}

#[test]
fn compare_emits_csv() {
    let o = fgc(&["compare", "--a", "2", "--k", "0", "--q", "3", "--n-max", "3", "--digits", "20"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,exact_count,predicted_mantissa,predicted_exponent,ratio,ratio_minus_one");
    assert_eq!(lines.len(), 4);
    assert!(lines.iter().skip(1).all(|l| l.split(',').count() == 6));
}

#[test]
fn hurwitz_table_cache_recovers_from_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = ["--cache-dir", cache, "hurwitz", "--group", "sym", "--n", "3", "--sig", "0;2,2,3", "--brute"];
    let first = fgc(&args);
    assert!(first.status.success());
    let tables: Vec<_> = std::fs::read_dir(dir.path().join("tables")).unwrap().flatten().collect();
    assert_eq!(tables.len(), 1);
    std::fs::write(tables[0].path(), "{ not json").unwrap();
    let second = fgc(&args);
    assert!(second.status.success());
    assert_eq!(stdout(&first), stdout(&second));
    let text = std::fs::read_to_string(tables[0].path()).unwrap();
    assert!(serde_json::from_str::<serde_json::Value>(&text).is_ok());
}

#[test]
fn certificate_cache_recovers_from_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = ["--cache-dir", cache, "verify", "table", "--a-max", "3"];
    let first = fgc(&args);
    assert!(first.status.success());
    let certs = dir.path().join("certs");
    for e in std::fs::read_dir(&certs).unwrap().flatten() {
        std::fs::write(e.path(), "corrupt").unwrap();
    }
    let second = fgc(&args);
    assert!(second.status.success());
    assert_eq!(stdout(&first), stdout(&second));
}

#[test]
fn config_file_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fgc.conf");
    std::fs::write(&path, "# defaults\nformat = json\n").unwrap();
    let p = path.to_str().unwrap();
    let o = fgc(&["--config", p, "dim", "--sig", "0;2,3,7", "--n", "42"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["dimension"]["dimension"], 1805);
    let o = fgc(&["--config", p, "--format", "text", "dim", "--sig", "0;2,3,7", "--n", "42"]);
    assert_eq!(stdout(&o), "1805");
    std::fs::write(&path, "colour = red\n").unwrap();
    assert_eq!(fgc(&["--config", p, "alpha", "--shape", "2"]).status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("alpha.txt");
    let o = fgc(&["--out", path.to_str().unwrap(), "alpha", "--shape", "3,1"]);
    assert!(o.status.success());
    assert!(std::fs::read_to_string(path).unwrap().starts_with("2/3"));
}

#[test]
fn quick_selftest_passes() {
    let o = fgc(&["selftest", "--level", "quick"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).ends_with("all checks passed"));
}
