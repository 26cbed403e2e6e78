use std::process::{Command, Output};

fn qrr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrr"))
        .args(args)
        .env_remove("QRR_DATA_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_identity_json() {
    let o = qrr(&["verify", "--id", "rr1-a", "--order", "200", "--json", "--no-timing"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["status"], "PASS");
    assert_eq!(v["N"], 200);
    assert_eq!(v["id"], "rr1-a");
}

#[test]
fn unknown_id_is_usage_error() {
    let o = qrr(&["verify", "--id", "nonexistent"]);
    assert_eq!(o.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nonexistent"));
}

#[test]
fn bad_flag_is_usage_error() {
    assert_eq!(qrr(&["verify", "--bogus"]).status.code(), Some(64));
    assert_eq!(qrr(&["verify", "--id", "rr1-a", "-N", "0"]).status.code(), Some(64));
    assert_eq!(qrr(&["--help"]).status.code(), Some(0));
}

#[test]
fn partition_table_columns_agree() {
    let o = qrr(&["partitions", "--theorem", "tGGn", "--max", "80"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('n'))
        .map(|l| l.split('\t').collect())
        .collect();
    assert_eq!(rows.len(), 81);
    assert!(rows.iter().all(|r| r[1] == r[2]));
    assert_eq!(rows[7], ["7", "2", "2"]);
}

#[test]
fn corrupted_file_fails_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.qrr");
    std::fs::write(
        &path,
        "rr1-bad: sum(n>=0) q^(n^2) / poch(q; q; n) = 1 / poch(q, q^3; q^5; inf)\n",
    )
    .unwrap();
    let o = qrr(&["verify", "--file", path.to_str().unwrap(), "-N", "50", "--json"]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["status"], "FAIL");
    assert!(v["first_mismatch"]["exp"].as_i64().unwrap() <= 10);
}

#[test]
fn malformed_file_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.qrr");
    std::fs::write(&path, "oops: sum(n>=0 q^n = 1\n").unwrap();
    let o = qrr(&["verify", "--file", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(64));
    let o = qrr(&["verify", "--file", "/nonexistent/x.qrr"]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn data_dir_override() {
    let dir = tempfile::tempdir().unwrap();
    let cat = dir.path().join("catalog");
    std::fs::create_dir(&cat).unwrap();
    std::fs::write(
        cat.join("one.qrr"),
        "euler: sum(n>=0) q^n / poch(q; q; n) = 1 / poch(q; q; inf)\n",
    )
    .unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_qrr"))
        .args(["list"])
        .env("QRR_DATA_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);
    assert!(stdout(&o).starts_with("euler"));
}

#[test]
fn json_is_deterministic_without_timing() {
    let args = ["watson", "--nmax", "2", "-N", "30", "--json", "--no-timing"];
    let a = qrr(&args);
    let b = qrr(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn search_builtin_family() {
    let o = qrr(&["search", "--family", "gg-triple", "--json", "--no-timing"]);
    assert_eq!(o.status.code(), Some(0));
    let known: Vec<String> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
        .flat_map(|v| {
            v["known"]
                .as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_str().unwrap().to_string())
                .collect::<Vec<_>>()
        })
        .collect();
    for id in ["GG1", "id13", "GG2"] {
        assert!(known.iter().any(|k| k == id), "{id} missing from {known:?}");
    }
}

#[test]
fn prodmake_expression() {
    let o = qrr(&["prodmake", "--expr", "1 / poch(q, q^4; q^5; inf)", "-N", "60", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["period"], 5);
    assert_eq!(v["pattern"], serde_json::json!([1, 0, 0, 1, 0]));
}

#[test]
fn qdiff_small() {
    let o = qrr(&["qdiff", "--nmax", "12", "--vmax", "5", "-N", "30"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn chains_by_name() {
    let o = qrr(&["chains", "--name", "c4", "-N", "40"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS c4"));
    assert_eq!(qrr(&["chains", "--name", "nope"]).status.code(), Some(64));
}
