use std::process::{Command, Output};

fn tiedleague(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tiedleague"))
        .args(args)
        .env_remove("TIEDLEAGUE_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn count_both_methods_agree() {
    let out = tiedleague(&[
        "count",
        "--teams",
        "4",
        "--method",
        "both",
        "--workers",
        "2",
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("brute-force total: 1083"), "{text}");
    assert!(text.contains("total: 1083"), "{text}");
    assert!(text.contains("agree"), "{text}");
}

#[test]
fn count_json_total_is_a_decimal_string() {
    let out = tiedleague(&[
        "count",
        "--teams",
        "6",
        "--format",
        "json",
        "--workers",
        "1",
    ]);
    assert_eq!(code(&out), 0);
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["total"], "696779523");
    assert_eq!(json["n"], 6);
    assert_eq!(json["method"], "optimized");
    assert_eq!(
        json["breakdown"]["EULERIAN_SPECIAL"]["contribution"],
        "1375952"
    );
    assert!(json["elapsed_ms"].is_u64());
}

#[test]
fn worker_count_does_not_change_json_totals() {
    let render = |workers: &str| {
        let out = tiedleague(&["count", "-n", "5", "--format", "json", "--workers", workers]);
        let mut json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        let obj = json.as_object_mut().unwrap();
        obj.remove("elapsed_ms");
        obj.remove("workers");
        json.to_string()
    };
    assert_eq!(render("1"), render("3"));
    // Worker count may also come from the environment.
    let out = Command::new(env!("CARGO_BIN_EXE_tiedleague"))
        .args(["count", "-n", "3", "--format", "json"])
        .env("TIEDLEAGUE_WORKERS", "3")
        .output()
        .unwrap();
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["workers"], 3);
    assert_eq!(json["total"], "27");
}

#[test]
fn refused_and_invalid_sizes() {
    let out = tiedleague(&["count", "--teams", "9", "--method", "optimized"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unsupported size"));
    assert_eq!(code(&tiedleague(&["count", "--teams", "8"])), 3);
    assert_eq!(
        code(&tiedleague(&["count", "--teams", "6", "--method", "brute"])),
        3
    );
    assert_eq!(code(&tiedleague(&["count", "--teams", "1"])), 2);
    assert_eq!(
        code(&tiedleague(&["count", "--teams", "4", "--workers", "0"])),
        2
    );
    assert_eq!(code(&tiedleague(&["count"])), 2);
}

#[test]
fn verify_up_to_four() {
    let out = tiedleague(&["verify", "--max-teams", "4"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(
        text.lines().filter(|l| l.ends_with(": match")).count(),
        3,
        "{text}"
    );
    assert_eq!(code(&tiedleague(&["verify", "--max-teams", "6"])), 2);
    assert_eq!(code(&tiedleague(&["verify", "--max-teams", "5"])), 2);
}

#[test]
fn profiles_listing() {
    let out = tiedleague(&["profiles", "--teams", "3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().count(), 21);

    let out = tiedleague(&[
        "profiles", "--teams", "5", "--class", "SEARCH", "--format", "json",
    ]);
    assert_eq!(code(&out), 0);
    let rows: Vec<serde_json::Value> = stdout(&out)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(rows.len(), 19);
    for row in rows {
        assert_eq!(row["class"], "SEARCH");
        let p1 = row["p1"].as_u64().unwrap();
        assert!((9..=11).contains(&p1), "{row}");
    }
    assert_eq!(
        code(&tiedleague(&[
            "profiles", "--teams", "3", "--class", "BOGUS"
        ])),
        2
    );
}

#[test]
fn eulerian_table() {
    let out = tiedleague(&["eulerian", "--max", "5"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(
        text.lines().filter(|l| l.contains("agree")).count(),
        4,
        "{text}"
    );
    assert!(text.contains("n=5: 7736"));
    let out = tiedleague(&["eulerian"]);
    assert!(stdout(&out).contains("n=9: 17658221702361472"));
    assert_eq!(code(&tiedleague(&["eulerian", "--max", "10"])), 3);
}

#[test]
fn checkpoint_stop_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    let ledger = dir.path().join("run.jsonl");
    let ledger = ledger.to_str().unwrap();
    let out = tiedleague(&[
        "count",
        "-n",
        "6",
        "--checkpoint",
        ledger,
        "--stop-after",
        "10",
        "--workers",
        "1",
    ]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("resume"));

    let out = tiedleague(&[
        "resume",
        "--checkpoint",
        ledger,
        "--format",
        "json",
        "--workers",
        "2",
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["total"], "696779523");
    assert_eq!(json["resumed_profiles"], 10);

    // Same ledger, different league size.
    let out = tiedleague(&["count", "-n", "5", "--checkpoint", ledger]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("stale checkpoint"));
}

#[test]
fn bench_reports_timings() {
    let out = tiedleague(&["bench", "-n", "5", "--repeat", "2", "--workers", "1"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("total=296081"));
}
