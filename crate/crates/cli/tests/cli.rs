use reacdiff_cli::csvio::read_field;
use std::path::Path;
use std::process::{Command, Output};

fn reacdiff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reacdiff"))
        .args(args)
        .env_remove("REACDIFF_WORKERS")
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn compare_writes_triplet_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cmp");
    let o = reacdiff(&[
        "compare",
        "--problem",
        "example_6_1",
        "--t",
        "0.01",
        "--methods",
        "short-time,series:K=20,fd",
        "--exclude",
        "5,1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    for name in ["short-time", "series", "fd"] {
        let f = read_field(std::fs::File::open(out.join(format!("{name}.csv"))).unwrap()).unwrap();
        assert_eq!(f.nx(), 101);
        assert_eq!(f.ts, vec![0.01]);
        assert!(f.ux.is_some());
    }
    let s = json(&out.join("summary.json"));
    assert_eq!(s["schema"], 1);
    assert_eq!(s["status"], "ok");
    let rows = s["comparisons"].as_array().unwrap();
    // three pairs, two components, two regions
    assert_eq!(rows.len(), 12);
    let away = rows
        .iter()
        .find(|r| {
            r["a"].as_str().unwrap().starts_with("short-time")
                && r["b"] == "series:K=20"
                && r["component"] == "u"
                && r["region"] != "all"
        })
        .unwrap();
    assert!(away["max_abs"].as_f64().unwrap() < 5e-3);
    assert!(s["methods"][2]["elapsed_ms"].as_f64().unwrap() > 0.0);
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = [
        "solve",
        "--problem",
        "example_6_1",
        "--method",
        "operational",
        "--nx",
        "21",
        "--t",
        "0.005,0.01,0.5",
    ];
    let a = reacdiff(&args);
    let b = reacdiff(&args);
    assert_eq!(a.status.code(), Some(0));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
    let c = Command::new(env!("CARGO_BIN_EXE_reacdiff"))
        .args(args)
        .env("REACDIFF_WORKERS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn zero_problem_gives_zero_everywhere() {
    for method in ["short-time", "operational", "series", "fd:dx=0.01:dt=1e-4"] {
        let o = reacdiff(&[
            "solve",
            "--problem",
            "zero",
            "--method",
            method,
            "--nx",
            "11",
            "--t",
            "0.002,0.005",
        ]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{method}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let f = read_field(o.stdout.as_slice()).unwrap();
        assert_eq!(f.u.len(), 22);
        assert!(f.u.iter().all(|v| *v == 0.0), "{method}: {:?}", f.u);
        assert!(f.ux.unwrap().iter().all(|v| *v == 0.0), "{method}");
    }
}

#[test]
fn residual_table_is_small() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("res.csv");
    let o = reacdiff(&[
        "residual",
        "--problem",
        "example_6_1",
        "--p",
        "1,10,100",
        "--x",
        "2,3,7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["x", "p", "h", "residual"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 27);
    for r in &rows {
        let v: f64 = r[3].parse().unwrap();
        assert!(v.abs() < 1e-6, "{r:?}");
    }
    assert_eq!(
        json(&out.with_extension("json"))["residuals"]
            .as_array()
            .unwrap()
            .len(),
        9
    );
}

#[test]
fn invert_known_pair() {
    let o = reacdiff(&[
        "invert",
        "--pair",
        "decay:0.5",
        "--t",
        "0.5,1,2",
        "--inversion",
        "talbot:24",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,value,exact,rel_error"));
    for l in lines {
        let rel: f64 = l.rsplit(',').next().unwrap().parse().unwrap();
        assert!(rel < 1e-9, "{l}");
    }
    let s: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(s["inversion"]["method"], "fixed-talbot(M=24)");
}

#[test]
fn exit_codes() {
    assert_eq!(
        reacdiff(&["solve", "--problem", "no_such_problem"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        reacdiff(&["solve", "--problem", "zero", "--method", "magic"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(reacdiff(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        reacdiff(&["invert", "--pair", "one", "--t", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        reacdiff(&["solve", "--problem", "zero", "--x", "5"])
            .status
            .code(),
        Some(2)
    );

    // a time past the short-time step completes, with the points reported
    let o = reacdiff(&[
        "solve",
        "--problem",
        "example_6_1",
        "--nx",
        "3",
        "--t",
        "0.005,0.02",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let s: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(s["status"], "completed-with-warnings");
    assert_eq!(s["failures"].as_array().unwrap().len(), 3);
    let f = read_field(o.stdout.as_slice()).unwrap();
    assert!(f.u[..3].iter().all(|v| v.is_finite()));
    assert!(f.u[3..].iter().all(|v| v.is_nan()));
}

#[test]
fn problem_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    std::fs::write(
        &path,
        r#"{"schema": 1, "a": 1, "b": 0, "l1": 0, "l2": 1, "horizon": 0.01,
            "phi": {"type": "constant", "value": 0},
            "bc1": {"alpha": 1, "beta": 0, "g": {"type": "constant", "value": 1}},
            "bc2": {"alpha": 0, "beta": 1}}"#,
    )
    .unwrap();
    let o = reacdiff(&[
        "solve",
        "--problem",
        path.to_str().unwrap(),
        "--method",
        "fd:dx=0.01:dt=1e-5",
        "--nx",
        "5",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let f = read_field(o.stdout.as_slice()).unwrap();
    assert_eq!(f.u[0], 1.0);
    // heat entering from the left has not reached the far end yet
    assert!(f.u[4].abs() < 1e-6);

    std::fs::write(&path, r#"{"schema": 2}"#).unwrap();
    assert_eq!(
        reacdiff(&["solve", "--problem", path.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn bench_reports_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bench.json");
    let o = reacdiff(&[
        "bench",
        "--points",
        "1",
        "--repeats",
        "1",
        "--warmup",
        "0",
        "--json",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stdout)
        .unwrap()
        .contains("low confidence"));
    let r = json(&path);
    assert_eq!(r["low_confidence"], true);
    assert!(r["ratio"].as_f64().unwrap() > 0.0);
    assert_eq!(r["fd"].as_array().unwrap().len(), 2);
}
