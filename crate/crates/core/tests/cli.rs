use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_svgstein")).args(args).output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("svgstein-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn dist_pdf_csv() {
    let o = run(&["dist", "pdf", "--r", "2", "--x", "0,1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# svgstein dist schema=1"));
    assert!(lines[0].contains("seed="));
    assert_eq!(lines[1], "x,value");
    let v: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
    assert!((v - 0.5).abs() < 1e-14);
}

#[test]
fn dist_sample_is_seeded() {
    let a = stdout(&run(&["dist", "sample", "--r", "1.5", "--n", "20", "--seed", "7"]));
    let b = stdout(&run(&["dist", "sample", "--r", "1.5", "--n", "20", "--seed", "7"]));
    let c = stdout(&run(&["dist", "sample", "--r", "1.5", "--n", "20", "--seed", "8"]));
    assert_eq!(a, b);
    assert_ne!(a, c);
    // One value per line after the header, so the output feeds `distance`.
    assert_eq!(a.lines().count(), 21);
}

#[test]
fn bound_exit_codes() {
    let args = ["bound", "--id", "six_moment", "--r", "1", "--sigma", "1", "--k2", "1", "--k3", "0", "--k4", "6", "--k6", "132"];
    let ok = run(&args);
    assert_eq!(ok.status.code(), Some(0));
    let rep: serde_json::Value = serde_json::from_str(&stdout(&ok)).unwrap();
    assert!((rep["bound_value"].as_f64().unwrap() - 1.4230).abs() < 1e-4);

    let mut over = args.to_vec();
    over.extend(["--empirical", "2"]);
    assert_eq!(run(&over).status.code(), Some(2));
    let mut under = args.to_vec();
    under.extend(["--empirical", "1"]);
    assert_eq!(run(&under).status.code(), Some(0));

    assert_eq!(run(&["bound", "--id", "no_such_bound"]).status.code(), Some(1));
    assert_eq!(run(&["dist", "pdf", "--r", "-1"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
}

#[test]
fn stein_verify_report() {
    let report = scratch("report.json");
    let o = run(&[
        "stein",
        "--h",
        "indicator:0.5",
        "--x",
        "-1,0.5,2",
        "--verify",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().nth(1).unwrap() == "x,f,f1,f2,residual");
    let rep: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let rows = rep.as_array().unwrap();
    assert!(!rows.is_empty());
    for row in rows {
        assert!(row["bound_id"].is_string());
        assert!(row["sup_ratio"].as_f64().unwrap() <= 1.0);
        assert!(row["argmax_x"].is_number());
    }
}

#[test]
fn distance_reads_sample_file() {
    let f = scratch("sample.txt");
    fs::write(&f, "# comment\n0.1\n\n-0.3\n1.2\n").unwrap();
    let o = run(&["distance", "--metric", "kolmogorov", "--sample", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["n"], 3);
    fs::write(&f, "0.1\nabc\n").unwrap();
    let bad = run(&["distance", "--metric", "kolmogorov", "--sample", f.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn experiment_from_config_is_reproducible() {
    let cfg = scratch("d2.cfg");
    fs::write(&cfg, "# small run\nexperiment = d2\nm = 50\nn = 50\ntrials = 2000\nseed = 3\n").unwrap();
    let strip = |path: &PathBuf| -> Vec<String> {
        let text = fs::read_to_string(path).unwrap();
        let mut lines = text.lines();
        let head = lines.next().unwrap();
        assert!(head.starts_with("# svgstein results schema=1") && head.contains("seed=3"));
        // Drop the trailing wall_time column.
        lines.map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect()
    };
    let (a, b) = (scratch("a.csv"), scratch("b.csv"));
    for out in [&a, &b] {
        let o = run(&["experiment", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(strip(&a), strip(&b));

    let j = scratch("c.json");
    let o = run(&[
        "experiment",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "4",
        "--format",
        "json",
        "--out",
        j.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&j).unwrap()).unwrap();
    assert_eq!(v["config"]["seed"], 4);
    assert_eq!(v["results"][0]["experiment"], "d2");
}
