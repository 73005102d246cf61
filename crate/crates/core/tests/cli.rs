use std::process::{Command, Output};

use rbf_bernstein::report::Report;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rbf-bernstein"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn csv_is_the_default_format() {
    let o = run(&[
        "specfun",
        "eval",
        "--fn",
        "J",
        "--nu",
        "0.5",
        "--x",
        "3.141592653589793",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("fn,nu,x,value"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..3], ["J", "0.5", "3.141592653589793"]);
    assert!(row[3].parse::<f64>().unwrap().abs() < 1e-15);
}

#[test]
fn json_reports_parse_back() {
    let o = run(&[
        "rbf",
        "admissible",
        "--family",
        "sobolev",
        "--beta",
        "3",
        "--out",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r = Report::parse_json(&stdout(&o)).unwrap();
    assert_eq!(r.command, "rbf admissible");
    assert_eq!(r.config["family"], "sobolev");
    assert_eq!(r.summary["c1"], 1.0);
    assert_eq!(r.summary["pass"], true);
}

#[test]
fn output_files_take_their_format_from_the_extension() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("k.json");
    let csv = dir.path().join("k.csv");
    for path in [&json, &csv] {
        let o = run(&[
            "kernel",
            "eval",
            "--class",
            "K2",
            "--r",
            "0.5",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        assert!(o.stdout.is_empty());
    }
    let r = Report::parse_json(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(r.table.columns, ["class", "sigma", "dim", "r", "value"]);
    assert!(std::fs::read_to_string(&csv)
        .unwrap()
        .starts_with("class,sigma,dim,r,value\n"));
}

#[test]
fn generated_points_feed_the_geometry_report() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("p.txt");
    let o = run(&[
        "geom",
        "generate",
        "--spacing",
        "0.25",
        "--write",
        pts.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1 + 5);
    let o = run(&[
        "geom",
        "report",
        "--in",
        pts.to_str().unwrap(),
        "--density",
        "401",
        "--out",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r = Report::parse_json(&stdout(&o)).unwrap();
    assert_eq!(r.summary["q"], 0.125);
    assert_eq!(r.summary["h"], 0.125);
}

#[test]
fn grid_norms_from_binary_files() {
    use rbf_bernstein::network::GridField;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.bin");
    let f = GridField::from_fn(vec![-10.0], 1.0 / 32.0, vec![641], |x| {
        (-0.5 * x[0] * x[0]).exp()
    })
    .unwrap();
    f.write_binary(&path).unwrap();
    let o = run(&[
        "net",
        "norm",
        "--in",
        path.to_str().unwrap(),
        "--p",
        "inf",
        "--out",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r = Report::parse_json(&stdout(&o)).unwrap();
    assert_eq!(r.config["p"], "inf");
    assert_eq!(
        stdout(&run(&[
            "net",
            "norm",
            "--in",
            path.to_str().unwrap(),
            "--p",
            "inf"
        ]))
        .lines()
        .nth(1),
        Some("0.0,inf,1.0")
    );
}

#[test]
fn failed_contracts_exit_with_one() {
    let o = run(&[
        "hankel", "decay", "--mode", "tail", "--n", "2", "--alphas", "1:32:lin",
    ]);
    assert_eq!(o.status.code(), Some(0));
    // the origin-mode rate in one dimension is alpha^{-5/2}, short of n = 3
    let o = run(&[
        "hankel", "decay", "--mode", "origin", "--n", "3", "--alphas", "1:32:lin",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("contract failed: decay"));
    assert!(!o.stdout.is_empty());
}

#[test]
fn errors_exit_with_two() {
    let o = run(&["specfun", "eval", "--fn", "K", "--nu", "1", "--x", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    assert_eq!(
        run(&["geom", "report", "--in", "/nonexistent/points.txt"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["rbf", "admissible", "--family", "cubic"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["stability", "sweep", "--p", "0.5"]).status.code(),
        Some(2)
    );
    // usage errors come from the argument parser, also with status 2
    assert_eq!(
        run(&["kernel", "eval", "--class", "K3", "--r", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
}

#[test]
fn config_files_are_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "levels = 3\np = 1\ncoarsest = 2\ntrials = 2\n").unwrap();
    let o = run(&[
        "bernstein",
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--p",
        "2",
        "--out",
        "json",
    ]);
    let r = Report::parse_json(&stdout(&o)).unwrap();
    assert_eq!(r.config["levels"], "3");
    assert_eq!(r.config["p"], "2");
    assert_eq!(r.table.rows.len(), 3);
}
