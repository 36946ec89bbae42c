use std::fs;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_joint-select"));
    c.env_remove("JOINT_SELECT_OUT_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn exact_default_row() {
    let o = run(&["exact"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("model,n,k,phi_a,phi_h,sigma_a,sigma_h,weight,p_joint"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let p_joint: f64 = row[8].parse().unwrap();
    assert!((p_joint - 0.6929180879000201).abs() < 1e-12);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["exact", "--k", "7"]).status.code(), Some(1));
    assert_eq!(run(&["exact", "--model", "rum"]).status.code(), Some(1));
    assert_eq!(run(&["simulate", "--format", "svg"]).status.code(), Some(1));
    assert_eq!(run(&["nonsense"]).status.code(), Some(1));
    assert_eq!(run(&["exact", "--phi-a", "abc"]).status.code(), Some(1));
    assert_eq!(
        run(&["bijection", "--n", "3", "--k", "3"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn simulate_is_seeded() {
    let args = [
        "simulate", "--model", "rum", "--n", "6", "--trials", "3000", "--seed", "5", "--format",
        "json",
    ];
    let a = stdout(&run(&args));
    let b = stdout(&run(&args));
    assert_eq!(a, b);
    assert!(a.contains("\"seed\": 5"));
    let other = stdout(&run(&[
        "simulate", "--model", "rum", "--n", "6", "--trials", "3000", "--seed", "6", "--format",
        "json",
    ]));
    assert_ne!(a, other);
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "[pipeline]\nn = 4\nk = 3\nphi_a = 0.5\n[output]\nformat = \"json\"\n",
    )
    .unwrap();
    let out = dir.path().join("res.json");
    let o = run(&[
        "exact",
        "--config",
        cfg.to_str().unwrap(),
        "--k",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["n"], 4);
    assert_eq!(v["k"], 2);
    assert_eq!(v["phi_a"], 0.5);

    fs::write(&cfg, "[pipeline]\nbogus = 1\n").unwrap();
    assert_eq!(
        run(&["exact", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn env_sets_default_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .env("JOINT_SELECT_OUT_DIR", dir.path())
        .args(["region", "--resolution", "8", "--format", "svg"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    for f in [
        "mallows_region.csv",
        "mallows_region.meta.json",
        "mallows_region.svg",
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let csv = fs::read_to_string(dir.path().join("mallows_region.csv")).unwrap();
    assert_eq!(csv.lines().count(), 65);

    let flag_dir = dir.path().join("flag");
    let o = bin()
        .env("JOINT_SELECT_OUT_DIR", dir.path())
        .args([
            "figure",
            "mallows-region",
            "--resolution",
            "4",
            "--out",
            flag_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(flag_dir.join("mallows_region.csv").exists());
}

#[test]
fn bijection_report_json() {
    let o = run(&["bijection", "--n", "4", "--k", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["good_count"], v["bad_count"]);
    assert_eq!(v["counterexamples"].as_array().unwrap().len(), 0);
}

#[test]
fn small_figures_write_datasets() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for (name, stem) in [
        ("mallows-anchor", "mallows_anchor"),
        ("rum-anchor", "rum_anchor"),
    ] {
        let o = run(&[
            "figure",
            name,
            "--n",
            "4",
            "--trials",
            "500",
            "--batches",
            "2",
            "--out",
            d,
            "--format",
            "svg",
        ]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        let meta: serde_json::Value = serde_json::from_str(
            &fs::read_to_string(dir.path().join(format!("{stem}.meta.json"))).unwrap(),
        )
        .unwrap();
        assert_eq!(meta["parameters"]["n"], "4");
        assert!(fs::read_to_string(dir.path().join(format!("{stem}.svg")))
            .unwrap()
            .starts_with("<svg"));
    }
    let o = run(&[
        "figure",
        "rum-contour",
        "--resolution",
        "2",
        "--trials",
        "500",
        "--out",
        d,
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("rum_contour.json")).unwrap())
            .unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn verify_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--out", dir.path().to_str().unwrap()]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 12);
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(v["all_passed"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 12);
}
