use std::path::PathBuf;
use std::process::{Command, Output};

fn shift2iet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shift2iet"))
        .args(args)
        .output()
        .unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn approx_rejects_level_one() {
    let o = shift2iet(&["approx", "--fixture", "fibonacci", "--n", "1"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--n"));
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(code(&shift2iet(&["analyze", "--fixture", "morse"])), 2);
    assert_eq!(
        code(&shift2iet(&["analyze", "--config", r#"{"rules":{"a":"abX"}}"#])),
        2
    );
    assert_eq!(code(&shift2iet(&["analyze", "--config", "{\"rules\":"])), 2);
    assert_eq!(code(&shift2iet(&["analyze"])), 2);
    assert_eq!(code(&shift2iet(&["roundtrip", "thue-morse"])), 2);
    assert_eq!(
        code(&shift2iet(&[
            "analyze",
            "--fixture",
            "fibonacci",
            "--depth",
            "200"
        ])),
        2
    );
}

#[test]
fn verify_fibonacci_passes() {
    let dir = scratch("verify-fib");
    let o = shift2iet(&["verify", "--fixture", "fibonacci", "--out", dir.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let log = std::fs::read_to_string(dir.join("verify.log")).unwrap();
    assert!(log.contains("PASS\tcoding\tC1"));
    assert!(log.ends_with("checks, 0 failed\n"));
    for f in [
        "analyze.tsv",
        "partition.tsv",
        "measures.tsv",
        "approx_100.csv",
        "approx_100.svg",
    ] {
        assert!(dir.join(f).exists(), "{f}");
    }
}

#[test]
fn verify_reports_periodic_failure() {
    let dir = scratch("verify-periodic");
    let o = shift2iet(&[
        "verify",
        "--config",
        r#"{"rules":{"a":"ab","b":"ab"}}"#,
        "--nmax",
        "20",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    let log = std::fs::read_to_string(dir.join("verify.log")).unwrap();
    let fail = log.lines().find(|l| l.starts_with("FAIL")).unwrap();
    assert!(fail.contains("counterexample"), "{fail}");
    assert!(String::from_utf8_lossy(&o.stderr).contains("periodic"));
}

#[test]
fn assert_aperiodic_contradiction() {
    let o = shift2iet(&[
        "analyze",
        "--config",
        r#"{"rules":{"a":"ab","b":"ab"}}"#,
        "--nmax",
        "20",
        "--assert-aperiodic",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn custom_config_warns_without_assertion() {
    let dir = scratch("custom");
    let cfg = dir.join("tm.json");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(
        &cfg,
        r#"{"alphabet":["a","b"],"rules":{"a":"ab","b":"ba"},"n_max":30}"#,
    )
    .unwrap();
    let o = shift2iet(&[
        "analyze",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let tsv = std::fs::read_to_string(dir.join("analyze.tsv")).unwrap();
    assert_eq!(tsv.lines().count(), 31);
    assert!(tsv.lines().nth(4).unwrap().starts_with("4\t10\t4\t"));
}

#[test]
fn plot_thue_morse_has_one_segment_per_factor() {
    let dir = scratch("plot");
    let o = shift2iet(&[
        "plot",
        "--fixture",
        "thue-morse",
        "--n",
        "100",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let svg = std::fs::read_to_string(dir.join("approx_100.svg")).unwrap();
    assert_eq!(svg.matches("<line ").count(), 326);
}

#[test]
fn thread_count_does_not_change_output() {
    let one = scratch("threads-1");
    let many = scratch("threads-4");
    for (dir, threads) in [(&one, "1"), (&many, "4")] {
        let o = Command::new(env!("CARGO_BIN_EXE_shift2iet"))
            .env("SHIFT2IET_THREADS", threads)
            .args([
                "measures",
                "--fixture",
                "rudin-shapiro",
                "--out",
                dir.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert_eq!(code(&o), 0);
    }
    assert_eq!(
        std::fs::read(one.join("measures.tsv")).unwrap(),
        std::fs::read(many.join("measures.tsv")).unwrap()
    );
    let bad = Command::new(env!("CARGO_BIN_EXE_shift2iet"))
        .env("SHIFT2IET_THREADS", "zero")
        .args(["analyze", "--fixture", "fibonacci"])
        .output()
        .unwrap();
    assert_eq!(code(&bad), 2);
}

#[test]
fn roundtrip_fibonacci() {
    let o = shift2iet(&["roundtrip", "fibonacci", "--nmax", "15"]);
    assert_eq!(code(&o), 0);
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("factor sets equal for n <= 15: true"), "{out}");
}
