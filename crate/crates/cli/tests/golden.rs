//! Byte-level comparison of CLI output with the files in `tests/golden`,
//! elapsed times masked. `UPDATE_GOLDEN=1` rewrites them.

use std::path::PathBuf;
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn fixture(name: &str) -> String {
    root()
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn natamc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_natamc"))
        .args(args)
        .env_remove("NATAMC_JOBS")
        .output()
        .expect("binary runs")
}

fn mask(stdout: &[u8]) -> String {
    let text = String::from_utf8_lossy(stdout);
    text.lines()
        .map(|line| match line.find("\"elapsed_ms\": ") {
            Some(i) => {
                let comma = if line.ends_with(',') { "," } else { "" };
                format!("{}\"elapsed_ms\": <elapsed>{comma}", &line[..i])
            }
            None => line.to_string(),
        })
        .map(|line| line + "\n")
        .collect()
}

fn golden(name: &str, args: &[&str], code: i32) {
    let out = natamc(args);
    assert_eq!(
        out.status.code(),
        Some(code),
        "{name}: stderr {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let got = mask(&out.stdout);
    let path = root().join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &got).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{name}: {e}"));
    assert_eq!(got, want, "{name}");
}

#[test]
fn check_nr() {
    let m1 = fixture("m1.cgs");
    golden(
        "check_nr.json",
        &[
            "check",
            "--model",
            &m1,
            "--formula",
            "<<1>>^<=3 F p",
            "--mode",
            "nr",
        ],
        0,
    );
}

#[test]
fn check_exhausted() {
    let m1 = fixture("m1.cgs");
    golden(
        "check_exhausted.json",
        &["check", "--model", &m1, "--formula", "<<1>>^<=1 F p"],
        1,
    );
}

#[test]
fn check_recall_default_height() {
    let m1 = fixture("m1.cgs");
    golden(
        "check_recall.json",
        &[
            "check",
            "--model",
            &m1,
            "--formula",
            "<<1>>^<=3 F p",
            "--mode",
            "nR",
        ],
        0,
    );
}

#[test]
fn check_dialects() {
    let m1 = fixture("m1.cgs");
    golden(
        "check_ctl.json",
        &["check-ctl", "--model", &m1, "--formula", "A(top U p)"],
        1,
    );
    golden(
        "check_atl.json",
        &["check-atl", "--model", &m1, "--formula", "<<1>> F p"],
        0,
    );
    golden(
        "check_atl.json",
        &[
            "check",
            "--dialect",
            "atl",
            "--model",
            &m1,
            "--formula",
            "<<1>> F p",
        ],
        0,
    );
}

#[test]
fn prune_both_modes() {
    let m1 = fixture("m1.cgs");
    golden(
        "prune_nr.cgs",
        &[
            "prune",
            "--model",
            &m1,
            "--strategy",
            &fixture("m1_go.strategy"),
        ],
        0,
    );
    golden(
        "prune_recall.cgs",
        &[
            "prune",
            "--model",
            &m1,
            "--strategy",
            &fixture("m1_recall.strategy"),
            "--mode",
            "nR",
            "--height",
            "3",
        ],
        0,
    );
}

#[test]
fn pipeline_paths() {
    golden(
        "pipeline_unsat.json",
        &[
            "pipeline",
            "--model",
            &fixture("m1_nogo.cgs"),
            "--formula",
            "<<1>> F p",
            "--kmax",
            "10",
        ],
        1,
    );
    golden(
        "pipeline_sat.json",
        &[
            "pipeline",
            "--model",
            &fixture("m1.cgs"),
            "--formula",
            "<<1>> F p",
            "--kmax",
            "10",
        ],
        0,
    );
}

#[test]
fn synth_vending() {
    golden(
        "synth_vending.txt",
        &[
            "synth",
            "--model",
            &fixture("vending.cgs"),
            "--formula",
            "<<1>>^<=13 F coffee",
        ],
        0,
    );
}

#[test]
fn bench_rows() {
    let out = natamc(&[
        "bench",
        "--states-list",
        "10,100",
        "--agents-list",
        "1",
        "--k",
        "2",
        "--mode",
        "nr",
        "--density",
        "sparse",
        "--runs",
        "5",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let masked: Vec<String> = text
        .lines()
        .map(|l| {
            let mut cols: Vec<&str> = l.split(',').collect();
            if cols[0] != "states" {
                cols[6] = "<elapsed>";
            }
            cols.join(",")
        })
        .collect();
    assert_eq!(
        masked,
        [
            "states,agents,k,mode,density,runs,avg_elapsed_ms,holds_fraction",
            "10,1,2,nr,sparse,5,<elapsed>,1.000",
            "100,1,2,nr,sparse,5,<elapsed>,1.000",
        ]
    );
}

#[test]
fn usage_errors_exit_2() {
    let m1 = fixture("m1.cgs");
    for args in [
        vec!["check", "--formula", "<<1>>^<=3 F p"],
        vec![
            "pipeline",
            "--model",
            &m1,
            "--formula",
            "<<1>> F p",
            "--kmax",
            "0",
        ],
        vec!["check", "--model", &m1, "--formula", "<<1>>^<=3 F"],
        vec!["check", "--model", "/nonexistent.cgs", "--formula", "p"],
        vec![
            "check",
            "--model",
            &m1,
            "--formula",
            "<<1>>^<=3 F p",
            "--mode",
            "xyz",
        ],
        vec!["check-ctl", "--model", &m1, "--formula", "AF r"],
    ] {
        let out = natamc(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn jobs_do_not_change_output() {
    let m1 = fixture("m1.cgs");
    let args = [
        "check",
        "--model",
        m1.as_str(),
        "--formula",
        "<<1>>^<=4 F p",
    ];
    let base = mask(&natamc(&args).stdout);
    for jobs in ["1", "3"] {
        let flag = mask(&natamc(&[&args[..], &["--jobs", jobs]].concat()).stdout);
        assert_eq!(flag, base);
        let env = Command::new(env!("CARGO_BIN_EXE_natamc"))
            .args(args)
            .env("NATAMC_JOBS", jobs)
            .output()
            .unwrap();
        assert_eq!(mask(&env.stdout), base);
    }
}
