//! End-to-end tests of the command-line surface: CSV shape, header
//! replay, validation exit codes, config-file precedence.

use std::path::PathBuf;
use std::process::{Command, Output};

fn mbm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mbm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("mbm-cli-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn pep_rows_match_library_values() {
    let out = mbm(&[
        "pep",
        "--nr",
        "2",
        "--snr-db-from",
        "3",
        "--snr-db-to",
        "13",
        "--snr-db-step",
        "5",
        "--workers",
        "1",
    ]);
    assert!(out.status.success());
    let rows = data_rows(&stdout(&out));
    assert_eq!(rows.len(), 3);
    for row in rows {
        let snr_db: f64 = row[0].parse().unwrap();
        let c = 10f64.powf(snr_db / 10.0) / 2.0;
        assert!((row[1].parse::<f64>().unwrap() - c).abs() < 1e-8 * c);
        assert_eq!(row[2], "4");
        let exact: f64 = row[3].parse().unwrap();
        let want = mbm::analysis::pep_exact(c, 4).unwrap().value;
        assert!((exact - want).abs() <= 1e-8 * want.max(1e-12));
        let quad: f64 = row[5].parse().unwrap();
        assert!((quad - want).abs() < 1e-8);
        let bound: f64 = row[6].parse().unwrap();
        assert!(bound >= exact);
    }
}

#[test]
fn csv_cells_have_nine_significant_digits() {
    let out = mbm(&["pep", "--snr-db-to", "0", "--workers", "1"]);
    let text = stdout(&out);
    let rows = data_rows(&text);
    // 1.23456789e-1 shape: mantissa with 8 decimals.
    let cell = &rows[0][3];
    let (mantissa, _exp) = cell.split_once('e').expect("scientific notation");
    let digits = mantissa.replace(['-', '.'], "");
    assert_eq!(digits.len(), 9, "cell {cell}");
}

#[test]
fn replay_is_byte_identical_across_worker_counts() {
    for (cmd, extra) in [
        (
            "uncoded",
            vec![
                "--nr",
                "2",
                "--m-count",
                "4",
                "--snr-db-from",
                "6",
                "--snr-db-to",
                "12",
                "--snr-db-step",
                "3",
                "--trials",
                "3000",
                "--ensembles",
                "40",
                "--seed",
                "7",
            ],
        ),
        (
            "coded",
            vec![
                "--nr",
                "2",
                "--code",
                "3,1,5",
                "--snr-db-from",
                "2",
                "--snr-db-to",
                "8",
                "--snr-db-step",
                "3",
                "--trials",
                "2000",
                "--ensembles",
                "30",
                "--seed",
                "5",
            ],
        ),
        (
            "selection",
            vec![
                "--nr",
                "2",
                "--m-count",
                "8",
                "--energy-e",
                "0.5",
                "--target-ser",
                "3e-2",
                "--snr-db-from",
                "8",
                "--snr-db-to",
                "20",
                "--snr-db-step",
                "3",
                "--trials",
                "2000",
                "--ensembles",
                "40",
                "--seed",
                "3",
            ],
        ),
    ] {
        let first = tmp(&format!("{cmd}-a.csv"));
        let second = tmp(&format!("{cmd}-b.csv"));
        let mut args = vec![cmd, "--workers", "1", "--out", first.to_str().unwrap()];
        args.extend(extra.iter().copied());
        let out = mbm(&args);
        assert!(
            out.status.success(),
            "{cmd}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let out = mbm(&[
            "replay",
            "--from",
            first.to_str().unwrap(),
            "--out",
            second.to_str().unwrap(),
            "--workers",
            "2",
        ]);
        assert!(out.status.success(), "{cmd} replay failed");
        let a = std::fs::read(&first).unwrap();
        let b = std::fs::read(&second).unwrap();
        assert_eq!(a, b, "{cmd}: replay differs");
        std::fs::remove_file(first).ok();
        std::fs::remove_file(second).ok();
    }
}

#[test]
fn validation_errors_exit_with_two() {
    // Odd dimension count.
    let out = mbm(&["pep", "--dims", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
    // Both --nr and --dims.
    let out = mbm(&["pep", "--nr", "2", "--dims", "4"]);
    assert_eq!(out.status.code(), Some(2));
    // q not a prime power.
    let out = mbm(&["coded", "--code", "3,1,6"]);
    assert_eq!(out.status.code(), Some(2));
    // m-count and rate-r together.
    let out = mbm(&["uncoded", "--m-count", "4", "--rate-r", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_grid_emits_header_only() {
    let out = mbm(&["pep", "--snr-db-from", "9", "--snr-db-to", "3"]);
    assert!(out.status.success());
    assert!(data_rows(&stdout(&out)).is_empty());
    let text = stdout(&out);
    assert!(text
        .lines()
        .any(|l| l == "snr_db,c,n,pep_exact,pep_hypergeometric,pep_quadrature,pep_upper_bound"));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let cfg = tmp("file.cfg");
    std::fs::write(
        &cfg,
        "dims = 6\nsnr-db-from = 2\nsnr-db-to = 4\nsnr-db-step = 1\n",
    )
    .unwrap();
    let out = mbm(&["pep", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("# dims = 6"));
    assert!(text.contains("# snr-db-from = 2"));
    // Flag beats file.
    let out = mbm(&[
        "pep",
        "--config",
        cfg.to_str().unwrap(),
        "--snr-db-from",
        "3",
    ]);
    assert!(stdout(&out).contains("# snr-db-from = 3"));
    std::fs::remove_file(cfg).ok();
}

#[test]
fn uncoded_emits_fitted_slope_comment() {
    let out = mbm(&[
        "uncoded",
        "--nr",
        "1",
        "--m-count",
        "2",
        "--snr-db-from",
        "0",
        "--snr-db-to",
        "9",
        "--snr-db-step",
        "3",
        "--trials",
        "4000",
        "--ensembles",
        "20",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("# fitted-slope: "));
}

#[test]
fn coded_embeds_code_description() {
    let out = mbm(&[
        "coded",
        "--code",
        "4,2,4",
        "--nr",
        "1",
        "--snr-db-from",
        "0",
        "--snr-db-to",
        "0",
        "--trials",
        "500",
        "--ensembles",
        "5",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(
        text.contains("# code-description: RS(4,2,3) over GF(2^2) poly=[1,1,1] eval=[0,1,2,3]"),
        "missing or wrong code description in:\n{text}"
    );
}

#[test]
fn selfcheck_passes_and_exits_zero() {
    let out = mbm(&["selfcheck"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().filter(|l| l.starts_with("PASS ")).count() >= 8);
    assert!(!text.contains("FAIL"));
}
