//! End-to-end checks of the command-line surface: schemas, exit codes,
//! determinism, config-file precedence, and atomic output.

use std::path::{Path, PathBuf};
use std::process::Command;

fn urq() -> Command {
    Command::new(env!("CARGO_BIN_EXE_urq"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("urq-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn bounds_zero_distance_row() {
    let out = scratch("bounds0.csv");
    let status = urq()
        .args(["bounds", "--grid", "0", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = read(&out);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# urq bounds seed=0"));
    assert_eq!(lines.next().unwrap(), "d,exact,lower_first_term,lower_linear,upper");
    let row: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(row[0], 0.0);
    assert_eq!(row[1], 1.0);
    assert!((row[2] - (0.5 + 4.0 / (std::f64::consts::PI.powi(2)))).abs() < 1e-15);
    assert_eq!(row[3], 1.0);
    assert_eq!(row[4], 1.0);
}

#[test]
fn bounds_exact_column_monotone_and_tight() {
    let out = scratch("bounds_grid.csv");
    let status = urq()
        .args(["bounds", "--grid", "0:3:100", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = read(&out);
    let mut last = f64::INFINITY;
    let mut max_gap = 0.0f64;
    for line in text.lines().skip(2) {
        let row: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert!(row[1] <= last + 1e-12, "exact column rose");
        last = row[1];
        max_gap = max_gap.max(row[4] - row[1]);
    }
    // Largest upper-bound gap of the two closed forms (sup over all d at
    // sigma = delta = 1 is ~0.06992, attained near d = 0.186).
    assert!(max_gap <= 0.0700, "gap {max_gap}");
}

#[test]
fn mc_consistency_zero_distance_z_is_zero() {
    let out = scratch("mc0.csv");
    let status = urq()
        .args([
            "mc", "--kind", "consistency", "--grid", "0", "--k", "3", "--trials", "1000",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = read(&out);
    let row: Vec<f64> = text
        .lines()
        .nth(2)
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(row[1], 1.0);
    assert_eq!(row[4], 0.0);
}

#[test]
fn mc_unknown_kind_is_usage_error() {
    let out = scratch("mc_bad.csv");
    let status = urq()
        .args(["mc", "--kind", "nonsense", "--grid", "1", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn precondition_violation_exits_three() {
    let out = scratch("mc_pre.csv");
    // 2 * cap * radius >= delta.
    let status = urq()
        .args([
            "mc", "--kind", "ball", "--grid", "1", "--radius", "0.5", "--cap", "2", "--delta",
            "1", "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
    assert!(!out.exists());
}

#[test]
fn unwritable_output_exits_nonzero_without_partial_file() {
    let out = scratch("no-such-dir").join("x.csv");
    let status = urq()
        .args(["bounds", "--grid", "0:1:4", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    assert!(!out.exists());
    // And no stray temporary next to it either.
    assert!(!out.parent().unwrap().exists());
}

#[test]
fn decay_single_m_flags_insufficient_fit() {
    let out = scratch("decay1.csv");
    let status = urq()
        .args([
            "decay", "--k", "2", "--m-list", "10", "--trials", "50", "--delta", "0.3", "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = read(&out);
    assert!(text.lines().last().unwrap().contains("insufficient points"), "{text}");
}

#[test]
fn decay_schema_and_guarantee_column() {
    let out = scratch("decay.csv");
    let status = urq()
        .args([
            "decay", "--k", "2", "--m-list", "10,20,30", "--trials", "300", "--delta", "0.2",
            "--seed", "5", "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = read(&out);
    assert_eq!(text.lines().nth(1).unwrap(), "m,worst,mean,guarantee_d");
    let g: Vec<f64> = text
        .lines()
        .skip(2)
        .take(3)
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert!(g[0] > g[1] && g[1] > g[2], "guarantee column not decreasing: {g:?}");
}

#[test]
fn plan_similar_model_row() {
    let out = scratch("plan_similar.csv");
    let status = urq()
        .args([
            "plan", "--model", "similar", "--k", "4", "--radius", "0.5", "--d", "0.1", "--p0",
            "0.001", "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = read(&out);
    assert_eq!(
        text.lines().nth(1).unwrap(),
        "model,d,p0,c_o,c_r,covering_log,required_m"
    );
    let fields: Vec<&str> = text.lines().nth(2).unwrap().split(',').collect();
    assert_eq!(fields[0], "similar");
    let required: u64 = fields[6].parse().unwrap();
    assert!(required >= 1);
}

#[test]
fn plan_malformed_model_is_usage_error() {
    let out = scratch("plan_bad.csv");
    let status = urq()
        .args(["plan", "--model", "torus", "--k", "4", "--d", "0.1", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn config_file_supplies_and_flags_override() {
    let cfg = scratch("conf.cfg");
    std::fs::write(&cfg, "grid = 0:1:3\nsigma = 2.0\ndelta = 1.0\n").unwrap();
    let out1 = scratch("cfg1.csv");
    let status = urq()
        .args(["bounds", "--config"])
        .arg(&cfg)
        .args(["--out"])
        .arg(&out1)
        .status()
        .unwrap();
    assert!(status.success());
    // Flag overrides the file's sigma; row values must differ.
    let out2 = scratch("cfg2.csv");
    let status = urq()
        .args(["bounds", "--config"])
        .arg(&cfg)
        .args(["--sigma", "1.0", "--out"])
        .arg(&out2)
        .status()
        .unwrap();
    assert!(status.success());
    let row = |p: &Path| read(p).lines().nth(3).unwrap().to_string();
    assert_ne!(row(&out1), row(&out2));
}

#[test]
fn outputs_byte_identical_across_runs() {
    for (name, args) in [
        ("det_bounds", vec!["bounds", "--grid", "0:2:50", "--seed", "9"]),
        (
            "det_mc",
            vec![
                "mc", "--kind", "consistency", "--grid", "0.25,0.5,1.0", "--k", "4", "--trials",
                "20000", "--seed", "9",
            ],
        ),
        (
            "det_decay",
            vec![
                "decay", "--k", "2", "--m-list", "10,20,30", "--trials", "200", "--delta",
                "0.2", "--seed", "9",
            ],
        ),
        (
            "det_plan",
            vec!["plan", "--model", "unitball", "--k", "9", "--d", "0.25", "--seed", "9"],
        ),
    ] {
        let out_a = scratch(&format!("{name}_a.csv"));
        let out_b = scratch(&format!("{name}_b.csv"));
        for out in [&out_a, &out_b] {
            let status = urq().args(&args).arg("--out").arg(out).status().unwrap();
            assert!(status.success(), "command {name} failed");
        }
        assert_eq!(
            std::fs::read(&out_a).unwrap(),
            std::fs::read(&out_b).unwrap(),
            "{name} not byte-identical"
        );
    }
}
