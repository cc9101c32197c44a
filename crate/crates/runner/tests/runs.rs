use std::f64::consts::{PI, TAU};
use std::process::Command;

use proptest::prelude::*;

use swaptest_runner::config::CalibrationSpec;
use swaptest_runner::csvio::{write_calibration, write_sweep, CsvTable};
use swaptest_runner::{fit_calibration, load_config, parse_config, run_calibration, run_sweep, CalibrationRow, SweepRow, SweepTable};

const SMALL: &str = r#"
name = "small"
seed = 11
shots = 200

[layout]
register_dim = 4

[b]
kind = "superposition01"
phi = 3.141592653589793

[c]
kind = "superposition01"

[[sweep]]
name = "phi"
parameters = ["c.phi"]
start = 0.0
stop = 6.283185307179586
points = 9
"#;

fn csv_of(table: &SweepTable) -> Vec<u8> {
    let mut out = Vec::new();
    write_sweep(&mut out, table).unwrap();
    out
}

#[test]
fn same_seed_same_bytes() {
    let cfg = parse_config(SMALL, "small").unwrap();
    assert_eq!(csv_of(&run_sweep(&cfg).unwrap()), csv_of(&run_sweep(&cfg).unwrap()));
    let other = parse_config(&SMALL.replace("seed = 11", "seed = 12"), "small").unwrap();
    let (a, b) = (run_sweep(&cfg).unwrap(), run_sweep(&other).unwrap());
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert_eq!(x.p_g_exact, y.p_g_exact);
        assert_ne!(x.seed, y.seed);
    }
    assert!(a.rows.iter().zip(&b.rows).any(|(x, y)| x.p_g_sampled != y.p_g_sampled));
}

#[test]
fn rows_follow_the_grid() {
    let cfg = parse_config(SMALL, "small").unwrap();
    let t = run_sweep(&cfg).unwrap();
    assert_eq!(t.axis_names, ["phi"]);
    assert_eq!(t.rows.len(), 9);
    for (i, r) in t.rows.iter().enumerate() {
        let phi = TAU * i as f64 / 8.0;
        assert!((r.axis_values[0] - phi).abs() < 1e-15);
        assert!((r.overlap_from_pg - (phi / 2.0).sin().powi(2)).abs() < 1e-8);
        assert_eq!(r.shots, Some(200));
        let se = r.stderr.unwrap();
        assert!((r.p_g_sampled.unwrap() - r.p_g_exact).abs() <= 5.0 * se.max(1.0 / 200.0));
    }
}

#[test]
fn no_shots_leaves_sampled_columns_empty() {
    let src = SMALL.replace("shots = 200\n", "");
    let t = run_sweep(&parse_config(&src, "small").unwrap()).unwrap();
    assert!(t.rows.iter().all(|r| r.p_g_sampled.is_none() && r.stderr.is_none() && r.shots.is_none()));
    let text = String::from_utf8(csv_of(&t)).unwrap();
    let first = text.lines().nth(1).unwrap();
    assert!(first.contains(",,,,"), "{first}");
}

#[test]
fn runtime_failures_name_the_grid_point() {
    let src = SMALL
        .replace("kind = \"superposition01\"\nphi = 3.141592653589793", "kind = \"coherent\"\nalpha_sq = 5.0")
        .replace("register_dim = 4", "register_dim = 8");
    let err = run_sweep(&parse_config(&src, "small").unwrap()).unwrap_err();
    assert_eq!(err.exit_code(), 4);
    assert!(err.to_string().contains("grid point 0"), "{err}");
}

#[test]
fn sweep_csv_round_trips() {
    let cfg = parse_config(SMALL, "small").unwrap();
    let t = run_sweep(&cfg).unwrap();
    let back = CsvTable::read(&csv_of(&t)[..], "mem").unwrap().to_sweep().unwrap();
    assert_eq!(back, t);
}

#[test]
fn header_is_fixed() {
    let t = run_sweep(&load_config("fig3a").unwrap()).unwrap();
    let text = String::from_utf8(csv_of(&t)).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "beta_sq,phi_c,p_g_exact,overlap_from_pg,overlap_oracle,p_g_sampled,stderr,shots,seed"
    );
    assert!(text.ends_with('\n') && !text.contains('\r'));
}

fn opt(x: impl Strategy<Value = f64>) -> impl Strategy<Value = Option<f64>> {
    prop::option::of(x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn arbitrary_sweep_rows_round_trip(
        rows in prop::collection::vec(
            (prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 2),
             -1e3f64..1e3, any::<f64>().prop_filter("finite", |v| v.is_finite()), -1.0f64..1.0,
             opt(0.0f64..1.0), opt(0.0f64..1.0), prop::option::of(1u64..1_000_000), any::<u64>()),
            1..20)
    ) {
        let table = SweepTable {
            axis_names: vec!["u".into(), "v".into()],
            rows: rows.into_iter().map(|(axes, a, b, c, d, e, f, g)| SweepRow {
                axis_values: axes, p_g_exact: a, overlap_from_pg: b, overlap_oracle: c,
                p_g_sampled: d, stderr: e, shots: f, seed: g,
            }).collect(),
        };
        let back = CsvTable::read(&csv_of(&table)[..], "mem").unwrap().to_sweep().unwrap();
        prop_assert_eq!(back, table);
    }

    #[test]
    fn arbitrary_calibration_rows_round_trip(
        rows in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0, opt(0.0f64..1.0), opt(0.0f64..0.1), any::<u64>()), 1..20)
    ) {
        let rows: Vec<CalibrationRow> = rows.into_iter().map(|(t, p, s, e, seed)| CalibrationRow {
            duration: t, p_e_exact: p, p_e_sampled: s, stderr: e, shots: s.map(|_| 500), seed,
        }).collect();
        let mut out = Vec::new();
        write_calibration(&mut out, &rows).unwrap();
        let back = CsvTable::read(&out[..], "mem").unwrap().to_calibration().unwrap();
        prop_assert_eq!(back, rows);
    }
}

fn calibration(durations: Vec<f64>) -> CalibrationSpec {
    CalibrationSpec { omega0: TAU * 680.0, ramp_tau: 0.0, steps: 400, durations }
}

#[test]
fn zero_duration_leaves_the_qubit_in_g() {
    let rows = run_calibration(&calibration(vec![0.0, 1e-4]), None, 0).unwrap();
    assert_eq!(rows[0].p_e_exact, 0.0);
    assert!(rows[1].p_e_exact > 0.0);
}

#[test]
fn excitation_peaks_at_quarter_period() {
    let omega0 = TAU * 680.0;
    let t_star = PI / (2.0 * omega0);
    let durations: Vec<f64> = (-5..=5).map(|k| t_star * (1.0 + 0.02 * k as f64)).collect();
    let rows = run_calibration(&calibration(durations), None, 0).unwrap();
    let best = rows.iter().max_by(|a, b| a.p_e_exact.total_cmp(&b.p_e_exact)).unwrap();
    assert!((best.duration - t_star).abs() < 1e-12);
    assert!((best.p_e_exact - 1.0).abs() < 1e-9);
}

#[test]
fn calibration_fit_recovers_coupling() {
    let durations = (0..31).map(|i| 1.5e-3 * i as f64 / 30.0).collect();
    let rows = run_calibration(&calibration(durations), Some(500), 5).unwrap();
    let fit = fit_calibration(&rows).unwrap();
    let hz = fit.get("omega0").unwrap() / TAU;
    assert!((hz / 680.0 - 1.0).abs() < 0.01, "{hz}");
}

fn swaptest(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_swaptest")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn cli_run_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/fig2b.csv");
    let (code, stdout, _) = swaptest(&["run", "fig2b", "-o", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.contains("33 rows"));
    let expected = csv_of(&run_sweep(&load_config("fig2b").unwrap()).unwrap());
    assert_eq!(std::fs::read(&path).unwrap(), expected);

}

#[test]
fn cli_csv_to_stdout_when_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("small.toml");
    std::fs::write(&config, SMALL).unwrap();
    let (code, stdout, _) = swaptest(&["run", config.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("phi,p_g_exact,"));
    assert_eq!(stdout.lines().count(), 10);
}

#[test]
fn cli_calibrate_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("cal.csv");
    let (code, stdout, _) = swaptest(&["calibrate", "--seed", "3", "-o", csv.to_str().unwrap()]);
    assert_eq!(code, 0);
    let hz: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("omega0/2pi = "))
        .and_then(|v| v.trim_end_matches(" Hz").parse().ok())
        .unwrap();
    assert!((hz / 680.0 - 1.0).abs() < 0.01, "{hz}");

    let (code, stdout, stderr) = swaptest(&["fit", "sine-squared", csv.to_str().unwrap()]);
    assert_eq!(code, 0, "{stderr}");
    assert!(stdout.contains("p_e_sampled vs duration_s"), "{stdout}");

    let golden = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/golden/fig3e.csv");
    let (code, stdout, stderr) = swaptest(&["fit", "cat-eq2", golden, "--bootstrap", "100"]);
    assert_eq!(code, 0, "{stderr}");
    assert!(stdout.contains("overlap_sampled vs phi_cat"), "{stdout}");
    assert!(stdout.contains("bootstrap: 100 replicas"), "{stdout}");
    let (code, stdout, _) = swaptest(&["fit", "cat-eq2", golden, "--y", "overlap_oracle"]);
    assert_eq!(code, 0);
    let gamma: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("gamma_cat = "))
        .and_then(|v| v.split(' ').next()?.parse().ok())
        .unwrap();
    assert!((gamma - 1.0).abs() < 1e-6, "{gamma}");
}

#[test]
fn cli_listing_and_validation() {
    let (code, stdout, _) = swaptest(&["list-configs"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.lines().count(), 8);
    let (code, stdout, _) = swaptest(&["validate", "fig3d"]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("ok: fig3d (sweep, 99 points)"), "{stdout}");
}

#[test]
fn cli_exit_codes_by_category() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, SMALL.replace("shots = 200", "shots = -1").replace("points = 9", "points = 0")).unwrap();
    let (code, _, stderr) = swaptest(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(stderr.contains("4:") && stderr.contains("shots"), "{stderr}");
    assert!(stderr.contains("points"), "{stderr}");

    assert_eq!(swaptest(&["run", "nonesuch"]).0, 3);
    assert_eq!(swaptest(&["frobnicate"]).0, 2);
    assert_eq!(swaptest(&["calibrate", "--points", "1"]).0, 2);

    let tail = dir.path().join("tail.toml");
    std::fs::write(
        &tail,
        SMALL
            .replace("kind = \"superposition01\"\nphi = 3.141592653589793", "kind = \"coherent\"\nalpha_sq = 5.0")
            .replace("register_dim = 4", "register_dim = 8"),
    )
    .unwrap();
    assert_eq!(swaptest(&["run", tail.to_str().unwrap()]).0, 4);

    let tiny = dir.path().join("tiny.csv");
    std::fs::write(&tiny, "x,y\n0,0\n1,1\n").unwrap();
    assert_eq!(swaptest(&["fit", "gaussian", tiny.to_str().unwrap(), "--y", "y"]).0, 5);
    let junk = dir.path().join("junk.csv");
    std::fs::write(&junk, "x,y\n0,abc\n").unwrap();
    assert_eq!(swaptest(&["fit", "gaussian", junk.to_str().unwrap(), "--y", "y"]).0, 6);
    assert_eq!(swaptest(&["fit", "gaussian", "/nonexistent.csv"]).0, 6);
}
