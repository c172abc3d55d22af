use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chargequbit"))
        .args(args)
        .env("RUST_LOG", "off")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const HEADER: &str = "dt_s,epsilon_eV,channel,gamma_hz,b2,d_a,d_p,d,regime_ok";

#[test]
fn sweep_writes_csv_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    for path in [&first, &second] {
        let o = run(&[
            "--preset",
            "gaas-dots",
            "sweep",
            "--output",
            path.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = fs::read(&first).unwrap();
    assert_eq!(a, fs::read(&second).unwrap());
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(HEADER));
    // 81 cycle times, two channels each
    assert_eq!(lines.count(), 162);
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# short grid\npreset = si-dots\ndt_min_ps = 10\ndt_max_ps = 1000\n",
    )
    .unwrap();
    let o = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--points-per-decade",
        "2",
        "sweep",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 1 + 5);
    let first: f64 = out
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(first, 1e-11);
}

#[test]
fn rates_at_one_cycle_time() {
    let o = run(&["--preset", "si-donors", "rates", "--dt-ps", "100"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0], HEADER);
    let fields: Vec<&str> = rows[1].split(',').collect();
    assert_eq!(fields[0], "1.0000000000000000e-10");
    assert_eq!(fields[2], "deformation-hydrogenic");
    let d_p: f64 = fields[6].parse().unwrap();
    assert!((d_p / 2.919608e-3 - 1.0).abs() < 1e-5, "{d_p}");
}

#[test]
fn crossover_reports_each_channel() {
    let o = run(&["--preset", "gaas-dots", "crossover"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(
        out.contains("deformation-gaussian: crossover at dt = 2.259"),
        "{out}"
    );
    assert!(
        out.contains("piezo-gaussian: crossover at dt = 5.14"),
        "{out}"
    );

    let o = run(&[
        "--preset",
        "gaas-dots",
        "crossover",
        "--channel",
        "piezo-gaussian",
    ]);
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn optimize_stays_in_bounds() {
    let o = run(&[
        "--preset",
        "si-dots",
        "optimize",
        "--dt-ps",
        "1000",
        "--a-min-nm",
        "5",
        "--a-max-nm",
        "40",
        "--L-min-nm",
        "20",
        "--L-max-nm",
        "200",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("deformation-gaussian: a = "), "{out}");
}

#[test]
fn oracle_check_passes_for_presets() {
    for p in ["gaas-dots", "si-dots", "si-donors"] {
        let o = run(&["--preset", p, "--points-per-decade", "2", "oracle-check"]);
        assert!(o.status.success(), "{p}: {}", stdout(&o));
        assert!(stdout(&o).ends_with("overall: PASS\n"));
    }
}

#[test]
fn starved_quadrature_exits_with_nonconvergence() {
    let o = run(&[
        "--preset",
        "si-dots",
        "--max-subdivisions",
        "1",
        "--rel-tol",
        "1e-14",
        "--points-per-decade",
        "1",
        "oracle-check",
    ]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn configuration_errors_exit_with_two() {
    // no material given
    assert_eq!(run(&["sweep"]).status.code(), Some(2));
    assert_eq!(run(&["--preset", "bogus", "sweep"]).status.code(), Some(2));
    assert_eq!(
        run(&["--preset", "si-dots", "--a-nm=-5", "sweep"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&[
            "--preset",
            "si-dots",
            "crossover",
            "--channel",
            "piezo-gaussian"
        ])
        .status
        .code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "preset = si-dots\npreset = gaas-dots\n").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "sweep"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}
