use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qsera_cli::output::{
    read_csv, read_expand_report, read_run_report, DemoCsvRow, DistributionRow, ScanCsvRow,
    SweepRow,
};

fn qsera(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsera"))
        .args(args)
        .env_remove("QSERA_LOG")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = qsera(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    qsera(args).status.code().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const ONE_ASSET: &str = r#"{"mu": [0.05], "sigma": [0.2], "rho": [[1.0]],
  "benchmark": {"mu_b": 0.04, "sigma_b": 0.2, "n_b": 1}, "lambda_mu": 0.5, "lambda_sigma2": 0.3}"#;

#[test]
fn run_preset() {
    let report = read_run_report(&ok(&["run", "--preset", "paper-portfolio"])).unwrap();
    assert_eq!(report.top_state, "1001");
    assert_eq!(report.runner_up, "0101");
    assert_eq!((report.m, report.n), (2, 24));
    assert_eq!(report.probabilities.len(), 16);
    assert!((report.probabilities.values().sum::<f64>() - 1.0).abs() < 1e-9);
    assert!(report.ancilla_ground_prob > 1.0 - 1e-9);
    assert!(report.state.is_none() && report.counts.is_none());
}

#[test]
fn backends_agree() {
    let gate = read_run_report(&ok(&[
        "run",
        "--preset",
        "paper-portfolio",
        "--oracle",
        "circuit",
    ]))
    .unwrap();
    let exact = read_run_report(&ok(&[
        "run",
        "--preset",
        "paper-portfolio",
        "--oracle",
        "exact",
    ]))
    .unwrap();
    assert_eq!(gate.top_state, exact.top_state);
    for (k, p) in &gate.probabilities {
        assert!((p - exact.probabilities[k]).abs() < 1e-8);
    }
}

#[test]
fn run_extras_are_deterministic() {
    let args = [
        "run",
        "--preset",
        "paper-portfolio",
        "--shots",
        "500",
        "--seed",
        "11",
        "--dump-state",
    ];
    let a = ok(&args);
    assert_eq!(a, ok(&args));
    let report = read_run_report(&a).unwrap();
    assert_eq!(report.counts.unwrap().values().sum::<u64>(), 500);
    // 4 register qubits, 2 AND ancillas, 1 phase ancilla.
    assert_eq!(report.state.unwrap().len(), 128);
}

#[test]
fn run_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("run.json");
    let csv = dir.path().join("dist.csv");
    let stdout = ok(&[
        "run",
        "--preset",
        "paper-portfolio",
        "--out",
        json.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(stdout.is_empty());
    let report = read_run_report(&fs::read_to_string(&json).unwrap()).unwrap();
    let rows: Vec<DistributionRow> = read_csv(&fs::read_to_string(&csv).unwrap()).unwrap();
    assert_eq!(rows.len(), 16);
    for r in rows {
        assert_eq!(report.probabilities[&r.bitstring], r.probability);
    }
}

#[test]
fn config_sources() {
    let dir = tempfile::tempdir().unwrap();
    // Maximise 3 x0 - x1 + 2 x0 x1 over two bits: optimum at 11.
    let objective = write(
        dir.path(),
        "obj.json",
        r#"{"objective": {"num_vars": 2, "terms": [{"vars": [0], "coeff": 3.0}, {"vars": [1], "coeff": -1.0},
            {"vars": [0, 1], "coeff": 2.0}]}, "mode": "max", "n": 4, "iterations": 1, "oracle": "exact"}"#,
    );
    let report = read_run_report(&ok(&["run", "--config", &objective])).unwrap();
    assert_eq!(report.top_state, "11");
    assert_eq!(report.m, 1);

    let samples: Vec<String> = (0..8)
        .map(|i| format!("[{i}, {}]", (i as f64 - 5.2).powi(2)))
        .collect();
    let samples = write(
        dir.path(),
        "s.json",
        &format!(r#"{{"samples": [{}], "n": 16}}"#, samples.join(",")),
    );
    assert_eq!(
        read_run_report(&ok(&["run", "--config", &samples]))
            .unwrap()
            .top_state,
        "101"
    );

    let problem = write(dir.path(), "p.json", ONE_ASSET);
    let report = read_run_report(&ok(&["run", "--config", &problem, "--n", "8"])).unwrap();
    assert_eq!(report.probabilities.len(), 2);
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "empty.json", "");
    assert_eq!(code(&["run", "--config", &empty]), 2);

    let broken = write(dir.path(), "broken.json", "{\"objective\": [1,\n");
    let out = qsera(&["run", "--config", &broken]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));

    let both = write(
        dir.path(),
        "both.json",
        &format!(r#"{{"problem": {ONE_ASSET}, "samples": [[0, 1], [1, 0]]}}"#),
    );
    assert_eq!(code(&["run", "--config", &both]), 2);
    let unknown = write(
        dir.path(),
        "unknown.json",
        r#"{"samples": [[0, 1], [1, 0]], "colour": 1}"#,
    );
    assert_eq!(code(&["run", "--config", &unknown]), 2);
    let odd = write(
        dir.path(),
        "odd.json",
        r#"{"samples": [[0, 1], [1, 0], [2, 3]]}"#,
    );
    assert_eq!(code(&["run", "--config", &odd]), 2);

    assert_eq!(code(&["run", "--config", "/nonexistent/config.json"]), 2);
    assert_eq!(code(&["run", "--preset", "other"]), 2);
    assert_eq!(
        code(&["run", "--preset", "paper-portfolio", "--mode", "sideways"]),
        2
    );
    assert_eq!(
        code(&["run", "--preset", "paper-portfolio", "--iterations", "many"]),
        2
    );
    assert_eq!(code(&["run", "--preset", "paper-portfolio", "--n", "0"]), 2);
}

#[test]
fn validation_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let asym = write(
        dir.path(),
        "asym.json",
        r#"{"mu": [0.1, 0.2], "sigma": [0.1, 0.2], "rho": [[1.0, 0.3], [0.2, 1.0]],
            "benchmark": {"mu_b": 0.1, "sigma_b": 0.1, "n_b": 1}, "lambda_mu": 0.5, "lambda_sigma2": 0.3}"#,
    );
    let out = qsera(&["portfolio-scan", "--config", &asym]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("symmetric"));

    let flat = write(dir.path(), "flat.json", r#"{"samples": [[0, 1], [1, 1]]}"#);
    assert_eq!(code(&["run", "--config", &flat]), 3);

    let big = write(
        dir.path(),
        "big.json",
        r#"{"objective": {"num_vars": 13, "terms": [{"vars": [12], "coeff": 1.0}]}}"#,
    );
    assert_eq!(code(&["run", "--config", &big]), 3);
    assert_eq!(code(&["run", "--config", &big, "--oracle", "exact"]), 0);
}

#[test]
fn sweep() {
    let rows: Vec<SweepRow> = read_csv(&ok(&[
        "sweep-n",
        "--preset",
        "paper-portfolio",
        "--n-min",
        "1",
        "--n-max",
        "100",
    ]))
    .unwrap();
    assert_eq!(rows.len(), 100);
    assert!(rows.windows(2).all(|w| w[1].n == w[0].n + 1));
    let peak = rows
        .iter()
        .max_by(|a, b| a.probability.partial_cmp(&b.probability).unwrap())
        .unwrap();
    assert!((15..=35).contains(&peak.n), "peak at {}", peak.n);

    let single: Vec<SweepRow> = read_csv(&ok(&[
        "sweep-n",
        "--preset",
        "paper-portfolio",
        "--n-min",
        "1",
        "--n-max",
        "1",
    ]))
    .unwrap();
    assert_eq!(single.len(), 1);
    assert_eq!(
        code(&[
            "sweep-n",
            "--preset",
            "paper-portfolio",
            "--n-min",
            "10",
            "--n-max",
            "9"
        ]),
        2
    );
    assert_eq!(
        code(&[
            "sweep-n",
            "--preset",
            "paper-portfolio",
            "--n-min",
            "0",
            "--n-max",
            "3"
        ]),
        2
    );
}

#[test]
fn expand() {
    let report = read_expand_report(&ok(&["expand", "--preset", "paper-portfolio"])).unwrap();
    assert_eq!(report.n, 24);
    for poly in [&report.f, &report.g, &report.g_n] {
        assert_eq!(poly.terms.len(), 16);
    }
    let table = report.published.unwrap();
    assert_eq!(table.len(), 16);
    assert!(table.iter().all(|r| r.within_rounding[2]));
    assert_eq!(table[0].g_x10_table, 8.1);
    assert!((table[0].g_x10 - 7.333).abs() < 1e-3);

    let n1 =
        read_expand_report(&ok(&["expand", "--preset", "paper-portfolio", "--n", "1"])).unwrap();
    assert_eq!(n1.g, n1.g_n);

    let dir = tempfile::tempdir().unwrap();
    let problem = write(dir.path(), "p.json", ONE_ASSET);
    let one = read_expand_report(&ok(&["expand", "--config", &problem])).unwrap();
    assert_eq!(one.f.terms.len(), 2);
    assert!(one.published.is_none());
    assert!(ok(&["expand", "--config", &problem, "--table"]).contains("x0"));
}

#[test]
fn grover_demo() {
    let rows: Vec<DemoCsvRow> = read_csv(&ok(&[
        "grover-demo",
        "--k",
        "6",
        "--target",
        "14",
        "--m",
        "6",
    ]))
    .unwrap();
    assert_eq!(rows.len(), 3 * 7);
    let last_sim = rows.iter().rfind(|r| r.series == "simulation").unwrap();
    assert_eq!(last_sim.k, 6);
    assert!(last_sim.p_target >= 0.99);
    for r in rows.iter().filter(|r| r.series == "deviation") {
        assert!(r.a_other.max(r.a_target).max(r.p_target) < 1e-9);
    }

    let rows: Vec<DemoCsvRow> = read_csv(&ok(&[
        "grover-demo",
        "--k",
        "2",
        "--target",
        "3",
        "--m",
        "1",
    ]))
    .unwrap();
    let sim = rows
        .iter()
        .find(|r| r.series == "simulation" && r.k == 1)
        .unwrap();
    assert!((sim.p_target - 1.0).abs() < 1e-12);

    let rows: Vec<DemoCsvRow> = read_csv(&ok(&[
        "grover-demo",
        "--k",
        "3",
        "--target",
        "2",
        "--m",
        "0",
    ]))
    .unwrap();
    assert_eq!(rows.len(), 3);
    assert!((rows[0].p_target - 0.125).abs() < 1e-12);

    // Default m is the rounded-down optimum: 2 for 16 states.
    let rows: Vec<DemoCsvRow> =
        read_csv(&ok(&["grover-demo", "--k", "4", "--target", "1"])).unwrap();
    assert_eq!(rows.last().unwrap().k, 2);

    assert_eq!(
        code(&["grover-demo", "--k", "3", "--target", "8", "--m", "1"]),
        2
    );
}

#[test]
fn portfolio_scan() {
    let rows: Vec<ScanCsvRow> =
        read_csv(&ok(&["portfolio-scan", "--preset", "paper-portfolio"])).unwrap();
    assert_eq!(rows.len(), 16);
    let r = rows.iter().find(|r| r.selection_bits == "1001").unwrap();
    assert!((r.mu_p.unwrap() - 0.045).abs() < 1e-12);
    assert!((r.sigma_p.unwrap() - 0.22472).abs() < 1e-5);
    let best = rows
        .iter()
        .min_by(|a, b| a.f.partial_cmp(&b.f).unwrap())
        .unwrap();
    assert_eq!(best.selection_bits, "1001");
    assert!(rows[0].mu_p.is_none() && rows[0].sigma_p.is_none());

    let dir = tempfile::tempdir().unwrap();
    let problem = write(dir.path(), "p.json", ONE_ASSET);
    let rows: Vec<ScanCsvRow> = read_csv(&ok(&["portfolio-scan", "--config", &problem])).unwrap();
    assert_eq!(rows.len(), 2);
}

#[test]
fn logging_goes_to_stderr() {
    let out = Command::new(env!("CARGO_BIN_EXE_qsera"))
        .args(["run", "--preset", "paper-portfolio"])
        .env("QSERA_LOG", "debug")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(!out.stderr.is_empty());
    read_run_report(&String::from_utf8(out.stdout).unwrap()).unwrap();
}
