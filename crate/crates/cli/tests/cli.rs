use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tunnelsplit"));
    cmd.env_remove("TUNNELSPLIT_OUT_DIR");
    cmd
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().arg("--out-dir").arg(dir).args(args).output().unwrap()
}

/// Header names and numeric rows of a CSV file, skipping comment lines.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<Option<f64>>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<String> = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse::<f64>().ok()).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<Option<f64>>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i].unwrap()).collect()
}

fn closed_rect(v0: f64, d: f64, e: f64) -> (f64, f64, f64) {
    let k = (2.0 * e).sqrt();
    let kappa = (2.0 * (v0 - e)).sqrt();
    let k0sq = 2.0 * v0;
    let kd = kappa * d;
    let tr = ((kappa * kappa - k * k) * kd + k0sq * kd.sinh()) / (2.0 * k * kappa.powi(3));
    let rf = k / kappa * (kd.sinh() - kd) / (kappa * kappa + k0sq * (0.5 * kd).sinh().powi(2));
    let conv = k / kappa * (2.0 * kd * (kappa * kappa - k * k) + k0sq * (2.0 * kd).sinh())
        / (4.0 * k * k * kappa * kappa + k0sq * k0sq * kd.sinh().powi(2));
    (tr, rf, conv)
}

#[test]
fn dwell_row_matches_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["dwell", "--barrier", "rect", "--V0", "2", "--d", "1", "--E", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (h, rows) = read_csv(&dir.path().join("dwell.csv"));
    assert_eq!(rows.len(), 1);
    let (tr, rf, conv) = closed_rect(2.0, 1.0, 1.0);
    for (name, want) in [("tau_tr", tr), ("tau_ref", rf), ("tau_conventional", conv)] {
        let got = column(&h, &rows, name)[0];
        assert!((got / want - 1.0).abs() < 1e-6, "{name}: {got} vs {want}");
    }
}

#[test]
fn hartman_sweep_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["hartman", "--barrier", "rect", "--V0", "2", "--E", "1", "--sweep", "d:1:10:50"]);
    assert!(out.status.success());
    let (h, rows) = read_csv(&dir.path().join("hartman.csv"));
    assert_eq!(rows.len(), 50);
    let log_tau = column(&h, &rows, "log10_tau_tr");
    assert!(log_tau.windows(2).all(|w| w[1] > w[0]));
    let conv = column(&h, &rows, "tau_conventional");
    let tail = &conv[45..];
    let (lo, hi) = tail.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
    assert!((hi - lo) / lo < 0.01);
}

#[test]
fn twoslit_intensity_is_even() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "twoslit", "--separation", "4", "--slit-width", "1", "--wavenumber", "10", "--distance", "100", "--dy", "0.25",
    ];
    let out = run(dir.path(), &args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (h, rows) = read_csv(&dir.path().join("twoslit.csv"));
    let y = column(&h, &rows, "y");
    let intensity = column(&h, &rows, "abs2_psi_two");
    let n = y.len();
    for i in 0..n {
        assert_eq!(y[i], -y[n - 1 - i]);
        assert!((intensity[i] - intensity[n - 1 - i]).abs() <= 1e-10 * intensity[i].max(1e-300));
    }
}

#[test]
fn every_csv_starts_with_schema_line() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["stationary", "--V0", "2", "--d", "1", "--sweep", "E:0.2:3:8"],
        vec!["subprocess", "--V0", "2", "--d", "1", "--E", "1", "--points", "21"],
        vec!["packet", "--V0", "2", "--d", "1", "--E", "1", "--nodes", "128", "--steps", "12", "--sigma-k-frac", "0.1"],
    ] {
        let out = run(dir.path(), &args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let path = dir.path().join(format!("{}.csv", args[0]));
        let first = std::fs::read_to_string(path).unwrap().lines().next().unwrap().to_string();
        assert!(first.starts_with(&format!("# {}: ", args[0])), "{first}");
    }
}

#[test]
fn runs_are_deterministic_without_meta() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["--no-header-meta", "stationary", "--barrier", "double", "--V0", "3", "--d", "0.5", "--gap", "1", "--sweep", "E:0.1:5:40"];
    assert!(run(a.path(), &args).status.success());
    assert!(run(b.path(), &args).status.success());
    let read = |d: &Path| std::fs::read(d.join("stationary.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
    let seq = tempfile::tempdir().unwrap();
    let mut seq_args = vec!["--sequential"];
    seq_args.extend_from_slice(&args);
    assert!(run(seq.path(), &seq_args).status.success());
    assert_eq!(read(a.path()), read(seq.path()));
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "V0 = 4.0\nd = 0.5\nE = 1.0\nformat = \"json\"\n").unwrap();
    let out = run(dir.path(), &["--config", cfg.to_str().unwrap(), "dwell", "--V0", "2", "--d", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: String = std::fs::read_to_string(dir.path().join("dwell.json")).unwrap();
    let (tr, _, _) = closed_rect(4.0, 0.5, 1.0);
    let needle = "\"tau_tr_closed\": ";
    let at = json.find(needle).unwrap() + needle.len();
    let value: f64 = json[at..].split([',', '\n']).next().unwrap().trim().parse().unwrap();
    assert!((value / tr - 1.0).abs() < 1e-12);
}

#[test]
fn unknown_config_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "V00 = 4.0\n").unwrap();
    let out = run(dir.path(), &["--config", cfg.to_str().unwrap(), "dwell"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ConfigParse"));
}

#[test]
fn environment_sets_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .env("TUNNELSPLIT_OUT_DIR", dir.path())
        .args(["dwell", "--V0", "2", "--d", "1", "--E", "1", "--gnuplot"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("dwell.csv").exists());
    assert!(dir.path().join("dwell.gp").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = run(dir.path(), &["dwell", "--V0", "2", "--d", "1"]);
    assert_eq!(missing.status.code(), Some(2));
    let asym = run(dir.path(), &["stationary", "--barrier", "piecewise", "--segments", "1:1,1:2", "--E", "1"]);
    assert_eq!(asym.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&asym.stderr).contains("AsymmetricPotential"));
    let opaque = run(dir.path(), &["dwell", "--V0", "2", "--d", "1000", "--E", "1"]);
    assert_eq!(opaque.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&opaque.stderr).contains("DegenerateBoundary"));
    let file = dir.path().join("plain-file");
    std::fs::write(&file, "x").unwrap();
    let io = bin()
        .arg("--out-dir")
        .arg(file.join("sub"))
        .args(["dwell", "--V0", "2", "--d", "1", "--E", "1"])
        .output()
        .unwrap();
    assert_eq!(io.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&io.stderr).contains("IoError"));
}
