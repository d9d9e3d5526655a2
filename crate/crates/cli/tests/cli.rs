use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::sync::Arc;

use lbsphere::io::write_coefficients;
use lbsphere::sht::ShtPlan;
use lbsphere::{Complex64, GradientVariant, Model, ModelParams, SpectralField};
use lbsphere_cli::{tools, RunSummary};
use tempfile::TempDir;

fn lbsphere(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lbsphere"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

const SMALL_RUN: &str = "\
# small spotted run
bandlimit = 15
epsilon = -1
lambda = 0.8
radius = sqrt(42)   # degree 6
init = random
seed = 7
";

fn write_config(dir: &Path, extra: &str) -> String {
    let path = dir.join("run.conf");
    fs::write(&path, format!("{SMALL_RUN}{extra}")).unwrap();
    path.to_str().unwrap().to_string()
}

fn read_summary(dir: &Path) -> RunSummary {
    RunSummary::parse(&fs::read_to_string(dir.join("summary.txt")).unwrap()).unwrap()
}

#[test]
fn converged_run_writes_consistent_artifacts() {
    let tmp = TempDir::new().unwrap();
    let conf = write_config(tmp.path(), "grid_field = true\n");
    let out_dir = tmp.path().join("out");
    let out = lbsphere(&["run", "--config", &conf, "--output", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let summary = read_summary(&out_dir);
    assert!(summary.converged);
    assert!(summary.grad_sup < 1e-6);
    assert_eq!(RunSummary::parse(&String::from_utf8_lossy(&out.stdout)).unwrap(), summary);

    let trace = fs::read_to_string(out_dir.join("trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("iter,seconds,energy,grad_sup,alpha,restart,backtracks"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), summary.iterations + 1);
    let last: f64 = rows.last().unwrap()[2].parse().unwrap();
    assert_eq!(last, summary.energy);

    // the saved coefficients reproduce the reported energy
    let c = tools::load_coefficients(&out_dir.join("coefficients.txt")).unwrap();
    let model = Model::new(
        Arc::new(ShtPlan::minimal(15)),
        ModelParams::new(1.0, -1.0, 0.8, 42f64.sqrt()),
        GradientVariant::Squared,
    );
    let e = model.energy(&c).unwrap().total;
    assert!((e - summary.energy).abs() < 1e-12, "{e} vs {}", summary.energy);
    assert_eq!(c.get(0, 0), Complex64::new(0.0, 0.0));

    let grid = fs::read_to_string(out_dir.join("grid.csv")).unwrap();
    let header: Vec<&str> = grid.lines().next().unwrap().split(',').collect();
    assert_eq!(header[0], "theta");
    assert_eq!(grid.lines().count(), 1 + 31);
    assert_eq!(header.len(), 1 + 62);
}

#[test]
fn coefficient_lines_are_ordered_with_full_precision() {
    let tmp = TempDir::new().unwrap();
    let conf = write_config(tmp.path(), "max_iter = 3\n");
    let out_dir = tmp.path().join("out");
    lbsphere(&["run", "--config", &conf, "--output", out_dir.to_str().unwrap()]);
    let text = fs::read_to_string(out_dir.join("coefficients.txt")).unwrap();
    let mut expected = Vec::new();
    for l in 0..=15usize {
        for m in 0..=l {
            expected.push((l, m));
        }
    }
    let got: Vec<(usize, usize)> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            assert_eq!(f.len(), 4);
            let mantissa = f[2].trim_start_matches('-').split('e').next().unwrap();
            assert!(mantissa.chars().filter(char::is_ascii_digit).count() >= 15);
            (f[0].parse().unwrap(), f[1].parse().unwrap())
        })
        .collect();
    assert_eq!(got, expected);
}

#[test]
fn flags_override_the_config_file() {
    let tmp = TempDir::new().unwrap();
    let conf = write_config(tmp.path(), "max_iter = 50\n");
    let out = lbsphere(&["run", "--config", &conf, "--max-iter", "4", "--method=sis"]);
    assert_eq!(code(&out), 2, "nonconverged runs exit with 2");
    let s = RunSummary::parse(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert_eq!(s.iterations, 4);
    assert_eq!(s.method.name(), "sis");
    assert!(!s.converged);
}

#[test]
fn invalid_configurations_exit_with_64() {
    let tmp = TempDir::new().unwrap();
    let conf = write_config(tmp.path(), "");
    for bad in [
        vec!["--no-such-key", "1"],
        vec!["--tol", "-1"],
        vec!["--bandlimit", "many"],
        vec!["--method", "newton"],
        vec!["--radius", "-3"],
        vec!["--alpha-min", "2", "--alpha-max", "1"],
    ] {
        let mut args = vec!["run", "--config", &conf];
        args.extend(bad.iter().copied());
        let out = lbsphere(&args);
        assert_eq!(code(&out), 64, "{bad:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let broken = tmp.path().join("broken.conf");
    fs::write(&broken, "bandlimit 15\n").unwrap();
    let out = lbsphere(&["run", "--config", broken.to_str().unwrap()]);
    assert_eq!(code(&out), 64);
    assert_eq!(code(&lbsphere(&["frobnicate"])), 64);
}

#[test]
fn restarting_from_saved_coefficients_is_immediately_converged() {
    let tmp = TempDir::new().unwrap();
    let conf = write_config(tmp.path(), "");
    let first = tmp.path().join("first");
    assert_eq!(code(&lbsphere(&["run", "--config", &conf, "--output", first.to_str().unwrap()])), 0);
    let saved = first.join("coefficients.txt");
    let init = format!("file:{}", saved.display());
    let out = lbsphere(&["run", "--config", &conf, "--init", &init]);
    assert_eq!(code(&out), 0);
    let again = RunSummary::parse(&String::from_utf8_lossy(&out.stdout)).unwrap();
    let before = read_summary(&first);
    assert!(again.iterations <= 1, "{} iterations", again.iterations);
    assert!((again.energy - before.energy).abs() < 1e-12);
}

#[test]
fn runs_are_deterministic() {
    let tmp = TempDir::new().unwrap();
    let conf = write_config(tmp.path(), "method = aabpg4\n");
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    lbsphere(&["run", "--config", &conf, "--output", a.to_str().unwrap()]);
    lbsphere(&["run", "--config", &conf, "--output", b.to_str().unwrap()]);
    let ca = fs::read(a.join("coefficients.txt")).unwrap();
    let cb = fs::read(b.join("coefficients.txt")).unwrap();
    assert_eq!(ca, cb);
    assert_eq!(read_summary(&a).energy, read_summary(&b).energy);
}

#[test]
fn compare_shares_the_initial_state() {
    let tmp = TempDir::new().unwrap();
    let conf = write_config(tmp.path(), "max_iter = 3000\n");
    let dir = tmp.path().join("cmp");
    let out = lbsphere(&[
        "compare",
        "--config",
        &conf,
        "--methods",
        "aabpg2,aabpg4,asis",
        "--output",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let energies: Vec<f64> = ["aabpg2", "aabpg4", "asis"]
        .iter()
        .map(|m| read_summary(&dir.join(m)).energy)
        .collect();
    for e in &energies {
        assert!((e - energies[0]).abs() < 1e-8, "{energies:?}");
    }
    let csv = fs::read_to_string(dir.join("comparison.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
}

fn save(field: &SpectralField, path: &Path) {
    let mut buf = Vec::new();
    write_coefficients(field, &mut buf).unwrap();
    fs::write(path, buf).unwrap();
}

#[test]
fn transform_round_trips_through_the_grid() {
    let tmp = TempDir::new().unwrap();
    let field = lbsphere::pma::random_field(20, 5);
    let coeffs = tmp.path().join("c.txt");
    let grid = tmp.path().join("g.csv");
    let back = tmp.path().join("back.txt");
    save(&field, &coeffs);
    let p = |p: &Path| p.to_str().unwrap().to_string();
    assert_eq!(code(&lbsphere(&["transform", &p(&coeffs), &p(&grid), "--to", "grid", "--n-theta", "42", "--n-phi", "90"])), 0);
    assert_eq!(code(&lbsphere(&["transform", &p(&grid), &p(&back), "--to", "coeffs", "--bandlimit", "20"])), 0);
    let again = tools::load_coefficients(&back).unwrap();
    let diff = again.sub(&field).sup_norm();
    assert!(diff < 1e-12, "{diff}");
    // too coarse a grid for the bandlimit is a configuration error
    let out = lbsphere(&["transform", &p(&coeffs), &p(&grid), "--to", "grid", "--n-theta", "5", "--n-phi", "9"]);
    assert_eq!(code(&out), 64);
}

#[test]
fn count_reads_coefficients_and_grids() {
    let tmp = TempDir::new().unwrap();
    let mut zonal = SpectralField::zeros(31);
    zonal.set(15, 0, Complex64::new(1.0, 0.0));
    let path = tmp.path().join("zonal.txt");
    save(&zonal, &path);
    let out = lbsphere(&["count", path.to_str().unwrap(), "--kind", "stripes"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().next(), Some("stripes = 16"));

    let mut sectoral = SpectralField::zeros(12);
    sectoral.set(6, 6, Complex64::new(1.0, 0.0));
    let path = tmp.path().join("sectoral.txt");
    save(&sectoral, &path);
    let grid = tmp.path().join("sectoral.csv");
    tools::coefficients_to_grid(&path, &grid, Some((64, 128))).unwrap();
    for input in [&path, &grid] {
        let out = lbsphere(&["count", input.to_str().unwrap(), "--kind", "spots"]);
        assert_eq!(String::from_utf8_lossy(&out.stdout).lines().next(), Some("spots = 6"));
    }
}
