use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_spp");
const HEADER: &str = "eps1,eps2,N,tau,p,mu0,mu1,left_mode,right_mode,e_energy,p_energy,e_superclose,p_superclose,e_l2,e_h1w,pe1_energy,quad_delta";

fn spp(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn study_csv_schema() {
    let o = spp(&["study", "--eps1", "1e-8,1e-10", "--eps2", "1e-4", "--n", "16,32,64"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(HEADER));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 6);
    for r in &rows {
        assert_eq!(r.len(), 17);
        // 17 significant digits: one leading digit and 16 after the point
        let mantissa = r[9].split('e').next().unwrap();
        assert_eq!(mantissa.replace(['.', '-'], "").len(), 17, "{}", r[9]);
    }
    // the largest N of each column has no rate
    let last: Vec<_> = rows.iter().filter(|r| r[2] == "64").collect();
    assert!(last.iter().all(|r| r[10].is_empty() && r[12].is_empty()));
    assert!(rows.iter().filter(|r| r[2] != "64").all(|r| !r[10].is_empty()));
}

#[test]
fn markdown_output() {
    let o = spp(&["study", "--eps1", "1e-8", "--eps2", "1e-4", "--n", "16,32", "--format", "md"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().any(|l| l.starts_with('|')));
}

#[test]
fn output_file_and_job_count_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let common = ["study", "--eps1", "1,1e-2,1e-4,1e-6,1e-8,1e-10", "--eps2", "1e-4", "--n", "16,32,64,128,256"];
    let mut args_a = common.to_vec();
    args_a.extend(["--jobs", "1", "--out", a.to_str().unwrap()]);
    let mut args_b = common.to_vec();
    args_b.extend(["--jobs", "4", "--out", b.to_str().unwrap()]);
    assert_eq!(code(&spp(&args_a)), 0);
    assert_eq!(code(&spp(&args_b)), 0);
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(!x.is_empty());
    assert_eq!(x, y);
}

#[test]
fn mesh_dump_format() {
    let o = spp(&["mesh-inspect", "--eps1", "1e-8", "--eps2", "1e-4", "--n", "16"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# N tau p mu0 mu1 sigma0 sigma1 left_mode right_mode");
    let data: Vec<Vec<&str>> = lines.iter().filter(|l| !l.starts_with('#')).map(|l| l.split('\t').collect()).collect();
    assert_eq!(data.len(), 17);
    let mut prev = -1.0;
    for (i, row) in data.iter().enumerate() {
        assert_eq!(row.len(), 3);
        assert_eq!(row[0].parse::<usize>().unwrap(), i);
        let x: f64 = row[1].parse().unwrap();
        assert!(x > prev);
        prev = x;
    }
    assert_eq!(data[0][1].parse::<f64>().unwrap(), 0.0);
    assert_eq!(data[16][1].parse::<f64>().unwrap(), 1.0);
    let x1: f64 = data[1][1].parse().unwrap();
    assert!((x1 - 1.8616e-4).abs() < 1e-8, "{x1}");
}

#[test]
fn mesh_inspect_accepts_decay_rates_and_prints_diagnostics() {
    let o = spp(&["mesh-inspect", "--mu0", "6180.34", "--mu1", "16180.34", "--n", "64", "--tau", "2.5", "--diagnostics"]);
    assert_eq!(code(&o), 0);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("left:") && err.contains("right:") && err.contains("central:"));
    assert!(!err.contains("VIOLATED"), "{err}");
}

#[test]
fn solve_dump_appends_solution_column() {
    let o = spp(&["solve", "--eps1", "1e-8", "--eps2", "1e-4", "--n", "32"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let data: Vec<Vec<&str>> = text.lines().filter(|l| !l.starts_with('#')).map(|l| l.split('\t').collect()).collect();
    assert_eq!(data.len(), 33);
    assert!(data.iter().all(|r| r.len() == 4));
    assert_eq!(data[0][3].parse::<f64>().unwrap(), 0.0);
    assert_eq!(data[32][3].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn table_check_passes_with_default_profile() {
    for id in ["3", "4"] {
        let o = spp(&["table", "--id", id, "--check"]);
        assert_eq!(code(&o), 0, "table {id}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains("0."));
    }
}

#[test]
fn table_check_mismatch_exits_two() {
    let o = spp(&["table", "--id", "3", "--check", "--tau", "2", "--quad-points", "5"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("mismatch"));
}

#[test]
fn table_csv_output() {
    let o = spp(&["table", "--id", "1", "--format", "csv", "--n", "16,32"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some(HEADER));
    assert_eq!(text.lines().count(), 1 + 6 * 2);
}

#[test]
fn configuration_errors_exit_one() {
    for args in [
        vec!["solve", "--eps1", "0", "--eps2", "1", "--n", "16"],
        vec!["solve", "--eps1", "1", "--eps2", "1", "--n", "15"],
        vec!["study", "--eps1", "1", "--eps2", "1", "--n", "16,48"],
        vec!["table", "--id", "7"],
        vec!["study", "--eps1", "x", "--eps2", "1", "--n", "16"],
        vec!["solve", "--eps1", "1", "--eps2", "1", "--n", "16", "--p", "1.5"],
        vec!["frobnicate"],
    ] {
        let o = spp(&args);
        assert_eq!(code(&o), 1, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn numerical_failure_exits_three() {
    // mu1 ~ 1e300 collapses the right layer onto x = 1 in double precision
    let o = spp(&["solve", "--eps1", "1e-300", "--eps2", "1", "--n", "16"]);
    assert_eq!(code(&o), 3);
    let o = spp(&["study", "--eps1", "1e-300,1e-8", "--eps2", "1", "--n", "16,32"]);
    assert_eq!(code(&o), 3);
    // healthy cells are still reported
    assert!(stdout(&o).lines().any(|l| l.starts_with("1.0000000000000000e-8")));
}

#[test]
fn help_exits_zero() {
    assert_eq!(code(&spp(&["--help"])), 0);
}
