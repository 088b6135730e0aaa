use std::path::Path;
use std::process::{Command, Output};

use lamina_core::mesh::{parse_obj, CSV_HEADER};
use lamina_core::verification::VerificationReport;

fn lamina(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lamina")).args(args).output().expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_small_ladder_writes_a_passing_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = lamina(&["verify", "--n", "2,4,8,16", "--out", path_str(&out), "--quiet"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = VerificationReport::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(report.all_passed());
    assert_eq!(report.config.n_list, vec![2, 4, 8, 16]);
    assert_eq!(report.summary.total, report.checks.len());
}

#[test]
fn verify_reports_failures_with_exit_one() {
    // delta beyond the domain height makes the off-segment check error out
    let o = lamina(&["verify", "--n", "2,4", "--delta", "0.6", "--quiet"]);
    assert_eq!(o.status.code(), Some(1));
    let report = VerificationReport::from_json(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    assert!(!report.all_passed());
    assert!(!report.check("offsegment_bound").unwrap().passed);
}

#[test]
fn mesh_obj_has_grid_vertex_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m8.obj");
    let o = lamina(&["mesh", "--n", "8", "--nx", "200", "--ny", "65", "--format", "obj", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let obj = parse_obj(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(obj.vertices.len(), 200 * 65);
    assert_eq!(obj.normals.len(), 200 * 65);
    assert_eq!(obj.faces.len(), 2 * 199 * 64);
}

#[test]
fn mesh_format_from_extension() {
    let dir = tempfile::tempdir().unwrap();
    for ext in ["ply", "csv", "json"] {
        let out = dir.path().join(format!("m.{ext}"));
        let o = lamina(&["mesh", "--n", "2", "--nx", "3", "--ny", "3", "--out", path_str(&out)]);
        assert_eq!(o.status.code(), Some(0));
        let text = std::fs::read_to_string(&out).unwrap();
        match ext {
            "ply" => assert!(text.starts_with("ply\n")),
            "csv" => assert!(text.starts_with(CSV_HEADER)),
            _ => assert!(text.starts_with('{')),
        }
    }
}

#[test]
fn sweep_blowup_has_one_row_per_n() {
    let o = lamina(&["sweep", "--metric", "blowup", "--n", "2..64", "--t", "-0.25"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("N,t,dzh,bound,margin"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 63);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[0], (i + 2) as f64);
        assert!(r[2] >= r[0].powi(3) / 8.0);
        assert!(r[4] >= 0.0);
    }
}

#[test]
fn slice_csv_to_stdout() {
    let o = lamina(&["slice", "--n", "4", "--x", "-0.2", "--m", "9"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next(), Some(CSV_HEADER));
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["frobnicate"][..],
        &["verify", "--n", "1..4"],
        &["verify", "--n", "2..x"],
        &["sweep", "--metric", "area"],
        &["mesh", "--n", "8"],
        &["mesh", "--n", "8", "--ny", "4", "--out", "/tmp/never-written.obj"],
        &["slice", "--n", "4", "--x", "0.9"],
    ] {
        assert_eq!(lamina(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn io_errors_exit_three() {
    let o = lamina(&["mesh", "--n", "2", "--nx", "2", "--ny", "3", "--out", "/nonexistent-dir/m.obj"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent-dir/m.obj"));
}

#[test]
fn help_documents_flags() {
    let o = lamina(&["verify", "--help"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    for flag in ["--n", "--tol", "--m", "--seed", "--out"] {
        assert!(text.contains(flag), "{flag}");
    }
    assert!(String::from_utf8(lamina(&["--help"]).stdout).unwrap().contains("LAMINA_THREADS"));
}

#[test]
fn thread_override() {
    let ok = Command::new(env!("CARGO_BIN_EXE_lamina"))
        .args(["sweep", "--metric", "spiral", "--n", "32,64", "--t", "0.2"])
        .env("LAMINA_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(env!("CARGO_BIN_EXE_lamina")).args(["sweep", "--metric", "spiral"]).env("LAMINA_THREADS", "0").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
