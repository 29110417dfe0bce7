//! End-to-end checks of the command-line binary: output content and the
//! documented exit-code contract (0 ok, 1 runtime error, 2 usage, 3 failed
//! verification).

use std::process::{Command, Output};

fn billiards(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_billiards"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn orbit_json_reports_the_family() {
    let out = billiards(&[
        "orbit",
        "--domain",
        "equilateral",
        "--label",
        "2,3",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["amplitude_squared"], 19);
    assert_eq!(doc["collision_count"], 16);
    assert_eq!(doc["trajectory"]["closed"], true);
    assert_eq!(doc["trajectory"]["bounces"], 16);
}

#[test]
fn missing_required_argument_exits_two() {
    let out = billiards(&["orbit", "--domain", "square"]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
}

#[test]
fn unknown_domain_exits_one() {
    let out = billiards(&["orbit", "--domain", "dodecahedron", "--label", "1,1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("error:"), "stderr: {}", stderr(&out));
}

#[test]
fn failed_verification_exits_three() {
    // Seed 7 draws a tetrahedral label whose ray first closes at twice the
    // lattice length, so the oracle-agreement suite must report failure.
    let out = billiards(&[
        "verify",
        "--samples-2d",
        "4",
        "--samples-3d",
        "8",
        "--max",
        "50",
        "--reduction-max",
        "120",
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let text = stdout(&out);
    assert!(text.contains("oracle-agreement"));
    assert!(text.contains("\"pass\":false"), "summary: {text}");
}

#[test]
fn planar_verification_passes() {
    let out = billiards(&[
        "verify",
        "--samples-2d",
        "8",
        "--samples-3d",
        "0",
        "--max",
        "50",
        "--reduction-max",
        "120",
    ]);
    assert_eq!(out.status.code(), Some(0), "stdout: {}", stdout(&out));
    assert!(stdout(&out).contains("\"pass\":true"));
}

#[test]
fn spectrum_table5_csv_row_values() {
    let out = billiards(&[
        "spectrum",
        "--domain",
        "k-tetra",
        "--bc",
        "dirichlet",
        "--count",
        "40",
        "--table5",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "sl_no,value");
    assert_eq!(lines[1], "1,20");
    assert_eq!(lines.len(), 41);
}

#[test]
fn table5_rejects_non_tetrahedral_domains() {
    let out = billiards(&[
        "spectrum",
        "--domain",
        "square",
        "--count",
        "5",
        "--table5",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("tetrahedral"));
}

#[test]
fn genus_output_for_rhombus_and_square() {
    let rhombus = billiards(&["genus", "--angles", "1/3,2/3,1/3,2/3"]);
    assert!(rhombus.status.success());
    let text = stdout(&rhombus);
    assert!(text.starts_with("2\n"));
    assert!(text.contains("not integrable (genus 2)"));

    let square = billiards(&["genus", "--angles", "1/2,1/2,1/2,1/2"]);
    assert!(square.status.success());
    assert!(stdout(&square).contains("integrable (genus 1)"));
}

#[test]
fn coarse_mesh_solve_exits_one() {
    let out = billiards(&["solve", "--domain", "square", "--levels", "4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("resolution too coarse"),
        "stderr: {}",
        stderr(&out)
    );
}

#[test]
fn solve_compares_numeric_and_closed_form() {
    let out = billiards(&[
        "solve",
        "--domain",
        "square",
        "--bc",
        "dirichlet",
        "--count",
        "3",
        "--levels",
        "6",
        "--format",
        "csv",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let mut rows = text.lines().skip(1);
    for expected in ["2", "5", "5"] {
        let row = rows.next().unwrap();
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[1], expected, "row: {row}");
        let rel: f64 = fields[3].parse().unwrap();
        assert!(rel < 1e-2, "relative error {rel} in row: {row}");
    }
}

#[test]
fn dump_mesh_writes_before_floor_failure() {
    let dir = tempfile::tempdir().unwrap();
    let mesh_path = dir.path().join("mesh.txt");
    let out = billiards(&[
        "solve",
        "--domain",
        "square",
        "--levels",
        "3",
        "--dump-mesh",
        mesh_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let mesh = std::fs::read_to_string(&mesh_path).unwrap();
    assert!(mesh.starts_with("v "), "mesh head: {}", &mesh[..40.min(mesh.len())]);
    assert!(mesh.lines().any(|l| l.starts_with("s ")));
}

#[test]
fn render_resolves_relative_paths_against_env() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_billiards"))
        .args(["render", "--domain", "square", "--label", "3,2", "--out", "fig.svg"])
        .env("BILLIARDS_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let svg = std::fs::read_to_string(dir.path().join("fig.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(stdout(&out).contains("fig.svg"));
}

#[test]
fn render_solid_scene_writes_obj_lines() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scene.obj");
    let out = billiards(&[
        "render",
        "--domain",
        "k-tetra",
        "--view",
        "box",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let obj = std::fs::read_to_string(&path).unwrap();
    assert!(obj.lines().any(|l| l.starts_with("v ")));
    assert!(obj.lines().any(|l| l.starts_with("f ")));
}
