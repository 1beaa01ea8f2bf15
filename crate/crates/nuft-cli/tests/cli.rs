//! CLI behavior: exit codes, error payloads, manifests, format handling.

use std::path::Path;
use std::process::{Command, Output};

use nuft::mesh::{save_mesh, MeshFormat};
use nuft::shapes;

fn nuft_bin() -> &'static str {
    env!("CARGO_BIN_EXE_nuft")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(nuft_bin())
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stderr_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().unwrap_or("");
    serde_json::from_str(line).unwrap_or_else(|_| panic!("stderr not JSON: {text}"))
}

#[test]
fn missing_input_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["transform", "--input", "nope.off", "--output", "x.spec", "--res", "8"],
    );
    assert_eq!(exit_code(&out), 4);
    assert_eq!(stderr_json(&out)["error"]["kind"], "io");
}

#[test]
fn malformed_mesh_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.off"), "OFF\n4 1 0\n0 0 0\n").unwrap();
    let out = run_in(
        dir.path(),
        &["transform", "--input", "bad.off", "--output", "x.spec", "--res", "8"],
    );
    assert_eq!(exit_code(&out), 2);
    assert_eq!(stderr_json(&out)["error"]["kind"], "parse");
}

#[test]
fn non_watertight_aux_node_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    // an open single-triangle "boundary"
    std::fs::write(
        dir.path().join("open.off"),
        "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n",
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &[
            "transform", "--input", "open.off", "--output", "x.spec", "--res", "8", "--aux-node",
        ],
    );
    assert_eq!(exit_code(&out), 2);
    assert_eq!(stderr_json(&out)["error"]["kind"], "boundary_defects");
}

#[test]
fn sigma_collision_without_jitter_is_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    save_mesh(
        dir.path().join("sq.json"),
        &shapes::square_solid(0.25, 0.75),
        MeshFormat::Json,
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &[
            "transform", "--input", "sq.json", "--output", "x.spec", "--res", "8", "--eps", "0",
        ],
    );
    assert_eq!(exit_code(&out), 3);
    assert_eq!(stderr_json(&out)["error"]["kind"], "sigma_collision");
}

#[test]
fn degree_override_mismatch_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    save_mesh(
        dir.path().join("sq.json"),
        &shapes::square_solid(0.25, 0.75),
        MeshFormat::Json,
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &[
            "transform", "--input", "sq.json", "--output", "x.spec", "--res", "8", "--degree", "1",
        ],
    );
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn manifest_echoes_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    save_mesh(
        dir.path().join("sq.json"),
        shapes::square_loop(0.2, 0.8).mesh(),
        MeshFormat::Json,
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &[
            "transform", "--input", "sq.json", "--output", "sq.spec", "--res", "8", "--aux-node",
            "--seed", "11",
        ],
    );
    assert_eq!(exit_code(&out), 0);
    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("sq.spec.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["command"], "transform");
    assert_eq!(manifest["seed"], 11);
    assert_eq!(manifest["config"]["aux_node"], true);
    assert_eq!(manifest["config"]["resolution"], serde_json::json!([8, 8]));
    // defaults are echoed too
    assert_eq!(manifest["config"]["margin"], 0.125);
    assert_eq!(manifest["config"]["eps"], 1e-6);
    assert_eq!(manifest["config"]["dc_policy"], "analytic");
}

#[test]
fn pgm_polygonize_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    // filled disk raster, 24x24
    let n = 24usize;
    let mut data = format!("P5\n{n} {n}\n255\n").into_bytes();
    for row in 0..n {
        for col in 0..n {
            let x = (col as f64 + 0.5) / n as f64 - 0.5;
            let y = (row as f64 + 0.5) / n as f64 - 0.5;
            data.push(if (x * x + y * y).sqrt() < 0.3 { 255 } else { 0 });
        }
    }
    std::fs::write(dir.path().join("disk.pgm"), data).unwrap();
    let out = run_in(
        dir.path(),
        &[
            "contour", "--input", "disk.pgm", "--output", "disk.json", "--upsample", "4",
        ],
    );
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let mesh = nuft::mesh::load_mesh(dir.path().join("disk.json")).unwrap();
    let boundary = nuft::mesh::validate_boundary(&mesh).unwrap();
    let area = boundary.enclosed_signed_volume();
    let want = std::f64::consts::PI * 0.3 * 0.3;
    assert!((area - want).abs() < 0.05 * want, "area {area} vs {want}");
}

#[test]
fn sweep_csv_has_expected_rows() {
    let dir = tempfile::tempdir().unwrap();
    save_mesh(
        dir.path().join("poly.json"),
        shapes::random_convex_polygon(3).mesh(),
        MeshFormat::Json,
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &[
            "sweep", "--input", "poly.json", "--output", "out.csv", "--res", "8,16", "--reps",
            "nuft,binary", "--samples", "20000", "--seed", "7",
        ],
    );
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "rep,resolution,iou,rel_error,stderr,samples,seed");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("nuft,8,"));
    assert!(lines[4].starts_with("binary,16,"));
}

#[test]
fn field_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    save_mesh(
        dir.path().join("sq.json"),
        shapes::square_loop(0.3, 0.7).mesh(),
        MeshFormat::Json,
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &[
            "transform", "--input", "sq.json", "--output", "sq.spec", "--res", "16", "--aux-node",
            "--no-normalize",
        ],
    );
    assert_eq!(exit_code(&out), 0);
    let out = run_in(
        dir.path(),
        &["field", "--input", "sq.spec", "--output", "sq.field"],
    );
    assert_eq!(exit_code(&out), 0);
    let field = nuft::spectral::ScalarField::load(dir.path().join("sq.field")).unwrap();
    // mean of the reconstruction equals the enclosed area
    assert!((field.mean() - 0.16).abs() < 1e-9);
}
