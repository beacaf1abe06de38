use std::path::Path;
use std::process::{Command, Output};

use gaussref::cli::Tuning;
use gaussref::Error;
use gaussref_core::solver::{PipelineError, SolverError};

fn gaussref(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaussref"))
        .args(args)
        .output()
        .expect("run gaussref")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

#[test]
fn help_exits_zero() {
    let out = gaussref(&["refine", "--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(text(&out.stdout).contains("Usage"));
}

#[test]
fn unknown_flag_prints_usage_and_exits_one() {
    let out = gaussref(&["refine", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("Usage"));
}

#[test]
fn missing_camera_file_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no_such_cameras.txt");
    let out = gaussref(&[
        "refine",
        "--mesh",
        "mesh.obj",
        "--cameras",
        s(&missing),
        "--images",
        "a.png",
        "--out",
        s(&dir.path().join("out.obj")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        text(&out.stderr).contains("no_such_cameras.txt"),
        "{}",
        text(&out.stderr)
    );
}

#[test]
fn unknown_config_key_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "wregg = 1\n").unwrap();
    let out = gaussref(&[
        "refine-seq",
        "--manifest",
        "m.txt",
        "--out-dir",
        s(dir.path()),
        "--config",
        s(&cfg),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("wregg"));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "wreg = 0.5\nsigma_hat = 5\n").unwrap();
    let tuning = Tuning {
        config: Some(cfg),
        wreg: Some(2.0),
        ..Tuning::default()
    };
    let resolved = tuning.resolve().unwrap();
    assert_eq!(resolved.params.energy.w_reg, 2.0);
    assert_eq!(resolved.params.sigma_hat, 5.0);
}

#[test]
fn numerical_failures_map_to_exit_two() {
    let e = Error::Pipeline(PipelineError::Solver(SolverError::NonFiniteEnergy { iteration: 3 }));
    assert_eq!(e.exit_code(), 2);
    assert_eq!(Error::Config("x".into()).exit_code(), 1);
}

#[test]
fn quad_faces_are_rejected_with_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("scene");
    assert_eq!(
        gaussref(&["synth", "--cams", "2", "--out", s(&scene)]).status.code(),
        Some(0)
    );
    let quad = dir.path().join("quad.obj");
    std::fs::write(&quad, "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n").unwrap();
    let out = gaussref(&[
        "refine",
        "--mesh",
        s(&quad),
        "--cameras",
        s(&scene.join("cameras.txt")),
        "--images",
        s(&scene.join("cam00.png")),
        s(&scene.join("cam01.png")),
        "--out",
        s(&dir.path().join("out.obj")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("quad.obj:5"), "{}", text(&out.stderr));
}

#[test]
fn synth_then_refine_seq_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("scene");
    let out = gaussref(&[
        "synth",
        "--kind",
        "plane-wave",
        "--cams",
        "8",
        "--frames",
        "2",
        "--out",
        s(&scene),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    for name in [
        "cameras.txt",
        "coarse.obj",
        "truth.obj",
        "k_true.csv",
        "manifest.txt",
        "cam07.png",
    ] {
        assert!(scene.join(name).is_file(), "{name}");
    }

    let run = dir.path().join("run");
    let dump = dir.path().join("energy.csv");
    let out = gaussref(&[
        "refine-seq",
        "--manifest",
        s(&scene.join("manifest.txt")),
        "--out-dir",
        s(&run),
        "--max-iters",
        "8",
        "--energy-dump",
        s(&dump),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let report = std::fs::read_to_string(run.join("report.csv")).unwrap();
    assert!(report.contains("# config: max_iters=8"));
    let table: Vec<&str> = report.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(table[0], "frame,iters,E0,Ef,max_k_mm,seconds");
    assert_eq!(table.len(), 3);
    assert!(run.join("frame001.obj").is_file());
    let dump = std::fs::read_to_string(&dump).unwrap();
    assert!(dump.starts_with("frame,iter,E_total,E_sim,E_reg,saturated,pairs\n"));

    // the report header alone reproduces the run
    let rerun = dir.path().join("rerun");
    let out = gaussref(&[
        "refine-seq",
        "--manifest",
        s(&scene.join("manifest.txt")),
        "--out-dir",
        s(&rerun),
        "--config",
        s(&run.join("report.csv")),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    for name in ["frame000_k.csv", "frame001_k.csv", "frame001.obj"] {
        assert_eq!(
            std::fs::read(run.join(name)).unwrap(),
            std::fs::read(rerun.join(name)).unwrap(),
            "{name}"
        );
    }

    let metrics = dir.path().join("eval.csv");
    let out = gaussref(&[
        "eval",
        "--mesh",
        s(&run.join("frame000.obj")),
        "--manifest",
        s(&scene.join("manifest.txt")),
        "--k-true",
        s(&scene.join("k_true.csv")),
        "--out",
        s(&metrics),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let metrics = std::fs::read_to_string(&metrics).unwrap();
    let lines: Vec<&str> = metrics.lines().collect();
    assert_eq!(lines[0], "camera,mean_abs_hsv_err");
    assert_eq!(lines.len(), 1 + 8 + 2);
    assert!(lines[10].starts_with("k_rmse_mm,"));
}

#[test]
fn decompose_lists_patches() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("gray.ppm");
    let mut bytes = b"P6\n8 8\n255\n".to_vec();
    bytes.extend(std::iter::repeat_n(128u8, 8 * 8 * 3));
    std::fs::write(&img, bytes).unwrap();
    let csv = dir.path().join("g.csv");
    let out = gaussref(&["decompose", s(&img), "--out", s(&csv)]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let body = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(body.lines().count(), 2);
    assert!(body.lines().nth(1).unwrap().starts_with("0,4,4,4,"));
}
