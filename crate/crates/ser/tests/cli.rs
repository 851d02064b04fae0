use std::path::Path;
use std::process::{Command, Output};

use ser::archive::ModelArchive;
use ser::config::Config;
use ser::exec::RayonExecutor;
use ser::run::{build_model, reference_solutions, solve_online, study_model};
use ser::table::read_table;
use ser::CliError;
use ser_core::ser::StepKind;
use ser_core::Parameter;

const SMALL: &str = "mesh.n = 8\nfem.degree = 1\ntrain.grid_n1 = 5\ntrain.grid_n2 = 5\ntest.count = 12\n";

fn small(extra: &str, dir: &Path) -> Config {
    Config::parse(&format!("{SMALL}{extra}output.dir = {}\n", dir.display())).unwrap()
}

fn ser(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ser")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, extra: &str) -> String {
    let path = dir.join("run.cfg");
    std::fs::write(&path, format!("{SMALL}{extra}output.dir = {}\n", dir.join("out").display())).unwrap();
    path.display().to_string()
}

#[test]
fn archive_round_trip_reproduces_outputs_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small("ser.r = 1\nser.rebuild_wn = true\nser.n_max = 4\neim.m_max = 5\nstudy.checkpoints = 2:2,4:5\n", dir.path());
    let truth = cfg.truth_problem().unwrap();
    let built = build_model(&cfg, &truth, &RayonExecutor).unwrap();
    assert_eq!(built.archive.checkpoints.len(), 2);
    let path = dir.path().join("model.json");
    built.archive.save(&path).unwrap();
    let loaded = ModelArchive::load(&path).unwrap();
    assert_eq!(loaded.model.eim_g, built.archive.model.eim_g);
    assert_eq!(loaded.model.blocks, built.archive.model.blocks);
    assert_eq!(loaded.report, built.archive.report);
    assert_eq!(loaded.to_bytes(), built.archive.to_bytes());
    for mu in cfg.test_set().unwrap().points() {
        let a = solve_online(&built.archive, *mu).unwrap();
        let b = solve_online(&loaded, *mu).unwrap();
        assert_eq!(a.output.to_bits(), b.output.to_bits(), "mu = {mu}");
        let (ua, ub) = (built.archive.model.lift(&a.solution), loaded.model.lift(&b.solution));
        assert!(ua.iter().zip(&ub).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}

#[test]
fn corrupted_archives_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small("ser.r = 1\nser.n_max = 2\neim.m_max = 2\nstudy.checkpoints = 2:2\n", dir.path());
    let truth = cfg.truth_problem().unwrap();
    let archive = build_model(&cfg, &truth, &RayonExecutor).unwrap().archive;
    let mut wrong_version = archive.clone();
    wrong_version.version += 1;
    let mut tampered = archive.clone();
    tampered.config = tampered.config.replace("mesh.n = 8", "mesh.n = 16");
    for bad in [wrong_version, tampered] {
        assert!(ModelArchive::from_bytes(&bad.to_bytes()).is_err());
    }
    assert!(ModelArchive::from_bytes(b"{}").is_err());
    let missing = ModelArchive::load(&dir.path().join("absent.json")).unwrap_err();
    assert_eq!(missing.exit_code(), 4);
}

#[test]
fn study_checks_the_model_and_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small("ser.r = 1\nser.rebuild_wn = true\nser.n_max = 5\neim.m_max = 5\nstudy.checkpoints = 3:3,5:5\n", dir.path());
    let truth = cfg.truth_problem().unwrap();
    let archive = build_model(&cfg, &truth, &RayonExecutor).unwrap().archive;
    let refs = reference_solutions(&cfg, &truth, &RayonExecutor).unwrap();
    let rows = study_model(&cfg, &archive, &truth, &refs, &RayonExecutor).unwrap();
    assert_eq!(rows.iter().map(|r| (r.n, r.m)).collect::<Vec<_>>(), [(3, 3), (5, 5)]);
    assert!(rows.iter().all(|r| r.is_complete() && r.variant == "r=1-rebuild"));
    // A checkpoint that was not saved cannot be recovered by truncation in rebuild mode.
    let other = Config {
        checkpoints: Some(vec![(2, 2)]),
        ..cfg.clone()
    };
    assert!(matches!(study_model(&other, &archive, &truth, &refs, &RayonExecutor), Err(CliError::Config(_))));
    let finer = Config { mesh_n: 10, ..cfg.clone() };
    assert!(matches!(study_model(&finer, &archive, &truth, &refs, &RayonExecutor), Err(CliError::Config(_))));
}

#[test]
fn cli_build_study_solve() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "ser.r = 1\nser.n_max = 5\neim.m_max = 5\n");
    let out = ser(&["build", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let model = dir.path().join("out/model-r1.json");
    assert!(model.exists());
    assert!(dir.path().join("out/report-r1.json").exists());
    let model = model.display().to_string();

    let out = ser(&["study", &cfg, &model]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_table(&dir.path().join("out/table-r1.csv")).unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!((rows[4].n, rows[4].m), (5, 5));

    let out = ser(&["solve", &model, "--mu1", "1.5", "--mu2", "2.5"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let s: f64 = stdout.lines().next().unwrap().trim_start_matches("s_N = ").parse().unwrap();
    let archive = ModelArchive::load(Path::new(&model)).unwrap();
    assert_eq!(s, format!("{:.12e}", solve_online(&archive, Parameter::new(1.5, 2.5)).unwrap().output).parse::<f64>().unwrap());
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "mesh.n = eight\n").unwrap();
    assert_eq!(ser(&["build", &bad.display().to_string()]).status.code(), Some(2));
    assert_eq!(ser(&["build", "/nonexistent/run.cfg"]).status.code(), Some(4));
    assert_eq!(ser(&["solve", "/nonexistent/model.json", "--mu1", "1", "--mu2", "1"]).status.code(), Some(4));
    assert_eq!(ser(&["solve", "/nonexistent/model.json", "--mu1", "20", "--mu2", "1"]).status.code(), Some(2));
    // One Newton step cannot solve the nonlinear problem.
    let cfg = write_config(dir.path(), "ser.n_max = 4\neim.m_max = 5\nnewton.max_iter = 1\n");
    assert_eq!(ser(&["build", &cfg]).status.code(), Some(3));
}

#[test]
fn diverging_snapshot_solves_are_skipped() {
    // At this coarse resolution the rebuild re-solve of (3.73, 10) under a rough EIM diverges.
    let dir = tempfile::tempdir().unwrap();
    let cfg = Config::parse(&format!(
        "mesh.n = 12\nfem.degree = 2\ntrain.grid_n1 = 8\ntrain.grid_n2 = 8\nser.r = 1\nser.rebuild_wn = true\nser.n_max = 10\neim.m_max = 10\noutput.dir = {}\n",
        dir.path().display()
    ))
    .unwrap();
    let truth = cfg.truth_problem().unwrap();
    let report = build_model(&cfg, &truth, &RayonExecutor).unwrap().archive.report;
    let failed = report.count(StepKind::SnapshotFailed, None);
    assert!(failed >= 1);
    let enriched = report.steps.iter().filter(|s| s.kind == StepKind::RbEnrich && s.m == 10).count();
    assert_eq!(enriched, 10);
}
