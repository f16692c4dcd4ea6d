use std::path::Path;
use std::process::Command;

use apwb_harness::experiments::MESH_COLUMNS;
use apwb_harness::output::{Table, PROFILE_COLUMNS, SERIES_COLUMNS, TABLE_COLUMNS, WALL_TIME_KEY};

fn apwb(args: &[&str], out: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_apwb"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn strip_wall_time(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with(&format!("# {WALL_TIME_KEY}=")))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn invalid_configuration_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["run", "--eps=-1"],
        vec!["run", "--gamma", "0.5"],
        vec!["run", "--cells", "0"],
        vec!["perturb", "--recon", "e", "--gamma", "1"],
        vec!["nonsense"],
        vec!["run", "--potential", "cubic"],
    ] {
        let out = apwb(&args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn blow_up_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = apwb(
        &[
            "run",
            "--eps",
            "1e-3",
            "--variant",
            "nonap",
            "--t-final",
            "0.05",
        ],
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.cfg");
    std::fs::write(&cfg, "# sod setup\ncells = 40\nt_final = 0.05\ngamma=1.4\n").unwrap();
    let out = apwb(
        &[
            "sod",
            "--config",
            cfg.to_str().unwrap(),
            "--cells",
            "20",
            "--fast",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let t = Table::read(&dir.path().join("sod_n20.csv")).unwrap();
    t.expect_columns(&PROFILE_COLUMNS).unwrap();
    assert_eq!(t.rows.len(), 20);
    assert_eq!(t.metadata.get("t-final"), Some("0.05"));
    assert_eq!(t.metadata.get("cells"), Some("20"));
}

#[test]
fn outputs_follow_the_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let runs: [&[&str]; 5] = [
        &["sod", "--eps", "1e-3", "--gamma", "1", "--t-final", "0.02"],
        &["hydro-table", "--fast", "--eps", "1", "--t-final", "0.1"],
        &["perturb", "--t-final", "0.05"],
        &["longtime", "--fast", "--t-final", "0.5"],
        &["mesh-sweep", "--cells", "50", "--t-final", "0.01"],
    ];
    for args in runs {
        let out = apwb(args, d);
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }

    let sod = Table::read(&d.join("sod_n100.csv")).unwrap();
    sod.expect_columns(&PROFILE_COLUMNS).unwrap();
    assert!(sod.metadata.get("l1_to_reference").is_some());
    let reference = Table::read(&d.join("sod_reference_n100.csv")).unwrap();
    assert_eq!(reference.metadata.get("reference"), Some("porous-medium"));

    let table = Table::read(&d.join("hydro_table_isothermal.csv")).unwrap();
    table.expect_columns(&TABLE_COLUMNS).unwrap();
    assert_eq!(table.rows.len(), 3);
    assert!(table.column("err_rho").unwrap().iter().all(|e| *e >= 0.0));

    for name in ["perturb_initial", "perturb_wb", "perturb_nonwb"] {
        let t = Table::read(&d.join(format!("{name}.csv"))).unwrap();
        t.expect_columns(&PROFILE_COLUMNS).unwrap();
        assert_eq!(t.metadata.get("rho_column"), Some("rho-rho_e"));
    }

    for name in ["wb", "nonwb"] {
        let t = Table::read(&d.join(format!("longtime_eps1e0_{name}.csv"))).unwrap();
        t.expect_columns(&SERIES_COLUMNS).unwrap();
        let time = t.column("t").unwrap();
        assert_eq!(time[0], 0.0);
        assert!((time.last().unwrap() - 0.5).abs() < 1e-12);
        assert!(time.windows(2).all(|w| w[1] > w[0]));
    }

    let mesh = Table::read(&d.join("mesh_sweep.csv")).unwrap();
    mesh.expect_columns(&MESH_COLUMNS).unwrap();
    assert_eq!(mesh.rows.len(), 4);
    for t in [&sod, &table, &mesh] {
        assert!(t.metadata.get("version").is_some());
        assert!(t.metadata.get(WALL_TIME_KEY).is_some());
    }
}

#[test]
fn runs_are_deterministic_apart_from_wall_time() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "hydro-table",
        "--fast",
        "--t-final",
        "0.05",
        "--cells",
        "30",
    ];
    assert!(apwb(&args, a.path()).status.success());
    assert!(apwb(&args, b.path()).status.success());
    let name = "hydro_table_isothermal.csv";
    assert_eq!(
        strip_wall_time(&a.path().join(name)),
        strip_wall_time(&b.path().join(name))
    );
}
