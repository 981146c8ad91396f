use helix::config::{Experiment, ExperimentConfig};
use helix::experiments::{run_experiment, RunContext};
use helix::families::VelocityFamily;
use helix::io::{read_numeric_csv, write_vector_dump, RunManifest, ENERGY_HEADER, SCALING_HEADER};
use helix::build_grid;

#[test]
fn energy_audit_from_a_dump() {
    let dir = tempfile::tempdir().unwrap();
    let g = build_grid(24, 16).unwrap();
    let dump = dir.path().join("w0.bin");
    write_vector_dump(&dump, &VelocityFamily::BesselSwirl.sample(&g, 1.0)).unwrap();
    let text = format!(
        "[grid]\nn_r = 24\nn_theta = 16\n[time]\nt_end = 0.02\n[initial]\ndump = {:?}\n",
        dump.display().to_string()
    );
    let cfg = ExperimentConfig::from_toml(Experiment::EnergyAudit, &text).unwrap();
    let out = dir.path().join("out");
    let o = run_experiment(Experiment::EnergyAudit, &cfg, &RunContext::new(&out)).unwrap();
    assert!(o.pass(), "{:?}", o.checks);

    let (header, rows) = read_numeric_csv(&out.join("energy-audit.csv")).unwrap();
    assert_eq!(header, ENERGY_HEADER);
    assert_eq!(rows.len(), 21);
    assert_eq!(rows[0][0], 0.0);
    assert!(rows.iter().all(|r| r.len() == ENERGY_HEADER.len()));

    let m = RunManifest::parse(&std::fs::read_to_string(out.join("energy-audit.manifest")).unwrap()).unwrap();
    assert_eq!(m.get("experiment"), Some("energy-audit"));
    assert_eq!(m.get("initial.dump"), Some(dump.to_str().unwrap()));
    assert_eq!(m.get("result"), Some("pass"));
}

#[test]
fn lift_check_writes_family_rows() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::defaults(Experiment::LiftCheck);
    cfg.grid.n_r = 16;
    cfg.grid.n_theta = 16;
    cfg.grid.n_z = 8;
    let o = run_experiment(Experiment::LiftCheck, &cfg, &RunContext::new(dir.path())).unwrap();
    assert!(o.pass(), "{:?}", o.checks);
    let text = std::fs::read_to_string(dir.path().join("lift-check.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), SCALING_HEADER.join(","));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 9);
    assert!(rows[0].starts_with("1.0000000000000000e0,default-generic,"), "{}", rows[0]);
}

#[test]
fn bad_dump_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("junk.bin");
    std::fs::write(&dump, b"not a dump").unwrap();
    let mut cfg = ExperimentConfig::defaults(Experiment::EnergyAudit);
    cfg.initial.dump = Some(dump);
    assert!(run_experiment(Experiment::EnergyAudit, &cfg, &RunContext::new(dir.path())).is_err());
}
