use dgap_core::analysis::{find_zeros, ZeroCatalog};
use dgap_core::experiments::{preset, run_experiment, ExperimentConfig, ExperimentReport};
use dgap_core::game::{builtin_names, BoundingBox, GameSpec};
use dgap_core::io::{read_json, read_trajectory, to_json_string, write_json, write_trajectory};
use dgap_core::{integrate_ode, run_dgap, ActionProfile, DgapConfig, OdeConfig, VectorField};

#[test]
fn game_descriptors_round_trip() {
    for name in builtin_names() {
        let spec = GameSpec::named(name).unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        let back: GameSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }
}

#[test]
fn descriptor_typos_are_rejected() {
    let bad = r#"{"type": "diamond_search", "params": {"alpha": 0.2, "delta": [[0,1],[1,0]], "colour": 1}}"#;
    assert!(serde_json::from_str::<GameSpec>(bad).is_err());
    let unknown = r#"{"type": "chess", "params": {}}"#;
    assert!(serde_json::from_str::<GameSpec>(unknown).is_err());
}

#[test]
fn catalog_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for name in builtin_names() {
        let g = GameSpec::named(name).unwrap().build().unwrap();
        let cat = find_zeros(g.as_ref(), &BoundingBox::default_for(g.n_players()), 3).unwrap();
        let path = dir.path().join(format!("{name}.json"));
        write_json(&path, &cat).unwrap();
        let back: ZeroCatalog = read_json(&path).unwrap();
        assert_eq!(back, cat);
        assert_eq!(back.schema_version, dgap_core::SCHEMA_VERSION);
    }
}

#[test]
fn report_json_round_trips() {
    let mut cfg = preset("bipartite_noise").unwrap();
    cfg.n_runs = 3;
    cfg.dgap.n_steps = 5_000;
    cfg.record_every = 10;
    let report = run_experiment(&cfg, 2).unwrap();
    let text = to_json_string(&report).unwrap();
    let back: ExperimentReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, report);
    assert_eq!(to_json_string(&back).unwrap(), text);
    let cfg_back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
    assert_eq!(cfg_back, cfg);
}

#[test]
fn trajectory_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = GameSpec::named("diamond_search_k3").unwrap().build().unwrap();
    let x0 = ActionProfile::new(vec![0.7, 1.3, 2.9]).unwrap();
    let t = run_dgap(g.as_ref(), &x0, &DgapConfig::new(5_000, 9).with_start_index(10), 7).unwrap();
    let path = dir.path().join("dgap.csv");
    write_trajectory(&t, &path).unwrap();
    assert_eq!(read_trajectory(&path).unwrap(), t);

    let o = integrate_ode(g.as_ref(), &x0, &OdeConfig::new(VectorField::Dampened, 2.0, 0.01, 3)).unwrap();
    let path = dir.path().join("ode.csv");
    write_trajectory(&o, &path).unwrap();
    assert_eq!(read_trajectory(&path).unwrap(), o);
}
