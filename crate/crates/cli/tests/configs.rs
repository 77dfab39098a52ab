//! Every shipped example config must parse and declare the right experiment.

use std::path::PathBuf;

use qderiv_cli::config::ExperimentConfig;

#[test]
fn shipped_configs_parse() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let expected = [
        ("mse_sweep.toml", "mse-sweep"),
        ("scaling_sweep.toml", "scaling-sweep"),
        ("scaling_sweep_hessian.toml", "scaling-sweep"),
        ("hessian.toml", "hessian"),
        ("metric.toml", "metric"),
        ("optimize.toml", "optimize"),
        ("reconstruct.toml", "reconstruct"),
    ];
    let mut found = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("toml") {
            continue;
        }
        found += 1;
        let name = path.file_name().unwrap().to_str().unwrap().to_string();
        let (config, _) = ExperimentConfig::load(&path)
            .unwrap_or_else(|e| panic!("{name} failed to parse: {e}"));
        let command = expected
            .iter()
            .find(|(f, _)| *f == name)
            .unwrap_or_else(|| panic!("{name} missing from the expected list"))
            .1;
        config
            .check_experiment(command)
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(config.seed.is_some(), "{name} must carry a default seed");
    }
    assert_eq!(found, expected.len());
}
