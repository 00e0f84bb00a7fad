use std::path::Path;

use zrbr::experiments::ExperimentConfig;

#[test]
fn shipped_configs_validate_and_round_trip() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("toml") {
            continue;
        }
        let cfg = ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        cfg.validate().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let again = ExperimentConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(again, cfg, "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 4);
}

#[test]
fn standard_file_matches_builtin_standard() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/standard.toml");
    assert_eq!(ExperimentConfig::load(&path).unwrap(), ExperimentConfig::standard());
}
