//! Replays the checked-in fuzz seeds through the parsers on stable.

use std::path::PathBuf;

use decay_lab::config;
use decaylab::spectral::{EnergyTrace, GridField, GridHeader};

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn grid_header_seeds() {
    for (name, data) in seeds("grid_header") {
        let ok = GridHeader::parse(std::str::from_utf8(&data).unwrap()).is_ok();
        assert_eq!(ok, name.starts_with("valid"), "{name}");
    }
}

#[test]
fn grid_field_seeds() {
    for (name, data) in seeds("grid_field") {
        let split = data.iter().position(|&b| b == b'\n').unwrap();
        let header = GridHeader::parse(std::str::from_utf8(&data[..split]).unwrap()).unwrap();
        let field = GridField::from_parts(&header, &data[split + 1..]);
        assert_eq!(field.is_ok(), name.starts_with("valid"), "{name}");
        if let Ok(f) = field {
            assert_eq!(f.payload(), &data[split + 1..]);
        }
    }
}

#[test]
fn trace_csv_seeds() {
    for (name, data) in seeds("trace_csv") {
        let r = EnergyTrace::read_csv(data.as_slice());
        assert_eq!(r.is_ok(), name == "exact.csv", "{name}");
    }
}

#[test]
fn experiment_config_seeds() {
    for (name, data) in seeds("experiment_config") {
        let r = config::parse(std::str::from_utf8(&data).unwrap());
        let bad = name.starts_with("negative") || name.starts_with("missing");
        assert_eq!(r.is_err(), bad, "{name}: {r:?}");
    }
}
