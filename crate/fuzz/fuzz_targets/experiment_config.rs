#![no_main]

use decay_lab::config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        match config::parse(text) {
            Ok(cfg) => assert!(cfg.tolerances.invalid_field().is_none()),
            Err(diags) => {
                assert!(!diags.is_empty());
                for d in diags {
                    assert!(d.line >= 1 && d.column >= 1);
                }
            }
        }
    }
});
