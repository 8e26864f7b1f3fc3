#![no_main]

use decaylab::spectral::GridHeader;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(h) = GridHeader::parse(text) {
            // A header that parses must describe an addressable payload.
            let n = h.sample_count().expect("validated header has a sample count");
            assert!(n.checked_mul(8).is_some());
        }
    }
});
