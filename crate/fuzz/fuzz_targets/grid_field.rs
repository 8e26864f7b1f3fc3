#![no_main]

use decaylab::spectral::{GridField, GridHeader};
use libfuzzer_sys::fuzz_target;

// Input layout: JSON header, a newline, then the raw payload.
fuzz_target!(|data: &[u8]| {
    let Some(split) = data.iter().position(|&b| b == b'\n') else {
        return;
    };
    let Ok(text) = std::str::from_utf8(&data[..split]) else {
        return;
    };
    let Ok(header) = GridHeader::parse(text) else {
        return;
    };
    if let Ok(field) = GridField::from_parts(&header, &data[split + 1..]) {
        assert_eq!(field.payload(), &data[split + 1..]);
        assert_eq!(field.header().shape, header.shape);
    }
});
