#![no_main]

use decaylab::spectral::EnergyTrace;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(trace) = EnergyTrace::read_csv(data) {
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).expect("in-memory write");
        let again = EnergyTrace::read_csv(buf.as_slice()).expect("round trip");
        assert_eq!(again.len(), trace.len());
    }
});
