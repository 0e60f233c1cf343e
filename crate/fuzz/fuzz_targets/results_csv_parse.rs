#![no_main]

use hetdp::harness::{parse_csv, to_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(rows) = parse_csv(text) {
            let _ = to_csv(&rows);
        }
    }
});
