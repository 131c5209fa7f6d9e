#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        // parsing + validation must reject malformed configs with an error,
        // never a panic
        let _ = abso::experiment::parse_config(text);
    }
});
