#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(line) = std::str::from_utf8(data) {
        // the JSONL record decoder must never panic on arbitrary lines
        let _ = abso::experiment::record_from_json_line(line);
    }
});
