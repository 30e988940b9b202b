#![no_main]

use std::path::Path;

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // Small caps keep the load-time consistency checks bounded; the parser
    // and validator must never panic. The base dir does not exist, so
    // machine references fail cleanly.
    let sat = agc::sat::SatOptions {
        ap_cap: 4,
        state_cap: 10_000,
    };
    let _ = agc::mission::MissionFile::parse_str(text, Path::new("./nonexistent-fuzz-base"), &sat);
});
