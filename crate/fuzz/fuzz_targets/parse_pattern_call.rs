#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // Pattern calls inside formulas expand through the same hook the
    // mission frontend uses; expansion must never panic.
    let expander = |name: &str, args: &[agc::Ap]| {
        agc::patterns::expand_call(name, args).map_err(|e| e.to_string())
    };
    let _ = agc::ltl::parse_with_calls(text, &expander);
});
