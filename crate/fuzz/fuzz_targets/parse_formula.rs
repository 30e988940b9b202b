#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // The parser must never panic, and whatever it accepts must round-trip
    // through the printer unchanged.
    if let Ok(formula) = agc::ltl::parse(text) {
        let rendered = agc::ltl::print(&formula);
        let back = agc::ltl::parse(&rendered).expect("printed formulas re-parse");
        assert_eq!(back, formula, "round trip changed the tree for {rendered}");
    }
});
