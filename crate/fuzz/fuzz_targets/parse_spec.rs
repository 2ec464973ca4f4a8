#![no_main]

use libfuzzer_sys::fuzz_target;
use selfinv::grammar::caret_diagnostic;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Err(e) = selfinv::parse_spec(text) {
        let _ = caret_diagnostic(text, &e);
    }
    let _ = selfinv::parse_dist(text);
    let _ = selfinv::parse_joint(text);
});
