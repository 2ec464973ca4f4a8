#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = selfinv::io::parse_grid(text);
    let _ = selfinv::io::parse_bin_grid(text);
});
