#![no_main]
use libfuzzer_sys::fuzz_target;
use teamforge_core::session::parse_request_list;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_request_list(text);
    }
});
