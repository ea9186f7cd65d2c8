#![no_main]
use libfuzzer_sys::fuzz_target;
use teamforge_core::analytics::WilcoxonRequest;
use teamforge_core::session::parse_json;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(req) = parse_json::<WilcoxonRequest>(text) else { return };
    if let Ok(r) = req.run() {
        assert!((0.0..=1.0).contains(&r.p_value), "p = {}", r.p_value);
    }
});
