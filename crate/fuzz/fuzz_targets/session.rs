#![no_main]
use libfuzzer_sys::fuzz_target;
use teamforge_core::session::{parse_session, render_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(session) = parse_session(text) {
        let again = parse_session(&render_json(&session)).expect("rendered session must parse");
        assert_eq!(render_json(&again), render_json(&session));
    }
});
