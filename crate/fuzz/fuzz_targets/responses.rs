#![no_main]
use libfuzzer_sys::fuzz_target;
use teamforge_core::style::score_document;
use teamforge_core::profile::ResponseDocument;

// Anything that validates must score without error.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(doc) = ResponseDocument::from_json_str(text) {
        let card = score_document(&doc, None).expect("validated responses must score");
        assert_eq!(card.profile.normal.sum(), 60);
        assert_eq!(card.profile.tense.sum(), 60);
    }
});
