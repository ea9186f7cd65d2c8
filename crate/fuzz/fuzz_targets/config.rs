#![no_main]
use libfuzzer_sys::fuzz_target;
use teamforge_core::recommend::RecommenderConfig;
use teamforge_core::session::parse_config_toml;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(config) = parse_config_toml(text, RecommenderConfig::default()) {
        // Accepted configs are always usable.
        config.validate().expect("parsed config must validate");
    }
});
