#![no_main]
use libfuzzer_sys::fuzz_target;
use teamforge_core::analytics::{parse_projects_csv, productivity_table_csv, productivity_table_text, split_snapshots};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rows) = parse_projects_csv(text) {
        let _ = productivity_table_text(&rows);
        let _ = productivity_table_csv(&rows);
        let _ = split_snapshots(&rows);
    }
});
