//! Replays the checked-in fuzz corpus through the same entry points and
//! invariants as the fuzz targets, so stable `cargo test` covers them too.

use std::path::PathBuf;

use teamforge_core::analytics::{parse_projects_csv, productivity_table_csv, split_snapshots, WilcoxonRequest};
use teamforge_core::profile::ResponseDocument;
use teamforge_core::recommend::RecommenderConfig;
use teamforge_core::session::{parse_config_toml, parse_json, parse_request_list, parse_session, render_json};
use teamforge_core::style::score_document;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

/// Number of seeds that parsed successfully.
fn replay(target: &str, f: impl Fn(&str) -> bool) -> usize {
    seeds(target).iter().filter(|(_, text)| f(text)).count()
}

#[test]
fn responses() {
    let ok = replay("responses", |text| match ResponseDocument::from_json_str(text) {
        Ok(doc) => {
            let card = score_document(&doc, None).unwrap();
            assert_eq!(card.profile.normal.sum(), 60);
            true
        }
        Err(v) => {
            assert!(!v.is_empty());
            false
        }
    });
    assert_eq!(ok, 2);
}

#[test]
fn session() {
    let ok = replay("session", |text| match parse_session(text) {
        Ok(s) => {
            let again = parse_session(&render_json(&s)).unwrap();
            assert_eq!(render_json(&again), render_json(&s));
            true
        }
        Err(_) => false,
    });
    assert_eq!(ok, 3);
}

#[test]
fn request_list() {
    assert_eq!(replay("request_list", |text| parse_request_list(text).is_ok()), 2);
}

#[test]
fn projects_csv() {
    let ok = replay("projects_csv", |text| match parse_projects_csv(text) {
        Ok(rows) => {
            let _ = productivity_table_csv(&rows);
            let _ = split_snapshots(&rows);
            true
        }
        Err(_) => false,
    });
    assert_eq!(ok, 1);
}

#[test]
fn config() {
    let ok = replay("config", |text| match parse_config_toml(text, RecommenderConfig::default()) {
        Ok(c) => {
            c.validate().unwrap();
            true
        }
        Err(_) => false,
    });
    assert_eq!(ok, 2);
}

#[test]
fn wilcoxon_request() {
    let ok = replay("wilcoxon_request", |text| {
        let Ok(req) = parse_json::<WilcoxonRequest>(text) else { return false };
        match req.run() {
            Ok(r) => {
                assert!((0.0..=1.0).contains(&r.p_value));
                true
            }
            Err(_) => false,
        }
    });
    assert_eq!(ok, 2);
}
