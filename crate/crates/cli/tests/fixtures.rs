//! The bundled data files are generated deterministically; these tests pin
//! them to the generators so the committed bytes cannot drift.
//!
//! To regenerate after changing the generators:
//! `cargo test -p mcroc-cli --test fixtures -- --ignored regen_fixtures`

mod common;

use std::fs;

#[test]
fn bundled_synthetic9_matches_generator() {
    let bundled = fs::read_to_string(common::data_dir().join("synthetic9.csv")).unwrap();
    assert_eq!(bundled, common::synthetic9_csv());
}

#[test]
fn bundled_synthetic3_matches_generator() {
    let bundled = fs::read_to_string(common::data_dir().join("synthetic3.csv")).unwrap();
    assert_eq!(bundled, common::synthetic3_csv());
}

#[test]
#[ignore]
fn regen_fixtures() {
    let dir = common::data_dir();
    fs::create_dir_all(&dir).unwrap();
    fs::write(dir.join("synthetic9.csv"), common::synthetic9_csv()).unwrap();
    fs::write(dir.join("synthetic3.csv"), common::synthetic3_csv()).unwrap();
}
