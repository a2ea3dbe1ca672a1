use std::collections::BTreeSet;
use std::sync::Arc;

use omt_core::classify::classify_model;
use omt_core::io::lp::parse_lp;
use omt_core::omt::session::read_script;
use omt_core::omt::{OmtTree, Session};

fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn node_ids(file: &str) -> BTreeSet<u32> {
    let m = parse_lp(&fixture(file)).unwrap();
    assert!(m.validate().is_ok(), "{file}: {}", m.validate());
    classify_model(&m).unwrap().node_ids()
}

#[test]
fn chemical() {
    assert_eq!(node_ids("chemical.lp"), BTreeSet::from([11, 3, 9, 14, 7]));
}

#[test]
fn supply_chain() {
    assert_eq!(node_ids("supply_chain.lp"), BTreeSet::from([12, 13, 2, 8, 3, 9]));
}

#[test]
fn timetabling() {
    assert_eq!(node_ids("timetabling.lp"), BTreeSet::from([17, 11, 24]));
}

#[test]
fn vrp() {
    assert_eq!(node_ids("vrp.lp"), BTreeSet::from([17, 19, 2, 11]));
}

#[test]
fn chemical_replay_matches_fixture_classes() {
    let script = read_script(&fixture("chemical_script.json")).unwrap();
    let s = Session::replay(Arc::new(OmtTree::embedded()), &script).unwrap();
    assert!(s.is_complete());
    let m = s.emit_model().unwrap();
    assert_eq!(classify_model(&m).unwrap().node_ids(), BTreeSet::from([11, 3, 9, 14, 7]));
}
