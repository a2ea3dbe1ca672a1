mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use omt_core::classify::classify_model;
use omt_core::omt::registry::schema;
use omt_core::omt::session::read_script;
use omt_core::omt::tree::CITED_NODES;
use omt_core::omt::{Branch, OmtTree, Session};
use omt_core::TagName;

#[test]
fn cited_nodes_keep_their_meaning() {
    let t = OmtTree::embedded();
    for (id, tag, keyword) in CITED_NODES {
        let n = t.node(id).unwrap();
        assert_eq!(n.tag, Some(tag), "node {id}");
        assert!(n.label.to_lowercase().contains(keyword), "node {id}: {}", n.label);
        assert!(!n.reconstructed, "node {id}");
        assert_eq!(tag.omt_node_id(), id);
    }
}

#[test]
fn one_leaf_per_tag() {
    let t = OmtTree::embedded();
    for &tag in TagName::ALL {
        let leaves: Vec<u32> = t.nodes().filter(|n| n.is_leaf() && n.tag == Some(tag)).map(|n| n.id).collect();
        assert_eq!(leaves, [tag.omt_node_id()], "{tag}");
    }
}

#[test]
fn every_leaf_builder_is_registered() {
    let t = OmtTree::embedded();
    for n in t.nodes().filter(|n| n.is_leaf()) {
        let b = n.builder_ref.as_ref().unwrap_or_else(|| panic!("leaf {} has no builder", n.id));
        assert_eq!(schema(&b.name, b.preset.as_deref()).as_ref(), Some(&b.params), "leaf {}", n.id);
    }
}

#[test]
fn three_top_branches() {
    let t = OmtTree::embedded();
    let branches: Vec<_> = t.root().children.iter().map(|&c| t.node(c).unwrap().branch).collect();
    assert_eq!(branches, [Some(Branch::DecisionVariables), Some(Branch::Objective), Some(Branch::Constraints)]);
}

#[test]
fn chemical_script_replays_to_expected_nodes() {
    let script = read_script(&common::fixture("chemical_script.json")).unwrap();
    let s = Session::replay(Arc::new(OmtTree::embedded()), &script).unwrap();
    let m = s.emit_model().unwrap();
    assert_eq!(classify_model(&m).unwrap().node_ids(), BTreeSet::from([11, 3, 9, 14, 7]));
}

#[test]
fn skeleton_validates_after_every_step() {
    let script = read_script(&common::fixture("chemical_script.json")).unwrap();
    let mut s = Session::start(Arc::new(OmtTree::embedded()));
    for a in script {
        s.answer(a).unwrap();
        let report = s.skeleton().model().validate();
        assert!(report.is_ok(), "{report}");
    }
}
