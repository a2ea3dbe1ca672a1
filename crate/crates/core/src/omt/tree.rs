//! The modelling tree: loading, structural checks and lookups.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::registry::{self, BuilderRef};
use crate::io::json::{read_json, write_json, JsonError};
use crate::typology::TagName;

/// The tree shipped with the crate.
pub const FIXTURE_JSON: &str = include_str!("../../fixtures/omt.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Branch {
    DecisionVariables,
    Objective,
    Constraints,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmtNode {
    pub id: u32,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<Branch>,
    pub question: String,
    #[serde(default)]
    pub children: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builder_ref: Option<BuilderRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<TagName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub remark: Option<String>,
    /// Set on nodes whose wording was filled in rather than taken from a
    /// published figure.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub reconstructed: bool,
}

impl OmtNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDocument {
    pub version: String,
    pub root: u32,
    pub nodes: Vec<OmtNode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error(transparent)]
    Json(#[from] JsonError),
    #[error("duplicate node id {0}")]
    DuplicateId(u32),
    #[error("root node {0} is not defined")]
    MissingRoot(u32),
    #[error("node {parent} lists unknown child {child}")]
    DanglingChild { parent: u32, child: u32 },
    #[error("node {0} is reachable along more than one path or lies on a cycle")]
    Cycle(u32),
    #[error("node {0} is not reachable from the root")]
    Unreachable(u32),
    #[error("root must have exactly the three branches decision variables, objective, constraints")]
    TopBranches,
    #[error("node {0} is a leaf without a builder")]
    LeafWithoutBuilder(u32),
    #[error("internal node {0} carries a builder")]
    BuilderOnInternalNode(u32),
    #[error("node {node}: builder `{name}` is not registered")]
    UnknownBuilder { node: u32, name: String },
    #[error("node {node}: parameters of `{name}` do not match the registry")]
    ParamSchemaMismatch { node: u32, name: String },
    #[error("tag {tag} has {count} leaves, expected exactly one")]
    TagLeafCount { tag: TagName, count: usize },
    #[error("cited node {0} is missing")]
    MissingCitedNode(u32),
    #[error("cited node {id} must be the {expected} leaf")]
    CitedMeaningMismatch { id: u32, expected: TagName },
}

/// Nodes whose id and meaning are fixed by the published tree, with a
/// keyword their label must contain.
pub const CITED_NODES: [(u32, TagName, &str); 12] = [
    (2, TagName::VariableUpperBound, "variable upper"),
    (3, TagName::IfThenBigM, "conditional"),
    (7, TagName::FixedUpperBound, "fixed upper"),
    (8, TagName::VariableLowerBound, "variable lower"),
    (9, TagName::ConditionalBound, "conditional"),
    (11, TagName::SetPacking, "at most one"),
    (12, TagName::PeriodLink, "consecutive"),
    (13, TagName::AssignValue, "assign"),
    (14, TagName::InventoryBalance, "inventory"),
    (17, TagName::SetPartitioning, "exactly one"),
    (19, TagName::FixToZero, "zero"),
    (24, TagName::IfAllThen, "if-then"),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmtTree {
    doc: TreeDocument,
    index: BTreeMap<u32, usize>,
    parent: BTreeMap<u32, u32>,
}

pub fn load_tree(text: &str) -> Result<OmtTree, TreeError> {
    OmtTree::from_document(read_json(text)?)
}

impl OmtTree {
    /// The embedded tree. Panics only if the shipped fixture is broken,
    /// which the test suite rules out.
    pub fn embedded() -> OmtTree {
        load_tree(FIXTURE_JSON).expect("embedded modelling tree is valid")
    }

    pub fn from_document(doc: TreeDocument) -> Result<OmtTree, TreeError> {
        let mut index = BTreeMap::new();
        for (i, n) in doc.nodes.iter().enumerate() {
            if index.insert(n.id, i).is_some() {
                return Err(TreeError::DuplicateId(n.id));
            }
        }
        if !index.contains_key(&doc.root) {
            return Err(TreeError::MissingRoot(doc.root));
        }
        let mut parent = BTreeMap::new();
        for n in &doc.nodes {
            for &c in &n.children {
                if !index.contains_key(&c) {
                    return Err(TreeError::DanglingChild { parent: n.id, child: c });
                }
                if c == doc.root || parent.insert(c, n.id).is_some() {
                    return Err(TreeError::Cycle(c));
                }
            }
        }
        let tree = OmtTree { doc, index, parent };
        tree.check_reachable()?;
        tree.check_top_branches()?;
        tree.check_builders()?;
        tree.check_tags()?;
        tree.check_cited()?;
        Ok(tree)
    }

    fn check_reachable(&self) -> Result<(), TreeError> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![self.doc.root];
        while let Some(id) = stack.pop() {
            if !seen.insert(id) {
                return Err(TreeError::Cycle(id));
            }
            stack.extend(&self.node_unchecked(id).children);
        }
        match self.index.keys().find(|id| !seen.contains(id)) {
            Some(&id) => Err(TreeError::Unreachable(id)),
            None => Ok(()),
        }
    }

    fn check_top_branches(&self) -> Result<(), TreeError> {
        let got: Vec<Option<Branch>> = self.root().children.iter().map(|&c| self.node_unchecked(c).branch).collect();
        let want = [Some(Branch::DecisionVariables), Some(Branch::Objective), Some(Branch::Constraints)];
        if got != want {
            return Err(TreeError::TopBranches);
        }
        Ok(())
    }

    fn check_builders(&self) -> Result<(), TreeError> {
        for n in &self.doc.nodes {
            match (&n.builder_ref, n.is_leaf()) {
                (None, true) => return Err(TreeError::LeafWithoutBuilder(n.id)),
                (Some(_), false) => return Err(TreeError::BuilderOnInternalNode(n.id)),
                (Some(b), true) => match registry::schema(&b.name, b.preset.as_deref()) {
                    None => return Err(TreeError::UnknownBuilder { node: n.id, name: b.name.clone() }),
                    Some(s) if s != b.params => {
                        return Err(TreeError::ParamSchemaMismatch { node: n.id, name: b.name.clone() })
                    }
                    Some(_) => {}
                },
                (None, false) => {}
            }
        }
        Ok(())
    }

    fn check_tags(&self) -> Result<(), TreeError> {
        for &tag in TagName::ALL {
            let count = self.doc.nodes.iter().filter(|n| n.is_leaf() && n.tag == Some(tag)).count();
            if count != 1 {
                return Err(TreeError::TagLeafCount { tag, count });
            }
        }
        Ok(())
    }

    fn check_cited(&self) -> Result<(), TreeError> {
        for (id, tag, keyword) in CITED_NODES {
            let n = self.node(id).ok_or(TreeError::MissingCitedNode(id))?;
            let ok = n.is_leaf()
                && n.tag == Some(tag)
                && n.branch == Some(Branch::Constraints)
                && n.label.to_lowercase().contains(keyword);
            if !ok {
                return Err(TreeError::CitedMeaningMismatch { id, expected: tag });
            }
        }
        Ok(())
    }

    fn node_unchecked(&self, id: u32) -> &OmtNode {
        &self.doc.nodes[self.index[&id]]
    }

    pub fn document(&self) -> &TreeDocument {
        &self.doc
    }

    pub fn version(&self) -> &str {
        &self.doc.version
    }

    pub fn root(&self) -> &OmtNode {
        self.node_unchecked(self.doc.root)
    }

    pub fn node(&self, id: u32) -> Option<&OmtNode> {
        self.index.get(&id).map(|&i| &self.doc.nodes[i])
    }

    pub fn nodes(&self) -> impl Iterator<Item = &OmtNode> {
        self.doc.nodes.iter()
    }

    pub fn parent_of(&self, id: u32) -> Option<u32> {
        self.parent.get(&id).copied()
    }

    /// The top-level branch node above `id` (itself if it is one); `None`
    /// for the root.
    pub fn branch_root_of(&self, id: u32) -> Option<u32> {
        let mut cur = id;
        loop {
            let p = self.parent_of(cur)?;
            if p == self.doc.root {
                return Some(cur);
            }
            cur = p;
        }
    }

    pub fn leaf_for(&self, tag: TagName) -> Option<&OmtNode> {
        self.doc.nodes.iter().find(|n| n.is_leaf() && n.tag == Some(tag))
    }

    pub fn to_json(&self) -> String {
        write_json(&self.doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc() -> TreeDocument {
        OmtTree::embedded().doc
    }

    #[test]
    fn embedded_loads_and_round_trips() {
        let t = OmtTree::embedded();
        assert_eq!(t.to_json(), FIXTURE_JSON);
        assert_eq!(t.branch_root_of(24), Some(1));
        assert_eq!(t.branch_root_of(1), Some(1));
        assert_eq!(t.branch_root_of(0), None);
        assert_eq!(t.leaf_for(TagName::SetPacking).unwrap().id, 11);
    }

    #[test]
    fn rejects_dangling_child() {
        let mut d = doc();
        d.nodes[0].children.push(999);
        assert_eq!(OmtTree::from_document(d), Err(TreeError::DanglingChild { parent: 0, child: 999 }));
    }

    #[test]
    fn rejects_cycle() {
        let mut d = doc();
        let i = d.nodes.iter().position(|n| n.id == 4).unwrap();
        d.nodes[i].children.push(1);
        assert!(matches!(OmtTree::from_document(d), Err(TreeError::Cycle(_))));
    }

    #[test]
    fn rejects_moved_cited_meaning() {
        let mut d = doc();
        let i = d.nodes.iter().position(|n| n.id == 17).unwrap();
        d.nodes[i].tag = Some(TagName::SetCovering);
        let j = d.nodes.iter().position(|n| n.id == 22).unwrap();
        d.nodes[j].tag = Some(TagName::SetPartitioning);
        assert_eq!(
            OmtTree::from_document(d),
            Err(TreeError::CitedMeaningMismatch { id: 17, expected: TagName::SetPartitioning })
        );
    }

    #[test]
    fn rejects_duplicate_tag_leaf() {
        let mut d = doc();
        let j = d.nodes.iter().position(|n| n.id == 22).unwrap();
        d.nodes[j].tag = Some(TagName::SetPacking);
        assert!(matches!(OmtTree::from_document(d), Err(TreeError::TagLeafCount { .. })));
    }

    #[test]
    fn rejects_schema_mismatch() {
        let mut d = doc();
        let j = d.nodes.iter().position(|n| n.id == 11).unwrap();
        d.nodes[j].builder_ref.as_mut().unwrap().params.clear();
        assert!(matches!(OmtTree::from_document(d), Err(TreeError::ParamSchemaMismatch { node: 11, .. })));
    }

    #[test]
    fn rejects_leaf_without_builder() {
        let mut d = doc();
        let j = d.nodes.iter().position(|n| n.id == 11).unwrap();
        d.nodes[j].builder_ref = None;
        assert_eq!(OmtTree::from_document(d), Err(TreeError::LeafWithoutBuilder(11)));
    }

    #[test]
    fn json_errors_carry_path() {
        let err = load_tree(r#"{"version":"1","root":0,"nodes":[{"id":0}]}"#).unwrap_err();
        let TreeError::Json(j) = err else { panic!() };
        assert_eq!(j.path, "nodes[0]");
    }
}
