//! OWL/XML emission for the MILP ontology.

use std::collections::BTreeSet;
use std::fmt::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::is_identifier;
use crate::typology::TagName;

pub const ONTOLOGY_IRI: &str = "http://www.semanticweb.org/milp-ontology";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OwlError {
    #[error("descriptor declares no classes")]
    Empty,
    #[error("relation references undeclared class `{0}`")]
    UnknownClass(String),
    #[error("`{0}` is not a valid class name")]
    InvalidName(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OntologyDescriptor {
    pub classes: Vec<String>,
    /// `(child, parent)` is-a pairs.
    pub subclass_of: Vec<(String, String)>,
    /// `(part, whole)` pairs.
    pub part_of: Vec<(String, String)>,
}

const CORE_CLASSES: &[&str] = &[
    "MILP",
    "ProblemSense",
    "ObjectiveFunction",
    "Constraint",
    "LinearFunction",
    "Coefficient",
    "Operator",
    "DecisionVariable",
    "NumberType",
    "IndexSet",
    "Iterator",
    "Sense",
];

const PART_OF: &[(&str, &str)] = &[
    ("ProblemSense", "MILP"),
    ("ObjectiveFunction", "MILP"),
    ("Constraint", "MILP"),
    ("LinearFunction", "ObjectiveFunction"),
    ("LinearFunction", "Constraint"),
    ("Sense", "Constraint"),
    ("Iterator", "Constraint"),
    ("Coefficient", "LinearFunction"),
    ("Operator", "LinearFunction"),
    ("DecisionVariable", "LinearFunction"),
    ("NumberType", "DecisionVariable"),
    ("NumberType", "Coefficient"),
    ("IndexSet", "DecisionVariable"),
    ("IndexSet", "Coefficient"),
];

impl Default for OntologyDescriptor {
    fn default() -> Self {
        let typology: Vec<&str> = TagName::ALL.iter().filter(|t| !t.is_catch_all()).map(|t| t.as_str()).collect();
        OntologyDescriptor {
            classes: CORE_CLASSES.iter().chain(&typology).map(|s| s.to_string()).collect(),
            subclass_of: typology.iter().map(|t| (t.to_string(), "Constraint".to_string())).collect(),
            part_of: PART_OF.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        }
    }
}

pub fn write_owl(d: &OntologyDescriptor) -> Result<String, OwlError> {
    if d.classes.is_empty() {
        return Err(OwlError::Empty);
    }
    if let Some(bad) = d.classes.iter().find(|c| !is_identifier(c)) {
        return Err(OwlError::InvalidName(bad.clone()));
    }
    let known: BTreeSet<&str> = d.classes.iter().map(String::as_str).collect();
    for (a, b) in d.subclass_of.iter().chain(&d.part_of) {
        for c in [a, b] {
            if !known.contains(c.as_str()) {
                return Err(OwlError::UnknownClass(c.clone()));
            }
        }
    }

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\"?>\n");
    let _ = writeln!(
        out,
        "<Ontology xmlns=\"http://www.w3.org/2002/07/owl#\"\n     xml:base=\"{ONTOLOGY_IRI}\"\n     ontologyIRI=\"{ONTOLOGY_IRI}\">"
    );
    out.push_str("    <Prefix name=\"owl\" IRI=\"http://www.w3.org/2002/07/owl#\"/>\n");
    for c in &d.classes {
        let _ = writeln!(out, "    <Declaration>\n        <Class IRI=\"#{c}\"/>\n    </Declaration>");
    }
    if !d.part_of.is_empty() {
        out.push_str("    <Declaration>\n        <ObjectProperty IRI=\"#part_of\"/>\n    </Declaration>\n");
    }
    for (child, parent) in &d.subclass_of {
        let _ = writeln!(
            out,
            "    <SubClassOf>\n        <Class IRI=\"#{child}\"/>\n        <Class IRI=\"#{parent}\"/>\n    </SubClassOf>"
        );
    }
    for (part, whole) in &d.part_of {
        let _ = writeln!(
            out,
            "    <SubClassOf>\n        <Class IRI=\"#{part}\"/>\n        <ObjectSomeValuesFrom>\n            <ObjectProperty IRI=\"#part_of\"/>\n            <Class IRI=\"#{whole}\"/>\n        </ObjectSomeValuesFrom>\n    </SubClassOf>"
        );
    }
    out.push_str("</Ontology>\n");
    Ok(out)
}

/// Collapses all whitespace runs to nothing between tags and single spaces elsewhere.
pub fn normalize_whitespace(xml: &str) -> String {
    let joined = xml.split_whitespace().collect::<Vec<_>>().join(" ");
    joined.replace("> <", "><")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_contains_setcovering_subclass() {
        let owl = normalize_whitespace(&write_owl(&OntologyDescriptor::default()).unwrap());
        assert!(owl.contains(r##"<SubClassOf><Class IRI="#SetCovering"/><Class IRI="#Constraint"/></SubClassOf>"##));
        assert!(owl.contains(r##"<Declaration><ObjectProperty IRI="#part_of"/></Declaration>"##));
        assert!(owl.contains(
            r##"<SubClassOf><Class IRI="#Sense"/><ObjectSomeValuesFrom><ObjectProperty IRI="#part_of"/><Class IRI="#Constraint"/></ObjectSomeValuesFrom></SubClassOf>"##
        ));
    }

    #[test]
    fn rejects_dangling_and_empty() {
        let mut d = OntologyDescriptor::default();
        d.part_of.push(("Ghost".into(), "Constraint".into()));
        assert_eq!(write_owl(&d), Err(OwlError::UnknownClass("Ghost".into())));
        let empty = OntologyDescriptor { classes: vec![], subclass_of: vec![], part_of: vec![] };
        assert_eq!(write_owl(&empty), Err(OwlError::Empty));
    }
}
