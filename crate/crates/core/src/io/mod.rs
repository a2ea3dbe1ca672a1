//! Text formats: LP models, OWL/XML ontology, JSON tree and session documents.

pub mod json;
pub mod lp;
pub mod owl;
