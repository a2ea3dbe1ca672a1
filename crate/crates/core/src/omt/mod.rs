//! The optimization modelling tree and guided elicitation over it.

pub mod registry;
pub mod session;
pub mod tree;

pub use registry::{BuilderRef, ParamKind, ParamSpec};
pub use session::{Answer, Nav, Question, ReplayError, Session, SessionDocument, SessionError, SessionView};
pub use tree::{load_tree, Branch, OmtNode, OmtTree, TreeError};
