//! Elicitation sessions: a transcript of answers walked over the tree.
//!
//! The state after each answer is derived from the transcript; `back`
//! drops the last entry. After a leaf is answered the cursor returns to
//! the root, and `finish_branch` at the root completes the session.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use super::registry::{self, ApplyError, Effect, ParamSpec};
use super::tree::{Branch, OmtTree};
use crate::blocks::{BlockBuilder, BuiltBlock};
use crate::io::json::{read_json, write_json, JsonError};
use crate::model::{Model, Objective, ValidationReport, Variable};
use crate::typology::TagName;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nav {
    Back,
    RestartBranch,
    FinishBranch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    /// Index into the current node's children.
    Choose(usize),
    Params(Map<String, Value>),
    Nav(Nav),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub node: u32,
    pub answer: Answer,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SessionError {
    #[error("session is complete")]
    Complete,
    #[error("nothing to undo")]
    NothingToUndo,
    #[error("choice {index} out of range; node has {len} options")]
    ChoiceOutOfRange { index: usize, len: usize },
    #[error("node {node} expects a choice")]
    ExpectedChoice { node: u32 },
    #[error("node {node} expects parameters")]
    ExpectedParams { node: u32 },
    #[error(transparent)]
    Params(#[from] ApplyError),
    #[error("unfilled placeholders: {}", .0.join(", "))]
    Unfilled(Vec<String>),
    #[error("no decision variables declared")]
    NoVariables,
    #[error("model is invalid:\n{0}")]
    Invalid(ValidationReport),
    #[error("transcript was recorded against tree version {got}, this tree is {expected}")]
    TreeVersion { expected: String, got: String },
    #[error("transcript answers node {got} but the cursor is at node {expected}")]
    NodeMismatch { expected: u32, got: u32 },
    #[error(transparent)]
    Json(#[from] JsonError),
}

impl SessionError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            SessionError::Complete => "SESSION_COMPLETE",
            SessionError::NothingToUndo => "BACK_AT_ROOT",
            SessionError::ChoiceOutOfRange { .. }
            | SessionError::ExpectedChoice { .. }
            | SessionError::ExpectedParams { .. }
            | SessionError::Params(_) => "SCHEMA_MISMATCH",
            SessionError::Unfilled(_) => "UNFILLED_PLACEHOLDER",
            SessionError::NoVariables => "EMPTY_MODEL",
            SessionError::Invalid(_) => "VALIDATION_FAILED",
            SessionError::TreeVersion { .. } | SessionError::NodeMismatch { .. } => "TRANSCRIPT_MISMATCH",
            SessionError::Json(_) => "PARSE_ERROR",
        }
    }
}

/// An answer that failed while replaying, with its 0-based position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {step}: {error}")]
pub struct ReplayError {
    pub step: usize,
    pub error: SessionError,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkeletonBlock {
    pub node: u32,
    pub tag: TagName,
    pub stem: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block: Option<BuiltBlock>,
    /// Required parameters still to be supplied; non-empty means placeholder.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub missing: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Skeleton {
    pub variables: Vec<Variable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<Objective>,
    pub blocks: Vec<SkeletonBlock>,
}

impl Skeleton {
    /// The model assembled so far; placeholders contribute nothing.
    pub fn model(&self) -> Model {
        let mut m = Model::new("elicited");
        m.variables = self.variables.clone();
        m.objective = self.objective.clone().unwrap_or_default();
        for b in self.blocks.iter().filter_map(|b| b.block.as_ref()) {
            m.variables.extend(b.aux_variables.iter().cloned());
            m.constraints.extend(b.constraints.iter().cloned());
        }
        m
    }

    pub fn placeholders(&self) -> Vec<String> {
        self.blocks.iter().filter(|b| !b.missing.is_empty()).map(|b| b.stem.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChoiceOption {
    pub index: usize,
    pub node: u32,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AnswerSchema {
    Choice {
        options: Vec<ChoiceOption>,
    },
    Params {
        builder: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        preset: Option<String>,
        params: Vec<ParamSpec>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub node: u32,
    pub label: String,
    pub question: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub remark: Option<String>,
    pub answer: AnswerSchema,
    pub declared_variables: Vec<String>,
}

/// Everything needed to recreate a session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionDocument {
    pub id: String,
    pub tree_version: String,
    pub transcript: Vec<TranscriptEntry>,
}

/// Snapshot handed to clients after every step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionView {
    pub id: String,
    pub cursor: u32,
    pub complete: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub question: Option<Question>,
    pub steps: usize,
    pub skeleton: Skeleton,
}

#[derive(Debug, Clone)]
struct State {
    cursor: u32,
    complete: bool,
    ctx: BlockBuilder,
    skeleton: Skeleton,
}

#[derive(Debug, Clone)]
pub struct Session {
    id: String,
    tree: Arc<OmtTree>,
    transcript: Vec<TranscriptEntry>,
    states: Vec<State>,
}

impl Session {
    pub fn start(tree: Arc<OmtTree>) -> Session {
        Session::with_id(tree, uuid::Uuid::new_v4().to_string())
    }

    pub fn with_id(tree: Arc<OmtTree>, id: String) -> Session {
        let initial = State {
            cursor: tree.root().id,
            complete: false,
            ctx: BlockBuilder::new(),
            skeleton: Skeleton::default(),
        };
        Session { id, tree, transcript: Vec::new(), states: vec![initial] }
    }

    /// Replays `answers` from a fresh session.
    pub fn replay(tree: Arc<OmtTree>, answers: &[Answer]) -> Result<Session, ReplayError> {
        let mut s = Session::start(tree);
        for (step, a) in answers.iter().enumerate() {
            s.answer(a.clone()).map_err(|error| ReplayError { step, error })?;
        }
        Ok(s)
    }

    /// Rebuilds an exported session, checking every entry against the cursor.
    pub fn import(tree: Arc<OmtTree>, doc: &SessionDocument) -> Result<Session, ReplayError> {
        if doc.tree_version != tree.version() {
            let error = SessionError::TreeVersion { expected: tree.version().to_string(), got: doc.tree_version.clone() };
            return Err(ReplayError { step: 0, error });
        }
        let mut s = Session::with_id(tree, doc.id.clone());
        for (step, e) in doc.transcript.iter().enumerate() {
            if e.node != s.cursor() {
                return Err(ReplayError { step, error: SessionError::NodeMismatch { expected: s.cursor(), got: e.node } });
            }
            s.answer(e.answer.clone()).map_err(|error| ReplayError { step, error })?;
        }
        Ok(s)
    }

    pub fn import_json(tree: Arc<OmtTree>, text: &str) -> Result<Session, ReplayError> {
        let doc: SessionDocument = read_json(text).map_err(|e| ReplayError { step: 0, error: e.into() })?;
        Session::import(tree, &doc)
    }

    fn state(&self) -> &State {
        self.states.last().expect("initial state is never popped")
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn tree(&self) -> &OmtTree {
        &self.tree
    }

    pub fn cursor(&self) -> u32 {
        self.state().cursor
    }

    pub fn is_complete(&self) -> bool {
        self.state().complete
    }

    pub fn transcript(&self) -> &[TranscriptEntry] {
        &self.transcript
    }

    pub fn skeleton(&self) -> &Skeleton {
        &self.state().skeleton
    }

    pub fn current_question(&self) -> Result<Question, SessionError> {
        let st = self.state();
        if st.complete {
            return Err(SessionError::Complete);
        }
        let node = self.tree.node(st.cursor).expect("cursor is a tree node");
        let answer = match &node.builder_ref {
            Some(b) => AnswerSchema::Params { builder: b.name.clone(), preset: b.preset.clone(), params: b.params.clone() },
            None => AnswerSchema::Choice {
                options: node
                    .children
                    .iter()
                    .enumerate()
                    .map(|(index, &c)| ChoiceOption { index, node: c, label: self.tree.node(c).expect("checked").label.clone() })
                    .collect(),
            },
        };
        Ok(Question {
            node: node.id,
            label: node.label.clone(),
            question: node.question.clone(),
            remark: node.remark.clone(),
            answer,
            declared_variables: st.ctx.variables().keys().map(|v| v.to_string()).collect(),
        })
    }

    pub fn view(&self) -> SessionView {
        SessionView {
            id: self.id.clone(),
            cursor: self.cursor(),
            complete: self.is_complete(),
            question: self.current_question().ok(),
            steps: self.transcript.len(),
            skeleton: self.skeleton().clone(),
        }
    }

    /// Applies one answer. On error the session is unchanged.
    pub fn answer(&mut self, answer: Answer) -> Result<(), SessionError> {
        if answer == Answer::Nav(Nav::Back) {
            return self.back();
        }
        let node = self.cursor();
        let next = self.step(self.state(), &answer)?;
        self.transcript.push(TranscriptEntry { node, answer });
        self.states.push(next);
        Ok(())
    }

    pub fn back(&mut self) -> Result<(), SessionError> {
        if self.transcript.pop().is_none() {
            return Err(SessionError::NothingToUndo);
        }
        self.states.pop();
        Ok(())
    }

    fn step(&self, st: &State, answer: &Answer) -> Result<State, SessionError> {
        if st.complete {
            return Err(SessionError::Complete);
        }
        let tree = &*self.tree;
        let node = tree.node(st.cursor).expect("cursor is a tree node");
        let root = tree.root().id;
        let mut next = st.clone();
        match answer {
            Answer::Nav(Nav::Back) => unreachable!("handled by Session::answer"),
            Answer::Nav(Nav::RestartBranch) => next.cursor = tree.branch_root_of(node.id).unwrap_or(root),
            Answer::Nav(Nav::FinishBranch) => {
                if node.id == root {
                    next.complete = true;
                } else {
                    next.cursor = root;
                }
            }
            Answer::Choose(i) => {
                if node.is_leaf() {
                    return Err(SessionError::ExpectedParams { node: node.id });
                }
                let &c = node.children.get(*i).ok_or(SessionError::ChoiceOutOfRange { index: *i, len: node.children.len() })?;
                next.cursor = c;
            }
            Answer::Params(params) => {
                let builder = node.builder_ref.as_ref().ok_or(SessionError::ExpectedChoice { node: node.id })?;
                let constraint_leaf = node.branch == Some(Branch::Constraints);
                match (node.tag, constraint_leaf) {
                    (Some(tag), true) => {
                        let stem = format!("b{}_{}", st.skeleton.blocks.len() + 1, tag.snake());
                        let mut block = SkeletonBlock { node: node.id, tag, stem, block: None, missing: Vec::new() };
                        match registry::apply(builder, params, &mut next.ctx, &block.stem) {
                            Ok(Effect::Block(b)) => block.block = Some(b),
                            Ok(_) => unreachable!("constraint leaves build blocks"),
                            Err(ApplyError::Missing(m)) => block.missing = m,
                            Err(e) => return Err(e.into()),
                        }
                        next.skeleton.blocks.push(block);
                    }
                    _ => match registry::apply(builder, params, &mut next.ctx, "")? {
                        Effect::Declare(vs) => next.skeleton.variables.extend(vs),
                        Effect::Objective(o) => next.skeleton.objective = Some(o),
                        Effect::Block(_) => unreachable!("only constraint leaves build blocks"),
                    },
                }
                next.cursor = root;
            }
        }
        Ok(next)
    }

    /// The finished model, named `elicited`.
    pub fn emit_model(&self) -> Result<Model, SessionError> {
        let sk = self.skeleton();
        let pending = sk.placeholders();
        if !pending.is_empty() {
            return Err(SessionError::Unfilled(pending));
        }
        if sk.variables.is_empty() {
            return Err(SessionError::NoVariables);
        }
        let m = sk.model();
        let report = m.validate();
        if !report.is_ok() {
            return Err(SessionError::Invalid(report));
        }
        Ok(m)
    }

    pub fn export(&self) -> SessionDocument {
        SessionDocument {
            id: self.id.clone(),
            tree_version: self.tree.version().to_string(),
            transcript: self.transcript.clone(),
        }
    }

    pub fn export_json(&self) -> String {
        write_json(&self.export())
    }
}

/// Reads a replay script: either a bare list of answers or an exported
/// session document.
pub fn read_script(text: &str) -> Result<Vec<Answer>, JsonError> {
    if text.trim_start().starts_with('[') {
        return read_json::<Vec<Answer>>(text);
    }
    let doc: SessionDocument = read_json(text)?;
    Ok(doc.transcript.into_iter().map(|e| e.answer).collect())
}
