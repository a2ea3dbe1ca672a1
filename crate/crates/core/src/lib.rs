//! Core of the MILP modelling toolkit: exact models, building-block
//! constraints, the typology classifier, the modelling tree with its
//! elicitation sessions, text formats and a brute-force oracle.

pub mod api;
pub mod blocks;
pub mod classify;
pub mod io;
pub mod model;
pub mod omt;
pub mod oracle;
pub mod rational;
pub mod suite;
pub mod typology;

pub use model::{Assignment, Constraint, LinearExpr, Model, NumberType, ProblemSense, Sense, VarRef, Variable};
pub use rational::Rational;
pub use typology::{TagName, TypologyTag};
