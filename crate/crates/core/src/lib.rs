//! Reasoning engine for an action description language with sensing actions,
//! non-deterministic effects and conditional/iterative plans, interpreted over
//! epistemic states (sets of situations, where a situation is a set of states).
//!
//! The crate has two independent evaluation routes for the same queries:
//!
//! * [`engine`] evaluates plans directly over situations and answers
//!   entailment questions by enumerating every transition model;
//! * [`translate`] compiles a domain and query into an epistemic logic
//!   program whose world views are computed by [`elp`], so the two routes
//!   can be cross-checked against each other.
//!
//! [`domain`] holds the shared vocabulary (fluents, actions, propositions,
//! plans), [`parser`] the text formats, and [`semantics`] the single-step
//! transition relation both routes are built on.

pub mod domain;
pub mod elp;
pub mod engine;
pub mod parser;
pub mod semantics;
pub mod translate;

pub use domain::{
    ActionId, ActionKind, Domain, DomainBuilder, DomainError, FluentId, FluentLiteral, Plan,
    Proposition, Query, TestCondition, ValidationReport,
};
pub use engine::{Answer, EngineConfig, EngineError, Outcome, Verdict, VerdictMode};
pub use semantics::{EpistemicState, Situation, State, ThreeValued};
