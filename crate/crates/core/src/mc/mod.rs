//! Fixpoint model checking: CTL over Kripke-style models and standard ATL
//! over concurrent game structures.

mod atl;
mod ctl;
mod kripke;
mod stateset;

use thiserror::Error;

use crate::logic::FormulaError;

pub(crate) use atl::check_coalition;
pub use atl::{atl_check, AtlOutcome};
pub use ctl::{model_checking, preimage, solve_tree, CtlOutcome, Quantifier};
pub use kripke::Kripke;
pub use stateset::StateSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum McError {
    #[error("state {state} has no successor")]
    DeadEnd { state: usize },
    #[error("formula tree is empty")]
    EmptyTree,
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("invalid coalition: {0}")]
    InvalidCoalition(String),
    #[error("malformed model: {0}")]
    Malformed(String),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}
