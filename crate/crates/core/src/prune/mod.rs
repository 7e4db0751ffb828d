//! Projecting collective strategies onto a model: direct filtering for
//! memoryless strategies, bounded unrolling for strategies with recall.

mod nr;
mod recall;

use thiserror::Error;

use crate::cgs::CgsError;
use crate::strategy::StrategyError;

pub(crate) use nr::{fired_actions, pruned_kripke};
pub use nr::{prune_model_nr, validate_strategy_nr, PrunedModel};
pub use recall::{build_tree, prune_tree, regex_prune, UnrollNode, UnrollTree, DEFAULT_HEIGHT};
pub(crate) use recall::{prune_in_place, tree_relation};

/// Outcome of a validity check; invalidity is an ordinary value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Invalid(String),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PruneError {
    #[error("invalid strategy: {0}")]
    Invalid(String),
    #[error("memoryless pruning needs boolean conditions; found `{0}`")]
    NotMemoryless(String),
    #[error("height must be ≥ 1")]
    ZeroHeight,
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Model(#[from] CgsError),
}
