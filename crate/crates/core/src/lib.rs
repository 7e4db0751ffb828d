//! Model checking and strategy synthesis for natural strategic ability.
//!
//! The crate checks NatATL formulas (`<<A>>^<=k φ`) over concurrent game
//! structures. Candidate natural strategies are generated in nondecreasing
//! complexity, projected onto the model (directly for memoryless strategies,
//! through a bounded unrolling for strategies with recall) and the residual
//! structure is checked with CTL fixpoints. A standard ATL checker serves as
//! the prefilter of the combined ATL+NatATL pipeline.

pub mod bench;
pub mod cgs;
pub mod checker;
pub mod logic;
pub mod mc;
pub mod prune;
pub mod strategy;

pub use cgs::{Cgs, CgsError, Density, MoveVector, ParseMode, RandomCgsParams};
pub use checker::{natatl_check, pipeline, CheckError, CheckOptions, CheckReport, SearchMode};
pub use logic::{Dialect, Formula, FormulaError, PathFormula};
pub use strategy::{CollectiveStrategy, Condition, NaturalStrategy, StrategyKind};
