//! Natural strategies: ordered guarded actions with boolean (memoryless) or
//! regular (recall) conditions.

mod condition;
mod generate;
mod matcher;
mod parse;

use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use condition::{BoolExpr, Condition, Regex};
pub use generate::{
    behaviour_reduced_strategies, generate_strategies, generator_conditions, CandidateStream,
};
pub(crate) use matcher::BoundCondition;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StrategyError {
    #[error("strategy syntax error: {0}")]
    Syntax(String),
    #[error("unknown atom `{0}` in condition")]
    UnknownAtom(String),
    #[error("agent {agent} is not in 1..{agents}")]
    AgentOutOfRange { agent: usize, agents: usize },
    #[error("agent {0} has more than one strategy")]
    DuplicateAgent(usize),
    #[error("coalition agent {0} has no strategy")]
    MissingMember(usize),
    #[error("empty collective strategy")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StrategyKind {
    /// Memoryless: boolean conditions over the current state.
    #[serde(rename = "nr")]
    Nr,
    /// Recall: regular conditions over the history.
    #[serde(rename = "nR")]
    Recall,
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrategyKind::Nr => "nr",
            StrategyKind::Recall => "nR",
        })
    }
}

impl std::str::FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nr" => Ok(StrategyKind::Nr),
            "nR" | "recall" => Ok(StrategyKind::Recall),
            other => Err(format!("unknown mode `{other}` (expected nr|nR)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub condition: Condition,
    pub action: String,
}

impl Rule {
    pub fn new(condition: Condition, action: impl Into<String>) -> Rule {
        Rule {
            condition,
            action: action.into(),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.condition, self.action)
    }
}

/// One agent's rule list. The last rule is always `⊤`-guarded.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NaturalStrategy {
    agent: usize,
    rules: Vec<Rule>,
}

impl NaturalStrategy {
    /// Appends `(⊤, idle)` unless the last rule is already `⊤`-guarded.
    pub fn new(agent: usize, mut rules: Vec<Rule>) -> NaturalStrategy {
        if !rules.last().is_some_and(|r| r.condition.is_top()) {
            rules.push(Rule::new(Condition::top(), crate::cgs::IDLE));
        }
        NaturalStrategy { agent, rules }
    }

    /// 0-based agent index.
    pub fn agent(&self) -> usize {
        self.agent
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn complexity(&self) -> u32 {
        self.rules.iter().map(|r| r.condition.complexity()).sum()
    }

    pub fn kind(&self) -> StrategyKind {
        if self.rules.iter().any(|r| r.condition.is_regex()) {
            StrategyKind::Recall
        } else {
            StrategyKind::Nr
        }
    }

    /// Action of the first rule whose condition holds. Boolean conditions
    /// look at the last valuation of `history`, regular ones at all of it.
    pub fn applicable_action(
        &self,
        atoms: &[String],
        history: &[FixedBitSet],
    ) -> Result<&str, StrategyError> {
        for rule in &self.rules {
            let bound = rule.condition.bind(atoms)?;
            if bound.matches_history(history) {
                return Ok(&rule.action);
            }
        }
        unreachable!("normalized strategies end with a top rule")
    }

    pub fn parse(text: &str) -> Result<NaturalStrategy, StrategyError> {
        parse::parse_strategy_line(text)
    }
}

impl fmt::Display for NaturalStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "agent {}: ", self.agent + 1)?;
        for (i, r) in self.rules.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

/// One natural strategy per coalition member, ordered by agent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CollectiveStrategy {
    members: Vec<NaturalStrategy>,
}

impl CollectiveStrategy {
    pub fn new(mut members: Vec<NaturalStrategy>) -> Result<CollectiveStrategy, StrategyError> {
        if members.is_empty() {
            return Err(StrategyError::Empty);
        }
        members.sort_by_key(|m| m.agent);
        if let Some(w) = members.windows(2).find(|w| w[0].agent == w[1].agent) {
            return Err(StrategyError::DuplicateAgent(w[0].agent + 1));
        }
        Ok(CollectiveStrategy { members })
    }

    pub fn members(&self) -> &[NaturalStrategy] {
        &self.members
    }

    pub fn member(&self, agent: usize) -> Option<&NaturalStrategy> {
        self.members.iter().find(|m| m.agent == agent)
    }

    /// 0-based agent indices.
    pub fn agents(&self) -> Vec<usize> {
        self.members.iter().map(|m| m.agent).collect()
    }

    pub fn complexity(&self) -> u32 {
        self.members.iter().map(NaturalStrategy::complexity).sum()
    }

    pub fn kind(&self) -> StrategyKind {
        if self
            .members
            .iter()
            .any(|m| m.kind() == StrategyKind::Recall)
        {
            StrategyKind::Recall
        } else {
            StrategyKind::Nr
        }
    }

    /// Checks that the strategy covers exactly the given coalition and
    /// that its agents exist in a model with `agents` agents.
    pub fn check_agents(&self, coalition: &[usize], agents: usize) -> Result<(), StrategyError> {
        if let Some(m) = self.members.iter().find(|m| m.agent >= agents) {
            return Err(StrategyError::AgentOutOfRange {
                agent: m.agent + 1,
                agents,
            });
        }
        if let Some(&a) = coalition.iter().find(|&&a| self.member(a).is_none()) {
            return Err(StrategyError::MissingMember(a + 1));
        }
        Ok(())
    }

    /// One line per member.
    pub fn lines(&self) -> Vec<String> {
        self.members.iter().map(|m| m.to_string()).collect()
    }

    /// Parses one `agent N: ...` line per member; blank lines and `#`
    /// comments are skipped.
    pub fn parse(text: &str) -> Result<CollectiveStrategy, StrategyError> {
        let members = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(NaturalStrategy::parse)
            .collect::<Result<Vec<_>, _>>()?;
        CollectiveStrategy::new(members)
    }
}

impl fmt::Display for CollectiveStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.lines().join("\n"))
    }
}
