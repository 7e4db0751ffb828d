use std::fmt;

use super::matcher::{BoundBool, BoundCondition, Matcher};
use super::StrategyError;

/// Boolean condition over atoms with `!`, `&` and `top`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BoolExpr {
    Top,
    Atom(String),
    Not(Box<BoolExpr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
}

impl BoolExpr {
    pub fn atom(name: impl Into<String>) -> BoolExpr {
        BoolExpr::Atom(name.into())
    }

    pub fn literal(name: impl Into<String>, positive: bool) -> BoolExpr {
        let a = BoolExpr::atom(name);
        if positive {
            a
        } else {
            BoolExpr::Not(Box::new(a))
        }
    }

    /// Left-nested conjunction; `top` when empty.
    pub fn conjunction(parts: impl IntoIterator<Item = BoolExpr>) -> BoolExpr {
        parts
            .into_iter()
            .reduce(|a, b| BoolExpr::And(Box::new(a), Box::new(b)))
            .unwrap_or(BoolExpr::Top)
    }

    /// One per symbol occurrence.
    pub fn complexity(&self) -> u32 {
        match self {
            BoolExpr::Top | BoolExpr::Atom(_) => 1,
            BoolExpr::Not(g) => 1 + g.complexity(),
            BoolExpr::And(a, b) => 1 + a.complexity() + b.complexity(),
        }
    }

    pub(crate) fn bind(&self, atoms: &[String]) -> Result<BoundBool, StrategyError> {
        Ok(match self {
            BoolExpr::Top => BoundBool::Top,
            BoolExpr::Atom(name) => BoundBool::Atom(
                atoms
                    .iter()
                    .position(|a| a == name)
                    .ok_or_else(|| StrategyError::UnknownAtom(name.clone()))?,
            ),
            BoolExpr::Not(g) => BoundBool::Not(Box::new(g.bind(atoms)?)),
            BoolExpr::And(a, b) => {
                BoundBool::And(Box::new(a.bind(atoms)?), Box::new(b.bind(atoms)?))
            }
        })
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, operand: bool) -> fmt::Result {
        match self {
            BoolExpr::Top => f.write_str("top"),
            BoolExpr::Atom(a) => f.write_str(a),
            BoolExpr::Not(g) => {
                f.write_str("!")?;
                g.fmt_prec(f, true)
            }
            BoolExpr::And(a, b) => {
                if operand {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, false)?;
                f.write_str(" & ")?;
                b.fmt_prec(f, true)?;
                if operand {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, false)
    }
}

/// Regular expression over valuations; letters are boolean conditions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Regex {
    Letter(BoolExpr),
    Concat(Box<Regex>, Box<Regex>),
    Union(Box<Regex>, Box<Regex>),
    Star(Box<Regex>),
}

impl Regex {
    pub fn letter(b: BoolExpr) -> Regex {
        Regex::Letter(b)
    }

    pub fn concat(a: Regex, b: Regex) -> Regex {
        Regex::Concat(Box::new(a), Box::new(b))
    }

    pub fn union(a: Regex, b: Regex) -> Regex {
        Regex::Union(Box::new(a), Box::new(b))
    }

    pub fn star(a: Regex) -> Regex {
        Regex::Star(Box::new(a))
    }

    /// Letter symbols plus one per regex operator.
    pub fn complexity(&self) -> u32 {
        match self {
            Regex::Letter(b) => b.complexity(),
            Regex::Concat(a, b) | Regex::Union(a, b) => 1 + a.complexity() + b.complexity(),
            Regex::Star(a) => 1 + a.complexity(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Regex::Union(..) => 0,
            Regex::Concat(..) => 1,
            Regex::Star(_) | Regex::Letter(_) => 2,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            f.write_str("(")?;
            self.fmt_prec(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Regex::Letter(b) => write!(f, "[{b}]"),
            Regex::Concat(a, b) => {
                a.fmt_prec(f, 1)?;
                f.write_str(".")?;
                b.fmt_prec(f, 2)
            }
            Regex::Union(a, b) => {
                a.fmt_prec(f, 0)?;
                f.write_str(" | ")?;
                b.fmt_prec(f, 1)
            }
            Regex::Star(a) => {
                a.fmt_prec(f, 2)?;
                f.write_str("*")
            }
        }
    }
}

impl fmt::Display for Regex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Condition {
    Bool(BoolExpr),
    Regex(Regex),
}

impl Condition {
    pub fn top() -> Condition {
        Condition::Bool(BoolExpr::Top)
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Condition::Bool(BoolExpr::Top))
    }

    pub fn is_regex(&self) -> bool {
        matches!(self, Condition::Regex(_))
    }

    pub fn complexity(&self) -> u32 {
        match self {
            Condition::Bool(b) => b.complexity(),
            Condition::Regex(r) => r.complexity(),
        }
    }

    /// Resolves atom names against a model's atom list.
    pub(crate) fn bind(&self, atoms: &[String]) -> Result<BoundCondition, StrategyError> {
        Ok(match self {
            Condition::Bool(b) => BoundCondition::Bool(b.bind(atoms)?),
            Condition::Regex(r) => BoundCondition::Regex(Matcher::new(r, atoms)?),
        })
    }

    pub fn parse(text: &str) -> Result<Condition, StrategyError> {
        super::parse::parse_condition(text)
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Bool(b) => b.fmt(f),
            Condition::Regex(r) => r.fmt(f),
        }
    }
}
