//! Formulas for NatATL, ATL and CTL.
//!
//! All three dialects share one AST. `F φ` is stored as `⊤ U φ`; `G` is a
//! first-class path operator. Agents are written 1-based and stored 0-based.

mod parser;
mod translate;
mod tree;

use std::fmt;

use thiserror::Error;

pub use parser::parse_formula;
pub(crate) use translate::check_nesting;
pub use translate::{atl_to_natatl, is_flat, to_universal_ctl, UniversalCtl};
pub use tree::{build_formula_tree, FormulaTree, NodeKind, TreeNode};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("bound must be ≥ 1")]
    ZeroBound,
    #[error("{0}")]
    Dialect(String),
    #[error("unsupported: nested NatATL")]
    Nested,
    #[error("unsupported: {0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dialect {
    NatAtl,
    Atl,
    Ctl,
}

impl std::str::FromStr for Dialect {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "natatl" => Ok(Dialect::NatAtl),
            "atl" => Ok(Dialect::Atl),
            "ctl" => Ok(Dialect::Ctl),
            other => Err(format!(
                "unknown dialect `{other}` (expected natatl|atl|ctl)"
            )),
        }
    }
}

/// Sorted, duplicate-free set of 0-based agent indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coalition(Vec<usize>);

impl Coalition {
    pub fn new(mut agents: Vec<usize>) -> Coalition {
        agents.sort_unstable();
        agents.dedup();
        Coalition(agents)
    }

    /// From 1-based indices as written in formulas.
    pub fn from_one_based(agents: &[usize]) -> Option<Coalition> {
        if agents.contains(&0) {
            return None;
        }
        Some(Coalition::new(agents.iter().map(|a| a - 1).collect()))
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|a| a + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, agent: usize) -> bool {
        self.0.binary_search(&agent).is_ok()
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.0.iter().map(|a| (a + 1).to_string()).collect();
        write!(f, "<<{}>>", names.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    /// `<<A>>^<=k path`
    Nat {
        coalition: Coalition,
        bound: u32,
        path: Box<PathFormula>,
    },
    /// `<<A>> path`
    Atl {
        coalition: Coalition,
        path: Box<PathFormula>,
    },
    /// `A path`
    All(Box<PathFormula>),
    /// `E path`
    Exists(Box<PathFormula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PathFormula {
    Next(Formula),
    Until(Formula, Formula),
    Globally(Formula),
}

impl PathFormula {
    pub fn eventually(f: Formula) -> PathFormula {
        PathFormula::Until(Formula::True, f)
    }

    pub fn operands(&self) -> Vec<&Formula> {
        match self {
            PathFormula::Next(f) | PathFormula::Globally(f) => vec![f],
            PathFormula::Until(a, b) => vec![a, b],
        }
    }
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn all(path: PathFormula) -> Formula {
        Formula::All(Box::new(path))
    }

    pub fn exists(path: PathFormula) -> Formula {
        Formula::Exists(Box::new(path))
    }

    pub fn is_strategic(&self) -> bool {
        matches!(self, Formula::Nat { .. } | Formula::Atl { .. })
    }

    /// Number of strategic modalities anywhere in the formula.
    pub fn strategic_count(&self) -> usize {
        let own = usize::from(self.is_strategic());
        own + self
            .children()
            .iter()
            .map(|c| c.strategic_count())
            .sum::<usize>()
    }

    /// Immediate state sub-formulas (path operands included).
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::Atom(_) => vec![],
            Formula::Not(f) => vec![f],
            Formula::And(a, b) | Formula::Or(a, b) => vec![a, b],
            Formula::Nat { path, .. } | Formula::Atl { path, .. } => path.operands(),
            Formula::All(path) | Formula::Exists(path) => path.operands(),
        }
    }

    /// Checks the dialect restrictions.
    pub fn check_dialect(&self, dialect: Dialect) -> Result<(), FormulaError> {
        let bad = match (self, dialect) {
            (Formula::Atl { .. }, Dialect::NatAtl) => {
                Some("NatATL requires a bound on every strategic modality")
            }
            (Formula::All(_) | Formula::Exists(_), Dialect::NatAtl) => {
                Some("path quantifiers A/E are not NatATL")
            }
            (Formula::Nat { .. }, Dialect::Atl) => Some("bounded modality in an ATL formula"),
            (Formula::All(_) | Formula::Exists(_), Dialect::Atl) => {
                Some("path quantifiers A/E are not ATL")
            }
            (Formula::Nat { .. } | Formula::Atl { .. }, Dialect::Ctl) => {
                Some("strategic modality in a CTL formula")
            }
            _ => None,
        };
        if let Some(msg) = bad {
            return Err(FormulaError::Dialect(msg.to_string()));
        }
        if let Formula::Nat { bound: 0, .. } = self {
            return Err(FormulaError::ZeroBound);
        }
        self.children()
            .into_iter()
            .try_for_each(|c| c.check_dialect(dialect))
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Or(..) => 1,
            Formula::And(..) => 2,
            _ => 3,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.fmt_prec(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Formula::True => write!(f, "top"),
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(g) => {
                write!(f, "!")?;
                g.fmt_prec(f, 3)
            }
            Formula::And(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " & ")?;
                b.fmt_prec(f, 3)
            }
            Formula::Or(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " | ")?;
                b.fmt_prec(f, 2)
            }
            Formula::Nat {
                coalition,
                bound,
                path,
            } => {
                write!(f, "{coalition}^<={bound} ")?;
                path.fmt_path(f)
            }
            Formula::Atl { coalition, path } => {
                write!(f, "{coalition} ")?;
                path.fmt_path(f)
            }
            Formula::All(path) => {
                write!(f, "A")?;
                path.fmt_path(f)
            }
            Formula::Exists(path) => {
                write!(f, "E")?;
                path.fmt_path(f)
            }
        }
    }
}

impl PathFormula {
    fn fmt_path(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathFormula::Next(g) => {
                write!(f, "X ")?;
                g.fmt_prec(f, 3)
            }
            PathFormula::Globally(g) => {
                write!(f, "G ")?;
                g.fmt_prec(f, 3)
            }
            PathFormula::Until(Formula::True, g) => {
                write!(f, "F ")?;
                g.fmt_prec(f, 3)
            }
            PathFormula::Until(a, b) => {
                write!(f, "(")?;
                a.fmt_prec(f, 0)?;
                write!(f, " U ")?;
                b.fmt_prec(f, 0)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl fmt::Display for PathFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_path(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_state(strategic: bool) -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            Just(Formula::True),
            prop::sample::select(vec!["p", "q", "r"]).prop_map(Formula::atom),
        ];
        leaf.prop_recursive(4, 24, 2, move |inner| {
            let path = prop_oneof![
                inner.clone().prop_map(PathFormula::Next),
                inner.clone().prop_map(PathFormula::Globally),
                inner.clone().prop_map(PathFormula::eventually),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| PathFormula::Until(a, b)),
            ];
            let mut options = vec![
                inner.clone().prop_map(Formula::not).boxed(),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Formula::and(a, b))
                    .boxed(),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Formula::or(a, b))
                    .boxed(),
            ];
            if strategic {
                options.push(
                    (
                        prop::collection::vec(1usize..4, 1..3),
                        1u32..12,
                        path.clone(),
                    )
                        .prop_map(|(agents, bound, path)| Formula::Nat {
                            coalition: Coalition::from_one_based(&agents).unwrap(),
                            bound,
                            path: Box::new(path),
                        })
                        .boxed(),
                );
                options.push(
                    (prop::collection::vec(1usize..4, 1..3), path.clone())
                        .prop_map(|(agents, path)| Formula::Atl {
                            coalition: Coalition::from_one_based(&agents).unwrap(),
                            path: Box::new(path),
                        })
                        .boxed(),
                );
            }
            options.push(path.clone().prop_map(Formula::all).boxed());
            options.push(path.prop_map(Formula::exists).boxed());
            prop::strategy::Union::new(options)
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(f in arb_state(true)) {
            let text = f.to_string();
            let dialect = if f.strategic_count() > 0 { None } else { Some(Dialect::Ctl) };
            let parsed = parser::parse_any(&text).unwrap();
            prop_assert_eq!(&parsed, &f, "text: {}", text);
            if let Some(d) = dialect {
                prop_assert_eq!(parse_formula(&text, d).unwrap(), f);
            }
        }
    }

    #[test]
    fn minimal_parentheses() {
        let f = Formula::and(
            Formula::or(Formula::atom("p"), Formula::atom("q")),
            Formula::not(Formula::atom("r")),
        );
        assert_eq!(f.to_string(), "(p | q) & !r");
        let g = Formula::all(PathFormula::Until(
            Formula::and(Formula::atom("p"), Formula::atom("q")),
            Formula::atom("r"),
        ));
        assert_eq!(g.to_string(), "A(p & q U r)");
        let h = Formula::Nat {
            coalition: Coalition::new(vec![0, 2]),
            bound: 5,
            path: Box::new(PathFormula::eventually(Formula::atom("p"))),
        };
        assert_eq!(h.to_string(), "<<1,3>>^<=5 F p");
    }
}
