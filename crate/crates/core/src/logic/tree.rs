use std::fmt;

use super::{Formula, FormulaError, PathFormula};
use crate::mc::StateSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    True,
    Atom(String),
    Not,
    And,
    Or,
    AX,
    EX,
    AU,
    EU,
    AG,
    EG,
}

impl NodeKind {
    pub fn arity(&self) -> usize {
        match self {
            NodeKind::True | NodeKind::Atom(_) => 0,
            NodeKind::Not | NodeKind::AX | NodeKind::EX | NodeKind::AG | NodeKind::EG => 1,
            NodeKind::And | NodeKind::Or | NodeKind::AU | NodeKind::EU => 2,
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeKind::True => write!(f, "top"),
            NodeKind::Atom(a) => write!(f, "{a}"),
            NodeKind::Not => write!(f, "!"),
            NodeKind::And => write!(f, "&"),
            NodeKind::Or => write!(f, "|"),
            other => write!(f, "{other:?}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TreeNode {
    pub kind: NodeKind,
    pub formula: Formula,
    pub children: Vec<usize>,
    /// Filled by the checker, bottom-up.
    pub sat_states: Option<StateSet>,
}

/// Parsed CTL formula, one node per connective or leaf occurrence.
#[derive(Debug, Clone, Default)]
pub struct FormulaTree {
    nodes: Vec<TreeNode>,
    root: Option<usize>,
}

impl FormulaTree {
    pub fn empty() -> FormulaTree {
        FormulaTree::default()
    }

    pub fn root(&self) -> Option<usize> {
        self.root
    }

    pub fn node(&self, id: usize) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn node_mut(&mut self, id: usize) -> &mut TreeNode {
        &mut self.nodes[id]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Depth-first post-order: every node after all of its children.
    pub fn post_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let Some(root) = self.root else {
            return out;
        };
        let mut stack = vec![(root, false)];
        while let Some((id, expanded)) = stack.pop() {
            if expanded {
                out.push(id);
            } else {
                stack.push((id, true));
                for &c in self.nodes[id].children.iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    pub fn root_sat(&self) -> Option<&StateSet> {
        self.root.and_then(|r| self.nodes[r].sat_states.as_ref())
    }

    fn add(&mut self, f: &Formula) -> Result<usize, FormulaError> {
        let (kind, operands): (NodeKind, Vec<&Formula>) = match f {
            Formula::True => (NodeKind::True, vec![]),
            Formula::Atom(a) => (NodeKind::Atom(a.clone()), vec![]),
            Formula::Not(g) => (NodeKind::Not, vec![g]),
            Formula::And(a, b) => (NodeKind::And, vec![a, b]),
            Formula::Or(a, b) => (NodeKind::Or, vec![a, b]),
            Formula::All(path) => match path.as_ref() {
                PathFormula::Next(g) => (NodeKind::AX, vec![g]),
                PathFormula::Globally(g) => (NodeKind::AG, vec![g]),
                PathFormula::Until(a, b) => (NodeKind::AU, vec![a, b]),
            },
            Formula::Exists(path) => match path.as_ref() {
                PathFormula::Next(g) => (NodeKind::EX, vec![g]),
                PathFormula::Globally(g) => (NodeKind::EG, vec![g]),
                PathFormula::Until(a, b) => (NodeKind::EU, vec![a, b]),
            },
            Formula::Nat { .. } | Formula::Atl { .. } => {
                return Err(FormulaError::Dialect(
                    "strategic modality in a CTL formula".into(),
                ))
            }
        };
        let id = self.nodes.len();
        self.nodes.push(TreeNode {
            kind,
            formula: f.clone(),
            children: Vec::new(),
            sat_states: None,
        });
        let children = operands
            .into_iter()
            .map(|g| self.add(g))
            .collect::<Result<Vec<_>, _>>()?;
        self.nodes[id].children = children;
        Ok(id)
    }
}

pub fn build_formula_tree(f: &Formula) -> Result<FormulaTree, FormulaError> {
    let mut tree = FormulaTree::empty();
    let root = tree.add(f)?;
    tree.root = Some(root);
    Ok(tree)
}
