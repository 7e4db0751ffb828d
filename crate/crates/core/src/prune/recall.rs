use fixedbitset::FixedBitSet;

use super::PruneError;
use crate::cgs::{Cgs, CgsParts, MoveVector, ParseMode, ParseOptions, StateId, Transition, IDLE};
use crate::strategy::{BoundCondition, CollectiveStrategy, Condition};

/// Unrolling depth used when none is given.
pub const DEFAULT_HEIGHT: usize = 5;

#[derive(Debug, Clone)]
pub struct UnrollNode {
    pub state: StateId,
    /// `None` at the root.
    pub incoming: Option<MoveVector>,
    pub children: Vec<usize>,
    /// States from the root to this node, inclusive.
    pub history: Vec<StateId>,
    pub valuation: FixedBitSet,
    pub pruned: bool,
}

impl UnrollNode {
    pub fn depth(&self) -> usize {
        self.history.len() - 1
    }
}

/// Bounded unrolling of a model from its initial state. Pruning detaches
/// subtrees; detached nodes stay in the arena but are no longer reachable.
#[derive(Debug, Clone)]
pub struct UnrollTree {
    nodes: Vec<UnrollNode>,
    height: usize,
}

impl UnrollTree {
    pub fn root(&self) -> usize {
        0
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn node(&self, id: usize) -> &UnrollNode {
        &self.nodes[id]
    }

    /// Nodes still attached to the root, in depth-first preorder.
    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![0];
        while let Some(id) = stack.pop() {
            out.push(id);
            stack.extend(self.nodes[id].children.iter().rev());
        }
        out
    }

    pub fn len(&self) -> usize {
        self.preorder().len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Rules fire only where the unrolling continues.
    pub fn is_internal(&self, id: usize) -> bool {
        self.nodes[id].depth() + 1 < self.height
    }

    pub fn reset_flags(&mut self) {
        for n in &mut self.nodes {
            n.pruned = false;
        }
    }
}

/// Height 1 is the root alone; every node above the last level gets one
/// child per (move vector, target) pair of its state.
pub fn build_tree(cgs: &Cgs, height: usize) -> Result<UnrollTree, PruneError> {
    if height == 0 {
        return Err(PruneError::ZeroHeight);
    }
    let q0 = cgs.initial();
    let mut nodes = vec![UnrollNode {
        state: q0,
        incoming: None,
        children: Vec::new(),
        history: vec![q0],
        valuation: cgs.label(q0).clone(),
        pruned: false,
    }];
    let mut stack = vec![0];
    while let Some(id) = stack.pop() {
        if nodes[id].depth() + 1 >= height {
            continue;
        }
        let q = nodes[id].state;
        for t in cgs.transitions(q) {
            for &r in &t.targets {
                let child = nodes.len();
                let mut history = nodes[id].history.clone();
                history.push(r);
                nodes.push(UnrollNode {
                    state: r,
                    incoming: Some(t.mv.clone()),
                    children: Vec::new(),
                    history,
                    valuation: cgs.label(r).clone(),
                    pruned: false,
                });
                nodes[id].children.push(child);
                stack.push(child);
            }
        }
    }
    Ok(UnrollTree { nodes, height })
}

/// Applies one guarded action: at every unflagged internal node whose
/// history satisfies `cond`, drops the children where `agent` plays another
/// action and flags the node. Returns whether any node matched.
fn apply_rule(
    tree: &mut UnrollTree,
    cgs: &Cgs,
    cond: &BoundCondition,
    action: &str,
    agent: usize,
) -> Result<bool, PruneError> {
    let action_id = cgs.action_id(action);
    let mut matched = false;
    // (node, regex run state after reading the node's history)
    let mut stack: Vec<(usize, Option<FixedBitSet>)> = vec![(0, None)];
    while let Some((id, parent_run)) = stack.pop() {
        if !tree.is_internal(id) {
            continue;
        }
        let (holds, run) = match cond {
            BoundCondition::Bool(b) => (b.eval(&tree.nodes[id].valuation), None),
            BoundCondition::Regex(m) => {
                let run = m.step(parent_run.as_ref(), &tree.nodes[id].valuation);
                (m.accepts(&run), Some(run))
            }
        };
        if holds {
            matched = true;
            if !tree.nodes[id].pruned {
                let keep: Vec<usize> = tree.nodes[id]
                    .children
                    .iter()
                    .copied()
                    .filter(|&c| {
                        let mv = tree.nodes[c].incoming.as_ref().expect("child has a move");
                        Some(mv.get(agent)) == action_id
                    })
                    .collect();
                if keep.is_empty() {
                    let n = &tree.nodes[id];
                    return Err(PruneError::Invalid(format!(
                        "agent {} plays `{action}` at node with history {} where it is unavailable",
                        agent + 1,
                        n.history
                            .iter()
                            .map(|&q| cgs.state_name(q))
                            .collect::<Vec<_>>()
                            .join(",")
                    )));
                }
                tree.nodes[id].children = keep;
                tree.nodes[id].pruned = true;
            }
        }
        if matches!(&run, Some(r) if r.is_clear()) {
            continue;
        }
        for &c in tree.nodes[id].children.iter().rev() {
            stack.push((c, run.clone()));
        }
    }
    Ok(matched)
}

/// Prunes under one regular (or boolean) guarded action. `false` when no
/// internal node's history matches.
pub fn regex_prune(
    tree: &mut UnrollTree,
    cgs: &Cgs,
    cond: &Condition,
    action: &str,
    agent: usize,
) -> Result<bool, PruneError> {
    let bound = cond.bind(cgs.atoms())?;
    apply_rule(tree, cgs, &bound, action, agent)
}

pub(crate) fn prune_in_place(
    tree: &mut UnrollTree,
    cgs: &Cgs,
    s: &CollectiveStrategy,
) -> Result<(), PruneError> {
    s.check_agents(&[], cgs.agents())?;
    for member in s.members() {
        tree.reset_flags();
        for rule in member.rules() {
            let bound = rule.condition.bind(cgs.atoms())?;
            apply_rule(tree, cgs, &bound, &rule.action, member.agent())?;
        }
    }
    Ok(())
}

/// Surviving nodes in preorder with their labels and edges; leaves loop on
/// themselves.
pub(crate) fn tree_relation(
    tree: &UnrollTree,
) -> (Vec<usize>, Vec<FixedBitSet>, Vec<(usize, usize)>) {
    let order = tree.preorder();
    let mut index = vec![usize::MAX; tree.nodes.len()];
    for (i, &id) in order.iter().enumerate() {
        index[id] = i;
    }
    let labels = order
        .iter()
        .map(|&id| tree.nodes[id].valuation.clone())
        .collect();
    let mut edges = Vec::new();
    for (i, &id) in order.iter().enumerate() {
        let children = &tree.nodes[id].children;
        if children.is_empty() {
            edges.push((i, i));
        }
        edges.extend(children.iter().map(|&c| (i, index[c])));
    }
    (order, labels, edges)
}

/// Applies each member's rules in turn (flags cleared between members) and
/// rebuilds the surviving tree as a model with states `n0, n1, ...` in
/// preorder. Leaves become absorbing under the all-idle move.
pub fn prune_tree(
    tree: &mut UnrollTree,
    cgs: &Cgs,
    s: &CollectiveStrategy,
) -> Result<Cgs, PruneError> {
    prune_in_place(tree, cgs, s)?;
    let order = tree.preorder();
    let mut index = vec![usize::MAX; tree.nodes.len()];
    for (i, &id) in order.iter().enumerate() {
        index[id] = i;
    }
    let mut actions = cgs.actions().to_vec();
    let idle = match cgs.idle() {
        Some(a) => a,
        None => {
            actions.push(IDLE.to_string());
            actions.len() - 1
        }
    };
    let transitions = order
        .iter()
        .enumerate()
        .map(|(i, &id)| {
            let node = &tree.nodes[id];
            if node.children.is_empty() {
                return vec![Transition {
                    mv: MoveVector(vec![idle; cgs.agents()]),
                    targets: vec![i],
                }];
            }
            let mut out: Vec<Transition> = Vec::new();
            for &c in &node.children {
                let mv = tree.nodes[c].incoming.clone().expect("child has a move");
                match out.iter_mut().find(|t| t.mv == mv) {
                    Some(t) => t.targets.push(index[c]),
                    None => out.push(Transition {
                        mv,
                        targets: vec![index[c]],
                    }),
                }
            }
            out
        })
        .collect();
    let parts = CgsParts {
        agents: cgs.agents(),
        states: (0..order.len()).map(|i| format!("n{i}")).collect(),
        initial: 0,
        atoms: cgs.atoms().to_vec(),
        labels: order
            .iter()
            .map(|&id| tree.nodes[id].valuation.clone())
            .collect(),
        actions,
        transitions,
    };
    Ok(Cgs::from_parts(
        parts,
        ParseOptions {
            mode: ParseMode::Lenient,
            require_idle: false,
        },
    )?)
}
