use super::{Kripke, McError, StateSet};
use crate::logic::{build_formula_tree, Formula, FormulaTree, NodeKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantifier {
    Universal,
    Existential,
}

/// Universal: states all of whose successors are in `target`.
/// Existential: states with some successor in `target`.
pub fn preimage(model: &Kripke, target: &StateSet, quantifier: Quantifier) -> StateSet {
    let n = model.num_states();
    match quantifier {
        Quantifier::Existential => {
            let mut out = StateSet::empty(n);
            for t in target.iter() {
                for &p in model.predecessors(t) {
                    out.insert(p);
                }
            }
            out
        }
        Quantifier::Universal => StateSet::from_states(
            n,
            (0..n).filter(|&q| model.successors(q).iter().all(|&s| target.contains(s))),
        ),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CtlOutcome {
    pub holds: bool,
    pub sat: StateSet,
    /// Fixpoint rounds summed over all temporal nodes, final stable round
    /// included.
    pub iterations: usize,
}

/// Least fixpoint `μZ. ψ ∪ (φ ∩ pre(Z))`, one worklist layer per round.
fn until(model: &Kripke, phi: &StateSet, psi: &StateSet, q: Quantifier) -> (StateSet, usize) {
    let n = model.num_states();
    let mut z = psi.clone();
    // Universal: successors of q not yet known to be in Z.
    let mut pending: Vec<usize> = match q {
        Quantifier::Universal => (0..n).map(|s| model.successors(s).len()).collect(),
        Quantifier::Existential => Vec::new(),
    };
    let mut frontier: Vec<usize> = z.iter().collect();
    let mut rounds = 1;
    loop {
        let mut next = Vec::new();
        for &t in &frontier {
            for &p in model.predecessors(t) {
                if z.contains(p) || !phi.contains(p) {
                    continue;
                }
                let ready = match q {
                    Quantifier::Existential => true,
                    Quantifier::Universal => {
                        pending[p] -= 1;
                        pending[p] == 0
                    }
                };
                if ready {
                    z.insert(p);
                    next.push(p);
                }
            }
        }
        if next.is_empty() {
            return (z, rounds);
        }
        rounds += 1;
        frontier = next;
    }
}

/// Greatest fixpoint `νZ. φ ∩ pre(Z)`, one removal layer per round.
fn globally(model: &Kripke, phi: &StateSet, q: Quantifier) -> (StateSet, usize) {
    let n = model.num_states();
    let mut z = phi.clone();
    // Existential: successors still inside Z.
    let mut inside: Vec<usize> = match q {
        Quantifier::Existential => (0..n)
            .map(|s| {
                model
                    .successors(s)
                    .iter()
                    .filter(|&&t| z.contains(t))
                    .count()
            })
            .collect(),
        Quantifier::Universal => Vec::new(),
    };
    let doomed = |s: usize, z: &StateSet, inside: &[usize]| match q {
        Quantifier::Existential => inside[s] == 0,
        Quantifier::Universal => model.successors(s).iter().any(|&t| !z.contains(t)),
    };
    let mut frontier: Vec<usize> = z.iter().filter(|&s| doomed(s, &z, &inside)).collect();
    let mut rounds = 1;
    while !frontier.is_empty() {
        rounds += 1;
        for &s in &frontier {
            z.remove(s);
        }
        let mut next = Vec::new();
        let mut queued = StateSet::empty(n);
        for &s in &frontier {
            for &p in model.predecessors(s) {
                if !z.contains(p) || queued.contains(p) {
                    continue;
                }
                let gone = match q {
                    Quantifier::Existential => {
                        inside[p] -= 1;
                        inside[p] == 0
                    }
                    Quantifier::Universal => true,
                };
                if gone {
                    queued.insert(p);
                    next.push(p);
                }
            }
        }
        frontier = next;
    }
    (z, rounds)
}

/// Fills every node's satisfying set bottom-up and returns the root set
/// with the total number of fixpoint rounds.
pub fn solve_tree(tree: &mut FormulaTree, model: &Kripke) -> Result<(StateSet, usize), McError> {
    let root = tree.root().ok_or(McError::EmptyTree)?;
    let n = model.num_states();
    let mut rounds = 0;
    for id in tree.post_order() {
        let child = |i: usize| {
            tree.node(tree.node(id).children[i])
                .sat_states
                .as_ref()
                .expect("children solved first")
        };
        let set = match &tree.node(id).kind {
            NodeKind::True => StateSet::full(n),
            NodeKind::Atom(name) => {
                let a = model
                    .atoms()
                    .iter()
                    .position(|x| x == name)
                    .ok_or_else(|| McError::UnknownAtom(name.clone()))?;
                StateSet::from_states(n, (0..n).filter(|&q| model.label(q).contains(a)))
            }
            NodeKind::Not => child(0).complement(),
            NodeKind::And => child(0).intersection(child(1)),
            NodeKind::Or => child(0).union(child(1)),
            NodeKind::AX => preimage(model, child(0), Quantifier::Universal),
            NodeKind::EX => preimage(model, child(0), Quantifier::Existential),
            kind @ (NodeKind::AU | NodeKind::EU) => {
                let q = if *kind == NodeKind::AU {
                    Quantifier::Universal
                } else {
                    Quantifier::Existential
                };
                let (set, r) = until(model, child(0), child(1), q);
                rounds += r;
                set
            }
            kind @ (NodeKind::AG | NodeKind::EG) => {
                let q = if *kind == NodeKind::AG {
                    Quantifier::Universal
                } else {
                    Quantifier::Existential
                };
                let (set, r) = globally(model, child(0), q);
                rounds += r;
                set
            }
        };
        tree.node_mut(id).sat_states = Some(set);
    }
    let sat = tree.node(root).sat_states.clone().expect("root solved");
    Ok((sat, rounds))
}

/// Checks a CTL formula at the model's initial state.
pub fn model_checking(f: &Formula, model: &Kripke) -> Result<CtlOutcome, McError> {
    let mut tree = build_formula_tree(f)?;
    let (sat, iterations) = solve_tree(&mut tree, model)?;
    Ok(CtlOutcome {
        holds: sat.contains(model.initial()),
        sat,
        iterations,
    })
}
