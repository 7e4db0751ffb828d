use fixedbitset::FixedBitSet;

use super::McError;
use crate::cgs::{Cgs, StateId};

/// Unlabelled total transition relation over labelled states, stored as
/// forward and backward adjacency arrays.
#[derive(Debug, Clone)]
pub struct Kripke<'a> {
    atoms: &'a [String],
    labels: &'a [FixedBitSet],
    initial: StateId,
    succ_start: Vec<usize>,
    succ: Vec<StateId>,
    pred_start: Vec<usize>,
    pred: Vec<StateId>,
}

fn compress(n: usize, mut edges: Vec<(StateId, StateId)>) -> (Vec<usize>, Vec<StateId>) {
    edges.sort_unstable();
    edges.dedup();
    let mut start = vec![0; n + 1];
    for &(s, _) in &edges {
        start[s + 1] += 1;
    }
    for i in 0..n {
        start[i + 1] += start[i];
    }
    (start, edges.into_iter().map(|(_, t)| t).collect())
}

impl<'a> Kripke<'a> {
    /// Builds the relation and checks that every state has a successor.
    pub fn new(
        atoms: &'a [String],
        labels: &'a [FixedBitSet],
        initial: StateId,
        edges: impl IntoIterator<Item = (StateId, StateId)>,
    ) -> Result<Kripke<'a>, McError> {
        let n = labels.len();
        let edges: Vec<_> = edges.into_iter().collect();
        if let Some(&(s, t)) = edges.iter().find(|&&(s, t)| s >= n || t >= n) {
            return Err(McError::Malformed(format!(
                "edge {s} -> {t} outside {n} states"
            )));
        }
        if n > 0 && initial >= n {
            return Err(McError::Malformed(format!(
                "initial state {initial} outside {n} states"
            )));
        }
        let backward = edges.iter().map(|&(s, t)| (t, s)).collect();
        let (succ_start, succ) = compress(n, edges);
        let (pred_start, pred) = compress(n, backward);
        if let Some(q) = (0..n).find(|&q| succ_start[q] == succ_start[q + 1]) {
            return Err(McError::DeadEnd { state: q });
        }
        Ok(Kripke {
            atoms,
            labels,
            initial,
            succ_start,
            succ,
            pred_start,
            pred,
        })
    }

    /// Every transition of the model, move labels dropped.
    pub fn from_cgs(cgs: &'a Cgs) -> Result<Kripke<'a>, McError> {
        let edges = (0..cgs.num_states()).flat_map(|q| {
            cgs.transitions(q)
                .iter()
                .flat_map(move |t| t.targets.iter().map(move |&r| (q, r)))
        });
        Kripke::new(cgs.atoms(), cgs.labels(), cgs.initial(), edges)
    }

    pub fn num_states(&self) -> usize {
        self.labels.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn atoms(&self) -> &[String] {
        self.atoms
    }

    pub fn label(&self, q: StateId) -> &FixedBitSet {
        &self.labels[q]
    }

    pub fn successors(&self, q: StateId) -> &[StateId] {
        &self.succ[self.succ_start[q]..self.succ_start[q + 1]]
    }

    pub fn predecessors(&self, q: StateId) -> &[StateId] {
        &self.pred[self.pred_start[q]..self.pred_start[q + 1]]
    }

    pub fn num_edges(&self) -> usize {
        self.succ.len()
    }
}
