use std::collections::BTreeMap;

use super::{McError, StateSet};
use crate::cgs::{Cgs, StateId};
use crate::logic::{check_nesting, Coalition, Dialect, Formula, PathFormula};

/// For each state, the coalition's joint moves, each with every target
/// reachable under some completion by the other agents.
struct CoalitionMoves {
    groups: Vec<Vec<Vec<StateId>>>,
}

impl CoalitionMoves {
    fn new(cgs: &Cgs, coalition: &Coalition) -> CoalitionMoves {
        let groups = (0..cgs.num_states())
            .map(|q| {
                let mut by_move: BTreeMap<Vec<usize>, Vec<StateId>> = BTreeMap::new();
                for t in cgs.transitions(q) {
                    let key = coalition.members().iter().map(|&a| t.mv.get(a)).collect();
                    by_move.entry(key).or_default().extend(&t.targets);
                }
                by_move
                    .into_values()
                    .map(|mut targets| {
                        targets.sort_unstable();
                        targets.dedup();
                        targets
                    })
                    .collect()
            })
            .collect();
        CoalitionMoves { groups }
    }

    /// `Pre_A(T)`: some joint move of A forces the successor into T.
    fn pre(&self, target: &StateSet) -> StateSet {
        StateSet::from_states(
            target.universe(),
            self.groups.iter().enumerate().filter_map(|(q, moves)| {
                moves
                    .iter()
                    .any(|ts| ts.iter().all(|&t| target.contains(t)))
                    .then_some(q)
            }),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtlOutcome {
    pub holds: bool,
    pub sat: StateSet,
    pub iterations: usize,
}

/// Standard ATL model checking of a formula without nested modalities.
pub fn atl_check(cgs: &Cgs, f: &Formula) -> Result<AtlOutcome, McError> {
    f.check_dialect(Dialect::Atl)?;
    check_nesting(f)?;
    let mut iterations = 0;
    let sat = eval(cgs, f, &mut iterations)?;
    Ok(AtlOutcome {
        holds: sat.contains(cgs.initial()),
        sat,
        iterations,
    })
}

fn eval(cgs: &Cgs, f: &Formula, rounds: &mut usize) -> Result<StateSet, McError> {
    let n = cgs.num_states();
    Ok(match f {
        Formula::True => StateSet::full(n),
        Formula::Atom(name) => {
            let a = cgs
                .atom_index(name)
                .ok_or_else(|| McError::UnknownAtom(name.clone()))?;
            StateSet::from_states(n, (0..n).filter(|&q| cgs.holds(q, a)))
        }
        Formula::Not(g) => eval(cgs, g, rounds)?.complement(),
        Formula::And(a, b) => eval(cgs, a, rounds)?.intersection(&eval(cgs, b, rounds)?),
        Formula::Or(a, b) => eval(cgs, a, rounds)?.union(&eval(cgs, b, rounds)?),
        Formula::Atl { coalition, path } => {
            check_coalition(cgs, coalition)?;
            let moves = CoalitionMoves::new(cgs, coalition);
            match path.as_ref() {
                PathFormula::Next(g) => moves.pre(&eval(cgs, g, rounds)?),
                PathFormula::Until(a, b) => {
                    let phi = eval(cgs, a, rounds)?;
                    let mut z = eval(cgs, b, rounds)?;
                    loop {
                        *rounds += 1;
                        let next = z.union(&phi.intersection(&moves.pre(&z)));
                        if next == z {
                            break z;
                        }
                        z = next;
                    }
                }
                PathFormula::Globally(g) => {
                    let mut z = eval(cgs, g, rounds)?;
                    loop {
                        *rounds += 1;
                        let next = z.intersection(&moves.pre(&z));
                        if next == z {
                            break z;
                        }
                        z = next;
                    }
                }
            }
        }
        Formula::Nat { .. } | Formula::All(_) | Formula::Exists(_) => {
            unreachable!("rejected by the dialect check")
        }
    })
}

pub(crate) fn check_coalition(cgs: &Cgs, coalition: &Coalition) -> Result<(), McError> {
    if coalition.is_empty() {
        return Err(McError::InvalidCoalition("empty coalition".into()));
    }
    if let Some(&a) = coalition.members().iter().find(|&&a| a >= cgs.agents()) {
        return Err(McError::InvalidCoalition(format!(
            "agent {} is not in 1..{}",
            a + 1,
            cgs.agents()
        )));
    }
    Ok(())
}
