use super::{PruneError, Validity};
use crate::cgs::{ActionId, Cgs, CgsParts, ParseMode, ParseOptions, StateId, Transition};
use crate::mc::{Kripke, McError};
use crate::strategy::{BoundCondition, CollectiveStrategy};

/// Per member: the agent and, per state, the action it fires.
pub(crate) type Fired = Vec<(usize, Vec<ActionId>)>;

/// The action the first matching rule prescribes at every state, or the
/// reason the strategy is invalid.
pub(crate) fn fired_actions(
    cgs: &Cgs,
    s: &CollectiveStrategy,
) -> Result<Result<Fired, String>, PruneError> {
    s.check_agents(&[], cgs.agents())?;
    let mut out = Vec::with_capacity(s.members().len());
    for member in s.members() {
        let agent = member.agent();
        let mut rules = Vec::with_capacity(member.rules().len());
        for rule in member.rules() {
            if rule.condition.is_regex() {
                return Err(PruneError::NotMemoryless(rule.condition.to_string()));
            }
            let BoundCondition::Bool(cond) = rule.condition.bind(cgs.atoms())? else {
                unreachable!("checked boolean above")
            };
            rules.push((cond, cgs.action_id(&rule.action), &rule.action));
        }
        let mut fired = Vec::with_capacity(cgs.num_states());
        for q in 0..cgs.num_states() {
            let (_, action, name) = rules
                .iter()
                .find(|(c, _, _)| c.eval(cgs.label(q)))
                .expect("normalized strategies end with a top rule");
            match action.filter(|&a| cgs.is_available(q, agent, a)) {
                Some(a) => fired.push(a),
                None => {
                    return Ok(Err(format!(
                        "agent {} plays `{name}` at {} where it is unavailable",
                        agent + 1,
                        cgs.state_name(q)
                    )))
                }
            }
        }
        out.push((agent, fired));
    }
    Ok(Ok(out))
}

/// Invalid iff some rule fires (first match) at a state where its action is
/// not available to its agent.
pub fn validate_strategy_nr(cgs: &Cgs, s: &CollectiveStrategy) -> Result<Validity, PruneError> {
    Ok(match fired_actions(cgs, s)? {
        Ok(_) => Validity::Valid,
        Err(reason) => Validity::Invalid(reason),
    })
}

/// The base model restricted to transitions where every coalition member
/// plays its prescribed action.
#[derive(Debug, Clone)]
pub struct PrunedModel<'a> {
    base: &'a Cgs,
    kept: Vec<Vec<usize>>,
}

fn kept_indices(cgs: &Cgs, fired: &[(usize, Vec<ActionId>)]) -> Vec<Vec<usize>> {
    (0..cgs.num_states())
        .map(|q| {
            cgs.transitions(q)
                .iter()
                .enumerate()
                .filter(|(_, t)| fired.iter().all(|(a, acts)| t.mv.get(*a) == acts[q]))
                .map(|(i, _)| i)
                .collect()
        })
        .collect()
}

pub fn prune_model_nr<'a>(
    cgs: &'a Cgs,
    s: &CollectiveStrategy,
) -> Result<PrunedModel<'a>, PruneError> {
    let fired = fired_actions(cgs, s)?.map_err(PruneError::Invalid)?;
    Ok(PrunedModel {
        base: cgs,
        kept: kept_indices(cgs, &fired),
    })
}

/// Kripke structure of the pruned model without materializing it.
pub(crate) fn pruned_kripke<'a>(
    cgs: &'a Cgs,
    fired: &[(usize, Vec<ActionId>)],
) -> Result<Kripke<'a>, McError> {
    let edges = (0..cgs.num_states()).flat_map(|q| {
        cgs.transitions(q)
            .iter()
            .filter(move |t| fired.iter().all(|(a, acts)| t.mv.get(*a) == acts[q]))
            .flat_map(move |t| t.targets.iter().map(move |&r| (q, r)))
    });
    Kripke::new(cgs.atoms(), cgs.labels(), cgs.initial(), edges)
}

impl<'a> PrunedModel<'a> {
    pub fn base(&self) -> &'a Cgs {
        self.base
    }

    pub fn kept(&self, q: StateId) -> impl Iterator<Item = &'a Transition> + '_ {
        let all = self.base.transitions(q);
        self.kept[q].iter().map(move |&i| &all[i])
    }

    pub fn num_kept(&self) -> usize {
        self.kept.iter().map(Vec::len).sum()
    }

    pub fn kripke(&self) -> Result<Kripke<'a>, McError> {
        let edges = (0..self.base.num_states()).flat_map(|q| {
            self.kept(q)
                .flat_map(move |t| t.targets.iter().map(move |&r| (q, r)))
                .collect::<Vec<_>>()
        });
        Kripke::new(
            self.base.atoms(),
            self.base.labels(),
            self.base.initial(),
            edges,
        )
    }

    /// The pruned model as a model in its own right.
    pub fn to_cgs(&self) -> Result<Cgs, PruneError> {
        let mut parts: CgsParts = self.base.to_parts();
        parts.transitions = (0..self.base.num_states())
            .map(|q| self.kept(q).cloned().collect())
            .collect();
        let mode = if self.base.is_deterministic() {
            ParseMode::Strict
        } else {
            ParseMode::Lenient
        };
        Ok(Cgs::from_parts(
            parts,
            ParseOptions {
                mode,
                require_idle: false,
            },
        )?)
    }
}
