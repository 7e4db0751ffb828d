//! Concurrent game structures.
//!
//! A [`Cgs`] holds the agents, states, atoms, labelling and the move-vector
//! transition relation. Action availability `d_a(q)` is derived from the
//! transitions: an agent can play an action at `q` iff some move vector out
//! of `q` uses it.

mod parse;
mod random;

use std::collections::HashMap;
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use thiserror::Error;

pub use random::{generate_random_cgs, Density, RandomCgsParams};

pub type StateId = usize;
pub type ActionId = usize;

/// The name every agent must be able to play in every state.
pub const IDLE: &str = "idle";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CgsError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown state `{name}`")]
    UnknownState { line: usize, name: String },
    #[error("line {line}: unknown atom `{name}`")]
    UnknownAtom { line: usize, name: String },
    #[error("line {line}: move vector has {found} actions, expected {expected}")]
    Arity {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: duplicate transition for `{state}` under ({mv}) in strict mode")]
    DuplicateTransition {
        line: usize,
        state: String,
        mv: String,
    },
    #[error("states non-empty: the model declares no state")]
    NoStates,
    #[error("agents must be at least 1")]
    NoAgents,
    #[error("duplicate declaration of `{0}`")]
    DuplicateName(String),
    #[error("missing directive {0}")]
    MissingDirective(&'static str),
    #[error("state `{state}`: agent {agent} cannot play idle")]
    MissingIdle { state: String, agent: usize },
    #[error("state `{0}` has no outgoing transition")]
    NoOutgoing(String),
    #[error(
        "state `{state}`: move vector ({mv}) is not defined although every component is available"
    )]
    IncompleteMoves { state: String, mv: String },
    #[error("state `{state}`: ({mv}) has {count} targets in strict mode")]
    Nondeterministic {
        state: String,
        mv: String,
        count: usize,
    },
    #[error("no transition from `{state}` under ({mv})")]
    NoTransition { state: String, mv: String },
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Strict models have exactly one successor per (state, move vector).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    #[default]
    Strict,
    Lenient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseOptions {
    pub mode: ParseMode,
    pub require_idle: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            mode: ParseMode::Strict,
            require_idle: true,
        }
    }
}

impl From<ParseMode> for ParseOptions {
    fn from(mode: ParseMode) -> Self {
        ParseOptions {
            mode,
            require_idle: true,
        }
    }
}

/// One action per agent, indexed by agent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MoveVector(pub Vec<ActionId>);

impl MoveVector {
    pub fn actions(&self) -> &[ActionId] {
        &self.0
    }

    pub fn get(&self, agent: usize) -> ActionId {
        self.0[agent]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub mv: MoveVector,
    pub targets: Vec<StateId>,
}

/// Raw components, validated by [`Cgs::from_parts`].
#[derive(Debug, Clone, Default)]
pub struct CgsParts {
    pub agents: usize,
    pub states: Vec<String>,
    pub initial: StateId,
    pub atoms: Vec<String>,
    pub labels: Vec<FixedBitSet>,
    pub actions: Vec<String>,
    pub transitions: Vec<Vec<Transition>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cgs {
    agents: usize,
    states: Vec<String>,
    initial: StateId,
    atoms: Vec<String>,
    labels: Vec<FixedBitSet>,
    actions: Vec<String>,
    transitions: Vec<Vec<Transition>>,
    // [state][agent] -> sorted action ids
    available: Vec<Vec<Vec<ActionId>>>,
    deterministic: bool,
}

impl Cgs {
    /// Parses a model in strict mode with the idle requirement.
    pub fn parse(text: &str, mode: ParseMode) -> Result<Cgs, CgsError> {
        parse::parse_cgs(text, mode.into())
    }

    pub fn parse_with(text: &str, options: ParseOptions) -> Result<Cgs, CgsError> {
        parse::parse_cgs(text, options)
    }

    pub fn from_parts(parts: CgsParts, options: ParseOptions) -> Result<Cgs, CgsError> {
        let CgsParts {
            agents,
            states,
            initial,
            atoms,
            mut labels,
            actions,
            mut transitions,
        } = parts;
        let actions = canonical_actions(actions, &mut transitions)?;
        if agents == 0 {
            return Err(CgsError::NoAgents);
        }
        if states.is_empty() {
            return Err(CgsError::NoStates);
        }
        check_unique(&states)?;
        check_unique(&atoms)?;
        check_unique(&actions)?;
        if initial >= states.len() {
            return Err(CgsError::InvalidParameter(format!(
                "initial state index {initial} out of range"
            )));
        }
        if transitions.len() != states.len() {
            return Err(CgsError::InvalidParameter(
                "transition table does not cover every state".into(),
            ));
        }
        labels.resize(states.len(), FixedBitSet::with_capacity(atoms.len()));
        for label in &mut labels {
            if label.ones().any(|a| a >= atoms.len()) {
                return Err(CgsError::InvalidParameter(
                    "label references an undeclared atom".into(),
                ));
            }
            label.grow(atoms.len());
        }

        let idle = actions.iter().position(|a| a == IDLE);
        let mut available = Vec::with_capacity(states.len());
        let mut deterministic = true;
        for (q, outgoing) in transitions.iter().enumerate() {
            if outgoing.is_empty() {
                return Err(CgsError::NoOutgoing(states[q].clone()));
            }
            let mut per_agent: Vec<Vec<ActionId>> = vec![Vec::new(); agents];
            for t in outgoing {
                if t.mv.0.len() != agents {
                    return Err(CgsError::InvalidParameter(format!(
                        "move vector of arity {} at `{}`",
                        t.mv.0.len(),
                        states[q]
                    )));
                }
                if t.targets.is_empty() || t.targets.iter().any(|&s| s >= states.len()) {
                    return Err(CgsError::InvalidParameter(format!(
                        "bad target list at `{}`",
                        states[q]
                    )));
                }
                if t.mv.0.iter().any(|&a| a >= actions.len()) {
                    return Err(CgsError::InvalidParameter("action id out of range".into()));
                }
                if t.targets.len() > 1 {
                    deterministic = false;
                    if options.mode == ParseMode::Strict {
                        return Err(CgsError::Nondeterministic {
                            state: states[q].clone(),
                            mv: format_mv(&actions, &t.mv),
                            count: t.targets.len(),
                        });
                    }
                }
                for (agent, &a) in t.mv.0.iter().enumerate() {
                    per_agent[agent].push(a);
                }
            }
            for acts in &mut per_agent {
                acts.sort_unstable();
                acts.dedup();
            }
            if options.require_idle {
                for (agent, acts) in per_agent.iter().enumerate() {
                    if idle.is_none_or(|i| !acts.contains(&i)) {
                        return Err(CgsError::MissingIdle {
                            state: states[q].clone(),
                            agent: agent + 1,
                        });
                    }
                }
            }
            check_product(&states[q], &actions, outgoing, &per_agent)?;
            available.push(per_agent);
        }

        Ok(Cgs {
            agents,
            states,
            initial,
            atoms,
            labels,
            actions,
            transitions,
            available,
            deterministic,
        })
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q]
    }

    pub fn state_index(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name)
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == name)
    }

    /// π(q) as a bitset over atom indices.
    pub fn label(&self, q: StateId) -> &FixedBitSet {
        &self.labels[q]
    }

    pub fn labels(&self) -> &[FixedBitSet] {
        &self.labels
    }

    pub fn holds(&self, q: StateId, atom: usize) -> bool {
        self.labels[q].contains(atom)
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn action_name(&self, a: ActionId) -> &str {
        &self.actions[a]
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|a| a == name)
    }

    pub fn idle(&self) -> Option<ActionId> {
        self.action_id(IDLE)
    }

    /// Raw components, for building derived models.
    pub fn to_parts(&self) -> CgsParts {
        CgsParts {
            agents: self.agents,
            states: self.states.clone(),
            initial: self.initial,
            atoms: self.atoms.clone(),
            labels: self.labels.clone(),
            actions: self.actions.clone(),
            transitions: self.transitions.clone(),
        }
    }

    pub fn transitions(&self, q: StateId) -> &[Transition] {
        &self.transitions[q]
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.iter().map(Vec::len).sum()
    }

    /// d_a(q), sorted by action id.
    pub fn available(&self, q: StateId, agent: usize) -> &[ActionId] {
        &self.available[q][agent]
    }

    pub fn is_available(&self, q: StateId, agent: usize, action: ActionId) -> bool {
        self.available[q][agent].binary_search(&action).is_ok()
    }

    /// Actions the agent plays somewhere in the model, sorted by name.
    pub fn agent_actions(&self, agent: usize) -> Vec<ActionId> {
        let mut acts: Vec<ActionId> = self
            .available
            .iter()
            .flat_map(|per_agent| per_agent[agent].iter().copied())
            .collect();
        acts.sort_unstable();
        acts.dedup();
        acts.sort_by(|&a, &b| self.actions[a].cmp(&self.actions[b]));
        acts
    }

    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }

    pub fn successors(&self, q: StateId, mv: &MoveVector) -> Result<&[StateId], CgsError> {
        self.transitions[q]
            .iter()
            .find(|t| &t.mv == mv)
            .map(|t| t.targets.as_slice())
            .ok_or_else(|| CgsError::NoTransition {
                state: self.states[q].clone(),
                mv: self.format_move(mv),
            })
    }

    pub fn move_vector(&self, names: &[&str]) -> Result<MoveVector, CgsError> {
        names
            .iter()
            .map(|n| {
                self.action_id(n)
                    .ok_or_else(|| CgsError::UnknownAction(n.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(MoveVector)
    }

    pub fn format_move(&self, mv: &MoveVector) -> String {
        format_mv(&self.actions, mv)
    }

    /// Model text in the line-oriented grammar accepted by [`Cgs::parse`].
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "AGENTS: {}", self.agents);
        let _ = writeln!(out, "STATES: {}", self.states.join(" "));
        let _ = writeln!(out, "INITIAL: {}", self.states[self.initial]);
        write_list(&mut out, "ATOMS:", self.atoms.iter().map(String::as_str));
        for (q, name) in self.states.iter().enumerate() {
            write_list(
                &mut out,
                &format!("LABEL {name}:"),
                self.labels[q].ones().map(|a| self.atoms[a].as_str()),
            );
        }
        for (q, outgoing) in self.transitions.iter().enumerate() {
            for t in outgoing {
                for &target in &t.targets {
                    let _ = writeln!(
                        out,
                        "TRANS {} ({}) {}",
                        self.states[q],
                        self.format_move(&t.mv),
                        self.states[target]
                    );
                }
            }
        }
        out
    }

    /// Debug dump: one row per source state, one column per target, each
    /// cell listing the move vectors that lead there.
    pub fn adjacency_matrix(&self) -> String {
        let n = self.states.len();
        let mut cells = vec![vec![Vec::<String>::new(); n]; n];
        for (q, outgoing) in self.transitions.iter().enumerate() {
            for t in outgoing {
                for &target in &t.targets {
                    cells[q][target].push(format!("({})", self.format_move(&t.mv)));
                }
            }
        }
        let rendered: Vec<Vec<String>> = cells
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|c| {
                        if c.is_empty() {
                            "-".to_string()
                        } else {
                            c.join("")
                        }
                    })
                    .collect()
            })
            .collect();
        let name_width = self.states.iter().map(String::len).max().unwrap_or(1);
        let mut widths: Vec<usize> = self.states.iter().map(String::len).collect();
        for row in &rendered {
            for (j, cell) in row.iter().enumerate() {
                widths[j] = widths[j].max(cell.len());
            }
        }
        let mut out = String::new();
        let _ = write!(out, "{:name_width$}", "");
        for (j, s) in self.states.iter().enumerate() {
            let _ = write!(out, " {:w$}", s, w = widths[j]);
        }
        out.push('\n');
        for (i, row) in rendered.iter().enumerate() {
            let _ = write!(out, "{:name_width$}", self.states[i]);
            for (j, cell) in row.iter().enumerate() {
                let _ = write!(out, " {:w$}", cell, w = widths[j]);
            }
            out.push('\n');
        }
        out
    }
}

fn format_mv(actions: &[String], mv: &MoveVector) -> String {
    mv.0.iter()
        .map(|&a| actions[a].as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

fn write_list<'a>(out: &mut String, head: &str, items: impl Iterator<Item = &'a str>) {
    out.push_str(head);
    for item in items {
        out.push(' ');
        out.push_str(item);
    }
    out.push('\n');
}

// Action ids are numbered by first use in the transition table, so a parsed
// model and its serialization agree on ids. Unused names are dropped.
fn canonical_actions(
    actions: Vec<String>,
    transitions: &mut [Vec<Transition>],
) -> Result<Vec<String>, CgsError> {
    let mut remap = vec![usize::MAX; actions.len()];
    let mut ordered = Vec::new();
    for t in transitions.iter_mut().flatten() {
        for a in &mut t.mv.0 {
            let slot = remap
                .get_mut(*a)
                .ok_or_else(|| CgsError::InvalidParameter("action id out of range".into()))?;
            if *slot == usize::MAX {
                *slot = ordered.len();
                ordered.push(actions[*a].clone());
            }
            *a = *slot;
        }
    }
    Ok(ordered)
}

fn check_unique(names: &[String]) -> Result<(), CgsError> {
    let mut seen = HashMap::with_capacity(names.len());
    for n in names {
        if seen.insert(n.as_str(), ()).is_some() {
            return Err(CgsError::DuplicateName(n.clone()));
        }
    }
    Ok(())
}

// δ must be defined on the full product d_1(q) × … × d_n(q).
fn check_product(
    state: &str,
    actions: &[String],
    outgoing: &[Transition],
    per_agent: &[Vec<ActionId>],
) -> Result<(), CgsError> {
    let expected: usize = per_agent.iter().map(Vec::len).product();
    let mut defined: Vec<&MoveVector> = outgoing.iter().map(|t| &t.mv).collect();
    defined.sort();
    defined.dedup();
    if defined.len() == expected {
        return Ok(());
    }
    let mut idx = vec![0usize; per_agent.len()];
    loop {
        let mv = MoveVector(
            idx.iter()
                .enumerate()
                .map(|(a, &i)| per_agent[a][i])
                .collect(),
        );
        if defined.binary_search(&&mv).is_err() {
            return Err(CgsError::IncompleteMoves {
                state: state.to_string(),
                mv: format_mv(actions, &mv),
            });
        }
        let mut agent = per_agent.len();
        loop {
            if agent == 0 {
                unreachable!("counts differ but every product vector is defined");
            }
            agent -= 1;
            idx[agent] += 1;
            if idx[agent] < per_agent[agent].len() {
                break;
            }
            idx[agent] = 0;
        }
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    pub const M1: &str = "\
AGENTS: 1
STATES: q0 q1
INITIAL: q0
ATOMS: p
LABEL q0:
LABEL q1: p
TRANS q0 (idle) q0
TRANS q0 (go) q1
TRANS q1 (idle) q1
";

    pub fn m1() -> super::Cgs {
        super::Cgs::parse(M1, super::ParseMode::Strict).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::{m1, M1};
    use super::*;

    #[test]
    fn m1_shape() {
        let m = m1();
        assert_eq!(m.num_states(), 2);
        assert_eq!(m.agents(), 1);
        assert_eq!(m.atoms(), ["p"]);
        assert_eq!(m.num_transitions(), 3);
        assert!(m.holds(1, 0));
        assert!(!m.holds(0, 0));
        assert!(m.is_deterministic());
    }

    #[test]
    fn successors_on_m1() {
        let m = m1();
        let go = m.move_vector(&["go"]).unwrap();
        let idle = m.move_vector(&["idle"]).unwrap();
        assert_eq!(m.successors(0, &go).unwrap(), &[1]);
        assert_eq!(m.successors(1, &idle).unwrap(), &[1]);
        let err = m.successors(1, &go).unwrap_err();
        assert!(err.to_string().contains("no transition"));
    }

    #[test]
    fn serialize_is_the_fixture() {
        assert_eq!(m1().serialize(), M1);
    }

    #[test]
    fn availability_derived_from_transitions() {
        let m = m1();
        let go = m.action_id("go").unwrap();
        let idle = m.idle().unwrap();
        assert!(m.is_available(0, 0, go));
        assert!(!m.is_available(1, 0, go));
        assert!(m.is_available(1, 0, idle));
        assert_eq!(m.agent_actions(0), vec![go, idle]);
    }

    #[test]
    fn adjacency_dump_lists_moves() {
        let dump = m1().adjacency_matrix();
        let lines: Vec<&str> = dump.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].contains("(idle)") && lines[1].contains("(go)"));
        assert!(lines[2].trim_start().starts_with("q1 -"));
    }

    #[test]
    fn incomplete_product_rejected() {
        let text = "AGENTS: 2\nSTATES: s\nINITIAL: s\nATOMS:\nLABEL s:\n\
                    TRANS s (idle, idle) s\nTRANS s (go, idle) s\nTRANS s (idle, go) s\n";
        let err = Cgs::parse(text, ParseMode::Strict).unwrap_err();
        assert!(matches!(err, CgsError::IncompleteMoves { .. }), "{err}");
    }
}
