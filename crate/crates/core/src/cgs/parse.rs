use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use super::{Cgs, CgsError, CgsParts, MoveVector, ParseMode, ParseOptions, Transition};

enum Directive<'a> {
    Agents(usize),
    States(Vec<&'a str>),
    Initial(&'a str),
    Atoms(Vec<&'a str>),
    Label(&'a str, Vec<&'a str>),
    Trans(&'a str, Vec<&'a str>, &'a str),
}

pub(super) fn parse_cgs(text: &str, options: ParseOptions) -> Result<Cgs, CgsError> {
    let mut directives = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        directives.push((line, parse_line(line, content)?));
    }

    let mut agents = None;
    let mut states = None;
    let mut initial = None;
    let mut atoms = None;
    for (line, d) in &directives {
        let dup = |name| CgsError::Syntax {
            line: *line,
            msg: format!("{name} declared twice"),
        };
        match d {
            Directive::Agents(n) => {
                if agents.replace(*n).is_some() {
                    return Err(dup("AGENTS"));
                }
            }
            Directive::States(s) => {
                if states.replace(s.clone()).is_some() {
                    return Err(dup("STATES"));
                }
            }
            Directive::Initial(q) => {
                if initial.replace((*line, *q)).is_some() {
                    return Err(dup("INITIAL"));
                }
            }
            Directive::Atoms(a) if atoms.replace(a.clone()).is_some() => {
                return Err(dup("ATOMS"));
            }
            _ => {}
        }
    }
    let agents = agents.ok_or(CgsError::MissingDirective("AGENTS"))?;
    if agents == 0 {
        return Err(CgsError::NoAgents);
    }
    let states = states.ok_or(CgsError::MissingDirective("STATES"))?;
    if states.is_empty() {
        return Err(CgsError::NoStates);
    }
    let atoms = atoms.unwrap_or_default();
    let state_ix: HashMap<&str, usize> = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let atom_ix: HashMap<&str, usize> = atoms.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    let lookup_state = |line: usize, name: &str| {
        state_ix
            .get(name)
            .copied()
            .ok_or_else(|| CgsError::UnknownState {
                line,
                name: name.to_string(),
            })
    };

    let initial = match initial {
        Some((line, q)) => lookup_state(line, q)?,
        None => return Err(CgsError::MissingDirective("INITIAL")),
    };

    let mut labels = vec![FixedBitSet::with_capacity(atoms.len()); states.len()];
    let mut labelled = vec![false; states.len()];
    let mut actions: Vec<String> = Vec::new();
    let mut action_ix: HashMap<String, usize> = HashMap::new();
    let mut transitions: Vec<Vec<Transition>> = vec![Vec::new(); states.len()];
    let mut slot: HashMap<(usize, MoveVector), usize> = HashMap::new();

    for (line, d) in &directives {
        let line = *line;
        match d {
            Directive::Label(q, props) => {
                let q = lookup_state(line, q)?;
                if std::mem::replace(&mut labelled[q], true) {
                    return Err(CgsError::Syntax {
                        line,
                        msg: format!("second LABEL line for `{}`", states[q]),
                    });
                }
                for p in props {
                    let a = atom_ix
                        .get(p)
                        .copied()
                        .ok_or_else(|| CgsError::UnknownAtom {
                            line,
                            name: p.to_string(),
                        })?;
                    labels[q].insert(a);
                }
            }
            Directive::Trans(src, acts, dst) => {
                let q = lookup_state(line, src)?;
                let target = lookup_state(line, dst)?;
                if acts.len() != agents {
                    return Err(CgsError::Arity {
                        line,
                        expected: agents,
                        found: acts.len(),
                    });
                }
                let mv = MoveVector(
                    acts.iter()
                        .map(|a| {
                            let next = actions.len();
                            *action_ix.entry(a.to_string()).or_insert_with(|| {
                                actions.push(a.to_string());
                                next
                            })
                        })
                        .collect(),
                );
                match slot.get(&(q, mv.clone())) {
                    Some(&i) => {
                        if options.mode == ParseMode::Strict {
                            return Err(CgsError::DuplicateTransition {
                                line,
                                state: states[q].to_string(),
                                mv: acts.join(", "),
                            });
                        }
                        let targets = &mut transitions[q][i].targets;
                        if !targets.contains(&target) {
                            targets.push(target);
                        }
                    }
                    None => {
                        slot.insert((q, mv.clone()), transitions[q].len());
                        transitions[q].push(Transition {
                            mv,
                            targets: vec![target],
                        });
                    }
                }
            }
            _ => {}
        }
    }

    Cgs::from_parts(
        CgsParts {
            agents,
            states: states.iter().map(|s| s.to_string()).collect(),
            initial,
            atoms: atoms.iter().map(|a| a.to_string()).collect(),
            labels,
            actions,
            transitions,
        },
        options,
    )
}

fn parse_line(line: usize, content: &str) -> Result<Directive<'_>, CgsError> {
    let syntax = |msg: String| CgsError::Syntax { line, msg };
    let (keyword, rest) = match content.split_once(char::is_whitespace) {
        Some((k, r)) => (k, r.trim()),
        None => (content, ""),
    };
    match keyword {
        "AGENTS:" => rest
            .parse()
            .map(Directive::Agents)
            .map_err(|_| syntax(format!("AGENTS expects a number, got `{rest}`"))),
        "STATES:" => Ok(Directive::States(identifiers(line, rest)?)),
        "INITIAL:" => {
            let ids = identifiers(line, rest)?;
            match ids.as_slice() {
                [q] => Ok(Directive::Initial(q)),
                _ => Err(syntax("INITIAL expects exactly one state".into())),
            }
        }
        "ATOMS:" => Ok(Directive::Atoms(identifiers(line, rest)?)),
        "LABEL" => {
            let (state, props) = rest
                .split_once(':')
                .ok_or_else(|| syntax("LABEL expects `LABEL <state>: <atoms>`".into()))?;
            let state = state.trim();
            check_ident(line, state)?;
            Ok(Directive::Label(state, identifiers(line, props)?))
        }
        "TRANS" => {
            let open = rest
                .find('(')
                .ok_or_else(|| syntax("TRANS expects `TRANS <src> (<actions>) <dst>`".into()))?;
            let close = rest[open..]
                .find(')')
                .map(|c| c + open)
                .ok_or_else(|| syntax("unclosed move vector".into()))?;
            let src = rest[..open].trim();
            check_ident(line, src)?;
            let acts: Vec<&str> = rest[open + 1..close].split(',').map(str::trim).collect();
            for a in &acts {
                check_ident(line, a)?;
            }
            let dst = rest[close + 1..].trim();
            check_ident(line, dst)?;
            Ok(Directive::Trans(src, acts, dst))
        }
        other => Err(syntax(format!("unknown directive `{other}`"))),
    }
}

fn identifiers(line: usize, text: &str) -> Result<Vec<&str>, CgsError> {
    let ids: Vec<&str> = text.split_whitespace().collect();
    for id in &ids {
        check_ident(line, id)?;
    }
    Ok(ids)
}

fn check_ident(line: usize, id: &str) -> Result<(), CgsError> {
    let mut chars = id.chars();
    let ok = matches!(chars.next(), Some(c) if c.is_ascii_alphanumeric() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
    if ok {
        Ok(())
    } else {
        Err(CgsError::Syntax {
            line,
            msg: format!("invalid identifier `{id}`"),
        })
    }
}
