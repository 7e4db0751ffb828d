//! Reference implementations used as oracles: definitional CTL evaluation
//! and brute-force enumeration of memoryless strategies.

#![allow(dead_code)]

use std::collections::BTreeSet;

use natamc::cgs::{generate_random_cgs, Density, RandomCgsParams};
use natamc::logic::Coalition;
use natamc::{Cgs, CollectiveStrategy, Formula, PathFormula};
use rand::seq::SliceRandom;
use rand::Rng;

/// Explicit successor lists with atom-name labels.
#[derive(Debug, Clone)]
pub struct Rel {
    pub initial: usize,
    pub succ: Vec<Vec<usize>>,
    pub labels: Vec<BTreeSet<String>>,
}

impl Rel {
    pub fn from_cgs(cgs: &Cgs) -> Rel {
        Rel::with_moves(cgs, |_, _| true)
    }

    /// Keeps the transitions `keep(state, move names)` accepts.
    pub fn with_moves(cgs: &Cgs, keep: impl Fn(usize, &[&str]) -> bool) -> Rel {
        let n = cgs.num_states();
        let mut succ = vec![Vec::new(); n];
        for (q, out) in succ.iter_mut().enumerate() {
            for t in cgs.transitions(q) {
                let names: Vec<&str> = t.mv.actions().iter().map(|&a| cgs.action_name(a)).collect();
                if keep(q, &names) {
                    out.extend(&t.targets);
                }
            }
            out.sort_unstable();
            out.dedup();
        }
        let labels = (0..n)
            .map(|q| {
                cgs.label(q)
                    .ones()
                    .map(|a| cgs.atoms()[a].clone())
                    .collect()
            })
            .collect();
        Rel {
            initial: cgs.initial(),
            succ,
            labels,
        }
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }
}

/// CTL by recursion on (state, steps left), memoized. On a total relation
/// over n states, looking n+1 states deep decides U and G: a longer path
/// repeats a state.
pub fn ctl_oracle(rel: &Rel, f: &Formula) -> Vec<bool> {
    let n = rel.len();
    match f {
        Formula::True => vec![true; n],
        Formula::Atom(a) => rel.labels.iter().map(|l| l.contains(a)).collect(),
        Formula::Not(g) => ctl_oracle(rel, g).into_iter().map(|b| !b).collect(),
        Formula::And(a, b) => zip(ctl_oracle(rel, a), ctl_oracle(rel, b), |x, y| x && y),
        Formula::Or(a, b) => zip(ctl_oracle(rel, a), ctl_oracle(rel, b), |x, y| x || y),
        Formula::All(p) => path_oracle(rel, p, true),
        Formula::Exists(p) => path_oracle(rel, p, false),
        other => panic!("not CTL: {other}"),
    }
}

fn zip(a: Vec<bool>, b: Vec<bool>, f: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect()
}

fn path_oracle(rel: &Rel, p: &PathFormula, universal: bool) -> Vec<bool> {
    let n = rel.len();
    let quant = |q: usize, f: &mut dyn FnMut(usize) -> bool| {
        if universal {
            rel.succ[q].iter().all(|&s| f(s))
        } else {
            rel.succ[q].iter().any(|&s| f(s))
        }
    };
    match p {
        PathFormula::Next(g) => {
            let s = ctl_oracle(rel, g);
            (0..n).map(|q| quant(q, &mut |t| s[t])).collect()
        }
        PathFormula::Until(a, b) => {
            let (sa, sb) = (ctl_oracle(rel, a), ctl_oracle(rel, b));
            // ok[d][q]: the until is met within the d states starting at q.
            let mut ok = vec![vec![false; n]; n + 2];
            for d in 1..=n + 1 {
                for q in 0..n {
                    let prev = &ok[d - 1];
                    let v = sb[q] || (sa[q] && d > 1 && quant(q, &mut |t| prev[t]));
                    ok[d][q] = v;
                }
            }
            ok[n + 1].clone()
        }
        PathFormula::Globally(g) => {
            let s = ctl_oracle(rel, g);
            // ok[d][q]: the first d states from q satisfy g.
            let mut ok = vec![vec![true; n]; n + 2];
            for d in 1..=n + 1 {
                for q in 0..n {
                    let prev = &ok[d - 1];
                    let v = s[q] && (d == 1 || quant(q, &mut |t| prev[t]));
                    ok[d][q] = v;
                }
            }
            ok[n + 1].clone()
        }
    }
}

pub fn random_model(rng: &mut impl Rng, max_states: usize, unique_labels: bool) -> Cgs {
    generate_random_cgs(RandomCgsParams {
        states: rng.gen_range(1..=max_states),
        agents: rng.gen_range(1..=2),
        actions_per_agent: rng.gen_range(1..=3),
        density: if rng.gen_bool(0.5) {
            Density::Dense
        } else {
            Density::Sparse
        },
        unique_labels,
        seed: rng.gen(),
    })
    .unwrap()
}

pub fn random_ctl(rng: &mut impl Rng, depth: usize, atoms: &[&str]) -> Formula {
    if depth == 0 || rng.gen_bool(0.2) {
        return if rng.gen_bool(0.1) {
            Formula::True
        } else {
            Formula::atom(*atoms.choose(rng).unwrap())
        };
    }
    let sub = |rng: &mut _| random_ctl(rng, depth - 1, atoms);
    match rng.gen_range(0..12) {
        0 => Formula::not(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        2 => Formula::or(sub(rng), sub(rng)),
        3 => Formula::all(PathFormula::Next(sub(rng))),
        4 => Formula::exists(PathFormula::Next(sub(rng))),
        5 => Formula::all(PathFormula::Until(sub(rng), sub(rng))),
        6 => Formula::exists(PathFormula::Until(sub(rng), sub(rng))),
        7 => Formula::all(PathFormula::Globally(sub(rng))),
        8 => Formula::exists(PathFormula::Globally(sub(rng))),
        9 => Formula::all(PathFormula::eventually(sub(rng))),
        10 => Formula::exists(PathFormula::eventually(sub(rng))),
        _ => Formula::not(Formula::and(sub(rng), sub(rng))),
    }
}

/// A conjunction of (atom, polarity) literals; empty means `top`.
pub type Conj = Vec<(String, bool)>;

pub fn conj_text(c: &Conj) -> String {
    if c.is_empty() {
        return "top".into();
    }
    c.iter()
        .map(|(a, pos)| if *pos { a.clone() } else { format!("!{a}") })
        .collect::<Vec<_>>()
        .join(" & ")
}

pub fn conj_cost(c: &Conj) -> u32 {
    if c.is_empty() {
        return 1;
    }
    let negs = c.iter().filter(|(_, p)| !p).count() as u32;
    2 * c.len() as u32 - 1 + negs
}

fn conj_holds(c: &Conj, label: &BTreeSet<String>) -> bool {
    c.iter().all(|(a, pos)| label.contains(a) == *pos)
}

/// Every non-empty conjunction with each atom at most once, atoms in order.
pub fn all_conjunctions(atoms: &[String]) -> Vec<Conj> {
    let mut out = Vec::new();
    for code in 1..3usize.pow(atoms.len() as u32) {
        let mut c = Vec::new();
        let mut x = code;
        for a in atoms {
            match x % 3 {
                1 => c.push((a.clone(), true)),
                2 => c.push((a.clone(), false)),
                _ => {}
            }
            x /= 3;
        }
        out.push(c);
    }
    out
}

/// Member rules; the last one has an empty (top) condition.
#[derive(Debug, Clone)]
pub struct BruteStrategy {
    pub members: Vec<(usize, Vec<(Conj, String)>)>,
}

impl BruteStrategy {
    pub fn cost(&self) -> u32 {
        self.members
            .iter()
            .flat_map(|(_, rules)| rules.iter().map(|(c, _)| conj_cost(c)))
            .sum()
    }

    pub fn lines(&self) -> Vec<String> {
        self.members
            .iter()
            .map(|(agent, rules)| {
                let body: Vec<String> = rules
                    .iter()
                    .map(|(c, a)| format!("({}, {a})", conj_text(c)))
                    .collect();
                format!("agent {}: {}", agent + 1, body.join("; "))
            })
            .collect()
    }

    pub fn fired(&self, member: usize, label: &BTreeSet<String>) -> &str {
        let (_, rules) = &self.members[member];
        &rules.iter().find(|(c, _)| conj_holds(c, label)).unwrap().1
    }
}

fn agent_actions(cgs: &Cgs, agent: usize) -> Vec<String> {
    let mut names: Vec<String> = (0..cgs.num_states())
        .flat_map(|q| {
            cgs.available(q, agent)
                .iter()
                .map(|&a| cgs.action_name(a).to_string())
        })
        .collect();
    names.sort();
    names.dedup();
    names
}

/// Every strategy of one agent with cost at most `budget`: distinct
/// non-top conditions, then a top rule.
fn agent_strategies(conds: &[Conj], actions: &[String], budget: u32) -> Vec<Vec<(Conj, String)>> {
    fn rec(
        conds: &[Conj],
        actions: &[String],
        budget: u32,
        prefix: &mut Vec<(Conj, String)>,
        cost: u32,
        out: &mut Vec<Vec<(Conj, String)>>,
    ) {
        if cost < budget {
            for a in actions {
                let mut s = prefix.clone();
                s.push((Vec::new(), a.clone()));
                out.push(s);
            }
        }
        for c in conds {
            if prefix.iter().any(|(d, _)| d == c) || cost + conj_cost(c) + 1 > budget {
                continue;
            }
            for a in actions {
                prefix.push((c.clone(), a.clone()));
                rec(conds, actions, budget, prefix, cost + conj_cost(c), out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(conds, actions, budget, &mut Vec::new(), 0, &mut out);
    out
}

pub fn brute_strategies(cgs: &Cgs, coalition: &Coalition, k: u32) -> Vec<BruteStrategy> {
    let conds = all_conjunctions(cgs.atoms());
    let mut partial: Vec<BruteStrategy> = vec![BruteStrategy {
        members: Vec::new(),
    }];
    for &agent in coalition.members() {
        let options = agent_strategies(&conds, &agent_actions(cgs, agent), k);
        let mut next = Vec::new();
        for p in &partial {
            for o in &options {
                let mut s = p.clone();
                s.members.push((agent, o.clone()));
                next.push(s);
            }
        }
        partial = next;
    }
    partial.retain(|s| s.cost() <= k);
    partial
}

/// Validity, projection and the CTL check, from the definitions.
pub fn brute_wins(cgs: &Cgs, s: &BruteStrategy, ctl: &Formula) -> bool {
    let full = Rel::from_cgs(cgs);
    for q in 0..cgs.num_states() {
        for (i, (agent, _)) in s.members.iter().enumerate() {
            let act = s.fired(i, &full.labels[q]);
            let available = cgs
                .available(q, *agent)
                .iter()
                .any(|&a| cgs.action_name(a) == act);
            if !available {
                return false;
            }
        }
    }
    let rel = Rel::with_moves(cgs, |q, names| {
        s.members
            .iter()
            .enumerate()
            .all(|(i, (agent, _))| names[*agent] == s.fired(i, &full.labels[q]))
    });
    ctl_oracle(&rel, ctl)[rel.initial]
}

pub fn brute_min(cgs: &Cgs, coalition: &Coalition, k: u32, ctl: &Formula) -> Option<u32> {
    brute_strategies(cgs, coalition, k)
        .iter()
        .filter(|s| brute_wins(cgs, s, ctl))
        .map(BruteStrategy::cost)
        .min()
}

/// Reads a printed nr witness back into the oracle's representation.
pub fn to_brute(w: &CollectiveStrategy) -> BruteStrategy {
    let members = w
        .lines()
        .iter()
        .map(|line| {
            let (head, body) = line.split_once(": ").unwrap();
            let agent: usize = head.trim_start_matches("agent ").parse().unwrap();
            let rules = body
                .split("; ")
                .map(|r| {
                    let (c, a) = r
                        .trim_start_matches('(')
                        .trim_end_matches(')')
                        .rsplit_once(", ")
                        .unwrap();
                    let conj = if c == "top" {
                        Vec::new()
                    } else {
                        c.split(" & ")
                            .map(|l| match l.strip_prefix('!') {
                                Some(a) => (a.to_string(), false),
                                None => (l.to_string(), true),
                            })
                            .collect()
                    };
                    (conj, a.to_string())
                })
                .collect();
            (agent - 1, rules)
        })
        .collect();
    BruteStrategy { members }
}
