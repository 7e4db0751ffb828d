use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use super::{BoolExpr, CollectiveStrategy, Condition, NaturalStrategy, Regex, Rule, StrategyKind};
use crate::cgs::Cgs;

/// Conditions the generator draws rules from, sorted by (cost, text).
///
/// Memoryless: consistent conjunctions of literals, each atom at most once,
/// in atom order. Recall: the memoryless conditions plus concatenations of
/// `[l]` and `[l]*` items over single literals `l`.
pub fn generator_conditions(atoms: &[String], kind: StrategyKind, max_cost: u32) -> Vec<Condition> {
    let mut out: Vec<(u32, String, Condition)> = Vec::new();
    let mut push = |c: Condition| {
        out.push((c.complexity(), c.to_string(), c));
    };
    let mut lits = Vec::new();
    conjunctions(atoms, 0, &mut lits, 0, max_cost, &mut |c| {
        push(Condition::Bool(c))
    });
    if kind == StrategyKind::Recall {
        let literals: Vec<BoolExpr> = atoms
            .iter()
            .flat_map(|a| [BoolExpr::literal(a, true), BoolExpr::literal(a, false)])
            .collect();
        let mut items = Vec::new();
        concatenations(&literals, &mut items, max_cost, &mut |r| {
            push(Condition::Regex(r))
        });
    }
    out.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    out.into_iter().map(|(_, _, c)| c).collect()
}

fn conjunctions(
    atoms: &[String],
    from: usize,
    lits: &mut Vec<BoolExpr>,
    cost: u32,
    max_cost: u32,
    emit: &mut impl FnMut(BoolExpr),
) {
    for (i, atom) in atoms.iter().enumerate().skip(from) {
        for positive in [true, false] {
            let lit = BoolExpr::literal(atom, positive);
            let added = lit.complexity() + u32::from(!lits.is_empty());
            if cost + added > max_cost {
                continue;
            }
            lits.push(lit);
            emit(BoolExpr::conjunction(lits.iter().cloned()));
            conjunctions(atoms, i + 1, lits, cost + added, max_cost, emit);
            lits.pop();
        }
    }
}

fn concatenations(
    literals: &[BoolExpr],
    items: &mut Vec<Regex>,
    budget: u32,
    emit: &mut impl FnMut(Regex),
) {
    for lit in literals {
        for starred in [false, true] {
            let mut item = Regex::letter(lit.clone());
            if starred {
                item = Regex::star(item);
            }
            let cost = item.complexity() + u32::from(!items.is_empty());
            if cost > budget {
                continue;
            }
            items.push(item);
            let regex = items
                .iter()
                .cloned()
                .reduce(Regex::concat)
                .expect("non-empty");
            emit(regex);
            concatenations(literals, items, budget - cost, emit);
            items.pop();
        }
    }
}

/// Per-agent strategies grouped by exact complexity, restartable.
trait AgentSource: Send + Sync {
    fn exact(self: Arc<Self>, cost: u32) -> Box<dyn Iterator<Item = NaturalStrategy> + Send>;
}

struct Exhaustive {
    agent: usize,
    conditions: Vec<Condition>,
    costs: Vec<u32>,
    actions: Vec<String>,
}

impl AgentSource for Exhaustive {
    fn exact(self: Arc<Self>, cost: u32) -> Box<dyn Iterator<Item = NaturalStrategy> + Send> {
        let used = vec![false; self.conditions.len()];
        Box::new(ExactCost {
            source: self,
            target: cost,
            stack: Vec::new(),
            used,
            started: false,
        })
    }
}

/// Depth-first enumeration of rule lists of one exact complexity. Each frame
/// holds its remaining budget and a choice: `j < |actions|` closes the list
/// with `(⊤, actions[j])`, larger `j` adds a rule (condition, action).
/// Choices are tried in increasing `j`, which is the canonical order.
struct ExactCost {
    source: Arc<Exhaustive>,
    target: u32,
    stack: Vec<(u32, usize)>,
    used: Vec<bool>,
    started: bool,
}

impl ExactCost {
    fn valid_from(&self, budget: u32, from: usize) -> Option<usize> {
        let na = self.source.actions.len();
        if na == 0 {
            return None;
        }
        if budget == 1 {
            return (from < na).then_some(from);
        }
        let mut j = from.max(na);
        loop {
            let ci = (j - na) / na;
            if ci >= self.source.costs.len() || self.source.costs[ci] > budget - 1 {
                return None;
            }
            if self.used[ci] {
                j = na + (ci + 1) * na;
                continue;
            }
            return Some(j);
        }
    }

    fn rule_of(&self, j: usize) -> Option<usize> {
        let na = self.source.actions.len();
        (j >= na).then(|| (j - na) / na)
    }

    fn push(&mut self, budget: u32, j: usize) {
        if let Some(ci) = self.rule_of(j) {
            self.used[ci] = true;
        }
        self.stack.push((budget, j));
    }

    /// Moves to the next sibling of the deepest frame that has one.
    fn advance(&mut self) -> bool {
        while let Some((budget, j)) = self.stack.pop() {
            if let Some(ci) = self.rule_of(j) {
                self.used[ci] = false;
            }
            if let Some(next) = self.valid_from(budget, j + 1) {
                self.push(budget, next);
                return true;
            }
        }
        false
    }

    fn build(&self) -> NaturalStrategy {
        let na = self.source.actions.len();
        let rules = self
            .stack
            .iter()
            .map(|&(_, j)| match self.rule_of(j) {
                Some(ci) => Rule::new(
                    self.source.conditions[ci].clone(),
                    &self.source.actions[(j - na) % na],
                ),
                None => Rule::new(Condition::top(), &self.source.actions[j]),
            })
            .collect();
        NaturalStrategy::new(self.source.agent, rules)
    }
}

impl Iterator for ExactCost {
    type Item = NaturalStrategy;

    fn next(&mut self) -> Option<NaturalStrategy> {
        if !self.started {
            self.started = true;
            if self.target == 0 {
                return None;
            }
            let first = self.valid_from(self.target, 0)?;
            self.push(self.target, first);
        } else if !self.advance() {
            return None;
        }
        loop {
            let &(budget, j) = self.stack.last().expect("non-empty while searching");
            let Some(ci) = self.rule_of(j) else {
                return Some(self.build());
            };
            let rest = budget - self.source.costs[ci];
            match self.valid_from(rest, 0) {
                Some(first) => self.push(rest, first),
                None => {
                    if !self.advance() {
                        return None;
                    }
                }
            }
        }
    }
}

/// Cheapest representative of every memoryless behaviour, grouped by cost.
struct Materialized {
    by_cost: Vec<Vec<NaturalStrategy>>,
}

impl AgentSource for Materialized {
    fn exact(self: Arc<Self>, cost: u32) -> Box<dyn Iterator<Item = NaturalStrategy> + Send> {
        let n = self.by_cost.get(cost as usize).map_or(0, Vec::len);
        Box::new((0..n).map(move |i| self.by_cost[cost as usize][i].clone()))
    }
}

/// Distinct valuations of the model's states, in order of first occurrence.
fn valuation_classes(cgs: &Cgs) -> Vec<FixedBitSet> {
    let mut seen = HashSet::new();
    cgs.labels()
        .iter()
        .filter(|l| seen.insert((*l).clone()))
        .cloned()
        .collect()
}

type Path = Vec<(usize, usize)>;

/// (cost, rules so far, closed by `⊤`, action per class with 0 unset)
type SearchNode = (u32, Path, bool, Vec<u8>);

/// Uniform-cost search over partial maps from valuation classes to actions.
/// A rule extends the map on the classes its condition holds on that no
/// earlier rule covers; the closing `⊤` rule fills the rest. Ties are broken
/// by the rule sequence, with `⊤` coded as condition 0, so each behaviour
/// comes out with the same representative that appears first in the
/// exhaustive stream.
fn reduced_source(cgs: &Cgs, agent: usize, budget: u32) -> Materialized {
    let atoms = cgs.atoms();
    let actions: Vec<String> = cgs
        .agent_actions(agent)
        .into_iter()
        .map(|a| cgs.action_name(a).to_string())
        .collect();
    let classes = valuation_classes(cgs);
    let conditions = generator_conditions(atoms, StrategyKind::Nr, budget.saturating_sub(1));
    let mut seen_ext = HashSet::new();
    let useful: Vec<(usize, u32, Vec<usize>)> = conditions
        .iter()
        .enumerate()
        .filter_map(|(i, c)| {
            let bound = c.bind(atoms).expect("generated from model atoms");
            let ext: Vec<usize> = (0..classes.len())
                .filter(|&k| bound.matches_history(std::slice::from_ref(&classes[k])))
                .collect();
            (!ext.is_empty() && seen_ext.insert(ext.clone())).then(|| (i, c.complexity(), ext))
        })
        .collect();

    let mut by_cost = vec![Vec::new(); budget as usize + 1];
    let mut heap: BinaryHeap<Reverse<SearchNode>> = BinaryHeap::new();
    let mut visited: HashSet<(bool, Vec<u8>)> = HashSet::new();
    heap.push(Reverse((0, Vec::new(), false, vec![0; classes.len()])));
    while let Some(Reverse((cost, path, closed, map))) = heap.pop() {
        if !visited.insert((closed, map.clone())) {
            continue;
        }
        if closed {
            let rules = path
                .iter()
                .map(|&(code, a)| {
                    let cond = match code {
                        0 => Condition::top(),
                        c => conditions[c - 1].clone(),
                    };
                    Rule::new(cond, &actions[a])
                })
                .collect();
            by_cost[cost as usize].push(NaturalStrategy::new(agent, rules));
            continue;
        }
        if cost < budget {
            for a in 0..actions.len() {
                let filled: Vec<u8> = map
                    .iter()
                    .map(|&m| if m == 0 { a as u8 + 1 } else { m })
                    .collect();
                let mut p = path.clone();
                p.push((0, a));
                heap.push(Reverse((cost + 1, p, true, filled)));
            }
        }
        for (i, c, ext) in &useful {
            if cost + c + 1 > budget {
                break;
            }
            if ext.iter().all(|&k| map[k] != 0) {
                continue;
            }
            for a in 0..actions.len() {
                let mut next = map.clone();
                for &k in ext {
                    if next[k] == 0 {
                        next[k] = a as u8 + 1;
                    }
                }
                let mut p = path.clone();
                p.push((i + 1, a));
                heap.push(Reverse((cost + c, p, false, next)));
            }
        }
    }
    Materialized { by_cost }
}

/// Collective candidates in nondecreasing total complexity. Within a total,
/// per-agent budgets run through compositions in lexicographic order and
/// member strategies through an odometer (last agent fastest).
pub struct CandidateStream {
    sources: Vec<Arc<dyn AgentSource>>,
    k: u32,
    total: u32,
    compositions: Vec<Vec<u32>>,
    next_composition: usize,
    active: Option<Active>,
}

struct Active {
    parts: Vec<u32>,
    iters: Vec<Box<dyn Iterator<Item = NaturalStrategy> + Send>>,
    current: Vec<NaturalStrategy>,
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    fn rec(total: u32, parts: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 1..=total.saturating_sub(parts as u32 - 1) {
            prefix.push(first);
            rec(total - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 && total as usize >= parts {
        rec(total, parts, &mut Vec::new(), &mut out);
    }
    out
}

impl CandidateStream {
    fn new(sources: Vec<Arc<dyn AgentSource>>, k: u32) -> CandidateStream {
        let start = sources.len() as u32;
        CandidateStream {
            k,
            total: start,
            compositions: if start <= k {
                compositions(start, sources.len())
            } else {
                Vec::new()
            },
            next_composition: 0,
            sources,
            active: None,
        }
    }

    fn emit(&self) -> CollectiveStrategy {
        let members = self.active.as_ref().expect("active").current.clone();
        CollectiveStrategy { members }
    }

    /// Starts the next composition that has a candidate in every slot.
    fn open_next(&mut self) -> bool {
        loop {
            while self.next_composition >= self.compositions.len() {
                self.total += 1;
                if self.total > self.k || self.sources.is_empty() {
                    return false;
                }
                self.compositions = compositions(self.total, self.sources.len());
                self.next_composition = 0;
            }
            let parts = self.compositions[self.next_composition].clone();
            self.next_composition += 1;
            let mut iters = Vec::new();
            let mut current = Vec::new();
            let mut ok = true;
            for (src, &c) in self.sources.iter().zip(&parts) {
                let mut it = Arc::clone(src).exact(c);
                match it.next() {
                    Some(s) => {
                        current.push(s);
                        iters.push(it);
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                self.active = Some(Active {
                    parts,
                    iters,
                    current,
                });
                return true;
            }
        }
    }

    fn step_active(&mut self) -> bool {
        let Some(active) = self.active.as_mut() else {
            return false;
        };
        let m = active.iters.len();
        for i in (0..m).rev() {
            if let Some(s) = active.iters[i].next() {
                active.current[i] = s;
                for j in i + 1..m {
                    let mut it = Arc::clone(&self.sources[j]).exact(active.parts[j]);
                    active.current[j] = it.next().expect("slot known non-empty");
                    active.iters[j] = it;
                }
                return true;
            }
        }
        self.active = None;
        false
    }
}

impl Iterator for CandidateStream {
    type Item = CollectiveStrategy;

    fn next(&mut self) -> Option<CollectiveStrategy> {
        if self.step_active() || self.open_next() {
            Some(self.emit())
        } else {
            None
        }
    }
}

fn agent_actions(cgs: &Cgs, agent: usize) -> Vec<String> {
    cgs.agent_actions(agent)
        .into_iter()
        .map(|a| cgs.action_name(a).to_string())
        .collect()
}

/// Every normalized collective strategy of complexity `≤ k` over the
/// generator's condition language, each once, cheapest first.
/// `coalition` holds 0-based agents.
pub fn generate_strategies(
    cgs: &Cgs,
    coalition: &[usize],
    k: u32,
    kind: StrategyKind,
) -> CandidateStream {
    let mut agents = coalition.to_vec();
    agents.sort_unstable();
    agents.dedup();
    let max_rule = k.saturating_sub(agents.len() as u32);
    let conditions = generator_conditions(cgs.atoms(), kind, max_rule);
    let costs: Vec<u32> = conditions.iter().map(Condition::complexity).collect();
    let sources = agents
        .iter()
        .map(|&agent| {
            Arc::new(Exhaustive {
                agent,
                conditions: conditions.clone(),
                costs: costs.clone(),
                actions: agent_actions(cgs, agent),
            }) as Arc<dyn AgentSource>
        })
        .collect();
    CandidateStream::new(sources, k)
}

/// The memoryless stream restricted to the first strategy of each distinct
/// behaviour (map from state valuation to fired actions) on this model.
/// Order and representatives coincide with [`generate_strategies`], so the
/// first winner is the same; far fewer candidates are produced.
pub fn behaviour_reduced_strategies(cgs: &Cgs, coalition: &[usize], k: u32) -> CandidateStream {
    let mut agents = coalition.to_vec();
    agents.sort_unstable();
    agents.dedup();
    let budget = (k + 1).saturating_sub(agents.len() as u32);
    let sources = agents
        .iter()
        .map(|&agent| Arc::new(reduced_source(cgs, agent, budget)) as Arc<dyn AgentSource>)
        .collect();
    CandidateStream::new(sources, k)
}
