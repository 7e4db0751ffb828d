use fixedbitset::FixedBitSet;

use super::{Regex, StrategyError};

/// Boolean condition with atoms resolved to model indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum BoundBool {
    Top,
    Atom(usize),
    Not(Box<BoundBool>),
    And(Box<BoundBool>, Box<BoundBool>),
}

impl BoundBool {
    pub(crate) fn eval(&self, valuation: &FixedBitSet) -> bool {
        match self {
            BoundBool::Top => true,
            BoundBool::Atom(a) => valuation.contains(*a),
            BoundBool::Not(g) => !g.eval(valuation),
            BoundBool::And(a, b) => a.eval(valuation) && b.eval(valuation),
        }
    }
}

/// Position automaton of a regex: one position per letter occurrence.
/// A run state is the set of positions the last symbol was read at.
#[derive(Debug, Clone)]
pub(crate) struct Matcher {
    letters: Vec<BoundBool>,
    first: Vec<usize>,
    last: FixedBitSet,
    follow: Vec<Vec<usize>>,
    nullable: bool,
}

struct Glushkov {
    nullable: bool,
    first: Vec<usize>,
    last: Vec<usize>,
}

impl Matcher {
    pub(crate) fn new(regex: &Regex, atoms: &[String]) -> Result<Matcher, StrategyError> {
        let mut m = Matcher {
            letters: Vec::new(),
            first: Vec::new(),
            last: FixedBitSet::new(),
            follow: Vec::new(),
            nullable: false,
        };
        let g = m.build(regex, atoms)?;
        m.nullable = g.nullable;
        m.first = g.first;
        m.last = FixedBitSet::with_capacity(m.letters.len());
        for p in g.last {
            m.last.insert(p);
        }
        for f in &mut m.follow {
            f.sort_unstable();
            f.dedup();
        }
        Ok(m)
    }

    fn build(&mut self, r: &Regex, atoms: &[String]) -> Result<Glushkov, StrategyError> {
        Ok(match r {
            Regex::Letter(b) => {
                let p = self.letters.len();
                self.letters.push(b.bind(atoms)?);
                self.follow.push(Vec::new());
                Glushkov {
                    nullable: false,
                    first: vec![p],
                    last: vec![p],
                }
            }
            Regex::Concat(a, b) => {
                let a = self.build(a, atoms)?;
                let b = self.build(b, atoms)?;
                for &p in &a.last {
                    self.follow[p].extend(&b.first);
                }
                let mut first = a.first;
                if a.nullable {
                    first.extend(&b.first);
                }
                let mut last = b.last;
                if b.nullable {
                    last.extend(&a.last);
                }
                Glushkov {
                    nullable: a.nullable && b.nullable,
                    first,
                    last,
                }
            }
            Regex::Union(a, b) => {
                let mut a = self.build(a, atoms)?;
                let b = self.build(b, atoms)?;
                a.first.extend(b.first);
                a.last.extend(b.last);
                a.nullable |= b.nullable;
                a
            }
            Regex::Star(a) => {
                let a = self.build(a, atoms)?;
                for &p in &a.last {
                    self.follow[p].extend(&a.first);
                }
                Glushkov {
                    nullable: true,
                    ..a
                }
            }
        })
    }

    /// Reads one valuation; `None` is the state before any symbol.
    pub(crate) fn step(&self, state: Option<&FixedBitSet>, valuation: &FixedBitSet) -> FixedBitSet {
        let mut next = FixedBitSet::with_capacity(self.letters.len());
        let mut consider = |p: usize| {
            if !next.contains(p) && self.letters[p].eval(valuation) {
                next.insert(p);
            }
        };
        match state {
            None => self.first.iter().copied().for_each(&mut consider),
            Some(s) => s
                .ones()
                .flat_map(|p| self.follow[p].iter().copied())
                .for_each(&mut consider),
        }
        next
    }

    pub(crate) fn accepts(&self, state: &FixedBitSet) -> bool {
        !state.is_disjoint(&self.last)
    }

    pub(crate) fn matches(&self, history: &[FixedBitSet]) -> bool {
        let Some((head, rest)) = history.split_first() else {
            return self.nullable;
        };
        let mut state = self.step(None, head);
        for v in rest {
            if state.is_clear() {
                return false;
            }
            state = self.step(Some(&state), v);
        }
        self.accepts(&state)
    }
}

#[derive(Debug, Clone)]
pub(crate) enum BoundCondition {
    Bool(BoundBool),
    Regex(Matcher),
}

impl BoundCondition {
    /// Boolean conditions read the last valuation; regular ones the whole
    /// history, anchored at both ends.
    pub(crate) fn matches_history(&self, history: &[FixedBitSet]) -> bool {
        match self {
            BoundCondition::Bool(b) => history.last().is_some_and(|v| b.eval(v)),
            BoundCondition::Regex(m) => m.matches(history),
        }
    }
}
