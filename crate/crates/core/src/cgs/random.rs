use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Cgs, CgsError, CgsParts, MoveVector, ParseMode, ParseOptions, Transition, IDLE};

/// Dense models offer every action everywhere and send each move vector to
/// several targets; sparse models are deterministic with a random subset of
/// actions per state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Density {
    Dense,
    Sparse,
}

impl std::str::FromStr for Density {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dense" => Ok(Density::Dense),
            "sparse" => Ok(Density::Sparse),
            other => Err(format!("unknown density `{other}` (expected dense|sparse)")),
        }
    }
}

impl std::fmt::Display for Density {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Density::Dense => "dense",
            Density::Sparse => "sparse",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomCgsParams {
    pub states: usize,
    pub agents: usize,
    /// Includes `idle`; the others are named `a1`, `a2`, ...
    pub actions_per_agent: usize,
    pub density: Density,
    /// One atom `p<i>` per state `q<i>`; otherwise atoms `p`, `q` at random.
    pub unique_labels: bool,
    pub seed: u64,
}

pub fn generate_random_cgs(params: RandomCgsParams) -> Result<Cgs, CgsError> {
    let RandomCgsParams {
        states: n,
        agents,
        actions_per_agent,
        density,
        unique_labels,
        seed,
    } = params;
    if n == 0 || agents == 0 || actions_per_agent == 0 {
        return Err(CgsError::InvalidParameter(
            "states, agents and actions_per_agent must be at least 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let actions: Vec<String> = std::iter::once(IDLE.to_string())
        .chain((1..actions_per_agent).map(|i| format!("a{i}")))
        .collect();
    let states: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();

    let (atoms, labels) = if unique_labels {
        let atoms: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let labels = (0..n)
            .map(|i| {
                let mut l = FixedBitSet::with_capacity(n);
                l.insert(i);
                l
            })
            .collect();
        (atoms, labels)
    } else {
        let atoms = vec!["p".to_string(), "q".to_string()];
        let labels = (0..n)
            .map(|_| {
                let mut l = FixedBitSet::with_capacity(2);
                for a in 0..2 {
                    if rng.gen_bool(0.5) {
                        l.insert(a);
                    }
                }
                l
            })
            .collect();
        (atoms, labels)
    };

    let mut transitions = Vec::with_capacity(n);
    for _ in 0..n {
        let per_agent: Vec<Vec<usize>> = (0..agents)
            .map(|_| match density {
                Density::Dense => (0..actions_per_agent).collect(),
                Density::Sparse => std::iter::once(0)
                    .chain((1..actions_per_agent).filter(|_| rng.gen_bool(0.5)))
                    .collect(),
            })
            .collect();
        let mut outgoing = Vec::new();
        for mv in product(&per_agent) {
            let targets = match density {
                Density::Sparse => vec![rng.gen_range(0..n)],
                Density::Dense => {
                    let mut t: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
                    if t.is_empty() {
                        t.push(rng.gen_range(0..n));
                    }
                    t
                }
            };
            outgoing.push(Transition {
                mv: MoveVector(mv),
                targets,
            });
        }
        transitions.push(outgoing);
    }

    let mode = match density {
        Density::Sparse => ParseMode::Strict,
        Density::Dense => ParseMode::Lenient,
    };
    Cgs::from_parts(
        CgsParts {
            agents,
            states,
            initial: 0,
            atoms,
            labels,
            actions,
            transitions,
        },
        ParseOptions {
            mode,
            require_idle: true,
        },
    )
}

/// Cartesian product, first list varying slowest.
pub(crate) fn product(lists: &[Vec<usize>]) -> Vec<Vec<usize>> {
    lists.iter().fold(vec![Vec::new()], |acc, list| {
        acc.into_iter()
            .flat_map(|prefix| {
                list.iter().map(move |&x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect()
    })
}
