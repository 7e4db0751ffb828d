mod common;

use std::collections::HashSet;

use common::*;
use natamc::logic::Coalition;
use natamc::mc::{model_checking, Kripke};
use natamc::prune::{build_tree, prune_model_nr, prune_tree, validate_strategy_nr, Validity};
use natamc::strategy::{behaviour_reduced_strategies, generate_strategies};
use natamc::{Cgs, CollectiveStrategy, Formula, ParseMode, PathFormula, StrategyKind};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn model(seed: u64, max_states: usize) -> Cgs {
    random_model(&mut ChaCha8Rng::seed_from_u64(seed), max_states, false)
}

fn coalition_of(cgs: &Cgs, pick: u8) -> Coalition {
    let members: Vec<usize> = (0..cgs.agents()).filter(|a| pick & (1 << a) != 0).collect();
    if members.is_empty() {
        Coalition::new(vec![0])
    } else {
        Coalition::new(members)
    }
}

fn lines(s: &CollectiveStrategy) -> String {
    s.lines().join("\n")
}

/// Fired action names per state and member, from the oracle's reading.
fn behaviour(cgs: &Cgs, s: &CollectiveStrategy) -> Vec<String> {
    let b = to_brute(s);
    let rel = Rel::from_cgs(cgs);
    (0..cgs.num_states())
        .flat_map(|q| {
            (0..b.members.len())
                .map(|i| b.fired(i, &rel.labels[q]).to_string())
                .collect::<Vec<_>>()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generator_matches_enumeration(seed in any::<u64>(), pick in 1u8..4, k in 0u32..=4) {
        let cgs = model(seed, 3);
        let coalition = coalition_of(&cgs, pick);
        let stream: Vec<CollectiveStrategy> =
            generate_strategies(&cgs, coalition.members(), k, StrategyKind::Nr).collect();
        let costs: Vec<u32> = stream.iter().map(CollectiveStrategy::complexity).collect();
        prop_assert!(costs.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(costs.iter().all(|&c| c <= k));
        let got: Vec<String> = stream.iter().map(lines).collect();
        let unique: HashSet<&String> = got.iter().collect();
        prop_assert_eq!(unique.len(), got.len());
        let expected: HashSet<String> = brute_strategies(&cgs, &coalition, k)
            .iter()
            .map(|s| s.lines().join("\n"))
            .collect();
        prop_assert_eq!(unique, expected.iter().collect());
    }

    #[test]
    fn stream_is_prefix_stable(seed in any::<u64>(), pick in 1u8..4, k in 1u32..=4) {
        let cgs = model(seed, 3);
        let members = coalition_of(&cgs, pick).members().to_vec();
        for kind in [StrategyKind::Nr, StrategyKind::Recall] {
            let a: Vec<String> = generate_strategies(&cgs, &members, k, kind).map(|s| lines(&s)).collect();
            let b: Vec<String> = generate_strategies(&cgs, &members, k + 1, kind).map(|s| lines(&s)).collect();
            prop_assert_eq!(&b[..a.len()], &a[..]);
        }
    }

    #[test]
    fn reduced_stream_keeps_first_of_each_behaviour(seed in any::<u64>(), pick in 1u8..4, k in 1u32..=5) {
        let cgs = model(seed, 4);
        let members = coalition_of(&cgs, pick).members().to_vec();
        let mut seen = HashSet::new();
        let expected: Vec<String> = generate_strategies(&cgs, &members, k, StrategyKind::Nr)
            .filter(|s| seen.insert(behaviour(&cgs, s)))
            .map(|s| lines(&s))
            .collect();
        let got: Vec<String> =
            behaviour_reduced_strategies(&cgs, &members, k).map(|s| lines(&s)).collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn nr_pruning_matches_definition(seed in any::<u64>(), pick in 1u8..4, nth in 0usize..200) {
        let cgs = model(seed, 5);
        let coalition = coalition_of(&cgs, pick);
        let all: Vec<CollectiveStrategy> =
            generate_strategies(&cgs, coalition.members(), 4, StrategyKind::Nr).collect();
        let s = &all[nth % all.len()];
        let b = to_brute(s);
        let valid = brute_wins(&cgs, &b, &Formula::True);
        let verdict = validate_strategy_nr(&cgs, s).unwrap();
        prop_assert_eq!(valid, verdict == Validity::Valid);
        if valid {
            let pruned = prune_model_nr(&cgs, s).unwrap();
            let kripke = pruned.kripke().unwrap();
            let labels = Rel::from_cgs(&cgs).labels;
            let rel = Rel::with_moves(&cgs, |q, names| {
                b.members
                    .iter()
                    .enumerate()
                    .all(|(i, (agent, _))| names[*agent] == b.fired(i, &labels[q]))
            });
            for q in 0..cgs.num_states() {
                prop_assert_eq!(kripke.successors(q), &rel.succ[q][..]);
                prop_assert!(!rel.succ[q].is_empty());
            }
            let projected = pruned.to_cgs().unwrap();
            let again = prune_model_nr(&projected, s).unwrap();
            prop_assert_eq!(again.num_kept(), pruned.num_kept());
        }
    }

    #[test]
    fn serialization_round_trips(seed in any::<u64>()) {
        let cgs = model(seed, 6);
        let mode = if cgs.is_deterministic() { ParseMode::Strict } else { ParseMode::Lenient };
        let text = cgs.serialize();
        let back = Cgs::parse(&text, mode).unwrap();
        prop_assert_eq!(back.serialize(), text);
    }

    #[test]
    fn ctl_matches_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cgs = random_model(&mut rng, 6, false);
        let f = random_ctl(&mut rng, 4, &["p", "q"]);
        let kripke = Kripke::from_cgs(&cgs).unwrap();
        let sat = model_checking(&f, &kripke).unwrap().sat;
        let oracle = ctl_oracle(&Rel::from_cgs(&cgs), &f);
        for (q, &expected) in oracle.iter().enumerate() {
            prop_assert_eq!(sat.contains(q), expected);
        }
    }

    #[test]
    fn boolean_recall_agrees_with_memoryless(seed in any::<u64>(), nth in 0usize..100) {
        // Short horizons make X decidable inside the unrolling.
        let cgs = {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            loop {
                let c = random_model(&mut rng, 4, false);
                if c.agents() == 1 {
                    break c;
                }
            }
        };
        let all: Vec<CollectiveStrategy> =
            generate_strategies(&cgs, &[0], 3, StrategyKind::Nr).collect();
        let s = &all[nth % all.len()];
        if validate_strategy_nr(&cgs, s).unwrap() != Validity::Valid {
            return Ok(());
        }
        let ax = Formula::all(PathFormula::Next(Formula::atom("p")));
        let pruned = prune_model_nr(&cgs, s).unwrap();
        let nr = model_checking(&ax, &pruned.kripke().unwrap()).unwrap().holds;
        let mut tree = build_tree(&cgs, 3).unwrap();
        let ext = prune_tree(&mut tree, &cgs, s).unwrap();
        let nr_ext = model_checking(&ax, &Kripke::from_cgs(&ext).unwrap()).unwrap().holds;
        prop_assert_eq!(nr, nr_ext);
    }
}
