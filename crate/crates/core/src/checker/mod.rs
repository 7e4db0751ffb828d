//! The NatATL checking loop and the ATL-prefiltered pipeline.

use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::cgs::Cgs;
use crate::logic::{
    atl_to_natatl, to_universal_ctl, Coalition, Formula, FormulaError, UniversalCtl,
};
use crate::mc::{atl_check, check_coalition, model_checking, Kripke, McError};
use crate::prune::{
    build_tree, fired_actions, prune_in_place, pruned_kripke, tree_relation, PruneError,
    UnrollTree, DEFAULT_HEIGHT,
};
use crate::strategy::{
    behaviour_reduced_strategies, generate_strategies, CandidateStream, CollectiveStrategy,
    StrategyError, StrategyKind,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Mc(#[from] McError),
    #[error(transparent)]
    Prune(#[from] PruneError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error("height must be ≥ 1")]
    ZeroHeight,
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

/// How memoryless candidates are enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchMode {
    /// One candidate per distinct behaviour on the model; same witness as
    /// the exhaustive stream.
    #[default]
    Reduced,
    /// Every strategy of the condition language.
    Exhaustive,
}

impl FromStr for SearchMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "reduced" => Ok(SearchMode::Reduced),
            "exhaustive" => Ok(SearchMode::Exhaustive),
            other => Err(format!(
                "unknown search `{other}` (expected reduced|exhaustive)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub mode: StrategyKind,
    /// Unrolling depth for recall mode.
    pub height: usize,
    pub search: SearchMode,
    /// Worker cap; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            mode: StrategyKind::Nr,
            height: DEFAULT_HEIGHT,
            search: SearchMode::Reduced,
            jobs: None,
        }
    }
}

fn witness_lines<S: Serializer>(w: &Option<CollectiveStrategy>, s: S) -> Result<S::Ok, S::Error> {
    w.as_ref().map(CollectiveStrategy::lines).serialize(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub holds: bool,
    pub mode: StrategyKind,
    /// 1-based agent indices.
    pub coalition: Vec<usize>,
    pub bound: u32,
    #[serde(serialize_with = "witness_lines")]
    pub witness: Option<CollectiveStrategy>,
    pub witness_complexity: Option<u32>,
    pub strategies_explored: u64,
    /// Unrolling depth; recall mode only.
    pub horizon: Option<usize>,
    pub elapsed_ms: f64,
    /// Prefilter verdict; pipeline runs only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atl_holds: Option<bool>,
}

impl CheckReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    (start.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

fn check_atoms(cgs: &Cgs, f: &Formula) -> Result<(), McError> {
    if let Formula::Atom(a) = f {
        if cgs.atom_index(a).is_none() {
            return Err(McError::UnknownAtom(a.clone()));
        }
    }
    f.children()
        .into_iter()
        .try_for_each(|c| check_atoms(cgs, c))
}

/// Prunes the model under one candidate and checks the stripped formula.
struct Evaluator<'a> {
    cgs: &'a Cgs,
    ctl: Formula,
    tree: Option<UnrollTree>,
}

impl Evaluator<'_> {
    fn wins(&self, s: &CollectiveStrategy) -> Result<bool, CheckError> {
        match &self.tree {
            None => {
                let fired = match fired_actions(self.cgs, s)? {
                    Ok(f) => f,
                    Err(_) => return Ok(false),
                };
                let k = pruned_kripke(self.cgs, &fired)?;
                Ok(model_checking(&self.ctl, &k)?.holds)
            }
            Some(base) => {
                let mut tree = base.clone();
                match prune_in_place(&mut tree, self.cgs, s) {
                    Ok(()) => {}
                    Err(PruneError::Invalid(_)) => return Ok(false),
                    Err(e) => return Err(e.into()),
                }
                let (_, labels, edges) = tree_relation(&tree);
                let k = Kripke::new(self.cgs.atoms(), &labels, 0, edges)?;
                Ok(model_checking(&self.ctl, &k)?.holds)
            }
        }
    }
}

/// Index of the first winner in the stream (or the stream length) and the
/// winner itself. Batches are evaluated in parallel and reduced by stream
/// position, so the result matches a sequential scan.
fn search(
    stream: CandidateStream,
    eval: &Evaluator,
    parallel: bool,
) -> Result<(u64, Option<CollectiveStrategy>), CheckError> {
    let mut stream = stream.peekable();
    let mut explored = 0u64;
    let mut batch_size = if parallel {
        rayon::current_num_threads().max(1)
    } else {
        1
    };
    while stream.peek().is_some() {
        let batch: Vec<CollectiveStrategy> = stream.by_ref().take(batch_size).collect();
        let results: Vec<Result<bool, CheckError>> = if parallel {
            batch.par_iter().map(|c| eval.wins(c)).collect()
        } else {
            batch.iter().map(|c| eval.wins(c)).collect()
        };
        for (c, r) in batch.into_iter().zip(results) {
            explored += 1;
            if r? {
                return Ok((explored, Some(c)));
            }
        }
        if parallel {
            batch_size = (batch_size * 2).min(1024);
        }
    }
    Ok((explored, None))
}

fn with_pool<T: Send>(
    jobs: Option<usize>,
    f: impl FnOnce(bool) -> Result<T, CheckError> + Send,
) -> Result<T, CheckError> {
    match jobs {
        Some(0) | Some(1) => f(false),
        None => f(true),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CheckError::Pool(e.to_string()))?
            .install(|| f(true)),
    }
}

/// Searches natural strategies of complexity `≤ k` in nondecreasing order
/// and stops at the first one under which the stripped formula holds.
pub fn natatl_check(
    cgs: &Cgs,
    f: &Formula,
    options: &CheckOptions,
) -> Result<CheckReport, CheckError> {
    let start = Instant::now();
    let UniversalCtl {
        coalition,
        bound,
        ctl,
    } = to_universal_ctl(f)?;
    check_coalition(cgs, &coalition)?;
    check_atoms(cgs, &ctl)?;
    let recall = options.mode == StrategyKind::Recall;
    if recall && options.height == 0 {
        return Err(CheckError::ZeroHeight);
    }
    let members = coalition.members();
    let stream = match (options.mode, options.search) {
        (StrategyKind::Nr, SearchMode::Reduced) => {
            behaviour_reduced_strategies(cgs, members, bound)
        }
        (mode, _) => generate_strategies(cgs, members, bound, mode),
    };
    let eval = Evaluator {
        cgs,
        ctl,
        tree: if recall {
            Some(build_tree(cgs, options.height)?)
        } else {
            None
        },
    };
    let (explored, witness) = with_pool(options.jobs, |parallel| search(stream, &eval, parallel))?;
    Ok(CheckReport {
        holds: witness.is_some(),
        mode: options.mode,
        coalition: coalition.one_based(),
        bound,
        witness_complexity: witness.as_ref().map(CollectiveStrategy::complexity),
        witness,
        strategies_explored: explored,
        horizon: recall.then_some(options.height),
        elapsed_ms: elapsed_ms(start),
        atl_holds: None,
    })
}

fn atl_coalition(f: &Formula) -> Option<&Coalition> {
    match f {
        Formula::Atl { coalition, .. } => Some(coalition),
        _ => f.children().into_iter().find_map(atl_coalition),
    }
}

/// ATL first; only ATL-true instances reach strategy generation, with the
/// modality bounded by `kmax`.
pub fn pipeline(
    cgs: &Cgs,
    f: &Formula,
    kmax: u32,
    options: &CheckOptions,
) -> Result<CheckReport, CheckError> {
    let start = Instant::now();
    let nat = atl_to_natatl(f, kmax)?;
    let atl = atl_check(cgs, f)?;
    let mut report = if atl.holds {
        natatl_check(cgs, &nat, options)?
    } else {
        CheckReport {
            holds: false,
            mode: options.mode,
            coalition: atl_coalition(f)
                .map(Coalition::one_based)
                .unwrap_or_default(),
            bound: kmax,
            witness: None,
            witness_complexity: None,
            strategies_explored: 0,
            horizon: (options.mode == StrategyKind::Recall).then_some(options.height),
            elapsed_ms: 0.0,
            atl_holds: None,
        }
    };
    report.atl_holds = Some(atl.holds);
    report.elapsed_ms = elapsed_ms(start);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgs::fixtures::{m1, M1};
    use crate::cgs::ParseMode;
    use crate::logic::{parse_formula, Dialect};

    fn nat(text: &str) -> Formula {
        parse_formula(text, Dialect::NatAtl).unwrap()
    }

    fn nr() -> CheckOptions {
        CheckOptions::default()
    }

    fn witness(r: &CheckReport) -> String {
        r.witness
            .as_ref()
            .map(|w| w.to_string())
            .unwrap_or_default()
    }

    #[test]
    fn eventually_p_on_m1() {
        let cgs = m1();
        let r = natatl_check(&cgs, &nat("<<1>>^<=3 F p"), &nr()).unwrap();
        assert!(r.holds);
        assert_eq!(r.witness_complexity, Some(2));
        assert_eq!(witness(&r), "agent 1: (p, idle); (top, go)");
        assert_eq!(r.horizon, None);
        let ex = CheckOptions {
            search: SearchMode::Exhaustive,
            ..nr()
        };
        let e = natatl_check(&cgs, &nat("<<1>>^<=3 F p"), &ex).unwrap();
        assert_eq!(e.witness, r.witness);
        assert!(e.strategies_explored >= r.strategies_explored);
    }

    #[test]
    fn bound_one_is_too_small() {
        let cgs = m1();
        let r = natatl_check(&cgs, &nat("<<1>>^<=1 F p"), &nr()).unwrap();
        assert!(!r.holds);
        assert_eq!(r.witness, None);
        assert_eq!(r.strategies_explored, 2);
    }

    #[test]
    fn safety_found_at_one() {
        let cgs = m1();
        let r = natatl_check(&cgs, &nat("<<1>>^<=3 G !p"), &nr()).unwrap();
        assert_eq!(witness(&r), "agent 1: (top, idle)");
        assert_eq!(r.witness_complexity, Some(1));
    }

    #[test]
    fn recall_mode_reports_horizon() {
        let cgs = m1();
        let opts = CheckOptions {
            mode: StrategyKind::Recall,
            ..nr()
        };
        let r = natatl_check(&cgs, &nat("<<1>>^<=3 F p"), &opts).unwrap();
        assert!(r.holds);
        assert_eq!(r.horizon, Some(DEFAULT_HEIGHT));
        assert_eq!(r.witness_complexity, Some(2));
    }

    #[test]
    fn errors() {
        let cgs = m1();
        assert!(matches!(
            natatl_check(&cgs, &nat("<<2>>^<=3 F p"), &nr()),
            Err(CheckError::Mc(McError::InvalidCoalition(_)))
        ));
        assert!(matches!(
            natatl_check(&cgs, &nat("<<1>>^<=3 F zz"), &nr()),
            Err(CheckError::Mc(McError::UnknownAtom(_)))
        ));
        let zero = CheckOptions {
            mode: StrategyKind::Recall,
            height: 0,
            ..nr()
        };
        assert_eq!(
            natatl_check(&cgs, &nat("<<1>>^<=3 F p"), &zero),
            Err(CheckError::ZeroHeight)
        );
    }

    #[test]
    fn pipeline_short_circuits() {
        let no_go = Cgs::parse(&M1.replace("TRANS q0 (go) q1\n", ""), ParseMode::Strict).unwrap();
        let f = parse_formula("<<1>> F p", Dialect::Atl).unwrap();
        let r = pipeline(&no_go, &f, 10, &nr()).unwrap();
        assert!(!r.holds);
        assert_eq!(r.strategies_explored, 0);
        assert_eq!(r.atl_holds, Some(false));
        assert_eq!(r.coalition, vec![1]);
        let cgs = m1();
        let p = pipeline(&cgs, &f, 10, &nr()).unwrap();
        let d = natatl_check(&cgs, &nat("<<1>>^<=10 F p"), &nr()).unwrap();
        assert_eq!(p.witness, d.witness);
        assert_eq!(p.atl_holds, Some(true));
        assert!(matches!(
            pipeline(&cgs, &f, 0, &nr()),
            Err(CheckError::Formula(FormulaError::ZeroBound))
        ));
    }

    #[test]
    fn jobs_do_not_change_the_report() {
        let cgs = m1();
        let f = nat("<<1>>^<=4 F p");
        let base = natatl_check(
            &cgs,
            &f,
            &CheckOptions {
                jobs: Some(1),
                ..nr()
            },
        )
        .unwrap();
        for jobs in [None, Some(2), Some(4)] {
            let r = natatl_check(&cgs, &f, &CheckOptions { jobs, ..nr() }).unwrap();
            assert_eq!(
                (r.witness, r.strategies_explored),
                (base.witness.clone(), base.strategies_explored)
            );
        }
    }

    #[test]
    fn json_shape() {
        let cgs = m1();
        let r = natatl_check(&cgs, &nat("<<1>>^<=3 F p"), &nr()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["mode"], "nr");
        assert_eq!(v["witness"][0], "agent 1: (p, idle); (top, go)");
        assert_eq!(v["coalition"][0], 1);
        assert!(v.get("atl_holds").is_none());
    }
}
