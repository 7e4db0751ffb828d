//! Seeded benchmark sweeps over random models.

use std::fmt::Write;

use crate::cgs::{generate_random_cgs, Density, RandomCgsParams};
use crate::checker::{natatl_check, CheckError, CheckOptions};
use crate::logic::{Coalition, Formula, PathFormula};
use crate::strategy::StrategyKind;

pub const CSV_HEADER: &str = "states,agents,k,mode,density,runs,avg_elapsed_ms,holds_fraction";

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub states_list: Vec<usize>,
    pub agents_list: Vec<usize>,
    pub k: u32,
    pub density: Density,
    pub runs: usize,
    pub seed: u64,
    pub actions_per_agent: usize,
    pub options: CheckOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub states: usize,
    pub agents: usize,
    pub k: u32,
    pub mode: StrategyKind,
    pub density: Density,
    pub runs: usize,
    pub avg_elapsed_ms: f64,
    pub holds_fraction: f64,
}

impl BenchRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.3},{:.3}",
            self.states,
            self.agents,
            self.k,
            self.mode,
            self.density,
            self.runs,
            self.avg_elapsed_ms,
            self.holds_fraction
        )
    }
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{CSV_HEADER}");
    for r in rows {
        let _ = writeln!(out, "{}", r.csv_line());
    }
    out
}

/// Seed of one instance, derived from the sweep seed and its coordinates.
pub fn instance_seed(seed: u64, states: usize, agents: usize, run: usize) -> u64 {
    let mut x = seed ^ 0x9e37_79b9_7f4a_7c15;
    for v in [states as u64, agents as u64, run as u64] {
        x = (x ^ v).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        x ^= x >> 31;
    }
    x
}

/// `<<1..agents>>^<=k F p`.
pub fn bench_formula(agents: usize, k: u32) -> Formula {
    Formula::Nat {
        coalition: Coalition::new((0..agents).collect()),
        bound: k,
        path: Box::new(PathFormula::eventually(Formula::atom("p"))),
    }
}

/// One row per (states, agents) pair, averaging over `runs` seeded models.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>, CheckError> {
    let mut rows = Vec::new();
    for &states in &cfg.states_list {
        for &agents in &cfg.agents_list {
            let f = bench_formula(agents, cfg.k);
            let mut total_ms = 0.0;
            let mut holds = 0usize;
            for run in 0..cfg.runs {
                let cgs = generate_random_cgs(RandomCgsParams {
                    states,
                    agents,
                    actions_per_agent: cfg.actions_per_agent,
                    density: cfg.density,
                    unique_labels: false,
                    seed: instance_seed(cfg.seed, states, agents, run),
                })
                .map_err(|e| CheckError::Mc(crate::mc::McError::Malformed(e.to_string())))?;
                let r = natatl_check(&cgs, &f, &cfg.options)?;
                total_ms += r.elapsed_ms;
                holds += usize::from(r.holds);
            }
            let runs = cfg.runs.max(1) as f64;
            rows.push(BenchRow {
                states,
                agents,
                k: cfg.k,
                mode: cfg.options.mode,
                density: cfg.density,
                runs: cfg.runs,
                avg_elapsed_ms: total_ms / runs,
                holds_fraction: holds as f64 / runs,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_and_determinism() {
        let cfg = BenchConfig {
            states_list: vec![10, 20],
            agents_list: vec![1],
            k: 2,
            density: Density::Sparse,
            runs: 3,
            seed: 1,
            actions_per_agent: 2,
            options: CheckOptions::default(),
        };
        let a = run_bench(&cfg).unwrap();
        let b = run_bench(&cfg).unwrap();
        assert_eq!(a.len(), 2);
        let fractions: Vec<f64> = a.iter().map(|r| r.holds_fraction).collect();
        assert_eq!(
            fractions,
            b.iter().map(|r| r.holds_fraction).collect::<Vec<_>>()
        );
        assert!(to_csv(&a).starts_with(CSV_HEADER));
        assert_eq!(bench_formula(2, 3).to_string(), "<<1,2>>^<=3 F p");
    }
}
