use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use natamc::bench::{run_bench, to_csv, BenchConfig};
use natamc::logic::parse_formula;
use natamc::mc::{atl_check, model_checking, Kripke, StateSet};
use natamc::prune::{build_tree, prune_model_nr, prune_tree, DEFAULT_HEIGHT};
use natamc::{
    natatl_check, pipeline, Cgs, CheckOptions, CheckReport, CollectiveStrategy, Density, Dialect,
    ParseMode, SearchMode, StrategyKind,
};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "natamc",
    version,
    about = "NatATL model checking over concurrent game structures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a formula; NatATL by default.
    Check(CheckArgs),
    /// Check a flat ATL formula.
    CheckAtl(FormulaArgs),
    /// Check a CTL formula over the unpruned model.
    CheckCtl(FormulaArgs),
    /// Print the model pruned by a strategy.
    Prune(PruneArgs),
    /// ATL prefilter, then NatATL with the modality bounded by `--kmax`.
    Pipeline(PipelineArgs),
    /// CSV timings over seeded random models.
    Bench(BenchArgs),
    /// Like `check`, printing only the witness strategy.
    Synth(CheckArgs),
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    model: PathBuf,
    /// Accept nondeterministic transitions.
    #[arg(long)]
    lenient: bool,
}

impl ModelArgs {
    fn load(&self) -> Result<Cgs> {
        read_model(&self.model, self.lenient)
    }
}

#[derive(Args)]
struct FormulaArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    formula: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum DialectArg {
    Natatl,
    Atl,
    Ctl,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value = "nr", value_parser = parse_kind)]
    mode: StrategyKind,
    /// Unrolling depth in recall mode.
    #[arg(long, default_value_t = DEFAULT_HEIGHT)]
    height: usize,
    #[arg(long, default_value = "reduced", value_parser = parse_search)]
    search: SearchMode,
    /// Worker threads; 1 runs sequentially.
    #[arg(long, env = "NATAMC_JOBS")]
    jobs: Option<usize>,
}

impl SearchArgs {
    fn options(&self) -> CheckOptions {
        CheckOptions {
            mode: self.mode,
            height: self.height,
            search: self.search,
            jobs: self.jobs,
        }
    }
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    target: FormulaArgs,
    #[arg(long, value_enum, default_value = "natatl")]
    dialect: DialectArg,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args)]
struct PruneArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// File with one `agent N: ...` line per coalition member.
    #[arg(long)]
    strategy: PathBuf,
    #[arg(long, default_value = "nr", value_parser = parse_kind)]
    mode: StrategyKind,
    #[arg(long, default_value_t = DEFAULT_HEIGHT)]
    height: usize,
}

#[derive(Args)]
struct PipelineArgs {
    #[command(flatten)]
    target: FormulaArgs,
    #[arg(long)]
    kmax: u32,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    states_list: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    agents_list: Vec<usize>,
    #[arg(long)]
    k: u32,
    #[arg(long, default_value = "sparse")]
    density: Density,
    #[arg(long, default_value_t = 1)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Including `idle`.
    #[arg(long, default_value_t = 3)]
    actions: usize,
    #[command(flatten)]
    search: SearchArgs,
}

fn parse_kind(s: &str) -> Result<StrategyKind, String> {
    s.parse()
}

fn parse_search(s: &str) -> Result<SearchMode, String> {
    s.parse()
}

fn read_model(path: &Path, lenient: bool) -> Result<Cgs> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mode = if lenient {
        ParseMode::Lenient
    } else {
        ParseMode::Strict
    };
    Cgs::parse(&text, mode).with_context(|| format!("parsing {}", path.display()))
}

fn state_names(cgs: &Cgs, sat: &StateSet) -> Vec<String> {
    sat.iter().map(|q| cgs.state_name(q).to_string()).collect()
}

#[derive(Serialize)]
struct SetReport {
    holds: bool,
    sat_states: Vec<String>,
    iterations: usize,
}

fn verdict(holds: bool) -> ExitCode {
    ExitCode::from(if holds { 0 } else { 1 })
}

fn set_report(cgs: &Cgs, holds: bool, sat: &StateSet, iterations: usize) -> ExitCode {
    let report = SetReport {
        holds,
        sat_states: state_names(cgs, sat),
        iterations,
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("serializable")
    );
    verdict(holds)
}

fn check_atl(args: &FormulaArgs) -> Result<ExitCode> {
    let cgs = args.model.load()?;
    let f = parse_formula(&args.formula, Dialect::Atl)?;
    let out = atl_check(&cgs, &f)?;
    Ok(set_report(&cgs, out.holds, &out.sat, out.iterations))
}

fn check_ctl(args: &FormulaArgs) -> Result<ExitCode> {
    let cgs = args.model.load()?;
    let f = parse_formula(&args.formula, Dialect::Ctl)?;
    let out = model_checking(&f, &Kripke::from_cgs(&cgs)?)?;
    Ok(set_report(&cgs, out.holds, &out.sat, out.iterations))
}

fn natatl(args: &CheckArgs) -> Result<CheckReport> {
    let cgs = args.target.model.load()?;
    let f = parse_formula(&args.target.formula, Dialect::NatAtl)?;
    Ok(natatl_check(&cgs, &f, &args.search.options())?)
}

fn check(args: &CheckArgs) -> Result<ExitCode> {
    match args.dialect {
        DialectArg::Atl => check_atl(&args.target),
        DialectArg::Ctl => check_ctl(&args.target),
        DialectArg::Natatl => {
            let report = natatl(args)?;
            println!("{}", report.to_json());
            Ok(verdict(report.holds))
        }
    }
}

fn synth(args: &CheckArgs) -> Result<ExitCode> {
    if !matches!(args.dialect, DialectArg::Natatl) {
        bail!("synth needs a NatATL formula");
    }
    let report = natatl(args)?;
    match &report.witness {
        Some(w) => {
            println!("{w}");
            Ok(ExitCode::SUCCESS)
        }
        None => {
            eprintln!("no strategy of complexity at most {}", report.bound);
            Ok(verdict(false))
        }
    }
}

fn prune(args: &PruneArgs) -> Result<ExitCode> {
    let cgs = args.model.load()?;
    let text = std::fs::read_to_string(&args.strategy)
        .with_context(|| format!("reading {}", args.strategy.display()))?;
    let s = CollectiveStrategy::parse(&text)?;
    let pruned = match args.mode {
        StrategyKind::Nr => prune_model_nr(&cgs, &s)?.to_cgs()?,
        StrategyKind::Recall => {
            let mut tree = build_tree(&cgs, args.height)?;
            prune_tree(&mut tree, &cgs, &s)?
        }
    };
    print!("{}", pruned.serialize());
    Ok(ExitCode::SUCCESS)
}

fn run_pipeline(args: &PipelineArgs) -> Result<ExitCode> {
    let cgs = args.target.model.load()?;
    let f = parse_formula(&args.target.formula, Dialect::Atl)?;
    let report = pipeline(&cgs, &f, args.kmax, &args.search.options())?;
    println!("{}", report.to_json());
    Ok(verdict(report.holds))
}

fn bench(args: &BenchArgs) -> Result<ExitCode> {
    if args.runs == 0 {
        bail!("--runs must be at least 1");
    }
    let rows = run_bench(&BenchConfig {
        states_list: args.states_list.clone(),
        agents_list: args.agents_list.clone(),
        k: args.k,
        density: args.density,
        runs: args.runs,
        seed: args.seed,
        actions_per_agent: args.actions,
        options: args.search.options(),
    })?;
    print!("{}", to_csv(&rows));
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Check(a) => check(a),
        Command::CheckAtl(a) => check_atl(a),
        Command::CheckCtl(a) => check_ctl(a),
        Command::Prune(a) => prune(a),
        Command::Pipeline(a) => run_pipeline(a),
        Command::Bench(a) => bench(a),
        Command::Synth(a) => synth(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    run(cli).unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(2)
    })
}
