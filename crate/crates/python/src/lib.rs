//! Python bindings: models, formula checks, pruning and synthesis.

use natamc::cgs::generate_random_cgs;
use natamc::logic::parse_formula;
use natamc::mc::{atl_check as atl, model_checking, Kripke, StateSet};
use natamc::prune::{build_tree, prune_model_nr, prune_tree, DEFAULT_HEIGHT};
use natamc::{
    Cgs, CheckOptions, CollectiveStrategy, Density, Dialect, ParseMode, RandomCgsParams,
    SearchMode, StrategyKind,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr<Err = String>>(s: &str) -> PyResult<T> {
    s.parse().map_err(PyValueError::new_err)
}

fn dialect(name: &str) -> PyResult<Dialect> {
    match name {
        "ctl" => Ok(Dialect::Ctl),
        "atl" => Ok(Dialect::Atl),
        "natatl" => Ok(Dialect::NatAtl),
        other => Err(err(format!("unknown dialect `{other}`"))),
    }
}

#[pyclass(name = "Cgs", module = "natamc", frozen)]
struct PyCgs(Cgs);

#[pymethods]
impl PyCgs {
    #[new]
    #[pyo3(signature = (text, lenient = false))]
    fn new(text: &str, lenient: bool) -> PyResult<Self> {
        let mode = if lenient {
            ParseMode::Lenient
        } else {
            ParseMode::Strict
        };
        Cgs::parse(text, mode).map(PyCgs).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (states, agents = 1, actions = 3, density = "sparse", unique_labels = false, seed = 0))]
    fn random(
        states: usize,
        agents: usize,
        actions: usize,
        density: &str,
        unique_labels: bool,
        seed: u64,
    ) -> PyResult<Self> {
        let density: Density = parse(density)?;
        generate_random_cgs(RandomCgsParams {
            states,
            agents,
            actions_per_agent: actions,
            density,
            unique_labels,
            seed,
        })
        .map(PyCgs)
        .map_err(err)
    }

    #[getter]
    fn agents(&self) -> usize {
        self.0.agents()
    }

    #[getter]
    fn states(&self) -> Vec<String> {
        self.0.states().to_vec()
    }

    #[getter]
    fn atoms(&self) -> Vec<String> {
        self.0.atoms().to_vec()
    }

    #[getter]
    fn initial(&self) -> String {
        self.0.state_name(self.0.initial()).to_string()
    }

    fn is_deterministic(&self) -> bool {
        self.0.is_deterministic()
    }

    fn serialize(&self) -> String {
        self.0.serialize()
    }

    fn __len__(&self) -> usize {
        self.0.num_states()
    }

    fn __repr__(&self) -> String {
        format!(
            "Cgs(states={}, agents={}, atoms={:?})",
            self.0.num_states(),
            self.0.agents(),
            self.0.atoms()
        )
    }
}

#[pyclass(name = "CheckReport", module = "natamc", frozen)]
struct PyCheckReport(natamc::CheckReport);

#[pymethods]
impl PyCheckReport {
    #[getter]
    fn holds(&self) -> bool {
        self.0.holds
    }

    #[getter]
    fn mode(&self) -> String {
        self.0.mode.to_string()
    }

    #[getter]
    fn coalition(&self) -> Vec<usize> {
        self.0.coalition.clone()
    }

    #[getter]
    fn bound(&self) -> u32 {
        self.0.bound
    }

    #[getter]
    fn witness(&self) -> Option<String> {
        self.0.witness.as_ref().map(|w| w.to_string())
    }

    #[getter]
    fn witness_complexity(&self) -> Option<u32> {
        self.0.witness_complexity
    }

    #[getter]
    fn strategies_explored(&self) -> u64 {
        self.0.strategies_explored
    }

    #[getter]
    fn horizon(&self) -> Option<usize> {
        self.0.horizon
    }

    #[getter]
    fn elapsed_ms(&self) -> f64 {
        self.0.elapsed_ms
    }

    #[getter]
    fn atl_holds(&self) -> Option<bool> {
        self.0.atl_holds
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    fn __bool__(&self) -> bool {
        self.0.holds
    }

    fn __repr__(&self) -> String {
        format!(
            "CheckReport(holds={}, witness_complexity={:?}, strategies_explored={})",
            self.0.holds, self.0.witness_complexity, self.0.strategies_explored
        )
    }
}

/// Outcome of a fixpoint check: (holds, satisfying state names, iterations).
type SetOutcome = (bool, Vec<String>, usize);

fn names(cgs: &Cgs, sat: &StateSet) -> Vec<String> {
    sat.iter().map(|q| cgs.state_name(q).to_string()).collect()
}

fn options(mode: &str, height: usize, search: &str, jobs: Option<usize>) -> PyResult<CheckOptions> {
    Ok(CheckOptions {
        mode: parse::<StrategyKind>(mode)?,
        height,
        search: parse::<SearchMode>(search)?,
        jobs,
    })
}

/// Normalized text of a formula in the given dialect.
#[pyfunction]
#[pyo3(signature = (text, dialect = "natatl"))]
fn format_formula(text: &str, dialect: &str) -> PyResult<String> {
    let d = self::dialect(dialect)?;
    parse_formula(text, d).map(|f| f.to_string()).map_err(err)
}

/// Symbol count of a strategy given as `agent N: ...` lines.
#[pyfunction]
fn complexity(strategy: &str) -> PyResult<u32> {
    CollectiveStrategy::parse(strategy)
        .map(|s| s.complexity())
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (cgs, formula, mode = "nr", height = DEFAULT_HEIGHT, search = "reduced", jobs = None))]
fn natatl_check(
    py: Python<'_>,
    cgs: &PyCgs,
    formula: &str,
    mode: &str,
    height: usize,
    search: &str,
    jobs: Option<usize>,
) -> PyResult<PyCheckReport> {
    let f = parse_formula(formula, Dialect::NatAtl).map_err(err)?;
    let opts = options(mode, height, search, jobs)?;
    py.detach(|| natamc::natatl_check(&cgs.0, &f, &opts))
        .map(PyCheckReport)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (cgs, formula, kmax, mode = "nr", height = DEFAULT_HEIGHT, search = "reduced", jobs = None))]
#[allow(clippy::too_many_arguments)]
fn pipeline(
    py: Python<'_>,
    cgs: &PyCgs,
    formula: &str,
    kmax: u32,
    mode: &str,
    height: usize,
    search: &str,
    jobs: Option<usize>,
) -> PyResult<PyCheckReport> {
    let f = parse_formula(formula, Dialect::Atl).map_err(err)?;
    let opts = options(mode, height, search, jobs)?;
    py.detach(|| natamc::pipeline(&cgs.0, &f, kmax, &opts))
        .map(PyCheckReport)
        .map_err(err)
}

#[pyfunction]
fn atl_check(cgs: &PyCgs, formula: &str) -> PyResult<SetOutcome> {
    let f = parse_formula(formula, Dialect::Atl).map_err(err)?;
    let out = atl(&cgs.0, &f).map_err(err)?;
    Ok((out.holds, names(&cgs.0, &out.sat), out.iterations))
}

#[pyfunction]
fn ctl_check(cgs: &PyCgs, formula: &str) -> PyResult<SetOutcome> {
    let f = parse_formula(formula, Dialect::Ctl).map_err(err)?;
    let kripke = Kripke::from_cgs(&cgs.0).map_err(err)?;
    let out = model_checking(&f, &kripke).map_err(err)?;
    Ok((out.holds, names(&cgs.0, &out.sat), out.iterations))
}

/// The model restricted to the strategy's moves; in recall mode, the
/// pruned unrolling of the given height.
#[pyfunction]
#[pyo3(signature = (cgs, strategy, mode = "nr", height = DEFAULT_HEIGHT))]
fn prune(cgs: &PyCgs, strategy: &str, mode: &str, height: usize) -> PyResult<PyCgs> {
    let s = CollectiveStrategy::parse(strategy).map_err(err)?;
    let pruned = match parse::<StrategyKind>(mode)? {
        StrategyKind::Nr => prune_model_nr(&cgs.0, &s).and_then(|p| p.to_cgs()),
        StrategyKind::Recall => {
            build_tree(&cgs.0, height).and_then(|mut t| prune_tree(&mut t, &cgs.0, &s))
        }
    };
    pruned.map(PyCgs).map_err(err)
}

#[pymodule]
#[pyo3(name = "natamc")]
fn natamc_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCgs>()?;
    m.add_class::<PyCheckReport>()?;
    m.add_function(wrap_pyfunction!(format_formula, m)?)?;
    m.add_function(wrap_pyfunction!(complexity, m)?)?;
    m.add_function(wrap_pyfunction!(natatl_check, m)?)?;
    m.add_function(wrap_pyfunction!(pipeline, m)?)?;
    m.add_function(wrap_pyfunction!(atl_check, m)?)?;
    m.add_function(wrap_pyfunction!(ctl_check, m)?)?;
    m.add_function(wrap_pyfunction!(prune, m)?)?;
    m.add("DEFAULT_HEIGHT", DEFAULT_HEIGHT)?;
    Ok(())
}
