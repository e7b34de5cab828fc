//! Python bindings: load or generate robot/human problems, plan, and run the
//! explicability/explanation search. Costs and weights cross the boundary as
//! `fractions.Fraction`.

use std::path::PathBuf;

use mega_core::mega::{brute_force_solution, mce_search, TieRule};
use mega_core::model_space::{edits_toward, EditOptions};
use mega_core::pddl::{parse_domain_problem, HumanSide, PddlError};
use mega_core::planner::{optimal_plan, optimal_plan_toward};
use mega_core::scenarios::{generate as generate_scenario, Family, ScenarioError, ScenarioSpec};
use mega_core::strips::{parse_rational, plan_cost};
use mega_core::{Cost, HapProblem, MegaError, MegaOptions, Plan, PlannerConfig, PlannerError, ProblemBundle, Rational};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(
    mega_py,
    PlanningError,
    PyException,
    "Raised when planning or search fails."
);

fn pddl_err(e: PddlError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn mega_err(e: MegaError) -> PyErr {
    PlanningError::new_err(e.to_string())
}

fn planner_err(e: PlannerError) -> PyErr {
    PlanningError::new_err(e.to_string())
}

fn scenario_err(e: ScenarioError) -> PyErr {
    match e {
        ScenarioError::Config(_) | ScenarioError::Pddl(_) => PyValueError::new_err(e.to_string()),
        _ => PlanningError::new_err(e.to_string()),
    }
}

fn fraction<'py>(py: Python<'py>, value: Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((*value.numer(), *value.denom()))
}

fn cost<'py>(py: Python<'py>, value: Cost) -> PyResult<Option<Bound<'py, PyAny>>> {
    value.finite().map(|v| fraction(py, v)).transpose()
}

/// Accepts int, Fraction, float or a string such as `"3/4"`.
fn rational(value: &Bound<'_, PyAny>) -> PyResult<Rational> {
    if let Ok(n) = value.extract::<i64>() {
        return Ok(Rational::from_integer(n));
    }
    if let (Ok(n), Ok(d)) = (value.getattr("numerator"), value.getattr("denominator")) {
        let (n, d) = (n.extract::<i64>()?, d.extract::<i64>()?);
        if d != 0 {
            return Ok(Rational::new(n, d));
        }
    }
    let text = value.str()?.to_string();
    parse_rational(&text).ok_or_else(|| PyValueError::new_err(format!("not a rational number: {text}")))
}

fn planner_config(node_cap: Option<usize>) -> PlannerConfig {
    let mut config = PlannerConfig::default();
    if let Some(cap) = node_cap {
        config.node_cap = cap;
    }
    config
}

/// A grounded planning model.
#[pyclass(module = "mega_py", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct Model {
    inner: mega_core::Model,
}

#[pymethods]
impl Model {
    #[staticmethod]
    fn from_pddl(domain: &str, problem: &str) -> PyResult<Self> {
        parse_domain_problem(domain, problem)
            .map(|inner| Model { inner })
            .map_err(pddl_err)
    }

    #[getter]
    fn actions(&self) -> Vec<String> {
        self.inner.actions().keys().cloned().collect()
    }

    #[getter]
    fn fluents(&self) -> Vec<String> {
        self.inner.fluents().iter().map(ToString::to_string).collect()
    }

    #[getter]
    fn init(&self) -> Vec<String> {
        self.inner.init().iter().map(ToString::to_string).collect()
    }

    #[getter]
    fn goal(&self) -> Vec<String> {
        self.inner.goal().iter().map(ToString::to_string).collect()
    }

    /// Cost of `plan`, or `None` when it is inexecutable or misses the goal.
    fn plan_cost<'py>(&self, py: Python<'py>, plan: Vec<String>) -> PyResult<Option<Bound<'py, PyAny>>> {
        cost(py, plan_cost(&Plan::new(plan), &self.inner))
    }

    /// `(steps, cost)` of an optimal plan, or `None` if the goal is unreachable.
    #[pyo3(signature = (node_cap=None))]
    fn optimal_plan<'py>(
        &self,
        py: Python<'py>,
        node_cap: Option<usize>,
    ) -> PyResult<Option<(Vec<String>, Bound<'py, PyAny>)>> {
        let result = optimal_plan(&self.inner, &planner_config(node_cap)).map_err(planner_err)?;
        match (result.plan, result.cost) {
            (Some(plan), Cost::Finite(c)) => Ok(Some((plan.steps, fraction(py, c)?))),
            _ => Ok(None),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(actions={}, fluents={}, goal={})",
            self.inner.actions().len(),
            self.inner.fluents().len(),
            self.inner.goal().len()
        )
    }
}

/// The plan and explanation chosen for one weight.
#[pyclass(module = "mega_py", frozen)]
pub struct Solution {
    inner: mega_core::Solution,
}

#[pymethods]
impl Solution {
    #[getter]
    fn alpha<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, self.inner.alpha)
    }

    #[getter]
    fn plan(&self) -> Vec<String> {
        self.inner.plan.steps.clone()
    }

    #[getter]
    fn explanation(&self) -> Vec<String> {
        self.inner.explanation.lines()
    }

    #[getter]
    fn explanation_size(&self) -> usize {
        self.inner.explanation_size
    }

    #[getter]
    fn explicability_penalty<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, self.inner.explicability_penalty)
    }

    #[getter]
    fn plan_cost_robot<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, self.inner.plan_cost_in_robot)
    }

    #[getter]
    fn objective<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, self.inner.objective)
    }

    #[getter]
    fn reconciled_model(&self) -> Model {
        Model {
            inner: self.inner.reconciled_model.clone(),
        }
    }

    fn __repr__(&self) -> String {
        format!("Solution({})", self.inner.summary())
    }
}

/// A robot model paired with the human's belief about it.
#[pyclass(module = "mega_py", frozen)]
pub struct Problem {
    inner: HapProblem,
}

fn options(allow_cost_edits: bool, latest_wins: bool, node_cap: Option<usize>) -> MegaOptions {
    MegaOptions {
        edits: EditOptions { allow_cost_edits },
        planner: planner_config(node_cap),
        tie_rule: if latest_wins {
            TieRule::LatestWins
        } else {
            TieRule::LowerPenalty
        },
        ..MegaOptions::default()
    }
}

#[pymethods]
impl Problem {
    /// Reads a bundle directory or manifest.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        mega_core::load_bundle(path)
            .map(|inner| Problem { inner })
            .map_err(pddl_err)
    }

    #[staticmethod]
    fn from_pddl(robot_domain: &str, robot_problem: &str, human_domain: &str, human_problem: &str) -> PyResult<Self> {
        Bundle::from_parts(
            robot_domain,
            robot_problem,
            HumanSide::Full {
                domain: human_domain.to_string(),
                problem: human_problem.to_string(),
            },
        )
        .load()
    }

    /// The human model is the robot's with `overlay` edits applied.
    #[staticmethod]
    fn from_overlay(robot_domain: &str, robot_problem: &str, overlay: &str) -> PyResult<Self> {
        Bundle::from_parts(robot_domain, robot_problem, HumanSide::Overlay(overlay.to_string())).load()
    }

    #[getter]
    fn robot(&self) -> Model {
        Model {
            inner: self.inner.robot().clone(),
        }
    }

    #[getter]
    fn human(&self) -> Model {
        Model {
            inner: self.inner.human().clone(),
        }
    }

    /// Edits that turn the human model into the robot's, sorted.
    #[pyo3(signature = (allow_cost_edits=false))]
    fn delta(&self, allow_cost_edits: bool) -> Vec<String> {
        let mut lines: Vec<String> =
            edits_toward(self.inner.human(), self.inner.robot(), EditOptions { allow_cost_edits })
                .iter()
                .map(ToString::to_string)
                .collect();
        lines.sort();
        lines
    }

    #[pyo3(signature = (alpha, allow_cost_edits=false, latest_wins=false, node_cap=None))]
    fn search(
        &self,
        py: Python<'_>,
        alpha: &Bound<'_, PyAny>,
        allow_cost_edits: bool,
        latest_wins: bool,
        node_cap: Option<usize>,
    ) -> PyResult<Solution> {
        let alpha = rational(alpha)?;
        let options = options(allow_cost_edits, latest_wins, node_cap);
        let (inner, _) = py
            .detach(|| mega_core::mega_search(&self.inner, alpha, &options))
            .map_err(mega_err)?;
        Ok(Solution { inner })
    }

    /// One search re-evaluated per weight; a list of dicts.
    #[pyo3(signature = (alphas, allow_cost_edits=false, latest_wins=false, node_cap=None))]
    fn sweep<'py>(
        &self,
        py: Python<'py>,
        alphas: Vec<Bound<'py, PyAny>>,
        allow_cost_edits: bool,
        latest_wins: bool,
        node_cap: Option<usize>,
    ) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let values = alphas.iter().map(rational).collect::<PyResult<Vec<_>>>()?;
        let options = options(allow_cost_edits, latest_wins, node_cap);
        let (rows, ledger) = py
            .detach(|| mega_core::sweep_alpha(&self.inner, &values, &options))
            .map_err(mega_err)?;
        rows.into_iter()
            .map(|row| {
                let dict = PyDict::new(py);
                dict.set_item("alpha", fraction(py, row.alpha)?)?;
                dict.set_item("explanation_size", row.explanation_size)?;
                dict.set_item("plan_cost_robot", fraction(py, row.plan_cost_in_robot)?)?;
                dict.set_item("explicability_penalty", fraction(py, row.explicability_penalty)?)?;
                dict.set_item("objective", fraction(py, row.objective)?)?;
                dict.set_item("nodes", ledger.nodes.len())?;
                Ok(dict)
            })
            .collect()
    }

    /// Minimal explanation for `plan`, by default the robot's optimal plan.
    #[pyo3(signature = (plan=None, allow_cost_edits=false, node_cap=None))]
    fn mce(&self, plan: Option<Vec<String>>, allow_cost_edits: bool, node_cap: Option<usize>) -> PyResult<Vec<String>> {
        let options = options(allow_cost_edits, false, node_cap);
        let plan = match plan {
            Some(steps) => Plan::new(steps),
            None => optimal_plan_toward(self.inner.robot(), self.inner.human(), &options.planner)
                .map_err(planner_err)?
                .result
                .plan
                .ok_or_else(|| mega_err(MegaError::UnsolvableRobot))?,
        };
        mce_search(&self.inner, &plan, &options)
            .map(|e| e.lines())
            .map_err(mega_err)
    }

    /// Exhaustive reference answer; only for small model differences.
    #[pyo3(signature = (alpha, allow_cost_edits=false))]
    fn brute_force(&self, alpha: &Bound<'_, PyAny>, allow_cost_edits: bool) -> PyResult<Solution> {
        let alpha = rational(alpha)?;
        brute_force_solution(&self.inner, alpha, &options(allow_cost_edits, false, None))
            .map(|inner| Solution { inner })
            .map_err(mega_err)
    }
}

/// Domain and problem texts for both sides, as written to disk.
#[pyclass(module = "mega_py", frozen)]
pub struct Bundle {
    inner: ProblemBundle,
}

impl Bundle {
    fn from_parts(robot_domain: &str, robot_problem: &str, human: HumanSide) -> Self {
        Bundle {
            inner: ProblemBundle {
                robot_domain: robot_domain.to_string(),
                robot_problem: robot_problem.to_string(),
                human,
            },
        }
    }
}

#[pymethods]
impl Bundle {
    #[staticmethod]
    fn read(path: PathBuf) -> PyResult<Self> {
        ProblemBundle::read(path)
            .map(|inner| Bundle { inner })
            .map_err(pddl_err)
    }

    fn write(&self, dir: PathBuf) -> PyResult<()> {
        std::fs::create_dir_all(&dir).map_err(|e| PyValueError::new_err(format!("{}: {e}", dir.display())))?;
        self.inner.write(dir).map_err(pddl_err)
    }

    fn load(&self) -> PyResult<Problem> {
        self.inner.load().map(|inner| Problem { inner }).map_err(pddl_err)
    }

    #[getter]
    fn robot_domain(&self) -> &str {
        &self.inner.robot_domain
    }

    #[getter]
    fn robot_problem(&self) -> &str {
        &self.inner.robot_problem
    }

    /// The overlay text, or `None` when the human side is a full domain/problem.
    #[getter]
    fn human_overlay(&self) -> Option<&str> {
        match &self.inner.human {
            HumanSide::Overlay(text) => Some(text),
            HumanSide::Full { .. } => None,
        }
    }
}

/// Generates a scenario. Size keywords: waypoints, objectives, ingredients,
/// width, height, rubble, collapsed, fluents, actions.
#[pyfunction]
#[pyo3(signature = (family, delta_size=None, seed=0, **sizes))]
fn generate(family: &str, delta_size: Option<usize>, seed: u64, sizes: Option<&Bound<'_, PyDict>>) -> PyResult<Bundle> {
    let mut spec = ScenarioSpec::new(family.parse::<Family>().map_err(scenario_err)?);
    spec.delta_size = delta_size;
    spec.seed = seed;
    if let Some(sizes) = sizes {
        for (key, value) in sizes.iter() {
            let key: String = key.extract()?;
            let value: usize = value.extract()?;
            let field = match key.as_str() {
                "waypoints" => &mut spec.waypoints,
                "objectives" => &mut spec.objectives,
                "ingredients" => &mut spec.ingredients,
                "width" => &mut spec.width,
                "height" => &mut spec.height,
                "rubble" => &mut spec.rubble,
                "collapsed" => &mut spec.collapsed,
                "fluents" => &mut spec.fluents,
                "actions" => &mut spec.actions,
                other => return Err(PyValueError::new_err(format!("unknown size `{other}`"))),
            };
            *field = Some(value);
        }
    }
    generate_scenario(&spec)
        .map(|inner| Bundle { inner })
        .map_err(scenario_err)
}

#[pymodule]
pub fn mega_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Model>()?;
    m.add_class::<Problem>()?;
    m.add_class::<Solution>()?;
    m.add_class::<Bundle>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add("PlanningError", m.py().get_type::<PlanningError>())?;
    Ok(())
}
