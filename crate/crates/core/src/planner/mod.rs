//! Cost-optimal planning over a [`Model`].
//!
//! [`optimal_plan`] runs A* guided by the admissible `h_max` heuristic.
//! [`optimal_plan_toward`] additionally tracks a reference model and, among
//! the plans optimal in the planning model, returns one that is cheapest in
//! the reference. [`blind_optimal_plan`] is a deliberately naive uniform-cost
//! search over explicit fluent sets and serves as a certification oracle.

mod search;
mod task;

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet, VecDeque};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_traits::Zero;
use thiserror::Error;

use crate::strips::{Cost, FluentSet, Model, Plan, Rational};
use search::{astar, ReferenceSpace, SingleSpace, UNDEFINED};
use task::{CostScale, FluentIndex, Task};

pub const DEFAULT_NODE_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct PlannerConfig {
    /// Maximum number of state expansions per call.
    pub node_cap: usize,
    pub time_cap: Option<Duration>,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            node_cap: DEFAULT_NODE_CAP,
            time_cap: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlannerError {
    #[error("planner expanded more than {limit} nodes")]
    NodeLimit { limit: usize },
    #[error("planner exceeded the {seconds}s time limit")]
    TimeLimit { seconds: f64 },
    #[error("action costs overflow the integer search representation")]
    CostOverflow,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanResult {
    /// `None` exactly when the goal is unreachable.
    pub plan: Option<Plan>,
    pub cost: Cost,
    pub nodes_expanded: usize,
    pub wall_time: Duration,
}

impl PlanResult {
    fn unsolvable(nodes_expanded: usize, wall_time: Duration) -> Self {
        PlanResult {
            plan: None,
            cost: Cost::Infinite,
            nodes_expanded,
            wall_time,
        }
    }
}

/// A plan optimal in one model, chosen to be cheapest in a reference model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReferencedPlan {
    pub result: PlanResult,
    /// `C(plan, reference)`; infinite when the plan is inexecutable there or
    /// misses the reference goal.
    pub reference_cost: Cost,
}

pub fn optimal_plan(model: &Model, config: &PlannerConfig) -> Result<PlanResult, PlannerError> {
    let started = Instant::now();
    let index = FluentIndex::for_models([model]);
    let scale = CostScale::for_models([model]);
    let task = Task::compile(model, &index, scale)?;
    let space = SingleSpace {
        task: &task,
        use_heuristic: true,
    };
    let outcome = astar(&space, config)?;
    let elapsed = started.elapsed();
    Ok(match outcome.found {
        Some(found) => PlanResult {
            plan: Some(Plan {
                steps: found
                    .actions
                    .iter()
                    .map(|&i| task.actions[i as usize].name.clone())
                    .collect(),
            }),
            cost: Cost::Finite(scale.to_rational(found.cost)),
            nodes_expanded: outcome.expanded,
            wall_time: elapsed,
        },
        None => PlanResult::unsolvable(outcome.expanded, elapsed),
    })
}

pub fn optimal_cost(model: &Model, config: &PlannerConfig) -> Result<Cost, PlannerError> {
    optimal_plan(model, config).map(|r| r.cost)
}

/// Among the cost-optimal plans of `model`, returns one minimizing the cost
/// of the same action sequence in `reference`.
pub fn optimal_plan_toward(
    model: &Model,
    reference: &Model,
    config: &PlannerConfig,
) -> Result<ReferencedPlan, PlannerError> {
    let started = Instant::now();
    let index = FluentIndex::for_models([model, reference]);
    let scale = CostScale::for_models([model, reference]);
    let task = Task::compile(model, &index, scale)?;
    let reference_task = Task::compile(reference, &index, scale)?;
    let by_name: HashMap<&str, u32> = reference_task
        .actions
        .iter()
        .enumerate()
        .map(|(i, a)| (a.name.as_str(), i as u32))
        .collect();
    let mapping = task
        .actions
        .iter()
        .map(|a| by_name.get(a.name.as_str()).copied())
        .collect();
    let space = ReferenceSpace {
        task: &task,
        reference: &reference_task,
        mapping,
    };
    let outcome = astar(&space, config)?;
    let elapsed = started.elapsed();
    Ok(match outcome.found {
        Some(found) => ReferencedPlan {
            result: PlanResult {
                plan: Some(Plan {
                    steps: found
                        .actions
                        .iter()
                        .map(|&i| task.actions[i as usize].name.clone())
                        .collect(),
                }),
                cost: Cost::Finite(scale.to_rational(found.cost.0)),
                nodes_expanded: outcome.expanded,
                wall_time: elapsed,
            },
            reference_cost: if found.cost.1 == UNDEFINED {
                Cost::Infinite
            } else {
                Cost::Finite(scale.to_rational(found.cost.1))
            },
        },
        None => ReferencedPlan {
            result: PlanResult::unsolvable(outcome.expanded, elapsed),
            reference_cost: Cost::Infinite,
        },
    })
}

/// Uniform-cost search without heuristic, on explicit fluent-set states and
/// exact rational costs. Intended for small models only.
pub fn blind_optimal_plan(model: &Model, config: &PlannerConfig) -> Result<PlanResult, PlannerError> {
    let started = Instant::now();
    let actions: Vec<_> = model.actions().values().collect();
    let mut best: HashMap<FluentSet, Rational> = HashMap::new();
    let mut parents: Vec<(Option<usize>, usize)> = vec![(None, usize::MAX)];
    let mut states: Vec<FluentSet> = vec![model.init().clone()];
    let mut open = BinaryHeap::new();
    let mut expanded = 0;
    best.insert(model.init().clone(), Rational::zero());
    open.push(Reverse((Rational::zero(), 0_usize)));

    while let Some(Reverse((g, node))) = open.pop() {
        let state = states[node].clone();
        if best[&state] < g {
            continue;
        }
        if model.goal().is_subset(&state) {
            let mut steps = Vec::new();
            let mut at = node;
            while let (Some(parent), action) = parents[at] {
                steps.push(actions[action].name().to_string());
                at = parent;
            }
            steps.reverse();
            return Ok(PlanResult {
                plan: Some(Plan { steps }),
                cost: Cost::Finite(g),
                nodes_expanded: expanded,
                wall_time: started.elapsed(),
            });
        }
        expanded += 1;
        if expanded > config.node_cap {
            return Err(PlannerError::NodeLimit { limit: config.node_cap });
        }
        for (i, action) in actions.iter().enumerate() {
            let Some(next) = action.apply(&state) else {
                continue;
            };
            let next_g = g + action.cost();
            if best.get(&next).is_some_and(|b| *b <= next_g) {
                continue;
            }
            best.insert(next.clone(), next_g);
            states.push(next);
            parents.push((Some(node), i));
            open.push(Reverse((next_g, states.len() - 1)));
        }
    }
    Ok(PlanResult::unsolvable(expanded, started.elapsed()))
}

/// Number of states reachable from the initial state, or `None` once more
/// than `cap` have been seen.
pub fn count_reachable_states(model: &Model, cap: usize) -> Option<usize> {
    let mut seen: HashSet<FluentSet> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(model.init().clone());
    queue.push_back(model.init().clone());
    while let Some(state) = queue.pop_front() {
        for action in model.actions().values() {
            if let Some(next) = action.apply(&state) {
                if seen.insert(next.clone()) {
                    if seen.len() > cap {
                        return None;
                    }
                    queue.push_back(next);
                }
            }
        }
    }
    Some(seen.len())
}

/// Planner with configuration and a per-model result cache, safe to share
/// across threads.
#[derive(Debug, Default)]
pub struct Planner {
    config: PlannerConfig,
    cache: Mutex<HashMap<Model, PlanResult>>,
}

impl Planner {
    pub fn new(config: PlannerConfig) -> Self {
        Planner {
            config,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn config(&self) -> &PlannerConfig {
        &self.config
    }

    pub fn optimal_plan(&self, model: &Model) -> Result<PlanResult, PlannerError> {
        if let Some(hit) = self.cache.lock().expect("planner cache poisoned").get(model) {
            return Ok(hit.clone());
        }
        let result = optimal_plan(model, &self.config)?;
        self.cache
            .lock()
            .expect("planner cache poisoned")
            .insert(model.clone(), result.clone());
        Ok(result)
    }

    pub fn optimal_cost(&self, model: &Model) -> Result<Cost, PlannerError> {
        self.optimal_plan(model).map(|r| r.cost)
    }
}
