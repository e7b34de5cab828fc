//! Model-space search balancing explicable behaviour against explanations.
//!
//! Starting from the human's belief about the robot's model, the search
//! applies unit edits toward the robot's model in uniform-cost order
//! (priority = number of edits). Every visited model is planned in; a node
//! is *eligible* when its optimal plan is executable in the robot's model.
//! For a weight `α` the objective of an eligible node is
//!
//! ```text
//! |E| + α · |C(π*, robot) − C*(robot)|
//! ```
//!
//! The search stops at the first node whose plan is optimal for the robot.
//! Since the objective is never smaller than `|E|`, no unvisited node can
//! beat the best visited one, so the visited nodes (the [`Ledger`]) answer
//! the problem for every `α` at once.

mod mce;
mod oracle;

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, BinaryHeap, HashSet};
use std::time::{Duration, Instant};

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::model_space::{
    apply_to_set, edits_toward, gamma, model_delta, ungamma, Edit, EditError, EditOptions, Explanation, ModelDelta,
    ModelFluent, Signature,
};
use crate::planner::{optimal_plan_toward, Planner, PlannerConfig, PlannerError};
use crate::strips::{format_rational, Cost, Model, Plan, Rational};

pub use mce::mce_search;
pub use oracle::{brute_force_nodes, brute_force_solution, select_brute_force, ORACLE_MAX_DELTA};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MegaError {
    #[error("robot and human models disagree on {0}")]
    Vocabulary(String),
    #[error("the robot's own planning problem has no solution")]
    UnsolvableRobot,
    #[error("no visited model yields a plan executable by the robot")]
    NoEligibleNode,
    #[error("the ledger is empty")]
    EmptyLedger,
    #[error("model difference of {size} exceeds the oracle limit of {max}")]
    DeltaTooLarge { size: usize, max: usize },
    #[error("plan is not optimal in the robot's model")]
    PlanNotOptimal,
    #[error("no explanation makes the plan optimal in the human's model")]
    NoExplanation,
    #[error("alpha must be non-negative, got {0}")]
    NegativeAlpha(String),
    #[error(transparent)]
    Planner(#[from] PlannerError),
    #[error(transparent)]
    Edit(#[from] EditError),
}

/// The robot's model `M^R` and the human's belief about it `M^R_h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HapProblem {
    robot: Model,
    human: Model,
}

impl HapProblem {
    /// Both models must share the action-name universe and fluent universe.
    pub fn new(robot: Model, human: Model) -> Result<Self, MegaError> {
        let robot_names: BTreeSet<_> = robot.actions().keys().collect();
        let human_names: BTreeSet<_> = human.actions().keys().collect();
        if let Some(name) = robot_names.symmetric_difference(&human_names).next() {
            return Err(MegaError::Vocabulary(format!("action `{name}`")));
        }
        if let Some(fluent) = robot.fluents().symmetric_difference(human.fluents()).next() {
            return Err(MegaError::Vocabulary(format!("fluent `{fluent}`")));
        }
        Ok(HapProblem { robot, human })
    }

    /// Like [`HapProblem::new`] but first extends both fluent universes to
    /// their union.
    pub fn unify(robot: Model, human: Model) -> Result<Self, MegaError> {
        let all: Vec<_> = robot.fluents().union(human.fluents()).cloned().collect();
        HapProblem::new(robot.with_fluents(all.iter().cloned()), human.with_fluents(all))
    }

    pub fn robot(&self) -> &Model {
        &self.robot
    }

    pub fn human(&self) -> &Model {
        &self.human
    }

    /// `M^R Δ M^R_h`, split by side (robot first).
    pub fn delta(&self) -> ModelDelta {
        model_delta(&self.robot, &self.human)
    }
}

/// How a popped node that ties the incumbent on the objective is treated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TieRule {
    /// Keep the incumbent unless the newcomer is strictly better on
    /// (objective, explicability penalty, |E|, sorted edit text).
    #[default]
    LowerPenalty,
    /// Replace the incumbent whenever the newcomer's objective is `<=`.
    LatestWins,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MegaOptions {
    pub edits: EditOptions,
    pub planner: PlannerConfig,
    pub tie_rule: TieRule,
    /// Plan the models of one search layer on the rayon pool.
    pub parallel: bool,
}

impl Default for MegaOptions {
    fn default() -> Self {
        MegaOptions {
            edits: EditOptions::default(),
            planner: PlannerConfig::default(),
            tie_rule: TieRule::default(),
            parallel: true,
        }
    }
}

/// A visited model together with its plan and the plan's robot cost.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchNode {
    /// `None` when the edits produce an ill-formed model (an action that
    /// would add and delete the same fluent); such nodes have no plan.
    pub model: Option<Model>,
    pub explanation: Explanation,
    pub optimal_plan: Option<Plan>,
    /// `C*` of the node's own model.
    pub cost_in_model: Cost,
    /// `C(π*, M^R)`.
    pub cost_in_robot: Cost,
    pub eligible: bool,
}

impl SearchNode {
    pub fn explanation_size(&self) -> usize {
        self.explanation.len()
    }

    /// `|C(π*, M^R) − C*_{M^R}|`, or `None` for ineligible nodes.
    pub fn penalty(&self, robot_optimal_cost: Rational) -> Option<Rational> {
        match (self.eligible, self.cost_in_robot) {
            (true, Cost::Finite(cost)) => Some((cost - robot_optimal_cost).abs()),
            _ => None,
        }
    }
}

/// Plans in `model` (when present), preferring among its optimal plans the
/// one cheapest for the robot.
pub(crate) fn evaluate_node(
    model: Option<Model>,
    explanation: Explanation,
    robot: &Model,
    config: &PlannerConfig,
) -> Result<SearchNode, PlannerError> {
    let Some(model) = model else {
        return Ok(SearchNode {
            model: None,
            explanation,
            optimal_plan: None,
            cost_in_model: Cost::Infinite,
            cost_in_robot: Cost::Infinite,
            eligible: false,
        });
    };
    let planned = optimal_plan_toward(&model, robot, config)?;
    let eligible = planned.result.plan.is_some() && planned.reference_cost.is_finite();
    Ok(SearchNode {
        model: Some(model),
        explanation,
        optimal_plan: planned.result.plan,
        cost_in_model: planned.result.cost,
        cost_in_robot: planned.reference_cost,
        eligible,
    })
}

/// `OBJ_VAL`: ∞ for ineligible nodes.
pub fn obj_val(node: &SearchNode, alpha: Rational, robot_optimal_cost: Rational) -> Cost {
    match node.penalty(robot_optimal_cost) {
        Some(penalty) => Cost::Finite(Rational::from_integer(node.explanation_size() as i64) + alpha * penalty),
        None => Cost::Infinite,
    }
}

/// Everything visited by one model-space search; independent of `α`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ledger {
    /// Popped nodes in pop order, including the terminating node.
    pub nodes: Vec<SearchNode>,
    /// `|E|` of the terminating node, if the search terminated.
    pub mce_size: Option<usize>,
    pub robot_optimal_cost: Rational,
    /// `|M^R Δ M^R_h|`.
    pub delta_size: usize,
    pub tie_rule: TieRule,
    pub wall_time: Duration,
}

impl Ledger {
    /// One row per node: `|E|`, edits, plan cost in the node's model, plan
    /// cost in the robot's model, eligibility.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record([
                "explanation_size",
                "edits",
                "plan_cost_model",
                "plan_cost_robot",
                "eligible",
            ])
            .expect("in-memory csv");
        for node in &self.nodes {
            writer
                .write_record([
                    node.explanation_size().to_string(),
                    node.explanation.lines().join("; "),
                    node.cost_in_model.to_string(),
                    node.cost_in_robot.to_string(),
                    node.eligible.to_string(),
                ])
                .expect("in-memory csv");
        }
        String::from_utf8(writer.into_inner().expect("in-memory csv")).expect("csv is utf-8")
    }
}

/// The plan and explanation chosen for one `α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub alpha: Rational,
    pub plan: Plan,
    pub explanation: Explanation,
    /// `M^R_h + E`.
    pub reconciled_model: Model,
    pub objective: Rational,
    pub explanation_size: usize,
    /// `|C(π, M^R) − C*_{M^R}|`.
    pub explicability_penalty: Rational,
    /// `C(π, M^R)`.
    pub plan_cost_in_robot: Rational,
}

impl Solution {
    pub fn summary(&self) -> String {
        format!(
            "alpha={} |E|={} penalty={} objective={}",
            format_rational(&self.alpha),
            self.explanation_size,
            format_rational(&self.explicability_penalty),
            format_rational(&self.objective)
        )
    }
}

struct Scored<'a> {
    node: &'a SearchNode,
    objective: Rational,
    penalty: Rational,
}

fn score(node: &SearchNode, alpha: Rational, robot_optimal_cost: Rational) -> Option<Scored<'_>> {
    let penalty = node.penalty(robot_optimal_cost)?;
    let objective = obj_val(node, alpha, robot_optimal_cost).finite()?;
    Some(Scored {
        node,
        objective,
        penalty,
    })
}

/// Whether `candidate` replaces `incumbent` as the minimum node.
fn replaces(candidate: &Scored<'_>, incumbent: Option<&Scored<'_>>, rule: TieRule) -> bool {
    let Some(incumbent) = incumbent else {
        return true;
    };
    match rule {
        TieRule::LatestWins => candidate.objective <= incumbent.objective,
        TieRule::LowerPenalty => {
            let order = candidate
                .objective
                .cmp(&incumbent.objective)
                .then(candidate.penalty.cmp(&incumbent.penalty))
                .then(
                    candidate
                        .node
                        .explanation_size()
                        .cmp(&incumbent.node.explanation_size()),
                )
                .then_with(|| {
                    candidate
                        .node
                        .explanation
                        .sort_key()
                        .cmp(&incumbent.node.explanation.sort_key())
                });
            order == Ordering::Less
        }
    }
}

fn to_solution(scored: &Scored<'_>, alpha: Rational) -> Solution {
    let node = scored.node;
    let reconciled_model = node.model.clone().expect("eligible nodes carry their model");
    Solution {
        alpha,
        plan: node.optimal_plan.clone().expect("eligible nodes carry a plan"),
        explanation: node.explanation.clone(),
        reconciled_model,
        objective: scored.objective,
        explanation_size: node.explanation_size(),
        explicability_penalty: scored.penalty,
        plan_cost_in_robot: node
            .cost_in_robot
            .finite()
            .expect("eligible nodes have finite robot cost"),
    }
}

fn check_alpha(alpha: Rational) -> Result<(), MegaError> {
    if alpha.is_negative() {
        return Err(MegaError::NegativeAlpha(format_rational(&alpha)));
    }
    Ok(())
}

/// Node identity inside one search: which of the edits toward the robot's
/// model have been applied.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct EditSet(Vec<u64>);

impl EditSet {
    fn empty(len: usize) -> Self {
        EditSet(vec![0; len.div_ceil(64).max(1)])
    }

    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn with(&self, i: usize) -> Self {
        let mut next = self.clone();
        next.0[i / 64] |= 1 << (i % 64);
        next
    }

    fn members(&self, len: usize) -> impl Iterator<Item = usize> + '_ {
        (0..len).filter(|&i| self.contains(i))
    }
}

/// Shared machinery for the uniform-cost walk through model space used by
/// both the MEGA search and the MCE baseline.
pub(crate) struct ModelSpace {
    pub edits: Vec<Edit>,
    base: BTreeSet<ModelFluent>,
    signature: Signature,
}

impl ModelSpace {
    pub(crate) fn new(problem: &HapProblem, options: EditOptions) -> Self {
        ModelSpace {
            edits: edits_toward(problem.human(), problem.robot(), options),
            base: gamma(problem.human()),
            signature: Signature::of(problem.human()),
        }
    }

    fn explanation(&self, set: &EditSet) -> Explanation {
        Explanation::new(set.members(self.edits.len()).map(|i| self.edits[i].clone()))
            .expect("edits toward a target touch distinct conditions")
    }

    /// The node's model, or `None` if the combination is ill-formed.
    fn model(&self, set: &EditSet) -> Result<Option<Model>, MegaError> {
        let mut conditions = self.base.clone();
        for i in set.members(self.edits.len()) {
            apply_to_set(&mut conditions, &self.edits[i])?;
        }
        Ok(ungamma(&conditions, &self.signature).ok())
    }

    /// Uniform-cost walk. Each layer of equal `|E|` is evaluated as a batch,
    /// then `visit` sees the results in pop order; returning `true` stops
    /// the walk. Returns whether it was stopped.
    pub(crate) fn walk<T, E, F, V>(&self, mut evaluate: F, mut visit: V) -> Result<bool, E>
    where
        E: From<MegaError>,
        F: FnMut(&[(Option<Model>, Explanation)]) -> Result<Vec<T>, E>,
        V: FnMut(T) -> bool,
    {
        let n = self.edits.len();
        let mut fringe: BinaryHeap<Reverse<(usize, u64, EditSet)>> = BinaryHeap::new();
        let mut seen: HashSet<EditSet> = HashSet::new();
        let mut seq = 0_u64;
        let start = EditSet::empty(n);
        seen.insert(start.clone());
        fringe.push(Reverse((0, seq, start)));
        seq += 1;

        while let Some(Reverse((depth, _, _))) = fringe.peek() {
            let depth = *depth;
            let mut layer = Vec::new();
            while fringe.peek().is_some_and(|Reverse((d, _, _))| *d == depth) {
                let Reverse((_, _, set)) = fringe.pop().expect("peeked");
                layer.push(set);
            }
            let inputs = layer
                .iter()
                .map(|set| Ok((self.model(set)?, self.explanation(set))))
                .collect::<Result<Vec<_>, MegaError>>()?;
            let evaluated = evaluate(&inputs)?;
            for (set, item) in layer.iter().zip(evaluated) {
                if visit(item) {
                    return Ok(true);
                }
                for i in 0..n {
                    if set.contains(i) {
                        continue;
                    }
                    let child = set.with(i);
                    if seen.insert(child.clone()) {
                        fringe.push(Reverse((depth + 1, seq, child)));
                        seq += 1;
                    }
                }
            }
        }
        Ok(false)
    }
}

pub(crate) fn map_maybe_parallel<I, T, E, F>(items: &[I], parallel: bool, f: F) -> Result<Vec<T>, E>
where
    I: Sync,
    T: Send,
    E: Send,
    F: Fn(&I) -> Result<T, E> + Sync + Send,
{
    if parallel && items.len() > 1 {
        items.par_iter().map(f).collect()
    } else {
        items.iter().map(f).collect()
    }
}

/// `C*_{M^R}`; errors when the robot cannot solve its own problem.
pub(crate) fn robot_optimal_cost(problem: &HapProblem, config: &PlannerConfig) -> Result<Rational, MegaError> {
    Planner::new(config.clone())
        .optimal_cost(problem.robot())?
        .finite()
        .ok_or(MegaError::UnsolvableRobot)
}

/// Runs the model-space search for one `α`, returning the chosen solution
/// and the full ledger of visited nodes.
pub fn mega_search(
    problem: &HapProblem,
    alpha: Rational,
    options: &MegaOptions,
) -> Result<(Solution, Ledger), MegaError> {
    check_alpha(alpha)?;
    let started = Instant::now();
    let robot_cost = robot_optimal_cost(problem, &options.planner)?;
    let space = ModelSpace::new(problem, options.edits);
    let robot = problem.robot();
    let target = Cost::Finite(robot_cost);

    let mut nodes: Vec<SearchNode> = Vec::new();
    let mut best: Option<usize> = None;
    let mut mce_size = None;
    space.walk(
        |inputs| {
            map_maybe_parallel(inputs, options.parallel, |(model, explanation)| {
                evaluate_node(model.clone(), explanation.clone(), robot, &options.planner).map_err(MegaError::from)
            })
        },
        |node| {
            nodes.push(node);
            let index = nodes.len() - 1;
            if let Some(candidate) = score(&nodes[index], alpha, robot_cost) {
                let incumbent = best.and_then(|b| score(&nodes[b], alpha, robot_cost));
                if replaces(&candidate, incumbent.as_ref(), options.tie_rule) {
                    best = Some(index);
                }
            }
            let done = nodes[index].cost_in_robot == target;
            if done {
                mce_size = Some(nodes[index].explanation_size());
            }
            done
        },
    )?;

    let ledger = Ledger {
        nodes,
        mce_size,
        robot_optimal_cost: robot_cost,
        delta_size: problem.delta().len(),
        tie_rule: options.tie_rule,
        wall_time: started.elapsed(),
    };
    let best = best.ok_or(MegaError::NoEligibleNode)?;
    let scored = score(&ledger.nodes[best], alpha, robot_cost).expect("best node is eligible");
    let solution = to_solution(&scored, alpha);
    Ok((solution, ledger))
}

/// Re-selects the minimum-objective node of a finished search for a new `α`.
pub fn reevaluate(ledger: &Ledger, alpha: Rational) -> Result<Solution, MegaError> {
    check_alpha(alpha)?;
    if ledger.nodes.is_empty() {
        return Err(MegaError::EmptyLedger);
    }
    let mut best: Option<Scored<'_>> = None;
    for node in &ledger.nodes {
        if let Some(candidate) = score(node, alpha, ledger.robot_optimal_cost) {
            if replaces(&candidate, best.as_ref(), ledger.tie_rule) {
                best = Some(candidate);
            }
        }
    }
    let best = best.ok_or(MegaError::NoEligibleNode)?;
    Ok(to_solution(&best, alpha))
}

/// One row of an `α` sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepRow {
    pub alpha: Rational,
    pub explanation_size: usize,
    pub plan_cost_in_robot: Rational,
    pub explicability_penalty: Rational,
    pub objective: Rational,
}

/// Searches once and re-evaluates the ledger for every `α`.
pub fn sweep_alpha(
    problem: &HapProblem,
    alphas: &[Rational],
    options: &MegaOptions,
) -> Result<(Vec<SweepRow>, Ledger), MegaError> {
    let first = alphas.first().copied().unwrap_or_else(Rational::zero);
    let (_, ledger) = mega_search(problem, first, options)?;
    let rows = alphas
        .iter()
        .map(|&alpha| {
            reevaluate(&ledger, alpha).map(|s| SweepRow {
                alpha,
                explanation_size: s.explanation_size,
                plan_cost_in_robot: s.plan_cost_in_robot,
                explicability_penalty: s.explicability_penalty,
                objective: s.objective,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((rows, ledger))
}

#[cfg(test)]
mod tests;
