//! Exhaustive enumeration of model space, used to check the search.

use num_traits::Zero;

use super::{
    evaluate_node, map_maybe_parallel, robot_optimal_cost, score, to_solution, HapProblem, MegaError, MegaOptions,
    SearchNode, Solution,
};
use crate::model_space::{apply_explanation, edits_toward, EditError, Explanation};
use crate::strips::Rational;

/// Largest edit count the oracle will enumerate (`2^n` models).
pub const ORACLE_MAX_DELTA: usize = 12;

/// Every subset of the edits toward the robot's model, evaluated, in
/// subset-mask order; also returns `C*_{M^R}`.
pub fn brute_force_nodes(
    problem: &HapProblem,
    options: &MegaOptions,
) -> Result<(Vec<SearchNode>, Rational), MegaError> {
    let robot_cost = robot_optimal_cost(problem, &options.planner)?;
    let edits = edits_toward(problem.human(), problem.robot(), options.edits);
    if edits.len() > ORACLE_MAX_DELTA {
        return Err(MegaError::DeltaTooLarge {
            size: edits.len(),
            max: ORACLE_MAX_DELTA,
        });
    }
    let masks: Vec<u32> = (0..1_u32 << edits.len()).collect();
    let nodes = map_maybe_parallel(&masks, options.parallel, |&mask| {
        let explanation = Explanation::new(
            (0..edits.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| edits[i].clone()),
        )
        .map_err(EditError::from)?;
        let model = match apply_explanation(problem.human(), &explanation) {
            Ok(model) => Some(model),
            Err(EditError::Encoding(_)) => None,
            Err(other) => return Err(MegaError::from(other)),
        };
        Ok(evaluate_node(model, explanation, problem.robot(), &options.planner)?)
    })?;
    Ok((nodes, robot_cost))
}

/// Global argmin of the objective; ties go to fewer edits, then to the
/// lexicographically smaller sorted edit list.
pub fn select_brute_force(nodes: &[SearchNode], robot_cost: Rational, alpha: Rational) -> Result<Solution, MegaError> {
    if alpha < Rational::zero() {
        return Err(MegaError::NegativeAlpha(crate::strips::format_rational(&alpha)));
    }
    let best = nodes
        .iter()
        .filter_map(|node| score(node, alpha, robot_cost))
        .min_by(|a, b| {
            a.objective
                .cmp(&b.objective)
                .then(a.node.explanation_size().cmp(&b.node.explanation_size()))
                .then_with(|| a.node.explanation.sort_key().cmp(&b.node.explanation.sort_key()))
        })
        .ok_or(MegaError::NoEligibleNode)?;
    Ok(to_solution(&best, alpha))
}

pub fn brute_force_solution(
    problem: &HapProblem,
    alpha: Rational,
    options: &MegaOptions,
) -> Result<Solution, MegaError> {
    let (nodes, robot_cost) = brute_force_nodes(problem, options)?;
    select_brute_force(&nodes, robot_cost, alpha)
}
