//! Minimally complete explanation for a fixed robot plan.

use super::{map_maybe_parallel, robot_optimal_cost, HapProblem, MegaError, MegaOptions, ModelSpace};
use crate::model_space::Explanation;
use crate::planner::optimal_cost;
use crate::strips::{plan_cost, Cost, Plan};

/// Smallest set of edits after which `plan` is optimal in the human's
/// updated model. `plan` must be optimal in the robot's model.
pub fn mce_search(problem: &HapProblem, plan: &Plan, options: &MegaOptions) -> Result<Explanation, MegaError> {
    let robot_cost = robot_optimal_cost(problem, &options.planner)?;
    if plan_cost(plan, problem.robot()) != Cost::Finite(robot_cost) {
        return Err(MegaError::PlanNotOptimal);
    }
    let space = ModelSpace::new(problem, options.edits);
    let mut found = None;
    space.walk(
        |inputs| {
            map_maybe_parallel(inputs, options.parallel, |(model, explanation)| {
                let Some(model) = model else {
                    return Ok(None);
                };
                let cost = plan_cost(plan, model);
                if !cost.is_finite() {
                    return Ok(None);
                }
                let optimal = optimal_cost(model, &options.planner)?;
                Ok::<_, MegaError>((cost == optimal).then(|| explanation.clone()))
            })
        },
        |hit| {
            found = hit;
            found.is_some()
        },
    )?;
    found.ok_or(MegaError::NoExplanation)
}
