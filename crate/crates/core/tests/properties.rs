//! Property tests over randomly generated models and bundles.

use std::collections::BTreeSet;

use mega_core::mega::HapProblem;
use mega_core::model_space::{apply_edits, edits_toward, gamma, ungamma, EditOptions, Explanation, Signature};
use mega_core::pddl::{parse_domain_problem, parse_explanation, serialize_explanation, write_domain_problem};
use mega_core::planner::{optimal_cost, optimal_plan, optimal_plan_toward, PlannerConfig};
use mega_core::scenarios::{generate, Family, ScenarioSpec};
use mega_core::strips::{apply, plan_cost, progress, Cost, FluentSet, Model, Plan};
use proptest::prelude::*;

fn bundle(seed: u64, delta: usize) -> HapProblem {
    let mut spec = ScenarioSpec::new(Family::Random);
    spec.seed = seed;
    spec.fluents = Some(5);
    spec.actions = Some(5);
    spec.delta_size = Some(delta);
    generate(&spec).unwrap().load().unwrap()
}

fn plan_from(model: &Model, picks: &[usize]) -> Plan {
    let names: Vec<&String> = model.actions().keys().collect();
    Plan::new(picks.iter().map(|&i| names[i % names.len()].clone()))
}

/// Every plan reaching the goal with cost exactly `bound`, by depth-first
/// enumeration; costs are positive so the depth is bounded.
fn plans_costing(model: &Model, bound: Cost) -> Vec<Plan> {
    fn go(model: &Model, state: &FluentSet, spent: Cost, bound: Cost, prefix: &mut Vec<String>, out: &mut Vec<Plan>) {
        if spent == bound && model.goal().is_subset(state) {
            out.push(Plan::new(prefix.clone()));
        }
        for action in model.actions().values() {
            let Ok(next) = apply(state, action.name(), model) else {
                continue;
            };
            let total = spent + Cost::Finite(action.cost());
            if total > bound {
                continue;
            }
            prefix.push(action.name().to_string());
            go(model, &next, total, bound, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(model, model.init(), Cost::zero(), bound, &mut Vec::new(), &mut out);
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn empty_plan_is_identity(seed in 0_u64..1000) {
        let problem = bundle(seed, 0);
        let model = problem.robot();
        prop_assert_eq!(progress(model.init(), &Plan::default(), model).unwrap(), model.init().clone());
        let expected = if model.goal().is_subset(model.init()) { Cost::zero() } else { Cost::Infinite };
        prop_assert_eq!(plan_cost(&Plan::default(), model), expected);
    }

    #[test]
    fn executable_plan_cost_is_additive(seed in 0_u64..1000, picks in prop::collection::vec(0_usize..50, 0..6)) {
        let problem = bundle(seed, 0);
        let model = problem.robot();
        let plan = plan_from(model, &picks);
        if let Ok(end) = progress(model.init(), &plan, model) {
            let sum = plan
                .steps
                .iter()
                .fold(Cost::zero(), |acc, s| acc + Cost::Finite(model.action(s).unwrap().cost()));
            let expected = if model.goal().is_subset(&end) { sum } else { Cost::Infinite };
            prop_assert_eq!(plan_cost(&plan, model), expected);
        }
    }

    #[test]
    fn untouched_fluents_persist(seed in 0_u64..1000, pick in 0_usize..50) {
        let problem = bundle(seed, 0);
        let model = problem.robot();
        let plan = plan_from(model, &[pick]);
        let action = model.action(&plan.steps[0]).unwrap();
        if let Ok(next) = apply(model.init(), action.name(), model) {
            for fluent in model.fluents() {
                if !action.add().contains(fluent) && !action.del().contains(fluent) {
                    prop_assert_eq!(next.contains(fluent), model.init().contains(fluent));
                }
            }
            prop_assert!(action.add().is_subset(&next));
            prop_assert!(action.del().is_disjoint(&next));
        }
    }

    #[test]
    fn gamma_round_trips(seed in 0_u64..1000, delta in 0_usize..6) {
        let problem = bundle(seed, delta);
        for model in [problem.robot(), problem.human()] {
            let back = ungamma(&gamma(model), &Signature::of(model)).unwrap();
            prop_assert_eq!(&back, model);
        }
    }

    #[test]
    fn edit_order_does_not_matter(seed in 0_u64..1000, delta in 1_usize..7, rotate in 0_usize..7) {
        let problem = bundle(seed, delta);
        let mut edits = edits_toward(problem.human(), problem.robot(), EditOptions::default());
        let forward = apply_edits(problem.human(), &edits);
        edits.reverse();
        let len = edits.len();
        edits.rotate_left(rotate % len);
        let shuffled = apply_edits(problem.human(), &edits);
        prop_assert_eq!(&forward, &shuffled);
        prop_assert_eq!(forward.unwrap(), problem.robot().clone());
    }

    #[test]
    fn explanations_round_trip(seed in 0_u64..1000, delta in 0_usize..7, mask in 0_u32..128) {
        let problem = bundle(seed, delta);
        let edits = edits_toward(problem.human(), problem.robot(), EditOptions::default());
        let subset = edits.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| e.clone());
        let explanation = Explanation::new(subset).unwrap();
        let text = serialize_explanation(&explanation);
        let lines: Vec<&str> = text.lines().collect();
        let mut sorted = lines.clone();
        sorted.sort();
        prop_assert_eq!(&lines, &sorted);
        prop_assert_eq!(parse_explanation(&text, &Signature::of(problem.human())).unwrap(), explanation);
    }

    #[test]
    fn written_models_read_back(seed in 0_u64..1000, delta in 0_usize..5) {
        let problem = bundle(seed, delta);
        for model in [problem.robot(), problem.human()] {
            let mentioned: BTreeSet<_> = model.fluents().clone();
            let (domain, text) = write_domain_problem(model, "copy").unwrap();
            let back = parse_domain_problem(&domain, &text).unwrap().with_fluents(mentioned);
            prop_assert_eq!(&back, model);
        }
    }

    #[test]
    fn planner_plans_are_optimal_and_valid(seed in 0_u64..1000, delta in 0_usize..5) {
        let problem = bundle(seed, delta);
        for model in [problem.robot(), problem.human()] {
            let result = optimal_plan(model, &PlannerConfig::default()).unwrap();
            if let Some(plan) = &result.plan {
                prop_assert_eq!(plan_cost(plan, model), result.cost);
            }
        }
    }

    #[test]
    fn reference_planner_picks_the_cheapest_co_optimal_plan(seed in 0_u64..1000, delta in 1_usize..5) {
        let problem = bundle(seed, delta);
        let (model, reference) = (problem.human(), problem.robot());
        let best = optimal_cost(model, &PlannerConfig::default()).unwrap();
        let planned = optimal_plan_toward(model, reference, &PlannerConfig::default()).unwrap();
        prop_assert_eq!(planned.result.cost, best);
        if best.is_finite() {
            let plan = planned.result.plan.clone().unwrap();
            prop_assert_eq!(plan_cost(&plan, model), best);
            prop_assert_eq!(plan_cost(&plan, reference), planned.reference_cost);
            let cheapest = plans_costing(model, best)
                .iter()
                .map(|p| plan_cost(p, reference))
                .min()
                .unwrap();
            prop_assert_eq!(planned.reference_cost, cheapest);
        }
    }
}
