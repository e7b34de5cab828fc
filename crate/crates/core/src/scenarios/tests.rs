use super::*;
use crate::mega::{mega_search, sweep_alpha, MegaOptions};
use crate::pddl::serialize_explanation;
use crate::planner::{optimal_plan, PlannerConfig};
use crate::strips::{plan_cost, Cost, Plan, Rational};

fn r(n: i64) -> Rational {
    Rational::from_integer(n)
}

#[test]
fn usar_demo_explanations() {
    let problem = usar::demo().load().unwrap();
    assert_eq!(problem.delta().len(), 3);
    let options = MegaOptions::default();
    let (low, ledger) = mega_search(&problem, r(0), &options).unwrap();
    assert_eq!(
        serialize_explanation(&low.explanation),
        "Explanation >> remove-has-initial-state-clear_path p1 p8\n"
    );
    assert_eq!(low.plan_cost_in_robot, r(7));
    assert!(low.plan.steps.contains(&"clear_passage p2 p3".to_string()));
    assert_eq!(ledger.robot_optimal_cost, r(4));

    let (high, _) = mega_search(&problem, r(10), &options).unwrap();
    assert_eq!(
        serialize_explanation(&high.explanation),
        "Explanation >> add-has-initial-state-clear_path p6 p7\n\
         Explanation >> add-has-initial-state-clear_path p7 p5\n\
         Explanation >> remove-has-initial-state-clear_path p1 p8\n"
    );
    assert_eq!(
        high.plan.steps,
        vec!["move p1 p6", "move p6 p7", "move p7 p5", "take_picture p5"]
    );
}

#[test]
fn usar_demo_sweep() {
    let problem = usar::demo().load().unwrap();
    let alphas = [r(0), Rational::new(1, 2), r(1), r(2)];
    let (rows, _) = sweep_alpha(&problem, &alphas, &MegaOptions::default()).unwrap();
    let sizes: Vec<_> = rows.iter().map(|row| row.explanation_size).collect();
    assert_eq!(sizes, vec![1, 1, 3, 3]);
}

#[test]
fn usar_human_expects_the_blocked_path() {
    let problem = usar::demo().load().unwrap();
    let human = optimal_plan(problem.human(), &PlannerConfig::default()).unwrap();
    assert_eq!(
        human.plan.unwrap().steps,
        vec!["move p1 p8", "move p8 p5", "take_picture p5"]
    );
}

fn levels(bundle: &crate::pddl::ProblemBundle, alphas: &[Rational]) -> Vec<(usize, Rational)> {
    let problem = bundle.load().unwrap();
    let (rows, _) = sweep_alpha(&problem, alphas, &MegaOptions::default()).unwrap();
    rows.iter()
        .map(|row| (row.explanation_size, row.plan_cost_in_robot))
        .collect()
}

#[test]
fn rover_levels() {
    let spec = ScenarioSpec::new(Family::RoverMartian);
    let bundle = generate(&spec).unwrap();
    let problem = bundle.load().unwrap();
    assert_eq!(problem.delta().len(), 5);
    let expected = Plan::new(rover::expected_human_plan());
    let human_cost = optimal_plan(problem.human(), &PlannerConfig::default()).unwrap().cost;
    assert_eq!(human_cost, Cost::from_integer(6));
    assert_eq!(plan_cost(&expected, problem.human()), human_cost);
    assert_eq!(plan_cost(&expected, problem.robot()), Cost::from_integer(6));
    let robot = optimal_plan(problem.robot(), &PlannerConfig::default()).unwrap();
    assert_eq!(
        robot.plan.unwrap().steps,
        vec!["take_image waypoint1 objective1 camera0 high_res"]
    );
    let found = levels(&bundle, &[r(0), Rational::new(2, 5), r(1)]);
    assert_eq!(found, vec![(0, r(6)), (1, r(3)), (2, r(1))]);
}

#[test]
fn barman_levels() {
    let bundle = generate(&ScenarioSpec::new(Family::BarmanBar)).unwrap();
    let problem = bundle.load().unwrap();
    assert_eq!(problem.delta().len(), 6);
    let human = optimal_plan(problem.human(), &PlannerConfig::default()).unwrap();
    assert_eq!(human.cost, Cost::from_integer(9));
    let found = levels(&bundle, &[r(0), Rational::new(3, 4), r(2)]);
    assert_eq!(found, vec![(0, r(9)), (1, r(7)), (2, r(6))]);
}

#[test]
fn generated_delta_is_exact() {
    for delta in 0..=5 {
        let mut spec = ScenarioSpec::new(Family::RoverMartian);
        spec.objectives = Some(2);
        spec.delta_size = Some(delta);
        assert_eq!(generate(&spec).unwrap().load().unwrap().delta().len(), delta);

        let mut spec = ScenarioSpec::new(Family::UsarGrid);
        spec.delta_size = Some(delta.max(1));
        spec.seed = delta as u64;
        assert_eq!(generate(&spec).unwrap().load().unwrap().delta().len(), delta.max(1));

        let mut spec = ScenarioSpec::new(Family::Random);
        spec.delta_size = Some(delta);
        spec.seed = 7;
        assert_eq!(generate(&spec).unwrap().load().unwrap().delta().len(), delta);
    }
}

#[test]
fn generation_is_deterministic() {
    for family in [Family::UsarGrid, Family::Random] {
        let mut spec = ScenarioSpec::new(family);
        spec.seed = 42;
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
    }
}

#[test]
fn robot_side_is_solvable() {
    for seed in 0..20 {
        let mut spec = ScenarioSpec::new(Family::Random);
        spec.seed = seed;
        let problem = generate(&spec).unwrap().load().unwrap();
        assert!(optimal_plan(problem.robot(), &PlannerConfig::default())
            .unwrap()
            .cost
            .is_finite());
    }
}

#[test]
fn zero_delta_needs_no_explanation() {
    let mut spec = ScenarioSpec::new(Family::Random);
    spec.delta_size = Some(0);
    let problem = generate(&spec).unwrap().load().unwrap();
    let (solution, _) = mega_search(&problem, r(1), &MegaOptions::default()).unwrap();
    assert!(solution.explanation.is_empty());
    assert_eq!(solution.objective, r(0));
}

#[test]
fn infeasible_specs() {
    let mut spec = ScenarioSpec::new(Family::BarmanBar);
    spec.delta_size = Some(100);
    assert!(matches!(generate(&spec), Err(ScenarioError::Infeasible(_))));
    let mut spec = ScenarioSpec::new(Family::UsarDemo);
    spec.delta_size = Some(2);
    assert!(matches!(generate(&spec), Err(ScenarioError::Infeasible(_))));
}

#[test]
fn config_round_trip() {
    let spec = ScenarioSpec::from_config("family = \"usar-grid\"\nwidth = 4\nseed = 3\ndelta_size = 2\n").unwrap();
    assert_eq!(spec.family, Family::UsarGrid);
    assert_eq!(spec.width, Some(4));
    assert_eq!(ScenarioSpec::from_config(&spec.to_config()).unwrap(), spec);
    assert!(ScenarioSpec::from_config("family = \"usar-grid\"\nbogus = 1\n").is_err());
}

#[test]
fn corridor_fixtures_load() {
    for (name, bundle) in corridor::fixtures() {
        let problem = bundle.load().unwrap_or_else(|e| panic!("{name}: {e}"));
        let cost = optimal_plan(problem.robot(), &PlannerConfig::default()).unwrap().cost;
        assert_eq!(cost, Cost::from_integer(5), "{name}");
    }
}
