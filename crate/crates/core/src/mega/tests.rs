use super::*;
use crate::strips::tests::{action, corridor, set};
use crate::strips::Fluent;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn universe(models: &[&Model]) -> Vec<Fluent> {
    models.iter().flat_map(|m| m.fluents().iter().cloned()).collect()
}

/// Robot: `fast` (cost 1) and `slow` (cost 3) both reach `g`. The human
/// thinks `fast` needs `k`, which never holds.
fn fast_slow() -> HapProblem {
    let robot = Model::closed(
        [action("fast", 1, &[], &["g"], &[]), action("slow", 3, &[], &["g"], &[])],
        set(&[]),
        set(&["g"]),
    )
    .unwrap();
    let human = Model::closed(
        [
            action("fast", 1, &["k"], &["g"], &[]),
            action("slow", 3, &[], &["g"], &[]),
        ],
        set(&[]),
        set(&["g"]),
    )
    .unwrap();
    HapProblem::unify(robot, human).unwrap()
}

#[test]
fn identical_models_need_no_explanation() {
    let model = corridor();
    let problem = HapProblem::new(model.clone(), model).unwrap();
    let (solution, ledger) = mega_search(&problem, r(1, 1), &MegaOptions::default()).unwrap();
    assert!(solution.explanation.is_empty());
    assert_eq!(solution.objective, r(0, 1));
    assert_eq!(solution.plan_cost_in_robot, r(5, 1));
    assert_eq!(ledger.nodes.len(), 1);
    assert_eq!(ledger.mce_size, Some(0));
}

#[test]
fn alpha_trades_explanation_for_cost() {
    let problem = fast_slow();
    let options = MegaOptions::default();
    let (zero, _) = mega_search(&problem, r(0, 1), &options).unwrap();
    assert_eq!(zero.plan.steps, vec!["slow"]);
    assert_eq!(zero.explicability_penalty, r(2, 1));
    assert_eq!(zero.objective, r(0, 1));

    let (one, ledger) = mega_search(&problem, r(1, 1), &options).unwrap();
    assert_eq!(one.plan.steps, vec!["fast"]);
    assert_eq!(one.explanation.lines(), vec!["remove-has-precondition-fast-k"]);
    assert_eq!(one.objective, r(1, 1));
    assert_eq!(ledger.mce_size, Some(1));
    assert_eq!(ledger.delta_size, 1);
}

#[test]
fn ties_prefer_the_lower_penalty() {
    let problem = fast_slow();
    // Both nodes score 1 at α = ½.
    let (solution, _) = mega_search(&problem, r(1, 2), &MegaOptions::default()).unwrap();
    assert_eq!(solution.explanation_size, 1);
    let literal = MegaOptions {
        tie_rule: TieRule::LatestWins,
        ..MegaOptions::default()
    };
    let (solution, _) = mega_search(&problem, r(1, 2), &literal).unwrap();
    assert_eq!(solution.explanation_size, 1);
    let (solution, _) = mega_search(&problem, r(1, 4), &literal).unwrap();
    assert_eq!(solution.explanation_size, 0);
}

#[test]
fn reevaluation_matches_fresh_search() {
    let problem = fast_slow();
    let options = MegaOptions::default();
    let (_, ledger) = mega_search(&problem, r(0, 1), &options).unwrap();
    for alpha in [r(0, 1), r(1, 4), r(1, 2), r(3, 4), r(1, 1), r(5, 1)] {
        let fresh = mega_search(&problem, alpha, &options).unwrap().0;
        assert_eq!(reevaluate(&ledger, alpha).unwrap(), fresh);
    }
}

#[test]
fn oracle_agrees_on_small_problems() {
    let options = MegaOptions::default();
    for problem in [fast_slow(), corridor_believes_open()] {
        let (nodes, c) = brute_force_nodes(&problem, &options).unwrap();
        for alpha in [r(0, 1), r(1, 2), r(1, 1), r(2, 1), r(4, 1)] {
            let searched = mega_search(&problem, alpha, &options).unwrap().0;
            let brute = select_brute_force(&nodes, c, alpha).unwrap();
            assert_eq!(searched.objective, brute.objective, "alpha {alpha}");
        }
    }
}

/// Human thinks the p1-p2 passage is already clear.
fn corridor_believes_open() -> HapProblem {
    let robot = corridor();
    let human = Model::new(
        robot.fluents().clone(),
        robot.actions().clone(),
        set(&["at p1", "clear p1 p2", "clear p2 p3"]),
        robot.goal().clone(),
    )
    .unwrap();
    HapProblem::new(robot, human).unwrap()
}

#[test]
fn inexecutable_human_plan_forces_an_explanation() {
    let problem = corridor_believes_open();
    let (solution, ledger) = mega_search(&problem, r(0, 1), &MegaOptions::default()).unwrap();
    assert!(!ledger.nodes[0].eligible);
    assert_eq!(
        solution.explanation.lines(),
        vec!["remove-has-initial-state-clear p1 p2"]
    );
    assert_eq!(solution.plan_cost_in_robot, r(5, 1));
}

#[test]
fn mce_for_robot_plan() {
    let problem = fast_slow();
    let options = MegaOptions::default();
    let explanation = mce_search(&problem, &Plan::new(["fast"]), &options).unwrap();
    assert_eq!(explanation.len(), 1);
    assert_eq!(
        mce_search(&problem, &Plan::new(["slow"]), &options),
        Err(MegaError::PlanNotOptimal)
    );
}

#[test]
fn ill_formed_combinations_are_ineligible() {
    // The human thinks `x` adds `g`; the robot's `x` deletes it instead.
    let robot = Model::closed(
        [action("x", 1, &[], &[], &["g"]), action("y", 2, &[], &["g"], &[])],
        set(&[]),
        set(&["g"]),
    )
    .unwrap();
    let human = Model::closed(
        [action("x", 1, &[], &["g"], &[]), action("y", 2, &[], &["g"], &[])],
        set(&[]),
        set(&["g"]),
    )
    .unwrap();
    let problem = HapProblem::unify(robot, human).unwrap();
    let (nodes, _) = brute_force_nodes(&problem, &MegaOptions::default()).unwrap();
    let broken: Vec<_> = nodes.iter().filter(|n| n.model.is_none()).collect();
    assert_eq!(broken.len(), 1);
    assert!(!broken[0].eligible);
    let (solution, _) = mega_search(&problem, r(0, 1), &MegaOptions::default()).unwrap();
    assert_eq!(solution.plan.steps, vec!["y"]);
}

#[test]
fn unsolvable_robot_is_an_error() {
    let robot = Model::closed([action("a", 1, &["k"], &["g"], &[])], set(&[]), set(&["g"])).unwrap();
    let problem = HapProblem::new(robot.clone(), robot).unwrap();
    assert_eq!(
        mega_search(&problem, r(0, 1), &MegaOptions::default()).unwrap_err(),
        MegaError::UnsolvableRobot
    );
}

#[test]
fn negative_alpha_is_rejected() {
    let problem = fast_slow();
    assert!(matches!(
        mega_search(&problem, r(-1, 1), &MegaOptions::default()),
        Err(MegaError::NegativeAlpha(_))
    ));
}

#[test]
fn vocabulary_must_match() {
    let a = Model::closed([action("a", 1, &[], &["g"], &[])], set(&[]), set(&["g"])).unwrap();
    let b = Model::closed([action("b", 1, &[], &["g"], &[])], set(&[]), set(&["g"])).unwrap();
    assert!(matches!(HapProblem::new(a, b), Err(MegaError::Vocabulary(_))));
    let c = Model::closed([action("a", 1, &["h"], &["g"], &[])], set(&[]), set(&["g"])).unwrap();
    let d = Model::closed([action("a", 1, &[], &["g"], &[])], set(&[]), set(&["g"])).unwrap();
    assert!(HapProblem::new(c.clone(), d.clone()).is_err());
    let all = universe(&[&c, &d]);
    assert!(HapProblem::new(c.with_fluents(all.clone()), d.with_fluents(all)).is_ok());
}

#[test]
fn sweep_reuses_one_search() {
    let problem = fast_slow();
    let (rows, ledger) = sweep_alpha(&problem, &[r(0, 1), r(1, 1), r(2, 1)], &MegaOptions::default()).unwrap();
    let sizes: Vec<_> = rows.iter().map(|row| row.explanation_size).collect();
    assert_eq!(sizes, vec![0, 1, 1]);
    assert_eq!(rows[0].plan_cost_in_robot, r(3, 1));
    assert_eq!(rows[2].plan_cost_in_robot, ledger.robot_optimal_cost);
}

#[test]
fn ledger_csv_has_one_row_per_node() {
    let (_, ledger) = mega_search(&fast_slow(), r(1, 1), &MegaOptions::default()).unwrap();
    let csv = ledger.to_csv();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "explanation_size,edits,plan_cost_model,plan_cost_robot,eligible"
    );
    assert_eq!(lines.len(), ledger.nodes.len() + 1);
    assert_eq!(lines[1], "0,,3,3,true");
}

#[test]
fn serial_and_parallel_agree() {
    let problem = corridor_believes_open();
    let serial = MegaOptions {
        parallel: false,
        ..MegaOptions::default()
    };
    let a = mega_search(&problem, r(1, 1), &serial).unwrap();
    let b = mega_search(&problem, r(1, 1), &MegaOptions::default()).unwrap();
    assert_eq!(a.0, b.0);
    assert_eq!(a.1.nodes, b.1.nodes);
}
