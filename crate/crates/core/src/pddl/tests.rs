use super::*;
use crate::model_space::{model_delta, Edit, Explanation, ModelFluent, Signature};
use crate::planner::{optimal_plan, PlannerConfig};
use crate::strips::{Fluent, Rational};

const CORRIDOR_DOMAIN: &str = "
(define (domain corridor)
  (:requirements :strips :typing :equality :action-costs)
  (:types cell)
  (:predicates (at ?x - cell) (clear ?x ?y - cell) (adjacent ?x ?y - cell))
  (:functions (total-cost) - number)
  (:action move
    :parameters (?x ?y - cell)
    :precondition (and (at ?x) (clear ?x ?y) (not (= ?x ?y)))
    :effect (and (at ?y) (not (at ?x)) (increase (total-cost) 1)))
  (:action clear_rubble
    :parameters (?x ?y - cell)
    :precondition (and (at ?x) (adjacent ?x ?y))
    :effect (and (clear ?x ?y) (increase (total-cost) 3))))
";

const CORRIDOR_PROBLEM: &str = "
(define (problem corridor-1)
  (:domain corridor)
  (:objects p1 p2 p3 - cell)
  (:init (at p1) (clear p2 p3)
         (adjacent p1 p2) (adjacent p2 p1) (adjacent p2 p3) (adjacent p3 p2)
         (= (total-cost) 0))
  (:goal (and (at p3)))
  (:metric minimize (total-cost)))
";

#[test]
fn grounds_the_corridor() {
    let model = parse_domain_problem(CORRIDOR_DOMAIN, CORRIDOR_PROBLEM).unwrap();
    let moves: Vec<_> = model.actions().keys().filter(|k| k.starts_with("move ")).collect();
    assert_eq!(moves.len(), 6);
    assert!(model.action("move p1 p2").is_some());
    assert!(model.action("move p1 p1").is_none());
    let clears: Vec<_> = model
        .actions()
        .keys()
        .filter(|k| k.starts_with("clear_rubble"))
        .collect();
    assert_eq!(clears.len(), 4);
    assert!(model.action("clear_rubble p1 p3").is_none());
    let result = optimal_plan(&model, &PlannerConfig::default()).unwrap();
    assert_eq!(result.cost.finite(), Some(Rational::from_integer(5)));
    assert_eq!(
        result.plan.unwrap().steps,
        vec!["clear_rubble p1 p2", "move p1 p2", "move p2 p3"]
    );
    for action in model.actions().values() {
        assert!(action.mentioned().all(|f| model.fluents().contains(f)));
    }
}

#[test]
fn empty_goal_is_allowed() {
    let problem = CORRIDOR_PROBLEM.replace("(:goal (and (at p3)))", "(:goal (and))");
    let model = parse_domain_problem(CORRIDOR_DOMAIN, &problem).unwrap();
    assert!(model.goal().is_empty());
}

#[test]
fn default_cost_without_action_costs() {
    let domain = "(define (domain d) (:predicates (g)) (:action a :parameters () :effect (g)))";
    let problem = "(define (problem p) (:domain d) (:goal (g)))";
    let model = parse_domain_problem(domain, problem).unwrap();
    assert_eq!(model.action("a").unwrap().cost(), Rational::from_integer(1));
}

#[test]
fn undeclared_names() {
    let problem = CORRIDOR_PROBLEM.replace("(at p1)", "(at p9)");
    assert_eq!(
        parse_domain_problem(CORRIDOR_DOMAIN, &problem),
        Err(PddlError::Undeclared {
            kind: "object",
            name: "p9".into()
        })
    );
    let problem = CORRIDOR_PROBLEM.replace("- cell)", "- room)");
    assert!(matches!(
        parse_domain_problem(CORRIDOR_DOMAIN, &problem),
        Err(PddlError::Undeclared { kind: "type", .. })
    ));
    let problem = CORRIDOR_PROBLEM.replace("(at p3)", "(on p3)");
    assert!(matches!(
        parse_domain_problem(CORRIDOR_DOMAIN, &problem),
        Err(PddlError::Undeclared { kind: "predicate", .. })
    ));
}

#[test]
fn conditional_effects_are_rejected() {
    let domain = CORRIDOR_DOMAIN.replace("(clear ?x ?y) (increase", "(when (at ?y) (clear ?x ?y)) (increase");
    assert!(matches!(
        parse_domain_problem(&domain, CORRIDOR_PROBLEM),
        Err(PddlError::Unsupported { construct, .. }) if construct == "conditional effects"
    ));
}

#[test]
fn syntax_errors_carry_positions() {
    let err = parse_domain_problem("(define (domain d)\n  (:predicates (g)", CORRIDOR_PROBLEM).unwrap_err();
    assert!(matches!(err, PddlError::Syntax { line: 2, .. }), "{err:?}");
}

#[test]
fn type_hierarchy() {
    let domain = "(define (domain d) (:requirements :typing)
        (:types rover camera - device device)
        (:predicates (on ?d - device))
        (:action power :parameters (?d - device) :effect (on ?d)))";
    let problem = "(define (problem p) (:domain d) (:objects r1 - rover c1 c2 - camera) (:goal (on c2)))";
    let model = parse_domain_problem(domain, problem).unwrap();
    let names: Vec<_> = model.actions().keys().cloned().collect();
    assert_eq!(names, vec!["power c1", "power c2", "power r1"]);
}

#[test]
fn pair_grounding_unions_bindings() {
    // The human believes a passage p1-p3 can be cleared.
    let human = CORRIDOR_PROBLEM.replace("(adjacent p3 p2)", "(adjacent p3 p2) (adjacent p1 p3)");
    let (robot, human) = ground_pair((CORRIDOR_DOMAIN, CORRIDOR_PROBLEM), (CORRIDOR_DOMAIN, &human)).unwrap();
    assert_eq!(
        robot.actions().keys().collect::<Vec<_>>(),
        human.actions().keys().collect::<Vec<_>>()
    );
    assert!(robot.action("clear_rubble p1 p3").is_some());
    let bundle = ProblemBundle {
        robot_domain: CORRIDOR_DOMAIN.into(),
        robot_problem: CORRIDOR_PROBLEM.into(),
        human: HumanSide::Full {
            domain: CORRIDOR_DOMAIN.into(),
            problem: CORRIDOR_PROBLEM.replace("(adjacent p3 p2)", "(adjacent p3 p2) (adjacent p1 p3)"),
        },
    };
    let problem = bundle.load().unwrap();
    assert_eq!(problem.delta().len(), 1);
}

#[test]
fn mismatched_schemas_are_rejected() {
    let human = CORRIDOR_DOMAIN.replace("(:action move", "(:action walk");
    assert!(matches!(
        ground_pair((CORRIDOR_DOMAIN, CORRIDOR_PROBLEM), (&human, CORRIDOR_PROBLEM)),
        Err(PddlError::VocabularyMismatch(_))
    ));
}

#[test]
fn identical_sides_have_no_delta() {
    let bundle = ProblemBundle {
        robot_domain: CORRIDOR_DOMAIN.into(),
        robot_problem: CORRIDOR_PROBLEM.into(),
        human: HumanSide::Full {
            domain: CORRIDOR_DOMAIN.into(),
            problem: CORRIDOR_PROBLEM.into(),
        },
    };
    assert!(bundle.load().unwrap().delta().is_empty());
}

#[test]
fn overlay_reproduces_the_human_model() {
    let overlay = "# human view\nadd-has-initial-state-clear p1 p2\nExplanation >> remove-has-precondition-move p2 p3-clear p2 p3\n";
    let bundle = ProblemBundle {
        robot_domain: CORRIDOR_DOMAIN.into(),
        robot_problem: CORRIDOR_PROBLEM.into(),
        human: HumanSide::Overlay(overlay.into()),
    };
    let problem = bundle.load().unwrap();
    let delta = problem.delta();
    assert_eq!(delta.len(), 2);
    assert!(delta
        .only_in_second
        .contains(&ModelFluent::Init(Fluent::new("clear", ["p1", "p2"]))));
}

#[test]
fn overlay_noop_is_an_error() {
    let robot = parse_domain_problem(CORRIDOR_DOMAIN, CORRIDOR_PROBLEM).unwrap();
    let err = apply_overlay(&robot, "\n\nadd-has-initial-state-at p1\n").unwrap_err();
    assert!(matches!(err, PddlError::Overlay { line: 3, .. }), "{err:?}");
}

#[test]
fn explanation_round_trip() {
    let robot = parse_domain_problem(CORRIDOR_DOMAIN, CORRIDOR_PROBLEM).unwrap();
    let explanation = Explanation::new([
        Edit::remove(ModelFluent::Init(Fluent::new("clear", ["p2", "p3"]))),
        Edit::add(ModelFluent::Goal(Fluent::new("at", ["p2"]))),
    ])
    .unwrap();
    let text = serialize_explanation(&explanation);
    assert_eq!(
        text,
        "Explanation >> add-has-goal-state-at p2\nExplanation >> remove-has-initial-state-clear p2 p3\n"
    );
    assert_eq!(parse_explanation(&text, &Signature::of(&robot)).unwrap(), explanation);
    assert_eq!(serialize_explanation(&Explanation::default()), "");
}

#[test]
fn writer_round_trips_identifier_models() {
    let domain = "(define (domain d) (:requirements :action-costs) (:constants a b)
        (:predicates (at ?x) (done))
        (:action go :parameters () :precondition (and (at a)) :effect (and (at b) (not (at a)) (increase (total-cost) 2.5)))
        (:action finish :parameters () :precondition (at b) :effect (and (done) (increase (total-cost) 1))))";
    let problem = "(define (problem p) (:domain d) (:init (at a)) (:goal (done)))";
    let model = parse_domain_problem(domain, problem).unwrap();
    let (d, p) = write_domain_problem(&model, "copy").unwrap();
    let again = parse_domain_problem(&d, &p).unwrap();
    assert_eq!(again, model);
    assert!(model_delta(&again, &model).is_empty());
}

#[test]
fn writer_rejects_grounded_names() {
    let model = parse_domain_problem(CORRIDOR_DOMAIN, CORRIDOR_PROBLEM).unwrap();
    assert!(matches!(
        write_domain_problem(&model, "c"),
        Err(PddlError::Unwritable(_))
    ));
}

#[test]
fn bundle_files_round_trip() {
    let dir = std::env::temp_dir().join(format!("mega-bundle-{}", std::process::id()));
    let bundle = ProblemBundle {
        robot_domain: CORRIDOR_DOMAIN.into(),
        robot_problem: CORRIDOR_PROBLEM.into(),
        human: HumanSide::Overlay("add-has-initial-state-clear p1 p2\n".into()),
    };
    bundle.write(&dir).unwrap();
    assert_eq!(ProblemBundle::read(&dir).unwrap(), bundle);
    assert_eq!(ProblemBundle::read(dir.join(MANIFEST)).unwrap(), bundle);
    assert_eq!(load_bundle(&dir).unwrap().delta().len(), 1);
    std::fs::remove_dir_all(&dir).unwrap();
}
