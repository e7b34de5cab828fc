//! Three-cell corridor fixtures with rubble between p1 and p2.

use crate::pddl::{HumanSide, ProblemBundle};

pub const DOMAIN: &str = "(define (domain corridor)
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

const ADJACENT: &str = "(adjacent p1 p2) (adjacent p2 p1) (adjacent p2 p3) (adjacent p3 p2)";

/// Problem text with the given `clear` facts in the initial state.
pub fn problem(clear: &[(&str, &str)]) -> String {
    let clear: String = clear.iter().map(|(x, y)| format!(" (clear {x} {y})")).collect();
    format!(
        "(define (problem corridor-1)
  (:domain corridor)
  (:objects p1 p2 p3 - cell)
  (:init (at p1){clear}
    {ADJACENT}
    (= (total-cost) 0))
  (:goal (and (at p3)))
  (:metric minimize (total-cost)))
"
    )
}

pub fn robot_problem() -> String {
    problem(&[("p2", "p3")])
}

/// Named robot/human pairs over the corridor.
pub fn fixtures() -> Vec<(&'static str, ProblemBundle)> {
    let human = |problem_text: String, domain: &str| ProblemBundle {
        robot_domain: DOMAIN.to_string(),
        robot_problem: robot_problem(),
        human: HumanSide::Full {
            domain: domain.to_string(),
            problem: problem_text,
        },
    };
    let pricey = DOMAIN.replace(
        "(clear ?x ?y) (increase (total-cost) 3)",
        "(clear ?x ?y) (increase (total-cost) 5)",
    );
    vec![
        ("same", human(robot_problem(), DOMAIN)),
        ("believes-open", human(problem(&[("p1", "p2"), ("p2", "p3")]), DOMAIN)),
        ("unaware-open", human(problem(&[]), DOMAIN)),
        ("mixed", human(problem(&[("p1", "p2")]), DOMAIN)),
        ("shortcut", human(problem(&[("p1", "p3"), ("p2", "p3")]), DOMAIN)),
        ("pricey-rubble", human(robot_problem(), &pricey)),
    ]
}
