//! A single rover whose store no longer has to be emptied before sampling.
//! The human's older model also expects soil and rock data from a waypoint
//! to be sent before an image is taken there, and soil data before a rock
//! sample.

use super::ScenarioError;
use crate::model_space::{Edit, ModelFluent};
use crate::pddl::{write_overlay, HumanSide, ProblemBundle};
use crate::strips::Fluent;

pub const DOMAIN: &str = "(define (domain rover)
  (:requirements :strips :typing :action-costs)
  (:types waypoint objective store camera mode lander)
  (:predicates (at ?w - waypoint) (at_lander ?l - lander ?w - waypoint)
               (can_traverse ?x ?y - waypoint) (visible ?x ?y - waypoint)
               (visible_from ?o - objective ?w - waypoint)
               (at_soil_sample ?w - waypoint) (at_rock_sample ?w - waypoint)
               (have_soil_analysis ?w - waypoint) (have_rock_analysis ?w - waypoint)
               (empty ?s - store) (full ?s - store)
               (communicated_soil_data ?w - waypoint) (communicated_rock_data ?w - waypoint)
               (supports ?c - camera ?m - mode) (have_image ?o - objective ?m - mode))
  (:functions (total-cost) - number)
  (:action navigate
    :parameters (?x ?y - waypoint)
    :precondition (and (at ?x) (can_traverse ?x ?y))
    :effect (and (at ?y) (not (at ?x)) (increase (total-cost) 1)))
  (:action sample_soil
    :parameters (?s - store ?p - waypoint)
    :precondition (and (at ?p) (at_soil_sample ?p))
    :effect (and (full ?s) (not (empty ?s)) (have_soil_analysis ?p) (not (at_soil_sample ?p))
                 (increase (total-cost) 1)))
  (:action sample_rock
    :parameters (?s - store ?p - waypoint)
    :precondition (and (at ?p) (at_rock_sample ?p))
    :effect (and (full ?s) (not (empty ?s)) (have_rock_analysis ?p) (not (at_rock_sample ?p))
                 (increase (total-cost) 1)))
  (:action drop_off
    :parameters (?s - store)
    :precondition (full ?s)
    :effect (and (empty ?s) (not (full ?s)) (increase (total-cost) 1)))
  (:action communicate_soil_data
    :parameters (?l - lander ?p ?x ?y - waypoint)
    :precondition (and (at ?x) (at_lander ?l ?y) (have_soil_analysis ?p) (visible ?x ?y))
    :effect (and (communicated_soil_data ?p) (increase (total-cost) 1)))
  (:action communicate_rock_data
    :parameters (?l - lander ?p ?x ?y - waypoint)
    :precondition (and (at ?x) (at_lander ?l ?y) (have_rock_analysis ?p) (visible ?x ?y))
    :effect (and (communicated_rock_data ?p) (increase (total-cost) 1)))
  (:action take_image
    :parameters (?p - waypoint ?o - objective ?c - camera ?m - mode)
    :precondition (and (at ?p) (visible_from ?o ?p) (supports ?c ?m))
    :effect (and (have_image ?o ?m) (increase (total-cost) 1))))
";

pub struct RoverSpec {
    pub waypoints: usize,
    pub objectives: usize,
    pub delta_size: usize,
}

fn objective_waypoint(i: usize, waypoints: usize) -> usize {
    (i - 1) % (waypoints - 1) + 1
}

fn problem(spec: &RoverSpec) -> String {
    let waypoints: Vec<String> = (0..spec.waypoints).map(|i| format!("waypoint{i}")).collect();
    let objectives: Vec<String> = (1..=spec.objectives).map(|i| format!("objective{i}")).collect();
    let mut init = vec![
        format!("(at waypoint{})", objective_waypoint(1, spec.waypoints)),
        "(at_lander general waypoint0)".to_string(),
        "(empty store)".to_string(),
        "(supports camera0 high_res)".to_string(),
    ];
    for i in 0..spec.waypoints {
        if i + 1 < spec.waypoints {
            init.push(format!("(can_traverse waypoint{i} waypoint{})", i + 1));
            init.push(format!("(can_traverse waypoint{} waypoint{i})", i + 1));
        }
        init.push(format!("(visible waypoint{i} waypoint0)"));
        if i > 0 {
            init.push(format!("(at_soil_sample waypoint{i})"));
            init.push(format!("(at_rock_sample waypoint{i})"));
        }
    }
    for i in 1..=spec.objectives {
        init.push(format!(
            "(visible_from objective{i} waypoint{})",
            objective_waypoint(i, spec.waypoints)
        ));
    }
    format!(
        "(define (problem rover-martian)
  (:domain rover)
  (:objects {} - waypoint {} - objective store - store camera0 - camera high_res - mode general - lander)
  (:init {}
    (= (total-cost) 0))
  (:goal (and (have_image objective1 high_res)))
  (:metric minimize (total-cost)))
",
        waypoints.join(" "),
        objectives.join(" "),
        init.join("\n    ")
    )
}

/// Preconditions the human adds, objective by objective.
fn candidates(spec: &RoverSpec) -> Vec<Edit> {
    let pre = |action: String, fluent: Fluent| Edit::add(ModelFluent::Precondition { action, fluent });
    let mut out = Vec::new();
    for i in 1..=spec.objectives {
        let w = format!("waypoint{}", objective_waypoint(i, spec.waypoints));
        let image = format!("take_image {w} objective{i} camera0 high_res");
        out.push(pre(image.clone(), Fluent::new("communicated_rock_data", [&w])));
        out.push(pre(image, Fluent::new("communicated_soil_data", [&w])));
        let rock = format!("sample_rock store {w}");
        let soil = format!("sample_soil store {w}");
        for edit in [
            pre(rock.clone(), Fluent::new("communicated_soil_data", [&w])),
            pre(rock, Fluent::new("empty", ["store"])),
            pre(soil, Fluent::new("empty", ["store"])),
        ] {
            // Objectives sharing a waypoint share its sampling conditions.
            if !out.contains(&edit) {
                out.push(edit);
            }
        }
    }
    out
}

pub fn candidate_count(spec: &RoverSpec) -> usize {
    if spec.waypoints < 2 {
        return 0;
    }
    candidates(spec).len()
}

pub fn generate(spec: &RoverSpec) -> Result<ProblemBundle, ScenarioError> {
    if spec.waypoints < 2 || spec.objectives < 1 {
        return Err(ScenarioError::Infeasible(
            "rover needs at least two waypoints and one objective".into(),
        ));
    }
    let candidates = candidates(spec);
    if spec.delta_size > candidates.len() {
        return Err(ScenarioError::Infeasible(format!(
            "delta_size {} exceeds the {} available conditions",
            spec.delta_size,
            candidates.len()
        )));
    }
    Ok(ProblemBundle {
        robot_domain: DOMAIN.to_string(),
        robot_problem: problem(spec),
        human: HumanSide::Overlay(write_overlay(&candidates[..spec.delta_size])),
    })
}

/// The plan the human expects when every extra condition applies.
pub fn expected_human_plan() -> Vec<&'static str> {
    vec![
        "sample_soil store waypoint1",
        "communicate_soil_data general waypoint1 waypoint1 waypoint0",
        "drop_off store",
        "sample_rock store waypoint1",
        "communicate_rock_data general waypoint1 waypoint1 waypoint0",
        "take_image waypoint1 objective1 camera0 high_res",
    ]
}
