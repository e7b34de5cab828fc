//! A two-handed barman. The human expects the other hand to be free while
//! filling a shot or shaking, as for a one-handed robot.

use super::ScenarioError;
use crate::model_space::{Edit, ModelFluent};
use crate::pddl::{write_overlay, HumanSide, ProblemBundle};
use crate::strips::Fluent;

pub const DOMAIN: &str = "(define (domain barman)
  (:requirements :strips :typing :equality :action-costs)
  (:types hand container ingredient dispenser - object shot shaker - container)
  (:predicates (holding ?h - hand ?c - container) (handempty ?h - hand) (ontable ?c - container)
               (empty ?s - shot) (shot_contains ?s - shot ?i - ingredient)
               (contains ?k - shaker ?i - ingredient) (shaked ?k - shaker)
               (dispenses ?d - dispenser ?i - ingredient))
  (:functions (total-cost) - number)
  (:action grasp
    :parameters (?h - hand ?c - container)
    :precondition (and (ontable ?c) (handempty ?h))
    :effect (and (holding ?h ?c) (not (ontable ?c)) (not (handempty ?h)) (increase (total-cost) 1)))
  (:action leave
    :parameters (?h - hand ?c - container)
    :precondition (holding ?h ?c)
    :effect (and (ontable ?c) (handempty ?h) (not (holding ?h ?c)) (increase (total-cost) 1)))
  (:action fill-shot
    :parameters (?s - shot ?i - ingredient ?h1 ?h2 - hand ?d - dispenser)
    :precondition (and (holding ?h1 ?s) (empty ?s) (dispenses ?d ?i) (not (= ?h1 ?h2)))
    :effect (and (shot_contains ?s ?i) (not (empty ?s)) (increase (total-cost) 1)))
  (:action pour-shot-to-shaker
    :parameters (?s - shot ?i - ingredient ?k - shaker ?h1 ?h2 - hand)
    :precondition (and (holding ?h1 ?s) (shot_contains ?s ?i) (holding ?h2 ?k) (not (= ?h1 ?h2)))
    :effect (and (contains ?k ?i) (empty ?s) (not (shot_contains ?s ?i)) (not (shaked ?k))
                 (increase (total-cost) 1)))
  (:action shake
    :parameters (?k - shaker ?h1 ?h2 - hand)
    :precondition (and (holding ?h1 ?k) (not (= ?h1 ?h2)))
    :effect (and (shaked ?k) (increase (total-cost) 1))))
";

pub struct BarmanSpec {
    pub ingredients: usize,
    pub delta_size: usize,
}

fn problem(spec: &BarmanSpec) -> String {
    let ingredients: Vec<String> = (1..=spec.ingredients).map(|i| format!("ingredient{i}")).collect();
    let dispensers: Vec<String> = (1..=spec.ingredients).map(|i| format!("dispenser{i}")).collect();
    let mut init = vec![
        "(holding left shot1)".to_string(),
        "(handempty right)".to_string(),
        "(empty shot1)".to_string(),
        "(ontable shaker1)".to_string(),
    ];
    let mut goal = Vec::new();
    for i in 1..=spec.ingredients {
        init.push(format!("(dispenses dispenser{i} ingredient{i})"));
        goal.push(format!("(contains shaker1 ingredient{i})"));
    }
    goal.push("(shaked shaker1)".to_string());
    format!(
        "(define (problem barman-bar)
  (:domain barman)
  (:objects left right - hand shot1 - shot shaker1 - shaker {} - ingredient {} - dispenser)
  (:init {}
    (= (total-cost) 0))
  (:goal (and {}))
  (:metric minimize (total-cost)))
",
        ingredients.join(" "),
        dispensers.join(" "),
        init.join("\n    "),
        goal.join(" ")
    )
}

/// `handempty` of the other hand on every fill and shake, those the robot's
/// own plans use first.
fn candidates(spec: &BarmanSpec) -> Vec<Edit> {
    let pre = |action: String, hand: &str| {
        Edit::add(ModelFluent::Precondition {
            action,
            fluent: Fluent::new("handempty", [hand]),
        })
    };
    let mut out = vec![pre("shake shaker1 right left".into(), "left")];
    for (h1, h2) in [("left", "right"), ("right", "left")] {
        for i in (1..=spec.ingredients).rev() {
            out.push(pre(format!("fill-shot shot1 ingredient{i} {h1} {h2} dispenser{i}"), h2));
        }
    }
    out.push(pre("shake shaker1 left right".into(), "right"));
    out
}

pub fn generate(spec: &BarmanSpec) -> Result<ProblemBundle, ScenarioError> {
    if spec.ingredients < 1 {
        return Err(ScenarioError::Infeasible("barman needs at least one ingredient".into()));
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
