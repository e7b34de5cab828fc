//! Search-and-rescue maps. Waypoints are joined by passages; a robot moves
//! along a passage only if its direction is clear. Rubble can be cleared at
//! a cost; the human's map predates collapses that opened or closed passages.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ScenarioError;
use crate::model_space::{Edit, ModelFluent};
use crate::pddl::{parse_domain_problem, write_overlay, HumanSide, ProblemBundle};
use crate::planner::{optimal_cost, PlannerConfig};
use crate::strips::Fluent;

pub const DOMAIN: &str = "(define (domain usar)
  (:requirements :strips :typing :equality :action-costs)
  (:types waypoint)
  (:predicates (robot_at ?x - waypoint) (connected ?x ?y - waypoint) (clear_path ?x ?y - waypoint)
               (rubble ?x ?y - waypoint) (picture_taken ?x - waypoint))
  (:functions (total-cost) - number)
  (:action move
    :parameters (?x ?y - waypoint)
    :precondition (and (robot_at ?x) (connected ?x ?y) (clear_path ?x ?y))
    :effect (and (robot_at ?y) (not (robot_at ?x)) (increase (total-cost) 1)))
  (:action clear_passage
    :parameters (?x ?y - waypoint)
    :precondition (and (robot_at ?x) (rubble ?x ?y))
    :effect (and (clear_path ?x ?y) (increase (total-cost) 2)))
  (:action take_picture
    :parameters (?x - waypoint)
    :precondition (robot_at ?x)
    :effect (and (picture_taken ?x) (increase (total-cost) 1))))
";

type Pair = (String, String);

/// A map as seen by the robot, plus the directed passages the human
/// believes in differently.
pub struct UsarMap {
    pub waypoints: Vec<String>,
    pub start: String,
    pub target: String,
    pub connected: BTreeSet<Pair>,
    pub rubble: BTreeSet<Pair>,
    pub clear: BTreeSet<Pair>,
    /// Clear for the robot, unknown to the human.
    pub opened: BTreeSet<Pair>,
    /// Believed clear by the human, blocked in reality.
    pub closed: BTreeSet<Pair>,
}

fn pair(x: &str, y: &str) -> Pair {
    (x.to_string(), y.to_string())
}

fn facts(name: &str, pairs: &BTreeSet<Pair>) -> String {
    pairs.iter().map(|(x, y)| format!(" ({name} {x} {y})")).collect()
}

impl UsarMap {
    pub fn robot_problem(&self) -> String {
        let clear: BTreeSet<Pair> = self.clear.union(&self.opened).cloned().collect();
        format!(
            "(define (problem usar-map)
  (:domain usar)
  (:objects {} - waypoint)
  (:init (robot_at {})
   {}
   {}
   {}
   (= (total-cost) 0))
  (:goal (and (picture_taken {})))
  (:metric minimize (total-cost)))
",
            self.waypoints.join(" "),
            self.start,
            facts("connected", &self.connected),
            facts("rubble", &self.rubble),
            facts("clear_path", &clear),
            self.target
        )
    }

    /// Edits turning the robot's map into the human's.
    pub fn overlay(&self) -> String {
        let fact = |(x, y): &Pair| ModelFluent::Init(Fluent::new("clear_path", [x, y]));
        let mut edits: Vec<Edit> = self.opened.iter().map(|p| Edit::remove(fact(p))).collect();
        edits.extend(self.closed.iter().map(|p| Edit::add(fact(p))));
        write_overlay(&edits)
    }

    pub fn bundle(&self) -> ProblemBundle {
        ProblemBundle {
            robot_domain: DOMAIN.to_string(),
            robot_problem: self.robot_problem(),
            human: HumanSide::Overlay(self.overlay()),
        }
    }
}

/// The demonstration map. From p1 the picture spot p5 is reachable three
/// ways: p1-p8-p5 (what the human expects, but p1-p8 is now blocked and
/// cannot be cleared), p1-p6-p7-p5 (through two walls that collapsed, cost
/// 4) and p1-p2-p3-p4-p5 (rubble between p2 and p3, cost 7 with clearing).
pub fn demo_map() -> UsarMap {
    let waypoints: Vec<String> = (1..=8).map(|i| format!("p{i}")).collect();
    let passages = [
        ("p1", "p2"),
        ("p2", "p3"),
        ("p3", "p4"),
        ("p4", "p5"),
        ("p1", "p6"),
        ("p6", "p7"),
        ("p7", "p5"),
        ("p1", "p8"),
        ("p8", "p5"),
    ];
    let mut connected = BTreeSet::new();
    for (x, y) in passages {
        connected.insert(pair(x, y));
        connected.insert(pair(y, x));
    }
    let mut clear = BTreeSet::new();
    for (x, y) in [("p1", "p2"), ("p3", "p4"), ("p4", "p5"), ("p1", "p6"), ("p8", "p5")] {
        clear.insert(pair(x, y));
        clear.insert(pair(y, x));
    }
    UsarMap {
        waypoints,
        start: "p1".into(),
        target: "p5".into(),
        connected,
        rubble: [pair("p2", "p3"), pair("p3", "p2")].into(),
        clear,
        opened: [pair("p6", "p7"), pair("p7", "p5")].into(),
        closed: [pair("p1", "p8")].into(),
    }
}

pub fn demo() -> ProblemBundle {
    demo_map().bundle()
}

pub struct GridSpec {
    pub width: usize,
    pub height: usize,
    pub rubble: usize,
    pub collapsed: usize,
    pub delta_size: usize,
    pub seed: u64,
}

const GRID_ATTEMPTS: usize = 200;

/// Random grid map. `rubble` passages need clearing; `collapsed` directed
/// passages are open but unknown to the human; the remaining
/// `delta_size - collapsed` directed passages are believed open but blocked.
pub fn grid(spec: &GridSpec) -> Result<ProblemBundle, ScenarioError> {
    if spec.width * spec.height < 2 {
        return Err(ScenarioError::Infeasible("grid needs at least two waypoints".into()));
    }
    if spec.collapsed > spec.delta_size {
        return Err(ScenarioError::Infeasible("collapsed exceeds delta_size".into()));
    }
    let name = |x: usize, y: usize| format!("p{}", y * spec.width + x + 1);
    let mut passages = Vec::new();
    for y in 0..spec.height {
        for x in 0..spec.width {
            if x + 1 < spec.width {
                passages.push((name(x, y), name(x + 1, y)));
            }
            if y + 1 < spec.height {
                passages.push((name(x, y), name(x, y + 1)));
            }
        }
    }
    let changed = spec.delta_size;
    if spec.rubble + changed > passages.len() {
        return Err(ScenarioError::Infeasible(format!(
            "{} passages cannot hold {} rubble and {} changes",
            passages.len(),
            spec.rubble,
            changed
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for _ in 0..GRID_ATTEMPTS {
        let mut shuffled = passages.clone();
        shuffled.shuffle(&mut rng);
        let (rubble, rest) = shuffled.split_at(spec.rubble);
        let (changed_passages, open) = rest.split_at(changed);
        let directed = |(x, y): &Pair, flip: bool| if flip { pair(y, x) } else { pair(x, y) };
        let mut opened = BTreeSet::new();
        let mut closed = BTreeSet::new();
        let mut clear = BTreeSet::new();
        for (i, p) in changed_passages.iter().enumerate() {
            let forward = rand::Rng::gen_bool(&mut rng, 0.5);
            if i < spec.collapsed {
                opened.insert(directed(p, !forward));
            } else {
                closed.insert(directed(p, !forward));
                clear.insert(directed(p, forward));
            }
        }
        for p in open {
            clear.insert(directed(p, false));
            clear.insert(directed(p, true));
        }
        let mut rubble_set = BTreeSet::new();
        for p in rubble {
            rubble_set.insert(directed(p, false));
            rubble_set.insert(directed(p, true));
        }
        let connected = passages
            .iter()
            .flat_map(|p| [directed(p, false), directed(p, true)])
            .collect();
        let map = UsarMap {
            waypoints: (0..spec.width * spec.height).map(|i| format!("p{}", i + 1)).collect(),
            start: name(0, 0),
            target: name(spec.width - 1, spec.height - 1),
            connected,
            rubble: rubble_set,
            clear,
            opened,
            closed,
        };
        let robot = parse_domain_problem(DOMAIN, &map.robot_problem())?;
        if optimal_cost(&robot, &PlannerConfig::default())?.is_finite() {
            return Ok(map.bundle());
        }
    }
    Err(ScenarioError::RetryBudget {
        attempts: GRID_ATTEMPTS,
    })
}
