//! Best-first search engine shared by the single-model planner and the
//! reference-aware (lexicographic) planner.

use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};
use std::hash::Hash;
use std::ops::Add;
use std::time::Instant;

use super::task::{Bits, Task};
use super::{PlannerConfig, PlannerError};

pub(crate) trait SearchSpace {
    type State: Clone + Eq + Hash;
    type Cost: Copy + Ord + Add<Output = Self::Cost>;

    fn zero(&self) -> Self::Cost;
    fn initial(&self) -> Self::State;
    /// `None` prunes the state as a dead end.
    fn heuristic(&self, state: &Self::State) -> Option<Self::Cost>;
    fn expand(&self, state: &Self::State, out: &mut Vec<(u32, Self::State, Self::Cost)>);
    /// Cost of stopping in `state`, or `None` when it is not a goal state.
    fn terminal_cost(&self, state: &Self::State) -> Option<Self::Cost>;
}

pub(crate) struct Found<C> {
    pub actions: Vec<u32>,
    pub cost: C,
}

pub(crate) struct Outcome<C> {
    pub found: Option<Found<C>>,
    pub expanded: usize,
}

struct Record {
    parent: Option<usize>,
    action: u32,
}

/// A* with re-opening. Ties on `f` prefer lower `h`, then earlier insertion,
/// so results are reproducible run to run.
pub(crate) fn astar<S: SearchSpace>(space: &S, config: &PlannerConfig) -> Result<Outcome<S::Cost>, PlannerError> {
    let started = Instant::now();
    let mut arena: Vec<Record> = Vec::new();
    let mut best: HashMap<S::State, S::Cost> = HashMap::new();
    // (f, h, seq) ordering; `terminal` entries carry the finished cost.
    let mut open: BinaryHeap<Reverse<(S::Cost, S::Cost, u64, usize, bool)>> = BinaryHeap::new();
    let mut states: Vec<(S::State, S::Cost)> = Vec::new();
    let mut seq = 0_u64;
    let mut expanded = 0_usize;
    let mut successors = Vec::new();

    let start = space.initial();
    let zero = space.zero();
    if let Some(h) = space.heuristic(&start) {
        best.insert(start.clone(), zero);
        arena.push(Record {
            parent: None,
            action: u32::MAX,
        });
        states.push((start, zero));
        open.push(Reverse((h, h, seq, 0, false)));
        seq += 1;
    }

    while let Some(Reverse((f, _, _, node, terminal))) = open.pop() {
        if terminal {
            return Ok(Outcome {
                found: Some(Found {
                    actions: trace(&arena, node),
                    cost: f,
                }),
                expanded,
            });
        }
        let (state, g) = states[node].clone();
        if best.get(&state).is_some_and(|b| g > *b) {
            continue;
        }
        expanded += 1;
        if expanded > config.node_cap {
            return Err(PlannerError::NodeLimit { limit: config.node_cap });
        }
        if let Some(cap) = config.time_cap {
            if expanded % 1024 == 0 && started.elapsed() > cap {
                return Err(PlannerError::TimeLimit {
                    seconds: cap.as_secs_f64(),
                });
            }
        }
        if let Some(stop) = space.terminal_cost(&state) {
            let total = g + stop;
            open.push(Reverse((total, zero, seq, node, true)));
            seq += 1;
        }
        successors.clear();
        space.expand(&state, &mut successors);
        for (action, next, step) in successors.drain(..) {
            let next_g = g + step;
            match best.entry(next.clone()) {
                Entry::Occupied(mut slot) => {
                    if next_g >= *slot.get() {
                        continue;
                    }
                    slot.insert(next_g);
                }
                Entry::Vacant(slot) => {
                    slot.insert(next_g);
                }
            }
            let Some(h) = space.heuristic(&next) else {
                continue;
            };
            arena.push(Record {
                parent: Some(node),
                action,
            });
            states.push((next, next_g));
            open.push(Reverse((next_g + h, h, seq, arena.len() - 1, false)));
            seq += 1;
        }
    }
    Ok(Outcome { found: None, expanded })
}

fn trace(arena: &[Record], mut node: usize) -> Vec<u32> {
    let mut actions = Vec::new();
    while let Some(parent) = arena[node].parent {
        actions.push(arena[node].action);
        node = parent;
    }
    actions.reverse();
    actions
}

/// Plain cost-optimal search in one task.
pub(crate) struct SingleSpace<'a> {
    pub task: &'a Task,
    pub use_heuristic: bool,
}

impl SearchSpace for SingleSpace<'_> {
    type State = Bits;
    type Cost = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn initial(&self) -> Bits {
        self.task.init.clone()
    }

    fn heuristic(&self, state: &Bits) -> Option<u64> {
        if self.use_heuristic {
            self.task.h_max(state)
        } else {
            Some(0)
        }
    }

    fn expand(&self, state: &Bits, out: &mut Vec<(u32, Bits, u64)>) {
        for (i, action) in self.task.actions.iter().enumerate() {
            if action.applicable(state) {
                out.push((i as u32, action.apply(state), action.cost));
            }
        }
    }

    fn terminal_cost(&self, state: &Bits) -> Option<u64> {
        self.task.is_goal(state).then_some(0)
    }
}

/// Lexicographic cost: primary model cost, then cost in a reference model
/// (`u64::MAX` once the reference run is undefined).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct LexCost(pub u64, pub u64);

impl Add for LexCost {
    type Output = LexCost;

    fn add(self, rhs: LexCost) -> LexCost {
        LexCost(self.0.saturating_add(rhs.0), self.1.saturating_add(rhs.1))
    }
}

pub(crate) const UNDEFINED: u64 = u64::MAX;

/// Runs the same action sequence in the planning task and in a reference
/// task; among plans optimal in the former, prefers the cheapest in the latter.
pub(crate) struct ReferenceSpace<'a> {
    pub task: &'a Task,
    pub reference: &'a Task,
    /// Reference action index for every task action.
    pub mapping: Vec<Option<u32>>,
}

impl SearchSpace for ReferenceSpace<'_> {
    type State = (Bits, Option<Bits>);
    type Cost = LexCost;

    fn zero(&self) -> LexCost {
        LexCost(0, 0)
    }

    fn initial(&self) -> Self::State {
        (self.task.init.clone(), Some(self.reference.init.clone()))
    }

    fn heuristic(&self, state: &Self::State) -> Option<LexCost> {
        self.task.h_max(&state.0).map(|h| LexCost(h, 0))
    }

    fn expand(&self, state: &Self::State, out: &mut Vec<(u32, Self::State, LexCost)>) {
        let (own, reference) = state;
        for (i, action) in self.task.actions.iter().enumerate() {
            if !action.applicable(own) {
                continue;
            }
            let next = action.apply(own);
            let shadow = match (reference, self.mapping[i]) {
                (Some(r), Some(j)) => {
                    let ref_action = &self.reference.actions[j as usize];
                    ref_action.applicable(r).then(|| (ref_action.apply(r), ref_action.cost))
                }
                _ => None,
            };
            match shadow {
                Some((r_next, r_cost)) => out.push((i as u32, (next, Some(r_next)), LexCost(action.cost, r_cost))),
                None => out.push((i as u32, (next, None), LexCost(action.cost, UNDEFINED))),
            }
        }
    }

    fn terminal_cost(&self, state: &Self::State) -> Option<LexCost> {
        if !self.task.is_goal(&state.0) {
            return None;
        }
        let reference_done = state.1.as_ref().is_some_and(|r| self.reference.is_goal(r));
        Some(LexCost(0, if reference_done { 0 } else { UNDEFINED }))
    }
}
