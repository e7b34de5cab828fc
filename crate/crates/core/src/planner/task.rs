//! Index-compiled form of a [`Model`] used by the heuristic search.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};

use num_integer::Integer;

use super::PlannerError;
use crate::strips::{Fluent, Model, Rational};

/// Packed truth assignment over the task's fluent indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Bits(Box<[u64]>);

impl Bits {
    fn empty(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)].into_boxed_slice())
    }

    #[inline]
    pub(crate) fn get(&self, i: u32) -> bool {
        self.0[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    #[inline]
    fn set(&mut self, i: u32, value: bool) {
        let word = &mut self.0[(i / 64) as usize];
        if value {
            *word |= 1 << (i % 64);
        } else {
            *word &= !(1 << (i % 64));
        }
    }

    pub(crate) fn ones(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            (0..64u32)
                .filter(move |b| word >> b & 1 == 1)
                .map(move |b| w as u32 * 64 + b)
        })
    }
}

#[derive(Clone, Debug)]
pub(crate) struct TaskAction {
    pub name: String,
    pub cost: u64,
    pub pre: Vec<u32>,
    pub add: Vec<u32>,
    pub del: Vec<u32>,
}

impl TaskAction {
    #[inline]
    pub(crate) fn applicable(&self, state: &Bits) -> bool {
        self.pre.iter().all(|&p| state.get(p))
    }

    pub(crate) fn apply(&self, state: &Bits) -> Bits {
        let mut next = state.clone();
        for &d in &self.del {
            next.set(d, false);
        }
        for &a in &self.add {
            next.set(a, true);
        }
        next
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Task {
    pub num_fluents: usize,
    pub actions: Vec<TaskAction>,
    pub init: Bits,
    pub goal: Vec<u32>,
    /// For every fluent, the actions having it as a precondition.
    pre_of: Vec<Vec<u32>>,
    /// Actions with no preconditions at all.
    unconditional: Vec<u32>,
}

/// Integer view of rational costs: every cost multiplied by `scale`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct CostScale {
    scale: i64,
}

impl CostScale {
    pub(crate) fn for_models<'a>(models: impl IntoIterator<Item = &'a Model>) -> Self {
        let scale = models
            .into_iter()
            .flat_map(|m| m.actions().values())
            .fold(1_i64, |acc, a| acc.lcm(a.cost().denom()));
        CostScale { scale }
    }

    fn to_units(self, cost: Rational) -> Result<u64, PlannerError> {
        let units = cost
            .numer()
            .checked_mul(self.scale / cost.denom())
            .ok_or(PlannerError::CostOverflow)?;
        u64::try_from(units).map_err(|_| PlannerError::CostOverflow)
    }

    pub(crate) fn to_rational(self, units: u64) -> Rational {
        Rational::new(units as i64, self.scale)
    }
}

/// Shared fluent numbering for one or more models.
pub(crate) struct FluentIndex {
    index: HashMap<Fluent, u32>,
    len: usize,
}

impl FluentIndex {
    pub(crate) fn for_models<'a>(models: impl IntoIterator<Item = &'a Model>) -> Self {
        let mut all = BTreeSet::new();
        for model in models {
            all.extend(model.fluents().iter());
            all.extend(model.init().iter());
            all.extend(model.goal().iter());
        }
        let len = all.len();
        let index = all
            .into_iter()
            .enumerate()
            .map(|(i, f)| (f.clone(), i as u32))
            .collect();
        FluentIndex { index, len }
    }

    fn ids<'a>(&self, fluents: impl IntoIterator<Item = &'a Fluent>) -> Vec<u32> {
        fluents.into_iter().map(|f| self.index[f]).collect()
    }
}

impl Task {
    pub(crate) fn compile(model: &Model, index: &FluentIndex, scale: CostScale) -> Result<Task, PlannerError> {
        let mut actions = Vec::with_capacity(model.actions().len());
        for action in model.actions().values() {
            actions.push(TaskAction {
                name: action.name().to_string(),
                cost: scale.to_units(action.cost())?,
                pre: index.ids(action.pre()),
                add: index.ids(action.add()),
                del: index.ids(action.del()),
            });
        }
        let mut init = Bits::empty(index.len);
        for id in index.ids(model.init()) {
            init.set(id, true);
        }
        let mut pre_of = vec![Vec::new(); index.len];
        let mut unconditional = Vec::new();
        for (i, action) in actions.iter().enumerate() {
            if action.pre.is_empty() {
                unconditional.push(i as u32);
            }
            for &p in &action.pre {
                pre_of[p as usize].push(i as u32);
            }
        }
        Ok(Task {
            num_fluents: index.len,
            actions,
            init,
            goal: index.ids(model.goal()),
            pre_of,
            unconditional,
        })
    }

    pub(crate) fn is_goal(&self, state: &Bits) -> bool {
        self.goal.iter().all(|&g| state.get(g))
    }

    /// Admissible `h_max` delete-relaxation estimate; `None` marks a state
    /// from which the goal is unreachable even under the relaxation.
    pub(crate) fn h_max(&self, state: &Bits) -> Option<u64> {
        if self.goal.is_empty() {
            return Some(0);
        }
        let mut dist = vec![u64::MAX; self.num_fluents];
        let mut remaining: Vec<usize> = self.actions.iter().map(|a| a.pre.len()).collect();
        let mut support = vec![0_u64; self.actions.len()];
        let mut queue = BinaryHeap::new();
        for f in state.ones() {
            dist[f as usize] = 0;
            queue.push(Reverse((0_u64, f)));
        }
        let fire = |a: u32, at: u64, dist: &mut Vec<u64>, queue: &mut BinaryHeap<Reverse<(u64, u32)>>| {
            let action = &self.actions[a as usize];
            let reached = at.saturating_add(action.cost);
            for &q in &action.add {
                if reached < dist[q as usize] {
                    dist[q as usize] = reached;
                    queue.push(Reverse((reached, q)));
                }
            }
        };
        for &a in &self.unconditional {
            fire(a, 0, &mut dist, &mut queue);
        }
        let mut is_goal = vec![false; self.num_fluents];
        for &g in &self.goal {
            is_goal[g as usize] = true;
        }
        let mut goals_left = self.goal.len();
        while let Some(Reverse((d, f))) = queue.pop() {
            if d > dist[f as usize] {
                continue;
            }
            if is_goal[f as usize] {
                is_goal[f as usize] = false;
                goals_left -= 1;
                if goals_left == 0 {
                    return Some(d);
                }
            }
            for &a in &self.pre_of[f as usize] {
                let a_idx = a as usize;
                remaining[a_idx] -= 1;
                support[a_idx] = support[a_idx].max(d);
                if remaining[a_idx] == 0 {
                    fire(a, support[a_idx], &mut dist, &mut queue);
                }
            }
        }
        None
    }
}
