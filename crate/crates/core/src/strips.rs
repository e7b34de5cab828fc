//! Grounded STRIPS representation: fluents, actions, models and plans,
//! together with the transition function and plan cost.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

/// Exact non-negative action costs.
pub type Rational = num_rational::Ratio<i64>;

/// A set of ground fluents; used for states as well as action conditions.
pub type FluentSet = BTreeSet<Fluent>;

/// A fully grounded atom such as `clear_path p1 p8`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fluent {
    pub name: String,
    pub args: Vec<String>,
}

impl Fluent {
    pub fn new<N, I, S>(name: N, args: I) -> Self
    where
        N: Into<String>,
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Fluent {
            name: name.into(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }

    /// Parses the space separated form produced by `Display`.
    pub fn parse(text: &str) -> Option<Self> {
        let mut parts = text.split_whitespace();
        let name = parts.next()?;
        Some(Fluent::new(name, parts))
    }
}

impl fmt::Display for Fluent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        for arg in &self.args {
            write!(f, " {arg}")?;
        }
        Ok(())
    }
}

/// Plan or model cost extended with a distinguished infinity that compares
/// above every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cost {
    Finite(Rational),
    Infinite,
}

impl Cost {
    pub fn zero() -> Self {
        Cost::Finite(Rational::zero())
    }

    pub fn from_integer(value: i64) -> Self {
        Cost::Finite(Rational::from_integer(value))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Cost::Finite(_))
    }

    pub fn finite(&self) -> Option<Rational> {
        match self {
            Cost::Finite(value) => Some(*value),
            Cost::Infinite => None,
        }
    }
}

impl std::ops::Add for Cost {
    type Output = Cost;

    fn add(self, rhs: Cost) -> Cost {
        match (self, rhs) {
            (Cost::Finite(a), Cost::Finite(b)) => Cost::Finite(a + b),
            _ => Cost::Infinite,
        }
    }
}

impl From<Rational> for Cost {
    fn from(value: Rational) -> Self {
        Cost::Finite(value)
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Finite(value) => write!(f, "{}", format_rational(value)),
            Cost::Infinite => f.write_str("inf"),
        }
    }
}

/// Renders integers without a denominator, everything else as `n/d`.
pub fn format_rational(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Parses `3`, `3/4`, `0.25` or `-1.5` into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((numer, denom)) = text.split_once('/') {
        let numer: i64 = numer.trim().parse().ok()?;
        let denom: i64 = denom.trim().parse().ok()?;
        if denom == 0 {
            return None;
        }
        return Some(Rational::new(numer, denom));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 15 {
            return None;
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        let whole_value: i64 = if whole_digits.is_empty() {
            0
        } else {
            whole_digits.parse().ok()?
        };
        let denom = 10_i64.checked_pow(frac.len() as u32)?;
        let frac_value: i64 = frac.parse().ok()?;
        let magnitude = whole_value.checked_mul(denom)?.checked_add(frac_value)?;
        let numer = if negative { -magnitude } else { magnitude };
        return Some(Rational::new(numer, denom));
    }
    text.parse::<i64>().ok().map(Rational::from_integer)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("action `{action}` has negative cost {cost}")]
    NegativeCost { action: String, cost: String },
    #[error("action `{action}` both adds and deletes `{fluent}`")]
    AddDeleteOverlap { action: String, fluent: Fluent },
    #[error("{context} mentions `{fluent}` which is outside the fluent universe")]
    UnknownFluent { context: String, fluent: Fluent },
    #[error("action map key `{key}` does not match action name `{name}`")]
    NameMismatch { key: String, name: String },
}

/// A ground action `⟨cost, pre, add, del⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Action {
    name: String,
    cost: Rational,
    pre: FluentSet,
    add: FluentSet,
    del: FluentSet,
}

impl Action {
    pub fn new(
        name: impl Into<String>,
        cost: Rational,
        pre: FluentSet,
        add: FluentSet,
        del: FluentSet,
    ) -> Result<Self, ModelError> {
        let name = name.into();
        if cost.is_negative() {
            return Err(ModelError::NegativeCost {
                action: name,
                cost: format_rational(&cost),
            });
        }
        if let Some(fluent) = add.intersection(&del).next() {
            return Err(ModelError::AddDeleteOverlap {
                action: name,
                fluent: fluent.clone(),
            });
        }
        Ok(Action {
            name,
            cost,
            pre,
            add,
            del,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn cost(&self) -> Rational {
        self.cost
    }

    pub fn pre(&self) -> &FluentSet {
        &self.pre
    }

    pub fn add(&self) -> &FluentSet {
        &self.add
    }

    pub fn del(&self) -> &FluentSet {
        &self.del
    }

    pub fn mentioned(&self) -> impl Iterator<Item = &Fluent> {
        self.pre.iter().chain(&self.add).chain(&self.del)
    }

    /// `(state ∪ add) \ del` when the preconditions hold.
    pub fn apply(&self, state: &FluentSet) -> Option<FluentSet> {
        if !self.pre.is_subset(state) {
            return None;
        }
        let mut next: FluentSet = state.difference(&self.del).cloned().collect();
        next.extend(self.add.iter().cloned());
        Some(next)
    }
}

/// A grounded planning problem `⟨F, A, I, G⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Model {
    fluents: FluentSet,
    actions: BTreeMap<String, Action>,
    init: FluentSet,
    goal: FluentSet,
}

impl Model {
    pub fn new(
        fluents: FluentSet,
        actions: BTreeMap<String, Action>,
        init: FluentSet,
        goal: FluentSet,
    ) -> Result<Self, ModelError> {
        for (key, action) in &actions {
            if key != action.name() {
                return Err(ModelError::NameMismatch {
                    key: key.clone(),
                    name: action.name().to_string(),
                });
            }
            if let Some(fluent) = action.mentioned().find(|f| !fluents.contains(*f)) {
                return Err(ModelError::UnknownFluent {
                    context: format!("action `{key}`"),
                    fluent: fluent.clone(),
                });
            }
        }
        for (context, set) in [("initial state", &init), ("goal", &goal)] {
            if let Some(fluent) = set.iter().find(|f| !fluents.contains(*f)) {
                return Err(ModelError::UnknownFluent {
                    context: context.to_string(),
                    fluent: fluent.clone(),
                });
            }
        }
        Ok(Model {
            fluents,
            actions,
            init,
            goal,
        })
    }

    /// Builds a model whose fluent universe is exactly the fluents mentioned
    /// by the actions, initial state and goal.
    pub fn closed<I>(actions: I, init: FluentSet, goal: FluentSet) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = Action>,
    {
        let actions: BTreeMap<String, Action> = actions.into_iter().map(|a| (a.name().to_string(), a)).collect();
        let mut fluents: FluentSet = init.union(&goal).cloned().collect();
        for action in actions.values() {
            fluents.extend(action.mentioned().cloned());
        }
        Model::new(fluents, actions, init, goal)
    }

    /// Same model over a larger fluent universe.
    pub fn with_fluents(mut self, extra: impl IntoIterator<Item = Fluent>) -> Self {
        self.fluents.extend(extra);
        self
    }

    pub fn fluents(&self) -> &FluentSet {
        &self.fluents
    }

    pub fn actions(&self) -> &BTreeMap<String, Action> {
        &self.actions
    }

    pub fn action(&self, name: &str) -> Option<&Action> {
        self.actions.get(name)
    }

    pub fn init(&self) -> &FluentSet {
        &self.init
    }

    pub fn goal(&self) -> &FluentSet {
        &self.goal
    }
}

/// A sequence of action names.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Plan {
    pub steps: Vec<String>,
}

impl Plan {
    pub fn new<I, S>(steps: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Plan {
            steps: steps.into_iter().map(Into::into).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Parses one action per line; `(name args)` and bare `name args` are
    /// both accepted, `;` starts a comment.
    pub fn parse(text: &str) -> Plan {
        let steps = text
            .lines()
            .map(|line| line.split(';').next().unwrap_or("").trim())
            .filter(|line| !line.is_empty())
            .map(|line| {
                let inner = line.trim_start_matches('(').trim_end_matches(')');
                inner.split_whitespace().collect::<Vec<_>>().join(" ")
            })
            .collect();
        Plan { steps }
    }
}

impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for step in &self.steps {
            writeln!(f, "({step})")?;
        }
        Ok(())
    }
}

/// Why a single transition is undefined.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepFailure {
    #[error("action `{action}` is not part of the model")]
    UnknownAction { action: String },
    #[error("action `{action}` is missing preconditions {missing:?}")]
    PreconditionUnmet { action: String, missing: Vec<Fluent> },
}

/// `δ_M(s, a)`; an `Err` is the undefined outcome.
pub fn apply(state: &FluentSet, action: &str, model: &Model) -> Result<FluentSet, StepFailure> {
    let Some(act) = model.action(action) else {
        return Err(StepFailure::UnknownAction {
            action: action.to_string(),
        });
    };
    act.apply(state).ok_or_else(|| StepFailure::PreconditionUnmet {
        action: action.to_string(),
        missing: act.pre().difference(state).cloned().collect(),
    })
}

/// Undefined progression, tagged with the index of the failing step.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {step} is inexecutable: {failure}")]
pub struct ProgressFailure {
    pub step: usize,
    pub failure: StepFailure,
}

/// Cumulative transition `δ_M(s, ⟨a1..an⟩)`.
pub fn progress(init: &FluentSet, plan: &Plan, model: &Model) -> Result<FluentSet, ProgressFailure> {
    plan.steps
        .iter()
        .enumerate()
        .try_fold(init.clone(), |state, (step, action)| {
            apply(&state, action, model).map_err(|failure| ProgressFailure { step, failure })
        })
}

/// `C(π, M)`: the summed action costs when the plan reaches the goal, ∞ otherwise.
pub fn plan_cost(plan: &Plan, model: &Model) -> Cost {
    match progress(model.init(), plan, model) {
        Ok(state) if model.goal().is_subset(&state) => {
            Cost::Finite(plan.steps.iter().map(|name| model.actions[name].cost()).sum())
        }
        _ => Cost::Infinite,
    }
}

pub fn is_satisficing(plan: &Plan, model: &Model) -> bool {
    plan_cost(plan, model).is_finite()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn set(items: &[&str]) -> FluentSet {
        items.iter().map(|s| Fluent::parse(s).unwrap()).collect()
    }

    pub(crate) fn action(name: &str, cost: i64, pre: &[&str], add: &[&str], del: &[&str]) -> Action {
        Action::new(name, Rational::from_integer(cost), set(pre), set(add), set(del)).unwrap()
    }

    /// Three cells `p1 - p2 - p3`, rubble between p1 and p2.
    pub(crate) fn corridor() -> Model {
        let cells = ["p1", "p2", "p3"];
        let mut actions = Vec::new();
        for x in cells {
            for y in cells {
                if x == y {
                    continue;
                }
                actions.push(action(
                    &format!("move {x} {y}"),
                    1,
                    &[&format!("at {x}"), &format!("clear {x} {y}")],
                    &[&format!("at {y}")],
                    &[&format!("at {x}")],
                ));
            }
        }
        for (x, y) in [("p1", "p2"), ("p2", "p1"), ("p2", "p3"), ("p3", "p2")] {
            actions.push(action(
                &format!("clear_rubble {x} {y}"),
                3,
                &[&format!("at {x}")],
                &[&format!("clear {x} {y}")],
                &[],
            ));
        }
        Model::closed(actions, set(&["at p1", "clear p2 p3"]), set(&["at p3"])).unwrap()
    }

    #[test]
    fn apply_single_move() {
        let model = corridor();
        let state = set(&["clear p1 p2", "at p1"]);
        let next = apply(&state, "move p1 p2", &model).unwrap();
        assert_eq!(next, set(&["clear p1 p2", "at p2"]));
    }

    #[test]
    fn apply_on_empty_state_is_undefined() {
        let model = corridor();
        let err = apply(&FluentSet::new(), "move p1 p2", &model).unwrap_err();
        assert!(matches!(err, StepFailure::PreconditionUnmet { .. }));
    }

    #[test]
    fn identity_effect_keeps_state() {
        let noop = action("wait", 1, &["at p1"], &[], &[]);
        let model = Model::closed([noop], set(&["at p1"]), set(&[])).unwrap();
        let state = set(&["at p1"]);
        assert_eq!(apply(&state, "wait", &model).unwrap(), state);
    }

    #[test]
    fn unknown_action_is_inexecutable() {
        let model = corridor();
        let err = apply(model.init(), "fly p1 p3", &model).unwrap_err();
        assert!(matches!(err, StepFailure::UnknownAction { .. }));
        assert_eq!(plan_cost(&Plan::new(["fly p1 p3"]), &model), Cost::Infinite);
    }

    #[test]
    fn progress_through_corridor() {
        let model = corridor();
        let init = model.init().clone();
        assert_eq!(progress(&init, &Plan::default(), &model).unwrap(), init);
        let mut start = init.clone();
        start.insert(Fluent::new("clear", ["p1", "p2"]));
        let end = progress(&start, &Plan::new(["move p1 p2", "move p2 p3"]), &model).unwrap();
        assert!(end.contains(&Fluent::new("at", ["p3"])));
        let failed = progress(&init, &Plan::new(["move p2 p3"]), &model).unwrap_err();
        assert_eq!(failed.step, 0);
    }

    #[test]
    fn plan_costs() {
        let model = corridor();
        let plan = Plan::new(["clear_rubble p1 p2", "move p1 p2", "move p2 p3"]);
        assert_eq!(plan_cost(&plan, &model), Cost::from_integer(5));
        assert!(is_satisficing(&plan, &model));
        let two_step = Plan::new(["move p1 p2", "move p2 p3"]);
        assert_eq!(plan_cost(&two_step, &model), Cost::Infinite);
        assert!(!is_satisficing(&two_step, &model));

        let trivial = Model::closed([], set(&["at p1"]), set(&["at p1"])).unwrap();
        assert_eq!(plan_cost(&Plan::default(), &trivial), Cost::zero());
        assert!(is_satisficing(&Plan::default(), &trivial));
    }

    #[test]
    fn corridor_two_step_plan_after_rubble_cleared() {
        let mut model = corridor();
        model.init.insert(Fluent::new("clear", ["p1", "p2"]));
        let plan = Plan::new(["move p1 p2", "move p2 p3"]);
        assert_eq!(plan_cost(&plan, &model), Cost::from_integer(2));
        assert!(is_satisficing(&plan, &model));
    }

    #[test]
    fn rejects_malformed_actions() {
        let overlap = Action::new("bad", Rational::from_integer(1), set(&[]), set(&["a"]), set(&["a"]));
        assert!(matches!(overlap, Err(ModelError::AddDeleteOverlap { .. })));
        let negative = Action::new("neg", Rational::from_integer(-1), set(&[]), set(&[]), set(&[]));
        assert!(matches!(negative, Err(ModelError::NegativeCost { .. })));
    }

    #[test]
    fn model_requires_fluents_in_universe() {
        let err = Model::new(set(&["a"]), BTreeMap::new(), set(&["b"]), set(&[])).unwrap_err();
        assert!(matches!(err, ModelError::UnknownFluent { .. }));
    }

    #[test]
    fn cost_ordering_and_parsing() {
        assert!(Cost::Infinite > Cost::from_integer(1_000_000));
        assert_eq!(parse_rational("0.25"), Some(Rational::new(1, 4)));
        assert_eq!(parse_rational("3/6"), Some(Rational::new(1, 2)));
        assert_eq!(parse_rational("7"), Some(Rational::from_integer(7)));
        assert_eq!(parse_rational("-1.5"), Some(Rational::new(-3, 2)));
        assert_eq!(parse_rational("x"), None);
        assert_eq!(Cost::Finite(Rational::new(3, 2)).to_string(), "3/2");
    }

    #[test]
    fn plan_text_round_trip() {
        let plan = Plan::new(["move p1 p2", "take_picture p5"]);
        assert_eq!(Plan::parse(&plan.to_string()), plan);
        assert_eq!(Plan::parse("; cost = 2\nmove p1 p2\n\n"), Plan::new(["move p1 p2"]));
    }
}
