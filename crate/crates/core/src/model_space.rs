//! Models as sets of conditions, and unit edits between them.
//!
//! [`gamma`] flattens a [`Model`] into one [`ModelFluent`] per condition
//! (initial fact, goal fact, precondition, add/delete effect, action cost).
//! An [`Edit`] adds or removes a single such condition and an
//! [`Explanation`] is a set of edits with distinct conditions.
//!
//! Edits have a stable text form used in explanation and overlay files:
//!
//! ```text
//! remove-has-initial-state-clear_path p1 p8
//! add-has-precondition-sample_soil store waypoint3-empty store
//! add-has-cost-move p1 p2-3
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::One;
use thiserror::Error;

use crate::strips::{format_rational, parse_rational, Action, Fluent, FluentSet, Model, ModelError, Rational};

/// One condition of a model.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelFluent {
    Init(Fluent),
    Goal(Fluent),
    Precondition { action: String, fluent: Fluent },
    AddEffect { action: String, fluent: Fluent },
    DelEffect { action: String, fluent: Fluent },
    Cost { action: String, cost: Rational },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConditionKind {
    InitHas,
    GoalHas,
    PreconditionHas,
    AddEffectHas,
    DelEffectHas,
    CostIs,
}

impl ConditionKind {
    fn label(self) -> &'static str {
        match self {
            ConditionKind::InitHas => "initial-state",
            ConditionKind::GoalHas => "goal-state",
            ConditionKind::PreconditionHas => "precondition",
            ConditionKind::AddEffectHas => "add-effect",
            ConditionKind::DelEffectHas => "delete-effect",
            ConditionKind::CostIs => "cost",
        }
    }

    const ALL: [ConditionKind; 6] = [
        ConditionKind::InitHas,
        ConditionKind::GoalHas,
        ConditionKind::PreconditionHas,
        ConditionKind::AddEffectHas,
        ConditionKind::DelEffectHas,
        ConditionKind::CostIs,
    ];
}

impl ModelFluent {
    pub fn kind(&self) -> ConditionKind {
        match self {
            ModelFluent::Init(_) => ConditionKind::InitHas,
            ModelFluent::Goal(_) => ConditionKind::GoalHas,
            ModelFluent::Precondition { .. } => ConditionKind::PreconditionHas,
            ModelFluent::AddEffect { .. } => ConditionKind::AddEffectHas,
            ModelFluent::DelEffect { .. } => ConditionKind::DelEffectHas,
            ModelFluent::Cost { .. } => ConditionKind::CostIs,
        }
    }

    pub fn action(&self) -> Option<&str> {
        match self {
            ModelFluent::Init(_) | ModelFluent::Goal(_) => None,
            ModelFluent::Precondition { action, .. }
            | ModelFluent::AddEffect { action, .. }
            | ModelFluent::DelEffect { action, .. }
            | ModelFluent::Cost { action, .. } => Some(action),
        }
    }

    pub fn is_cost(&self) -> bool {
        matches!(self, ModelFluent::Cost { .. })
    }
}

impl fmt::Display for ModelFluent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = self.kind().label();
        match self {
            ModelFluent::Init(fluent) | ModelFluent::Goal(fluent) => write!(f, "{label}-{fluent}"),
            ModelFluent::Precondition { action, fluent }
            | ModelFluent::AddEffect { action, fluent }
            | ModelFluent::DelEffect { action, fluent } => write!(f, "{label}-{action}-{fluent}"),
            ModelFluent::Cost { action, cost } => write!(f, "{label}-{action}-{}", format_rational(cost)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Remove,
    Add,
}

/// A unit model change: add or remove one condition.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edit {
    pub direction: Direction,
    pub fluent: ModelFluent,
}

impl Edit {
    pub fn add(fluent: ModelFluent) -> Self {
        Edit {
            direction: Direction::Add,
            fluent,
        }
    }

    pub fn remove(fluent: ModelFluent) -> Self {
        Edit {
            direction: Direction::Remove,
            fluent,
        }
    }

    pub fn inverse(&self) -> Edit {
        let direction = match self.direction {
            Direction::Add => Direction::Remove,
            Direction::Remove => Direction::Add,
        };
        Edit {
            direction,
            fluent: self.fluent.clone(),
        }
    }
}

impl fmt::Display for Edit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verb = match self.direction {
            Direction::Add => "add",
            Direction::Remove => "remove",
        };
        write!(f, "{verb}-has-{}", self.fluent)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExplanationError {
    #[error("explanation touches `{0}` more than once")]
    DuplicateCondition(ModelFluent),
}

/// A set of edits over distinct conditions, kept in canonical order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Explanation {
    edits: Vec<Edit>,
}

impl Explanation {
    pub fn new(edits: impl IntoIterator<Item = Edit>) -> Result<Self, ExplanationError> {
        let mut edits: Vec<Edit> = edits.into_iter().collect();
        edits.sort();
        let mut seen = BTreeSet::new();
        for edit in &edits {
            if !seen.insert(&edit.fluent) {
                return Err(ExplanationError::DuplicateCondition(edit.fluent.clone()));
            }
        }
        Ok(Explanation { edits })
    }

    pub fn edits(&self) -> &[Edit] {
        &self.edits
    }

    pub fn len(&self) -> usize {
        self.edits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edits.is_empty()
    }

    /// Edit strings in lexicographic order.
    pub fn lines(&self) -> Vec<String> {
        let mut lines: Vec<String> = self.edits.iter().map(ToString::to_string).collect();
        lines.sort();
        lines
    }

    /// Sorted edit strings joined into one comparison key.
    pub fn sort_key(&self) -> String {
        self.lines().join("\n")
    }
}

/// `Γ(M)`.
pub fn gamma(model: &Model) -> BTreeSet<ModelFluent> {
    let mut out = BTreeSet::new();
    out.extend(model.init().iter().cloned().map(ModelFluent::Init));
    out.extend(model.goal().iter().cloned().map(ModelFluent::Goal));
    for (name, action) in model.actions() {
        for fluent in action.pre() {
            out.insert(ModelFluent::Precondition {
                action: name.clone(),
                fluent: fluent.clone(),
            });
        }
        for fluent in action.add() {
            out.insert(ModelFluent::AddEffect {
                action: name.clone(),
                fluent: fluent.clone(),
            });
        }
        for fluent in action.del() {
            out.insert(ModelFluent::DelEffect {
                action: name.clone(),
                fluent: fluent.clone(),
            });
        }
        out.insert(ModelFluent::Cost {
            action: name.clone(),
            cost: action.cost(),
        });
    }
    out
}

/// The fluent and action-name universe a condition set is decoded against.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub fluents: FluentSet,
    pub actions: BTreeSet<String>,
}

impl Signature {
    pub fn of(model: &Model) -> Self {
        Signature {
            fluents: model.fluents().clone(),
            actions: model.actions().keys().cloned().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodingError {
    #[error("action `{0}` has more than one cost condition")]
    DuplicateCost(String),
    #[error("action `{0}` is not in the signature")]
    UnknownAction(String),
    #[error("fluent `{0}` is not in the signature")]
    UnknownFluent(Fluent),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Inverse of [`gamma`]. Actions without a cost condition get cost 1.
pub fn ungamma<'a>(
    fluents: impl IntoIterator<Item = &'a ModelFluent>,
    signature: &Signature,
) -> Result<Model, EncodingError> {
    #[derive(Default)]
    struct Parts {
        cost: Option<Rational>,
        pre: FluentSet,
        add: FluentSet,
        del: FluentSet,
    }
    let mut parts: BTreeMap<&str, Parts> = signature
        .actions
        .iter()
        .map(|name| (name.as_str(), Parts::default()))
        .collect();
    let mut init = FluentSet::new();
    let mut goal = FluentSet::new();
    let check = |fluent: &Fluent| {
        if signature.fluents.contains(fluent) {
            Ok(fluent.clone())
        } else {
            Err(EncodingError::UnknownFluent(fluent.clone()))
        }
    };
    for condition in fluents {
        if let Some(action) = condition.action() {
            let Some(entry) = parts.get_mut(action) else {
                return Err(EncodingError::UnknownAction(action.to_string()));
            };
            match condition {
                ModelFluent::Precondition { fluent, .. } => {
                    entry.pre.insert(check(fluent)?);
                }
                ModelFluent::AddEffect { fluent, .. } => {
                    entry.add.insert(check(fluent)?);
                }
                ModelFluent::DelEffect { fluent, .. } => {
                    entry.del.insert(check(fluent)?);
                }
                ModelFluent::Cost { cost, .. } => {
                    if entry.cost.replace(*cost).is_some() {
                        return Err(EncodingError::DuplicateCost(action.to_string()));
                    }
                }
                ModelFluent::Init(_) | ModelFluent::Goal(_) => unreachable!(),
            }
        } else {
            match condition {
                ModelFluent::Init(fluent) => {
                    init.insert(check(fluent)?);
                }
                ModelFluent::Goal(fluent) => {
                    goal.insert(check(fluent)?);
                }
                _ => unreachable!(),
            }
        }
    }
    let mut actions = BTreeMap::new();
    for (name, p) in parts {
        let cost = p.cost.unwrap_or_else(Rational::one);
        actions.insert(name.to_string(), Action::new(name, cost, p.pre, p.add, p.del)?);
    }
    Ok(Model::new(signature.fluents.clone(), actions, init, goal)?)
}

/// Conditions present in only one of two models.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModelDelta {
    pub only_in_first: BTreeSet<ModelFluent>,
    pub only_in_second: BTreeSet<ModelFluent>,
}

impl ModelDelta {
    /// `|M1 Δ M2|`.
    pub fn len(&self) -> usize {
        self.only_in_first.len() + self.only_in_second.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn model_delta(first: &Model, second: &Model) -> ModelDelta {
    let a = gamma(first);
    let b = gamma(second);
    ModelDelta {
        only_in_first: a.difference(&b).cloned().collect(),
        only_in_second: b.difference(&a).cloned().collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EditError {
    #[error("edit `{0}` does not change the model")]
    NoOp(Edit),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error(transparent)]
    Explanation(#[from] ExplanationError),
}

/// Applies one edit to a condition set in place. Adding a cost condition
/// replaces the action's current cost.
pub(crate) fn apply_to_set(set: &mut BTreeSet<ModelFluent>, edit: &Edit) -> Result<(), EditError> {
    let changed = match (&edit.direction, &edit.fluent) {
        (Direction::Add, ModelFluent::Cost { action, .. }) => {
            if set.contains(&edit.fluent) {
                false
            } else {
                set.retain(|f| !(f.is_cost() && f.action() == Some(action)));
                set.insert(edit.fluent.clone())
            }
        }
        (Direction::Add, fluent) => set.insert(fluent.clone()),
        (Direction::Remove, fluent) => set.remove(fluent),
    };
    if changed {
        Ok(())
    } else {
        Err(EditError::NoOp(edit.clone()))
    }
}

pub fn apply_edit(model: &Model, edit: &Edit) -> Result<Model, EditError> {
    let mut set = gamma(model);
    apply_to_set(&mut set, edit)?;
    Ok(ungamma(&set, &Signature::of(model))?)
}

/// `M + E`. The result only depends on the set of edits, not their order.
pub fn apply_explanation(model: &Model, explanation: &Explanation) -> Result<Model, EditError> {
    apply_edits(model, explanation.edits())
}

pub fn apply_edits<'a>(model: &Model, edits: impl IntoIterator<Item = &'a Edit>) -> Result<Model, EditError> {
    let mut set = gamma(model);
    for edit in edits {
        apply_to_set(&mut set, edit)?;
    }
    Ok(ungamma(&set, &Signature::of(model))?)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EditOptions {
    /// Reconcile differing action costs with one replacing cost edit per action.
    pub allow_cost_edits: bool,
}

/// Every unit edit that moves `current` one step closer to `target`:
/// removals of conditions only `current` has, then additions of conditions
/// only `target` has.
pub fn edits_toward(current: &Model, target: &Model, options: EditOptions) -> Vec<Edit> {
    let delta = model_delta(current, target);
    let mut edits: Vec<Edit> = delta
        .only_in_first
        .into_iter()
        .filter(|f| !f.is_cost())
        .map(Edit::remove)
        .collect();
    edits.extend(
        delta
            .only_in_second
            .into_iter()
            .filter(|f| options.allow_cost_edits || !f.is_cost())
            .map(Edit::add),
    );
    edits
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EditParseError {
    #[error("`{0}` does not start with add-has- or remove-has-")]
    Direction(String),
    #[error("`{0}` has no known condition kind")]
    Kind(String),
    #[error("`{0}` names no action of the model")]
    Action(String),
    #[error("`{0}` names more than one action of the model")]
    Ambiguous(String),
    #[error("`{0}` has a malformed payload")]
    Payload(String),
}

/// Parses the text form of an [`Edit`]; action names are resolved against
/// the signature since both action names and fluents may contain hyphens.
pub fn parse_edit(text: &str, signature: &Signature) -> Result<Edit, EditParseError> {
    let text = text.trim();
    let (direction, rest) = if let Some(rest) = text.strip_prefix("add-has-") {
        (Direction::Add, rest)
    } else if let Some(rest) = text.strip_prefix("remove-has-") {
        (Direction::Remove, rest)
    } else {
        return Err(EditParseError::Direction(text.to_string()));
    };
    let (kind, payload) = ConditionKind::ALL
        .iter()
        .find_map(|kind| {
            rest.strip_prefix(kind.label())
                .and_then(|p| p.strip_prefix('-'))
                .map(|p| (*kind, p))
        })
        .ok_or_else(|| EditParseError::Kind(text.to_string()))?;
    let fluent_of = |s: &str| Fluent::parse(s).ok_or_else(|| EditParseError::Payload(text.to_string()));
    let fluent = match kind {
        ConditionKind::InitHas => ModelFluent::Init(fluent_of(payload)?),
        ConditionKind::GoalHas => ModelFluent::Goal(fluent_of(payload)?),
        _ => {
            let mut splits = payload
                .match_indices('-')
                .map(|(i, _)| (&payload[..i], &payload[i + 1..]))
                .filter(|(action, _)| signature.actions.contains(*action));
            let (action, tail) = splits.next().ok_or_else(|| EditParseError::Action(text.to_string()))?;
            if splits.next().is_some() {
                return Err(EditParseError::Ambiguous(text.to_string()));
            }
            let action = action.to_string();
            match kind {
                ConditionKind::PreconditionHas => ModelFluent::Precondition {
                    action,
                    fluent: fluent_of(tail)?,
                },
                ConditionKind::AddEffectHas => ModelFluent::AddEffect {
                    action,
                    fluent: fluent_of(tail)?,
                },
                ConditionKind::DelEffectHas => ModelFluent::DelEffect {
                    action,
                    fluent: fluent_of(tail)?,
                },
                ConditionKind::CostIs => ModelFluent::Cost {
                    action,
                    cost: parse_rational(tail).ok_or_else(|| EditParseError::Payload(text.to_string()))?,
                },
                ConditionKind::InitHas | ConditionKind::GoalHas => unreachable!(),
            }
        }
    };
    Ok(Edit { direction, fluent })
}
