//! Robot/human problem generators: search-and-rescue maps, a rover whose
//! observers hold an outdated model, a two-handed barman, and random
//! propositional problems for property tests.

pub mod barman;
pub mod corridor;
pub mod random;
pub mod rover;
pub mod usar;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pddl::{PddlError, ProblemBundle};
use crate::planner::PlannerError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("infeasible scenario: {0}")]
    Infeasible(String),
    #[error("no solvable instance found in {attempts} attempts")]
    RetryBudget { attempts: usize },
    #[error("invalid scenario config: {0}")]
    Config(String),
    #[error(transparent)]
    Pddl(#[from] PddlError),
    #[error(transparent)]
    Planner(#[from] PlannerError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    RoverMartian,
    BarmanBar,
    UsarGrid,
    /// The fixed demonstration map.
    UsarDemo,
    Random,
}

impl std::str::FromStr for Family {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rover-martian" => Ok(Family::RoverMartian),
            "barman-bar" => Ok(Family::BarmanBar),
            "usar-grid" => Ok(Family::UsarGrid),
            "usar-demo" => Ok(Family::UsarDemo),
            "random" => Ok(Family::Random),
            other => Err(ScenarioError::Config(format!("unknown family `{other}`"))),
        }
    }
}

/// A generator configuration. Size fields not used by the family are
/// ignored; missing ones take the defaults listed on each field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub family: Family,
    /// Defaults to every available condition for rover/barman, 3 for the
    /// demo map, 2 for grids and 4 for random problems.
    #[serde(default)]
    pub delta_size: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Rover, default 4.
    #[serde(default)]
    pub waypoints: Option<usize>,
    /// Rover, default 1.
    #[serde(default)]
    pub objectives: Option<usize>,
    /// Barman, default 2.
    #[serde(default)]
    pub ingredients: Option<usize>,
    /// Grid, default 3 by 3.
    #[serde(default)]
    pub width: Option<usize>,
    #[serde(default)]
    pub height: Option<usize>,
    /// Grid, default 1.
    #[serde(default)]
    pub rubble: Option<usize>,
    /// Grid, default 1.
    #[serde(default)]
    pub collapsed: Option<usize>,
    /// Random, default 6.
    #[serde(default)]
    pub fluents: Option<usize>,
    /// Random, default 6.
    #[serde(default)]
    pub actions: Option<usize>,
}

impl ScenarioSpec {
    pub fn new(family: Family) -> Self {
        ScenarioSpec {
            family,
            delta_size: None,
            seed: 0,
            waypoints: None,
            objectives: None,
            ingredients: None,
            width: None,
            height: None,
            rubble: None,
            collapsed: None,
            fluents: None,
            actions: None,
        }
    }

    /// Reads `key = value` lines (TOML syntax; string values quoted).
    pub fn from_config(text: &str) -> Result<Self, ScenarioError> {
        toml::from_str(text).map_err(|e| ScenarioError::Config(e.to_string()))
    }

    pub fn to_config(&self) -> String {
        toml::to_string(self).expect("spec serializes")
    }
}

pub fn generate(spec: &ScenarioSpec) -> Result<ProblemBundle, ScenarioError> {
    match spec.family {
        Family::RoverMartian => {
            let waypoints = spec.waypoints.unwrap_or(4);
            let objectives = spec.objectives.unwrap_or(1);
            let rover = rover::RoverSpec {
                waypoints,
                objectives,
                delta_size: 0,
            };
            let delta_size = spec.delta_size.unwrap_or_else(|| rover::candidate_count(&rover));
            rover::generate(&rover::RoverSpec { delta_size, ..rover })
        }
        Family::BarmanBar => {
            let ingredients = spec.ingredients.unwrap_or(2);
            barman::generate(&barman::BarmanSpec {
                ingredients,
                delta_size: spec.delta_size.unwrap_or(2 * ingredients + 2),
            })
        }
        Family::UsarGrid => usar::grid(&usar::GridSpec {
            width: spec.width.unwrap_or(3),
            height: spec.height.unwrap_or(3),
            rubble: spec.rubble.unwrap_or(1),
            collapsed: spec.collapsed.unwrap_or(1),
            delta_size: spec.delta_size.unwrap_or(2),
            seed: spec.seed,
        }),
        Family::UsarDemo => match spec.delta_size {
            None | Some(3) => Ok(usar::demo()),
            Some(other) => Err(ScenarioError::Infeasible(format!(
                "the demonstration map has a model difference of 3, not {other}"
            ))),
        },
        Family::Random => random::generate(&random::RandomSpec {
            fluents: spec.fluents.unwrap_or(6),
            actions: spec.actions.unwrap_or(6),
            delta_size: spec.delta_size.unwrap_or(4),
            seed: spec.seed,
        }),
    }
}

#[cfg(test)]
mod tests;
