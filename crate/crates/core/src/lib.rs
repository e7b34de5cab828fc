//! Human-aware planning with explicability/explanation trade-offs.
//!
//! The crate is organized bottom-up:
//!
//! * [`strips`]: grounded models, plans, transition semantics and plan cost.
//! * [`planner`]: cost-optimal planning plus a blind certification oracle.
//! * [`model_space`]: models as condition sets, unit edits and explanations.
//! * [`mega`]: model-space search trading explanation length against the
//!   robot's loss of optimality, the minimal-explanation baseline and a
//!   brute-force oracle.
//! * [`pddl`]: reading and writing domain/problem text, bundles and overlays.
//! * [`scenarios`]: generators for the evaluation domains.

pub mod mega;
pub mod model_space;
pub mod pddl;
pub mod planner;
pub mod scenarios;
pub mod strips;

pub use mega::{mega_search, reevaluate, sweep_alpha, HapProblem, Ledger, MegaError, MegaOptions, Solution};
pub use model_space::{Edit, Explanation, ModelFluent};
pub use pddl::{load_bundle, ProblemBundle};
pub use planner::{Planner, PlannerConfig, PlannerError};
pub use strips::{Action, Cost, Fluent, Model, Plan, Rational};
