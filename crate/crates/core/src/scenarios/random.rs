//! Random propositional problems with a random human perturbation.

use std::collections::BTreeSet;

use rand::seq::{IteratorRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ScenarioError;
use crate::model_space::{gamma, Edit, ModelFluent};
use crate::pddl::{apply_overlay, parse_domain_problem, write_domain_problem, write_overlay, HumanSide, ProblemBundle};
use crate::planner::{optimal_cost, PlannerConfig};
use crate::strips::{Action, Fluent, FluentSet, Model, Rational};

pub struct RandomSpec {
    pub fluents: usize,
    pub actions: usize,
    pub delta_size: usize,
    pub seed: u64,
}

const ATTEMPTS: usize = 500;

fn random_model(spec: &RandomSpec, rng: &mut ChaCha8Rng) -> Option<Model> {
    let fluents: Vec<Fluent> = (0..spec.fluents)
        .map(|i| Fluent::new(format!("f{i}"), Vec::<String>::new()))
        .collect();
    let pick = |rng: &mut ChaCha8Rng, n: usize, from: &[Fluent]| -> FluentSet {
        from.choose_multiple(rng, n).cloned().collect()
    };
    let mut actions = Vec::new();
    for i in 0..spec.actions {
        let n_pre = rng.gen_range(0..=2);
        let pre = pick(rng, n_pre, &fluents);
        let n_add = rng.gen_range(1..=2);
        let add = pick(rng, n_add, &fluents);
        let rest: Vec<Fluent> = fluents.iter().filter(|f| !add.contains(*f)).cloned().collect();
        let n_del = rng.gen_range(0..=1);
        let del = pick(rng, n_del, &rest);
        let cost = Rational::from_integer(rng.gen_range(1..=3));
        actions.push(Action::new(format!("a{i}"), cost, pre, add, del).ok()?);
    }
    let init: FluentSet = fluents.iter().filter(|_| rng.gen_bool(0.4)).cloned().collect();
    let n_goal = rng.gen_range(1..=2);
    let goal = pick(rng, n_goal, &fluents);
    Model::closed(actions, init, goal).ok()
}

/// Conditions that can be toggled without making an action add and delete
/// the same fluent.
fn toggles(model: &Model) -> Vec<Edit> {
    let present = gamma(model);
    let mut all = BTreeSet::new();
    for fluent in model.fluents() {
        all.insert(ModelFluent::Init(fluent.clone()));
        all.insert(ModelFluent::Goal(fluent.clone()));
        for action in model.actions().values() {
            let name = action.name().to_string();
            all.insert(ModelFluent::Precondition {
                action: name.clone(),
                fluent: fluent.clone(),
            });
            if !action.del().contains(fluent) {
                all.insert(ModelFluent::AddEffect {
                    action: name.clone(),
                    fluent: fluent.clone(),
                });
            }
            if !action.add().contains(fluent) {
                all.insert(ModelFluent::DelEffect {
                    action: name,
                    fluent: fluent.clone(),
                });
            }
        }
    }
    all.into_iter()
        .map(|f| {
            if present.contains(&f) {
                Edit::remove(f)
            } else {
                Edit::add(f)
            }
        })
        .collect()
}

pub fn generate(spec: &RandomSpec) -> Result<ProblemBundle, ScenarioError> {
    if spec.fluents == 0 || spec.actions == 0 {
        return Err(ScenarioError::Infeasible(
            "need at least one fluent and one action".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for _ in 0..ATTEMPTS {
        let Some(model) = random_model(spec, &mut rng) else {
            continue;
        };
        if !optimal_cost(&model, &PlannerConfig::default())?.is_finite() {
            continue;
        }
        let (domain, problem) = write_domain_problem(&model, "random")?;
        let robot = parse_domain_problem(&domain, &problem)?;
        let candidates = toggles(&robot);
        if candidates.len() < spec.delta_size {
            continue;
        }
        let chosen: Vec<Edit> = candidates.into_iter().choose_multiple(&mut rng, spec.delta_size);
        let overlay = write_overlay(&chosen);
        if apply_overlay(&robot, &overlay).is_err() {
            continue;
        }
        return Ok(ProblemBundle {
            robot_domain: domain,
            robot_problem: problem,
            human: HumanSide::Overlay(overlay),
        });
    }
    Err(ScenarioError::RetryBudget { attempts: ATTEMPTS })
}
