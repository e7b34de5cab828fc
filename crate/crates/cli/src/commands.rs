use std::fs;
use std::io::Write;
use std::path::Path;

use mega_core::mega::{mce_search, TieRule};
use mega_core::model_space::{edits_toward, EditOptions};
use mega_core::pddl::{serialize_explanation, PddlError};
use mega_core::planner::{optimal_plan, optimal_plan_toward};
use mega_core::scenarios::{generate, Family, ScenarioError, ScenarioSpec};
use mega_core::strips::{format_rational, plan_cost, progress};
use mega_core::{load_bundle, Cost, HapProblem, MegaError, MegaOptions, Plan, PlannerError, Rational, Solution};
use serde_json::json;

use crate::{Alpha, Cli, Command, Format, Global, Side};

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    fn input(message: impl Into<String>) -> Self {
        Failure::new(2, message)
    }
}

fn planner_code(e: &PlannerError) -> u8 {
    match e {
        PlannerError::NodeLimit { .. } | PlannerError::TimeLimit { .. } => 3,
        PlannerError::CostOverflow => 2,
    }
}

impl From<PlannerError> for Failure {
    fn from(e: PlannerError) -> Self {
        Failure::new(planner_code(&e), e.to_string())
    }
}

impl From<PddlError> for Failure {
    fn from(e: PddlError) -> Self {
        Failure::input(e.to_string())
    }
}

impl From<MegaError> for Failure {
    fn from(e: MegaError) -> Self {
        let code = match &e {
            MegaError::UnsolvableRobot
            | MegaError::NoEligibleNode
            | MegaError::NoExplanation
            | MegaError::PlanNotOptimal => 1,
            MegaError::Planner(p) => planner_code(p),
            _ => 2,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        let code = match &e {
            ScenarioError::Infeasible(_) | ScenarioError::RetryBudget { .. } => 1,
            ScenarioError::Planner(p) => planner_code(p),
            _ => 2,
        };
        Failure::new(code, e.to_string())
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn emit(global: &Global, text: &str) -> Result<(), Failure> {
    match &global.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .map_err(|e| Failure::input(format!("stdout: {e}")))
        }
    }
}

fn options(global: &Global) -> MegaOptions {
    MegaOptions {
        edits: edit_options(global),
        planner: global.planner(),
        tie_rule: if global.latest_wins {
            TieRule::LatestWins
        } else {
            TieRule::LowerPenalty
        },
        ..MegaOptions::default()
    }
}

fn edit_options(global: &Global) -> EditOptions {
    EditOptions {
        allow_cost_edits: global.allow_cost_edits,
    }
}

fn resolve_alpha(alpha: Alpha, problem: &HapProblem, global: &Global) -> Rational {
    match alpha {
        Alpha::Value(v) => v,
        Alpha::Delta => {
            let size = edits_toward(problem.human(), problem.robot(), edit_options(global)).len();
            Rational::from_integer(size as i64)
        }
    }
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header).expect("in-memory csv");
    for row in rows {
        writer.write_record(row).expect("in-memory csv");
    }
    String::from_utf8(writer.into_inner().expect("in-memory csv")).expect("csv is utf-8")
}

const SWEEP_HEADER: [&str; 6] = [
    "alpha",
    "explanation_size",
    "plan_cost_robot",
    "objective",
    "nodes",
    "time_secs",
];

pub fn run(cli: &Cli) -> Result<(), Failure> {
    let global = &cli.global;
    match &cli.command {
        Command::Plan { bundle, side } => plan(global, &load_bundle(&bundle.bundle)?, *side),
        Command::Mega { bundle, alpha, ledger } => {
            mega(global, &load_bundle(&bundle.bundle)?, *alpha, ledger.as_deref())
        }
        Command::Sweep { bundle, alphas, timing } => sweep(global, &load_bundle(&bundle.bundle)?, alphas, *timing),
        Command::Mce { bundle, plan } => mce(global, &load_bundle(&bundle.bundle)?, plan.as_deref()),
        Command::Diff { bundle } => diff(global, &load_bundle(&bundle.bundle)?),
        Command::Validate { bundle, plan, side } => validate(global, &load_bundle(&bundle.bundle)?, plan, *side),
        Command::Generate { .. } => generate_bundle(global, &cli.command),
    }
}

fn side_model(problem: &HapProblem, side: Side) -> &mega_core::Model {
    match side {
        Side::Robot => problem.robot(),
        Side::Human => problem.human(),
    }
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Robot => "robot",
        Side::Human => "human",
    }
}

fn plan(global: &Global, problem: &HapProblem, side: Side) -> Result<(), Failure> {
    let result = optimal_plan(side_model(problem, side), &global.planner())?;
    let Some(plan) = result.plan else {
        return Err(Failure::new(1, format!("no plan in the {} model", side_name(side))));
    };
    let text = match global.format {
        Format::Text => format!("{plan}; cost {}\n", result.cost),
        Format::Csv => csv_text(
            &["side", "steps", "cost", "nodes_expanded"],
            &[vec![
                side_name(side).to_string(),
                plan.steps.join("; "),
                result.cost.to_string(),
                result.nodes_expanded.to_string(),
            ]],
        ),
        Format::Record => {
            json!({
                "side": side_name(side),
                "plan": plan.steps,
                "cost": result.cost.to_string(),
                "nodes_expanded": result.nodes_expanded,
            })
            .to_string()
                + "\n"
        }
    };
    emit(global, &text)
}

fn solution_record(solution: &Solution, nodes: usize) -> serde_json::Value {
    json!({
        "alpha": format_rational(&solution.alpha),
        "plan": solution.plan.steps,
        "explanation": solution.explanation.lines(),
        "explanation_size": solution.explanation_size,
        "plan_cost_robot": format_rational(&solution.plan_cost_in_robot),
        "explicability_penalty": format_rational(&solution.explicability_penalty),
        "objective": format_rational(&solution.objective),
        "nodes": nodes,
    })
}

fn mega(global: &Global, problem: &HapProblem, alpha: Alpha, ledger_path: Option<&Path>) -> Result<(), Failure> {
    let alpha = resolve_alpha(alpha, problem, global);
    let (solution, ledger) = mega_core::mega_search(problem, alpha, &options(global))?;
    if let Some(path) = ledger_path {
        fs::write(path, ledger.to_csv()).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    }
    let text = match global.format {
        Format::Text => format!(
            "{}{}; {}\n",
            solution.plan,
            serialize_explanation(&solution.explanation),
            solution.summary()
        ),
        Format::Csv => csv_text(
            &SWEEP_HEADER,
            &[vec![
                format_rational(&solution.alpha),
                solution.explanation_size.to_string(),
                format_rational(&solution.plan_cost_in_robot),
                format_rational(&solution.objective),
                ledger.nodes.len().to_string(),
                String::new(),
            ]],
        ),
        Format::Record => solution_record(&solution, ledger.nodes.len()).to_string() + "\n",
    };
    emit(global, &text)
}

fn sweep(global: &Global, problem: &HapProblem, alphas: &[Alpha], timing: bool) -> Result<(), Failure> {
    let values: Vec<Rational> = alphas.iter().map(|&a| resolve_alpha(a, problem, global)).collect();
    let (rows, ledger) = mega_core::sweep_alpha(problem, &values, &options(global))?;
    let nodes = ledger.nodes.len().to_string();
    let time = if timing {
        format!("{:.6}", ledger.wall_time.as_secs_f64())
    } else {
        String::new()
    };
    let text = match global.format {
        Format::Record => rows
            .iter()
            .map(|r| {
                json!({
                    "alpha": format_rational(&r.alpha),
                    "explanation_size": r.explanation_size,
                    "plan_cost_robot": format_rational(&r.plan_cost_in_robot),
                    "explicability_penalty": format_rational(&r.explicability_penalty),
                    "objective": format_rational(&r.objective),
                    "nodes": ledger.nodes.len(),
                })
                .to_string()
                    + "\n"
            })
            .collect(),
        // A sweep is tabular; text and csv coincide.
        Format::Text | Format::Csv => csv_text(
            &SWEEP_HEADER,
            &rows
                .iter()
                .map(|r| {
                    vec![
                        format_rational(&r.alpha),
                        r.explanation_size.to_string(),
                        format_rational(&r.plan_cost_in_robot),
                        format_rational(&r.objective),
                        nodes.clone(),
                        time.clone(),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
    };
    emit(global, &text)
}

fn mce(global: &Global, problem: &HapProblem, plan_path: Option<&Path>) -> Result<(), Failure> {
    let plan = match plan_path {
        Some(path) => Plan::parse(&read_text(path)?),
        None => {
            let result = optimal_plan_toward(problem.robot(), problem.human(), &global.planner())?;
            result
                .result
                .plan
                .ok_or_else(|| Failure::from(MegaError::UnsolvableRobot))?
        }
    };
    let explanation = mce_search(problem, &plan, &options(global))?;
    let text = match global.format {
        Format::Text => format!(
            "{plan}{}; |E|={}\n",
            serialize_explanation(&explanation),
            explanation.len()
        ),
        Format::Csv => csv_text(
            &["plan", "explanation_size", "edits"],
            &[vec![
                plan.steps.join("; "),
                explanation.len().to_string(),
                explanation.lines().join("; "),
            ]],
        ),
        Format::Record => {
            json!({
                "plan": plan.steps,
                "explanation": explanation.lines(),
                "explanation_size": explanation.len(),
            })
            .to_string()
                + "\n"
        }
    };
    emit(global, &text)
}

fn diff(global: &Global, problem: &HapProblem) -> Result<(), Failure> {
    let mut lines: Vec<String> = edits_toward(problem.human(), problem.robot(), edit_options(global))
        .iter()
        .map(ToString::to_string)
        .collect();
    lines.sort();
    let text = match global.format {
        Format::Text => lines.iter().map(|l| format!("{l}\n")).collect(),
        Format::Csv => csv_text(&["edit"], &lines.iter().map(|l| vec![l.clone()]).collect::<Vec<_>>()),
        Format::Record => json!({ "edits": lines }).to_string() + "\n",
    };
    emit(global, &text)
}

fn validate(global: &Global, problem: &HapProblem, plan_path: &Path, side: Side) -> Result<(), Failure> {
    let plan = Plan::parse(&read_text(plan_path)?);
    let model = side_model(problem, side);
    let outcome = progress(model.init(), &plan, model);
    let optimal = optimal_plan(model, &global.planner())?.cost;
    let cost = plan_cost(&plan, model);
    let (valid, reason) = match &outcome {
        Err(failure) => (false, failure.to_string()),
        Ok(_) if !cost.is_finite() => (false, "goal not reached".to_string()),
        Ok(_) => (true, String::new()),
    };
    let gap = match (cost, optimal) {
        (Cost::Finite(c), Cost::Finite(o)) => Cost::Finite(c - o),
        _ => Cost::Infinite,
    };
    let text = match global.format {
        Format::Text if valid => format!("valid; cost {cost}; optimal {optimal}; suboptimality {gap}\n"),
        Format::Text => format!("invalid: {reason}\n"),
        Format::Csv => csv_text(
            &["side", "valid", "cost", "optimal", "suboptimality", "reason"],
            &[vec![
                side_name(side).to_string(),
                valid.to_string(),
                cost.to_string(),
                optimal.to_string(),
                gap.to_string(),
                reason.clone(),
            ]],
        ),
        Format::Record => {
            json!({
                "side": side_name(side),
                "valid": valid,
                "cost": cost.to_string(),
                "optimal": optimal.to_string(),
                "suboptimality": gap.to_string(),
                "reason": reason,
            })
            .to_string()
                + "\n"
        }
    };
    emit(global, &text)?;
    if valid {
        Ok(())
    } else {
        Err(Failure::new(
            1,
            format!("plan is not valid in the {} model", side_name(side)),
        ))
    }
}

fn generate_bundle(global: &Global, command: &Command) -> Result<(), Failure> {
    let Command::Generate {
        family,
        config,
        delta_size,
        waypoints,
        objectives,
        ingredients,
        width,
        height,
        rubble,
        collapsed,
        fluents,
        actions,
    } = command
    else {
        unreachable!("dispatched on Generate");
    };
    let mut spec = match (config, family) {
        (Some(path), _) => ScenarioSpec::from_config(&read_text(path)?)?,
        (None, Some(name)) => ScenarioSpec::new(name.parse::<Family>()?),
        (None, None) => return Err(Failure::input("generate needs --family or --config")),
    };
    if let Some(name) = family {
        spec.family = name.parse()?;
    }
    let overrides = [
        (&mut spec.delta_size, delta_size),
        (&mut spec.waypoints, waypoints),
        (&mut spec.objectives, objectives),
        (&mut spec.ingredients, ingredients),
        (&mut spec.width, width),
        (&mut spec.height, height),
        (&mut spec.rubble, rubble),
        (&mut spec.collapsed, collapsed),
        (&mut spec.fluents, fluents),
        (&mut spec.actions, actions),
    ];
    for (field, value) in overrides {
        if value.is_some() {
            *field = *value;
        }
    }
    if let Some(seed) = global.seed {
        spec.seed = seed;
    }
    let Some(dir) = &global.out else {
        return Err(Failure::input("generate needs --out DIR"));
    };
    let bundle = generate(&spec)?;
    fs::create_dir_all(dir).map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?;
    bundle.write(dir)?;
    fs::write(dir.join("scenario.toml"), spec.to_config())
        .map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?;
    // Make sure what was written loads back.
    load_bundle(dir)?;
    eprintln!("wrote {}", dir.display());
    Ok(())
}
