//! Reading and writing planning problems: a STRIPS subset of the usual
//! domain/problem language (typing, constants, equality, action costs),
//! robot/human bundles, and edit overlays.

mod bundle;
mod ground;
mod lifted;
pub mod sexpr;
mod write;

use thiserror::Error;

use crate::strips::{Model, ModelError};

pub use bundle::{
    apply_overlay, load_bundle, parse_explanation, parse_overlay, serialize_explanation, write_overlay, HumanSide,
    ProblemBundle, EXPLANATION_PREFIX, MANIFEST,
};
pub use lifted::{parse_domain, parse_problem, Domain, Problem};
pub use write::write_domain_problem;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PddlError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("unsupported construct at {line}:{col}: {construct}")]
    Unsupported { construct: String, line: usize, col: usize },
    #[error("undeclared {kind} `{name}`")]
    Undeclared { kind: &'static str, name: String },
    #[error("robot and human vocabularies differ: {0}")]
    VocabularyMismatch(String),
    #[error("overlay line {line}: {message}")]
    Overlay { line: usize, message: String },
    #[error("cannot write {0}")]
    Unwritable(String),
    #[error("bundle manifest: {0}")]
    Manifest(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Parses and grounds one domain and problem.
pub fn parse_domain_problem(domain: &str, problem: &str) -> Result<Model, PddlError> {
    let domain = parse_domain(domain)?;
    let problem = parse_problem(problem)?;
    Ok(ground::ground_all(&[(&domain, &problem)])?.remove(0))
}

/// Grounds a robot and a human domain/problem over one action vocabulary.
pub fn ground_pair(robot: (&str, &str), human: (&str, &str)) -> Result<(Model, Model), PddlError> {
    let (rd, rp) = (parse_domain(robot.0)?, parse_problem(robot.1)?);
    let (hd, hp) = (parse_domain(human.0)?, parse_problem(human.1)?);
    let mut models = ground::ground_all(&[(&rd, &rp), (&hd, &hp)])?;
    let human = models.pop().expect("two sides");
    let robot = models.pop().expect("two sides");
    Ok((robot, human))
}

#[cfg(test)]
mod tests;
