//! Robot/human problem bundles and the edit-overlay format.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ground_pair, parse_domain_problem, PddlError};
use crate::mega::HapProblem;
use crate::model_space::{
    apply_to_set, gamma, parse_edit, ungamma, Edit, EditError, Explanation, ModelFluent, Signature,
};
use crate::strips::Model;

pub const MANIFEST: &str = "bundle.toml";
pub const EXPLANATION_PREFIX: &str = "Explanation >> ";

/// How the human's model is given.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HumanSide {
    /// A full domain and problem of its own.
    Full { domain: String, problem: String },
    /// Edits that turn the robot's model into the human's, one per line.
    Overlay(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemBundle {
    pub robot_domain: String,
    pub robot_problem: String,
    pub human: HumanSide,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct Manifest {
    robot_domain: PathBuf,
    robot_problem: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    human_overlay: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    human_domain: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    human_problem: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String, PddlError> {
    fs::read_to_string(path).map_err(|e| PddlError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn write(path: &Path, text: &str) -> Result<(), PddlError> {
    fs::write(path, text).map_err(|e| PddlError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

impl ProblemBundle {
    /// Reads a bundle from its manifest, or from `dir/bundle.toml` when
    /// given a directory. Paths in the manifest are relative to it.
    pub fn read(path: impl AsRef<Path>) -> Result<Self, PddlError> {
        let mut path = path.as_ref().to_path_buf();
        if path.is_dir() {
            path.push(MANIFEST);
        }
        let manifest: Manifest =
            toml::from_str(&read(&path)?).map_err(|e| PddlError::Manifest(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let human = match (&manifest.human_overlay, &manifest.human_domain, &manifest.human_problem) {
            (Some(overlay), None, None) => HumanSide::Overlay(read(&base.join(overlay))?),
            (None, Some(domain), Some(problem)) => HumanSide::Full {
                domain: read(&base.join(domain))?,
                problem: read(&base.join(problem))?,
            },
            _ => {
                return Err(PddlError::Manifest(
                    "give either human_overlay or both human_domain and human_problem".into(),
                ))
            }
        };
        Ok(ProblemBundle {
            robot_domain: read(&base.join(&manifest.robot_domain))?,
            robot_problem: read(&base.join(&manifest.robot_problem))?,
            human,
        })
    }

    /// Writes the bundle's files and manifest into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<(), PddlError> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| PddlError::Io {
            path: dir.display().to_string(),
            message: e.to_string(),
        })?;
        let mut manifest = Manifest {
            robot_domain: "robot-domain.pddl".into(),
            robot_problem: "robot-problem.pddl".into(),
            ..Manifest::default()
        };
        write(&dir.join(&manifest.robot_domain), &self.robot_domain)?;
        write(&dir.join(&manifest.robot_problem), &self.robot_problem)?;
        match &self.human {
            HumanSide::Overlay(text) => {
                let file = PathBuf::from("human.overlay");
                write(&dir.join(&file), text)?;
                manifest.human_overlay = Some(file);
            }
            HumanSide::Full { domain, problem } => {
                let (d, p) = (PathBuf::from("human-domain.pddl"), PathBuf::from("human-problem.pddl"));
                write(&dir.join(&d), domain)?;
                write(&dir.join(&p), problem)?;
                manifest.human_domain = Some(d);
                manifest.human_problem = Some(p);
            }
        }
        let text = toml::to_string(&manifest).map_err(|e| PddlError::Manifest(e.to_string()))?;
        write(&dir.join(MANIFEST), &text)
    }

    /// Grounds both sides into a problem over a shared vocabulary.
    pub fn load(&self) -> Result<HapProblem, PddlError> {
        let (robot, human) = match &self.human {
            HumanSide::Full { domain, problem } => {
                ground_pair((&self.robot_domain, &self.robot_problem), (domain, problem))?
            }
            HumanSide::Overlay(text) => {
                let robot = parse_domain_problem(&self.robot_domain, &self.robot_problem)?;
                let human = apply_overlay(&robot, text)?;
                (robot, human)
            }
        };
        HapProblem::unify(robot, human).map_err(|e| PddlError::VocabularyMismatch(e.to_string()))
    }
}

/// Reads a bundle from disk and grounds it.
pub fn load_bundle(path: impl AsRef<Path>) -> Result<HapProblem, PddlError> {
    ProblemBundle::read(path)?.load()
}

/// Edits of an overlay or explanation text with their line numbers. Blank
/// lines and `#` comments are skipped; an `Explanation >> ` prefix is
/// accepted.
pub fn parse_overlay(text: &str, signature: &Signature) -> Result<Vec<(usize, Edit)>, PddlError> {
    let mut edits = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        let line = line.strip_prefix(EXPLANATION_PREFIX.trim_end()).unwrap_or(line).trim();
        if line.is_empty() {
            continue;
        }
        let edit = parse_edit(line, signature).map_err(|e| PddlError::Overlay {
            line: i + 1,
            message: e.to_string(),
        })?;
        edits.push((i + 1, edit));
    }
    Ok(edits)
}

/// `model` with the overlay's edits applied; a no-op edit is an error.
pub fn apply_overlay(model: &Model, text: &str) -> Result<Model, PddlError> {
    let signature = Signature::of(model);
    let mut conditions: BTreeSet<ModelFluent> = gamma(model);
    for (line, edit) in parse_overlay(text, &signature)? {
        apply_to_set(&mut conditions, &edit).map_err(|e| PddlError::Overlay {
            line,
            message: e.to_string(),
        })?;
    }
    ungamma(&conditions, &signature).map_err(|e| PddlError::Overlay {
        line: 0,
        message: EditError::from(e).to_string(),
    })
}

/// Parses serialized explanation text back into an [`Explanation`].
pub fn parse_explanation(text: &str, signature: &Signature) -> Result<Explanation, PddlError> {
    let edits = parse_overlay(text, signature)?.into_iter().map(|(_, e)| e);
    Explanation::new(edits).map_err(|e| PddlError::Overlay {
        line: 0,
        message: e.to_string(),
    })
}

/// One `Explanation >> <edit>` line per edit, sorted.
pub fn serialize_explanation(explanation: &Explanation) -> String {
    explanation
        .lines()
        .into_iter()
        .map(|line| format!("{EXPLANATION_PREFIX}{line}\n"))
        .collect()
}

/// Overlay text listing `edits` one per line, sorted.
pub fn write_overlay(edits: &[Edit]) -> String {
    let mut lines: Vec<String> = edits.iter().map(ToString::to_string).collect();
    lines.sort();
    lines.into_iter().map(|line| line + "\n").collect()
}
