//! Writes a grounded model back out as a parameterless domain and problem.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::PddlError;
use crate::strips::{Fluent, FluentSet, Model, Rational};

fn is_identifier(text: &str) -> bool {
    let mut chars = text.chars();
    chars.next().is_some_and(|c| c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_' || c == '-')
}

fn unwritable(what: String) -> PddlError {
    PddlError::Unwritable(what)
}

/// Exact decimal text for costs whose denominator has no prime factor
/// other than 2 and 5.
fn decimal(value: Rational) -> Option<String> {
    if value.is_integer() {
        return Some(value.to_integer().to_string());
    }
    let (mut d, mut twos, mut fives) = (*value.denom(), 0_u32, 0_u32);
    while d % 2 == 0 {
        d /= 2;
        twos += 1;
    }
    while d % 5 == 0 {
        d /= 5;
        fives += 1;
    }
    if d != 1 {
        return None;
    }
    let digits = twos.max(fives);
    let scale = 10_i64.checked_pow(digits)?;
    let scaled = (value * Rational::from_integer(scale)).to_integer();
    let sign = if scaled < 0 { "-" } else { "" };
    let scaled = scaled.abs();
    Some(format!(
        "{sign}{}.{:0width$}",
        scaled / scale,
        scaled % scale,
        width = digits as usize
    ))
}

fn atom(fluent: &Fluent) -> String {
    if fluent.args.is_empty() {
        format!("({})", fluent.name)
    } else {
        format!("({} {})", fluent.name, fluent.args.join(" "))
    }
}

fn conjunction(set: &FluentSet) -> String {
    let atoms: Vec<String> = set.iter().map(atom).collect();
    format!("(and {})", atoms.join(" ")).replace("(and )", "(and)")
}

/// Domain and problem text for `model`. Action names, predicate names and
/// arguments must be lowercase identifiers, and each predicate must be used
/// with one arity.
pub fn write_domain_problem(model: &Model, name: &str) -> Result<(String, String), PddlError> {
    if !is_identifier(name) {
        return Err(unwritable(format!("name `{name}`")));
    }
    let mut arity: BTreeMap<&str, usize> = BTreeMap::new();
    let mut constants = BTreeSet::new();
    for fluent in model.fluents() {
        if !is_identifier(&fluent.name) {
            return Err(unwritable(format!("predicate `{}`", fluent.name)));
        }
        if *arity.entry(&fluent.name).or_insert(fluent.args.len()) != fluent.args.len() {
            return Err(unwritable(format!("predicate `{}` used with two arities", fluent.name)));
        }
        for arg in &fluent.args {
            if !is_identifier(arg) {
                return Err(unwritable(format!("object `{arg}`")));
            }
            constants.insert(arg.as_str());
        }
    }

    let mut domain = String::new();
    writeln!(domain, "(define (domain {name})").unwrap();
    writeln!(domain, "  (:requirements :strips :action-costs)").unwrap();
    if !constants.is_empty() {
        writeln!(
            domain,
            "  (:constants {})",
            constants.into_iter().collect::<Vec<_>>().join(" ")
        )
        .unwrap();
    }
    writeln!(domain, "  (:predicates").unwrap();
    for (predicate, n) in &arity {
        let params: String = (1..=*n).map(|i| format!(" ?x{i}")).collect();
        writeln!(domain, "    ({predicate}{params})").unwrap();
    }
    writeln!(domain, "  )").unwrap();
    writeln!(domain, "  (:functions (total-cost))").unwrap();
    for action in model.actions().values() {
        if !is_identifier(action.name()) {
            return Err(unwritable(format!("action `{}`", action.name())));
        }
        let cost =
            decimal(action.cost()).ok_or_else(|| unwritable(format!("cost of `{}` as a decimal", action.name())))?;
        let mut effects: Vec<String> = action.add().iter().map(atom).collect();
        effects.extend(action.del().iter().map(|f| format!("(not {})", atom(f))));
        effects.push(format!("(increase (total-cost) {cost})"));
        writeln!(domain, "  (:action {}", action.name()).unwrap();
        writeln!(domain, "    :parameters ()").unwrap();
        writeln!(domain, "    :precondition {}", conjunction(action.pre())).unwrap();
        writeln!(domain, "    :effect (and {}))", effects.join(" ")).unwrap();
    }
    writeln!(domain, ")").unwrap();

    let mut problem = String::new();
    writeln!(problem, "(define (problem {name}-problem)").unwrap();
    writeln!(problem, "  (:domain {name})").unwrap();
    let mut init: Vec<String> = model.init().iter().map(atom).collect();
    init.push("(= (total-cost) 0)".to_string());
    writeln!(problem, "  (:init {})", init.join(" ")).unwrap();
    writeln!(problem, "  (:goal {})", conjunction(model.goal())).unwrap();
    writeln!(problem, "  (:metric minimize (total-cost)))").unwrap();
    Ok((domain, problem))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals() {
        assert_eq!(decimal(Rational::from_integer(3)).as_deref(), Some("3"));
        assert_eq!(decimal(Rational::new(5, 2)).as_deref(), Some("2.5"));
        assert_eq!(decimal(Rational::new(3, 40)).as_deref(), Some("0.075"));
        assert_eq!(decimal(Rational::new(1, 3)), None);
    }

    #[test]
    fn identifiers() {
        assert!(is_identifier("a-b_2"));
        assert!(!is_identifier("move p1 p2"));
        assert!(!is_identifier("A"));
        assert!(!is_identifier(""));
    }
}
