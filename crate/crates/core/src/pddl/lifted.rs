//! Lifted domain and problem descriptions, before grounding.

use std::collections::{BTreeMap, BTreeSet};

use super::sexpr::{self, syntax, Pos, SExpr};
use super::PddlError;
use crate::strips::{parse_rational, Rational};

pub const ROOT_TYPE: &str = "object";

/// A predicate argument: `?var` or an object name.
pub type Term = String;

pub fn is_var(term: &str) -> bool {
    term.starts_with('?')
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
    pub pos: Pos,
}

/// `(= a b)` or `(not (= a b))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equality {
    pub left: Term,
    pub right: Term,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schema {
    pub name: String,
    pub params: Vec<(String, String)>,
    pub pre: Vec<Atom>,
    pub equalities: Vec<Equality>,
    pub add: Vec<Atom>,
    pub del: Vec<Atom>,
    pub cost: Rational,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    pub name: String,
    pub requirements: BTreeSet<String>,
    /// Type to parent type.
    pub types: BTreeMap<String, String>,
    pub constants: Vec<(String, String)>,
    /// Predicate to parameter types.
    pub predicates: BTreeMap<String, Vec<String>>,
    pub schemas: Vec<Schema>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub name: String,
    pub domain: String,
    pub objects: Vec<(String, String)>,
    pub init: Vec<Atom>,
    pub goal: Vec<Atom>,
}

fn unsupported(construct: &str, pos: Pos) -> PddlError {
    PddlError::Unsupported {
        construct: construct.to_string(),
        line: pos.line,
        col: pos.col,
    }
}

/// Splits `(define (kind name) sections...)`.
fn define<'a>(kind: &str, exprs: &'a [SExpr]) -> Result<(String, &'a [SExpr]), PddlError> {
    let [root] = exprs else {
        let pos = exprs.get(1).map(SExpr::pos).unwrap_or(Pos { line: 1, col: 1 });
        return Err(syntax(pos, "expected exactly one `(define ...)` form"));
    };
    let items = root.expect_list("`(define ...)`")?;
    if items.first().and_then(SExpr::atom) != Some("define") {
        return Err(syntax(root.pos(), "expected `define`"));
    }
    let header = items
        .get(1)
        .ok_or_else(|| syntax(root.pos(), format!("missing `({kind} name)`")))?;
    let parts = header.expect_list(&format!("`({kind} name)`"))?;
    match parts {
        [head, name] if head.atom() == Some(kind) => Ok((name.expect_atom("a name")?.to_string(), &items[2..])),
        _ => Err(syntax(header.pos(), format!("expected `({kind} name)`"))),
    }
}

/// `a b - t c` style lists; untyped names get `default`.
fn typed_list(items: &[SExpr], default: &str) -> Result<Vec<(String, String)>, PddlError> {
    let mut out = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let item = &items[i];
        if item.atom() == Some("-") {
            let ty = items
                .get(i + 1)
                .ok_or_else(|| syntax(item.pos(), "missing type after `-`"))?;
            if ty.head() == Some("either") {
                return Err(unsupported("either types", ty.pos()));
            }
            let ty = ty.expect_atom("a type name")?;
            if pending.is_empty() {
                return Err(syntax(item.pos(), "type without names"));
            }
            out.extend(pending.drain(..).map(|name| (name, ty.to_string())));
            i += 2;
            continue;
        }
        pending.push(item.expect_atom("a name")?.to_string());
        i += 1;
    }
    out.extend(pending.into_iter().map(|name| (name, default.to_string())));
    Ok(out)
}

fn atom_of(expr: &SExpr) -> Result<Atom, PddlError> {
    let items = expr.expect_list("an atom")?;
    let Some((head, args)) = items.split_first() else {
        return Err(syntax(expr.pos(), "empty atom"));
    };
    Ok(Atom {
        predicate: head.expect_atom("a predicate name")?.to_string(),
        args: args
            .iter()
            .map(|a| a.expect_atom("a term").map(str::to_string))
            .collect::<Result<_, _>>()?,
        pos: expr.pos(),
    })
}

fn conjuncts(expr: &SExpr) -> Result<Vec<&SExpr>, PddlError> {
    let items = expr.expect_list("a condition")?;
    match items.first().and_then(SExpr::atom) {
        None if items.is_empty() => Ok(Vec::new()),
        Some("and") => {
            let mut out = Vec::new();
            for item in &items[1..] {
                out.extend(conjuncts(item)?);
            }
            Ok(out)
        }
        _ => Ok(vec![expr]),
    }
}

fn reject_connective(expr: &SExpr) -> Result<(), PddlError> {
    let construct = match expr.head() {
        Some("or") => "disjunctive conditions",
        Some("imply") => "implications",
        Some("forall") => "universal quantification",
        Some("exists") => "existential quantification",
        Some("when") => "conditional effects",
        Some("increase" | "decrease" | "assign" | "scale-up" | "scale-down") => "numeric effects",
        Some(">" | "<" | ">=" | "<=") => "numeric conditions",
        _ => return Ok(()),
    };
    Err(unsupported(construct, expr.pos()))
}

fn equality(expr: &SExpr, equal: bool) -> Result<Equality, PddlError> {
    match expr.list() {
        Some([_, left, right]) => Ok(Equality {
            left: left.expect_atom("a term")?.to_string(),
            right: right.expect_atom("a term")?.to_string(),
            equal,
        }),
        _ => Err(syntax(expr.pos(), "`=` takes two terms")),
    }
}

/// Positive atoms and (in)equalities of a precondition or goal.
fn condition(expr: &SExpr) -> Result<(Vec<Atom>, Vec<Equality>), PddlError> {
    let mut atoms = Vec::new();
    let mut equalities = Vec::new();
    for part in conjuncts(expr)? {
        reject_connective(part)?;
        match part.head() {
            Some("=") => equalities.push(equality(part, true)?),
            Some("not") => {
                let inner = match part.list() {
                    Some([_, inner]) => inner,
                    _ => return Err(syntax(part.pos(), "`not` takes one argument")),
                };
                if inner.head() == Some("=") {
                    equalities.push(equality(inner, false)?);
                } else {
                    return Err(unsupported("negative preconditions", part.pos()));
                }
            }
            _ => atoms.push(atom_of(part)?),
        }
    }
    Ok((atoms, equalities))
}

struct Effects {
    add: Vec<Atom>,
    del: Vec<Atom>,
    cost: Option<Rational>,
}

fn effect(expr: &SExpr) -> Result<Effects, PddlError> {
    let mut out = Effects {
        add: Vec::new(),
        del: Vec::new(),
        cost: None,
    };
    for part in conjuncts(expr)? {
        match part.head() {
            Some("not") => match part.list() {
                Some([_, inner]) => {
                    reject_connective(inner)?;
                    out.del.push(atom_of(inner)?)
                }
                _ => return Err(syntax(part.pos(), "`not` takes one argument")),
            },
            Some("increase") => {
                let Some([_, target, amount]) = part.list() else {
                    return Err(syntax(part.pos(), "`increase` takes two arguments"));
                };
                if target.list().map(|t| t.len()) != Some(1) || target.head() != Some("total-cost") {
                    return Err(unsupported("numeric fluents other than total-cost", part.pos()));
                }
                let Some(text) = amount.atom() else {
                    return Err(unsupported("non-constant action costs", amount.pos()));
                };
                let cost = parse_rational(text)
                    .filter(|c| *c >= Rational::from_integer(0))
                    .ok_or_else(|| syntax(amount.pos(), format!("invalid action cost `{text}`")))?;
                out.cost = Some(out.cost.unwrap_or_default() + cost);
            }
            _ => {
                reject_connective(part)?;
                out.add.push(atom_of(part)?);
            }
        }
    }
    Ok(out)
}

fn action(items: &[SExpr], pos: Pos, default_cost: Rational) -> Result<Schema, PddlError> {
    let name = items
        .get(1)
        .ok_or_else(|| syntax(pos, "action without a name"))?
        .expect_atom("an action name")?
        .to_string();
    let mut schema = Schema {
        name,
        params: Vec::new(),
        pre: Vec::new(),
        equalities: Vec::new(),
        add: Vec::new(),
        del: Vec::new(),
        cost: default_cost,
        pos,
    };
    let mut rest = items[2..].iter();
    while let Some(key) = rest.next() {
        let key_name = key.expect_atom("an action keyword")?;
        let value = rest
            .next()
            .ok_or_else(|| syntax(key.pos(), format!("missing value for `{key_name}`")))?;
        match key_name {
            ":parameters" => schema.params = typed_list(value.expect_list("a parameter list")?, ROOT_TYPE)?,
            ":precondition" => {
                let (atoms, equalities) = condition(value)?;
                schema.pre = atoms;
                schema.equalities = equalities;
            }
            ":effect" => {
                let effects = effect(value)?;
                schema.add = effects.add;
                schema.del = effects.del;
                if let Some(cost) = effects.cost {
                    schema.cost = cost;
                }
            }
            other => return Err(syntax(key.pos(), format!("unknown action keyword `{other}`"))),
        }
    }
    Ok(schema)
}

pub fn parse_domain(text: &str) -> Result<Domain, PddlError> {
    let exprs = sexpr::parse(text)?;
    let (name, sections) = define("domain", &exprs)?;
    let mut domain = Domain {
        name,
        requirements: BTreeSet::new(),
        types: BTreeMap::new(),
        constants: Vec::new(),
        predicates: BTreeMap::new(),
        schemas: Vec::new(),
    };
    // Costs default to 1 unless the domain declares action costs, in which
    // case an action without an `increase` is free.
    let mut actions = Vec::new();
    for section in sections {
        let items = section.expect_list("a domain section")?;
        let head = section.head().unwrap_or("");
        match head {
            ":requirements" => {
                for item in &items[1..] {
                    domain
                        .requirements
                        .insert(item.expect_atom("a requirement")?.to_string());
                }
            }
            ":types" => {
                for (ty, parent) in typed_list(&items[1..], ROOT_TYPE)? {
                    domain.types.insert(ty, parent);
                }
            }
            ":constants" => domain.constants = typed_list(&items[1..], ROOT_TYPE)?,
            ":predicates" => {
                for item in &items[1..] {
                    let parts = item.expect_list("a predicate declaration")?;
                    let Some((head, params)) = parts.split_first() else {
                        return Err(syntax(item.pos(), "empty predicate declaration"));
                    };
                    let types = typed_list(params, ROOT_TYPE)?.into_iter().map(|(_, t)| t).collect();
                    domain
                        .predicates
                        .insert(head.expect_atom("a predicate name")?.to_string(), types);
                }
            }
            ":functions" => {}
            ":action" => actions.push(section),
            ":durative-action" => return Err(unsupported("durative actions", section.pos())),
            ":derived" => return Err(unsupported("derived predicates", section.pos())),
            other => return Err(syntax(section.pos(), format!("unknown domain section `{other}`"))),
        }
    }
    let default_cost = if domain.requirements.contains(":action-costs") {
        Rational::from_integer(0)
    } else {
        Rational::from_integer(1)
    };
    for section in actions {
        let items = section.list().expect("checked above");
        let schema = action(items, section.pos(), default_cost)?;
        if domain.schemas.iter().any(|s| s.name == schema.name) {
            return Err(syntax(section.pos(), format!("action `{}` defined twice", schema.name)));
        }
        domain.schemas.push(schema);
    }
    Ok(domain)
}

pub fn parse_problem(text: &str) -> Result<Problem, PddlError> {
    let exprs = sexpr::parse(text)?;
    let (name, sections) = define("problem", &exprs)?;
    let mut problem = Problem {
        name,
        domain: String::new(),
        objects: Vec::new(),
        init: Vec::new(),
        goal: Vec::new(),
    };
    for section in sections {
        let items = section.expect_list("a problem section")?;
        match section.head().unwrap_or("") {
            ":domain" => {
                problem.domain = items
                    .get(1)
                    .ok_or_else(|| syntax(section.pos(), "missing domain name"))?
                    .expect_atom("a domain name")?
                    .to_string()
            }
            ":objects" => problem.objects = typed_list(&items[1..], ROOT_TYPE)?,
            ":init" => {
                for item in &items[1..] {
                    if item.head() == Some("=") {
                        match item.list() {
                            Some([_, f, _]) if f.head() == Some("total-cost") => continue,
                            _ => return Err(unsupported("numeric fluents other than total-cost", item.pos())),
                        }
                    }
                    if item.head() == Some("not") {
                        return Err(unsupported("negative initial facts", item.pos()));
                    }
                    problem.init.push(atom_of(item)?);
                }
            }
            ":goal" => {
                let goal = items
                    .get(1)
                    .ok_or_else(|| syntax(section.pos(), "missing goal condition"))?;
                let (atoms, equalities) = condition(goal)?;
                if !equalities.is_empty() {
                    return Err(unsupported("equality in goals", goal.pos()));
                }
                problem.goal = atoms;
            }
            ":metric" => {}
            other => return Err(syntax(section.pos(), format!("unknown problem section `{other}`"))),
        }
    }
    Ok(problem)
}
