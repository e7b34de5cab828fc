//! Grounding of lifted schemas into a STRIPS [`Model`].

use std::collections::{BTreeMap, BTreeSet};

use super::lifted::{is_var, Atom, Domain, Problem, Schema, ROOT_TYPE};
use super::PddlError;
use crate::strips::{Action, Fluent, FluentSet, Model};

type GroundAtom = (String, Vec<String>);

fn undeclared(kind: &'static str, name: &str) -> PddlError {
    PddlError::Undeclared {
        kind,
        name: name.to_string(),
    }
}

/// Objects of one domain/problem pair, indexed by every type they belong to.
struct Universe {
    by_type: BTreeMap<String, Vec<String>>,
    objects: BTreeSet<String>,
}

impl Universe {
    fn new(domain: &Domain, problem: &Problem) -> Result<Self, PddlError> {
        let declared = |ty: &str| ty == ROOT_TYPE || domain.types.contains_key(ty);
        for parent in domain.types.values() {
            if !declared(parent) {
                return Err(undeclared("type", parent));
            }
        }
        let ancestors = |ty: &str| -> Result<Vec<String>, PddlError> {
            let mut chain = vec![ty.to_string()];
            let mut current = ty;
            while current != ROOT_TYPE {
                current = domain.types.get(current).ok_or_else(|| undeclared("type", current))?;
                if chain.iter().any(|t| t == current) {
                    return Err(PddlError::Syntax {
                        line: 0,
                        col: 0,
                        message: format!("cyclic type hierarchy at `{current}`"),
                    });
                }
                chain.push(current.to_string());
            }
            Ok(chain)
        };
        let mut by_type: BTreeMap<String, Vec<String>> = BTreeMap::new();
        let mut objects = BTreeSet::new();
        for (object, ty) in domain.constants.iter().chain(&problem.objects) {
            if !declared(ty) {
                return Err(undeclared("type", ty));
            }
            if !objects.insert(object.clone()) {
                continue;
            }
            for t in ancestors(ty)? {
                by_type.entry(t).or_default().push(object.clone());
            }
        }
        for members in by_type.values_mut() {
            members.sort();
        }
        Ok(Universe { by_type, objects })
    }

    fn of_type(&self, ty: &str) -> &[String] {
        self.by_type.get(ty).map(Vec::as_slice).unwrap_or(&[])
    }
}

fn check_atom(domain: &Domain, atom: &Atom, known: impl Fn(&str) -> bool) -> Result<(), PddlError> {
    let params = domain
        .predicates
        .get(&atom.predicate)
        .ok_or_else(|| undeclared("predicate", &atom.predicate))?;
    if params.len() != atom.args.len() {
        return Err(PddlError::Syntax {
            line: atom.pos.line,
            col: atom.pos.col,
            message: format!(
                "`{}` takes {} arguments, found {}",
                atom.predicate,
                params.len(),
                atom.args.len()
            ),
        });
    }
    for arg in &atom.args {
        if !known(arg) {
            let kind = if is_var(arg) { "parameter" } else { "object" };
            return Err(undeclared(kind, arg));
        }
    }
    Ok(())
}

fn validate(domain: &Domain, problem: &Problem, universe: &Universe) -> Result<(), PddlError> {
    if !problem.domain.is_empty() && problem.domain != domain.name {
        return Err(undeclared("domain", &problem.domain));
    }
    let constants: BTreeSet<&str> = domain.constants.iter().map(|(c, _)| c.as_str()).collect();
    for schema in &domain.schemas {
        for (_, ty) in &schema.params {
            if ty != ROOT_TYPE && !domain.types.contains_key(ty) {
                return Err(undeclared("type", ty));
            }
        }
        let known = |term: &str| {
            if is_var(term) {
                schema.params.iter().any(|(p, _)| p == term)
            } else {
                constants.contains(term)
            }
        };
        for atom in schema.pre.iter().chain(&schema.add).chain(&schema.del) {
            check_atom(domain, atom, known)?;
        }
        for eq in &schema.equalities {
            for term in [&eq.left, &eq.right] {
                if !known(term) {
                    return Err(undeclared(if is_var(term) { "parameter" } else { "object" }, term));
                }
            }
        }
    }
    for atom in problem.init.iter().chain(&problem.goal) {
        check_atom(domain, atom, |t| universe.objects.contains(t))?;
    }
    Ok(())
}

fn resolve(term: &str, schema: &Schema, binding: &[String]) -> Option<String> {
    if is_var(term) {
        let i = schema.params.iter().position(|(p, _)| p == term)?;
        binding.get(i).cloned()
    } else {
        Some(term.to_string())
    }
}

fn ground_atom(atom: &Atom, schema: &Schema, binding: &[String]) -> Option<GroundAtom> {
    let args = atom
        .args
        .iter()
        .map(|t| resolve(t, schema, binding))
        .collect::<Option<Vec<_>>>()?;
    Some((atom.predicate.clone(), args))
}

/// `None` while some term is still unbound.
fn equalities_hold(schema: &Schema, binding: &[String]) -> Option<bool> {
    let mut all = true;
    for eq in &schema.equalities {
        let (Some(l), Some(r)) = (resolve(&eq.left, schema, binding), resolve(&eq.right, schema, binding)) else {
            continue;
        };
        all &= (l == r) == eq.equal;
    }
    Some(all)
}

/// Parameter tuples, in lexicographic order, that pass the equality
/// constraints and whose static preconditions hold in `static_facts`.
fn bindings(
    schema: &Schema,
    universe: &Universe,
    statics: &BTreeSet<String>,
    static_facts: &BTreeSet<GroundAtom>,
) -> Vec<Vec<String>> {
    fn go(
        schema: &Schema,
        universe: &Universe,
        statics: &BTreeSet<String>,
        static_facts: &BTreeSet<GroundAtom>,
        prefix: &mut Vec<String>,
        out: &mut Vec<Vec<String>>,
    ) {
        let consistent = equalities_hold(schema, prefix) != Some(false)
            && schema
                .pre
                .iter()
                .filter(|a| statics.contains(&a.predicate))
                .filter_map(|a| ground_atom(a, schema, prefix))
                .all(|fact| static_facts.contains(&fact));
        if !consistent {
            return;
        }
        if prefix.len() == schema.params.len() {
            out.push(prefix.clone());
            return;
        }
        let ty = &schema.params[prefix.len()].1;
        for object in universe.of_type(ty) {
            prefix.push(object.clone());
            go(schema, universe, statics, static_facts, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(schema, universe, statics, static_facts, &mut Vec::new(), &mut out);
    out
}

fn fluent((predicate, args): GroundAtom) -> Fluent {
    Fluent::new(predicate, args)
}

fn instantiate(schema: &Schema, binding: &[String]) -> Result<Action, PddlError> {
    let set = |atoms: &[Atom]| -> FluentSet {
        atoms
            .iter()
            .map(|a| fluent(ground_atom(a, schema, binding).expect("validated terms")))
            .collect()
    };
    let name = std::iter::once(schema.name.as_str())
        .chain(binding.iter().map(String::as_str))
        .collect::<Vec<_>>()
        .join(" ");
    let add = set(&schema.add);
    // A fluent both added and deleted ends up true.
    let del = set(&schema.del).difference(&add).cloned().collect();
    Ok(Action::new(name, schema.cost, set(&schema.pre), add, del)?)
}

fn facts(atoms: &[Atom]) -> FluentSet {
    atoms
        .iter()
        .map(|a| Fluent::new(a.predicate.clone(), a.args.clone()))
        .collect()
}

/// Grounds several domain/problem pairs over a shared action vocabulary:
/// a parameter tuple is kept when it is possible on any side, so all
/// sides get the same action names. Static predicates are those no side
/// ever changes.
pub(crate) fn ground_all(sides: &[(&Domain, &Problem)]) -> Result<Vec<Model>, PddlError> {
    let universes = sides
        .iter()
        .map(|(d, p)| {
            let universe = Universe::new(d, p)?;
            validate(d, p, &universe)?;
            Ok(universe)
        })
        .collect::<Result<Vec<_>, PddlError>>()?;

    let mut dynamic = BTreeSet::new();
    for (domain, _) in sides {
        for schema in &domain.schemas {
            dynamic.extend(schema.add.iter().chain(&schema.del).map(|a| a.predicate.clone()));
        }
    }
    let statics: BTreeSet<String> = sides
        .iter()
        .flat_map(|(d, _)| d.predicates.keys())
        .filter(|p| !dynamic.contains(*p))
        .cloned()
        .collect();
    let static_facts: BTreeSet<GroundAtom> = sides
        .iter()
        .flat_map(|(_, p)| &p.init)
        .filter(|a| statics.contains(&a.predicate))
        .map(|a| (a.predicate.clone(), a.args.clone()))
        .collect();

    let schema_names = |d: &Domain| d.schemas.iter().map(|s| s.name.clone()).collect::<BTreeSet<_>>();
    let first = schema_names(sides[0].0);
    for (domain, _) in &sides[1..] {
        if let Some(name) = first.symmetric_difference(&schema_names(domain)).next() {
            return Err(PddlError::VocabularyMismatch(format!("action schema `{name}`")));
        }
    }

    // Schema name to the union of its feasible bindings.
    let mut tuples: BTreeMap<String, BTreeSet<Vec<String>>> = BTreeMap::new();
    for ((domain, _), universe) in sides.iter().zip(&universes) {
        for schema in &domain.schemas {
            tuples
                .entry(schema.name.clone())
                .or_default()
                .extend(bindings(schema, universe, &statics, &static_facts));
        }
    }

    let mut models = Vec::new();
    for (domain, problem) in sides {
        let mut actions = Vec::new();
        for schema in &domain.schemas {
            for binding in &tuples[&schema.name] {
                if binding.len() != schema.params.len() {
                    return Err(PddlError::VocabularyMismatch(format!(
                        "parameters of `{}`",
                        schema.name
                    )));
                }
                if equalities_hold(schema, binding) != Some(true) {
                    return Err(PddlError::VocabularyMismatch(format!(
                        "equality constraints of `{}` for ({})",
                        schema.name,
                        binding.join(" ")
                    )));
                }
                actions.push(instantiate(schema, binding)?);
            }
        }
        models.push(Model::closed(actions, facts(&problem.init), facts(&problem.goal))?);
    }
    Ok(models)
}
