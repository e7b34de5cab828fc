use std::ffi::CString;
use std::sync::Once;

use mega_py::mega_py as extension;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn python() {
    static INIT: Once = Once::new();
    INIT.call_once(|| {
        pyo3::append_to_inittab!(extension);
        Python::initialize();
    });
}

/// Runs `code` with `mega_py` imported and `tmp` bound to a scratch directory.
fn run(code: &str) {
    python();
    let tmp = tempfile::TempDir::new().unwrap();
    Python::attach(|py| {
        let globals = PyDict::new(py);
        globals.set_item("tmp", tmp.path().to_str().unwrap()).unwrap();
        let source = CString::new(format!("import mega_py\nfrom fractions import Fraction\n{code}")).unwrap();
        if let Err(e) = py.run(&source, Some(&globals), None) {
            panic!("python failed: {e}\n{code}");
        }
    });
}

#[test]
fn demo_search_through_python() {
    run(r#"
problem = mega_py.generate("usar-demo").load()
assert len(problem.delta()) == 3
cheap = problem.search(0)
assert cheap.explanation_size == 1, cheap
assert cheap.explicability_penalty == 3
strict = problem.search(Fraction(10))
assert strict.explanation_size == 3
assert strict.plan == ["move p1 p6", "move p6 p7", "move p7 p5", "take_picture p5"]
assert strict.objective == 3
assert problem.robot.plan_cost(strict.plan) == 4
assert strict.reconciled_model.optimal_plan()[1] == 4
"#);
}

#[test]
fn weights_accept_several_spellings() {
    run(r#"
problem = mega_py.generate("usar-demo").load()
rows = problem.sweep([0, "1/2", 0.5, Fraction(3, 2), 2])
assert [r["explanation_size"] for r in rows] == [1, 1, 1, 3, 3]
assert rows[1]["alpha"] == Fraction(1, 2) and rows[2]["alpha"] == Fraction(1, 2)
try:
    problem.search("fast")
    raise AssertionError("expected ValueError")
except ValueError:
    pass
"#);
}

#[test]
fn oracle_and_mce_agree_with_search() {
    run(r#"
problem = mega_py.generate("random", delta_size=4, seed=5).load()
for alpha in [0, 1, 4]:
    assert problem.search(alpha).objective == problem.brute_force(alpha).objective
mce = problem.mce()
assert len(mce) <= len(problem.delta())
"#);
}

#[test]
fn bundles_round_trip_through_disk() {
    run(r#"
import os
bundle = mega_py.generate("barman-bar", ingredients=2)
bundle.write(os.path.join(tmp, "b"))
again = mega_py.Bundle.read(os.path.join(tmp, "b"))
assert again.robot_domain == bundle.robot_domain
assert again.human_overlay == bundle.human_overlay
loaded = mega_py.Problem.load(os.path.join(tmp, "b"))
assert loaded.delta() == bundle.load().delta()
overlaid = mega_py.Problem.from_overlay(bundle.robot_domain, bundle.robot_problem, bundle.human_overlay)
assert overlaid.delta() == loaded.delta()
"#);
}

#[test]
fn errors_map_to_python_exceptions() {
    run(r#"
try:
    mega_py.Model.from_pddl("(define (domain d)", "")
    raise AssertionError("expected ValueError")
except ValueError as e:
    assert "syntax" in str(e)
try:
    mega_py.generate("usar-demo", delta_size=7)
    raise AssertionError("expected PlanningError")
except mega_py.PlanningError:
    pass
try:
    mega_py.generate("random", colour=3)
    raise AssertionError("expected ValueError")
except ValueError:
    pass
m = mega_py.Model.from_pddl(
    "(define (domain d) (:predicates (p) (q)) (:action a :parameters () :precondition (p) :effect (q)))",
    "(define (problem x) (:domain d) (:init) (:goal (q)))",
)
assert m.optimal_plan() is None
assert m.plan_cost(["a"]) is None
# `p` is static and false, so grounding drops `a` entirely.
assert m.actions == []
"#);
}
