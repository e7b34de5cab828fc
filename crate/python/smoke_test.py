"""Smoke test for the mega_py extension.

Build and make the module importable first, e.g.

    maturin develop -m crates/py/Cargo.toml --features extension-module

or copy target/{debug,release}/libmega_py.so to mega_py.so on PYTHONPATH.
"""

import sys
import tempfile
from fractions import Fraction
from pathlib import Path

import mega_py


def main() -> int:
    bundle = mega_py.generate("usar-demo")
    problem = bundle.load()

    robot_plan, robot_cost = problem.robot.optimal_plan()
    human_plan, human_cost = problem.human.optimal_plan()
    print("robot:", robot_plan, robot_cost)
    print("human:", human_plan, human_cost)
    assert robot_cost == 4 and human_cost == 3

    delta = problem.delta()
    print("difference:", delta)
    assert len(delta) == 3

    for alpha in [0, Fraction(1, 2), 1, 3]:
        sol = problem.search(alpha)
        print(sol)
        for line in sol.explanation:
            print("  Explanation >>", line)
        assert sol.objective == problem.brute_force(alpha).objective

    rows = problem.sweep([0, Fraction(1, 2), 1, 2])
    assert [r["explanation_size"] for r in rows] == [1, 1, 3, 3]

    with tempfile.TemporaryDirectory() as tmp:
        bundle.write(Path(tmp) / "demo")
        again = mega_py.Problem.load(Path(tmp) / "demo")
        assert again.delta() == delta

    print("smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
