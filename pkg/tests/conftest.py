import os
from functools import lru_cache

import pytest
from hypothesis import settings

from desing.parse_io import parse_problem
from desing.tree import TreeConfig, build_tree

settings.register_profile("fixed", derandomize=True, deadline=None, print_blob=True)
settings.load_profile("fixed")

PROBLEMS = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "problems")

# criterion number -> (description, passed); filled by test_acceptance
ACCEPTANCE = {}


def problem_path(name):
    return os.path.join(PROBLEMS, f"{name}.txt")


@lru_cache(maxsize=None)
def load_problem(name):
    with open(problem_path(name), encoding="utf-8") as fh:
        return parse_problem(fh.read())


@lru_cache(maxsize=None)
def fixture_tree(name, max_depth=None):
    spec = load_problem(name)
    depth = max_depth if max_depth is not None else (spec.max_depth if spec.max_depth is not None else 16)
    cfg = TreeConfig(max_depth=depth, at_origin=spec.at == "origin")
    return build_tree(spec.b, spec.vars, cfg)


@pytest.fixture(scope="session")
def curve_tree():
    return fixture_tree("curve")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        desc, ok = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {desc}")
