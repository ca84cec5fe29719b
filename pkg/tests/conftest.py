import math

import numpy as np
import pytest

from leakyscm.assembly import enumerate_cases
from leakyscm.materials import adhesive_joint
from leakyscm.oracle import refine_root

F_LOW = 1.03
F_HIGH = 3.53

# modes of the adhesive joint found by the collocation solver and refined
# on the partial-wave determinant
SHEAR_LEAKY_SEED = 1.0824094956 + 0.1583574186j
EVANESCENT_SEED = 2.21186


@pytest.fixture(scope="session")
def joint():
    return adhesive_joint()


@pytest.fixture(scope="session")
def cases(joint):
    return {c.label: c for c in enumerate_cases(joint)}


@pytest.fixture(scope="session")
def omega_low():
    return 2 * math.pi * F_LOW


@pytest.fixture(scope="session")
def shear_leaky_root(joint, cases, omega_low):
    return refine_root(joint, omega_low, SHEAR_LEAKY_SEED, cases["shear_leaky"])


@pytest.fixture(scope="session")
def evanescent_root(joint, cases, omega_low):
    return refine_root(joint, omega_low, EVANESCENT_SEED, cases["evanescent"])


def relative_residual(pep, k, v):
    lk = pep.evaluate(k)
    return np.linalg.norm(lk @ v) / (np.linalg.norm(lk, 2) * np.linalg.norm(v))


@pytest.fixture(scope="session")
def modes_low(joint, cases, omega_low):
    from leakyscm.modes import PipelineOptions, solve_case

    opts = PipelineOptions()
    return {label: solve_case(joint, omega_low, case, opts) for label, case in cases.items()}


ACCEPTANCE_LINES: list[str] = []


def record(criterion: str, passed: bool, detail: str) -> None:
    line = f"{criterion} {'PASS' if passed else 'FAIL'}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
