from pathlib import Path

import numpy as np
import pytest

from rangemaps.funcspace import VectorFunction
from rangemaps.lcs import Seminorm, VectorSpaceModel
from rangemaps.space import FiniteSpace

CHILDREN = Path(__file__).parent / "children"


@pytest.fixture
def E1():
    return VectorSpaceModel.standard(1)


@pytest.fixture
def E2():
    return VectorSpaceModel.standard(2)


@pytest.fixture
def XY():
    return FiniteSpace(("a", "b")), FiniteSpace(("p", "q"))


def vf(space, model, table):
    return VectorFunction.from_mapping(space, model, table)


def coordinate_model(d):
    """Seminorms |u_k|, one per coordinate."""
    return VectorSpaceModel(d, tuple(Seminorm(np.eye(d)[k]) for k in range(d)))


ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, title: str, passed: bool, detail: str) -> None:
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
