import contextlib
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from optdt.dataset import BinaryDataset  # noqa: E402
from optdt.solver import SatSession, Status  # noqa: E402

from oracles import TOY_X, TOY_Y, model_satisfies  # noqa: E402

# Every SAT answer in the suite is re-checked against the clauses the
# session received, without trusting the solver.
MODEL_CHECKS = {"verified": 0, "failed": 0}
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(autouse=True)
def verify_every_model(monkeypatch):
    original_add = SatSession.add_clause
    original_solve = SatSession.solve

    def add_clause(self, lits):
        self.__dict__.setdefault("_recorded", []).append([int(v) for v in lits])
        return original_add(self, lits)

    def solve(self, assumptions=(), budget=None):
        status = original_solve(self, assumptions, budget)
        if status is Status.SAT:
            model = self.model
            recorded = self.__dict__.get("_recorded", [])
            ok = model_satisfies(recorded, model) and model_satisfies([[a] for a in assumptions], model)
            MODEL_CHECKS["verified" if ok else "failed"] += 1
            assert ok, "solver returned a model violating its clauses"
        return status

    monkeypatch.setattr(SatSession, "add_clause", add_clause)
    monkeypatch.setattr(SatSession, "solve", solve)
    yield


@pytest.fixture
def toy():
    return BinaryDataset.from_lists(TOY_X, TOY_Y)


@pytest.fixture
def toy_csv(tmp_path):
    lines = ["f0,f1,f2,f3,class"]
    lines += [",".join(map(str, x)) + f",{a}" for x, a in zip(TOY_X, TOY_Y)]
    path = tmp_path / "toy.csv"
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def criterion():
    @contextlib.contextmanager
    def record(number, title):
        try:
            yield
        except pytest.skip.Exception as exc:
            ACCEPTANCE_LINES.append(f"SKIP criterion {number}: {title} ({exc})")
            raise
        except BaseException:
            ACCEPTANCE_LINES.append(f"FAIL criterion {number}: {title}")
            raise
        ACCEPTANCE_LINES.append(f"PASS criterion {number}: {title}")

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
    terminalreporter.write_line(
        f"SAT models re-verified: {MODEL_CHECKS['verified']}, failures: {MODEL_CHECKS['failed']}"
    )
