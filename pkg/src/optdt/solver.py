"""Incremental SAT session backed by pysat (MiniSat 2.2 by default)."""

from __future__ import annotations

import enum
import threading
from typing import Iterable, Sequence

from pysat.solvers import Solver

from .errors import StateError


class Status(enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"
    UNKNOWN = "unknown"


class SatSession:
    """Clauses accumulate across :meth:`solve` calls; assumptions do not."""

    def __init__(self, name: str = "minisat22"):
        self.name = name
        self._solver = Solver(name=name)
        self._model: list[int] | None = None
        self._broken = False
        self.status: Status | None = None
        self.clause_count = 0
        self.solve_calls = 0

    def close(self) -> None:
        if self._solver is not None:
            self._solver.delete()
            self._solver = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def __del__(self):
        try:
            self.close()
        except Exception:
            pass

    def add_clause(self, lits: Sequence[int]) -> None:
        lits = [int(lit) for lit in lits]
        self.clause_count += 1
        if not lits:
            self._broken = True
            return
        self._solver.add_clause(lits)

    def add_clauses(self, clauses: Iterable[Sequence[int]]) -> None:
        for clause in clauses:
            self.add_clause(clause)

    def solve(self, assumptions: Sequence[int] = (), budget: float | None = None) -> Status:
        """Solve under ``assumptions``; ``budget`` is a wall-clock limit in seconds."""
        self.solve_calls += 1
        self._model = None
        if self._broken:
            self.status = Status.UNSAT
            return self.status
        if budget is not None and budget <= 0:
            self.status = Status.UNKNOWN
            return self.status

        assumptions = [int(lit) for lit in assumptions]
        if budget is None:
            result = self._solver.solve(assumptions=assumptions)
        else:
            timer = threading.Timer(budget, self._solver.interrupt)
            timer.start()
            try:
                result = self._solver.solve_limited(assumptions=assumptions, expect_interrupt=True)
            finally:
                timer.cancel()
                self._solver.clear_interrupt()

        if result is None:
            self.status = Status.UNKNOWN
        elif result:
            self.status = Status.SAT
            self._model = self._solver.get_model()
        else:
            self.status = Status.UNSAT
        return self.status

    @property
    def model(self) -> list[int]:
        if self.status is not Status.SAT or self._model is None:
            raise StateError(f"no model available (last result: {self.status})")
        return self._model

    def value(self, var: int) -> bool:
        """Model value of ``var``; variables the solver never saw read as false."""
        model = self.model
        if var <= 0:
            raise ValueError(f"variable ids are positive, got {var}")
        if var <= len(model):
            return model[var - 1] > 0
        return False
