"""Variables and clause families for depth-k decision tree inference.

Semantic variables:

* ``X(i, j)``  example ``i`` goes right at depth ``j``; the bits
  ``X(i,0) .. X(i,k-1)`` spell the index of the leaf it lands in.
* ``F(q, f)``  internal node ``q`` tests feature ``f``.
* ``C(v, a)``  leaf ``v`` is labelled with class ``a``.
* ``U(v)``     leaf ``v`` carries some class.
* ``H(i, j)``  at least ``j`` of the first ``i`` leaves carry a class.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from itertools import combinations
from typing import IO, Iterator, Sequence

Clause = list[int]


class VarMap:
    """Dense bijection between semantic variables and DIMACS ids (from 1)."""

    def __init__(self):
        self._ids: dict[tuple, int] = {}
        self._keys: list[tuple] = [()]

    def __len__(self) -> int:
        return len(self._keys) - 1

    def __contains__(self, key: tuple) -> bool:
        return key in self._ids

    @property
    def next_id(self) -> int:
        return len(self._keys)

    def alloc(self, key: tuple) -> int:
        if key in self._ids:
            raise KeyError(f"{key} already allocated")
        self._ids[key] = len(self._keys)
        self._keys.append(key)
        return self._ids[key]

    def key(self, var: int) -> tuple:
        return self._keys[abs(var)]

    def name(self, var: int) -> str:
        kind, *idx = self.key(var)
        return f"{kind}({','.join(map(str, idx))})"

    def items(self) -> Iterator[tuple[int, tuple]]:
        for var in range(1, len(self._keys)):
            yield var, self._keys[var]

    def x(self, i: int, j: int) -> int:
        return self._ids["X", i, j]

    def f(self, q: int, feat: int) -> int:
        return self._ids["F", q, feat]

    def c(self, v: int, a: int) -> int:
        return self._ids["C", v, a]

    def u(self, v: int) -> int:
        return self._ids["U", v]

    def h(self, i: int, j: int) -> int:
        return self._ids["H", i, j]

    def add_tree(self, k: int, m: int, c: int) -> None:
        for q in range(1, 2 ** k):
            for feat in range(m):
                self.alloc(("F", q, feat))
        for v in range(2 ** k):
            for a in range(c):
                self.alloc(("C", v, a))

    def add_example(self, i: int, k: int) -> None:
        for j in range(k):
            self.alloc(("X", i, j))

    def add_counter(self, k: int) -> None:
        leaves = 2 ** k
        for v in range(leaves):
            self.alloc(("U", v))
        for i in range(leaves + 1):
            for j in range(leaves + 2):
                self.alloc(("H", i, j))

    def has_counter(self) -> bool:
        return ("U", 0) in self._ids


@dataclass
class CnfBuffer:
    clauses: list[Clause] = field(default_factory=list)
    literals: int = 0

    def __len__(self) -> int:
        return len(self.clauses)

    def add(self, clause: Sequence[int]) -> None:
        clause = list(clause)
        if not clause:
            raise ValueError("refusing to store an empty clause")
        lits = set(clause)
        if any(-lit in lits for lit in lits):
            raise ValueError(f"tautological clause {clause}")
        self.clauses.append(clause)
        self.literals += len(clause)

    def extend(self, clauses) -> None:
        for clause in clauses:
            self.add(clause)

    @property
    def max_var(self) -> int:
        return max((abs(lit) for cl in self.clauses for lit in cl), default=0)


def node_feature_clauses(vm: VarMap, k: int, m: int) -> list[Clause]:
    """Every internal node tests exactly one feature (pairwise at-most-one)."""
    out = []
    for q in range(1, 2 ** k):
        out.append([vm.f(q, feat) for feat in range(m)])
        for f1, f2 in combinations(range(m), 2):
            out.append([-vm.f(q, f1), -vm.f(q, f2)])
    return out


def feature_clauses(vm: VarMap, example: Sequence, i: int, k: int) -> list[Clause]:
    """Routing constraints for example ``i``.

    Going left at node ``q`` forbids ``q`` from testing a feature that is
    true in the example; going right forbids one that is false.
    """
    out: list[Clause] = []
    m = len(example)

    def visit(path: list[int], q: int, lvl: int) -> None:
        if lvl == k:
            return
        x = vm.x(i, lvl)
        for feat in range(m):
            if example[feat]:
                out.append(path + [x, -vm.f(q, feat)])
        visit(path + [x], 2 * q, lvl + 1)
        for feat in range(m):
            if not example[feat]:
                out.append(path + [-x, -vm.f(q, feat)])
        visit(path + [-x], 2 * q + 1, lvl + 1)

    visit([], 1, 0)
    return out


def class_clauses(vm: VarMap, i: int, a: int, k: int, c: int) -> list[Clause]:
    """Whichever leaf example ``i`` reaches must carry class ``a`` and no other."""
    out: list[Clause] = []

    def visit(path: list[int], q: int, lvl: int) -> None:
        if lvl == k:
            out.append(path + [vm.c(q, a)])
            for other in range(c):
                if other != a:
                    out.append(path + [-vm.c(q, other)])
            return
        x = vm.x(i, lvl)
        visit(path + [x], 2 * q, lvl + 1)
        visit(path + [-x], 2 * q + 1, lvl + 1)

    visit([], 0, 0)
    return out


def cardinality_clauses(vm: VarMap, k: int, c: int) -> list[Clause]:
    """Unary counter over labelled leaves, wide enough for any bound.

    The bound itself is imposed per solve with :func:`leaf_bound_literal`.
    """
    leaves = 2 ** k
    out = []
    for v in range(leaves):
        for a in range(c):
            out.append([-vm.c(v, a), vm.u(v)])
    for i in range(leaves):
        for j in range(leaves + 1):
            out.append([-vm.h(i, j), vm.h(i + 1, j)])
            out.append([-vm.u(i), -vm.h(i, j), vm.h(i + 1, j + 1)])
    out.append([vm.h(0, 0)])
    return out


def leaf_bound_literal(vm: VarMap, k: int, max_leaves: int) -> int:
    """Literal forbidding more than ``max_leaves`` labelled leaves."""
    if not 0 <= max_leaves <= 2 ** k:
        raise ValueError(f"leaf bound {max_leaves} outside [0, {2 ** k}]")
    return -vm.h(2 ** k, max_leaves + 1)


def max_leaves_for_nodes(max_nodes: int) -> int:
    """Largest leaf count of a full binary tree with at most ``max_nodes`` nodes."""
    return (max_nodes + 1) // 2


def write_dimacs(buffer: CnfBuffer, vm: VarMap | None, out: IO[str]) -> None:
    n_vars = max(len(vm) if vm is not None else 0, buffer.max_var)
    if vm is not None:
        for var, _ in vm.items():
            out.write(f"c var {var} = {vm.name(var)}\n")
    out.write(f"p cnf {n_vars} {len(buffer.clauses)}\n")
    for clause in buffer.clauses:
        out.write(" ".join(map(str, clause)) + " 0\n")


def to_dimacs(buffer: CnfBuffer, vm: VarMap | None = None) -> str:
    out = io.StringIO()
    write_dimacs(buffer, vm, out)
    return out.getvalue()
