"""Brute-force references that share no code with the SAT path."""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

TOY_X = [
    (0, 0, 1, 0), (1, 0, 1, 1), (1, 1, 1, 0), (0, 1, 0, 1),
    (1, 0, 0, 0), (0, 0, 0, 1), (0, 1, 1, 0), (1, 1, 0, 1),
]
TOY_Y = [0, 0, 0, 1, 1, 0, 1, 1]


def route(nodes, k, x):
    """Leaf index reached by ``x`` in a perfect tree given as a flat node list."""
    q = 1
    for _ in range(k):
        q = 2 * q + (1 if x[nodes[q - 1]] else 0)
    return q - 2 ** k


def perfect_tree_exists(X, y, k, m):
    """Enumerate every feature labelling of a perfect depth-k tree."""
    for nodes in itertools.product(range(m), repeat=2 ** k - 1):
        leaf_labels = {}
        ok = True
        for x, a in zip(X, y):
            v = route(nodes, k, x) if k else 0
            if leaf_labels.setdefault(v, a) != a:
                ok = False
                break
        if ok:
            return True
    return False


def consistent_depth1_trees(X, y, m, c):
    """All (feature, left class, right class) stumps consistent with the data."""
    found = []
    for f in range(m):
        for left, right in itertools.product(range(c), repeat=2):
            if all((right if x[f] else left) == a for x, a in zip(X, y)):
                found.append((f, left, right))
    return found


def consistent_three_leaf_trees(X, y, m, c):
    """Depth-2 trees with one leaf child at the root and one split child."""
    found = []
    for f, g in itertools.product(range(m), repeat=2):
        for split_side in (0, 1):
            for leaf_cls, a0, a1 in itertools.product(range(c), repeat=3):
                def cls(x):
                    if (1 if x[f] else 0) != split_side:
                        return leaf_cls
                    return a1 if x[g] else a0
                if all(cls(x) == a for x, a in zip(X, y)):
                    found.append((f, g, split_side, leaf_cls, a0, a1))
    return found


def _make(X, y, m):
    rows = tuple((tuple(bool(b) for b in x), int(a)) for x, a in zip(X, y))

    @lru_cache(maxsize=None)
    def min_depth(idx: frozenset) -> float:
        if len({rows[i][1] for i in idx}) <= 1:
            return 0
        best = math.inf
        for f in range(m):
            left = frozenset(i for i in idx if not rows[i][0][f])
            right = idx - left
            if not left or not right:
                continue
            best = min(best, 1 + max(min_depth(left), min_depth(right)))
        return best

    @lru_cache(maxsize=None)
    def min_size(idx: frozenset, d: int) -> float:
        if len({rows[i][1] for i in idx}) <= 1:
            return 1
        if d == 0:
            return math.inf
        best = math.inf
        for f in range(m):
            left = frozenset(i for i in idx if not rows[i][0][f])
            right = idx - left
            best = min(best, 1 + min_size(left, d - 1) + min_size(right, d - 1))
        return best

    return rows, min_depth, min_size


def min_depth(X, y, m):
    """Smallest depth of any tree (hence of any perfect tree) consistent with the data."""
    rows, md, _ = _make(X, y, m)
    return md(frozenset(range(len(rows))))


def min_size(X, y, m, k):
    """Fewest nodes of a consistent tree of depth at most ``k``."""
    rows, _, ms = _make(X, y, m)
    return ms(frozenset(range(len(rows))), k)


def clause_satisfied(clause, model_set):
    return any(lit in model_set for lit in clause)


def model_satisfies(clauses, model):
    """Check a DIMACS-style model (list of signed ints) against every clause."""
    truth = set(model)
    return all(clause_satisfied(cl, truth) for cl in clauses)


def parse_dimacs(text):
    """Minimal DIMACS reader: returns (n_vars, n_clauses, clauses)."""
    header = None
    clauses = []
    current = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            _, fmt, nv, nc = line.split()
            assert fmt == "cnf"
            header = (int(nv), int(nc))
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                current.append(lit)
    assert header is not None
    return header[0], header[1], clauses
