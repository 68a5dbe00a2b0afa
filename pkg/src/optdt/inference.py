"""Counterexample-driven inference of consistent decision trees.

The formula for a fixed depth starts with only the node/feature
constraints.  Each round solves it, decodes a candidate tree and checks
it against the whole dataset; one misclassified example is then encoded
and the loop repeats.  Most datasets are settled after encoding a small
fraction of their examples.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from . import cnf
from .dataset import BinaryDataset
from .errors import ContradictoryDataset, DepthCapExceeded, EncodingBug, InferenceTimeout
from .solver import SatSession, Status
from .tree import DecisionTree, Leaf, PrunedTree, Tree, leaf_count, mislabelled, node_count, prune

log = logging.getLogger(__name__)


@dataclass
class InferenceConfig:
    policy: Literal["first", "random"] = "first"
    seed: int = 0
    time_budget: float | None = None
    start_depth: int = 1
    max_depth: int | None = None
    solver: str = "minisat22"

    def __post_init__(self):
        if self.policy not in ("first", "random"):
            raise ValueError(f"unknown counterexample policy {self.policy!r}")
        if self.start_depth < 0:
            raise ValueError("start_depth must be >= 0")
        if self.max_depth is not None and self.max_depth < self.start_depth:
            raise ValueError("start_depth exceeds max_depth")


@dataclass
class InferenceReport:
    tree: Tree
    depth: int
    node_count: int
    examples_used: int
    clauses: int
    literals: int
    variables: int
    wall_time: float
    iterations: int
    complete: bool = True
    defaulted_leaves: tuple[int, ...] = ()

    def stats(self) -> dict:
        return {
            "k": self.depth,
            "nodes": self.node_count,
            "examples_used": self.examples_used,
            "clauses": self.clauses,
            "literals": self.literals,
            "variables": self.variables,
            "iterations": self.iterations,
            "complete": self.complete,
            "defaulted_leaves": list(self.defaulted_leaves),
            "time": self.wall_time,
        }


def decode_model(session: SatSession, vm: cnf.VarMap, k: int, c: int, m: int) -> DecisionTree:
    nodes = []
    for q in range(1, 2 ** k):
        chosen = [f for f in range(m) if session.value(vm.f(q, f))]
        if len(chosen) != 1:
            raise EncodingBug(f"node {q} has features {chosen}; exactly one expected")
        nodes.append(chosen[0])
    leaves = []
    for v in range(2 ** k):
        labels = [a for a in range(c) if session.value(vm.c(v, a))]
        leaves.append(labels[0] if labels else None)
    return DecisionTree(k, tuple(nodes), tuple(leaves))


class FixedDepthInference:
    """One incremental solver session for trees of depth ``k`` over ``data``.

    Example clauses persist across :meth:`run` calls, so successive leaf
    bounds reuse everything learned so far.
    """

    def __init__(self, data: BinaryDataset, k: int, cfg: InferenceConfig | None = None,
                 deadline: float | None = None):
        self.data = data
        self.k = k
        self.cfg = cfg or InferenceConfig()
        self.deadline = deadline
        self.vm = cnf.VarMap()
        self.buffer = cnf.CnfBuffer()
        self.session = SatSession(self.cfg.solver)
        self.added: list[int] = []
        self._added_vectors: dict[bytes, int] = {}
        self.iterations = 0
        self._rng = np.random.default_rng(self.cfg.seed)

        self.vm.add_tree(k, data.m, data.c)
        self._emit(cnf.node_feature_clauses(self.vm, k, data.m))

    def _emit(self, clauses) -> None:
        for clause in clauses:
            self.buffer.add(clause)
            self.session.add_clause(clause)

    def enable_size_bound(self) -> None:
        if not self.vm.has_counter():
            self.vm.add_counter(self.k)
            self._emit(cnf.cardinality_clauses(self.vm, self.k, self.data.c))

    def add_example(self, i: int) -> None:
        key = self.data.X[i].tobytes()
        label = int(self.data.y[i])
        previous = self._added_vectors.get(key)
        if previous is not None:
            if previous != label:
                raise ContradictoryDataset(f"example {i} repeats an encoded vector with another label")
            raise EncodingBug(f"example {i} is already encoded yet misclassified")
        self._added_vectors[key] = label
        self.added.append(i)
        self.vm.add_example(i, self.k)
        self._emit(cnf.feature_clauses(self.vm, self.data.X[i], i, self.k))
        self._emit(cnf.class_clauses(self.vm, i, label, self.k, self.data.c))

    def _budget(self) -> float | None:
        if self.deadline is None:
            return None
        return self.deadline - time.monotonic()

    def _pick(self, wrong: np.ndarray) -> int:
        if self.cfg.policy == "first":
            return int(wrong[0])
        return int(self._rng.choice(wrong))

    def run(self, max_leaves: int | None = None) -> DecisionTree | None:
        """A depth-``k`` tree consistent with all data, or ``None`` if none exists.

        With ``max_leaves`` at most that many leaves carry a class.
        """
        assumptions = []
        if max_leaves is not None:
            self.enable_size_bound()
            assumptions.append(cnf.leaf_bound_literal(self.vm, self.k, max_leaves))
        while True:
            self.iterations += 1
            status = self.session.solve(assumptions, budget=self._budget())
            if status is Status.UNKNOWN:
                raise InferenceTimeout(f"time budget exhausted at depth {self.k}")
            if status is Status.UNSAT:
                return None
            tree = decode_model(self.session, self.vm, self.k, self.data.c, self.data.m)
            wrong = mislabelled(tree, self.data)
            if len(wrong) == 0:
                return tree
            self.add_example(self._pick(wrong))

    def close(self) -> None:
        self.session.close()


def _report(tree: Tree, inf: FixedDepthInference | None, start: float, **extra) -> InferenceReport:
    return InferenceReport(
        tree=tree,
        depth=tree.k if isinstance(tree, DecisionTree) else (inf.k if inf else 0),
        node_count=node_count(tree),
        examples_used=len(inf.added) if inf else 0,
        clauses=len(inf.buffer) if inf else 0,
        literals=inf.buffer.literals if inf else 0,
        variables=len(inf.vm) if inf else 0,
        wall_time=time.monotonic() - start,
        iterations=inf.iterations if inf else 0,
        **extra,
    )


def _deadline(cfg: InferenceConfig, start: float) -> float | None:
    return None if cfg.time_budget is None else start + cfg.time_budget


def _check(tree: Tree, data: BinaryDataset) -> None:
    if len(mislabelled(tree, data)):
        raise EncodingBug("returned tree is inconsistent with the data")


def infer_fixed(data: BinaryDataset, k: int, max_leaves: int | None = None,
                cfg: InferenceConfig | None = None) -> tuple[DecisionTree, InferenceReport] | None:
    """Run the incremental loop once at depth ``k``; ``None`` means no such tree."""
    cfg = cfg or InferenceConfig()
    if max_leaves is not None and not 1 <= max_leaves <= 2 ** k:
        raise ValueError(f"max_leaves must lie in [1, {2 ** k}]")
    start = time.monotonic()
    inf = FixedDepthInference(data, k, cfg, _deadline(cfg, start))
    try:
        tree = inf.run(max_leaves)
        if tree is None:
            return None
        _check(tree, data)
        return tree, _report(tree, inf, start)
    finally:
        inf.close()


def _single_class(data: BinaryDataset) -> int | None:
    labels = np.unique(data.y)
    if len(labels) <= 1:
        return int(labels[0]) if len(labels) else 0
    return None


def _search_depth(data: BinaryDataset, cfg: InferenceConfig, deadline: float | None
                  ) -> tuple[DecisionTree, FixedDepthInference]:
    max_depth = cfg.max_depth if cfg.max_depth is not None else max(data.m, cfg.start_depth)
    for k in range(cfg.start_depth, max_depth + 1):
        inf = FixedDepthInference(data, k, cfg, deadline)
        try:
            tree = inf.run()
        except BaseException:
            inf.close()
            raise
        if tree is not None:
            log.info("depth %d: consistent tree after %d examples", k, len(inf.added))
            return tree, inf
        log.info("depth %d: unsatisfiable after %d examples", k, len(inf.added))
        inf.close()
    raise DepthCapExceeded(f"no consistent tree up to depth {max_depth}")


def infer_min_depth(data: BinaryDataset, cfg: InferenceConfig | None = None
                    ) -> tuple[DecisionTree, InferenceReport]:
    """Perfect tree of minimal depth; don't-care leaves get the majority class."""
    cfg = cfg or InferenceConfig()
    start = time.monotonic()
    lone = _single_class(data)
    if lone is not None:
        tree = DecisionTree(0, (), (lone,))
        return tree, _report(tree, None, start)

    raw, inf = _search_depth(data, cfg, _deadline(cfg, start))
    try:
        tree = raw.with_default(data.majority_class())
        _check(tree, data)
        return tree, _report(tree, inf, start, defaulted_leaves=tuple(sorted(tree.defaulted)))
    finally:
        inf.close()


def infer_min_size(data: BinaryDataset, cfg: InferenceConfig | None = None
                   ) -> tuple[PrunedTree, InferenceReport]:
    """Fewest nodes among trees whose depth equals the minimal perfect depth.

    Binary-searches the number of labelled leaves ``L``; the pruned tree
    then has ``2L - 1`` nodes.  On timeout the best tree found so far is
    returned with ``complete=False``.
    """
    cfg = cfg or InferenceConfig()
    start = time.monotonic()
    lone = _single_class(data)
    if lone is not None:
        tree = Leaf(lone)
        return tree, _report(tree, None, start)

    raw, inf = _search_depth(data, cfg, _deadline(cfg, start))
    try:
        best = prune(raw)
        complete = True
        lo, hi = 1, leaf_count(best) - 1
        try:
            while lo <= hi:
                mid = (lo + hi) // 2
                found = inf.run(max_leaves=mid)
                if found is None:
                    lo = mid + 1
                else:
                    best = prune(found)
                    hi = leaf_count(best) - 1
        except InferenceTimeout:
            log.warning("size search timed out; returning best tree so far")
            complete = False
        _check(best, data)
        return best, _report(best, inf, start, complete=complete)
    finally:
        inf.close()
