"""Decision trees in heap index coding, plus their pruned form.

A perfect tree of depth ``k`` stores internal nodes ``V[1..2^k-1]``
(children of ``V[i]`` are ``V[2i]`` and ``V[2i+1]``) and leaves
``V'[0..2^k-1]``.  Leaf ``V'[v]`` sits at heap position ``2^k + v``, so
the bits of ``v`` (most significant first) spell the branch choices
from the root: 0 = feature false = left, 1 = feature true = right.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DecodeError, EvaluationError, PruneError

DONT_CARE = None


def children(i: int, k: int) -> tuple[tuple[str, int], tuple[str, int]]:
    """Children of internal node ``V[i]`` as ``("node"|"leaf", index)`` pairs."""
    if not 1 <= i < 2 ** k:
        raise IndexError(f"no internal node {i} in a depth-{k} tree")
    if i < 2 ** (k - 1):
        return ("node", 2 * i), ("node", 2 * i + 1)
    base = i - 2 ** (k - 1)
    return ("leaf", 2 * base), ("leaf", 2 * base + 1)


@dataclass(frozen=True)
class DecisionTree:
    """Perfect depth-``k`` tree.

    ``nodes[i - 1]`` is the feature tested at ``V[i]``; ``leaves[v]`` is
    the class of ``V'[v]`` or ``None`` (don't care).  ``defaulted`` lists
    leaves whose class was filled in for display rather than chosen by
    the solver.
    """

    k: int
    nodes: tuple[int, ...]
    leaves: tuple[int | None, ...]
    defaulted: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(int(f) for f in self.nodes))
        object.__setattr__(self, "leaves",
                           tuple(None if a is None else int(a) for a in self.leaves))
        object.__setattr__(self, "defaulted", frozenset(self.defaulted))
        if self.k < 0:
            raise ValueError("depth must be non-negative")
        if len(self.nodes) != 2 ** self.k - 1:
            raise ValueError(f"depth {self.k} needs {2 ** self.k - 1} nodes, got {len(self.nodes)}")
        if len(self.leaves) != 2 ** self.k:
            raise ValueError(f"depth {self.k} needs {2 ** self.k} leaves, got {len(self.leaves)}")

    def feature(self, i: int) -> int:
        return self.nodes[i - 1]

    def leaf_index(self, example: Sequence) -> int:
        q = 1
        for _ in range(self.k):
            f = self.nodes[q - 1]
            if not 0 <= f < len(example):
                raise EvaluationError(f"feature {f} outside example of width {len(example)}")
            q = 2 * q + (1 if example[f] else 0)
        return q - 2 ** self.k

    def leaf_indices(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=bool)
        if self.nodes and max(self.nodes) >= X.shape[1]:
            raise EvaluationError(f"tree tests feature {max(self.nodes)} but examples have width {X.shape[1]}")
        nodes = np.array((-1,) + self.nodes, dtype=np.int64)
        rows = np.arange(len(X))
        q = np.ones(len(X), dtype=np.int64)
        for _ in range(self.k):
            q = 2 * q + X[rows, nodes[q]]
        return q - 2 ** self.k

    def with_default(self, cls: int) -> DecisionTree:
        """Fill every don't-care leaf with ``cls`` and remember which ones."""
        filled = [cls if a is None else a for a in self.leaves]
        missing = {v for v, a in enumerate(self.leaves) if a is None}
        return DecisionTree(self.k, self.nodes, tuple(filled), self.defaulted | missing)

    @property
    def node_count(self) -> int:
        return 2 ** (self.k + 1) - 1


@dataclass(frozen=True)
class Leaf:
    cls: int


@dataclass(frozen=True)
class Node:
    feature: int
    left: PrunedTree
    right: PrunedTree


PrunedTree = Union[Leaf, Node]
Tree = Union[DecisionTree, Leaf, Node]


def classify(tree: Tree, example: Sequence) -> int | None:
    """Class of ``example``, or ``None`` when it lands on a don't-care leaf."""
    if isinstance(tree, DecisionTree):
        return tree.leaves[tree.leaf_index(example)]
    while isinstance(tree, Node):
        if not 0 <= tree.feature < len(example):
            raise EvaluationError(f"feature {tree.feature} outside example of width {len(example)}")
        tree = tree.right if example[tree.feature] else tree.left
    return tree.cls


def predict(tree: Tree, X: np.ndarray) -> np.ndarray:
    """Vectorised :func:`classify`; don't-care is reported as -1."""
    X = np.asarray(X, dtype=bool)
    if isinstance(tree, DecisionTree):
        table = np.array([-1 if a is None else a for a in tree.leaves], dtype=np.int64)
        return table[tree.leaf_indices(X)]
    return np.array([classify(tree, x) for x in X], dtype=np.int64)


def mislabelled(tree: Tree, data) -> np.ndarray:
    """Indices of examples in ``data`` the tree gets wrong (don't-care counts as wrong)."""
    if data.n == 0:
        return np.zeros(0, dtype=np.int64)
    return np.flatnonzero(predict(tree, data.X) != data.y)


def is_consistent(tree: Tree, data) -> int | None:
    """``None`` if every example is classified correctly, else the first failing index."""
    bad = mislabelled(tree, data)
    return int(bad[0]) if len(bad) else None


def prune(tree: DecisionTree) -> PrunedTree:
    """Collapse every subtree made only of don't-care leaves into its sibling."""

    def build(pos: int, depth: int) -> PrunedTree | None:
        if depth == tree.k:
            a = tree.leaves[pos - 2 ** tree.k]
            return None if a is None else Leaf(a)
        left = build(2 * pos, depth + 1)
        right = build(2 * pos + 1, depth + 1)
        if left is None:
            return right
        if right is None:
            return left
        return Node(tree.nodes[pos - 1], left, right)

    result = build(1, 0)
    if result is None:
        raise PruneError("every leaf is don't-care")
    return result


def node_count(tree: Tree) -> int:
    if isinstance(tree, DecisionTree):
        return tree.node_count
    if isinstance(tree, Leaf):
        return 1
    return 1 + node_count(tree.left) + node_count(tree.right)


def leaf_count(tree: Tree) -> int:
    if isinstance(tree, DecisionTree):
        return len(tree.leaves)
    if isinstance(tree, Leaf):
        return 1
    return leaf_count(tree.left) + leaf_count(tree.right)


def depth(tree: Tree) -> int:
    if isinstance(tree, DecisionTree):
        return tree.k
    if isinstance(tree, Leaf):
        return 0
    return 1 + max(depth(tree.left), depth(tree.right))


def to_dict(tree: Tree) -> dict:
    if isinstance(tree, DecisionTree):
        return {"k": tree.k, "nodes": list(tree.nodes), "leaves": list(tree.leaves)}
    if isinstance(tree, Leaf):
        return {"class": tree.cls}
    return {"feature": tree.feature, "left": to_dict(tree.left), "right": to_dict(tree.right)}


def from_dict(doc) -> Tree:
    if not isinstance(doc, dict):
        raise DecodeError(f"expected an object, got {type(doc).__name__}")
    try:
        if "k" in doc:
            return DecisionTree(doc["k"], tuple(doc["nodes"]), tuple(doc["leaves"]))
        if "class" in doc:
            return Leaf(int(doc["class"]))
        return Node(int(doc["feature"]), from_dict(doc["left"]), from_dict(doc["right"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise DecodeError(f"malformed tree: {exc}") from exc


def serialize(tree: Tree) -> str:
    return json.dumps(to_dict(tree))


def deserialize(text: str) -> Tree:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DecodeError(str(exc)) from exc
    return from_dict(doc)


def to_dot(tree: Tree, feature_names: Sequence[str] | None = None,
           class_names: Sequence[str] | None = None) -> str:
    """Graphviz source; node ids are heap positions (root = 1)."""

    def fname(f: int) -> str:
        return feature_names[f] if feature_names else f"f{f}"

    def cname(a: int | None) -> str:
        if a is None:
            return "-"
        return class_names[a] if class_names else str(a)

    lines = ["digraph tree {", "  node [shape=box];"]

    def edge(parent: int, child: int, label: str):
        lines.append(f'  n{parent} -> n{child} [label="{label}"];')

    if isinstance(tree, DecisionTree):
        for i, f in enumerate(tree.nodes, start=1):
            lines.append(f'  n{i} [label="{fname(f)}"];')
        for v, a in enumerate(tree.leaves):
            pos = 2 ** tree.k + v
            style = ", style=dashed" if v in tree.defaulted else ""
            lines.append(f'  n{pos} [label="{cname(a)}", shape=ellipse{style}];')
        for i in range(1, 2 ** tree.k):
            edge(i, 2 * i, "false")
            edge(i, 2 * i + 1, "true")
    else:
        def walk(t: PrunedTree, pos: int):
            if isinstance(t, Leaf):
                lines.append(f'  n{pos} [label="{cname(t.cls)}", shape=ellipse];')
                return
            lines.append(f'  n{pos} [label="{fname(t.feature)}"];')
            edge(pos, 2 * pos, "false")
            edge(pos, 2 * pos + 1, "true")
            walk(t.left, 2 * pos)
            walk(t.right, 2 * pos + 1)

        walk(tree, 1)
    lines.append("}")
    return "\n".join(lines) + "\n"
