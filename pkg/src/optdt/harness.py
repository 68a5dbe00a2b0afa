"""Cross-validation, random instance generation and scaling sweeps."""

from __future__ import annotations

import csv
import dataclasses
import io
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .dataset import BinaryDataset, RawDataset, binarize, validate
from .errors import DepthCapExceeded, GeneratorError, InferenceTimeout
from .inference import InferenceConfig, InferenceReport, infer_min_depth, infer_min_size
from .tree import DecisionTree, Tree, predict

log = logging.getLogger(__name__)

Mode = Literal["depth", "size"]


def fold_indices(n: int, folds: int, seed: int = 0) -> list[np.ndarray]:
    """Shuffle ``range(n)`` and cut it into ``folds`` parts whose sizes differ by at most one."""
    if folds < 2:
        raise ValueError("need at least two folds")
    if folds > n:
        raise ValueError(f"{folds} folds requested for {n} examples")
    order = np.random.default_rng(seed).permutation(n)
    return [np.sort(part) for part in np.array_split(order, folds)]


def infer(data: BinaryDataset, mode: Mode, cfg: InferenceConfig | None = None
          ) -> tuple[Tree, InferenceReport]:
    if mode == "depth":
        return infer_min_depth(data, cfg)
    if mode == "size":
        return infer_min_size(data, cfg)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass
class FoldReport:
    fold: int
    train_size: int
    test_size: int
    accuracy: float | None = None
    report: InferenceReport | None = None
    error: str | None = None
    timed_out: bool = False

    @property
    def failed(self) -> bool:
        return self.accuracy is None


@dataclass
class CVResult:
    accuracy: float
    folds: list[FoldReport] = field(default_factory=list)

    @property
    def failed_folds(self) -> list[FoldReport]:
        return [f for f in self.folds if f.failed]


def kfold_cross_validate(data: RawDataset | BinaryDataset, folds: int, mode: Mode = "depth",
                         seed: int = 0, cfg: InferenceConfig | None = None) -> CVResult:
    """Mean held-out accuracy over ``folds`` train/test splits.

    Raw data is binarized per training fold and the resulting schema is
    reused on the test fold.  Don't-care predictions count as errors.
    """
    n = len(data.rows) if isinstance(data, RawDataset) else data.n
    reports = []
    parts = fold_indices(n, folds, seed)
    for f, test_idx in enumerate(parts):
        train_idx = np.concatenate([p for g, p in enumerate(parts) if g != f])
        if isinstance(data, RawDataset):
            train, schema = binarize(data.subset(train_idx))
            test, _ = binarize(data.subset(test_idx), schema)
        else:
            train, test = data.subset(train_idx), data.subset(test_idx)

        fr = FoldReport(f, len(train_idx), len(test_idx))
        reports.append(fr)
        check = validate(train)
        if not check.feasible:
            fr.error = f"training fold has {len(check.contradictions)} contradiction(s)"
            log.warning("fold %d: %s", f, fr.error)
            continue
        try:
            tree, fr.report = infer(check.dataset, mode, cfg)
        except (InferenceTimeout, DepthCapExceeded) as exc:
            fr.error = str(exc)
            fr.timed_out = isinstance(exc, InferenceTimeout)
            log.warning("fold %d: %s", f, exc)
            continue
        fr.accuracy = float(np.mean(predict(tree, test.X) == test.y)) if test.n else 1.0

    scored = [fr.accuracy for fr in reports if fr.accuracy is not None]
    return CVResult(float(np.mean(scored)) if scored else math.nan, reports)


@dataclass(frozen=True)
class GeneratorSpec:
    k: int
    f: int
    c: int
    n: int
    seed: int = 0
    distinct: bool = True

    def __post_init__(self):
        if self.k < 0 or self.c < 1 or self.n < 1:
            raise GeneratorError(f"invalid generator parameters {self}")
        if self.f < self.k:
            raise GeneratorError("need at least as many features as the tree depth")


def random_tree(k: int, f: int, c: int, rng: np.random.Generator) -> DecisionTree:
    """Perfect depth-``k`` tree, no feature repeated along a path, all classes used where possible."""
    nodes = [0] * (2 ** k - 1)

    def label(q: int, used: frozenset[int]):
        if q >= 2 ** k:
            return
        choices = [g for g in range(f) if g not in used]
        nodes[q - 1] = int(rng.choice(choices))
        label(2 * q, used | {nodes[q - 1]})
        label(2 * q + 1, used | {nodes[q - 1]})

    label(1, frozenset())
    wanted = min(c, 2 ** k)
    while True:
        leaves = rng.integers(0, c, size=2 ** k)
        if len(set(leaves.tolist())) >= wanted:
            return DecisionTree(k, tuple(nodes), tuple(int(a) for a in leaves))


def _distinct_vectors(n: int, f: int, rng: np.random.Generator) -> np.ndarray:
    if f < 63 and n > 2 ** f:
        raise GeneratorError(f"cannot draw {n} distinct vectors over {f} features")
    if f <= 20:
        codes = rng.choice(2 ** f, size=n, replace=False)
        bits = (codes[:, None] >> np.arange(f - 1, -1, -1)[None, :]) & 1
        return bits.astype(bool)
    rows: dict[bytes, np.ndarray] = {}
    while len(rows) < n:
        row = rng.integers(0, 2, size=f).astype(bool)
        rows.setdefault(row.tobytes(), row)
    return np.array(list(rows.values()), dtype=bool)


def generate_random_instance(spec: GeneratorSpec) -> tuple[BinaryDataset, DecisionTree]:
    """Random tree plus ``n`` uniform examples labelled by it.

    Examples are distinct unless ``spec.distinct`` is false, in which case
    they are drawn with replacement (needed once ``n`` exceeds ``2^f``).
    The tree is drawn first, so specs differing only in ``n`` share it.
    """
    rng = np.random.default_rng(spec.seed)
    tree = random_tree(spec.k, spec.f, spec.c, rng)
    if spec.distinct:
        X = _distinct_vectors(spec.n, spec.f, rng)
    else:
        X = rng.integers(0, 2, size=(spec.n, spec.f)).astype(bool)
    y = predict(tree, X)
    return BinaryDataset(X, y, spec.c), tree


def dataset_to_csv(data: BinaryDataset) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(list(data.feature_names) + ["class"])
    for x, a in zip(data.X, data.y):
        writer.writerow([int(b) for b in x] + [data.class_names[a]])
    return out.getvalue()


@dataclass
class SweepRow:
    value: int
    mean_time: float | None
    mean_examples_used: float | None
    runs: int
    timeouts: int = 0


def scaling_sweep(base: GeneratorSpec, vary: str, points: Sequence[int], runs: int = 10,
                  mode: Mode = "depth", cfg: InferenceConfig | None = None) -> list[SweepRow]:
    """Average inference time and examples used while one generator parameter varies.

    Run ``r`` of every point uses seed ``base.seed + r``; cells where every
    run timed out are ``None``.
    """
    if vary not in ("k", "f", "c", "n"):
        raise ValueError(f"cannot vary {vary!r}")
    if not points:
        raise ValueError("no sweep points")
    rows = []
    for value in points:
        times, used, timeouts = [], [], 0
        for r in range(runs):
            spec = dataclasses.replace(base, **{vary: value, "seed": base.seed + r})
            data, _ = generate_random_instance(spec)
            if not spec.distinct:
                data = validate(data).dataset
            t0 = time.perf_counter()
            try:
                _, report = infer(data, mode, cfg)
            except InferenceTimeout:
                timeouts += 1
                continue
            times.append(time.perf_counter() - t0)
            used.append(report.examples_used)
        rows.append(SweepRow(
            value,
            float(np.mean(times)) if times else None,
            float(np.mean(used)) if used else None,
            runs,
            timeouts,
        ))
    return rows


def sweep_to_csv(rows: Sequence[SweepRow], vary: str) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([vary, "mean_time", "mean_examples_used", "runs", "timeouts"])
    for row in rows:
        writer.writerow([
            row.value,
            "" if row.mean_time is None else f"{row.mean_time:.6f}",
            "" if row.mean_examples_used is None else f"{row.mean_examples_used:.3f}",
            row.runs,
            row.timeouts,
        ])
    return out.getvalue()
