"""Tabular input, boolean feature encoding and dataset validation.

Raw CSV columns are classified as boolean, ordinal-numeric or
categorical. :func:`binarize` turns every non-boolean column into
boolean features: an ordinal column with sorted distinct values
``v_1 < ... < v_d`` yields the ``d - 1`` threshold features
``value >= v_j`` for ``j = 2..d``; a categorical column yields one
membership feature per category (dropped when constant).
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from typing import IO, Iterable, Literal, Sequence

import numpy as np

from .errors import EmptyDatasetError, ParseError, SchemaError

log = logging.getLogger(__name__)

ColumnKind = Literal["boolean", "ordinal", "categorical"]

_TRUE = {"1", "true"}
_FALSE = {"0", "false"}


@dataclass(frozen=True)
class Column:
    name: str
    kind: ColumnKind


@dataclass(frozen=True)
class RawDataset:
    columns: tuple[Column, ...]
    rows: tuple[tuple[str, ...], ...]
    class_index: int

    @property
    def class_name(self) -> str:
        return self.columns[self.class_index].name

    @property
    def feature_columns(self) -> list[tuple[int, Column]]:
        return [(j, col) for j, col in enumerate(self.columns) if j != self.class_index]

    def labels(self) -> list[str]:
        return [row[self.class_index] for row in self.rows]

    def subset(self, indices: Iterable[int]) -> RawDataset:
        return RawDataset(self.columns, tuple(self.rows[i] for i in indices), self.class_index)


@dataclass(frozen=True)
class ColumnEncoding:
    """How one source column maps to boolean features.

    ``values`` holds ordered thresholds (ordinal) or categories
    (categorical); it is empty for boolean pass-through columns.
    """

    kind: ColumnKind
    values: tuple = ()

    def feature_names(self, column: str) -> list[str]:
        if self.kind == "boolean":
            return [column]
        if self.kind == "ordinal":
            return [f"{column}>={v}" for v in self.values]
        return [f"{column}=={v}" for v in self.values]


@dataclass(frozen=True)
class BinarizationSchema:
    columns: dict[str, ColumnEncoding]
    class_column: str
    classes: tuple[str, ...]

    @property
    def is_identity(self) -> bool:
        return all(enc.kind == "boolean" for enc in self.columns.values())

    @property
    def feature_names(self) -> list[str]:
        names: list[str] = []
        for col, enc in self.columns.items():
            names.extend(enc.feature_names(col))
        return names

    def to_json(self) -> str:
        doc = {
            "class_column": self.class_column,
            "classes": list(self.classes),
            "columns": {
                name: {"kind": enc.kind, "values": list(enc.values)}
                for name, enc in self.columns.items()
            },
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> BinarizationSchema:
        try:
            doc = json.loads(text)
            columns = {
                name: ColumnEncoding(spec["kind"], tuple(spec["values"]))
                for name, spec in doc["columns"].items()
            }
            return cls(columns, doc["class_column"], tuple(doc["classes"]))
        except (ValueError, KeyError, TypeError) as exc:
            raise SchemaError(f"malformed schema document: {exc}") from exc


@dataclass(frozen=True, eq=False)
class BinaryDataset:
    """Boolean examples ``X`` (n x m) with class indices ``y``."""

    X: np.ndarray
    y: np.ndarray
    n_classes: int
    schema: BinarizationSchema | None = None
    feature_names: tuple[str, ...] = ()
    class_names: tuple[str, ...] = ()

    def __post_init__(self):
        X = np.asarray(self.X, dtype=bool)
        y = np.asarray(self.y, dtype=np.int64)
        if X.ndim != 2:
            X = X.reshape(len(y), -1)
        if len(X) != len(y):
            raise SchemaError(f"{len(X)} examples but {len(y)} labels")
        if self.n_classes < 1:
            raise SchemaError("need at least one class")
        if len(y) and (y.min() < 0 or y.max() >= self.n_classes):
            raise SchemaError("label out of range")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        if not self.feature_names:
            object.__setattr__(self, "feature_names", tuple(f"f{j}" for j in range(X.shape[1])))
        if not self.class_names:
            object.__setattr__(self, "class_names", tuple(str(a) for a in range(self.n_classes)))

    @classmethod
    def from_lists(cls, examples: Sequence[Sequence[int | bool]], labels: Sequence[int],
                   n_classes: int | None = None, m: int | None = None) -> BinaryDataset:
        if n_classes is None:
            n_classes = max(labels, default=0) + 1
        X = np.array(examples, dtype=bool)
        if len(examples) == 0:
            X = np.zeros((0, m or 0), dtype=bool)
        return cls(X, np.array(labels, dtype=np.int64), n_classes)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def m(self) -> int:
        return self.X.shape[1]

    @property
    def c(self) -> int:
        return self.n_classes

    def subset(self, indices) -> BinaryDataset:
        idx = np.asarray(indices, dtype=np.int64)
        return BinaryDataset(self.X[idx], self.y[idx], self.n_classes, self.schema,
                             self.feature_names, self.class_names)

    def majority_class(self) -> int:
        if self.n == 0:
            return 0
        return int(np.bincount(self.y, minlength=self.n_classes).argmax())


def load_csv(source: IO | bytes | str, class_column: str | None = None) -> RawDataset:
    """Read a headed CSV. ``class_column`` defaults to the last column.

    ``source`` may be a binary or text stream, or raw ``bytes``.
    """
    if isinstance(source, (bytes, bytearray)):
        text = bytes(source).decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        data = source.read()
        text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data

    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyDatasetError("no header row") from None
    header = [h.strip() for h in header]
    if len(set(header)) != len(header):
        raise SchemaError("duplicate column names in header")

    if class_column is None:
        class_index = len(header) - 1
    elif class_column in header:
        class_index = header.index(class_column)
    else:
        raise SchemaError(f"class column {class_column!r} not in header {header}")

    rows = []
    for line_no, row in enumerate(reader, start=2):
        if not row or all(not v.strip() for v in row):
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", row=line_no)
        values = tuple(v.strip() for v in row)
        if any(v == "" for v in values):
            raise ParseError("missing value", row=line_no)
        rows.append(values)
    if not rows:
        raise EmptyDatasetError("dataset has a header but no rows")

    columns = tuple(
        Column(name, _infer_kind([r[j] for r in rows])) for j, name in enumerate(header)
    )
    return RawDataset(columns, tuple(rows), class_index)


def _infer_kind(values: list[str]) -> ColumnKind:
    lowered = {v.lower() for v in values}
    if lowered <= _TRUE | _FALSE:
        return "boolean"
    try:
        for v in values:
            float(v)
    except ValueError:
        return "categorical"
    return "ordinal"


def _number(text: str) -> int | float:
    try:
        return int(text)
    except ValueError:
        return float(text)


def fit_schema(raw: RawDataset) -> BinarizationSchema:
    columns: dict[str, ColumnEncoding] = {}
    for j, col in raw.feature_columns:
        values = [row[j] for row in raw.rows]
        if col.kind == "boolean":
            columns[col.name] = ColumnEncoding("boolean")
        elif col.kind == "ordinal":
            distinct = sorted({_number(v) for v in values})
            columns[col.name] = ColumnEncoding("ordinal", tuple(distinct[1:]))
        else:
            categories = list(dict.fromkeys(values))
            # a lone category is a constant feature
            if len(categories) < 2:
                categories = []
            columns[col.name] = ColumnEncoding("categorical", tuple(categories))
    classes = tuple(dict.fromkeys(raw.labels()))
    return BinarizationSchema(columns, raw.class_name, classes)


def binarize(raw: RawDataset, schema: BinarizationSchema | None = None
             ) -> tuple[BinaryDataset, BinarizationSchema]:
    """Encode ``raw`` as a :class:`BinaryDataset`.

    When ``schema`` is given (e.g. fit on a training fold) it is applied
    as-is; class labels it has never seen are appended after its known
    classes.
    """
    if schema is None:
        schema = fit_schema(raw)
    index = {col.name: j for j, col in enumerate(raw.columns)}
    missing = [name for name in schema.columns if name not in index]
    if missing:
        raise SchemaError(f"columns {missing} required by the schema are absent")

    blocks = []
    for name, enc in schema.columns.items():
        values = [row[index[name]] for row in raw.rows]
        if enc.kind == "boolean":
            bad = [v for v in values if v.lower() not in _TRUE | _FALSE]
            if bad:
                raise SchemaError(f"column {name!r} expected boolean, got {bad[0]!r}")
            blocks.append(np.array([[v.lower() in _TRUE] for v in values], dtype=bool))
        elif enc.kind == "ordinal":
            try:
                nums = np.array([float(v) for v in values])
            except ValueError as exc:
                raise SchemaError(f"column {name!r} expected numbers: {exc}") from exc
            thresholds = np.array(enc.values, dtype=float)
            blocks.append(nums[:, None] >= thresholds[None, :])
        else:
            cats = np.array(enc.values, dtype=object)
            blocks.append(np.array(values, dtype=object)[:, None] == cats[None, :])

    n = len(raw.rows)
    X = np.concatenate(blocks, axis=1) if blocks else np.zeros((n, 0), dtype=bool)

    classes = list(schema.classes)
    lookup = {label: a for a, label in enumerate(classes)}
    y = []
    for label in raw.labels():
        if label not in lookup:
            lookup[label] = len(classes)
            classes.append(label)
        y.append(lookup[label])

    data = BinaryDataset(X.astype(bool), np.array(y, dtype=np.int64), max(len(classes), 1),
                         schema, tuple(schema.feature_names), tuple(classes))
    return data, schema


@dataclass
class ValidationReport:
    dataset: BinaryDataset
    duplicates: int
    contradictions: list[tuple[tuple[bool, ...], list[int]]] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return not self.contradictions


def validate(data: BinaryDataset) -> ValidationReport:
    """Collapse exact duplicates and find vectors carrying several labels.

    The returned dataset keeps the first occurrence of every
    (vector, label) pair, in the original order.
    """
    seen: dict[tuple[bool, ...], list[int]] = {}
    keep = []
    duplicates = 0
    for i in range(data.n):
        key = tuple(bool(b) for b in data.X[i])
        label = int(data.y[i])
        labels = seen.setdefault(key, [])
        if label in labels:
            duplicates += 1
            continue
        labels.append(label)
        keep.append(i)
    if duplicates:
        log.info("collapsed %d duplicate example(s)", duplicates)
    contradictions = [(key, labels) for key, labels in seen.items() if len(labels) > 1]
    return ValidationReport(data.subset(keep), duplicates, contradictions)
