"""Minimal-depth and minimal-size decision trees inferred with an incremental SAT solver."""

from .dataset import BinaryDataset, RawDataset, binarize, load_csv, validate
from .inference import (InferenceConfig, InferenceReport, infer_fixed, infer_min_depth,
                        infer_min_size)
from .tree import DecisionTree, Leaf, Node, classify, is_consistent, prune

__all__ = [
    "BinaryDataset", "RawDataset", "binarize", "load_csv", "validate",
    "InferenceConfig", "InferenceReport", "infer_fixed", "infer_min_depth", "infer_min_size",
    "DecisionTree", "Leaf", "Node", "classify", "is_consistent", "prune",
]

__version__ = "0.1.0"
