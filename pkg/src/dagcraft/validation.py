"""Input validation helpers shared by the estimator and the service layer."""

from __future__ import annotations

import numpy as np

from .datasets import Dataset
from .errors import InsufficientRowsError, MissingColumnError, OutOfRangeError
from .graph import CausalGraph


def as_dataset(X) -> Dataset:
    """Coerce a Dataset, pandas DataFrame, or mapping of columns to Dataset."""
    if isinstance(X, Dataset):
        return X
    if hasattr(X, "columns") and hasattr(X, "to_numpy"):
        return Dataset.from_frame(X)
    if isinstance(X, dict):
        return Dataset.from_dict(X)
    raise TypeError(f"cannot interpret {type(X).__name__} as a dataset")


def check_graph_data(graph: CausalGraph, data: Dataset) -> None:
    """Every graph node must be a dataset column, with enough rows to fit."""
    missing = sorted(n for n in graph.nodes if n not in data.names)
    if missing:
        raise MissingColumnError(f"graph nodes missing from dataset: {missing}")
    max_parents = max((len(graph.parents(n)) for n in graph.nodes), default=0)
    if data.n <= max_parents + 2:
        raise InsufficientRowsError(
            f"need n > {max_parents + 2} rows to fit, got {data.n}"
        )


def check_probability(value: float, name: str) -> float:
    value = float(value)
    if not 0.0 < value < 1.0:
        raise OutOfRangeError(f"{name} must lie in (0, 1), got {value}")
    return value


def check_positive_int(value: int, name: str) -> int:
    value = int(value)
    if value < 1:
        raise OutOfRangeError(f"{name} must be a positive integer, got {value}")
    return value


def check_finite_matrix(a: np.ndarray, name: str) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a
