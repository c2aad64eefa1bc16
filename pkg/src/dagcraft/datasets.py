"""Dataset ingestion, summary moments, and the wind-farm toy generator."""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateColumnWarning,
    InsufficientRowsError,
    MissingColumnError,
    NonNumericCellError,
    ParseError,
)
from .rng import derive_substream, make_rng

TOY_COLUMNS = (
    "Winter_Ind",
    "Sea_Temperature",
    "Wind_Speed",
    "Strength_Degradation",
    "Rotational_RPM",
    "Energy_Yield",
    "Perceived_Noise",
)


@dataclass(frozen=True)
class Dataset:
    """Named numeric columns of equal length; the observational evidence.

    Columns keep their ingestion order. All values are finite floats and
    every column has at least two rows; ingestion rejects anything else.
    """

    names: tuple[str, ...]
    values: np.ndarray  # shape (n, p), float64

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[1] != len(self.names):
            raise ParseError("column count does not match value matrix")
        if len(set(self.names)) != len(self.names):
            raise ParseError("duplicate column names")
        if values.shape[0] < 2:
            raise InsufficientRowsError("datasets need at least 2 rows")
        if not np.all(np.isfinite(values)):
            raise ParseError("non-finite value in dataset")
        object.__setattr__(self, "values", values)
        values.setflags(write=False)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def column(self, name: str) -> np.ndarray:
        try:
            idx = self.names.index(name)
        except ValueError:
            raise MissingColumnError(f"no column {name!r}") from None
        return self.values[:, idx]

    def matrix(self, names) -> np.ndarray:
        """Columns in the requested order as an (n, k) array."""
        return np.column_stack([self.column(c) for c in names]) if names else np.empty((self.n, 0))

    def select(self, names) -> "Dataset":
        return Dataset(tuple(names), self.matrix(names))

    @classmethod
    def from_dict(cls, columns: dict) -> "Dataset":
        names = tuple(columns)
        return cls(names, np.column_stack([np.asarray(columns[c], dtype=float) for c in names]))

    @classmethod
    def from_frame(cls, frame) -> "Dataset":
        """Build from a pandas DataFrame (all columns must be numeric)."""
        return cls.from_dict({str(c): frame[c].to_numpy(dtype=float) for c in frame.columns})

    def to_frame(self):
        import pandas as pd

        return pd.DataFrame(self.values.copy(), columns=list(self.names))


@dataclass(frozen=True)
class MomentSummary:
    """Sample means, covariances (n-1 denominator), and Pearson correlations.

    ``degenerate`` lists zero-variance columns; correlations involving
    them are NaN sentinels and downstream hypothesis families skip them.
    """

    names: tuple[str, ...]
    mean: np.ndarray
    cov: np.ndarray
    corr: np.ndarray
    degenerate: tuple[str, ...] = ()

    def index(self, name: str) -> int:
        return self.names.index(name)

    def pair_cov(self, x: str, y: str) -> float:
        return float(self.cov[self.index(x), self.index(y)])

    def pair_corr(self, x: str, y: str) -> float:
        return float(self.corr[self.index(x), self.index(y)])


def load_csv(path_or_stream, schema=None) -> Dataset:
    """Read an RFC-4180-style CSV with a header row into a Dataset.

    ``schema``, when given, is the set of expected column names; missing
    ones raise MissingColumnError. Cells must all parse as floats and
    rows must be rectangular; violations carry 1-based row/col locations.
    """
    if hasattr(path_or_stream, "read"):
        text = path_or_stream.read()
    else:
        with open(path_or_stream, "r", newline="", encoding="utf-8") as fh:
            text = fh.read()
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty input, expected a header row") from None
    header = [h.strip() for h in header]
    if any(not h for h in header):
        raise ParseError("blank column name in header", row=1)
    if len(set(header)) != len(header):
        raise ParseError("duplicate column name in header", row=1)
    if schema is not None:
        missing = [c for c in schema if c not in header]
        if missing:
            raise MissingColumnError(f"missing expected columns: {missing}")

    rows = []
    for r, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(
                f"expected {len(header)} cells, found {len(row)}", row=r
            )
        parsed = np.empty(len(row))
        for c, cell in enumerate(row):
            cell = cell.strip()
            if not cell:
                raise ParseError("empty cell", row=r, col=c + 1)
            try:
                parsed[c] = float(cell)
            except ValueError:
                raise NonNumericCellError(
                    f"non-numeric cell {cell!r}", row=r, col=c + 1
                ) from None
            if not np.isfinite(parsed[c]):
                raise NonNumericCellError(
                    f"non-finite cell {cell!r}", row=r, col=c + 1
                )
        rows.append(parsed)
    if len(rows) < 2:
        raise InsufficientRowsError(f"need at least 2 data rows, found {len(rows)}")
    return Dataset(tuple(header), np.vstack(rows))


def save_csv(data: Dataset, path_or_stream) -> None:
    """Write a Dataset as CSV; floats use shortest round-trip repr."""
    if hasattr(path_or_stream, "write"):
        _write_csv(data, path_or_stream)
    else:
        with open(path_or_stream, "w", newline="", encoding="utf-8") as fh:
            _write_csv(data, fh)


def _write_csv(data: Dataset, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(data.names)
    for row in data.values:
        writer.writerow([repr(float(v)) for v in row])


def generate_toy_dataset(n: int, seed: int) -> Dataset:
    """Synthetic offshore wind-farm data; deterministic given (n, seed).

    Winter drives sea temperature down and wind up; wind drives turbine
    RPM; RPM drives energy yield and (against wind masking) perceived
    noise. Bearing strength degradation is sampled but feeds only weakly
    into energy yield, so it is near-independent of everything else.
    """
    if n < 1:
        raise InsufficientRowsError("n must be >= 1")
    rng = make_rng(derive_substream(seed, "toy-dataset"))
    winter = rng.binomial(1, 0.7, size=n).astype(float)
    sea_temp = rng.normal(20.0 - 10.0 * winter, 2.0)
    wind = rng.normal(40.0 + 20.0 * winter, 10.0)
    degradation = rng.normal(1.5, 0.1, size=n)
    rpm = rng.normal(1.2 + wind / 10.0, 0.2)
    energy = rng.normal(10.0 + rpm / 1.5 - degradation / 10.0, 2.0)
    noise = rng.normal(20.0 + rpm / 1.5 - wind / 4.0, 1.0)
    return Dataset(
        TOY_COLUMNS,
        np.column_stack([winter, sea_temp, wind, degradation, rpm, energy, noise]),
    )


def moment_summary(data: Dataset) -> MomentSummary:
    """Sample means, covariances, and Pearson correlations for a dataset.

    Zero-variance columns are surfaced as NaN correlation rows plus a
    DegenerateColumnWarning instead of a hard failure: in a co-design
    session a flat column is a talking point, not a crash.
    """
    if data.n < 3:
        raise InsufficientRowsError("moment summary needs n >= 3")
    values = data.values
    mean = values.mean(axis=0)
    cov = np.cov(values, rowvar=False, ddof=1)
    cov = np.atleast_2d(cov)
    sd = np.sqrt(np.diag(cov))
    degenerate = tuple(
        name for name, s in zip(data.names, sd) if s == 0.0
    )
    if degenerate:
        warnings.warn(
            f"zero-variance columns excluded from correlations: {list(degenerate)}",
            DegenerateColumnWarning,
            stacklevel=2,
        )
    with np.errstate(divide="ignore", invalid="ignore"):
        corr = cov / np.outer(sd, sd)
    np.fill_diagonal(corr, 1.0)
    return MomentSummary(data.names, mean, cov, corr, degenerate)
