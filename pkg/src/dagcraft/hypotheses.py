"""Hypothesis family generated from a fitted SCM.

Every fit spawns one family with a fixed record layout: a coefficient
record per estimated intercept and slope, a residual-normality record
per endogenous node (unless skipped for small n), a covariance
equivalence record per node pair including variances, one model-fit
record, and one intersection record standing for "everything above at
once". Costs come from edge beliefs for slopes and default to 1
elsewhere. The intersection p-value is left unset here; the multiplicity
step fills it in.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import stats

from .datasets import Dataset
from .errors import DegenerateColumnWarning
from .graph import CausalGraph, belief_to_cost
from .resampling import CovGapBootstrap
from .rng import derive_substream, make_rng
from .scm import ScmFit, model_fit_statistic, residual_normality_test
from .validation import as_dataset

INTERSECTION_ID = "intersection"
MODEL_FIT_ID = "model-fit"


class HypothesisKind(str, Enum):
    COEFFICIENT = "coefficient"
    RESIDUAL_NORMALITY = "residual-normality"
    COV_EQUIVALENCE = "cov-equivalence"
    MODEL_FIT = "model-fit"
    INTERSECTION = "intersection"


@dataclass
class HypothesisRecord:
    """One testable claim plus its multiplicity bookkeeping.

    ``raw_p`` is the unadjusted p-value, ``cost`` the weight the record
    carries in weighted procedures. ``adjusted_p`` and ``rejected`` stay
    None until an adjustment pass writes them. ``detail`` holds
    kind-specific extras (estimates, gaps, degrees of freedom) for
    reports and the UI.
    """

    id: str
    kind: HypothesisKind
    raw_p: float | None
    cost: float
    adjusted_p: float | None = None
    rejected: bool | None = None
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "raw_p": self.raw_p,
            "cost": self.cost,
            "adjusted_p": self.adjusted_p,
            "rejected": self.rejected,
            "detail": dict(self.detail),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HypothesisRecord":
        return cls(
            id=d["id"],
            kind=HypothesisKind(d["kind"]),
            raw_p=d["raw_p"],
            cost=d["cost"],
            adjusted_p=d.get("adjusted_p"),
            rejected=d.get("rejected"),
            detail=dict(d.get("detail", {})),
        )


@dataclass(frozen=True)
class EquivalenceSpec:
    """Tuning for the covariance equivalence tests.

    ``delta_rho`` is the practical-equivalence margin on the correlation
    scale; it is rescaled per pair by the two sample standard deviations.
    ``bootstrap_reps`` controls the row-bootstrap standard error.
    """

    delta_rho: float = 0.05
    bootstrap_reps: int = 200

    def __post_init__(self):
        if not 0.0 < self.delta_rho < 1.0:
            raise ValueError("delta_rho must be in (0, 1)")
        if self.bootstrap_reps < 2:
            raise ValueError("bootstrap_reps must be at least 2")


@dataclass
class HypothesisFamily:
    records: list[HypothesisRecord]
    iteration: int = 0
    q_level: float = 0.05

    def __post_init__(self):
        ids = [r.id for r in self.records]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate record ids in family")

    def __len__(self) -> int:
        return len(self.records)

    def by_id(self, record_id: str) -> HypothesisRecord:
        for r in self.records:
            if r.id == record_id:
                return r
        raise KeyError(record_id)

    @property
    def intersection(self) -> HypothesisRecord:
        return self.by_id(INTERSECTION_ID)

    @property
    def testable(self) -> list[HypothesisRecord]:
        """All records except the intersection."""
        return [r for r in self.records if r.kind is not HypothesisKind.INTERSECTION]

    def to_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "q_level": self.q_level,
            "records": [r.to_dict() for r in self.records],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HypothesisFamily":
        return cls(
            records=[HypothesisRecord.from_dict(r) for r in d["records"]],
            iteration=d.get("iteration", 0),
            q_level=d.get("q_level", 0.05),
        )


def _tost_pvalue(gap: float, margin: float, se: float) -> float:
    """Two one-sided tests for |gap| < margin; small p favors equivalence."""
    if se == 0.0:
        return 0.0 if abs(gap) < margin else 1.0
    p_below = stats.norm.cdf((gap - margin) / se)
    p_above = stats.norm.sf((gap + margin) / se)
    return float(max(p_below, p_above))


def equivalence_test(
    pair: tuple[str, str],
    fit: ScmFit,
    data,
    spec: EquivalenceSpec = EquivalenceSpec(),
    graph: CausalGraph | None = None,
    seed: int = 0,
    kernel: CovGapBootstrap | None = None,
) -> dict:
    """Test whether the induced covariance of a pair matches the sample.

    The margin is ``delta_rho * sd(x) * sd(y)`` with sample standard
    deviations, turning the correlation-scale tolerance into covariance
    units. The gap's standard error comes from a row bootstrap that
    refits the whole model per replicate. Returns a dict with the gap,
    margin, standard error and the two-one-sided-tests p-value, where a
    small p-value supports practical equivalence.
    """
    data = as_dataset(data)
    x, y = pair
    if kernel is None:
        if graph is None:
            raise ValueError("equivalence_test needs a graph or a prebuilt kernel")
        kernel = CovGapBootstrap(graph, data)
    induced = fit.induced.pair_cov(x, y)
    sample_cov = np.cov(data.column(x), data.column(y), ddof=1)
    gap = float(induced - sample_cov[0, 1])
    margin = spec.delta_rho * float(np.sqrt(sample_cov[0, 0] * sample_cov[1, 1]))
    rng = make_rng(derive_substream(seed, f"cov-eq:{x},{y}"))
    se = kernel.pair_se(x, y, spec.bootstrap_reps, rng)
    return {
        "gap": gap,
        "margin": margin,
        "se": se,
        "raw_p": _tost_pvalue(gap, margin, se),
    }


def build_family(
    graph: CausalGraph,
    fit: ScmFit,
    data,
    spec: EquivalenceSpec = EquivalenceSpec(),
    q: float = 0.05,
    seed: int = 0,
    iteration: int = 0,
) -> HypothesisFamily:
    """Assemble the full hypothesis family for one fitted iteration.

    Record order: coefficients (intercept first, then slopes per
    endogenous node in topological order), residual normality checks,
    covariance equivalences over all node pairs in dataset column order
    (variances included), the model-fit record, then the intersection.
    Zero-variance nodes are left out of the equivalence block with a
    warning. Given the same inputs and seed the family is identical
    down to the last bit.
    """
    data = as_dataset(data)
    if fit.graph_version != graph.version:
        raise ValueError(
            f"fit is for graph version {fit.graph_version}, got {graph.version}"
        )
    records: list[HypothesisRecord] = []

    for child in graph.topological_order():
        if not graph.is_endogenous(child):
            continue
        eq = fit.equations[child]
        records.append(
            HypothesisRecord(
                id=f"coef:{child}<-(intercept)",
                kind=HypothesisKind.COEFFICIENT,
                raw_p=eq.intercept.p_value,
                cost=1.0,
                detail={
                    "estimate": eq.intercept.estimate,
                    "std_error": eq.intercept.std_error,
                },
            )
        )
        for parent in graph.parents(child):
            stat = eq.coefficients[parent]
            records.append(
                HypothesisRecord(
                    id=f"coef:{child}<-{parent}",
                    kind=HypothesisKind.COEFFICIENT,
                    raw_p=stat.p_value,
                    cost=belief_to_cost(graph.edge(parent, child).belief),
                    detail={"estimate": stat.estimate, "std_error": stat.std_error},
                )
            )

    for child in graph.topological_order():
        if not graph.is_endogenous(child):
            continue
        gof = residual_normality_test(fit.equations[child])
        if gof.skipped:
            continue
        records.append(
            HypothesisRecord(
                id=f"resid-norm:{child}",
                kind=HypothesisKind.RESIDUAL_NORMALITY,
                raw_p=gof.p_value,
                cost=1.0,
                detail={"statistic": gof.statistic, "df": gof.df},
            )
        )

    in_graph = [name for name in data.names if name in graph.nodes]
    usable = []
    degenerate = []
    for name in in_graph:
        if data.column(name).std() == 0.0:
            degenerate.append(name)
        else:
            usable.append(name)
    if degenerate:
        warnings.warn(
            f"zero-variance nodes left out of equivalence records: {degenerate}",
            DegenerateColumnWarning,
            stacklevel=2,
        )
    kernel = CovGapBootstrap(graph, data)
    for i, x in enumerate(usable):
        for y in usable[i:]:
            result = equivalence_test(
                (x, y), fit, data, spec=spec, seed=seed, kernel=kernel
            )
            records.append(
                HypothesisRecord(
                    id=f"cov-eq:{x},{y}",
                    kind=HypothesisKind.COV_EQUIVALENCE,
                    raw_p=result["raw_p"],
                    cost=1.0,
                    detail={
                        "gap": result["gap"],
                        "margin": result["margin"],
                        "se": result["se"],
                    },
                )
            )

    fit_stat = model_fit_statistic(fit, data)
    records.append(
        HypothesisRecord(
            id=MODEL_FIT_ID,
            kind=HypothesisKind.MODEL_FIT,
            raw_p=fit_stat.p_value,
            cost=1.0,
            detail={"statistic": fit_stat.statistic, "df": fit_stat.df},
        )
    )

    records.append(
        HypothesisRecord(
            id=INTERSECTION_ID,
            kind=HypothesisKind.INTERSECTION,
            raw_p=None,
            cost=1.0,
        )
    )
    return HypothesisFamily(records=records, iteration=iteration, q_level=q)
