"""Multiplicity adjustment: BH, BY, weighted BH, combiners, and FDCR.

All step-up procedures share the same sorting discipline: entries are
ordered by (p, id) so ties resolve identically everywhere, and adjusted
values are running minima taken from the largest p downward, capped at
one. The unweighted and weighted code paths compute thresholds with the
same expression shape, so on equal weights they agree bit for bit, not
just to rounding.

The false discovery cost rate (FDCR) procedure augments a family with
an intersection record whose p-value combines every member claim, then
runs weighted BH over all of them at once. Rejecting the intersection
reads as "something in this family is off"; its cost prices how much
that global alarm is worth relative to the member claims.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import MissingRawPError, OutOfRangeError
from .rng import make_rng
from .validation import check_probability

WEIGHTED_SIMES = "weighted-simes"
FISHER = "fisher"
INTERSECTION_METHODS = (WEIGHTED_SIMES, FISHER)


@dataclass(frozen=True)
class PValueEntry:
    """One raw p-value with an identifier and a positive weight."""

    id: str
    p: float
    weight: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise OutOfRangeError(f"p-value {self.p} outside [0, 1] for {self.id!r}")
        if not self.weight > 0.0:
            raise OutOfRangeError(f"weight must be positive, got {self.weight}")


@dataclass(frozen=True)
class AdjustmentResult:
    """Adjusted p-values and the rejection set at level q.

    ``adjusted`` maps entry id to its multiplicity-adjusted p-value;
    ``rejected`` is exactly the ids with adjusted value <= q.
    ``intersection_p`` is only set by the FDCR procedure.
    """

    method: str
    q: float
    adjusted: dict[str, float]
    rejected: frozenset[str]
    intersection_p: float | None = None


def _sorted_arrays(entries):
    ordered = sorted(entries, key=lambda e: (e.p, e.id))
    ids = [e.id for e in ordered]
    p = np.array([e.p for e in ordered])
    w = np.array([e.weight for e in ordered])
    return ids, p, w


def _step_up(ids, terms, q, method):
    adjusted_sorted = np.minimum(np.minimum.accumulate(terms[::-1])[::-1], 1.0)
    adjusted = {i: float(a) for i, a in zip(ids, adjusted_sorted)}
    rejected = frozenset(i for i, a in adjusted.items() if a <= q)
    return AdjustmentResult(method=method, q=q, adjusted=adjusted, rejected=rejected)


def bh_adjust(entries, q: float = 0.05) -> AdjustmentResult:
    """Benjamini-Hochberg step-up adjustment; weights are ignored."""
    check_probability(q, "q")
    ids, p, _ = _sorted_arrays(entries)
    if not ids:
        return AdjustmentResult("bh", q, {}, frozenset())
    m = len(ids)
    ranks = np.cumsum(np.ones(m))
    terms = (p * ranks[-1]) / ranks
    return _step_up(ids, terms, q, "bh")


def by_adjust(entries, q: float = 0.05) -> AdjustmentResult:
    """Benjamini-Yekutieli adjustment, valid under arbitrary dependence.

    Identical to BH but inflated by c(m) = sum_{i<=m} 1/i, so for a
    single entry the two coincide exactly.
    """
    check_probability(q, "q")
    ids, p, _ = _sorted_arrays(entries)
    if not ids:
        return AdjustmentResult("by", q, {}, frozenset())
    m = len(ids)
    ranks = np.cumsum(np.ones(m))
    c_m = float(np.sum(1.0 / ranks))
    terms = (p * ranks[-1]) / ranks * c_m
    return _step_up(ids, terms, q, "by")


def wbh_adjust(entries, q: float = 0.05) -> AdjustmentResult:
    """Weighted BH step-up, with per-entry costs as weights.

    Thresholds compare p_(j) against q * W_j / W where W_j accumulates
    the costs in p-order. With all weights equal to one the cumulative
    sums hit exact integers, reproducing plain BH down to the last bit.
    Rescaling every weight by a common factor leaves the result alone.
    """
    check_probability(q, "q")
    ids, p, w = _sorted_arrays(entries)
    if not ids:
        return AdjustmentResult("wbh", q, {}, frozenset())
    cum_w = np.cumsum(w)
    terms = (p * cum_w[-1]) / cum_w
    return _step_up(ids, terms, q, "wbh")


def weighted_simes(entries) -> float:
    """Weighted Simes combination of the entries into one p-value.

    With entries sorted by p, returns min_j (C / C_j) * p_(j) where C_j
    accumulates the costs in that order, capped at one. Equal costs
    recover the classic Simes statistic.
    """
    ids, p, w = _sorted_arrays(entries)
    if not ids:
        raise ValueError("weighted_simes needs at least one entry")
    cum_w = np.cumsum(w)
    return float(min(np.min((p * cum_w[-1]) / cum_w), 1.0))


def fisher_combine(entries) -> float:
    """Fisher's combination: -2 sum(ln p) against chi-square with 2m df.

    Exact zeros would push the statistic to infinity, so they are floored
    at the smallest positive float with a warning. Weights are ignored;
    independence of the entries is assumed.
    """
    ids, p, _ = _sorted_arrays(entries)
    if not ids:
        raise ValueError("fisher_combine needs at least one entry")
    if np.any(p == 0.0):
        warnings.warn(
            "zero p-values floored at the smallest positive float before "
            "Fisher combination",
            UserWarning,
            stacklevel=2,
        )
        p = np.maximum(p, np.finfo(float).tiny)
    statistic = -2.0 * float(np.sum(np.log(p)))
    return float(stats.chi2.sf(statistic, 2 * len(ids)))


def fdcr_adjust(
    family, q: float | None = None, intersection_method: str = WEIGHTED_SIMES
) -> AdjustmentResult:
    """FDCR pass over a hypothesis family, writing results back into it.

    Combines the member p-values into the intersection record (weighted
    Simes by default, Fisher as the independence-only alternative), then
    runs weighted BH over members plus intersection with the record
    costs as weights. Each record's ``adjusted_p`` and ``rejected`` are
    filled in place and the intersection's combined p-value is reported
    on the result.
    """
    if intersection_method not in INTERSECTION_METHODS:
        raise ValueError(f"unknown intersection method {intersection_method!r}")
    if q is None:
        q = family.q_level
    check_probability(q, "q")
    members = family.testable
    missing = [r.id for r in members if r.raw_p is None]
    if missing:
        raise MissingRawPError(f"records without raw p-values: {missing}")
    member_entries = [PValueEntry(r.id, r.raw_p, r.cost) for r in members]
    if intersection_method == WEIGHTED_SIMES:
        p0 = weighted_simes(member_entries)
    else:
        p0 = fisher_combine(member_entries)
    intersection = family.intersection
    intersection.raw_p = p0
    entries = member_entries + [PValueEntry(intersection.id, p0, intersection.cost)]
    result = wbh_adjust(entries, q)
    for record in family.records:
        record.adjusted_p = result.adjusted[record.id]
        record.rejected = record.id in result.rejected
    return AdjustmentResult(
        method="fdcr",
        q=q,
        adjusted=result.adjusted,
        rejected=result.rejected,
        intersection_p=p0,
    )


@dataclass(frozen=True)
class SimulationConfig:
    """Monte Carlo layout for error-rate estimation.

    ``m`` hypotheses, the first ``m0`` truly null with uniform p-values;
    the rest draw one-sided normal p-values shifted by ``effect`` (a
    scalar or one value per false null). ``costs`` defaults to all ones;
    ``c0`` prices the intersection claim.
    """

    m: int
    m0: int
    reps: int = 2000
    effect: float | np.ndarray = 3.0
    costs: np.ndarray | None = None
    c0: float = 1.0
    q: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be positive")
        if not 0 <= self.m0 <= self.m:
            raise ValueError("m0 must lie in [0, m]")
        if self.reps < 1:
            raise ValueError("reps must be positive")


@dataclass(frozen=True)
class ErrorRateEstimates:
    """Monte Carlo estimates with their standard errors.

    ``fdr`` is E[V/R] with 0/0 read as 0, ``wfdr`` the cost-weighted
    version, ``fdcr`` additionally counts the intersection claim,
    ``strong_fwe`` is P(V > 0) and ``weak_fwe`` the chance of rejecting
    the global null when it holds.
    """

    fdr: float
    wfdr: float
    fdcr: float
    strong_fwe: float
    weak_fwe: float
    fdr_se: float
    wfdr_se: float
    fdcr_se: float
    strong_fwe_se: float
    weak_fwe_se: float


def _rowwise_step_up(p, weights, q):
    """Rejection mask for weighted BH applied independently to each row."""
    reps, m = p.shape
    order = np.argsort(p, axis=1, kind="stable")
    p_sorted = np.take_along_axis(p, order, axis=1)
    w_sorted = weights[order] if weights.ndim == 1 else np.take_along_axis(weights, order, axis=1)
    cum_w = np.cumsum(w_sorted, axis=1)
    total = cum_w[:, -1:]
    with np.errstate(divide="ignore", invalid="ignore"):
        ok = p_sorted * total <= q * cum_w
    any_ok = ok.any(axis=1)
    last = m - 1 - np.argmax(ok[:, ::-1], axis=1)
    cutoff = np.where(any_ok, p_sorted[np.arange(reps), last], -1.0)
    return p <= cutoff[:, None]


def _rowwise_weighted_simes(p, weights):
    order = np.argsort(p, axis=1, kind="stable")
    p_sorted = np.take_along_axis(p, order, axis=1)
    w_sorted = weights[order]
    cum_w = np.cumsum(w_sorted, axis=1)
    return np.minimum((p_sorted * cum_w[:, -1:] / cum_w).min(axis=1), 1.0)


def simulate_error_rates(procedure: str, config: SimulationConfig) -> ErrorRateEstimates:
    """Estimate FDR, WFDR, FDCR and both FWE flavors for a procedure.

    ``procedure`` is one of "bh", "by", "wbh", "fdcr". Rejections among
    the m member hypotheses feed V and R; the intersection claim, when
    the procedure tests one, feeds the V0/R0 terms of the FDCR and the
    weak FWE. Procedures without an explicit intersection test are
    scored as if rejecting anything rejects the intersection. Counts of
    member rejections never include the intersection itself.
    """
    if procedure not in ("bh", "by", "wbh", "fdcr"):
        raise ValueError(f"unknown procedure {procedure!r}")
    m, m0, reps = config.m, config.m0, config.reps
    rng = make_rng(config.seed)
    costs = np.ones(m) if config.costs is None else np.asarray(config.costs, dtype=float)
    if costs.shape != (m,):
        raise ValueError("costs must have one entry per hypothesis")

    p = np.empty((reps, m))
    p[:, :m0] = rng.uniform(size=(reps, m0))
    if m0 < m:
        effect = np.broadcast_to(np.asarray(config.effect, dtype=float), (m - m0,))
        z = rng.normal(loc=effect, scale=1.0, size=(reps, m - m0))
        p[:, m0:] = stats.norm.sf(z)

    q = config.q
    if procedure == "bh":
        mask = _rowwise_step_up(p, np.ones(m), q)
        inter_rejected = mask.any(axis=1)
    elif procedure == "by":
        c_m = float(np.sum(1.0 / np.arange(1, m + 1)))
        mask = _rowwise_step_up(p, np.ones(m), q / c_m)
        inter_rejected = mask.any(axis=1)
    elif procedure == "wbh":
        mask = _rowwise_step_up(p, costs, q)
        inter_rejected = mask.any(axis=1)
    else:
        p0 = _rowwise_weighted_simes(p, costs)
        p_full = np.column_stack([p, p0])
        costs_full = np.append(costs, config.c0)
        full_mask = _rowwise_step_up(p_full, costs_full, q)
        mask = full_mask[:, :m]
        inter_rejected = full_mask[:, m]

    V = mask[:, :m0].sum(axis=1)
    R = mask.sum(axis=1)
    CV = (mask[:, :m0] * costs[:m0]).sum(axis=1)
    CR = (mask * costs).sum(axis=1)
    global_null = m0 == m
    R0 = inter_rejected.astype(float)
    V0 = R0 if global_null else np.zeros(reps)

    with np.errstate(invalid="ignore"):
        fdp = np.where(R > 0, V / np.maximum(R, 1), 0.0)
        wfdp = np.where(CR > 0, CV / np.maximum(CR, 1e-300), 0.0)
        num = config.c0 * V0 + CV
        den = config.c0 * R0 + CR
        fdcp = np.where(den > 0, num / np.maximum(den, 1e-300), 0.0)
    strong = (V > 0).astype(float)

    def mean_se(x):
        if reps < 2:
            return float(np.mean(x)), float("nan")
        return float(np.mean(x)), float(np.std(x, ddof=1) / np.sqrt(reps))

    fdr, fdr_se = mean_se(fdp)
    wfdr, wfdr_se = mean_se(wfdp)
    fdcr, fdcr_se = mean_se(fdcp)
    sfwe, sfwe_se = mean_se(strong)
    wfwe, wfwe_se = mean_se(V0)
    return ErrorRateEstimates(
        fdr=fdr,
        wfdr=wfdr,
        fdcr=fdcr,
        strong_fwe=sfwe,
        weak_fwe=wfwe,
        fdr_se=fdr_se,
        wfdr_se=wfdr_se,
        fdcr_se=fdcr_se,
        strong_fwe_se=sfwe_se,
        weak_fwe_se=wfwe_se,
    )
