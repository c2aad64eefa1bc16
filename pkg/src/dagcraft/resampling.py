"""Permutation and bootstrap machinery for p-values and standard errors.

Two resampling devices live here. The screening path permutes one column
of a pair to build the no-co-dependence null for Pearson R^2. The
bootstrap path resamples whole rows (keeping the empirical joint
distribution intact), refits the SCM per replicate through a
cross-moment fast path, and reports how the induced-minus-observed
covariance gap varies. A nested variant backs the generalized
"parent contributes nothing" test.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

from .datasets import Dataset
from .errors import DegenerateColumnWarning, SmallResampleWarning
from .graph import CausalGraph
from .rng import derive_substream, make_rng
from .scm import induced_mean_cov
from .validation import as_dataset, check_graph_data

ROW_BOOTSTRAP = "row-bootstrap"
PERMUTATION = "permutation"

_CHUNK = 256


@dataclass(frozen=True)
class ResamplingPlan:
    """How many replicates to draw, from which master seed.

    ``reps_inner`` only matters to the nested parent-contribution path;
    0 disables nesting. Fewer than 100 outer reps makes resampled
    p-values too coarse, so that configuration warns.
    """

    reps_outer: int = 999
    reps_inner: int = 0
    master_seed: int = 0
    scheme: str = PERMUTATION

    def __post_init__(self):
        if self.reps_outer < 1:
            raise ValueError("reps_outer must be positive")
        if self.reps_inner < 0:
            raise ValueError("reps_inner must be >= 0")
        if self.scheme not in (ROW_BOOTSTRAP, PERMUTATION):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.reps_outer < 100:
            warnings.warn(
                f"reps_outer={self.reps_outer} is below 100; resampled "
                "p-values will be unstable",
                SmallResampleWarning,
                stacklevel=2,
            )


def pairwise_r2_pvalues(data, plan: ResamplingPlan) -> dict[tuple[str, str], float]:
    """Permutation p-values for Pearson R^2 over all column pairs.

    For each pair in the upper triangle (no diagonal) the second column
    is permuted, breaking the pair's dependence while preserving both
    marginals, and R^2 is recomputed per replicate. The add-one estimator
    (1 + #{R2* >= R2_obs}) / (reps + 1) keeps p-values off 0; the count
    is capped one below the replicate total to keep them off 1 as well.

    Zero-variance columns are skipped with a warning. Each pair draws
    from its own substream, so results do not depend on pair order.
    """
    data = as_dataset(data)
    reps = plan.reps_outer
    z = {}
    degenerate = []
    for name in data.names:
        col = data.column(name)
        sd = col.std()
        if sd == 0.0:
            degenerate.append(name)
            continue
        z[name] = (col - col.mean()) / sd
    if degenerate:
        warnings.warn(
            f"zero-variance columns skipped in screening: {degenerate}",
            DegenerateColumnWarning,
            stacklevel=2,
        )
    n = data.n
    out = {}
    for i, x in enumerate(data.names):
        for y in data.names[i + 1 :]:
            if x not in z or y not in z:
                continue
            rng = make_rng(derive_substream(plan.master_seed, f"pair:{x},{y}"))
            zx, zy = z[x], z[y]
            r2_obs = float(zx @ zy / n) ** 2
            count = 0
            base = np.tile(np.arange(n), (_CHUNK, 1))
            done = 0
            while done < reps:
                c = min(_CHUNK, reps - done)
                idx = rng.permuted(base[:c], axis=1)
                r2_perm = (zy[idx] @ zx / n) ** 2
                count += int(np.sum(r2_perm >= r2_obs))
                done += c
            count = min(count, reps - 1)
            out[(x, y)] = (1 + count) / (reps + 1)
    return out


class CovGapBootstrap:
    """Row bootstrap of the induced-minus-sample covariance gap.

    Refitting the SCM on a resample only needs the cross-moment matrix
    Z'WZ (Z the data with an intercept column, W the resample row
    counts), so replicates are fitted from sufficient statistics instead
    of row-level regressions. The per-row products are precomputed once;
    memory is n * (p+1)^2 doubles, fine for workbench-scale inputs.
    """

    def __init__(self, graph: CausalGraph, data):
        data = as_dataset(data)
        check_graph_data(graph, data)
        self.order = graph.topological_order()
        self.n = data.n
        p = len(self.order)
        self.p = p
        values = data.matrix(self.order)
        self.z = np.column_stack([np.ones(self.n), values])
        d = p + 1
        self.d = d
        self.zz_rows = (self.z[:, :, None] * self.z[:, None, :]).reshape(self.n, d * d)
        pos = {name: i for i, name in enumerate(self.order)}
        self.pos = pos
        self.parents = {c: graph.parents(c) for c in graph.endogenous}
        self.exogenous = list(graph.exogenous)

    def pair_gaps(self, x: str, y: str, reps: int, rng: np.random.Generator) -> np.ndarray:
        """Per-replicate induced_cov(x, y) - sample_cov(x, y)."""
        ix, iy = self.pos[x], self.pos[y]
        gaps = np.empty(reps)
        done = 0
        while done < reps:
            c = min(_CHUNK, reps - done)
            induced, sample = self._refit_chunk(c, rng)
            gaps[done : done + c] = induced[:, ix, iy] - sample[:, ix, iy]
            done += c
        return gaps

    def pair_se(self, x: str, y: str, reps: int, rng: np.random.Generator) -> float:
        gaps = self.pair_gaps(x, y, reps, rng)
        return float(np.std(gaps, ddof=1))

    def _refit_chunk(self, c: int, rng: np.random.Generator):
        n, d, p = self.n, self.d, self.p
        idx = rng.integers(0, n, size=(c, n))
        counts = np.empty((c, n))
        for b in range(c):
            counts[b] = np.bincount(idx[b], minlength=n)
        M = (counts @ self.zz_rows).reshape(c, d, d)

        mean_all = M[:, 0, 1:] / n
        sample = (M[:, 1:, 1:] - n * mean_all[:, :, None] * mean_all[:, None, :]) / (n - 1)

        slopes = {}
        intercepts = {}
        resid_var = {}
        for child, parents in self.parents.items():
            cols = [0] + [1 + self.pos[q] for q in parents]
            ycol = 1 + self.pos[child]
            A = M[:, cols][:, :, cols]
            rhs = M[:, cols, ycol]
            beta = _solve_batched(A, rhs)
            rss = M[:, ycol, ycol] - np.einsum("bk,bk->b", beta, rhs)
            dof = n - len(cols)
            resid_var[child] = np.maximum(rss / dof, 0.0)
            intercepts[child] = beta[:, 0]
            slopes[child] = {q: beta[:, 1 + j] for j, q in enumerate(parents)}

        B = np.zeros((c, p, p))
        psi = np.empty((c, p))
        for child, parents in self.parents.items():
            i = self.pos[child]
            for q in parents:
                B[:, i, self.pos[q]] = slopes[child][q]
            psi[:, i] = resid_var[child]
        for node in self.exogenous:
            i = self.pos[node]
            psi[:, i] = (M[:, 1 + i, 1 + i] - n * mean_all[:, i] ** 2) / (n - 1)

        imb = np.eye(p)[None, :, :] - B
        A_inv = np.linalg.inv(imb)
        induced = np.einsum("bij,bj,bkj->bik", A_inv, psi, A_inv)
        return induced, sample


def _solve_batched(A, rhs):
    try:
        return np.linalg.solve(A, rhs[..., None])[..., 0]
    except np.linalg.LinAlgError:
        out = np.empty_like(rhs)
        for b in range(A.shape[0]):
            out[b] = np.linalg.lstsq(A[b], rhs[b], rcond=None)[0]
        return out


def parent_contribution_pvalues(
    data, graph: CausalGraph, child: str, plan: ResamplingPlan
) -> dict[str, np.ndarray]:
    """Nested-bootstrap p-values for "this parent contributes nothing".

    Inner loop: bootstrap the child's regression slopes and read off a
    sign-flip p-value per parent. Outer loop: bootstrap rows again and
    recompute that inner p-value, yielding a distribution of p-values
    per parent ready for FDR adjustment. With ``reps_inner = 0`` the
    nesting is disabled and a single inner p-value per parent is
    returned (array of length 1). This is the optional slow path behind
    the equivalence pipeline; it is not called during normal iterations.
    """
    data = as_dataset(data)
    parents = graph.parents(child)
    if not parents:
        return {}
    y = data.column(child)
    X = np.column_stack([np.ones(data.n), data.matrix(parents)])
    rng = make_rng(derive_substream(plan.master_seed, f"contrib:{child}"))
    if plan.reps_inner == 0:
        inner = _slope_sign_pvalues(y, X, plan.reps_outer, rng)
        return {parent: np.array([inner[j]]) for j, parent in enumerate(parents)}
    out = {parent: np.empty(plan.reps_outer) for parent in parents}
    n = data.n
    for b in range(plan.reps_outer):
        take = rng.integers(0, n, size=n)
        inner = _slope_sign_pvalues(y[take], X[take], plan.reps_inner, rng)
        for j, parent in enumerate(parents):
            out[parent][b] = inner[j]
    return out


def _slope_sign_pvalues(y, X, reps, rng):
    n, k = X.shape
    betas = np.empty((reps, k - 1))
    for b in range(reps):
        take = rng.integers(0, n, size=n)
        beta = np.linalg.lstsq(X[take], y[take], rcond=None)[0]
        betas[b] = beta[1:]
    nonneg = np.sum(betas >= 0.0, axis=0)
    nonpos = np.sum(betas <= 0.0, axis=0)
    one_sided = np.minimum(nonneg + 1, nonpos + 1) / (reps + 1)
    return np.minimum(2.0 * one_sided, 1.0)
