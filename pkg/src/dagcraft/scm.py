"""Linear SCM fitting: per-node least squares, induced moments, diagnostics.

Each endogenous node is regressed on its graph parents with an
intercept. The fitted slopes, residual variances, and exogenous sample
moments together imply a mean vector and covariance matrix for the whole
system; comparing those induced moments against the observed ones is the
faithfulness feedback at the heart of the co-design loop.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as sla
from scipy import stats
from sklearn.base import BaseEstimator

from .datasets import Dataset, MomentSummary
from .errors import SingularDesignError, SingularSampleCovError
from .graph import CausalGraph
from .validation import as_dataset, check_graph_data

NORMALITY_MIN_ROWS = 100
NORMALITY_BINS = 20


@dataclass(frozen=True)
class CoefficientStat:
    estimate: float
    std_error: float
    p_value: float


@dataclass(frozen=True)
class EquationFit:
    """One regression equation: child on its graph parents plus intercept."""

    child: str
    intercept: CoefficientStat
    coefficients: dict[str, CoefficientStat]
    residual_variance: float
    residuals: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class ScmFit:
    """A fitted linear SCM: equations, exogenous moments, induced moments."""

    graph_version: int
    equations: dict[str, EquationFit]
    exogenous_moments: dict[str, tuple[float, float]]  # node -> (mean, variance)
    induced: MomentSummary
    n: int

    def to_dict(self) -> dict:
        eqs = {}
        for child in sorted(self.equations):
            eq = self.equations[child]
            eqs[child] = {
                "intercept": {
                    "estimate": eq.intercept.estimate,
                    "std_error": eq.intercept.std_error,
                    "p_value": eq.intercept.p_value,
                },
                "coefficients": {
                    parent: {
                        "estimate": c.estimate,
                        "std_error": c.std_error,
                        "p_value": c.p_value,
                    }
                    for parent, c in sorted(eq.coefficients.items())
                },
                "residual_variance": eq.residual_variance,
            }
        return {
            "graph_version": self.graph_version,
            "n": self.n,
            "equations": eqs,
            "exogenous": {
                node: {"mean": m, "variance": v}
                for node, (m, v) in sorted(self.exogenous_moments.items())
            },
            "induced": {
                "names": list(self.induced.names),
                "mean": self.induced.mean.tolist(),
                "cov": self.induced.cov.tolist(),
                "corr": self.induced.corr.tolist(),
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScmFit":
        """Rebuild a fit from its serialized form.

        Residual vectors are not persisted, so reloaded equations carry
        empty residual arrays; anything needing raw residuals must be
        recomputed from data.
        """
        equations = {}
        for child, eq in d["equations"].items():
            equations[child] = EquationFit(
                child=child,
                intercept=CoefficientStat(**eq["intercept"]),
                coefficients={
                    parent: CoefficientStat(**c)
                    for parent, c in eq["coefficients"].items()
                },
                residual_variance=eq["residual_variance"],
                residuals=np.empty(0),
            )
        ind = d["induced"]
        induced = MomentSummary(
            names=tuple(ind["names"]),
            mean=np.asarray(ind["mean"], dtype=float),
            cov=np.asarray(ind["cov"], dtype=float),
            corr=np.asarray(ind["corr"], dtype=float),
        )
        return cls(
            graph_version=d["graph_version"],
            equations=equations,
            exogenous_moments={
                node: (v["mean"], v["variance"])
                for node, v in d["exogenous"].items()
            },
            induced=induced,
            n=d["n"],
        )


@dataclass(frozen=True)
class FitStatistic:
    statistic: float
    df: int
    p_value: float


@dataclass(frozen=True)
class GofResult:
    """Chi-square goodness-of-fit outcome; ``skipped`` marks small samples."""

    statistic: float | None
    df: int
    p_value: float | None
    skipped: bool = False


def _ols(y: np.ndarray, X: np.ndarray, child: str):
    """Least squares with classical inference; X includes the intercept column."""
    n, k = X.shape
    beta, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < k:
        raise SingularDesignError(child)
    fitted = X @ beta
    resid = y - fitted
    dof = n - k
    rss = float(resid @ resid)
    sigma2 = rss / dof
    xtx_inv = np.linalg.inv(X.T @ X)
    se = np.sqrt(sigma2 * np.diag(xtx_inv))
    with np.errstate(divide="ignore", invalid="ignore"):
        tvals = beta / se
    pvals = 2.0 * stats.t.sf(np.abs(tvals), dof)
    return beta, se, pvals, resid, sigma2


def fit_scm(graph: CausalGraph, data) -> ScmFit:
    """Fit one OLS equation per endogenous node and derive induced moments.

    Coefficient p-values are two-sided t-tests with n-k-1 degrees of
    freedom, matching the "coefficients are not zero" hypothesis family.
    A rank-deficient parent design aborts with SingularDesignError naming
    the child: collinearity is a conversation point, not a nuisance to
    be papered over by dropping a column.
    """
    data = as_dataset(data)
    check_graph_data(graph, data)
    equations: dict[str, EquationFit] = {}
    for child in graph.endogenous:
        parents = graph.parents(child)
        y = data.column(child)
        X = np.column_stack([np.ones(data.n), data.matrix(parents)])
        beta, se, pvals, resid, sigma2 = _ols(y, X, child)
        equations[child] = EquationFit(
            child=child,
            intercept=CoefficientStat(float(beta[0]), float(se[0]), float(pvals[0])),
            coefficients={
                parent: CoefficientStat(float(beta[i + 1]), float(se[i + 1]), float(pvals[i + 1]))
                for i, parent in enumerate(parents)
            },
            residual_variance=float(sigma2),
            residuals=resid,
        )
    exogenous = {
        node: (float(np.mean(data.column(node))), float(np.var(data.column(node), ddof=1)))
        for node in graph.exogenous
    }
    induced = _induced_summary(graph, equations, exogenous)
    return ScmFit(
        graph_version=graph.version,
        equations=equations,
        exogenous_moments=exogenous,
        induced=induced,
        n=data.n,
    )


def _induced_summary(graph, equations, exogenous) -> MomentSummary:
    order = graph.topological_order()
    slopes = {
        child: {p: c.estimate for p, c in eq.coefficients.items()}
        for child, eq in equations.items()
    }
    intercepts = {child: eq.intercept.estimate for child, eq in equations.items()}
    resid_var = {child: eq.residual_variance for child, eq in equations.items()}
    mean, cov = induced_mean_cov(order, slopes, intercepts, resid_var, exogenous)
    sd = np.sqrt(np.diag(cov))
    with np.errstate(divide="ignore", invalid="ignore"):
        corr = cov / np.outer(sd, sd)
    np.fill_diagonal(corr, 1.0)
    return MomentSummary(tuple(order), mean, cov, corr)


def induced_mean_cov(order, slopes, intercepts, resid_var, exogenous):
    """Model-implied mean and covariance from fitted parameters.

    With nodes in topological order, B holds the slope of parent j on
    child i below the diagonal, Psi the residual (or exogenous sample)
    variances, and nu the intercepts (or exogenous sample means). The
    unit-triangular system (I - B) then gives

        mean = (I - B)^-1 nu      cov = (I - B)^-1 Psi (I - B)^-T

    which is the standard path-algebra result for linear SCMs with
    mutually independent noise terms.
    """
    p = len(order)
    pos = {name: i for i, name in enumerate(order)}
    B = np.zeros((p, p))
    psi = np.empty(p)
    nu = np.empty(p)
    for name, i in pos.items():
        if name in slopes:
            for parent, slope in slopes[name].items():
                B[i, pos[parent]] = slope
            psi[i] = resid_var[name]
            nu[i] = intercepts[name]
        else:
            m, v = exogenous[name]
            psi[i] = v
            nu[i] = m
    imb = np.eye(p) - B
    # unit lower triangular in topological order, so always invertible
    A = sla.solve_triangular(imb, np.eye(p), lower=True, unit_diagonal=True)
    cov = (A * psi) @ A.T
    cov = (cov + cov.T) / 2.0
    mean = A @ nu
    return mean, cov


def induced_moments(fit: ScmFit, graph: CausalGraph) -> MomentSummary:
    """Recompute the model-implied moment summary for a fit/graph pair."""
    if fit.graph_version != graph.version:
        raise ValueError(
            f"fit is for graph version {fit.graph_version}, got {graph.version}"
        )
    return _induced_summary(graph, fit.equations, fit.exogenous_moments)


def model_fit_statistic(fit: ScmFit, data) -> FitStatistic:
    """Likelihood-ratio discrepancy between induced and sample covariance.

    T = (n-1) * (ln det(Sigma) + tr(S Sigma^-1) - ln det(S) - p) with the
    chi-square reference on p(p+1)/2 minus the free parameter count
    (slopes plus one variance per node; means are saturated). A model
    with df <= 0 fits perfectly by construction and reports p = 1.
    """
    data = as_dataset(data)
    order = list(fit.induced.names)
    sample = np.cov(data.matrix(order), rowvar=False, ddof=1)
    sample = np.atleast_2d(sample)
    p = len(order)
    n_slopes = sum(len(eq.coefficients) for eq in fit.equations.values())
    df = p * (p + 1) // 2 - (n_slopes + p)
    if df <= 0:
        return FitStatistic(0.0, max(df, 0), 1.0)
    sign_s, logdet_s = np.linalg.slogdet(sample)
    if sign_s <= 0:
        raise SingularSampleCovError("sample covariance is singular")
    sigma = fit.induced.cov
    sign_m, logdet_m = np.linalg.slogdet(sigma)
    if sign_m <= 0:
        raise SingularSampleCovError("induced covariance is singular")
    trace_term = float(np.trace(np.linalg.solve(sigma, sample)))
    statistic = (fit.n - 1) * (logdet_m + trace_term - logdet_s - p)
    statistic = max(float(statistic), 0.0)
    return FitStatistic(statistic, df, float(stats.chi2.sf(statistic, df)))


def residual_normality_test(eq: EquationFit) -> GofResult:
    """Pearson chi-square test of residuals against N(0, residual_variance).

    Uses 20 equal-probability bins; df = bins - 1 - 2 for the two moments
    estimated from the same data. Below 100 rows the binned counts are
    too sparse to be meaningful, so the test is skipped and the record
    is excluded from the hypothesis family.
    """
    resid = eq.residuals
    n = len(resid)
    if n < NORMALITY_MIN_ROWS:
        return GofResult(None, 0, None, skipped=True)
    k = NORMALITY_BINS
    sd = np.sqrt(eq.residual_variance)
    inner = stats.norm.ppf(np.arange(1, k) / k, loc=0.0, scale=sd)
    edges = np.concatenate([[-np.inf], inner, [np.inf]])
    observed, _ = np.histogram(resid, bins=edges)
    expected = n / k
    statistic = float(np.sum((observed - expected) ** 2) / expected)
    df = k - 3
    return GofResult(statistic, df, float(stats.chi2.sf(statistic, df)), skipped=False)


class ScmModel(BaseEstimator):
    """Scikit-learn style estimator wrapping the per-node least-squares fit.

    Parameters
    ----------
    graph : CausalGraph
        The causal structure to fit. Every node must be a column of the
        data passed to :meth:`fit`.

    Attributes (after fit)
    ----------------------
    result_ : ScmFit
        Full fit payload: equations, exogenous moments, induced moments.
    equations_ : dict[str, EquationFit]
    induced_ : MomentSummary
    n_ : int
    """

    def __init__(self, graph: CausalGraph = None):
        self.graph = graph

    def fit(self, X, y=None):
        if self.graph is None:
            raise ValueError("ScmModel requires a graph")
        self.result_ = fit_scm(self.graph, X)
        self.equations_ = self.result_.equations
        self.induced_ = self.result_.induced
        self.n_ = self.result_.n
        return self

    def fit_statistic(self, X) -> FitStatistic:
        self._check_fitted()
        return model_fit_statistic(self.result_, X)

    def score(self, X, y=None) -> float:
        """Mean Gaussian log-likelihood of rows under the induced moments."""
        self._check_fitted()
        data = as_dataset(X)
        order = list(self.induced_.names)
        values = data.matrix(order)
        return float(
            np.mean(
                stats.multivariate_normal.logpdf(
                    values, mean=self.induced_.mean, cov=self.induced_.cov
                )
            )
        )

    def _check_fitted(self):
        if not hasattr(self, "result_"):
            raise RuntimeError("ScmModel is not fitted yet; call fit(X) first")
