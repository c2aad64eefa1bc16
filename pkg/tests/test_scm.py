from __future__ import annotations

import numpy as np
import pytest
from sklearn.base import clone

from dagcraft import (
    CausalGraph,
    Dataset,
    Edge,
    InsufficientRowsError,
    ScmModel,
    SingularDesignError,
    fit_scm,
    generate_toy_dataset,
    induced_moments,
    model_fit_statistic,
    residual_normality_test,
)
from dagcraft.scm import induced_mean_cov

from conftest import forward_simulate, graph_from


class TestOlsAgainstNormalEquations:
    def test_sea_temperature_equation_matches_explicit_solution(self, toy_large, generating_graph):
        fit = fit_scm(generating_graph, toy_large)
        eq = fit.equations["Sea_Temperature"]

        X = np.column_stack([np.ones(toy_large.n), toy_large.column("Winter_Ind")])
        y = toy_large.column("Sea_Temperature")
        xtx_inv = np.linalg.inv(X.T @ X)
        beta = xtx_inv @ X.T @ y
        resid = y - X @ beta
        sigma2 = resid @ resid / (toy_large.n - 2)
        se = np.sqrt(sigma2 * np.diag(xtx_inv))

        assert eq.intercept.estimate == pytest.approx(beta[0], rel=1e-10)
        assert eq.coefficients["Winter_Ind"].estimate == pytest.approx(beta[1], rel=1e-10)
        assert eq.intercept.std_error == pytest.approx(se[0], rel=1e-8)
        assert eq.coefficients["Winter_Ind"].std_error == pytest.approx(se[1], rel=1e-8)
        assert eq.residual_variance == pytest.approx(sigma2, rel=1e-10)

    def test_two_parent_equation_matches_explicit_solution(self, toy_large, generating_graph):
        fit = fit_scm(generating_graph, toy_large)
        eq = fit.equations["Perceived_Noise"]
        X = np.column_stack(
            [
                np.ones(toy_large.n),
                toy_large.column("Rotational_RPM"),
                toy_large.column("Wind_Speed"),
            ]
        )
        y = toy_large.column("Perceived_Noise")
        beta = np.linalg.inv(X.T @ X) @ X.T @ y
        assert eq.coefficients["Rotational_RPM"].estimate == pytest.approx(beta[1], rel=1e-8)
        assert eq.coefficients["Wind_Speed"].estimate == pytest.approx(beta[2], rel=1e-8)


class TestSlopeRecovery:
    def test_generating_coefficients_recovered(self, toy_large, generating_graph):
        fit = fit_scm(generating_graph, toy_large)
        eq = fit.equations
        assert eq["Sea_Temperature"].coefficients["Winter_Ind"].estimate == pytest.approx(-10, abs=0.1)
        assert eq["Wind_Speed"].coefficients["Winter_Ind"].estimate == pytest.approx(20, abs=0.3)
        assert eq["Rotational_RPM"].coefficients["Wind_Speed"].estimate == pytest.approx(0.1, abs=0.005)
        assert eq["Energy_Yield"].coefficients["Rotational_RPM"].estimate == pytest.approx(2 / 3, abs=0.1)
        assert eq["Perceived_Noise"].coefficients["Wind_Speed"].estimate == pytest.approx(-0.25, abs=0.01)
        assert eq["Perceived_Noise"].coefficients["Rotational_RPM"].estimate == pytest.approx(2 / 3, abs=0.10)

    def test_strong_slopes_are_significant(self, toy_large, generating_graph):
        fit = fit_scm(generating_graph, toy_large)
        assert fit.equations["Sea_Temperature"].coefficients["Winter_Ind"].p_value < 1e-10
        assert fit.equations["Rotational_RPM"].coefficients["Wind_Speed"].p_value < 1e-10


class TestInducedMoments:
    def test_three_node_chain_against_hand_computation(self):
        # A exogenous (mean 2, var 4); B = 1 + 0.5 A + e(0.25); C = -3 + 2 B + e(1)
        mean, cov = induced_mean_cov(
            ["A", "B", "C"],
            slopes={"B": {"A": 0.5}, "C": {"B": 2.0}},
            intercepts={"B": 1.0, "C": -3.0},
            resid_var={"B": 0.25, "C": 1.0},
            exogenous={"A": (2.0, 4.0)},
        )
        assert mean == pytest.approx([2.0, 2.0, 1.0])
        expected = np.array(
            [
                [4.0, 2.0, 4.0],
                [2.0, 1.25, 2.5],
                [4.0, 2.5, 6.0],
            ]
        )
        assert np.allclose(cov, expected)

    def test_induced_mean_equals_sample_mean(self, toy_large, generating_graph):
        # OLS residuals sum to zero, so fitted means chain up exactly
        fit = fit_scm(generating_graph, toy_large)
        for i, name in enumerate(fit.induced.names):
            assert fit.induced.mean[i] == pytest.approx(
                float(np.mean(toy_large.column(name))), rel=1e-9
            )

    def test_induced_cov_matches_forward_simulation(self, toy_large, generating_graph):
        fit = fit_scm(generating_graph, toy_large)
        order, values = forward_simulate(fit, 400000, seed=5)
        sim_cov = np.cov(values, rowvar=False, ddof=1)
        model_cov = fit.induced.cov
        scale = np.sqrt(np.outer(np.diag(model_cov), np.diag(model_cov)))
        assert np.all(
            (np.abs(model_cov - sim_cov) < 0.02 * scale)
            | (np.abs(model_cov - sim_cov) < 2e-3)
        )

    def test_induced_cov_symmetric_positive_definite(self, toy_large, generating_graph):
        fit = fit_scm(generating_graph, toy_large)
        cov = fit.induced.cov
        assert np.array_equal(cov, cov.T)
        assert np.all(np.linalg.eigvalsh(cov) > 0)

    def test_induced_moments_recompute_matches_fit(self, toy_large, generating_graph):
        fit = fit_scm(generating_graph, toy_large)
        again = induced_moments(fit, generating_graph)
        assert np.allclose(again.cov, fit.induced.cov)

    def test_induced_moments_version_mismatch_rejected(self, toy_large, generating_graph):
        fit = fit_scm(generating_graph, toy_large)
        with pytest.raises(ValueError, match="version"):
            induced_moments(fit, generating_graph.with_version(99))


class TestFitGuards:
    def test_exogenous_moments_are_sample_moments(self, toy_large, generating_graph):
        fit = fit_scm(generating_graph, toy_large)
        w = toy_large.column("Winter_Ind")
        mean, var = fit.exogenous_moments["Winter_Ind"]
        assert mean == pytest.approx(float(np.mean(w)))
        assert var == pytest.approx(float(np.var(w, ddof=1)))

    def test_duplicate_parent_columns_raise_singular_design(self):
        x = np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
        data = Dataset(("X", "Z", "Y"), np.column_stack([x, x, 2 * x]))
        g = CausalGraph(
            frozenset({"X", "Z", "Y"}),
            (Edge("X", "Y"), Edge("Z", "Y")),
            0,
        )
        with pytest.raises(SingularDesignError) as err:
            fit_scm(g, data)
        assert err.value.child == "Y"

    def test_too_few_rows_for_parent_count(self):
        data = Dataset(
            ("A", "B", "C", "Y"),
            np.array([[1.0, 2, 3, 4], [2, 3, 4, 5], [3, 5, 7, 9], [1, 0, 2, 1]]),
        )
        g = graph_from([("A", "Y", 1), ("B", "Y", 1), ("C", "Y", 1)])
        with pytest.raises(InsufficientRowsError):
            fit_scm(g, data)


class TestModelFitStatistic:
    def test_degrees_of_freedom(self, toy_large, generating_graph):
        fit = fit_scm(generating_graph, toy_large)
        stat = model_fit_statistic(fit, toy_large)
        # 7*8/2 moments minus 7 slopes minus 7 variances
        assert stat.df == 14
        assert stat.statistic >= 0.0

    def test_correct_structure_fits(self, toy_large, generating_graph):
        fit = fit_scm(generating_graph, toy_large)
        assert model_fit_statistic(fit, toy_large).p_value > 1e-4

    def test_saturated_model_has_zero_statistic(self):
        data = generate_toy_dataset(300, 2)
        names = sorted(data.names)
        edges = tuple(
            Edge(names[i], names[j], 1)
            for i in range(len(names))
            for j in range(i + 1, len(names))
        )
        g = CausalGraph(frozenset(names), edges, 0)
        fit = fit_scm(g, data)
        stat = model_fit_statistic(fit, data)
        assert stat.df == 0
        assert stat.statistic == 0.0
        assert stat.p_value == 1.0

    def test_missing_edge_detected(self, toy_large, generating_graph):
        broken = generating_graph.remove_edge("Rotational_RPM", "Energy_Yield")
        fit = fit_scm(broken, toy_large)
        stat = model_fit_statistic(fit, toy_large)
        assert stat.p_value < 1e-6


class TestResidualNormality:
    def test_skipped_below_minimum_rows(self, toy_small):
        small = generate_toy_dataset(60, 4)
        g = graph_from([("Winter_Ind", "Sea_Temperature", 3)], nodes=small.names)
        fit = fit_scm(g, small)
        out = residual_normality_test(fit.equations["Sea_Temperature"])
        assert out.skipped
        assert out.p_value is None

    def test_normal_residuals_pass(self, toy_large, generating_graph):
        fit = fit_scm(generating_graph, toy_large)
        out = residual_normality_test(fit.equations["Sea_Temperature"])
        assert not out.skipped
        assert out.df == 17
        assert out.p_value > 0.001

    def test_heavy_tailed_residuals_fail(self):
        rng = np.random.default_rng(11)
        x = rng.normal(size=2000)
        y = 2.0 * x + rng.lognormal(mean=0.0, sigma=1.0, size=2000)
        data = Dataset(("x", "y"), np.column_stack([x, y]))
        g = graph_from([("x", "y", 1)])
        fit = fit_scm(g, data)
        out = residual_normality_test(fit.equations["y"])
        assert out.p_value < 1e-6


class TestScmModelEstimator:
    def test_fit_returns_self_with_fitted_attributes(self, toy_large, generating_graph):
        model = ScmModel(graph=generating_graph)
        assert model.fit(toy_large) is model
        assert model.result_.n == toy_large.n
        assert set(model.equations_) == set(generating_graph.endogenous)
        assert model.induced_.names == tuple(generating_graph.topological_order())

    def test_get_params_round_trip_and_clone(self, generating_graph):
        model = ScmModel(graph=generating_graph)
        params = model.get_params()
        assert params == {"graph": generating_graph}
        fresh = clone(model)
        assert fresh.graph == generating_graph
        assert not hasattr(fresh, "result_")

    def test_requires_graph(self, toy_small):
        with pytest.raises(ValueError, match="graph"):
            ScmModel().fit(toy_small)

    def test_unfitted_access_raises(self, toy_small, generating_graph):
        model = ScmModel(graph=generating_graph)
        with pytest.raises(RuntimeError, match="not fitted"):
            model.fit_statistic(toy_small)

    def test_score_prefers_correct_structure(self, toy_large, generating_graph):
        correct = ScmModel(graph=generating_graph).fit(toy_large)
        broken_graph = generating_graph.remove_edge("Rotational_RPM", "Energy_Yield")
        broken = ScmModel(graph=broken_graph).fit(toy_large)
        assert correct.score(toy_large) > broken.score(toy_large)

    def test_accepts_data_frame_input(self, toy_small, generating_graph):
        pytest.importorskip("pandas")
        model = ScmModel(graph=generating_graph).fit(toy_small.to_frame())
        assert model.n_ == toy_small.n
