from __future__ import annotations

import numpy as np
import pytest

from dagcraft import (
    CovGapBootstrap,
    Dataset,
    DegenerateColumnWarning,
    EquivalenceSpec,
    HypothesisFamily,
    HypothesisKind,
    HypothesisRecord,
    INTERSECTION_ID,
    MODEL_FIT_ID,
    SingularSampleCovError,
    belief_to_cost,
    build_family,
    equivalence_test,
    fit_scm,
)
from dagcraft.hypotheses import _tost_pvalue

from conftest import GENERATING_EDGES, graph_from


class TestRecordAndFamily:
    def test_record_round_trip(self):
        rec = HypothesisRecord(
            id="coef:B<-A",
            kind=HypothesisKind.COEFFICIENT,
            raw_p=0.03,
            cost=0.5,
            adjusted_p=0.06,
            rejected=False,
            detail={"estimate": 1.2},
        )
        again = HypothesisRecord.from_dict(rec.to_dict())
        assert again == rec

    def test_family_rejects_duplicate_ids(self):
        records = [
            HypothesisRecord("x", HypothesisKind.COEFFICIENT, 0.1, 1.0),
            HypothesisRecord("x", HypothesisKind.MODEL_FIT, 0.2, 1.0),
        ]
        with pytest.raises(ValueError, match="duplicate"):
            HypothesisFamily(records=records)

    def test_by_id_and_missing_id(self):
        fam = HypothesisFamily(
            records=[HypothesisRecord("a", HypothesisKind.COEFFICIENT, 0.1, 1.0)]
        )
        assert fam.by_id("a").raw_p == 0.1
        with pytest.raises(KeyError):
            fam.by_id("b")

    def test_testable_excludes_intersection(self):
        fam = HypothesisFamily(
            records=[
                HypothesisRecord("a", HypothesisKind.COEFFICIENT, 0.1, 1.0),
                HypothesisRecord(
                    INTERSECTION_ID, HypothesisKind.INTERSECTION, None, 1.0
                ),
            ]
        )
        assert [r.id for r in fam.testable] == ["a"]
        assert fam.intersection.id == INTERSECTION_ID

    def test_family_round_trip(self):
        fam = HypothesisFamily(
            records=[
                HypothesisRecord("a", HypothesisKind.COV_EQUIVALENCE, 0.2, 2.0),
                HypothesisRecord(
                    INTERSECTION_ID, HypothesisKind.INTERSECTION, None, 1.0
                ),
            ],
            iteration=3,
            q_level=0.1,
        )
        again = HypothesisFamily.from_dict(fam.to_dict())
        assert again == fam


class TestEquivalenceSpec:
    def test_defaults(self):
        spec = EquivalenceSpec()
        assert spec.delta_rho == 0.05
        assert spec.bootstrap_reps == 200

    def test_rejects_bad_margin(self):
        with pytest.raises(ValueError):
            EquivalenceSpec(delta_rho=0.0)
        with pytest.raises(ValueError):
            EquivalenceSpec(delta_rho=1.0)

    def test_rejects_tiny_bootstrap(self):
        with pytest.raises(ValueError):
            EquivalenceSpec(bootstrap_reps=1)


class TestTost:
    def test_frozen_values(self):
        assert _tost_pvalue(0.0, 0.1, 0.05) == pytest.approx(
            0.022750131948179195, rel=1e-12
        )
        assert _tost_pvalue(0.08, 0.1, 0.05) == pytest.approx(
            0.3445782583896758, rel=1e-12
        )
        assert _tost_pvalue(0.2, 0.1, 0.05) == pytest.approx(
            0.9772498680518208, rel=1e-12
        )

    def test_symmetric_in_gap_sign(self):
        for gap in (0.0, 0.03, 0.08, 0.4):
            assert _tost_pvalue(gap, 0.1, 0.07) == pytest.approx(
                _tost_pvalue(-gap, 0.1, 0.07)
            )

    def test_degenerate_se(self):
        assert _tost_pvalue(0.05, 0.1, 0.0) == 0.0
        assert _tost_pvalue(0.2, 0.1, 0.0) == 1.0

    def test_smaller_gap_is_more_equivalent(self):
        ps = [_tost_pvalue(g, 0.1, 0.05) for g in (0.0, 0.05, 0.1, 0.2)]
        assert ps == sorted(ps)


@pytest.fixture(scope="module")
def small_fit(toy_small):
    graph = graph_from(GENERATING_EDGES)
    return graph, fit_scm(graph, toy_small)


class TestEquivalenceTest:
    def test_margin_matches_sample_sds(self, toy_small, small_fit):
        graph, fit = small_fit
        spec = EquivalenceSpec(delta_rho=0.07, bootstrap_reps=64)
        res = equivalence_test(
            ("Wind_Speed", "Energy_Yield"), fit, toy_small, spec=spec, graph=graph
        )
        sx = toy_small.column("Wind_Speed").std(ddof=1)
        sy = toy_small.column("Energy_Yield").std(ddof=1)
        assert res["margin"] == pytest.approx(0.07 * sx * sy, rel=1e-12)
        assert 0.0 <= res["raw_p"] <= 1.0

    def test_gap_is_induced_minus_sample(self, toy_small, small_fit):
        graph, fit = small_fit
        res = equivalence_test(
            ("Winter_Ind", "Energy_Yield"),
            fit,
            toy_small,
            spec=EquivalenceSpec(bootstrap_reps=16),
            graph=graph,
        )
        sample = np.cov(
            toy_small.column("Winter_Ind"), toy_small.column("Energy_Yield"), ddof=1
        )[0, 1]
        induced = fit.induced.pair_cov("Winter_Ind", "Energy_Yield")
        assert res["gap"] == pytest.approx(induced - sample, rel=1e-12)

    def test_prebuilt_kernel_changes_nothing(self, toy_small, small_fit):
        graph, fit = small_fit
        pair = ("Wind_Speed", "Perceived_Noise")
        spec = EquivalenceSpec(bootstrap_reps=64)
        res_graph = equivalence_test(pair, fit, toy_small, spec=spec, graph=graph, seed=5)
        kernel = CovGapBootstrap(graph, toy_small)
        res_kernel = equivalence_test(
            pair, fit, toy_small, spec=spec, kernel=kernel, seed=5
        )
        assert res_graph == res_kernel

    def test_needs_graph_or_kernel(self, toy_small, small_fit):
        _, fit = small_fit
        with pytest.raises(ValueError, match="graph or a prebuilt kernel"):
            equivalence_test(("Wind_Speed", "Energy_Yield"), fit, toy_small)

    def test_deterministic_per_seed(self, toy_small, small_fit):
        graph, fit = small_fit
        pair = ("Sea_Temperature", "Rotational_RPM")
        spec = EquivalenceSpec(bootstrap_reps=64)
        a = equivalence_test(pair, fit, toy_small, spec=spec, graph=graph, seed=9)
        b = equivalence_test(pair, fit, toy_small, spec=spec, graph=graph, seed=9)
        c = equivalence_test(pair, fit, toy_small, spec=spec, graph=graph, seed=10)
        assert a == b
        assert a["se"] != c["se"]


@pytest.fixture(scope="module")
def family(toy_small, small_fit):
    graph, fit = small_fit
    return build_family(graph, fit, toy_small, seed=1, iteration=2)


class TestBuildFamily:
    def test_record_count_breaks_down_by_kind(self, family):
        # 7 slopes + 5 intercepts, one normality check per endogenous
        # node, 7 choose 2 pairs plus 7 variances, model fit, intersection
        by_kind = {}
        for rec in family.records:
            by_kind[rec.kind] = by_kind.get(rec.kind, 0) + 1
        assert by_kind == {
            HypothesisKind.COEFFICIENT: 12,
            HypothesisKind.RESIDUAL_NORMALITY: 5,
            HypothesisKind.COV_EQUIVALENCE: 28,
            HypothesisKind.MODEL_FIT: 1,
            HypothesisKind.INTERSECTION: 1,
        }
        assert len(family) == 47
        assert len(family.testable) == 46

    def test_block_order_and_id_layout(self, family, toy_small):
        ids = [r.id for r in family.records]
        assert ids[0] == "coef:Sea_Temperature<-(intercept)"
        assert ids[1] == "coef:Sea_Temperature<-Winter_Ind"
        assert ids[-1] == INTERSECTION_ID
        assert ids[-2] == MODEL_FIT_ID
        # intercept precedes sorted parents within each child block
        energy = ids.index("coef:Energy_Yield<-(intercept)")
        assert ids[energy + 1] == "coef:Energy_Yield<-Rotational_RPM"
        assert ids[energy + 2] == "coef:Energy_Yield<-Strength_Degradation"
        # equivalence pairs walk the dataset column order, diagonal included
        names = [n for n in toy_small.names]
        expected_cov = [
            f"cov-eq:{x},{y}"
            for i, x in enumerate(names)
            for y in names[i:]
        ]
        assert [i for i in ids if i.startswith("cov-eq:")] == expected_cov

    def test_costs_follow_beliefs(self, family):
        strong = family.by_id("coef:Rotational_RPM<-Wind_Speed")
        weaker = family.by_id("coef:Energy_Yield<-Strength_Degradation")
        assert strong.cost == pytest.approx(belief_to_cost(3))
        assert weaker.cost == pytest.approx(belief_to_cost(2))
        assert weaker.cost > strong.cost
        assert family.by_id("coef:Energy_Yield<-(intercept)").cost == 1.0
        assert family.by_id(MODEL_FIT_ID).cost == 1.0

    def test_intersection_left_open(self, family):
        inter = family.intersection
        assert inter.raw_p is None
        assert inter.adjusted_p is None
        assert inter.cost == 1.0
        assert family.iteration == 2

    def test_all_testable_records_carry_pvalues(self, family):
        for rec in family.testable:
            assert rec.raw_p is not None
            assert 0.0 <= rec.raw_p <= 1.0

    def test_equivalence_detail_fields(self, family):
        rec = family.by_id("cov-eq:Wind_Speed,Energy_Yield")
        assert set(rec.detail) == {"gap", "margin", "se"}
        assert rec.detail["margin"] > 0.0
        assert rec.detail["se"] > 0.0

    def test_coefficient_detail_fields(self, family):
        rec = family.by_id("coef:Rotational_RPM<-Wind_Speed")
        assert set(rec.detail) == {"estimate", "std_error"}
        assert rec.detail["std_error"] > 0.0

    def test_version_mismatch_rejected(self, toy_small, small_fit):
        graph, fit = small_fit
        bumped = graph.with_version(graph.version + 1)
        with pytest.raises(ValueError, match="version"):
            build_family(bumped, fit, toy_small)

    def test_bitwise_deterministic(self, toy_small, small_fit):
        graph, fit = small_fit
        a = build_family(graph, fit, toy_small, seed=1)
        b = build_family(graph, fit, toy_small, seed=1)
        assert [r.raw_p for r in a.records] == [r.raw_p for r in b.records]
        assert [r.id for r in a.records] == [r.id for r in b.records]

    def test_seed_moves_bootstrap_pvalues(self, toy_small, small_fit, family):
        graph, fit = small_fit
        other = build_family(graph, fit, toy_small, seed=99)
        ses = [
            (a.detail["se"], b.detail["se"])
            for a, b in zip(family.records, other.records)
            if a.kind is HypothesisKind.COV_EQUIVALENCE
        ]
        assert any(sa != sb for sa, sb in ses)

    def test_degenerate_node_warns_then_model_fit_fails(self):
        rng = np.random.default_rng(3)
        n = 200
        a = rng.normal(size=n)
        data = Dataset(
            ("A", "B", "Flat"),
            np.column_stack([a, 2 * a + rng.normal(size=n), np.full(n, 1.0)]),
        )
        graph = graph_from((("A", "B", 3),), nodes={"Flat"})
        fit = fit_scm(graph, data)
        with pytest.raises(SingularSampleCovError):
            with pytest.warns(DegenerateColumnWarning, match="Flat"):
                build_family(graph, fit, data)
