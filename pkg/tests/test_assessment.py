from __future__ import annotations

import dataclasses
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from munidss.assessment import assess, criticality, rating, relevance, what_if
from munidss.domain import (
    CriticalityConfig,
    CriticalityLevel,
    Indicator,
    PermittedRange,
)
from munidss.errors import NotFoundError, ValidationError
from munidss.influence import build_matrix, total_influence_series
from tests.factories import chain_project, make_project, random_project
from tests.oracles import comparison_sort_rating


def quantitative(value, iid="a"):
    return Indicator(id=iid, name=iid, kind="quantitative", current_value=value)


class TestRelevance:
    def test_inside_interval_is_zero(self):
        assert relevance(quantitative(5.0), PermittedRange("a", lo=3.0, hi=7.0)) == 0.0

    def test_overshoot_scales_by_width(self):
        assert relevance(quantitative(9.0), PermittedRange("a", lo=3.0, hi=7.0)) == 0.5

    def test_undershoot_symmetric(self):
        assert relevance(quantitative(1.0), PermittedRange("a", lo=3.0, hi=7.0)) == 0.5

    def test_saturates_at_one(self):
        assert relevance(quantitative(100.0), PermittedRange("a", lo=3.0, hi=7.0)) == 1.0

    def test_degenerate_interval_uses_fallback_scale(self):
        # lo == hi: scale is max(|hi|, 1)
        assert relevance(quantitative(6.0), PermittedRange("a", lo=4.0, hi=4.0)) == 0.5

    def test_disallowed_label(self):
        indicator = Indicator(id="q", name="q", kind="qualitative", current_value="poor")
        rng = PermittedRange("q", allowed=frozenset({"good", "satisfactory"}))
        assert relevance(indicator, rng) == 1.0

    def test_allowed_label(self):
        indicator = Indicator(id="q", name="q", kind="qualitative", current_value="good")
        rng = PermittedRange("q", allowed=frozenset({"good", "satisfactory"}))
        assert relevance(indicator, rng) == 0.0

    def test_kind_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            relevance(quantitative(5.0), PermittedRange("a", allowed=frozenset({"x"})))

    def test_foreign_range_rejected(self):
        with pytest.raises(ValidationError):
            relevance(quantitative(5.0), PermittedRange("b", lo=0.0, hi=1.0))

    @given(
        value=st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
        lo=st.floats(min_value=-100, max_value=100, allow_nan=False),
        width=st.floats(min_value=0, max_value=100, allow_nan=False),
    )
    def test_bounds_and_zero_set(self, value, lo, width):
        rng = PermittedRange("a", lo=lo, hi=lo + width)
        score = relevance(quantitative(value), rng)
        assert 0.0 <= score <= 1.0
        assert (score == 0.0) == (lo <= value <= lo + width)


class TestCriticality:
    CONFIG = CriticalityConfig.defaults_for(["t"])

    @pytest.mark.parametrize(
        "impact, expected",
        [
            (0.8, CriticalityLevel.CRITICAL),
            (0.75, CriticalityLevel.CRITICAL),
            (-0.1, CriticalityLevel.NEGLIGIBLE),
            (0.5, CriticalityLevel.SIGNIFICANT),
            (-0.6, CriticalityLevel.SIGNIFICANT),
            (0.25, CriticalityLevel.MODERATE),
            (0.2499, CriticalityLevel.NEGLIGIBLE),
        ],
    )
    def test_default_thresholds_with_inclusive_lower_bounds(self, impact, expected):
        assert criticality(impact, self.CONFIG, "t") is expected

    def test_unknown_target(self):
        with pytest.raises(NotFoundError):
            criticality(0.5, self.CONFIG, "nope")

    def test_levels_are_ordered(self):
        assert (
            CriticalityLevel.NEGLIGIBLE
            < CriticalityLevel.MODERATE
            < CriticalityLevel.SIGNIFICANT
            < CriticalityLevel.CRITICAL
        )


class TestAssess:
    def test_all_zero_single_indicator(self):
        project = make_project()
        total = total_influence_series(build_matrix(project))
        (record,) = assess(project, total)
        assert record.indicator_id == "a"
        assert record.relevance == 0.0
        assert record.direct_impact == (0.0,)
        assert record.total_impact == (0.0,)
        assert record.criticality == (CriticalityLevel.NEGLIGIBLE,)

    def test_chain_total_is_moderate(self, chain):
        total = total_influence_series(build_matrix(chain))
        records = {r.indicator_id: r for r in assess(chain, total)}
        assert records["a"].total_impact[0] == pytest.approx(0.4)
        assert records["a"].direct_impact[0] == pytest.approx(0.2)
        assert records["a"].criticality[0] is CriticalityLevel.MODERATE

    def test_relevance_independent_of_impacts(self):
        project = make_project(indicator_values={"a": 9.0}, ranges=(PermittedRange("a", lo=3.0, hi=7.0),))
        total = total_influence_series(build_matrix(project))
        (record,) = assess(project, total)
        assert record.relevance == 0.5

    def test_dimension_mismatch_rejected(self, chain):
        other = total_influence_series(np.zeros((2, 2)))
        with pytest.raises(ValidationError):
            assess(chain, other)


class TestRating:
    def test_magnitude_orders_ranks(self):
        project = make_project(
            indicator_values={"a": 5.0, "b": 5.0},
            estimates=(("a", "t", 0.8), ("b", "t", 0.3)),
        )
        total = total_influence_series(build_matrix(project))
        result = rating(project, total, "t")
        assert [(e.indicator_id, e.rank) for e in result.entries] == [("a", 1), ("b", 2)]
        assert result.entries[0].criticality is CriticalityLevel.CRITICAL

    def test_all_zero_falls_back_to_id_order(self):
        project = make_project(indicator_values={"c": 5.0, "a": 5.0, "b": 5.0})
        total = total_influence_series(build_matrix(project))
        result = rating(project, total, "t")
        assert [e.indicator_id for e in result.entries] == ["a", "b", "c"]
        assert [e.rank for e in result.entries] == [1, 2, 3]

    def test_relevance_breaks_magnitude_ties(self):
        project = make_project(
            indicator_values={"a": 5.0, "b": 9.0},
            estimates=(("a", "t", 0.4), ("b", "t", -0.4)),
            # equal |total| 0.4; a sits inside [3, 7] (relevance 0), b strays (0.5)
            ranges=(PermittedRange("a", lo=3.0, hi=7.0), PermittedRange("b", lo=3.0, hi=7.0)),
        )
        total = total_influence_series(build_matrix(project))
        result = rating(project, total, "t")
        assert [e.indicator_id for e in result.entries] == ["b", "a"]

    def test_matches_comparison_sort_oracle(self):
        rng = random.Random(42)
        for trial in range(50):
            project = random_project(rng, project_id=f"r{trial}")
            total = total_influence_series(build_matrix(project))
            for target_id in project.target_ids:
                result = rating(project, total, target_id)
                rows = [
                    (e.indicator_id, e.total_impact, e.relevance) for e in result.entries
                ]
                assert [e.indicator_id for e in result.entries] == comparison_sort_rating(rows)

    def test_unknown_target(self, chain):
        total = total_influence_series(build_matrix(chain))
        with pytest.raises(NotFoundError):
            rating(chain, total, "nope")

    def test_ranks_are_a_permutation(self):
        rng = random.Random(9)
        for trial in range(30):
            project = random_project(rng, project_id=f"perm{trial}")
            total = total_influence_series(build_matrix(project))
            result = rating(project, total, project.target_ids[0])
            assert sorted(e.rank for e in result.entries) == list(
                range(1, len(project.indicators) + 1)
            )

    def test_rank_respects_criticality_order(self):
        rng = random.Random(17)
        for trial in range(30):
            project = random_project(rng, project_id=f"crit{trial}")
            total = total_influence_series(build_matrix(project))
            for target_id in project.target_ids:
                entries = rating(project, total, target_id).entries
                for earlier, later in zip(entries, entries[1:]):
                    assert earlier.criticality >= later.criticality

    def test_input_order_equivariance(self, chain):
        shuffled = dataclasses.replace(
            chain,
            indicators=tuple(reversed(chain.indicators)),
            estimates=tuple(reversed(chain.estimates)),
        )
        t1 = total_influence_series(build_matrix(chain))
        t2 = total_influence_series(build_matrix(shuffled))
        assert rating(chain, t1, "t") == rating(shuffled, t2, "t")

    def test_order_preserving_rename_equivariance(self, chain):
        renamed = _rename_indicators(chain, prefix="r_")
        t1 = total_influence_series(build_matrix(chain))
        t2 = total_influence_series(build_matrix(renamed))
        original = rating(chain, t1, "t")
        mapped = rating(renamed, t2, "t")
        assert [e.indicator_id for e in mapped.entries] == [
            "r_" + e.indicator_id for e in original.entries
        ]
        assert [
            (e.rank, e.total_impact, e.direct_impact, e.relevance, e.criticality)
            for e in mapped.entries
        ] == [
            (e.rank, e.total_impact, e.direct_impact, e.relevance, e.criticality)
            for e in original.entries
        ]

    def test_restricted_monotonicity_single_out_edge(self):
        # indicator a's only outgoing edge is the direct a->t; no inbound
        # edges reach a, so every other total is fixed and a's key grows.
        for low, high in ((0.1, 0.3), (0.3, 0.9), (-0.2, -0.8)):
            weaker = _single_out_edge_project(low)
            stronger = _single_out_edge_project(high)
            rank_low = _rank_of(weaker, "a")
            rank_high = _rank_of(stronger, "a")
            assert rank_high <= rank_low


def _rename_indicators(project, prefix):
    mapping = {i.id: prefix + i.id for i in project.indicators}
    indicators = tuple(dataclasses.replace(i, id=mapping[i.id]) for i in project.indicators)
    estimates = tuple(
        dataclasses.replace(
            e, source=mapping.get(e.source, e.source), sink=mapping.get(e.sink, e.sink)
        )
        for e in project.estimates
    )
    ranges = tuple(
        dataclasses.replace(r, indicator_id=mapping[r.indicator_id]) for r in project.ranges
    )
    return dataclasses.replace(project, indicators=indicators, estimates=estimates, ranges=ranges)


def _single_out_edge_project(direct):
    return make_project(
        indicator_values={"a": 5.0, "b": 5.0, "c": 5.0},
        estimates=(("a", "t", direct), ("b", "t", 0.25), ("c", "t", 0.6), ("b", "c", 0.5)),
    )


def _rank_of(project, indicator_id):
    total = total_influence_series(build_matrix(project))
    result = rating(project, total, "t")
    return next(e.rank for e in result.entries if e.indicator_id == indicator_id)


class TestWhatIf:
    def test_zero_scenario(self, chain):
        total = total_influence_series(build_matrix(chain))
        outcome = what_if(chain, total, {})
        assert set(outcome) == {"a", "b", "t"}
        assert all(v == 0.0 for v in outcome.values())

    def test_single_edge_direct_product(self):
        project = make_project(estimates=(("a", "t", 0.5),))
        total = total_influence_series(build_matrix(project))
        outcome = what_if(project, total, {"a": 1.0})
        assert outcome["t"] == pytest.approx(0.5)
        assert outcome["a"] == pytest.approx(1.0)

    def test_chain_scaling(self, chain):
        total = total_influence_series(build_matrix(chain))
        outcome = what_if(chain, total, {"a": 2.0})
        assert outcome["t"] == pytest.approx(0.8)
        assert outcome["b"] == pytest.approx(1.0)

    def test_target_shock_rejected(self, chain):
        total = total_influence_series(build_matrix(chain))
        with pytest.raises(ValidationError):
            what_if(chain, total, {"t": 1.0})

    def test_unknown_indicator_rejected(self, chain):
        total = total_influence_series(build_matrix(chain))
        with pytest.raises(ValidationError):
            what_if(chain, total, {"ghost": 1.0})

    def test_nonfinite_shock_rejected(self, chain):
        total = total_influence_series(build_matrix(chain))
        with pytest.raises(ValidationError):
            what_if(chain, total, {"a": float("nan")})

    def test_linearity(self):
        rng = random.Random(23)
        for trial in range(40):
            project = random_project(rng, project_id=f"lin{trial}")
            total = total_influence_series(build_matrix(project))
            ids = list(project.indicator_ids)
            s1 = {i: rng.uniform(-2, 2) for i in ids}
            s2 = {i: rng.uniform(-2, 2) for i in ids}
            alpha, beta = rng.uniform(-10, 10), rng.uniform(-10, 10)
            combined = {i: alpha * s1[i] + beta * s2[i] for i in ids}
            out1 = what_if(project, total, s1)
            out2 = what_if(project, total, s2)
            out = what_if(project, total, combined)
            for node in out:
                assert out[node] == pytest.approx(
                    alpha * out1[node] + beta * out2[node], abs=1e-9
                )
