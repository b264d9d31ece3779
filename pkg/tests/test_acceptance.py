"""Acceptance suite: one test per exit criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and timings. Every tolerance and runtime bound is asserted here.
"""

from __future__ import annotations

import dataclasses
import itertools
import json
import random
import time

import numpy as np
import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from munidss.assessment import rating, what_if
from munidss.cli import main as cli_main
from munidss.domain import ImpactDirection, ImpactEstimate, classify_impact
from munidss.errors import ValidationError
from munidss.influence import (
    build_matrix,
    spectral_radius_estimate,
    total_influence_closed,
    total_influence_series,
)
from munidss.planning import DocumentKind, DocumentRecord, PlanningHorizon, PlanningStage
from munidss.planning import portfolio_coverage, required_documents
from munidss.service import create_app
from munidss.storage import load_project, project_to_payload, save_project
from tests.factories import chain_project, random_project
from tests.oracles import walk_influence_totals


class _Stopwatch:
    def __init__(self):
        self.start = time.perf_counter()

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.start


def _report(number: int, name: str, watch: _Stopwatch, budget: float):
    elapsed = watch.elapsed
    print(f"criterion {number} ({name}): PASS in {elapsed:.2f}s (budget {budget:.0f}s)")
    assert elapsed < budget, f"criterion {number} exceeded its {budget}s budget: {elapsed:.2f}s"


def test_criterion_1_piecewise_rule_conformance():
    watch = _Stopwatch()
    for i in range(-1000, 1001):
        value = i / 1000
        direction = classify_impact(value)
        if value < 0:
            assert direction is ImpactDirection.NEGATIVE
        elif value == 0:
            assert direction is ImpactDirection.NONE
        else:
            assert direction is ImpactDirection.POSITIVE
    for value in (1.0001, -1.0001):
        with pytest.raises(ValidationError):
            classify_impact(value)
    _report(1, "piecewise impact rule", watch, 1.0)


def test_criterion_2_walk_oracle_equivalence():
    watch = _Stopwatch()
    weights = (-1.0, -0.5, 0.5, 1.0)
    graphs = 0
    worst = 0.0
    for total_nodes in range(1, 5):
        for n_targets in range(0, total_nodes + 1):
            n_sources = total_nodes - n_targets
            pairs = [
                (u, v)
                for u in range(n_sources)
                for v in range(total_nodes)
                if u != v
            ]
            for edge_count in range(0, min(4, len(pairs)) + 1):
                for subset in itertools.combinations(pairs, edge_count):
                    for combo in itertools.product(weights, repeat=edge_count):
                        raw = np.zeros((total_nodes, total_nodes))
                        edges = {}
                        for (u, v), w in zip(subset, combo):
                            raw[u, v] = w
                            edges[(u, v)] = w
                        series = total_influence_series(raw, 4)
                        expected = walk_influence_totals(total_nodes, edges, 4)
                        gap = float(np.abs(series.entries - np.array(expected)).max())
                        worst = max(worst, gap)
                        assert gap <= 1e-12
                        graphs += 1
    assert graphs > 100_000  # the family really is exhaustive, not a sample
    print(f"  walk oracle: {graphs} digraphs, worst gap {worst:.2e}")
    _report(2, "walk-oracle equivalence", watch, 30.0)


def test_criterion_3_closed_form_agreement():
    watch = _Stopwatch()
    rng = np.random.default_rng(2024)
    checked = 0
    while checked < 200:
        size = int(rng.integers(1, 7))
        raw = rng.uniform(-1.0, 1.0, size=(size, size))
        estimate = spectral_radius_estimate(raw)
        if estimate == 0.0:
            continue
        raw *= float(rng.uniform(0.1, 0.9)) / estimate
        closed = total_influence_closed(raw)
        series = total_influence_series(raw, 300)
        assert float(np.abs(closed.entries - series.entries).max()) <= 1e-9
        checked += 1
    _report(3, "closed-form agreement", watch, 10.0)


def _rank_of(project, indicator_id: str, target_id: str) -> int:
    total = total_influence_series(build_matrix(project))
    entries = rating(project, total, target_id).entries
    return next(e.rank for e in entries if e.indicator_id == indicator_id)


def _with_single_out_edge(project, indicator_id: str, target_id: str, value: float):
    estimates = tuple(e for e in project.estimates if e.source != indicator_id) + (
        ImpactEstimate(expert_id="mono", source=indicator_id, sink=target_id, value=value),
    )
    return dataclasses.replace(project, estimates=estimates)


def _rename_order_preserving(project):
    mapping = {i.id: "r_" + i.id for i in project.indicators}
    indicators = tuple(dataclasses.replace(i, id=mapping[i.id]) for i in project.indicators)
    estimates = tuple(
        dataclasses.replace(e, source=mapping.get(e.source, e.source), sink=mapping.get(e.sink, e.sink))
        for e in project.estimates
    )
    ranges = tuple(dataclasses.replace(r, indicator_id=mapping[r.indicator_id]) for r in project.ranges)
    return dataclasses.replace(project, indicators=indicators, estimates=estimates, ranges=ranges)


def test_criterion_4_rating_properties():
    watch = _Stopwatch()
    rng = random.Random(5)
    for draw in range(500):
        project = random_project(rng, max_indicators=8, max_targets=2, project_id="acc4")
        target_id = rng.choice(project.target_ids)
        indicator_id = rng.choice(project.indicator_ids)
        low = rng.uniform(0.05, 0.6)
        high = rng.uniform(low, 1.0)
        sign = rng.choice([-1.0, 1.0])

        total = total_influence_series(build_matrix(project))
        result = rating(project, total, target_id)

        # ranks are a permutation of 1..n
        assert sorted(e.rank for e in result.entries) == list(
            range(1, len(project.indicators) + 1)
        )

        # rank/criticality consistency: higher criticality never ranks below lower
        for earlier, later in zip(result.entries, result.entries[1:]):
            assert earlier.criticality >= later.criticality

        # permutation equivariance: input order shuffles and order-preserving
        # renames leave the rating unchanged (modulo the renaming), exactly
        side = random.Random(10_000 + draw)
        indicators = list(project.indicators)
        estimates = list(project.estimates)
        side.shuffle(indicators)
        side.shuffle(estimates)
        shuffled = dataclasses.replace(
            project, indicators=tuple(indicators), estimates=tuple(estimates)
        )
        assert rating(shuffled, total_influence_series(build_matrix(shuffled)), target_id) == result

        renamed = _rename_order_preserving(project)
        renamed_rating = rating(
            renamed, total_influence_series(build_matrix(renamed)), target_id
        )
        assert [e.indicator_id for e in renamed_rating.entries] == [
            "r_" + e.indicator_id for e in result.entries
        ]
        assert [
            (e.rank, e.total_impact, e.direct_impact, e.relevance, e.criticality)
            for e in renamed_rating.entries
        ] == [
            (e.rank, e.total_impact, e.direct_impact, e.relevance, e.criticality)
            for e in result.entries
        ]

        # restricted monotonicity: strengthening an indicator's single direct
        # edge (same sign) never worsens its rank
        weaker = _with_single_out_edge(project, indicator_id, target_id, sign * low)
        stronger = _with_single_out_edge(project, indicator_id, target_id, sign * high)
        assert _rank_of(stronger, indicator_id, target_id) <= _rank_of(
            weaker, indicator_id, target_id
        )
    _report(4, "rating properties", watch, 30.0)


def test_criterion_5_what_if_linearity():
    watch = _Stopwatch()
    rng = random.Random(55)
    for case in range(200):
        project = random_project(rng, project_id="acc5")
        total = total_influence_series(build_matrix(project))
        ids = project.indicator_ids
        first = {i: rng.uniform(-2, 2) for i in ids}
        second = {i: rng.uniform(-2, 2) for i in ids}
        alpha = rng.uniform(-10, 10)
        beta = rng.uniform(-10, 10)
        combined = {i: alpha * first[i] + beta * second[i] for i in ids}
        out_first = what_if(project, total, first)
        out_second = what_if(project, total, second)
        out_combined = what_if(project, total, combined)
        for node in out_combined:
            expected = alpha * out_first[node] + beta * out_second[node]
            assert abs(out_combined[node] - expected) <= 1e-9
    _report(5, "what-if linearity", watch, 5.0)


def test_criterion_6_document_grid_golden():
    watch = _Stopwatch()
    grid = {
        (PlanningStage.TARGET_SETTING, PlanningHorizon.LONG_TERM): {DocumentKind.SED_STRATEGY},
        (PlanningStage.TARGET_SETTING, PlanningHorizon.MEDIUM_TERM): set(),
        (PlanningStage.TARGET_SETTING, PlanningHorizon.SHORT_TERM): set(),
        (PlanningStage.FORECASTING, PlanningHorizon.LONG_TERM): {
            DocumentKind.LONG_TERM_SED_FORECAST,
            DocumentKind.LONG_TERM_BUDGET_PROJECTION,
        },
        (PlanningStage.FORECASTING, PlanningHorizon.MEDIUM_TERM): {
            DocumentKind.MEDIUM_TERM_SED_FORECAST
        },
        (PlanningStage.FORECASTING, PlanningHorizon.SHORT_TERM): set(),
        (PlanningStage.PLANNING_PROGRAMMING, PlanningHorizon.LONG_TERM): set(),
        (PlanningStage.PLANNING_PROGRAMMING, PlanningHorizon.MEDIUM_TERM): {
            DocumentKind.MUNICIPAL_PROGRAM
        },
        (PlanningStage.PLANNING_PROGRAMMING, PlanningHorizon.SHORT_TERM): {
            DocumentKind.STRATEGY_IMPLEMENTATION_PLAN
        },
    }
    assert len(grid) == 9
    union = set()
    for (stage, horizon), expected in grid.items():
        cell = required_documents(stage, horizon)
        assert cell == expected
        union |= cell
    assert union == set(DocumentKind)
    assert len(union) == 6

    full = [DocumentRecord(kind=kind, title=kind.value) for kind in DocumentKind]
    assert portfolio_coverage(full).missing == frozenset()
    assert portfolio_coverage([]).missing == frozenset(DocumentKind)
    assert len(portfolio_coverage([]).missing) == 6
    _report(6, "document grid golden", watch, 1.0)


def test_criterion_7_persistence(tmp_path):
    watch = _Stopwatch()
    rng = random.Random(7)
    for trial in range(100):
        project = random_project(rng, project_id=f"acc7.{trial}")
        first = tmp_path / "first.json"
        second = tmp_path / "second.json"
        save_project(project, first)
        save_project(load_project(first), second)
        assert first.read_bytes() == second.read_bytes()

    app = create_app(tmp_path / "store")
    with TestClient(app) as client:
        payload = project_to_payload(chain_project())
        created = client.put("/api/v1/projects/chain", json=payload)
        assert created.status_code == 200
        stale = client.put("/api/v1/projects/chain", json=payload)  # revision now stale
        assert stale.status_code == 409
        assert stale.json()["code"] == "CONFLICT"
    _report(7, "persistence fixed point + conflict", watch, 5.0)


def test_criterion_8_cli_api_equivalence(tmp_path):
    watch = _Stopwatch()
    fixture = tmp_path / "chain.json"
    save_project(chain_project(), fixture)

    runner = CliRunner()
    cli_result = runner.invoke(cli_main, ["rate", str(fixture), "--target", "t", "--out", "json"])
    assert cli_result.exit_code == 0, cli_result.output
    cli_body = json.loads(cli_result.output)

    app = create_app(tmp_path / "store")
    with TestClient(app) as client:
        payload = project_to_payload(chain_project())
        assert client.put("/api/v1/projects/chain", json=payload).status_code == 200
        api_body = client.get("/api/v1/projects/chain/ratings/t").json()

    assert cli_body == api_body
    assert api_body["entries"][0]["indicator_id"] == "a"  # ties broken by id
    assert api_body["entries"][0]["total_impact"] == pytest.approx(0.4)
    _report(8, "CLI/API rating equivalence", watch, 5.0)
