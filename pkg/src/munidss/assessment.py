"""Indicator assessment: relevance, criticality levels, ratings and what-if.

For each indicator the assessment combines how far its current value strays
from the permitted range (relevance), its direct aggregated impact on each
target, its total walk-summed impact, and the ordinal criticality class of
that total. Ratings order indicators per target by |total impact|, breaking
ties by relevance and finally by id so the order is reproducible. What-if
predictions are first-order: a shock vector is pushed through the total
influence operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from munidss.domain import (
    CriticalityConfig,
    CriticalityLevel,
    CriticalityThresholds,
    Indicator,
    IndicatorKind,
    PermittedRange,
    Project,
)
from munidss.errors import NotFoundError, ValidationError
from munidss.influence import ImpactMatrix, InfluenceMatrix, build_matrix

Scenario = Mapping[str, float]
ScenarioOutcome = dict[str, float]


@dataclass(frozen=True)
class IndicatorAssessment:
    """Full per-indicator record: relevance plus per-target impact vectors."""

    indicator_id: str
    relevance: float
    direct_impact: tuple[float, ...]
    total_impact: tuple[float, ...]
    criticality: tuple[CriticalityLevel, ...]


@dataclass(frozen=True)
class RatingEntry:
    indicator_id: str
    rank: int
    total_impact: float  # |total influence on the target|, the primary sort key
    direct_impact: float
    relevance: float
    criticality: CriticalityLevel


@dataclass(frozen=True)
class Rating:
    """Total order of indicators for one target; ranks are a permutation of 1..n."""

    target_id: str
    entries: tuple[RatingEntry, ...]


def relevance(indicator: Indicator, permitted: PermittedRange) -> float:
    """Normalized deviation of the current value from its permitted range.

    Inside the range (or an allowed label) the indicator is unremarkable and
    scores 0. Quantitative overshoot scales by the range width (falling back
    to max(|hi|, 1) for degenerate ranges) and saturates at 1; a disallowed
    label scores 1 outright.
    """
    if permitted.indicator_id != indicator.id:
        raise ValidationError(
            f"range for {permitted.indicator_id!r} applied to indicator {indicator.id!r}"
        )
    if indicator.kind is IndicatorKind.QUANTITATIVE:
        if not permitted.is_quantitative or permitted.is_qualitative:
            raise ValidationError(f"indicator {indicator.id!r} needs an interval range")
        value = indicator.current_value
        if not isinstance(value, float) or not math.isfinite(value):
            raise ValidationError(f"indicator {indicator.id!r} has no finite current value")
        lo, hi = permitted.lo, permitted.hi
        if lo <= value <= hi:
            return 0.0
        deviation = max(lo - value, value - hi)
        scale = (hi - lo) if hi > lo else max(abs(hi), 1.0)
        return min(1.0, deviation / scale)
    if not permitted.is_qualitative or permitted.is_quantitative:
        raise ValidationError(f"indicator {indicator.id!r} needs a label-set range")
    if not isinstance(indicator.current_value, str):
        raise ValidationError(f"indicator {indicator.id!r} has no label current value")
    return 0.0 if indicator.current_value in permitted.allowed else 1.0


def criticality(
    total_impact: float,
    config: CriticalityConfig,
    target_id: str,
) -> CriticalityLevel:
    """Map |total impact| to the target's ordinal criticality class.

    Each level is inclusive at its lower threshold: impact exactly at the
    significant cutoff is Significant, not Moderate.
    """
    thresholds = config.thresholds_for(target_id)  # NotFoundError for unknown targets
    return _level(total_impact, thresholds)


def _level(total_impact: float, thresholds: CriticalityThresholds) -> CriticalityLevel:
    magnitude = abs(total_impact)
    if magnitude >= thresholds.critical:
        return CriticalityLevel.CRITICAL
    if magnitude >= thresholds.significant:
        return CriticalityLevel.SIGNIFICANT
    if magnitude >= thresholds.moderate:
        return CriticalityLevel.MODERATE
    return CriticalityLevel.NEGLIGIBLE


def _check_dimensions(project: Project, total: InfluenceMatrix) -> None:
    size = len(project.indicator_ids) + len(project.target_ids)
    if total.entries.shape != (size, size):
        raise ValidationError(
            f"influence matrix shape {total.entries.shape} does not match the project's "
            f"{size} nodes"
        )


def assess(project: Project, total: InfluenceMatrix) -> list[IndicatorAssessment]:
    """Produce one assessment per indicator (in id order).

    The direct impact vector is re-derived from the project so it always
    matches the matrix the caller propagated; criticality is judged on the
    propagated totals, not the direct weights.
    """
    direct = build_matrix(project)  # also re-validates the project
    _check_dimensions(project, total)
    config = project.criticality_config
    n = len(project.indicator_ids)
    target_cols = range(n, n + len(project.target_ids))

    out: list[IndicatorAssessment] = []
    for row, indicator in enumerate(project.indicators):
        permitted = project.range_for(indicator.id)
        score = relevance(indicator, permitted)
        direct_vec = tuple(float(direct.entries[row, col]) for col in target_cols)
        total_vec = tuple(float(total.entries[row, col]) for col in target_cols)
        levels = tuple(
            _level(value, config.thresholds_for(tid))
            for value, tid in zip(total_vec, project.target_ids)
        )
        out.append(
            IndicatorAssessment(
                indicator_id=indicator.id,
                relevance=score,
                direct_impact=direct_vec,
                total_impact=total_vec,
                criticality=levels,
            )
        )
    return out


def rating(project: Project, total: InfluenceMatrix, target_id: str) -> Rating:
    """Rank all indicators for one target.

    Sort key: |total impact| descending, then relevance descending, then
    indicator id ascending. The id tie-break makes the order total, so equal
    projects always rate identically.
    """
    if target_id not in project.target_ids:
        raise NotFoundError(f"unknown target {target_id!r}")
    assessments = assess(project, total)
    j = project.target_ids.index(target_id)

    def sort_key(a: IndicatorAssessment):
        return (-abs(a.total_impact[j]), -a.relevance, a.indicator_id)

    entries = tuple(
        RatingEntry(
            indicator_id=a.indicator_id,
            rank=rank,
            total_impact=abs(a.total_impact[j]),
            direct_impact=a.direct_impact[j],
            relevance=a.relevance,
            criticality=a.criticality[j],
        )
        for rank, a in enumerate(sorted(assessments, key=sort_key), start=1)
    )
    return Rating(target_id=target_id, entries=entries)


def what_if(project: Project, total: InfluenceMatrix, scenario: Scenario) -> ScenarioOutcome:
    """Predict first-order node changes for a shock on some indicators.

    The outcome at node v is the applied shock at v plus every shocked
    indicator's shock scaled by its total influence on v. Targets are sinks,
    not levers: shocking a target is rejected.
    """
    _check_dimensions(project, total)
    order = project.indicator_ids + project.target_ids
    index = {node: i for i, node in enumerate(order)}
    target_ids = set(project.target_ids)

    shock = np.zeros(len(order))
    for node, delta in scenario.items():
        if node in target_ids:
            raise ValidationError(f"cannot shock target {node!r}: targets are sinks, not levers")
        if node not in index:
            raise ValidationError(f"scenario refers to unknown indicator {node!r}")
        if not math.isfinite(delta):
            raise ValidationError(f"shock for {node!r} must be finite, got {delta!r}")
        shock[index[node]] = delta

    outcome = shock + shock @ total.entries
    return {node: float(outcome[i]) for node, i in index.items()}
