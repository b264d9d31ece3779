"""Domain model: indicators, targets, expert estimates and project validation.

A :class:`Project` bundles everything the engine needs for one municipality:
the indicator list with current values and permitted ranges, the targeted
indicators, the raw expert impact estimates, and the per-target criticality
thresholds. All types are immutable; construction normalizes ordering (by id)
so that two projects with the same content compare equal regardless of input
order. Invariant checking is deliberately *not* done in constructors —
:func:`validate_project` reports every violation as data instead of failing
on the first.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Iterable, Mapping, NamedTuple, Sequence

from munidss.errors import ValidationError, Violation

# Ids double as CSV cells, URL segments and (for projects) file names.
_ID_TOKEN = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.:-]*$")

DEFAULT_CRITICAL = 0.75
DEFAULT_SIGNIFICANT = 0.5
DEFAULT_MODERATE = 0.25


class IndicatorKind(str, Enum):
    QUANTITATIVE = "quantitative"
    QUALITATIVE = "qualitative"


class ImpactDirection(str, Enum):
    NEGATIVE = "negative"
    NONE = "none"
    POSITIVE = "positive"


class AggregationPolicy(str, Enum):
    MEAN = "mean"
    MEDIAN = "median"


class MfType(str, Enum):
    URBAN_OKRUG = "urban_okrug"
    MUNICIPAL_DISTRICT = "municipal_district"
    URBAN_SETTLEMENT = "urban_settlement"
    RURAL_SETTLEMENT = "rural_settlement"
    OTHER = "other"


class SedLevel(str, Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"


class CriticalityLevel(IntEnum):
    """Ordinal class of an impact magnitude; ordering is part of the contract."""

    NEGLIGIBLE = 0
    MODERATE = 1
    SIGNIFICANT = 2
    CRITICAL = 3

    @property
    def token(self) -> str:
        return self.name.lower()

    @classmethod
    def from_token(cls, token: str) -> "CriticalityLevel":
        try:
            return cls[token.upper()]
        except KeyError:
            raise ValidationError(f"unknown criticality level {token!r}") from None


def _coerce_enum(value, enum_cls):
    if isinstance(value, enum_cls):
        return value
    try:
        return enum_cls(value)
    except ValueError:
        raise ValidationError(f"{value!r} is not a valid {enum_cls.__name__}") from None


@dataclass(frozen=True)
class Indicator:
    """One measurable development characteristic with its current value."""

    id: str
    name: str
    kind: IndicatorKind
    current_value: float | str
    unit: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", _coerce_enum(self.kind, IndicatorKind))
        if isinstance(self.current_value, bool):
            raise ValidationError(f"indicator {self.id!r}: current_value may not be a boolean")
        if isinstance(self.current_value, int):
            object.__setattr__(self, "current_value", float(self.current_value))


@dataclass(frozen=True)
class TargetIndicator:
    """Goal-level indicator (e.g. quality of life) that indicators impact."""

    id: str
    name: str


@dataclass(frozen=True)
class PermittedRange:
    """Permitted values of one indicator.

    Quantitative indicators carry a closed interval [lo, hi]; qualitative ones
    carry the set of allowed labels. Exactly one variant must be populated.
    """

    indicator_id: str
    lo: float | None = None
    hi: float | None = None
    allowed: frozenset[str] | None = None

    def __post_init__(self):
        if self.allowed is not None and not isinstance(self.allowed, frozenset):
            object.__setattr__(self, "allowed", frozenset(self.allowed))
        for bound in ("lo", "hi"):
            value = getattr(self, bound)
            if isinstance(value, int) and not isinstance(value, bool):
                object.__setattr__(self, bound, float(value))

    @property
    def is_quantitative(self) -> bool:
        return self.lo is not None or self.hi is not None

    @property
    def is_qualitative(self) -> bool:
        return self.allowed is not None


@dataclass(frozen=True)
class ImpactEstimate:
    """One expert's signed impact weight of an indicator on another node.

    The value encodes direction and strength: negative values mean growth of
    the source depresses the sink, zero means no connection, positive values
    mean growth propagates. Targets can only ever appear as sinks.
    """

    expert_id: str
    source: str
    sink: str
    value: float

    def __post_init__(self):
        if isinstance(self.value, int) and not isinstance(self.value, bool):
            object.__setattr__(self, "value", float(self.value))


@dataclass(frozen=True)
class MunicipalProfile:
    """Strategy determinants of a municipality."""

    mf_type: MfType
    sed_level: SedLevel
    rural_settlement_count: int
    mf_type_detail: str = ""

    def __post_init__(self):
        object.__setattr__(self, "mf_type", _coerce_enum(self.mf_type, MfType))
        object.__setattr__(self, "sed_level", _coerce_enum(self.sed_level, SedLevel))


@dataclass(frozen=True)
class CriticalityThresholds:
    """Magnitude cutoffs for one target; must satisfy 0 < moderate < significant < critical."""

    critical: float = DEFAULT_CRITICAL
    significant: float = DEFAULT_SIGNIFICANT
    moderate: float = DEFAULT_MODERATE

    def is_ordered(self) -> bool:
        return 0.0 < self.moderate < self.significant < self.critical


@dataclass(frozen=True)
class CriticalityConfig:
    """One thresholds triple per targeted indicator (exactly one per target)."""

    thresholds: Mapping[str, CriticalityThresholds]

    def __post_init__(self):
        object.__setattr__(self, "thresholds", dict(self.thresholds))

    @classmethod
    def defaults_for(cls, target_ids: Iterable[str]) -> "CriticalityConfig":
        return cls({tid: CriticalityThresholds() for tid in target_ids})

    def thresholds_for(self, target_id: str) -> CriticalityThresholds:
        from munidss.errors import NotFoundError

        try:
            return self.thresholds[target_id]
        except KeyError:
            raise NotFoundError(f"no criticality thresholds for target {target_id!r}") from None


def _sorted_estimates(estimates: Iterable[ImpactEstimate]) -> tuple[ImpactEstimate, ...]:
    return tuple(sorted(estimates, key=lambda e: (e.source, e.sink, e.expert_id)))


@dataclass(frozen=True)
class Project:
    """Everything the engine needs for one municipality, as one immutable value."""

    id: str
    profile: MunicipalProfile
    indicators: tuple[Indicator, ...]
    targets: tuple[TargetIndicator, ...]
    estimates: tuple[ImpactEstimate, ...] = ()
    ranges: tuple[PermittedRange, ...] = ()
    criticality_config: CriticalityConfig | None = None
    aggregation_policy: AggregationPolicy = AggregationPolicy.MEAN
    revision: int = 0

    def __post_init__(self):
        object.__setattr__(self, "indicators", tuple(sorted(self.indicators, key=lambda i: i.id)))
        object.__setattr__(self, "targets", tuple(sorted(self.targets, key=lambda t: t.id)))
        object.__setattr__(self, "estimates", _sorted_estimates(self.estimates))
        object.__setattr__(self, "ranges", tuple(sorted(self.ranges, key=lambda r: r.indicator_id)))
        object.__setattr__(
            self, "aggregation_policy", _coerce_enum(self.aggregation_policy, AggregationPolicy)
        )
        if self.criticality_config is None:
            object.__setattr__(
                self, "criticality_config", CriticalityConfig.defaults_for(self.target_ids)
            )

    @property
    def indicator_ids(self) -> tuple[str, ...]:
        return tuple(i.id for i in self.indicators)

    @property
    def target_ids(self) -> tuple[str, ...]:
        return tuple(t.id for t in self.targets)

    def indicator(self, indicator_id: str) -> Indicator:
        for ind in self.indicators:
            if ind.id == indicator_id:
                return ind
        raise KeyError(indicator_id)

    def range_for(self, indicator_id: str) -> PermittedRange | None:
        for rng in self.ranges:
            if rng.indicator_id == indicator_id:
                return rng
        return None


class AggregateResult(NamedTuple):
    weight: float
    conflict: bool


def classify_impact(value: float) -> ImpactDirection:
    """Classify one expert estimate by the piecewise sign rule.

    Values in [-1, 0) depress the sink, exactly 0 means no connection,
    values in (0, 1] reinforce the sink. Anything outside [-1, 1] is not a
    legal estimate and raises.
    """
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"impact estimate must be a real number, got {value!r}")
    if math.isnan(value) or not -1.0 <= value <= 1.0:
        raise ValidationError(f"impact estimate {value!r} outside the permitted interval [-1, 1]")
    if value < 0:
        return ImpactDirection.NEGATIVE
    if value == 0:
        return ImpactDirection.NONE
    return ImpactDirection.POSITIVE


def aggregate_estimates(
    values: Sequence[float],
    policy: AggregationPolicy = AggregationPolicy.MEAN,
) -> AggregateResult:
    """Collapse several experts' estimates for one edge into a single weight.

    Mean preserves magnitude information; median (the lower median) resists
    outliers. ``conflict`` is set when experts disagree about the sign, so the
    disagreement survives aggregation even if the weights cancel.
    """
    if len(values) == 0:
        raise ValidationError("cannot aggregate an empty list of estimates")
    policy = _coerce_enum(policy, AggregationPolicy)
    for value in values:
        if math.isnan(value) or not -1.0 <= value <= 1.0:
            raise ValidationError(f"impact estimate {value!r} outside the permitted interval [-1, 1]")
    if policy is AggregationPolicy.MEAN:
        weight = math.fsum(values) / len(values)
    else:
        ordered = sorted(values)
        weight = ordered[(len(ordered) - 1) // 2]
    conflict = min(values) < 0.0 < max(values)
    return AggregateResult(float(weight), conflict)


def _check_id(value: str, where: str, out: list[Violation]) -> None:
    if not isinstance(value, str) or not value:
        out.append(Violation("EMPTY_ID", "id must be a nonempty token", where))
    elif not _ID_TOKEN.match(value):
        out.append(
            Violation(
                "ID_FORMAT",
                f"id {value!r} must match [A-Za-z0-9][A-Za-z0-9_.:-]* "
                "(ids appear in file names, URLs and CSV headers)",
                where,
            )
        )


def validate_project(project: Project) -> list[Violation]:
    """Check every project invariant; an empty report means the project is valid.

    Violations are data, not failures: callers that require validity (matrix
    construction, persistence) raise with the returned report attached.
    """
    out: list[Violation] = []

    _check_id(project.id, "project.id", out)
    if not isinstance(project.revision, int) or isinstance(project.revision, bool) or project.revision < 0:
        out.append(Violation("REVISION", "revision must be a nonnegative integer", "project.revision"))
    if project.profile.rural_settlement_count < 0:
        out.append(
            Violation(
                "NEGATIVE_COUNT",
                "rural_settlement_count must be nonnegative",
                "profile.rural_settlement_count",
            )
        )

    if not project.indicators:
        out.append(Violation("NO_INDICATORS", "a project needs at least one indicator", "indicators"))
    if not project.targets:
        out.append(Violation("NO_TARGETS", "a project needs at least one targeted indicator", "targets"))

    seen: dict[str, str] = {}
    for ind in project.indicators:
        where = f"indicators[{ind.id}]"
        _check_id(ind.id, where, out)
        if ind.id in seen:
            out.append(Violation("DUPLICATE_ID", f"id {ind.id!r} already used by {seen[ind.id]}", where))
        seen.setdefault(ind.id, "an indicator")
        if ind.kind is IndicatorKind.QUANTITATIVE:
            if not isinstance(ind.current_value, float):
                out.append(Violation("VALUE_KIND", "quantitative indicator needs a numeric current_value", where))
            elif not math.isfinite(ind.current_value):
                out.append(Violation("VALUE_NOT_FINITE", "quantitative current_value must be finite", where))
        else:
            if not isinstance(ind.current_value, str):
                out.append(Violation("VALUE_KIND", "qualitative indicator needs a label current_value", where))
    for tgt in project.targets:
        where = f"targets[{tgt.id}]"
        _check_id(tgt.id, where, out)
        if tgt.id in seen:
            out.append(Violation("DUPLICATE_ID", f"id {tgt.id!r} already used by {seen[tgt.id]}", where))
        seen.setdefault(tgt.id, "a target")

    indicator_ids = {i.id for i in project.indicators}
    node_ids = indicator_ids | {t.id for t in project.targets}

    ranged: set[str] = set()
    for rng in project.ranges:
        where = f"ranges[{rng.indicator_id}]"
        if rng.indicator_id not in indicator_ids:
            out.append(Violation("DANGLING_REF", f"range refers to unknown indicator {rng.indicator_id!r}", where))
            continue
        if rng.indicator_id in ranged:
            out.append(Violation("DUPLICATE_RANGE", "an indicator may have exactly one permitted range", where))
        ranged.add(rng.indicator_id)
        if rng.is_quantitative == rng.is_qualitative:
            out.append(
                Violation("RANGE_VARIANT", "range must be either an interval {lo, hi} or a label set", where)
            )
            continue
        kind = project.indicator(rng.indicator_id).kind
        if rng.is_quantitative:
            if kind is not IndicatorKind.QUANTITATIVE:
                out.append(Violation("RANGE_KIND", "interval range attached to a qualitative indicator", where))
            if rng.lo is None or rng.hi is None:
                out.append(Violation("RANGE_VARIANT", "interval range needs both lo and hi", where))
            elif not (math.isfinite(rng.lo) and math.isfinite(rng.hi)):
                out.append(Violation("RANGE_ORDER", "interval bounds must be finite", where))
            elif rng.lo > rng.hi:
                out.append(Violation("RANGE_ORDER", f"lo ({rng.lo}) must not exceed hi ({rng.hi})", where))
        else:
            if kind is not IndicatorKind.QUALITATIVE:
                out.append(Violation("RANGE_KIND", "label-set range attached to a quantitative indicator", where))
            if not rng.allowed:
                out.append(Violation("RANGE_EMPTY", "the allowed label set must be nonempty", where))
    for missing in sorted(indicator_ids - ranged):
        out.append(
            Violation("MISSING_RANGE", "every indicator needs a permitted range", f"indicators[{missing}]")
        )

    seen_edges: set[tuple[str, str, str]] = set()
    target_ids = {t.id for t in project.targets}
    for est in project.estimates:
        where = f"estimates[{est.expert_id}:{est.source}->{est.sink}]"
        if not isinstance(est.value, float) or math.isnan(est.value) or not -1.0 <= est.value <= 1.0:
            out.append(
                Violation("ESTIMATE_RANGE", f"estimate value {est.value!r} outside [-1, 1]", where)
            )
        if est.source == est.sink:
            out.append(Violation("SELF_ESTIMATE", "an indicator cannot estimate impact on itself", where))
        if est.source in target_ids:
            out.append(Violation("TARGET_AS_SOURCE", "targets are sinks; they cannot impact other nodes", where))
        elif est.source not in indicator_ids:
            out.append(Violation("DANGLING_REF", f"estimate source {est.source!r} is unknown", where))
        if est.sink not in node_ids:
            out.append(Violation("DANGLING_REF", f"estimate sink {est.sink!r} is unknown", where))
        key = (est.expert_id, est.source, est.sink)
        if key in seen_edges:
            out.append(Violation("DUPLICATE_ESTIMATE", "one expert may estimate each edge once", where))
        seen_edges.add(key)

    config = project.criticality_config
    if config is not None:
        config_targets = set(config.thresholds)
        if config_targets != target_ids:
            out.append(
                Violation(
                    "CRITICALITY_TARGETS",
                    "criticality thresholds must cover exactly the project's targets",
                    "criticality_config",
                )
            )
        for tid, th in sorted(config.thresholds.items()):
            ordered = (
                all(math.isfinite(x) for x in (th.moderate, th.significant, th.critical))
                and th.is_ordered()
            )
            if not ordered:
                out.append(
                    Violation(
                        "THRESHOLD_ORDER",
                        "thresholds must satisfy 0 < moderate < significant < critical",
                        f"criticality_config[{tid}]",
                    )
                )

    return out


def require_valid(project: Project) -> None:
    """Raise ValidationError carrying the full report unless the project is valid."""
    report = validate_project(project)
    if report:
        raise ValidationError(f"project {project.id!r} failed validation", report)
